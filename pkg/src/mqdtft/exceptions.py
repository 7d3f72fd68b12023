"""Exception types shared across the package."""


class MqdtftError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(MqdtftError):
    """Invalid configuration file or inconsistent inputs."""


class PoleError(MqdtftError):
    """Evaluation requested too close to a pole (Gamma pole, tangent pole,
    or a divergent scattering length)."""


class NearResonanceError(MqdtftError):
    """Closed-channel elimination matrix is numerically singular."""


class ClassificationError(MqdtftError):
    """Eigenchannel class cannot be decided by the default dominance rule."""


class AccuracyError(MqdtftError):
    """A numerical routine could not certify its accuracy target."""


class BracketError(MqdtftError):
    """Root or minimum bracketing failed."""
