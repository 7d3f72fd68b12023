"""Analytic multichannel quantum defect theory with frame transformation for
ultracold Rb87-Rb85 collisions, plus the trapped-pair spectrum and
collisional-shift analysis built on it."""

__version__ = "0.1.0"

from .constants import (  # noqa: F401
    Species,
    SpeciesPair,
    VdwScales,
    default_pair,
    load_species,
    reduced_mass,
    vdw_scales,
)
from .angular import (  # noqa: F401
    ChannelSpace,
    EigenChannel,
    FragChannel,
    channel_space,
    clebsch_gordan,
    enumerate_eigenchannels,
    enumerate_frag_channels,
    frame_transform,
)
from .mqdt import (  # noqa: F401
    DefectSet,
    build_kc,
    channel_scattering_length,
    classify_eigenchannels,
    eliminate_closed,
    partition_channels,
    scattering_length,
)
from .longrange import ScaledEnergy, chi_c, scaled_energy  # noqa: F401
from .trap import (  # noqa: F401
    TrapEnergy,
    TrapGeometry,
    a_to_energy,
    big_f,
    energy_to_a,
    hyp2f1_unit_circle,
    pseudopotential_validity,
    trap_geometry,
)
from .shifts import (  # noqa: F401
    FitResult,
    Measurement,
    TransitionSpec,
    fit_scattering_length,
    make_transition,
    predict_shift,
    shift_curve,
    synthesize_measurements,
)
