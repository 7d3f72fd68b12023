"""Command-line front end.

Every subcommand takes a JSON config (see config.SCHEMA); selected flags
override config values.  Numeric output: lengths to 0.1 a0, shifts to
0.01 kHz, defects to 4 decimals.  On failure a single machine-readable line
``ERROR <Type>: <message>`` goes to stderr and the exit code is nonzero.
"""
from __future__ import annotations

import sys

import click

from . import __version__
from .angular import channel_space, channel_table
from .config import RunConfig, load_config, validate_config
from .exceptions import MqdtftError
from .longrange import chi_c, scaled_energy
from .mqdt import channel_scattering_length
from .shifts import (
    fit_scattering_length,
    read_measurements,
    shift_curve,
    synthesize_measurements,
    write_measurements,
)
from .trap import a_to_energy, pseudopotential_validity, trap_geometry


def _fail(exc: BaseException) -> None:
    click.echo(f"ERROR {type(exc).__name__}: {exc}", err=True)
    sys.exit(1)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        click.echo(text)


def _load(config_path: str | None) -> RunConfig:
    if config_path is None:
        return validate_config({})
    return load_config(config_path)


@click.group()
@click.version_option(__version__, prog_name="mqdtft")
def main():
    """Scattering lengths, trapped-pair spectra and collisional-shift fits
    for ultracold heteronuclear alkali pairs."""


@main.command("scattering-length")
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--mu-s", type=float, default=None, help="override mu_s_ei")
@click.option("--mu-t", type=float, default=None, help="override mu_t_ei")
@click.option("--mu-t-es", type=float, default=None, help="override mu_t_es")
@click.option("--c6", type=float, default=None, help="override C6 (a.u.)")
@click.option("--beta6", type=float, default=None, help="override beta6 (a0)")
@click.option("--out", type=click.Path(), default=None)
def cmd_scattering_length(config_path, mu_s, mu_t, mu_t_es, c6, beta6, out):
    """Per-channel scattering lengths from the frame-transformed K matrix."""
    try:
        cfg = _load(config_path)
        raw = cfg.raw
        if c6 is not None:
            raw["c6_au"] = c6
        if beta6 is not None:
            raw["beta6_a0"] = beta6
        for key, val in (("mu_s_ei", mu_s), ("mu_t_ei", mu_t), ("mu_t_es", mu_t_es)):
            if val is not None:
                raw.setdefault("defects", {})[key] = val
        rows = raw.get("rows")
        if not rows:
            raise MqdtftError("config has no 'rows' to evaluate")
        pair = cfg.pair()
        scales = cfg.scales()
        chi_map = cfg.chi_map()
        source = raw.get("chi_source", "auto")
        lines = []
        any_es = any(cfg.defects(r).mu_t_es != cfg.defects(r).mu_t_ei for r in rows)
        hdr = ["channel", "mu_s", "mu_t"] + (["mu_t_es"] if any_es else []) + ["a_mqdtft_a0"]
        if any("compare_a_exp" in r for r in rows):
            hdr.append("a_exp")
        if any("compare_a_cc" in r for r in rows):
            hdr.append("a_cc")
        lines.append("  ".join(hdr))
        for row in rows:
            ch = row["entrance"]
            entrance = (ch["f1"], ch["mf1"], ch["f2"], ch["mf2"])
            defects = cfg.defects(row)
            chi_arg = dict(chi_map)
            if source == "computed":
                chi_arg = {}
            res = channel_scattering_length(
                pair, entrance, defects, scales,
                chi_values=chi_arg,
                class_overrides=cfg.class_overrides(),
                chi_phase=raw.get("chi_phase"),
            )
            if source == "configured":
                missing = [k for k in res.chi_by_channel if k not in chi_map]
                if missing:
                    raise MqdtftError(
                        f"chi_source='configured' but no chi override for {missing}"
                    )
            cells = [
                res.space.frag[res.entrance_index].short_label(),
                f"{defects.mu_s_ei:.4f}",
                f"{defects.mu_t_ei:.4f}",
            ]
            if any_es:
                cells.append(f"{defects.mu_t_es:.4f}")
            cells.append(f"{res.a_a0:.1f}")
            if "a_exp" in hdr:
                cells.append(row.get("compare_a_exp", ""))
            if "a_cc" in hdr:
                cc = row.get("compare_a_cc")
                cells.append("" if cc is None else f"{cc:.1f}")
            lines.append("  ".join(cells))
        _emit("\n".join(lines), out)
    except MqdtftError as exc:
        _fail(exc)


@main.command("channels")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--m", "m_total", type=float, required=True, help="total projection M")
@click.option("--out", type=click.Path(), default=None)
def cmd_channels(config_path, m_total, out):
    """List fragmentation and eigenchannels at fixed total projection."""
    try:
        cfg = _load(config_path)
        space = channel_space(cfg.pair(), m_total)
        _emit(channel_table(space), out)
    except MqdtftError as exc:
        _fail(exc)


@main.command("chi")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--gap-ghz", "gaps", type=float, multiple=True,
              help="threshold gap above the entrance (GHz); repeatable")
@click.option("--eps", "eps_values", type=float, multiple=True,
              help="scaled energy E/s_E (< 0); repeatable")
@click.option("--out", type=click.Path(), default=None)
def cmd_chi(config_path, gaps, eps_values, out):
    """Long-range chi for closed channels of the -C6/R^6 potential."""
    try:
        cfg = _load(config_path)
        scales = cfg.scales()
        phase = cfg.raw.get("chi_phase")
        jobs = [(g, scaled_energy(g, scales)) for g in gaps]
        jobs += [(None, e) for e in eps_values]
        if not jobs:
            raise MqdtftError("give at least one --gap-ghz or --eps")
        lines = ["gap_ghz  eps  chi  wronskian_drift  matching_drift"]
        for gap, eps in jobs:
            res = chi_c(eps, scales, phase=phase)
            gtxt = f"{gap:.6f}" if gap is not None else "-"
            lines.append(
                f"{gtxt}  {res.eps:.4f}  {res.chi:.7f}  "
                f"{res.wronskian_drift:.2e}  {res.matching_drift:.2e}"
            )
        _emit("\n".join(lines), out)
    except MqdtftError as exc:
        _fail(exc)


@main.command("trap-levels")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--f-radial-khz", type=float, default=None)
@click.option("--f-axial-khz", type=float, default=None)
@click.option("--a", "a_values", type=float, multiple=True, required=True,
              help="scattering length (a0); repeatable")
@click.option("--branch", type=int, default=0)
@click.option("--out", type=click.Path(), default=None)
def cmd_trap_levels(config_path, f_radial_khz, f_axial_khz, a_values, branch, out):
    """Relative-motion energies of a trapped interacting pair."""
    try:
        cfg = _load(config_path)
        trap_cfg = cfg.raw.get("trap", {})
        fr = f_radial_khz if f_radial_khz is not None else trap_cfg.get("f_radial_khz")
        fa = f_axial_khz if f_axial_khz is not None else trap_cfg.get("f_axial_khz")
        if fr is None or fa is None:
            raise MqdtftError("trap frequencies required (flags or config 'trap')")
        trap = trap_geometry(cfg.pair(), fr, fa)
        ratio, verdict = pseudopotential_validity(trap, cfg.scales())
        lines = [
            f"trap: f_r = {fr:g} kHz, f_ax = {fa:g} kHz, eta = {trap.eta:.4f}, "
            f"n = {trap.n}, d_r = {trap.d_r_a0:.1f} a0, d_ax = {trap.d_ax_a0:.1f} a0",
            f"pseudopotential: beta6/d_r = {ratio:.3f} ({verdict})",
            "a_a0  branch  eps  energy_khz",
        ]
        for a in a_values:
            eps = a_to_energy(a, trap, branch)
            lines.append(
                f"{a:.1f}  {eps.branch}  {eps.value:.9f}  {eps.value * trap.f_ax_khz:.2f}"
            )
        _emit("\n".join(lines), out)
    except MqdtftError as exc:
        _fail(exc)


@main.command("shift-curve")
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), default=None)
def cmd_shift_curve(config_path, out):
    """Collisional shift versus axial frequency at fixed aspect ratio (CSV)."""
    try:
        cfg = _load(config_path)
        sweep = cfg.raw.get("sweep")
        if sweep is None:
            raise MqdtftError("config needs a 'sweep' section")
        t = cfg.transition()
        points = shift_curve(t, sweep["f_axial_khz"], sweep["eta"], cfg.scales())
        lines = ["omega_ax_khz,shift_khz"]
        for p in points:
            if p.error is None:
                lines.append(f"{p.f_ax_khz!r},{p.shift_khz:.2f}")
            else:
                lines.append(f"# {p.f_ax_khz!r}: {p.error}")
        _emit("\n".join(lines), out)
    except MqdtftError as exc:
        _fail(exc)


@main.command("synthesize")
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True)
def cmd_synthesize(config_path, out):
    """Generate synthetic measurements for the config's transition (CSV)."""
    try:
        cfg = _load(config_path)
        sweep = cfg.raw.get("sweep")
        syn = cfg.raw.get("synthesize")
        if sweep is None or syn is None:
            raise MqdtftError("config needs 'sweep' and 'synthesize' sections")
        data = synthesize_measurements(
            cfg.transition(), sweep["eta"], sweep["f_axial_khz"],
            syn["a_true_a0"], syn["sigma_khz"], syn["seed"],
        )
        write_measurements(out, data)
        click.echo(f"wrote {len(data)} measurements to {out}")
    except MqdtftError as exc:
        _fail(exc)


@main.command("fit")
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--data", "data_path", type=click.Path(exists=True), default=None,
              help="measurement CSV (overrides config fit.measurements_csv)")
@click.option("--out", type=click.Path(), default=None)
def cmd_fit(config_path, data_path, out):
    """Least-squares scattering length from shift-vs-frequency data."""
    try:
        cfg = _load(config_path)
        fit_cfg = cfg.raw.get("fit", {})
        path = data_path or fit_cfg.get("measurements_csv")
        if path is None:
            raise MqdtftError("no measurement CSV (flag --data or config fit.measurements_csv)")
        sweep = cfg.raw.get("sweep")
        if sweep is None:
            raise MqdtftError("config needs a 'sweep' section for eta")
        data = read_measurements(path, fit_cfg.get("default_sigma_khz"))
        bracket = tuple(fit_cfg.get("bracket_a0", (-1000.0, 1000.0)))
        res = fit_scattering_length(data, cfg.transition(), sweep["eta"], bracket)
        lines = [
            f"a_hat = {res.a_hat_a0:.1f} a0",
            f"sigma_a = {res.sigma_a_a0:.1f} a0",
            f"chi2 = {res.chi2:.3f} (ndof {res.ndof}, chi2/ndof {res.chi2 / res.ndof:.2f})",
            "residuals_khz: " + ", ".join(f"{r:.2f}" for r in res.residuals_khz),
        ]
        _emit("\n".join(lines), out)
    except MqdtftError as exc:
        _fail(exc)


if __name__ == "__main__":
    main()
