"""Command-line front end: ``slitcyl single|array|resonances|converge|presets``.

Exit codes: 0 success, 1 solver failure, 2 usage or validation error.
"""

from __future__ import annotations

import functools
import logging
import time
import warnings
from pathlib import Path

import click

from .array import array_il_spectrum
from .config import (ConfigError, RunConfig, apply_overrides, build_config, load_document,
                     preset_document, preset_names, validate_run)
from .effective import resonance_table
from .model import GeometryError, UnsupportedConfigurationError
from .single import il_spectrum
from .spectrum import (Spectrum, agrees_to_three_figures, band_gap_summary, find_peaks,
                       format_band_gaps, gnuplot_script, relative_discrepancy)

log = logging.getLogger("slitcyl")

EXIT_SOLVER = 1
EXIT_USAGE = 2


class SolverFailure(click.ClickException):
    exit_code = EXIT_SOLVER


class UsageFailure(click.ClickException):
    exit_code = EXIT_USAGE


def scene_options(fn):
    @click.option("--preset", help="Shipped scenario preset (see `slitcyl presets`).")
    @click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                  help="YAML run configuration.")
    @click.option("--f-min", type=float, help="Override sweep start (Hz).")
    @click.option("--f-max", type=float, help="Override sweep end (Hz).")
    @click.option("--step", type=float, help="Override sweep step (Hz).")
    @click.option("--max-order", "-M", type=int, help="Override truncation order M.")
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        return fn(*args, **kwargs)
    return wrapper


def output_options(fn):
    @click.option("--out", "-o", type=click.Path(dir_okay=False),
                  help="CSV path (default: <name>.csv in the working directory).")
    @click.option("--workers", type=int, help="Sweep threads (default: SLITCYL_THREADS or CPU count).")
    @click.option("--gnuplot", is_flag=True, help="Also write a gnuplot script next to the CSV.")
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        return fn(*args, **kwargs)
    return wrapper


def _load(preset, config_path, variant=None, **overrides) -> RunConfig:
    if bool(preset) == bool(config_path):
        raise UsageFailure("give exactly one of --preset or --config")
    try:
        doc = preset_document(preset) if preset else load_document(config_path)
        doc = apply_overrides(doc, variant=variant, **overrides)
        cfg = build_config(doc, preset or Path(config_path).stem)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            problems = validate_run(cfg)
        for w in caught:
            click.echo(f"warning: {w.message}", err=True)
    except (ConfigError, GeometryError, UnsupportedConfigurationError, ValueError) as exc:
        raise UsageFailure(str(exc)) from None
    if problems:
        for p in problems:
            click.echo(f"invalid: {p}", err=True)
        raise UsageFailure(f"{len(problems)} validation error(s)")
    return cfg


def _csv_path(cfg: RunConfig, out, suffix="") -> Path:
    base = Path(out) if out else Path(f"{cfg.name}.csv")
    if suffix:
        base = base.with_name(f"{base.stem}_{suffix}{base.suffix or '.csv'}")
    return base


def _emit(spectrum: Spectrum, path: Path, gnuplot: bool, title: str) -> None:
    if len(spectrum) == 0:
        raise SolverFailure(f"every frequency failed; see {path}.meta.json")
    csv, meta = spectrum.write(path)
    if gnuplot:
        Path(str(csv) + ".gp").write_text(gnuplot_script(csv, title))
    skipped = spectrum.metadata.get("skipped", [])
    if skipped:
        click.echo(f"warning: {len(skipped)} frequencies skipped (listed in {meta.name})", err=True)
    click.echo(f"wrote {csv} ({len(spectrum)} samples)")


def _peaks_line(spectrum: Spectrum) -> str:
    peaks = find_peaks(spectrum)
    if not peaks:
        return "peaks: none"
    return "peaks (Hz): " + ", ".join(f"{p.frequency:.0f} ({p.value:.2f} dB)" for p in peaks)


def _sweep(cfg: RunConfig, variant: str, workers):
    grid = cfg.sweep.grid()
    meta = cfg.metadata()
    order = cfg.max_order if variant == "full" else cfg.approx_max_order
    try:
        if cfg.is_array:
            return array_il_spectrum(cfg.scene, cfg.receiver, grid, order, variant, cfg.medium,
                                     workers, cfg.shell_thickness, meta)
        return il_spectrum(cfg.scene, cfg.receiver, grid, order, variant, cfg.medium, workers,
                           cfg.shell_thickness, meta)
    except (GeometryError, UnsupportedConfigurationError) as exc:
        raise UsageFailure(str(exc)) from None
    except ArithmeticError as exc:
        raise SolverFailure(str(exc)) from None


def _run_variants(cfg: RunConfig, out, workers, gnuplot, band_gaps: bool):
    variants = ("full", "approx") if cfg.variant == "both" else (cfg.variant,)
    spectra = {}
    for v in variants:
        t0 = time.perf_counter()
        spec = _sweep(cfg, v, workers)
        spec.metadata["elapsed_s"] = round(time.perf_counter() - t0, 3)
        path = _csv_path(cfg, out, v if len(variants) > 1 else "")
        _emit(spec, path, gnuplot, f"{cfg.name} ({v})")
        click.echo(f"{v}: {_peaks_line(spec)}")
        if band_gaps:
            rows = band_gap_summary(spec, provenance=cfg.provenance.get("figure", cfg.name))
            text = format_band_gaps(rows)
            Path(str(path) + ".bandgaps.txt").write_text(text)
            click.echo(text, nl=False)
        spectra[v] = spec
    if len(spectra) == 2:
        full, approx = spectra["full"], spectra["approx"]
        disc = relative_discrepancy(full, approx, 2000.0)
        speed = full.metadata["elapsed_s"] / max(approx.metadata["elapsed_s"], 1e-9)
        click.echo(f"max relative IL discrepancy below 2000 Hz: {disc:.4f} "
                   f"({'within' if disc < 0.05 else 'outside'} 5%); approx speed-up x{speed:.1f}")
    return spectra


@click.group()
@click.option("-v", "--verbose", count=True, help="-v for progress, -vv for solver diagnostics.")
def main(verbose):
    """Insertion loss of slit cylinders, composites and finite arrays."""
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


@main.command()
def presets():
    """List the shipped scenario presets."""
    for name in preset_names():
        doc = preset_document(name)
        prov = doc.get("provenance", {})
        click.echo(f"{name}\t{prov.get('figure', '')}\t{prov.get('description', '')}")


@main.command()
@scene_options
@output_options
@click.option("--variant", type=click.Choice(["full", "approx", "both"]), help="Model variant.")
def single(preset, config_path, f_min, f_max, step, max_order, out, workers, gnuplot, variant):
    """Insertion-loss spectrum of one scatterer."""
    cfg = _load(preset, config_path, variant, f_min=f_min, f_max=f_max, step=step,
                max_order=max_order)
    if cfg.is_array:
        raise UsageFailure("configuration describes an array; use `slitcyl array`")
    _run_variants(cfg, out, workers, gnuplot, band_gaps=False)


@main.command()
@scene_options
@output_options
@click.option("--variant", type=click.Choice(["full", "approx", "both"]), help="Model variant.")
def array(preset, config_path, f_min, f_max, step, max_order, out, workers, gnuplot, variant):
    """Insertion-loss spectrum and band-gap summary of a finite array."""
    cfg = _load(preset, config_path, variant, f_min=f_min, f_max=f_max, step=step,
                max_order=max_order)
    if not cfg.is_array:
        raise UsageFailure("configuration describes a single scatterer; use `slitcyl single`")
    _run_variants(cfg, out, workers, gnuplot, band_gaps=True)


@main.command()
@click.option("--preset", help="Shipped scenario preset.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
def resonances(preset, config_path):
    """Closed-form resonance estimates for the scene's scatterer."""
    cfg = _load(preset, config_path)
    scatterer = cfg.scatterers()[0]
    try:
        rows = resonance_table(scatterer, cfg.medium)
    except (UnsupportedConfigurationError, ValueError, ArithmeticError) as exc:
        raise SolverFailure(str(exc)) from None
    click.echo("estimator\tfrequency_hz\tformula")
    for name, formula, hz in rows:
        click.echo(f"{name}\t{hz:.6g}\t{formula}")


def _orders(text: str) -> list[int]:
    try:
        values = sorted({int(v) for v in text.split(",") if v.strip()})
    except ValueError:
        raise UsageFailure(f"cannot read truncation orders {text!r}") from None
    if not values or values[0] < 1:
        raise UsageFailure("truncation orders must be positive integers")
    return values


@main.command()
@scene_options
@output_options
@click.option("--orders", default="25,30,35,40", show_default=True,
              help="Comma-separated truncation orders.")
def converge(preset, config_path, f_min, f_max, step, max_order, out, workers, gnuplot, orders):
    """Truncation study: one spectrum per M and an agreement report."""
    cfg = _load(preset, config_path, "full", f_min=f_min, f_max=f_max, step=step,
                max_order=max_order)
    ms = _orders(orders)
    spectra = {}
    for m in ms:
        cfg.max_order = m
        spec = _sweep(cfg, "full", workers)
        _emit(spec, _csv_path(cfg, out, f"M{m}"), gnuplot, f"{cfg.name} M={m}")
        spectra[m] = spec
    ref = spectra[ms[-1]]
    click.echo(f"reference M={ms[-1]}")
    click.echo("M\tmax_rel_dev\tthree_figures")
    for m in ms:
        dev = relative_discrepancy(ref, spectra[m])
        click.echo(f"{m}\t{dev:.3e}\t{'yes' if agrees_to_three_figures(ref, spectra[m]) else 'no'}")


if __name__ == "__main__":  # pragma: no cover
    main()
