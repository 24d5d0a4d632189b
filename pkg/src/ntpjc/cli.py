"""Command-line front end.

Subcommands: ``run`` (one simulation, one CSV), ``sweep`` (Cartesian-product
parameter scan with a manifest), ``oracle-check`` (dressed solver vs direct
integration report), and ``fig1``..``fig16`` (canned parameter sets for the
standard collapse-revival, photon-statistics, and squeezing plots).

Everything is deterministic and seedless: identical invocations produce
byte-identical files.  CSV values carry 12 significant digits; optional SVG
output is a dependency-free polyline plot per observable.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from itertools import product
from pathlib import Path

import numpy as np

from .errors import CostGuardError, NumericalError, ValidationError
from .initial_state import INIT_MODES
from .observables import OBSERVABLE_NAMES
from .secular_solver import MANIFOLDS
from .simulate import (
    DEFAULT_OBSERVABLES,
    RunConfig,
    TimeSeries,
    oracle_check,
    simulate,
)

SWEEP_LIMIT = 10_000
SWEEPABLE = ("nbar1", "nbar2", "delta", "kappa", "tmax")

_RUN_DEFAULTS: dict = {
    "nbar1": 0.0,
    "nbar2": 0.0,
    "delta": 0.0,
    "kappa": 0.0,
    "tmax": 25.0,
    "samples": 501,
    "cutoff": None,
    "observables": DEFAULT_OBSERVABLES,
    "init_mode": "full-coherence",
    "manifold": "full",
    "out": ".",
    "svg": False,
    "oracle_check": False,
    "force": False,
}

# Canned parameter sets.  "family" is the parameter the corresponding plot
# varies curve by curve; invoking the preset without that flag produces one
# CSV per family member, passing it picks a single curve.  tmax/samples are
# editorial (the source plots carry no numeric time axes).
_FIG_PRESETS: dict[str, dict] = {
    "fig1": dict(obs="Re", nbar=(5, 5), fixed=("delta", 10.0),
                 family=("kappa", (0.0, 0.001, 0.01)), tmax=50.0, samples=2001),
    "fig2": dict(obs="Re", nbar=(5, 5), fixed=("delta", 10.0),
                 family=("kappa", (0.0, 0.001, 0.01)), tmax=120.0, samples=4801),
    "fig3": dict(obs="Re", nbar=(30, 30), fixed=("kappa", 0.001),
                 family=("delta", (0.0, 20.0, 100.0)), tmax=120.0, samples=4801),
    "fig4": dict(obs="Re", nbar=(30, 30), fixed=("delta", 10.0),
                 family=("kappa", (0.0, 0.0001, 0.001, 0.01)), tmax=120.0, samples=4801),
    "fig5": dict(obs="N1", nbar=(5, 5), fixed=("kappa", 0.001),
                 family=("delta", (0.0, 10.0, 100.0)), tmax=50.0, samples=2001),
    "fig6": dict(obs="N1", nbar=(5, 5), fixed=("delta", 10.0),
                 family=("kappa", (0.0, 0.001, 0.01)), tmax=50.0, samples=2001),
    "fig7": dict(obs="N1", nbar=(30, 30), fixed=("kappa", 0.001),
                 family=("delta", (0.0, 20.0, 100.0)), tmax=120.0, samples=4801),
    "fig8": dict(obs="N1", nbar=(30, 30), fixed=("delta", 10.0),
                 family=("kappa", (0.0, 0.0001, 0.001, 0.01)), tmax=120.0, samples=4801),
    "fig9": dict(obs="G2_1", nbar=(30, 30), fixed=("kappa", 0.001),
                 family=("delta", (0.0, 10.0, 20.0, 100.0)), tmax=120.0, samples=4801),
    "fig10": dict(obs="G2_1", nbar=(30, 30), fixed=("delta", 10.0),
                  family=("kappa", (0.0, 0.001, 0.01)), tmax=120.0, samples=4801),
    "fig11": dict(obs="S1", nbar=(50, 50), fixed=("kappa", 0.0),
                  family=("delta", (10.0, 100.0)), tmax=20.0, samples=8001),
    "fig12": dict(obs="S1", nbar=(50, 50), fixed=("delta", 10.0),
                  family=("kappa", (0.0, 0.0001)), tmax=20.0, samples=8001),
    "fig13": dict(obs="F1", nbar=(15, 10), fixed=("kappa", 0.001),
                  family=("delta", (50.0, 100.0)), tmax=20.0, samples=4001),
    "fig14": dict(obs="F2", nbar=(15, 10), fixed=("kappa", 0.001),
                  family=("delta", (50.0, 100.0)), tmax=20.0, samples=4001),
    "fig15": dict(obs="F1", nbar=(15, 10), fixed=("delta", 10.0),
                  family=("kappa", (0.001, 0.01)), tmax=20.0, samples=4001),
    "fig16": dict(obs="F2", nbar=(15, 10), fixed=("delta", 10.0),
                  family=("kappa", (0.001, 0.01)), tmax=20.0, samples=4001),
}


def _parse_cutoff(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("cutoff must be N1,N2")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _parse_observables(text: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in text.split(",") if s.strip())


def _parse_config_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValidationError(f"not a boolean: {text!r}")


_CONFIG_TYPES = {
    "nbar1": float,
    "nbar2": float,
    "delta": float,
    "kappa": float,
    "tmax": float,
    "samples": int,
    "cutoff": _parse_cutoff,
    "observables": _parse_observables,
    "init_mode": str,
    "manifold": str,
    "out": str,
    "svg": _parse_config_bool,
    "force": _parse_config_bool,
    "oracle_check": _parse_config_bool,
}


def _load_config_file(path: str) -> dict:
    """Flat `key = value` file; keys mirror the flag names."""
    values: dict = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read config file: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValidationError(f"{path}:{lineno}: expected key = value")
        key = key.strip().replace("-", "_")
        if key not in _CONFIG_TYPES:
            raise ValidationError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _CONFIG_TYPES[key](value.strip())
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from None
    return values


def _add_model_options(sp: argparse.ArgumentParser) -> None:
    # all defaults are None sentinels; resolution order is flag, then config
    # file, then the subcommand's own defaults
    sp.add_argument("--nbar1", type=float)
    sp.add_argument("--nbar2", type=float)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--kappa", "--k", dest="kappa", type=float)
    sp.add_argument("--tmax", type=float)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--cutoff", type=_parse_cutoff, metavar="N1,N2")
    sp.add_argument("--observables", type=_parse_observables, metavar="LIST")
    sp.add_argument("--init-mode", dest="init_mode", choices=INIT_MODES)
    sp.add_argument("--manifold", choices=MANIFOLDS)
    sp.add_argument("--out", metavar="DIR")
    sp.add_argument("--svg", action="store_true", default=None)
    sp.add_argument("--config", metavar="FILE")


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    file_conf = _load_config_file(args.config) if getattr(args, "config", None) else {}
    merged = {}
    for key, hard in defaults.items():
        value = getattr(args, key, None)
        if value is None:
            value = file_conf.get(key, hard)
        merged[key] = value
    return merged


def _make_config(merged: dict) -> RunConfig:
    return RunConfig(
        nbar1=merged["nbar1"],
        nbar2=merged["nbar2"],
        delta=merged["delta"],
        kappa=merged["kappa"],
        tmax=merged["tmax"],
        samples=merged["samples"],
        cutoff=merged["cutoff"],
        observables=tuple(merged["observables"]),
        init_mode=merged["init_mode"],
        manifold=merged["manifold"],
    )


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(f".{path.name}.{os.getpid()}.tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def write_csv(path: Path, ts: TimeSeries) -> None:
    names = list(ts.columns)
    lines = ["t," + ",".join(names)]
    cols = [ts.columns[n] for n in names]
    for j in range(len(ts.t)):
        row = "%.12g" % ts.t[j]
        for col in cols:
            row += ",%.12g" % col[j]
        lines.append(row)
    _atomic_write(path, "\n".join(lines) + "\n")


def write_svg(path: Path, t: np.ndarray, y: np.ndarray, ylabel: str) -> None:
    """Minimal standalone plot: axes, ticks, one polyline; gaps at NaN."""
    width, height = 800.0, 500.0
    left, right, top, bottom = 75.0, 25.0, 35.0, 55.0
    finite = np.isfinite(y)
    if finite.any():
        y_lo, y_hi = float(np.min(y[finite])), float(np.max(y[finite]))
    else:
        y_lo, y_hi = 0.0, 1.0
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad
    t_lo, t_hi = float(t[0]), float(t[-1])
    if t_hi <= t_lo:
        t_hi = t_lo + 1.0

    def px(tv: float) -> float:
        return left + (tv - t_lo) / (t_hi - t_lo) * (width - left - right)

    def py(yv: float) -> float:
        return height - bottom - (yv - y_lo) / (y_hi - y_lo) * (height - top - bottom)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" '
        f'height="{height:g}" viewBox="0 0 {width:g} {height:g}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{left:g}" y1="{height - bottom:g}" x2="{width - right:g}" '
        f'y2="{height - bottom:g}" stroke="black"/>',
        f'<line x1="{left:g}" y1="{top:g}" x2="{left:g}" '
        f'y2="{height - bottom:g}" stroke="black"/>',
    ]
    for tv in np.linspace(t_lo, t_hi, 6):
        x = px(tv)
        parts.append(
            f'<line x1="{x:.2f}" y1="{height - bottom:g}" x2="{x:.2f}" '
            f'y2="{height - bottom + 5:g}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{height - bottom + 20:g}" font-size="12" '
            f'text-anchor="middle">{tv:g}</text>'
        )
    for yv in np.linspace(y_lo, y_hi, 6):
        yy = py(yv)
        parts.append(
            f'<line x1="{left - 5:g}" y1="{yy:.2f}" x2="{left:g}" '
            f'y2="{yy:.2f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{left - 8:g}" y="{yy:.2f}" font-size="12" '
            f'text-anchor="end" dominant-baseline="middle">{yv:.4g}</text>'
        )
    parts.append(
        f'<text x="{(left + width - right) / 2:.2f}" y="{height - 15:g}" '
        f'font-size="14" text-anchor="middle">gt</text>'
    )
    parts.append(
        f'<text x="18" y="{(top + height - bottom) / 2:.2f}" font-size="14" '
        f'text-anchor="middle" transform="rotate(-90 18 '
        f'{(top + height - bottom) / 2:.2f})">{ylabel}</text>'
    )
    seg: list[str] = []
    for j in range(len(t)):
        if finite[j]:
            seg.append(f"{px(float(t[j])):.2f},{py(float(y[j])):.2f}")
        elif seg:
            if len(seg) > 1:
                parts.append(
                    '<polyline fill="none" stroke="#1f77b4" stroke-width="1.2" '
                    f'points="{" ".join(seg)}"/>'
                )
            seg = []
    if len(seg) > 1:
        parts.append(
            '<polyline fill="none" stroke="#1f77b4" stroke-width="1.2" '
            f'points="{" ".join(seg)}"/>'
        )
    parts.append("</svg>")
    _atomic_write(path, "\n".join(parts) + "\n")


def _write_outputs(csv_path: Path, ts: TimeSeries, svg: bool) -> None:
    write_csv(csv_path, ts)
    if svg:
        for name, col in ts.columns.items():
            write_svg(csv_path.with_name(f"{csv_path.stem}_{name}.svg"), ts.t, col, name)


def _run_and_write(cfg: RunConfig, csv_path: str, svg: bool) -> None:
    _write_outputs(Path(csv_path), simulate(cfg), svg)


def _ensure_out(merged: dict) -> Path:
    out = Path(merged["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_run(args: argparse.Namespace) -> int:
    merged = _resolve(args, _RUN_DEFAULTS)
    cfg = _make_config(merged)
    out = _ensure_out(merged)
    _write_outputs(out / "run.csv", simulate(cfg), merged["svg"])
    if merged["oracle_check"]:
        report = oracle_check(cfg)
        print(report.format())
        if not report.passed:
            return 4
    return 0


def _cmd_oracle_check(args: argparse.Namespace) -> int:
    merged = _resolve(args, _RUN_DEFAULTS)
    report = oracle_check(_make_config(merged))
    print(report.format())
    return 0 if report.passed else 4


def _parse_sweep_param(text: str) -> tuple[str, tuple[float, ...]]:
    name, sep, spec = text.partition("=")
    name = name.strip().replace("-", "_")
    if not sep or name not in SWEEPABLE:
        raise ValidationError(
            f"sweep parameter must be NAME=START:STOP:COUNT or NAME=V1,V2,... "
            f"with NAME in {SWEEPABLE}; got {text!r}"
        )
    try:
        if ":" in spec:
            start, stop, count = spec.split(":")
            values = np.linspace(float(start), float(stop), int(count))
            return name, tuple(float(v) for v in values)
        return name, tuple(float(v) for v in spec.split(","))
    except ValueError as exc:
        raise ValidationError(f"bad sweep values in {text!r}: {exc}") from None


def _cmd_sweep(args: argparse.Namespace) -> int:
    merged = _resolve(args, _RUN_DEFAULTS)
    out = _ensure_out(merged)
    swept = [_parse_sweep_param(s) for s in (args.param or [])]
    names = [n for n, _ in swept]
    if len(set(names)) != len(names):
        raise ValidationError("each parameter may be swept only once")
    grids = [vals for _, vals in swept]
    total = math.prod(len(g) for g in grids) if grids else 1
    if total > SWEEP_LIMIT and not merged["force"]:
        raise CostGuardError(
            f"sweep would launch {total} runs (limit {SWEEP_LIMIT}); "
            "pass --force to proceed"
        )

    combos = list(product(*grids)) if grids else [()]
    jobs: list[tuple[RunConfig, str]] = []
    manifest: list[str] = []
    for index, combo in enumerate(combos):
        values = dict(merged)
        values.update(zip(names, combo))
        cfg = _make_config(values)
        fname = f"run_{index:05d}.csv"
        jobs.append((cfg, str(out / fname)))
        tags = ";".join(
            f"{n}={'%.12g' % v}" for n, v in zip(names, combo)
        )
        manifest.append(f"{fname}\t{tags}")

    svg = merged["svg"]
    if len(jobs) == 1:
        _run_and_write(jobs[0][0], jobs[0][1], svg)
    else:
        workers = min(len(jobs), os.cpu_count() or 1)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            list(
                pool.map(
                    _run_and_write,
                    [j[0] for j in jobs],
                    [j[1] for j in jobs],
                    [svg] * len(jobs),
                )
            )
    _atomic_write(out / "manifest.tsv", "\n".join(manifest) + "\n")
    return 0


def _cmd_fig(args: argparse.Namespace) -> int:
    preset = _FIG_PRESETS[args.command]
    fixed_name, fixed_value = preset["fixed"]
    family_name, family_values = preset["family"]
    defaults = dict(_RUN_DEFAULTS)
    defaults.update(
        {
            "nbar1": float(preset["nbar"][0]),
            "nbar2": float(preset["nbar"][1]),
            "tmax": preset["tmax"],
            "samples": preset["samples"],
            "observables": (preset["obs"],),
            fixed_name: fixed_value,
            family_name: None,
        }
    )
    merged = _resolve(args, defaults)
    out = _ensure_out(merged)
    chosen = merged[family_name]
    values = family_values if chosen is None else (chosen,)
    tag = "k" if family_name == "kappa" else "delta"
    for value in values:
        run_values = dict(merged)
        run_values[family_name] = value
        cfg = _make_config(run_values)
        csv_path = out / f"{args.command}_{tag}{value:g}.csv"
        _write_outputs(csv_path, simulate(cfg), merged["svg"])
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ntpjc",
        description="Two-mode two-photon atom-cavity dynamics with damping",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="single simulation -> CSV")
    _add_model_options(run_p)
    run_p.add_argument(
        "--oracle-check",
        dest="oracle_check",
        action="store_true",
        default=None,
        help="also compare against the direct integrator",
    )
    run_p.set_defaults(handler=_cmd_run)

    sweep_p = sub.add_parser("sweep", help="Cartesian parameter scan -> CSVs + manifest")
    _add_model_options(sweep_p)
    sweep_p.add_argument(
        "--param",
        action="append",
        metavar="NAME=SPEC",
        help="NAME=START:STOP:COUNT or NAME=V1,V2,...; repeatable",
    )
    sweep_p.add_argument("--force", action="store_true", default=None)
    sweep_p.set_defaults(handler=_cmd_sweep)

    check_p = sub.add_parser("oracle-check", help="solver vs direct integration report")
    _add_model_options(check_p)
    check_p.set_defaults(handler=_cmd_oracle_check)

    for name, preset in _FIG_PRESETS.items():
        fam, vals = preset["family"]
        fig_p = sub.add_parser(
            name,
            help=(
                f"{preset['obs']} for nbar={preset['nbar']}, "
                f"{preset['fixed'][0]}={preset['fixed'][1]:g}, "
                f"{fam} in {tuple('%g' % v for v in vals)}"
            ),
        )
        _add_model_options(fig_p)
        fig_p.set_defaults(handler=_cmd_fig)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CostGuardError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
