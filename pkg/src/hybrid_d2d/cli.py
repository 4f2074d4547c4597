"""Command-line front end.

Runs the analytic evaluator and/or the Monte Carlo simulator for a
(protocol x method) matrix, optionally along a sweep axis, and writes
``results.csv`` and ``results.json``. ``--figure`` instead writes the sweep
dataset behind one of the standard comparison plots.

Exit codes: 0 success, 2 configuration error, 3 invalid parameters,
4 evaluator failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import streams as st
from .analytic.coverage import PTP_VARIANTS, STP_VARIANTS, coverage_model
from .analytic.spectral import SpectralOperator
from .errors import AnalyticError
from .montecarlo import estimate_protocols, resolve_threads
from .params import SWEEPABLE_FIELDS, ParameterError, SystemParams, load_config, params_from_dict
from .pointproc import RadialPattern, sample_alpha_gpp_radii
from .protocol import Protocol
from .records import RunRecord, write_csv, write_json

__all__ = ["main", "build_parser", "run", "analytic_record", "reproduce_figure", "FIGURES", "ConfigError"]

EXIT_CONFIG, EXIT_PARAMS, EXIT_EVALUATOR = 2, 3, 4

FIGURE_ZETA = (0.005, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08)
FIGURES = ("fig2", "fig3", "fig4a", "fig4b")
FIGURE_COLUMNS = ("zeta_a", "protocol", "method", "variant", "coverage", "std_err", "xi", "alpha", "l_a", "m", "shared_fading")


class ConfigError(Exception):
    pass


def _flag(name: str) -> str:
    return "--" + name.lower().replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hybrid-d2d", description="Coverage of hybrid backscatter/HTT D2D links.")
    ap.add_argument("--config", type=Path, help="JSON config (flat parameters, or 'params' and 'run' sections)")
    ap.add_argument("--protocol", nargs="+", choices=[p.value for p in Protocol])
    ap.add_argument("--method", choices=("analytic", "mc", "both"))
    ap.add_argument("--trials", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--threads", type=int, help="worker threads (default: D2D_THREADS or 1)")
    ap.add_argument("--stp-variant", choices=STP_VARIANTS)
    ap.add_argument("--ptp-variant", choices=PTP_VARIANTS)
    ap.add_argument("--stp-shared-fading", action="store_true", default=None)
    ap.add_argument("--sweep", metavar="FIELD=v1,v2,...")
    ap.add_argument("--figure", choices=FIGURES)
    ap.add_argument("--out", type=Path)
    ap.add_argument("--eigenvalues", type=float, metavar="S",
                    help="also write eigenvalues.csv for the incident-power kernel at real s")
    ap.add_argument("--pattern", action="store_true", help="also write pattern.csv with one sampled energy field")
    group = ap.add_argument_group("parameter overrides")
    for name in SWEEPABLE_FIELDS:
        group.add_argument(_flag(name), dest=f"set_{name}", type=float, metavar="X")
    return ap


_RUN_DEFAULTS = {
    "protocol": ["ptp"],
    "method": "both",
    "trials": 100_000,
    "seed": 0,
    "threads": None,
    "stp_variant": "composed",
    "ptp_variant": "exact",
    "sweep": None,
    "figure": None,
    "out": ".",
    "eigenvalues": None,
    "pattern": False,
}


def _settings(args) -> tuple[SystemParams, dict]:
    if args.config is not None:
        if not args.config.is_file():
            raise ConfigError(f"config file {args.config} not found")
        try:
            p, run_section = load_config(args.config)
        except ParameterError:
            raise
        except (ValueError, KeyError, TypeError, OSError) as exc:
            raise ConfigError(f"cannot parse {args.config}: {exc}") from exc
    else:
        p, run_section = SystemParams(), {}
    unknown = set(run_section) - set(_RUN_DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown run keys {sorted(unknown)}")
    cfg = {**_RUN_DEFAULTS, **run_section}
    for key in _RUN_DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    if isinstance(cfg["protocol"], str):
        cfg["protocol"] = [cfg["protocol"]]
    overrides = {n: getattr(args, f"set_{n}") for n in SWEEPABLE_FIELDS if getattr(args, f"set_{n}") is not None}
    if args.stp_shared_fading:
        overrides["stp_shared_fading"] = True
    if overrides:
        p = params_from_dict(overrides, base=p)
    return p, cfg


def _parse_sweep(spec: str) -> tuple[str, list[float]]:
    try:
        name, raw = spec.split("=", 1)
        values = [float(v) for v in raw.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --sweep {spec!r}; expected FIELD=v1,v2,...") from exc
    if name not in SWEEPABLE_FIELDS:
        raise ConfigError(f"unknown sweep field {name!r}")
    return name, values


def analytic_record(p: SystemParams, protocol, stp_variant: str = "composed", ptp_variant: str = "exact") -> RunRecord:
    protocol = Protocol.parse(protocol)
    t0 = time.perf_counter()
    model = coverage_model(p)
    variant = shared = None
    if protocol is Protocol.PTP:
        cov, variant = model.ptp(ptp_variant), ptp_variant
        fractions = {"backscatter": model.B_PTP, "htt": 1.0 - model.B_PTP}
    elif protocol is Protocol.STP:
        cov, variant = model.stp(stp_variant), stp_variant
        if stp_variant == "exact":
            shared = p.stp_shared_fading
        fractions = {}
    elif protocol is Protocol.PURE_HTT:
        cov, fractions = model.C_H, {}
    else:
        cov, fractions = model.C_B, {}
    ms = 1e3 * (time.perf_counter() - t0)
    return RunRecord(
        params=p.to_dict(), protocol=protocol.value, method="analytic", coverage=float(cov),
        variant=variant, shared_fading=shared, mode_fractions=fractions, wall_time_ms=ms,
    )


def run(p: SystemParams, cfg: dict) -> list[RunRecord]:
    """Evaluate the configured matrix; one record per (point, protocol, method)."""
    protocols = [Protocol.parse(x) for x in cfg["protocol"]]
    method = cfg["method"]
    points = [p]
    if cfg["sweep"]:
        axis, values = _parse_sweep(cfg["sweep"])
        points = [p.replace(**{axis: v}) for v in values]
    threads = resolve_threads(cfg["threads"])
    records = []
    for q in points:
        if method in ("analytic", "both"):
            records += [analytic_record(q, proto, cfg["stp_variant"], cfg["ptp_variant"]) for proto in protocols]
        if method in ("mc", "both"):
            t0 = time.perf_counter()
            est = estimate_protocols(q, protocols, int(cfg["trials"]), int(cfg["seed"]), threads)
            ms = 1e3 * (time.perf_counter() - t0) / len(est)
            records += [RunRecord.from_estimate(q, k, e, int(cfg["seed"]), ms) for k, e in est.items()]
    return records


def _figure_points(figure: str, base: SystemParams, zeta_grid):
    if figure in ("fig2", "fig3"):
        proto = Protocol.PTP if figure == "fig2" else Protocol.STP
        curves = [{}, {"alpha": 0.5}, {"l_A": 0.5}, {"m": 3.0}]
        for change in curves:
            for z in zeta_grid:
                yield base.replace(xi=0.2, zeta_A=z, **change), [proto]
    else:
        xi = 0.2 if figure == "fig4a" else 0.8
        for z in zeta_grid:
            yield base.replace(xi=xi, zeta_A=z), list(Protocol)


def reproduce_figure(
    figure: str,
    out_dir,
    base: SystemParams | None = None,
    zeta_grid=FIGURE_ZETA,
    method: str = "analytic",
    trials: int = 100_000,
    seed: int = 0,
    threads: int | None = None,
) -> Path:
    """Write ``<figure>.csv`` with the coverage curves of one comparison plot.

    Analytic rows include both PTP variants and the printed and composed STP
    forms; Monte Carlo rows score both STP fading conventions.
    """
    if figure not in FIGURES:
        raise ValueError(f"unknown figure {figure!r}")
    base = base or SystemParams()
    records = []
    for p, protocols in _figure_points(figure, base, zeta_grid):
        if method in ("analytic", "both"):
            for proto in protocols:
                if proto is Protocol.PTP:
                    records += [analytic_record(p, proto, ptp_variant=v) for v in PTP_VARIANTS]
                elif proto is Protocol.STP:
                    records += [analytic_record(p, proto, stp_variant=v) for v in ("composed", "printed")]
                else:
                    records.append(analytic_record(p, proto))
        if method in ("mc", "both"):
            est = estimate_protocols(p, protocols, trials, seed, threads, fading_conventions=(False, True))
            records += [RunRecord.from_estimate(p, k, e, seed, 0.0) for k, e in est.items()]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{figure}.csv"
    write_csv(records, path, columns=FIGURE_COLUMNS)
    return path


def _eigenvalue_csv(p: SystemParams, s: float) -> str:
    model = coverage_model(p)
    if model.phi.empty:
        lam = np.zeros(0)
    else:
        field = model.phi
        op = SpectralOperator.from_complement(
            lambda r: (1.0 + s * field.power / (field.m * r ** field.mu)) ** (-field.m), field.density, field.R
        )
        lam = field.load * op.eigenvalues.real
    lines = ["k,lambda_k"] + [f"{k},{float(v)!r}" for k, v in enumerate(lam)]
    return "\n".join(lines) + "\n"


def _sample_pattern(p: SystemParams, seed: int) -> RadialPattern:
    """The energy field of trial 0, as the simulator would draw it (before thinning)."""
    ts = st.TrialStreams(seed, 0)
    c = p.active_density_A if p.load_model == "kernel" else p.zeta_A
    if c == 0:
        return RadialPattern(np.zeros(0), p.R, 0.0)
    return sample_alpha_gpp_radii(c, p.alpha, p.R, ts.stream(st.PHI_BASE), thin_rng=ts.stream(st.PHI_ALPHA))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        p, cfg = _settings(args)
        out = Path(cfg["out"])
        if cfg["figure"]:
            path = reproduce_figure(
                cfg["figure"], out, base=p, method=cfg["method"], trials=int(cfg["trials"]),
                seed=int(cfg["seed"]), threads=cfg["threads"],
            )
            print(path)
            return 0
        records = run(p, cfg)
        extra = {}
        if cfg["eigenvalues"] is not None:
            extra["eigenvalues.csv"] = _eigenvalue_csv(p, float(cfg["eigenvalues"]))
        if cfg["pattern"]:
            extra["pattern.csv"] = _sample_pattern(p, int(cfg["seed"]))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParameterError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except (AnalyticError, ValueError, ArithmeticError) as exc:
        print(f"evaluation failed: {exc}", file=sys.stderr)
        return EXIT_EVALUATOR

    # outputs are written only after every evaluation succeeded
    out.mkdir(parents=True, exist_ok=True)
    write_csv(records, out / "results.csv")
    write_json(records, out / "results.json")
    for name, item in extra.items():
        if isinstance(item, RadialPattern):
            item.to_csv(out / name)
        else:
            (out / name).write_text(item)
    for r in records:
        err = "" if r.std_err is None else f" +- {r.std_err:.4f}"
        tag = f" [{r.variant}]" if r.variant else ""
        print(f"{r.protocol:17s} {r.method:10s}{tag} coverage={r.coverage:.4f}{err}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
