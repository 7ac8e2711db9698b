"""Command-line entry point: reproducible experiments with JSON/CSV output.

Commands: variance, sweep, cheb, asymp, clt, sample.  Flags can also come
from a flat `key = value` config file (--config); explicit flags win, unknown
keys are rejected.  JSON output embeds the resolved config and the package
version, and identical configs produce byte-identical output.  Exit codes:
2 for configuration errors, 3 for numerical non-convergence.  With --plot, a
figure is rendered next to the data output.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, asymptotics, chebyshev, limitvar
from .functions import TestFunction, parse_test_function
from .kernel import KernelContext, lss_mean, lss_variance
from .sampler import clt_experiment, sample_spectrum

_REGIME_GRIDS = {"bulk": (0.5, 3.5, 50), "soft": (3.0, 5.0, 40), "hard": (0.01, 1.5, 40)}


@dataclass
class ExperimentConfig:
    command: str
    f: str = "identity"
    n: int = 100
    alpha: int = 0
    eps: float = 0.5
    order: int = 64
    samples: int = 1000
    seed: int = 0
    quad_points: int | None = None
    output_format: str = "json"
    output_path: str | None = None
    limit: bool = False
    check_equivalence: bool = False
    regime: str = "soft"
    grid: str | None = None
    n_list: tuple[int, ...] = ()
    plot: str | None = None


def _parse_bool(s: str) -> bool:
    return s.lower() in ("1", "true", "yes")


def _parse_n_list(s: str) -> tuple[int, ...]:
    return tuple(int(v) for v in s.split())


_FLAG_FIELDS = {
    "f": ("f", str), "n": ("n", int), "alpha": ("alpha", int), "eps": ("eps", float),
    "N": ("order", int), "samples": ("samples", int), "seed": ("seed", int),
    "quad-points": ("quad_points", int), "format": ("output_format", str),
    "output": ("output_path", str), "limit": ("limit", _parse_bool),
    "check-equivalence": ("check_equivalence", _parse_bool), "regime": ("regime", str),
    "grid": ("grid", str), "n-list": ("n_list", _parse_n_list), "plot": ("plot", str),
}


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", default=None, help="flat key = value config file")
    shared.add_argument("--f", default=None, help="test function DSL text")
    shared.add_argument("--n", type=int, default=None)
    shared.add_argument("--alpha", type=int, default=None)
    shared.add_argument("--eps", type=float, default=None)
    shared.add_argument("--N", type=int, default=None, dest="N")
    shared.add_argument("--samples", type=int, default=None)
    shared.add_argument("--seed", type=int, default=None)
    shared.add_argument("--quad-points", type=int, default=None)
    shared.add_argument("--format", choices=("json", "csv"), default=None)
    shared.add_argument("--output", default=None, help="output path (default stdout)")
    shared.add_argument("--plot", nargs="?", const="", default=None,
                        help="also render a figure (optional path)")
    p = argparse.ArgumentParser(prog="luelab", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    pv = sub.add_parser("variance", parents=[shared],
                        help="finite-n variance and mean of a spectral sum")
    pv.add_argument("--limit", action="store_const", const=True, default=None,
                    help="also evaluate the limiting variance")
    ps = sub.add_parser("sweep", parents=[shared], help="variance convergence table")
    ps.add_argument("--n-list", type=int, nargs="+", default=None)
    pc = sub.add_parser("cheb", parents=[shared], help="shifted-Chebyshev analysis")
    pc.add_argument("--check-equivalence", action="store_const", const=True,
                    default=None, help="compare 4*V_gue with the coefficient seminorm")
    pa = sub.add_parser("asymp", parents=[shared], help="asymptotic-regime error report")
    pa.add_argument("--regime", choices=tuple(_REGIME_GRIDS), default=None)
    pa.add_argument("--grid", default=None, help="lo:hi:count")
    sub.add_parser("clt", parents=[shared], help="Monte Carlo CLT experiment")
    sub.add_parser("sample", parents=[shared], help="dump sampled spectra")
    return p


def _read_config_file(path: str) -> dict:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _FLAG_FIELDS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        field, conv = _FLAG_FIELDS[key]
        out[field] = conv(value)
    return out


def _resolve(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig(command=args.command)
    if getattr(args, "config", None):
        for field, value in _read_config_file(args.config).items():
            setattr(cfg, field, value)
    for flag, (field, _) in _FLAG_FIELDS.items():
        attr = flag.replace("-", "_")
        val = getattr(args, attr, None)
        if val is not None:
            setattr(cfg, field, tuple(val) if field == "n_list" else val)
    if cfg.plot == "":
        base = Path(cfg.output_path).with_suffix(".png") if cfg.output_path \
            else Path(f"luelab-{cfg.command}.png")
        cfg.plot = str(base)
    return cfg


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, float) and math.isinf(obj):
        return "infinity"
    return obj


def _emit(cfg: ExperimentConfig, payload: dict, rows: list | None,
          header: list[str] | None) -> None:
    if cfg.output_format == "json":
        doc = {"version": __version__, "config": _jsonable(dataclasses.asdict(cfg)),
               "result": _jsonable(payload)}
        text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf)  # RFC-4180 quoting and CRLF line endings
        if header:
            writer.writerow(header)
        for row in rows if rows is not None else [[k, _jsonable(v)]
                                                  for k, v in sorted(payload.items())]:
            writer.writerow(row)
        text = buf.getvalue()
    if cfg.output_path:
        Path(cfg.output_path).write_text(text)
    else:
        sys.stdout.write(text)


def _parse_grid(cfg: ExperimentConfig) -> np.ndarray:
    lo, hi, count = _REGIME_GRIDS[cfg.regime]
    if cfg.grid:
        try:
            parts = cfg.grid.split(":")
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        except (IndexError, ValueError) as exc:
            raise ValueError(f"bad --grid {cfg.grid!r}, expected lo:hi:count") from exc
    return np.linspace(lo, hi, count)


def _cmd_variance(cfg: ExperimentConfig) -> None:
    f = parse_test_function(cfg.f)
    ctx = KernelContext.create(cfg.n, cfg.alpha)
    limiting = limitvar.v_lue(f) if cfg.limit else None
    rep = lss_variance(ctx, f, points=cfg.quad_points, limiting=limiting)
    payload = dataclasses.asdict(rep)
    _emit(cfg, payload, None, None)


def _cmd_sweep(cfg: ExperimentConfig) -> None:
    if not cfg.n_list:
        raise ValueError("sweep needs a nonempty ascending --n-list")
    if list(cfg.n_list) != sorted(set(cfg.n_list)):
        raise ValueError("--n-list must be strictly ascending")
    f = parse_test_function(cfg.f)
    limit = limitvar.v_lue(f)
    rows = []
    for n in cfg.n_list:
        rep = lss_variance(KernelContext.create(n, cfg.alpha), f, points=cfg.quad_points)
        rows.append({"n": n, "variance": rep.finite_n_variance,
                     "abs_error": abs(rep.finite_n_variance - limit)})
    payload = {"limiting_variance": limit, "rows": rows}
    csv_rows = [[r["n"], repr(r["variance"]), repr(r["abs_error"])] for r in rows]
    _emit(cfg, payload, csv_rows, ["n", "variance", "abs_error"])
    if cfg.plot:
        from . import figures
        figures.render_sweep(rows, limit, cfg.plot)


def _cmd_cheb(cfg: ExperimentConfig) -> None:
    f = parse_test_function(cfg.f)
    e = chebyshev.expand_shifted(f, cfg.order)
    seminorm = chebyshev.seminorm_h_half(e)
    payload = {"order": cfg.order, "c0": e.coeffs[0], "coefficients": list(e.coeffs[1:]),
               "seminorm": seminorm}
    if cfg.check_equivalence:
        # the equivalence is between 4*V_gue[f] and the FULL seminorm, so the
        # comparison side expands far past the reported order
        full = chebyshev.seminorm_h_half(
            chebyshev.expand_shifted(f, max(4 * cfg.order, 1024)))
        shifted = f.shift(2.0)
        four_v = 4.0 * limitvar.v_gue(shifted, points=cfg.quad_points or 200)
        payload["four_v_gue"] = four_v
        payload["seminorm_full"] = full
        payload["relative_gap"] = abs(four_v - full) / (1.0 + full)
    _emit(cfg, payload, None, None)


def _cmd_asymp(cfg: ExperimentConfig) -> None:
    grid = _parse_grid(cfg)
    rep = asymptotics.asymptotic_report(cfg.regime, cfg.n, cfg.alpha, grid)
    payload = {"regime": rep.regime, "n": rep.n, "alpha": rep.alpha,
               "grid": rep.grid, "direct": rep.direct, "approx": rep.approx,
               "max_abs_err": rep.max_abs_err, "max_rel_err": rep.max_rel_err}
    csv_rows = [[repr(float(x)), repr(float(d)), repr(float(a))]
                for x, d, a in zip(rep.grid, rep.direct, rep.approx)]
    _emit(cfg, payload, csv_rows, ["x", "direct", "approx"])
    if cfg.plot:
        from . import figures
        figures.render_asymp(rep, cfg.plot)


def _cmd_clt(cfg: ExperimentConfig) -> None:
    f = parse_test_function(cfg.f)
    rep = clt_experiment(f, cfg.n, cfg.alpha, cfg.samples, cfg.seed,
                         keep_statistics=bool(cfg.plot))
    payload = {k: v for k, v in dataclasses.asdict(rep).items() if k != "statistics"}
    _emit(cfg, payload, None, None)
    if cfg.plot:
        from . import figures
        figures.render_clt(rep, cfg.plot)


def _cmd_sample(cfg: ExperimentConfig) -> None:
    samples = [sample_spectrum(cfg.n, cfg.alpha, cfg.seed, i)
               for i in range(cfg.samples)]
    payload = {"n": cfg.n, "alpha": cfg.alpha, "seed": cfg.seed,
               "spectra": [s.eigenvalues for s in samples]}
    csv_rows = [[repr(float(v)) for v in s.eigenvalues] for s in samples]
    _emit(cfg, payload, csv_rows, None)
    if cfg.plot:
        from . import figures
        figures.render_sample(samples, cfg.plot)


_DISPATCH = {"variance": _cmd_variance, "sweep": _cmd_sweep, "cheb": _cmd_cheb,
             "asymp": _cmd_asymp, "clt": _cmd_clt, "sample": _cmd_sample}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _resolve(args)
        _DISPATCH[cfg.command](cfg)
    except (ValueError, OSError) as exc:
        print(f"luelab: config error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"luelab: numerical non-convergence: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
