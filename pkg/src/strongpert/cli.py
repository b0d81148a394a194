"""Command-line front end.

    strongpert run CONFIG [CONFIG ...] [--out DIR] [--jobs N]
    strongpert validate CONFIG
    strongpert version

Exit codes: 0 success, 2 configuration error, 3 numerical error.
"""

import argparse
import csv
import io
import json
import logging
import os
import platform
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, _kernels, secular
from .config import config_as_dict, load_config
from .core import DEGENERACY_RTOL, HERMITIAN_TOL
from .errors import ConfigError, NumericalError, StrongPertError
from .pipeline import analyze

log = logging.getLogger("strongpert")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
SERIES_COLUMNS = (
    "t",
    "mode",
    "norm_order0",
    "norm_order1",
    "norm_order2",
    "fidelity_partial_sum",
    "validity_ratio",
)


def _num(x):
    return repr(float(x))


def series_csv(analysis):
    """series.csv contents as a string (rows grouped by mode, then time)."""
    cols = [c for c in SERIES_COLUMNS if c != "fidelity_partial_sum" or analysis.fidelity is not None]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    ratio = analysis.validity_ratio
    for mode, s in analysis.series.items():
        norms = [s.norms(j) for j in range(s.max_order + 1)]
        fid = analysis.fidelity[mode] if analysis.fidelity is not None else None
        for i, t in enumerate(s.times):
            row = [_num(t), mode]
            row += [_num(norms[j][i]) if j < len(norms) else "" for j in range(3)]
            if fid is not None:
                row.append(_num(fid[i]))
            row.append(_num(ratio[s.indices[i]]))
            w.writerow(row)
    return buf.getvalue()


def _versions():
    try:
        import numba

        nb = numba.__version__
    except ImportError:
        nb = None
    return {
        "strongpert": __version__,
        "numpy": np.__version__,
        "numba": nb,
        "python": platform.python_version(),
        "kernel_backend": _kernels.BACKEND,
    }


def run(cfg, out_dir):
    """Execute one configuration and write its outputs into ``out_dir``."""
    start = time.perf_counter()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    scenario = cfg.scenario()
    analysis = analyze(
        scenario,
        max_order=cfg.orders,
        modes=cfg.modes,
        oracle=cfg.oracle,
        substeps=cfg.substeps,
        window=cfg.window,
    )
    if "csv" in cfg.formats:
        (out / "series.csv").write_text(series_csv(analysis), encoding="utf-8")
    if "json" in cfg.formats:
        with open(out / "secularity.json", "w", encoding="utf-8") as fh:
            json.dump(analysis.report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    meta = {
        "config": config_as_dict(cfg),
        "versions": _versions(),
        "tolerances": {
            "significance": secular.SIGNIFICANCE,
            "hac_bandwidth_fraction": secular.BANDWIDTH_FRACTION,
            "min_window_samples": secular.MIN_SAMPLES,
            "hermitian": HERMITIAN_TOL,
            "degeneracy_rtol": DEGENERACY_RTOL,
        },
        "wall_time_s": time.perf_counter() - start,
    }
    with open(out / "run_meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return analysis


def _run_one(path, out_dir):
    """Worker: returns (path, exit code, message)."""
    try:
        cfg = load_config(path)
    except OSError as exc:
        return path, EXIT_CONFIG, f"cannot read {path}: {exc}"
    except ConfigError as exc:
        return path, EXIT_CONFIG, f"{path}: {exc}"
    target = out_dir if out_dir is not None else cfg.out_dir
    try:
        run(cfg, target)
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        where = f" at t={exc.time:.6g}" if getattr(exc, "time", None) is not None else ""
        return path, EXIT_NUMERICAL, f"{path}: numerical failure in {type(exc).__name__}{where}: {exc}"
    except StrongPertError as exc:
        return path, EXIT_CONFIG, f"{path}: {exc}"
    return path, EXIT_OK, f"{path}: wrote {target}"


def _cmd_run(args):
    paths = args.configs
    if len(paths) == 1:
        targets = [args.out]
    else:
        base = Path(args.out) if args.out else None
        targets = [str(base / Path(p).stem) if base else None for p in paths]
    if args.jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_one, paths, targets))
    else:
        results = [_run_one(p, t) for p, t in zip(paths, targets)]
    code = EXIT_OK
    for _, rc, msg in results:
        print(msg, file=sys.stderr if rc else sys.stdout)
        code = max(code, rc)
    return code


def _cmd_validate(args):
    try:
        cfg = load_config(args.config)
    except OSError as exc:
        print(f"cannot read {args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"{args.config}: ok ({cfg.model}, {cfg.points} points, modes {', '.join(cfg.modes)})")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="strongpert", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one or more scenario configurations")
    r.add_argument("configs", nargs="+", metavar="CONFIG")
    r.add_argument("--out", default=None, help="output directory (overrides output.dir)")
    r.add_argument("--jobs", type=int, default=1, help="run independent configs in parallel")
    v = sub.add_parser("validate", help="check a configuration without running it")
    v.add_argument("config")
    sub.add_parser("version", help="print version information")
    return ap


def main(argv=None):
    logging.basicConfig(level=os.environ.get("STRONGPERT_LOGLEVEL", "WARNING"))
    args = build_parser().parse_args(argv)
    if args.command == "version":
        v = _versions()
        print(f"strongpert {v['strongpert']} (kernels: {v['kernel_backend']}, numpy {v['numpy']})")
        return EXIT_OK
    if args.command == "validate":
        return _cmd_validate(args)
    if args.jobs < 1:
        print("--jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    return _cmd_run(args)


if __name__ == "__main__":
    sys.exit(main())
