"""Command line entry point: ``schrabc {run,complexity,convergence,compare}``.

Exit codes: 0 success, 2 configuration error, 3 numerical invariant
violation, 4 self-test mismatch.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import platform
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__, pipeline
from .analysis import rel_error
from .config import RunConfig, load_config
from .errors import ConfigError, NumericalError, SchrAbcError

log = logging.getLogger("schrabc")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_SELF_TEST = 0, 2, 3, 4


class SelfTestMismatch(Exception):
    pass


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _versions() -> dict:
    return {"schrabc": __version__, "python": platform.python_version(),
            "numpy": np.__version__, "scipy": scipy.__version__}


def write_snapshot(path: Path, grid, psi) -> None:
    X, Y = grid.mesh()
    data = np.column_stack([X.ravel(), Y.ravel(), psi.real, psi.imag])
    np.savetxt(path, data, delimiter=",", fmt="%.17g", header="x,y,re,im", comments="")


def read_snapshot(path) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _out_dir(cfg: RunConfig, override) -> Path:
    out = Path(override or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_run(cfg: RunConfig, out: Path, self_test: bool) -> int:
    t0 = time.perf_counter()
    prob, snaps, comparisons = pipeline.run(cfg)
    files = []
    for s in snaps:
        name = f"{cfg.abc}_{s.method}_t{s.time:.4f}.csv"
        path = out / name
        write_snapshot(path, prob.grid, s.psi)
        files.append({"file": name, "method": s.method, "time": s.time,
                      "norm": float(np.linalg.norm(s.psi)), "seconds": s.seconds,
                      "sha256": _sha256(path)})
    manifest = {
        "command": "run",
        "config": cfg.model_dump(mode="json"),
        "versions": _versions(),
        "grid": {"bounds": prob.grid.bounds(), "N": prob.grid.N, "dx": prob.grid.dx,
                 "generator_dim": prob.generator.n},
        "initial_norm": float(np.linalg.norm(prob.physical(prob.psi0))),
        "snapshots": files,
        "comparisons": comparisons,
        "total_seconds": time.perf_counter() - t0,
    }
    _write_json(out / "manifest.json", manifest)
    log.info("wrote %d snapshots to %s", len(files), out)
    if self_test:
        bad = [c for c in comparisons if c["rel_l2"] > cfg.self_test_tolerance]
        if cfg.method != "both":
            raise SelfTestMismatch("self-test needs method = both")
        if bad:
            raise SelfTestMismatch(f"rel_l2 above {cfg.self_test_tolerance:g}: {bad}")
    return EXIT_OK


def cmd_complexity(cfg: RunConfig, out: Path, self_test: bool) -> int:
    report, diag = pipeline.complexity(cfg)
    _write_json(out / "complexity.json", report.to_dict())
    _write_json(out / "complexity_diagnostics.json",
                {"config": cfg.model_dump(mode="json"), "versions": _versions(), **diag})
    if self_test and report.s_eff_2pct > report.s_eff_1pct:
        raise SelfTestMismatch("effective sparsity at 2% exceeds the 1% value")
    print(json.dumps(report.to_dict(), indent=2))
    return EXIT_OK


def cmd_convergence(cfg: RunConfig, out: Path, self_test: bool) -> int:
    rows = pipeline.convergence(cfg)
    path = out / "convergence.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["M", "dp", "rel_l2"])
        for r in rows:
            w.writerow([r["M"], f"{r['dp']:.17g}", f"{r['rel_l2']:.17g}"])
    errs = [r["rel_l2"] for r in rows]
    monotone = all(b < a for a, b in zip(errs, errs[1:]))
    ratios = [a / b if b > 0 else None for a, b in zip(errs, errs[1:])]
    _write_json(out / "convergence.json", {
        "config": cfg.model_dump(mode="json"), "versions": _versions(),
        "rows": rows, "ratios": ratios, "monotone_decrease": monotone,
        "csv": path.name, "sha256": _sha256(path),
    })
    for r in rows:
        if r["under_resolved"]:
            log.warning("M = %d is below 8: the p-grid is under-resolved", r["M"])
    if self_test and not monotone:
        raise SelfTestMismatch(f"errors do not decrease with M: {errs}")
    return EXIT_OK


def cmd_compare(a, b, out: Path | None) -> int:
    da, db = read_snapshot(a), read_snapshot(b)
    if da.shape != db.shape or not np.allclose(da[:, :2], db[:, :2], rtol=0, atol=1e-12):
        raise ValueError("snapshots are on different grids")
    rel, mx = rel_error(da[:, 2] + 1j * da[:, 3], db[:, 2] + 1j * db[:, 3])
    result = {"a": str(a), "b": str(b), "rel_l2": rel, "max_abs": mx}
    if out is not None:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        _write_json(Path(out), result)
    print(json.dumps(result, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="schrabc", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in [("run", "evolve and write snapshots plus a manifest"),
                           ("complexity", "measure norms and sparsity of the lifted Hamiltonian"),
                           ("convergence", "error of the lifted solution versus M")]:
        sp_ = sub.add_parser(name, help=helptext)
        sp_.add_argument("--config", help="JSON config file (defaults are used when omitted)")
        sp_.add_argument("--out", help="output directory (overrides out_dir)")
        sp_.add_argument("--self-test", action="store_true",
                         help="check results against the configured oracle tolerance")
    cp = sub.add_parser("compare", help="relative error between two snapshot CSVs")
    cp.add_argument("a")
    cp.add_argument("b", help="reference snapshot")
    cp.add_argument("--out", help="write the result JSON here")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "compare":
            return cmd_compare(args.a, args.b, args.out)
        cfg = load_config(args.config) if args.config else RunConfig()
        out = _out_dir(cfg, args.out)
        handler = {"run": cmd_run, "complexity": cmd_complexity, "convergence": cmd_convergence}
        return handler[args.command](cfg, out, args.self_test)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SelfTestMismatch as exc:
        print(f"self-test mismatch: {exc}", file=sys.stderr)
        return EXIT_SELF_TEST
    except (SchrAbcError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
