"""Batch front end: spectra, wavefunctions, audits and parameter sweeps.

Exit codes: 0 success, 1 selftest or unexpected failure, 2 configuration
error, 3 I/O error, 4 requested level missing.  All numeric text is emitted
at full round-trip precision and every file is staged to a temporary name
and atomically renamed.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import traceback
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .audit import params_dict, run_audit
from .closedform import (
    energy_eq45_result,
    energy_implicit_result,
    energy_mechanical_result,
)
from .config import RunConfig, load_config
from .errors import ConfigError, MissingLevel, TailNotConverged
from .levels import Engine, EnergyLevel, flags_str
from .oracle import oracle_eigenvector, solve_relativistic
from .wavefunction import build_radial

SPECTRUM_HEADER = "n,engine,E,Ebar,residual,flags"


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def compute_levels(config: RunConfig) -> list[EnergyLevel]:
    """All found levels for the selected engines, n = 0..n_max."""
    grid = config.grid()
    levels: list[EnergyLevel] = []
    for n in range(config.n_max + 1):
        for engine in config.engines:
            if engine is Engine.EQ45_VERBATIM:
                levels.extend(energy_eq45_result(config.params, n).levels)
            elif engine is Engine.IMPLICIT_LAMBDA:
                levels.extend(energy_implicit_result(config.params, n).levels)
            elif engine is Engine.MECHANICAL_NU:
                levels.extend(energy_mechanical_result(config.params, n).levels)
            elif engine is Engine.ORACLE:
                lvl = solve_relativistic(config.params, n, grid)
                if lvl.found:
                    levels.append(lvl)
    return levels


def spectrum_rows(config: RunConfig) -> list[str]:
    order = {e: i for i, e in enumerate(
        (Engine.EQ45_VERBATIM, Engine.IMPLICIT_LAMBDA, Engine.MECHANICAL_NU,
         Engine.ORACLE))}
    levels = sorted(compute_levels(config),
                    key=lambda l: (l.n, order[l.engine], l.E))
    rows = []
    for lvl in levels:
        rows.append(",".join([str(lvl.n), lvl.engine.value, _fmt(lvl.E),
                              _fmt(lvl.Ebar), _fmt(lvl.residual),
                              flags_str(lvl.flags)]))
    return rows


def cmd_spectrum(config: RunConfig, out_dir: Path) -> None:
    rows = spectrum_rows(config)
    if "csv" in config.formats:
        atomic_write(out_dir / "spectrum.csv",
                     "\n".join([SPECTRUM_HEADER] + rows) + "\n")
    if "json" in config.formats:
        payload = {
            "params": params_dict(config.params),
            "levels": [dict(zip(SPECTRUM_HEADER.split(","), r.split(",")))
                       for r in rows],
        }
        atomic_write(out_dir / "spectrum.json",
                     json.dumps(payload, sort_keys=True, indent=1) + "\n")


def _closed_form_level(config: RunConfig, n: int) -> EnergyLevel | None:
    for engine in (Engine.MECHANICAL_NU, Engine.IMPLICIT_LAMBDA,
                   Engine.EQ45_VERBATIM):
        if engine not in config.engines:
            continue
        if engine is Engine.MECHANICAL_NU:
            found = energy_mechanical_result(config.params, n).levels
        elif engine is Engine.IMPLICIT_LAMBDA:
            found = energy_implicit_result(config.params, n).levels
        else:
            found = energy_eq45_result(config.params, n).levels
        if found:
            return found[0]
    return None


def cmd_wavefunction(config: RunConfig, n: int, out_dir: Path) -> None:
    grid = config.grid()
    level = _closed_form_level(config, n)
    if level is None:
        raise MissingLevel(f"no closed-form level n={n} for the selected engines")
    radial = build_radial(config.params, level, grid)

    oracle_col = [""] * grid.n
    overlap = None
    oracle_level = None
    if Engine.ORACLE in config.engines:
        oracle_level = solve_relativistic(config.params, n, grid)
        if oracle_level.found:
            vec = oracle_eigenvector(config.params, oracle_level.E, grid, n)
            oracle_col = [_fmt(float(v)) for v in vec]
            denom = (math.sqrt(float(np.sum(radial.values ** 2)))
                     * math.sqrt(float(np.sum(vec ** 2))))
            if denom > 0:
                overlap = abs(float(np.dot(radial.values, vec))) / denom

    lines = ["r,R_closed,R_oracle"]
    for i, r in enumerate(grid.points):
        lines.append(f"{_fmt(float(r))},{_fmt(float(radial.values[i]))},{oracle_col[i]}")
    atomic_write(out_dir / f"wf_n{n}.csv", "\n".join(lines) + "\n")

    from .audit import ode_residual

    ode_val, ode_form = ode_residual(config.params, level, grid)
    sidecar = {
        "n": n,
        "closed_form_engine": level.engine.value,
        "E_closed": level.E,
        "E_oracle": oracle_level.E if oracle_level is not None and oracle_level.found else None,
        "flags": sorted(radial.flags),
        "norm_constant": radial.norm_constant,
        "node_count": radial.node_count,
        "representation": radial.representation,
        "overlap_closed_oracle": overlap,
        "ode_residual_closedform": ode_val,
        "ode_form": ode_form,
    }
    atomic_write(out_dir / f"wf_n{n}.flags.json",
                 json.dumps(sidecar, sort_keys=True, indent=1) + "\n")


def cmd_audit(config: RunConfig, out_dir: Path) -> None:
    report = run_audit(config.params, config.n_max, grid=config.grid())
    if "json" in config.formats:
        atomic_write(out_dir / "audit.json", report.to_json())
    if "csv" in config.formats:
        atomic_write(out_dir / "audit.csv", report.to_csv())


def _run_sweep(config: RunConfig, out_dir: Path, jobs: int, worker) -> None:
    values = config.sweep.values()
    points = []
    for i, value in enumerate(values):
        sub = out_dir / f"point_{i:03d}"
        points.append((i, value, sub, config.with_param(config.sweep.parameter, value)))

    def run_point(item):
        _, _, sub, cfg = item
        worker(cfg, sub)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(run_point, points))
    else:
        for item in points:
            run_point(item)
    index = {
        "parameter": config.sweep.parameter,
        "scale": config.sweep.scale,
        "points": [{"index": i, "value": v, "dir": sub.name}
                   for i, v, sub, _ in points],
    }
    atomic_write(out_dir / "index.json", json.dumps(index, sort_keys=True, indent=1) + "\n")


# ---------------------------------------------------------------------------
# Embedded selftest fixtures
# ---------------------------------------------------------------------------

def _fixture_box_matrix() -> float:
    from .oracle import box_grid, eigen_tridiagonal

    grid = box_grid(20.0, 2000)
    vals = eigen_tridiagonal(np.zeros(grid.n), grid, 3)
    return max(abs(v - (i * math.pi / 20.0) ** 2) / (i * math.pi / 20.0) ** 2
               for i, v in enumerate(vals, start=1))


def _fixture_box_numerov() -> float:
    from .oracle import box_grid, numerov_eigenvalue

    grid = box_grid(20.0, 800)
    exact = (2 * math.pi / 20.0) ** 2
    root, _ = numerov_eigenvalue(np.zeros(grid.n), grid,
                                 (0.98 * exact, 1.02 * exact), tol=1e-14)
    return abs(root - exact) / exact


def _fixture_oscillator() -> float:
    from .oracle import RadialGrid, eigen_tridiagonal

    grid = RadialGrid(r_min=12.0 / 2000, r_max=12.0, n=2000)
    vals = eigen_tridiagonal(grid.points ** 2, grid, 3)
    return max(abs(v - (4 * n + 3)) / (4 * n + 3) for n, v in enumerate(vals))


def _fixture_nu_hydrogen() -> float:
    from .nu import NUInput, Poly2, quantization_residual
    from .rootfind import scan_roots

    worst = 0.0
    beta = 2.0
    for n in (0, 2, 5):
        for l in (0, 2):
            build = lambda eps: NUInput(Poly2(0.0, 1.0, 0.0), Poly2(0.0, 0.0, 0.0),
                                        Poly2(-l * (l + 1), beta, -eps * eps))
            res = scan_roots(lambda eps: quantization_residual(build, eps, n),
                             1e-4, beta, 1200, 1e-13)
            expected = beta / (2.0 * (n + l + 1))
            best = min((abs(r - expected) / expected for r in res.roots),
                       default=math.inf)
            worst = max(worst, best)
    return worst


def _fixture_jacobi() -> float:
    from .wavefunction import jacobi_P

    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(0, 11))
        alpha, beta = rng.uniform(-0.9, 3.0, 2)
        x = rng.uniform(-1.0, 1.0)
        left = jacobi_P(n, alpha, beta, -x)
        right = (-1.0) ** n * jacobi_P(n, beta, alpha, x)
        worst = max(worst, abs(left - right) / max(1.0, abs(left), abs(right)))
        endpoint = 1.0
        for j in range(1, n + 1):
            endpoint *= (alpha + j)
        endpoint /= math.factorial(n)
        got = jacobi_P(n, alpha, beta, 1.0)
        worst = max(worst, abs(got - endpoint) / max(1.0, abs(endpoint)))
    return worst


FIXTURES = (
    ("box-matrix", _fixture_box_matrix, 1e-4),
    ("box-numerov", _fixture_box_numerov, 1e-6),
    ("oscillator-odd-states", _fixture_oscillator, 1e-4),
    ("nu-hydrogen-quantization", _fixture_nu_hydrogen, 1e-10),
    ("jacobi-identities", _fixture_jacobi, 1e-12),
)


def run_selftest(perturb: str | None = None, stream=None) -> int:
    """Run the embedded fixtures; prints one line per fixture; 0 iff all pass.

    `perturb` artificially inflates the named fixture's defect, for testing
    the failure path of the harness itself.
    """
    stream = stream or sys.stdout
    use_color = (os.environ.get("HYKG_NO_COLOR") is None
                 and hasattr(stream, "isatty") and stream.isatty())

    def paint(txt, ok):
        if not use_color:
            return txt
        return f"\x1b[32m{txt}\x1b[0m" if ok else f"\x1b[31m{txt}\x1b[0m"

    failures = 0
    for name, fn, tol in FIXTURES:
        defect = fn()
        if perturb == name:
            defect = defect + 1.0
        ok = defect <= tol
        failures += 0 if ok else 1
        stream.write(f"{name:28s} {paint('PASS' if ok else 'FAIL', ok)} "
                     f"(defect {defect:.3e}, tol {tol:.1e})\n")
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------
# Argument parsing and dispatch
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hykg",
        description="Relativistic bound states of a Hylleraas-type well: "
                    "closed-form engines, numerical oracle, consistency audit.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=str, default=None,
                       help="config file (key = value sections); defaults used if omitted")
        p.add_argument("--n-max", type=int, default=None, help="override [run] n_max")
        p.add_argument("--jobs", type=int, default=1, help="parallel sweep points")
        p.add_argument("--out", type=str, default="out", help="output directory")

    for name in ("spectrum", "audit", "oracle"):
        common(sub.add_parser(name))
    wf = sub.add_parser("wavefunction")
    common(wf)
    wf.add_argument("--n", type=int, default=0, help="level index")
    sub.add_parser("selftest")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        return run_selftest()
    try:
        config = load_config(args.config)
        if args.n_max is not None:
            if not (0 <= args.n_max <= 10):
                raise ConfigError("--n-max must be in 0..10")
            config = RunConfig(params=config.params, r_max=config.r_max,
                               grid_n=config.grid_n, engines=config.engines,
                               n_max=args.n_max, formats=config.formats,
                               sweep=config.sweep)
        if args.command == "oracle":
            config = RunConfig(params=config.params, r_max=config.r_max,
                               grid_n=config.grid_n, engines=(Engine.ORACLE,),
                               n_max=config.n_max, formats=config.formats,
                               sweep=config.sweep)
        out_dir = Path(args.out)

        if args.command in ("spectrum", "oracle"):
            worker = cmd_spectrum
        elif args.command == "audit":
            worker = cmd_audit
        elif args.command == "wavefunction":
            if config.sweep is not None:
                raise ConfigError("wavefunction does not support sweeps")
            cmd_wavefunction(config, args.n, out_dir)
            return 0
        else:  # pragma: no cover
            raise ConfigError(f"unknown command {args.command}")

        if config.sweep is not None:
            _run_sweep(config, out_dir, max(1, args.jobs), worker)
        else:
            worker(config, out_dir)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except MissingLevel as exc:
        print(f"missing level: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    except TailNotConverged as exc:  # pragma: no cover - recorded, not fatal
        print(f"warning: {exc}", file=sys.stderr)
        return 0
    except Exception:
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
