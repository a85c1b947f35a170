"""Cross-engine comparison and identity auditing.

Every row compares the four engines at one radial quantum number and
evaluates the printed derivation's internal identities numerically.  The
printed algebra is internally inconsistent, so identity columns are
findings, not assertions: the report asserts only completeness, finiteness
and determinism.  Quantities whose printed radicands go negative are
evaluated in complex arithmetic and reported as moduli (the row carries the
NegativeUnderSqrt flag).

Column meanings (the documented identity list):

  disc_residual            scaled square-closure defect of the mechanical branch
  tau_prime_sign           True if the selected branch has a decreasing tau
  eq42_vs_derivative       printed slope formula vs the mechanical branch slope
  eq44_vs_eq12             printed lambda_n vs the mechanical lambda_n
  eq20_vs_eq23             direct printed gamma^2 vs the subtractive form
  delta_a9_vs_eq35         squared explicit delta vs the main-chain delta^2
  k39_vs_mechanical        printed closure constant vs nearest mechanical one
  ode_residual_closedform  relative L2 defect of the closed form in the radial ODE
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .closedform import (
    _mech_branch,
    energy_eq45_result,
    energy_implicit_result,
    energy_mechanical_result,
    intermediates,
)
from .errors import DegenerateSigma, ImperfectSquare, NoRealK, NotRepresentable
from .hylleraas import (
    HylleraasParams,
    SSign,
    appendix_constants,
    gamma2_printed,
)
from .levels import (
    FLAG_MULTIPLE_ROOTS,
    FLAG_NEGATIVE_UNDER_SQRT,
    FLAG_NO_ROOT,
    FLAG_ORDERING_VIOLATION,
    FLAG_REFERENCE_FALLBACK,
    Engine,
    EnergyLevel,
)
from .nu import BranchGap, lambda_n, solve_k
from .oracle import RadialGrid, default_grid, effective_potential, solve_relativistic
from .wavefunction import build_radial

ENGINE_ORDER = (Engine.EQ45_VERBATIM, Engine.IMPLICIT_LAMBDA,
                Engine.MECHANICAL_NU, Engine.ORACLE)

CSV_COLUMNS = [
    "n", "E_eq45", "E_implicit", "E_mechanical", "E_oracle",
    "diff_eq45_implicit", "diff_eq45_mechanical", "diff_eq45_oracle",
    "diff_implicit_mechanical", "diff_implicit_oracle", "diff_mechanical_oracle",
    "disc_residual", "tau_prime_sign", "eq42_vs_derivative", "eq44_vs_eq12",
    "eq20_vs_eq23", "delta_a9_vs_eq35", "k39_vs_mechanical",
    "ode_residual_closedform", "ode_form", "reference_E", "flags",
]


@dataclass(frozen=True)
class AuditRow:
    """One per-n comparison row; numeric fields are None (with a flag) when
    the quantity could not be computed, never NaN or infinity."""

    n: int
    E_eq45: float | None
    E_implicit: float | None
    E_mechanical: float | None
    E_oracle: float | None
    diff_eq45_implicit: float | None
    diff_eq45_mechanical: float | None
    diff_eq45_oracle: float | None
    diff_implicit_mechanical: float | None
    diff_implicit_oracle: float | None
    diff_mechanical_oracle: float | None
    disc_residual: float | None
    tau_prime_sign: bool
    eq42_vs_derivative: float | None
    eq44_vs_eq12: float | None
    eq20_vs_eq23: float | None
    delta_a9_vs_eq35: float | None
    k39_vs_mechanical: float | None
    ode_residual_closedform: float | None
    ode_form: str
    reference_E: float
    flags: frozenset[str] = field(default_factory=frozenset)

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in CSV_COLUMNS if k != "flags"}
        d["flags"] = sorted(self.flags)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "AuditRow":
        kw = dict(d)
        kw["flags"] = frozenset(kw.get("flags", []))
        return cls(**kw)


@dataclass(frozen=True)
class AuditReport:
    version: str
    config: dict
    rows: tuple[AuditRow, ...]
    summary: dict

    def to_json(self) -> str:
        payload = {
            "version": self.version,
            "config": self.config,
            "rows": [r.to_dict() for r in self.rows],
            "summary": self.summary,
        }
        return json.dumps(payload, sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "AuditReport":
        payload = json.loads(text)
        return cls(version=payload["version"], config=payload["config"],
                   rows=tuple(AuditRow.from_dict(r) for r in payload["rows"]),
                   summary=payload["summary"])

    def to_csv(self) -> str:
        lines = [",".join(CSV_COLUMNS)]
        for row in self.rows:
            d = row.to_dict()
            cells = []
            for col in CSV_COLUMNS:
                v = d[col]
                if col == "flags":
                    cells.append(";".join(v))
                elif v is None:
                    cells.append("")
                elif isinstance(v, bool):
                    cells.append("true" if v else "false")
                elif isinstance(v, float):
                    cells.append(repr(float(v)))
                else:
                    cells.append(str(v))
            lines.append(",".join(cells))

        return "\n".join(lines) + "\n"


def _pick(levels: list[EnergyLevel]) -> tuple[float | None, frozenset[str]]:
    """Lowest root represents the engine in the row; extra roots are flagged."""
    if not levels:
        return None, frozenset({FLAG_NO_ROOT})
    found = [l for l in levels if l.found]
    if not found:
        return None, levels[0].flags | {FLAG_NO_ROOT}
    first = min(found, key=lambda l: l.E)
    flags = set(first.flags)
    if len(found) > 1:
        flags.add(FLAG_MULTIPLE_ROOTS)
    return first.E, frozenset(flags)


def _complex_gap(printed: complex, mechanical: float, scale: float) -> float:
    return abs(printed - mechanical) / max(1.0, scale)


def ode_residual(params: HylleraasParams, level: EnergyLevel,
                 grid: RadialGrid) -> tuple[float, str]:
    """Relative L2 defect of the closed-form R in -R'' + (W - Ebar) R = 0.

    For asymmetric parameter sets all four printed reading/ordering combos
    are tried and the best (smallest) defect is reported with its label; at
    a = c the mechanical confluent form is the only representation.
    """
    abc = params.abc
    confluent = abs(abc.a - abc.c) <= 1e-12 * max(1.0, abs(abc.a), abs(abc.c))
    combos = ([("printed", "D_on_a")] if confluent else
              [(r, o) for r in ("printed", "symmetric") for o in ("D_on_a", "F_on_a")])
    w = effective_potential(params, level.E, grid)
    ebar = level.E ** 2 - params.M ** 2
    best = math.inf
    best_label = "none"
    for reading, ordering in combos:
        try:
            rad = build_radial(params, level, grid, reading=reading, ordering=ordering)
        except (NotRepresentable, Exception):
            continue
        R = rad.values
        h = grid.h
        rpp = (R[2:] - 2 * R[1:-1] + R[:-2]) / (h * h)
        resid = -rpp + (w[1:-1] - ebar) * R[1:-1]
        num = math.sqrt(float(np.sum(resid ** 2)))
        den = math.sqrt(float(np.sum(rpp ** 2))) + math.sqrt(
            float(np.sum(((w[1:-1] - ebar) * R[1:-1]) ** 2)))
        value = num / max(den, 1e-300)
        label = rad.representation
        if value < best:
            best, best_label = value, label
    if not math.isfinite(best):
        return math.inf, "none"
    return best, best_label


def _identity_columns(params: HylleraasParams, E: float, n: int) -> dict:
    """All per-row identity findings at one reference energy."""
    cst = appendix_constants(params, E)
    out: dict = {}
    flags: set[str] = set()

    # gamma^2: direct printed form vs subtractive construction
    direct = gamma2_printed(params, E)
    out["eq20_vs_eq23"] = abs(direct - cst.gamma2) / max(1.0, abs(cst.eps2) + abs(cst.gammap2))

    # the two printed deltas
    d_a9_sq = cst.delta_A9 ** 2
    out["delta_a9_vs_eq35"] = abs(d_a9_sq - cst.delta2) / max(1.0, d_a9_sq, cst.delta2)

    im = intermediates(params, E, n, cst=cst)
    if FLAG_NEGATIVE_UNDER_SQRT in im.flags:
        flags.add(FLAG_NEGATIVE_UNDER_SQRT)

    branch = _mech_branch(params, E)
    if isinstance(branch, BranchGap):
        out["disc_residual"] = math.inf
        out["tau_prime_sign"] = False
        out["eq42_vs_derivative"] = math.inf
        out["eq44_vs_eq12"] = math.inf
        out["k39_vs_mechanical"] = math.inf
        out["_flags"] = flags | {branch.reason}
        return out
    inp, sol, strict_ok = branch
    scale2 = (1.0 + max(inp.scale(), 1.0)) ** 2
    out["disc_residual"] = sol.residual_square / scale2
    out["tau_prime_sign"] = bool(sol.tau_prime < 0.0)
    out["eq42_vs_derivative"] = _complex_gap(im.tau_prime_printed, sol.tau_prime,
                                             abs(sol.tau_prime))
    lamn_mech = lambda_n(inp, sol, n)
    out["eq44_vs_eq12"] = _complex_gap(im.lam_n, lamn_mech, abs(lamn_mech))
    try:
        ks = [k for k, _ in solve_k(inp)]
        out["k39_vs_mechanical"] = min(
            abs(im.k.real - k) / max(1.0, abs(k)) for k in ks) if ks else math.inf
    except (NoRealK, DegenerateSigma, ImperfectSquare):
        out["k39_vs_mechanical"] = math.inf
    out["_flags"] = flags
    return out


def run_audit(params: HylleraasParams, n_max: int,
              grid: RadialGrid | None = None,
              n_brackets: int = 2000,
              _levels_override: dict[Engine, dict[int, list[EnergyLevel]]] | None = None,
              ) -> AuditReport:
    """One row per n in 0..n_max; engine failures become flags, never aborts."""
    if not (0 <= n_max <= 10):
        raise ValueError("n_max must be in 0..10")
    if grid is None:
        grid = default_grid(params)

    rows: list[AuditRow] = []
    prev_e: dict[Engine, float] = {}
    for n in range(n_max + 1):
        per_engine: dict[Engine, tuple[float | None, frozenset[str]]] = {}
        if _levels_override is not None:
            for eng in ENGINE_ORDER:
                per_engine[eng] = _pick(_levels_override.get(eng, {}).get(n, []))
        else:
            per_engine[Engine.EQ45_VERBATIM] = _pick(
                energy_eq45_result(params, n, n_brackets=n_brackets).levels)
            per_engine[Engine.IMPLICIT_LAMBDA] = _pick(
                energy_implicit_result(params, n, n_brackets=n_brackets).levels)
            per_engine[Engine.MECHANICAL_NU] = _pick(
                energy_mechanical_result(params, n, n_brackets=n_brackets).levels)
            lvl = solve_relativistic(params, n, grid)
            per_engine[Engine.ORACLE] = (lvl.E, lvl.flags)

        flags: set[str] = set()
        for eng in ENGINE_ORDER:
            e, fl = per_engine[eng]
            flags |= {f"{eng.value}:{f}" for f in fl}
            if e is not None and eng in prev_e and e < prev_e[eng]:
                flags.add(FLAG_ORDERING_VIOLATION)
            if e is not None:
                prev_e[eng] = e

        es = {eng: per_engine[eng][0] for eng in ENGINE_ORDER}
        # reference energy for the identity columns
        for ref_engine in (Engine.MECHANICAL_NU, Engine.ORACLE,
                           Engine.IMPLICIT_LAMBDA, Engine.EQ45_VERBATIM):
            if es[ref_engine] is not None:
                ref_e = es[ref_engine]
                break
        else:
            ref_e = 0.0
            flags.add(FLAG_REFERENCE_FALLBACK)

        ident = _identity_columns(params, ref_e, n)
        flags |= ident.pop("_flags", set())
        for key, val in list(ident.items()):
            if isinstance(val, float) and not math.isfinite(val):
                ident[key] = None
                flags.add("IdentityNotComputable")

        ref_level = EnergyLevel(n=n, E=ref_e, Ebar=ref_e ** 2 - params.M ** 2,
                                engine=Engine.MECHANICAL_NU, residual=0.0)
        ode_val, ode_form = ode_residual(params, ref_level, grid)
        if not math.isfinite(ode_val):
            ode_val = None
            flags.add("IdentityNotComputable")

        def diff(a: Engine, b: Engine) -> float | None:
            if es[a] is None or es[b] is None:
                return None
            return float(abs(es[a] - es[b]))

        def opt(x):
            return None if x is None else float(x)

        rows.append(AuditRow(
            n=n,
            E_eq45=opt(es[Engine.EQ45_VERBATIM]),
            E_implicit=opt(es[Engine.IMPLICIT_LAMBDA]),
            E_mechanical=opt(es[Engine.MECHANICAL_NU]),
            E_oracle=opt(es[Engine.ORACLE]),
            diff_eq45_implicit=diff(Engine.EQ45_VERBATIM, Engine.IMPLICIT_LAMBDA),
            diff_eq45_mechanical=diff(Engine.EQ45_VERBATIM, Engine.MECHANICAL_NU),
            diff_eq45_oracle=diff(Engine.EQ45_VERBATIM, Engine.ORACLE),
            diff_implicit_mechanical=diff(Engine.IMPLICIT_LAMBDA, Engine.MECHANICAL_NU),
            diff_implicit_oracle=diff(Engine.IMPLICIT_LAMBDA, Engine.ORACLE),
            diff_mechanical_oracle=diff(Engine.MECHANICAL_NU, Engine.ORACLE),
            disc_residual=opt(ident["disc_residual"]),
            tau_prime_sign=bool(ident["tau_prime_sign"]),
            eq42_vs_derivative=opt(ident["eq42_vs_derivative"]),
            eq44_vs_eq12=opt(ident["eq44_vs_eq12"]),
            eq20_vs_eq23=opt(ident["eq20_vs_eq23"]),
            delta_a9_vs_eq35=opt(ident["delta_a9_vs_eq35"]),
            k39_vs_mechanical=opt(ident["k39_vs_mechanical"]),
            ode_residual_closedform=opt(ode_val),
            ode_form=ode_form,
            reference_E=float(ref_e),
            flags=frozenset(flags),
        ))

    summary = {
        "rows": len(rows),
        "levels_found": {eng.value: sum(1 for r in rows
                                        if getattr(r, f"E_{_short(eng)}") is not None)
                         for eng in ENGINE_ORDER},
        "tau_prime_negative_rows": sum(1 for r in rows if r.tau_prime_sign),
        "rows_with_negative_radicands": sum(
            1 for r in rows if FLAG_NEGATIVE_UNDER_SQRT in r.flags),
    }
    config = {
        "params": params_dict(params),
        "grid": {"r_min": grid.r_min, "r_max": grid.r_max, "n": grid.n},
        "n_max": n_max,
        "n_brackets": n_brackets,
    }
    return AuditReport(version=f"hykg {__version__}", config=config,
                       rows=tuple(rows), summary=summary)


def _short(engine: Engine) -> str:
    return {Engine.EQ45_VERBATIM: "eq45", Engine.IMPLICIT_LAMBDA: "implicit",
            Engine.MECHANICAL_NU: "mechanical", Engine.ORACLE: "oracle"}[engine]


def params_dict(params: HylleraasParams) -> dict:
    return {
        "K": params.K, "k1": params.k1, "k2": params.k2,
        "omega": params.omega, "D_e": params.D_e, "M": params.M,
        "mu": params.mu,
        "s_sign": "negative" if params.s_sign is SSign.NEGATIVE else "positive",
    }


def identity_checks(params: HylleraasParams, e_samples: list[float]) -> list[dict]:
    """Per-sample residuals of the printed identities, normalized.

    tau_prime here compares the two *printed* forms (the separately printed
    slope against the derivative of the printed linear coefficient); its
    nonzero value is the expected finding.
    """
    table = []
    for E in e_samples:
        cst = appendix_constants(params, E)
        im1 = intermediates(params, E, 1, cst=cst)
        row = {
            "E": E,
            "gamma2_eq20_vs_eq23": abs(gamma2_printed(params, E) - cst.gamma2)
            / max(1.0, abs(cst.eps2) + abs(cst.gammap2)),
            "delta_a9_vs_eq35": abs(cst.delta_A9 ** 2 - cst.delta2)
            / max(1.0, cst.delta_A9 ** 2, cst.delta2),
            "tau_prime_eq42_vs_derivative": abs(im1.tau_prime_printed - im1.tau_slope)
            / max(1.0, abs(im1.tau_slope)),
        }
        for n in (1, 2):
            im = intermediates(params, E, n, cst=cst)
            branch = _mech_branch(params, E)
            if isinstance(branch, BranchGap):
                row[f"lambda_n_eq44_vs_mech_n{n}"] = math.inf
            else:
                inp, sol, _ = branch
                mech = lambda_n(inp, sol, n)
                row[f"lambda_n_eq44_vs_mech_n{n}"] = abs(im.lam_n - mech) / max(1.0, abs(mech))
        table.append(row)
    return table
