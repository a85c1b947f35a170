"""Closed-form radial wavefunctions and their numerical support.

The printed construction factors the radial solution as

    R(r) = (s+a)^(D/2) (s+c)^(F/2) * chi_n(s),    s = s(r),

with chi_n generated by a Rodrigues derivative over the weight
(s+a)^D (s+c)^F, a Jacobi polynomial up to an affine change of variable.
The printed exponent formulas divide by (c - a); at symmetric parameter sets
(a = c) this module switches to the confluent representation derived
mechanically from the selected branch, where the power pair collapses to a
power times exp(-w / (s+a)).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DegenerateAC,
    DomainError,
    NotRepresentable,
    TailNotConverged,
)
from .hylleraas import HylleraasParams, appendix_constants, s_of_r
from .levels import FLAG_CONFLUENT_FORM, FLAG_TAIL_NOT_CONVERGED, EnergyLevel
from .nu import NUInput, NUSolution

_MAX_RODRIGUES_N = 12


class NonClassicalWarning(UserWarning):
    """Jacobi parameters at or below -1: outside the classical weight range."""


# ---------------------------------------------------------------------------
# Jacobi polynomials
# ---------------------------------------------------------------------------

def jacobi_series(n: int, alpha: float, beta: float, x: float) -> float:
    """Terminating series form; entire in (alpha, beta), used as the fallback
    when the recurrence denominators degenerate."""
    total = 0.0
    for k in range(n + 1):
        t1 = 1.0
        for j in range(1, n - k + 1):
            t1 *= (alpha + k + j)
        t1 /= math.factorial(n - k)
        t2 = 1.0
        for j in range(k):
            t2 *= (n + beta - j)
        t2 /= math.factorial(k)
        total += t1 * t2 * ((x - 1.0) / 2.0) ** k * ((x + 1.0) / 2.0) ** (n - k)
    return total


def jacobi_P(n: int, alpha: float, beta: float, x: float) -> float:
    """P_n^(alpha,beta)(x) by the standard three-term recurrence.

    Parameters <= -1 are permitted numerically but flagged as non-classical.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if alpha <= -1.0 or beta <= -1.0:
        warnings.warn("Jacobi parameters at or below -1", NonClassicalWarning,
                      stacklevel=2)
    if n == 0:
        return 1.0
    p_prev = 1.0
    p_cur = 0.5 * ((alpha + beta + 2.0) * x + (alpha - beta))
    for m in range(2, n + 1):
        apb = alpha + beta
        c1 = 2.0 * m * (m + apb) * (2.0 * m + apb - 2.0)
        if abs(c1) < 1e-12 * max(1.0, m ** 3):
            return jacobi_series(n, alpha, beta, x)
        c2 = (2.0 * m + apb - 1.0) * ((2.0 * m + apb) * (2.0 * m + apb - 2.0) * x
                                      + alpha * alpha - beta * beta)
        c3 = 2.0 * (m + alpha - 1.0) * (m + beta - 1.0) * (2.0 * m + apb)
        p_prev, p_cur = p_cur, (c2 * p_cur - c3 * p_prev) / c1
    return p_cur


# ---------------------------------------------------------------------------
# Printed exponent pair
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WavefactorParams:
    """Exponents of the printed factor construction at one level.

    muJ, nuJ are the scalar radicals of the branch selection; D and F follow
    either the printed grouping or the symmetric alternative (the printed
    grouping carries an asymmetric factor 2, so both are exposed and the
    audit reports which one behaves)."""

    D: float
    F: float
    muJ: float
    nuJ: float
    reading: str  # "printed" | "symmetric"


def exponents_DF(params: HylleraasParams, level: EnergyLevel,
                 reading: str = "printed") -> WavefactorParams:
    """D, F from the printed formulas:

        printed:   D = (1 - (muJ c + nuJ)) / (alpha1 (c - a))
        symmetric: D = -(muJ c + nuJ) / (2 alpha1 (c - a))
        both:      F = (muJ a + nuJ) / (2 alpha1 (c - a))
    """
    if reading not in ("printed", "symmetric"):
        raise ValueError("reading must be 'printed' or 'symmetric'")
    if level.E is None:
        raise ValueError("level has no energy")
    abc = params.abc
    a, c = abc.a, abc.c
    if a == c:
        raise DegenerateAC("printed exponents divide by c - a = 0")
    cst = appendix_constants(params, level.E)
    delta = math.sqrt(cst.delta2)
    inner = cst.V2
    if inner < 0:
        raise NotRepresentable(f"A^2 - B = {inner:.6g} < 0 at E = {level.E}")
    root_inner = math.sqrt(inner)
    rad_p = delta * (cst.eps2 + cst.A) + root_inner
    rad_m = delta * (cst.eps2 + cst.A) - root_inner
    if rad_p < 0 or rad_m < 0:
        raise NotRepresentable("negative radicand in the factor exponents")
    muJ = math.sqrt(rad_p)
    nuJ = math.sqrt(rad_m)
    a1 = cst.alpha1
    if reading == "printed":
        D = (1.0 - (muJ * c + nuJ)) / (a1 * (c - a))
    else:
        D = -(muJ * c + nuJ) / (2.0 * a1 * (c - a))
    F = (muJ * a + nuJ) / (2.0 * a1 * (c - a))
    return WavefactorParams(D=D, F=F, muJ=muJ, nuJ=nuJ, reading=reading)


# ---------------------------------------------------------------------------
# Rodrigues polynomial factors
# ---------------------------------------------------------------------------

def _falling(x: float, k: int) -> float:
    out = 1.0
    for j in range(k):
        out *= (x - j)
    return out


def rodrigues_chi(n: int, D: float, F: float, a: float, c: float, s) -> float:
    """chi_n(s) = (s+a)^-D (s+c)^-F d^n/ds^n [(s+a)^(n+D) (s+c)^(n+F)].

    Evaluated through the Leibniz expansion, exact for the polynomial result:

        chi_n = sum_k C(n,k) ff(n+D,k) ff(n+F,n-k) (s+a)^(n-k) (s+c)^k
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > _MAX_RODRIGUES_N:
        raise ValueError(f"derivative order capped at {_MAX_RODRIGUES_N}")
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr + a <= 0) or np.any(s_arr + c <= 0):
        raise DomainError("base factors must stay positive on the domain")
    total = np.zeros_like(s_arr)
    for k in range(n + 1):
        coeff = math.comb(n, k) * _falling(n + D, k) * _falling(n + F, n - k)
        total = total + coeff * (s_arr + a) ** (n - k) * (s_arr + c) ** k
    return float(total) if np.isscalar(s) else total


def confluent_chi_coeffs(n: int, u: float, v: float) -> list[float]:
    """Coefficients gamma_j of chi_n = sum_j gamma_j (s+a)^j for the confluent
    weight rho = (s+a)^u exp(-v/(s+a)).

    Derivatives stay inside the family sum c_m (s+a)^m exp(-v/(s+a)) via
    d/ds [(s+a)^m e^(-v/(s+a))] = [m (s+a)^(m-1) + v (s+a)^(m-2)] e^(...),
    so the n-th derivative of (s+a)^(2n+u) e^(-v/(s+a)) is exact.
    """
    if n > _MAX_RODRIGUES_N:
        raise ValueError(f"derivative order capped at {_MAX_RODRIGUES_N}")
    terms: dict[int, float] = {2 * n: 1.0}  # exponent offset from u
    for _ in range(n):
        nxt: dict[int, float] = {}
        for off, coeff in terms.items():
            m = off + u
            nxt[off - 1] = nxt.get(off - 1, 0.0) + coeff * m
            nxt[off - 2] = nxt.get(off - 2, 0.0) + coeff * v
        terms = nxt
    # dividing by rho shifts exponents by -u: integer powers 0..n remain
    return [terms.get(j, 0.0) for j in range(n + 1)]


@dataclass(frozen=True)
class ConfluentFactor:
    """R = (s+a)^p exp(-w/(s+a)) * sum_j gamma_j (s+a)^j at a double root -a."""

    a: float
    p: float
    w: float
    chi_coeffs: list[float]

    def __call__(self, s):
        s_arr = np.asarray(s, dtype=float)
        base = s_arr + self.a
        if np.any(base <= 0):
            raise DomainError("base factor must stay positive")
        chi = np.zeros_like(s_arr)
        for j in reversed(range(len(self.chi_coeffs))):
            chi = chi * base + self.chi_coeffs[j]
        val = base ** self.p * np.exp(-self.w / base) * chi
        return float(val) if np.isscalar(s) else val


def confluent_radial_factor(inp: NUInput, sol: NUSolution, n: int) -> ConfluentFactor:
    """Mechanical closed form at a repeated sigma root: phi * chi_n.

    phi  = (s+a)^(pi1/P) exp(-pi(-a)/(P (s+a))),      P = sigma''/2
    rho  = (s+a)^(N1/P)  exp(-N(-a)/(P (s+a))),       N = tau - sigma'
    chi_n from the confluent Rodrigues over rho.
    """
    sg = inp.sigma
    if sg.degree != 2:
        raise DegenerateAC("confluent factor needs a quadratic sigma")
    P = sg.c2
    r = -sg.c1 / (2.0 * P)  # double root; caller guarantees near-degeneracy
    a = -r
    pi = sol.pi
    pi_at_root = pi(r)
    sp = sg.deriv()
    n1 = sol.tau.c1 - sp.c1
    n_at_root = sol.tau(r) - sp(r)
    u = n1 / P
    v = n_at_root / P
    coeffs = confluent_chi_coeffs(n, u, v)
    return ConfluentFactor(a=a, p=pi.c1 / P, w=pi_at_root / P, chi_coeffs=coeffs)


# ---------------------------------------------------------------------------
# Radial assembly
# ---------------------------------------------------------------------------

def radial_R(level: EnergyLevel, params: HylleraasParams, r: float,
             reading: str = "printed", ordering: str = "D_on_a") -> float:
    """Pointwise closed-form R(r); dispatches to the confluent form at a = c."""
    abc = params.abc
    s = s_of_r(r, params.K, params.omega, params.s_sign)
    if _is_confluent(params):
        fac = _confluent_for(level, params)
        return fac(s)
    wf = exponents_DF(params, level, reading=reading)
    e_a, e_c = (wf.D, wf.F) if ordering == "D_on_a" else (wf.F, wf.D)
    if s + abc.a <= 0 or s + abc.c <= 0:
        raise DomainError("factor bases must be positive")
    return ((s + abc.a) ** (e_a / 2.0) * (s + abc.c) ** (e_c / 2.0)
            * rodrigues_chi(level.n, wf.D, wf.F, abc.a, abc.c, s))


def _is_confluent(params: HylleraasParams) -> bool:
    abc = params.abc
    return abs(abc.a - abc.c) <= 1e-12 * max(1.0, abs(abc.a), abs(abc.c))


def _confluent_for(level: EnergyLevel, params: HylleraasParams) -> ConfluentFactor:
    from .closedform import _mech_branch  # local import avoids a cycle
    from .nu import BranchGap

    out = _mech_branch(params, level.E)
    if isinstance(out, BranchGap):
        raise NotRepresentable(f"no mechanical branch at E = {level.E}: {out.reason}")
    inp, sol, _ = out
    return confluent_radial_factor(inp, sol, level.n)


@dataclass(frozen=True)
class RadialFunction:
    """Sampled radial function with normalization bookkeeping.

    norm_constant is None when the tail check failed (non-normalizable
    construction); values are then raw samples.
    """

    level: EnergyLevel
    grid: np.ndarray
    values: np.ndarray
    norm_constant: float | None
    node_count: int
    flags: frozenset[str] = frozenset()
    representation: str = "printed"

    def __post_init__(self):
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")


def composite_simpson(values: np.ndarray, h: float) -> float:
    """Composite Simpson on uniform samples; a trailing trapezoid panel covers
    an odd interval count."""
    n = len(values)
    if n < 3:
        return float(0.5 * h * (values[0] + values[-1]) + h * np.sum(values[1:-1]))
    if (n - 1) % 2 == 0:
        main, tail = values, 0.0
    else:
        main = values[:-1]
        tail = 0.5 * h * (values[-2] + values[-1])
    acc = main[0] + main[-1] + 4.0 * np.sum(main[1:-1:2]) + 2.0 * np.sum(main[2:-2:2])
    return float(acc * h / 3.0 + tail)


def simpson_adaptive(f, lo: float, hi: float, rel_tol: float = 1e-9,
                     max_doublings: int = 16) -> float:
    """Composite Simpson with dyadic grid doubling until relative stability."""
    n = 128
    xs = np.linspace(lo, hi, n + 1)
    prev = composite_simpson(np.array([f(x) for x in xs]), (hi - lo) / n)
    for _ in range(max_doublings):
        n *= 2
        xs = np.linspace(lo, hi, n + 1)
        cur = composite_simpson(np.array([f(x) for x in xs]), (hi - lo) / n)
        if abs(cur - prev) <= rel_tol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    return prev


def count_nodes(radial: RadialFunction, noise: float = 1e-9) -> int:
    """Strict sign changes of the samples, ignoring a |R| < noise*max band."""
    from .oracle import count_sign_changes

    return count_sign_changes(radial.values, noise=noise)


def _tails_decayed(grid: np.ndarray, values: np.ndarray,
                   threshold: float = 1e-8) -> bool:
    vmax = float(np.max(np.abs(values)))
    if vmax == 0.0:
        return False
    # the left check is vacuous when the grid starts at the physical origin:
    # the support cannot extend below r = 0
    h = float(grid[1] - grid[0])
    left_ok = grid[0] <= 3.0 * h or abs(values[0]) < threshold * vmax
    return left_ok and abs(values[-1]) < threshold * vmax


def normalize(radial: RadialFunction) -> RadialFunction:
    """Rescale so the quadrature norm integral of |R|^2 equals 1.

    Raises TailNotConverged when the samples have not decayed at the grid
    edges; that outcome is expected for the non-normalizable printed
    convention and is recorded, not swallowed, by callers.
    """
    if not _tails_decayed(radial.grid, radial.values):
        raise TailNotConverged("samples have not decayed at the grid edges")
    h = float(radial.grid[1] - radial.grid[0])
    integral = composite_simpson(radial.values ** 2, h)
    if integral <= 0:
        raise TailNotConverged("norm integral is not positive")
    constant = 1.0 / math.sqrt(integral)
    return replace(radial, values=radial.values * constant,
                   norm_constant=(radial.norm_constant or 1.0) * constant)


def build_radial(params: HylleraasParams, level: EnergyLevel, grid,
                 reading: str = "printed", ordering: str = "D_on_a") -> RadialFunction:
    """Sample the closed form on an oracle grid and attempt normalization."""
    points = np.asarray(getattr(grid, "points", grid), dtype=float)
    confluent = _is_confluent(params)
    if confluent:
        fac = _confluent_for(level, params)
        s_vals = np.array([s_of_r(r, params.K, params.omega, params.s_sign)
                           for r in points])
        values = fac(s_vals)
        representation = "confluent-mechanical"
    else:
        values = np.array([radial_R(level, params, r, reading=reading,
                                    ordering=ordering) for r in points])
        representation = f"{reading}/{ordering}"
    radial = RadialFunction(level=level, grid=points, values=values,
                            norm_constant=1.0, node_count=0,
                            flags=frozenset({FLAG_CONFLUENT_FORM}) if confluent else frozenset(),
                            representation=representation)
    try:
        radial = normalize(radial)
    except TailNotConverged:
        radial = replace(radial, norm_constant=None,
                         flags=radial.flags | {FLAG_TAIL_NOT_CONVERGED})
    return replace(radial, node_count=count_nodes(radial))
