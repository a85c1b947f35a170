"""Hylleraas-type potential family: parameters, change of variable, constant cascade.

The potential is a six-parameter exponential-type molecular well

    V(r) = D_e * [1 - (1+a)(1+c)(s+b) / ((s+a)(s+c)(1+b))],   s = exp(+/- 2(1+K) w r)

with (a, b, c) derived from the shape parameters (K, k1, k2).  Everything in
this module is a pure function of its inputs.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

from .errors import DegenerateParams, OutOfRange, SingularPotential

# Largest exponent exp() can take before overflowing a double.
_EXP_MAX = 709.0


class SSign(enum.Enum):
    """Sign convention of the exponent in s(r)."""

    POSITIVE = "positive"   # s = exp(+2(1+K) w r), growing; verbatim convention
    NEGATIVE = "negative"   # s = exp(-2(1+K) w r), decaying


@dataclass(frozen=True)
class ABC:
    """The three derived shape quotients."""

    a: float
    b: float
    c: float


@dataclass(frozen=True)
class HylleraasParams:
    """Physical inputs; `mu` is an auxiliary dimensionless factor kept configurable.

    `mu` multiplies the energy-type terms of the dimensionless constant cascade.
    Its role is not fixed by the unit system (h-bar = c = 1); it defaults to 1
    and the audit quantifies its effect.
    """

    K: float
    k1: float
    k2: float
    omega: float
    D_e: float
    M: float
    mu: float = 1.0
    s_sign: SSign = SSign.POSITIVE

    def __post_init__(self):
        if not (self.omega > 0):
            raise DegenerateParams("omega must be > 0")
        if self.D_e < 0:
            raise DegenerateParams("D_e must be >= 0")
        if not (self.M > 0):
            raise DegenerateParams("M must be > 0")
        if not (self.mu > 0):
            raise DegenerateParams("mu must be > 0")
        derive_abc(self.K, self.k1, self.k2)  # validates denominators

    @property
    def abc(self) -> ABC:
        return derive_abc(self.K, self.k1, self.k2)

    @property
    def scale2(self) -> float:
        """(1+K)^2 w^2, the square of the inverse-length scale."""
        return (1.0 + self.K) ** 2 * self.omega ** 2

    def replace(self, **kw) -> "HylleraasParams":
        return replace(self, **kw)


def derive_abc(K: float, k1: float, k2: float) -> ABC:
    """a = (K-k2)/(1+k2), b = (K-k1+k2)/(1+k1+k2), c = (K-k1)/(1+k1)."""
    for name, den in (("1+k2", 1 + k2), ("1+k1+k2", 1 + k1 + k2), ("1+k1", 1 + k1)):
        if den == 0:
            raise DegenerateParams(f"denominator {name} is zero")
    a = (K - k2) / (1 + k2)
    b = (K - k1 + k2) / (1 + k1 + k2)
    c = (K - k1) / (1 + k1)
    for name, val in (("1+a", 1 + a), ("1+b", 1 + b), ("1+c", 1 + c)):
        if val == 0:
            raise DegenerateParams(f"{name} is zero; the potential family is singular")
    return ABC(a, b, c)


# Desk-scale default parameter set used by the CLI default config and the tests.
DEFAULT_PARAMS = HylleraasParams(K=2.0, k1=1.0, k2=1.0, omega=0.25, D_e=1.0,
                                 M=1.0, mu=1.0, s_sign=SSign.NEGATIVE)


def s_of_r(r: float, K: float, omega: float, s_sign: SSign) -> float:
    """s = exp(+/- 2(1+K) w r); saturating exponents raise OutOfRange, never inf."""
    if r < 0:
        raise OutOfRange("r must be >= 0")
    expo = 2.0 * (1.0 + K) * omega * r
    if s_sign is SSign.NEGATIVE:
        expo = -expo
    if expo > _EXP_MAX:
        raise OutOfRange(f"s(r) overflows: exponent {expo:.3g}")
    return math.exp(expo)


def potential_from_s(s: float, a: float, b: float, c: float, D_e: float) -> float:
    """V as a function of the transformed variable s."""
    den = (s + a) * (s + c) * (1 + b)
    if den == 0:
        raise SingularPotential(f"(s+a)(s+c)(1+b) vanishes at s={s!r}")
    return D_e * (1.0 - (1 + a) * (1 + c) * (s + b) / den)


def potential_V(r: float, params: HylleraasParams) -> float:
    """V(r); V(0) = 0 exactly up to rounding for every valid parameter set."""
    abc = params.abc
    s = s_of_r(r, params.K, params.omega, params.s_sign)
    return potential_from_s(s, abc.a, abc.b, abc.c, params.D_e)


@dataclass(frozen=True)
class AppendixConstants:
    """The full dimensionless constant cascade at a trial energy E.

    All fields follow the defining formulas of the closed-form derivation's
    main chain; `delta_A9` carries the alternative explicit delta expression,
    which disagrees with `delta2` and is kept for the audit.  `lam` here is
    spelled `Lam` to match the audit schema.
    """

    Ebar: float
    Vbar: float
    eps2: float
    betap2: float
    gammap2: float
    beta2: float     # eps2 - betap2, by construction
    gamma2: float    # eps2 - gammap2, by construction
    alpha1: float
    alpha2: float
    alpha3: float
    xi1: float
    xi2: float
    Lam1: float
    Lam2: float
    Lam3: float
    Lam4: float
    delta2: float    # Lam3^2 + 12 Lam1, by construction
    delta_A9: float  # explicit alternative delta (not squared)
    A: float
    B: float
    U2: float        # delta2 * (eps2 + A)^2
    V2: float        # A^2 - B


def appendix_constants(params: HylleraasParams, E: float) -> AppendixConstants:
    """Evaluate every constant of the cascade verbatim at trial energy E."""
    abc = params.abc
    a, b, c = abc.a, abc.b, abc.c
    w2 = params.scale2
    Ebar = E * E - params.M * params.M
    Vbar = 2.0 * params.D_e * (E + params.M)

    eps2 = -2.0 * params.mu * (1 + b) * Ebar / w2
    betap2 = (1 + a) * (1 + c) * Vbar / w2
    gammap2 = (1 + b) * (1 + a) * (1 + c) * Vbar / w2
    beta2 = eps2 - betap2
    gamma2 = eps2 - gammap2

    alpha1 = 1 + b
    alpha2 = 2.0 * alpha1 * (a + c)
    alpha3 = 2.0 * a * c * alpha1
    xi1 = 2.0 * a * alpha1 ** 2 - betap2
    xi2 = a * a * alpha1 ** 2 - gammap2

    Lam1 = alpha2 ** 2 - 8.0 * alpha1 * alpha3
    Lam2 = 2.0 * alpha1 * xi1 - 4.0 * alpha1 ** 2 * alpha3 - 8.0 * alpha1 * xi2
    Lam3 = 2.0 * alpha2 - 4.0 * alpha3 - 8.0 * alpha1
    Lam4 = xi1 ** 2 - 4.0 * alpha1 ** 2 * xi2
    delta2 = Lam3 ** 2 + 12.0 * Lam1
    if delta2 == 0:
        raise DegenerateParams("delta2 vanished; A and B are undefined")
    A = (2.0 * Lam2 * alpha3 + 16.0 * Lam1 * alpha1 ** 2 + 16.0 * Lam1 * xi1) / delta2
    B = (Lam2 ** 2 - 4.0 * Lam1 * Lam4) / delta2

    delta_A9 = 64.0 * (1 + b) ** 2 * (a * (1 - c) - a * (8 * c + 1)
                                      + c * c * (1 - a) + a + 4.0)

    U2 = delta2 * (eps2 + A) ** 2
    V2 = A * A - B
    return AppendixConstants(Ebar=Ebar, Vbar=Vbar, eps2=eps2, betap2=betap2,
                             gammap2=gammap2, beta2=beta2, gamma2=gamma2,
                             alpha1=alpha1, alpha2=alpha2, alpha3=alpha3,
                             xi1=xi1, xi2=xi2, Lam1=Lam1, Lam2=Lam2, Lam3=Lam3,
                             Lam4=Lam4, delta2=delta2, delta_A9=delta_A9,
                             A=A, B=B, U2=U2, V2=V2)


def gamma2_printed(params: HylleraasParams, E: float) -> float:
    """The direct printed form of gamma^2, [2(1+b)E - (1+a)(1+c)Vbar] / scale2.

    Kept separate from AppendixConstants.gamma2 (the by-construction form);
    the audit compares the two numerically.
    """
    abc = params.abc
    Vbar = 2.0 * params.D_e * (E + params.M)
    return (2.0 * (1 + abc.b) * E - (1 + abc.a) * (1 + abc.c) * Vbar) / params.scale2


@dataclass(frozen=True)
class AppendixAForms:
    """Explicit appendix expansions of the cascade, in terms of (a, b, c, Vbar).

    Several of these disagree with the main chain; the verbatim closed-form
    energy route consumes exactly these.
    """

    Lam1_a5: float
    Lam2_a6: float
    Lam3_a7: float
    Lam4_a8: float
    delta_a9: float
    xi1_a10: float
    xi2_a11: float
    gammap2_a12: float
    A_a13: float
    B_a14: float


def appendix_a_forms(params: HylleraasParams, E: float) -> AppendixAForms:
    abc = params.abc
    a, b, c = abc.a, abc.b, abc.c
    w2 = params.scale2
    Vbar = 2.0 * params.D_e * (E + params.M)
    vw = Vbar / w2  # the recurring Vbar/((1+K)^2 w^2) combination

    Lam1_a5 = 4.0 * (1 + b) ** 2 * (a * a - 14.0 * a * c + c * c)
    Lam2_a6 = (4.0 * a * (1 + b) ** 3 * (2 * a - c + 1)
               - 2.0 * (1 + a) * (1 + b) * (1 + c) * (4 * b - 3) * vw)
    Lam3_a7 = 4.0 * (1 + b) * (a + c - 2 * a * c - 2)
    Lam4_a8 = (1 + a) * (1 + c) * vw * (b * (1 + b) ** 2 + (1 + a) * (1 + c) * vw)
    delta_a9 = 64.0 * (1 + b) ** 2 * (a * (1 - c) - a * (8 * c + 1)
                                      + c * c * (1 - a) + a + 4.0)
    xi1_a10 = 2.0 * a * (1 + b) ** 2 - (1 + a) * (1 + c) * vw
    xi2_a11 = a * a * (1 + b) ** 2 - (1 + b) * (1 + a) * (1 + c) * vw
    gammap2_a12 = (1 + b) * (1 + a) * (1 + c) * vw

    # A and B share the printed denominator 1024 (1+b)^2 [..]^2.  The A
    # numerator is transcribed as printed: a single product (no operator
    # appears between its factors), hence A is linear in Vbar.
    dbr = (a * a - a * a * c - 8 * a * c - a + 4.0 - a * c * c - c + c * c)
    den = 1024.0 * (1 + b) ** 2 * dbr ** 2
    if den == 0:
        raise DegenerateParams("appendix A/B denominator vanished")
    p1 = (16 * a ** 3 + 12 * a * a * c - a * a * c * c - 63 * a * a * c
          + 8 * a * a - 12 * a * c + 16 * a * c * c + 8 * c * c)
    p2 = (16 * a * a + 4 * b * c - a * c * c - 64 * a * c + 16 * c * c)
    A_a13 = 2.0 * (1 + b) ** 2 * p1 * ((1 + a) * (1 + c) / w2) * p2 * Vbar / den

    p3 = (2 * a * a * b + 2 * b * c * c - 28 * a * b * c + 4 * a * b - 3 * a)
    p4 = (16 * b * b - 4 * a * a * c * c - 56 * a * c + a - 24 * b)
    B_a14 = (a * (1 + b) ** 4 * (2 * a - c + 1)
             - 2.0 * (1 + b) ** 2 * (1 + c) * vw * p3
             + ((1 + a) * (1 + c) * vw) ** 2 * p4) / den

    return AppendixAForms(Lam1_a5=Lam1_a5, Lam2_a6=Lam2_a6, Lam3_a7=Lam3_a7,
                          Lam4_a8=Lam4_a8, delta_a9=delta_a9, xi1_a10=xi1_a10,
                          xi2_a11=xi2_a11, gammap2_a12=gammap2_a12,
                          A_a13=A_a13, B_a14=B_a14)


def potential_extrema(params: HylleraasParams, r_max: float, n_samples: int = 400,
                      potential=None) -> list[tuple[float, float]]:
    """Stationary points of V on (0, r_max], located from sign changes of a
    central-difference derivative and refined by bisection.

    `potential` may override V(r) for test injection.  Returns [] when V is
    monotone on the sample grid.
    """
    if not (r_max > 0):
        raise ValueError("r_max must be > 0")
    if n_samples < 100:
        raise ValueError("n_samples must be >= 100")
    V = potential if potential is not None else (lambda r: potential_V(r, params))
    # cbrt(eps)-scaled step balances truncation against cancellation noise
    delta = 6e-6 * max(r_max / n_samples, 1.0 / ((1 + params.K) * params.omega))

    def dV(r):
        return (V(r + delta) - V(max(r - delta, 0.0))) / (2.0 * delta)

    h = r_max / n_samples
    rs = [i * h for i in range(1, n_samples + 1)]
    ds = [dV(r) for r in rs]
    vmax = max(abs(V(r)) for r in rs[:: max(1, n_samples // 50)])
    noise = 64.0 * 2.2e-16 * max(vmax, 1e-300) / delta
    tol = max(1e-10 * params.D_e * params.omega, noise) if params.D_e > 0 else max(1e-14, noise)

    out: list[tuple[float, float]] = []
    for i in range(len(rs) - 1):
        d0, d1 = ds[i], ds[i + 1]
        # genuine crossing only: both flanks above the noise floor
        if d0 * d1 >= 0 or max(abs(d0), abs(d1)) <= noise:
            continue
        lo, hi, flo = rs[i], rs[i + 1], d0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            fm = dV(mid)
            if abs(fm) < tol or (hi - lo) < 1e-14 * r_max:
                break
            if flo * fm <= 0:
                hi = mid
            else:
                lo, flo = mid, fm
        r_star = 0.5 * (lo + hi)
        if abs(dV(r_star)) <= tol:
            out.append((r_star, V(r_star)))
    return out
