"""Poisson and Euler--Maclaurin summation, and closed-form actions.

The Poisson comparison S(g_t) - I(g_t) quantifies how far a lattice sum is
from its integral; for Schwartz g the discrepancy is O(t^inf), while for
g(x) = e^{-t|x|} it carries the Bernoulli series t/6 - ...

The closed-form actions:

  S^3:  L^3 int_R x^2 f - (L/4) int_R f                     (even f),
  T^3:  (1/4 pi^3) L^3 int_{R^3} f(|x|) dx,
  S^4:  (4/3) L^4 int u^3 f - (4/3) L^2 int u f + (11/90) f(0)
        + sum_m c_m L^{-2m} phi^(m)(0),   phi(u) := f(sqrt(u)),

with the c_m exact rationals produced by the Euler--Maclaurin pipeline:
c_1 = -31/1890, c_2 = 41/7560, c_3 = -31/11880 (the constant term 11/90
is c_0 of the same pipeline).  Coefficients beyond c_3 are engine-derived.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .special import bernoulli_number, periodic_bernoulli, riemann_zeta
from .spectra import lattice_sq_counts

__all__ = [
    "RadialSummand",
    "gaussian_summand",
    "exp_abs_summand",
    "poisson_compare",
    "euler_maclaurin",
    "s3_action",
    "t3_action",
    "s4_action",
    "s4_coefficients",
    "s4_constant_term",
    "poly_gauss_derivative",
]


# ---------------------------------------------------------------------------
# Poisson comparison
# ---------------------------------------------------------------------------

@dataclass
class RadialSummand:
    """Radial g with a declared integral and a decreasing radial envelope."""
    fn: Callable[[np.ndarray], np.ndarray]     # of the radius
    integral: Callable[[int], float]           # int_{R^m} g dx
    envelope: Callable[[float], float]         # decreasing bound for r >= 0
    label: str = ""


def gaussian_summand(a: float = 1.0) -> RadialSummand:
    """g(x) = e^{-a |x|^2}."""
    return RadialSummand(
        fn=lambda r: np.exp(-a * np.asarray(r) ** 2),
        integral=lambda m: (math.pi / a) ** (m / 2.0),
        envelope=lambda r: math.exp(-a * r * r),
        label=f"gauss[{a:g}]")


def exp_abs_summand(a: float = 1.0) -> RadialSummand:
    """g(x) = e^{-a |x|};  int over R^m = S_{m-1} (m-1)! / a^m."""
    def integral(m: int) -> float:
        if m == 1:
            return 2.0 / a
        surf = 2.0 * math.pi ** (m / 2.0) / math.gamma(m / 2.0)
        return surf * math.factorial(m - 1) / a ** m

    return RadialSummand(
        fn=lambda r: np.exp(-a * np.asarray(r)),
        integral=integral,
        envelope=lambda r: math.exp(-a * r),
        label=f"expabs[{a:g}]")


def poisson_compare(g: RadialSummand, t: float, m: int,
                    tol: float = 1e-14) -> tuple[float, float, float]:
    """Return (S, I, S - I) with S = sum_{k in Z^m} g(t k), I = t^{-m} F[g](0).

    The lattice sum is truncated when the declared radial envelope bounds the
    tail below tol * |S|.
    """
    if t <= 0:
        raise ValueError("poisson_compare: need t > 0")
    r_sq_max = 64
    while True:
        counts = lattice_sq_counts(m, r_sq_max)
        radii = t * np.sqrt(np.arange(r_sq_max + 1, dtype=float))
        vals = g.fn(radii)
        S = float(np.sum(np.asarray(counts, dtype=float) * vals))
        # tail: shells r^2 > r_sq_max; #points in shell [R, R+1) <= c_m R^{m-1}
        R = math.sqrt(r_sq_max)
        surf = 2.0 * math.pi ** (m / 2.0) / math.gamma(m / 2.0)
        tail = 0.0
        rr = R
        env = g.envelope(t * rr)
        while env > 0.0:
            shell = surf * (rr + 2.0) ** (m - 1) * 1.5 + 2.0 ** m
            tail += shell * env
            rr += 1.0
            env = g.envelope(t * rr)
            if rr > R + 2000:
                tail = math.inf
                break
        if tail <= tol * (abs(S) + 1e-300) or r_sq_max > 4_000_000:
            break
        r_sq_max *= 4
    I = t ** (-m) * g.integral(m)
    return S, I, S - I


# ---------------------------------------------------------------------------
# Euler--Maclaurin
# ---------------------------------------------------------------------------

def _fd_derivative(g: Callable[[float], float], order: int, x: float,
                   h: float | None = None) -> float:
    """Central finite difference of given order (Richardson-free, wide stencil)."""
    if order == 0:
        return g(x)
    if h is None:
        h = 0.02 * max(1.0, abs(x)) * (2.0 ** (order / 3.0))
        h = min(h, 0.35)
    # binomial central difference on an order+1+pad point stencil
    n = order
    acc = 0.0
    for j in range(n + 1):
        acc += (-1.0) ** j * math.comb(n, j) * g(x + (n / 2.0 - j) * h)
    return acc / h ** n


def euler_maclaurin(g: Callable[[float], float], N: int, m: int,
                    derivs: Callable[[int], Callable[[float], float]] | None = None,
                    integral: float | None = None) -> tuple[float, float]:
    """Reconstruct sum_{k=0}^N g(k) from the Euler--Maclaurin formula.

    estimate = int_0^N g + (g(0)+g(N))/2
               + sum_{j=2}^m B_j/j! (g^{(j-1)}(N) - g^{(j-1)}(0))
    with the remainder bound |R_m| <= (2 zeta(m)/(2 pi)^m) int_0^N |g^(m)|
    (valid for m >= 7; returned for any even m >= 2 using the defining
    integral of the periodic Bernoulli remainder otherwise).
    """
    if m < 2 or m % 2 != 0:
        raise ValueError("euler_maclaurin: m must be even and >= 2")

    def dg(j: int) -> Callable[[float], float]:
        if derivs is not None:
            return derivs(j)
        return lambda x, _j=j: _fd_derivative(g, _j, x)

    if integral is None:
        integral, _ = quad(g, 0.0, N, limit=400, epsabs=1e-13, epsrel=1e-12)
    est = integral + 0.5 * (g(0.0) + g(float(N)))
    for j in range(2, m + 1):
        bj = float(bernoulli_number(j))
        if bj == 0.0:
            continue
        dj = dg(j - 1)
        est += bj / math.factorial(j) * (dj(float(N)) - dj(0.0))
    dm = dg(m)
    absint, _ = quad(lambda x: abs(dm(x)), 0.0, N, limit=400,
                     epsabs=1e-12, epsrel=1e-9)
    if m >= 7:
        bound = 2.0 * riemann_zeta(complex(m)).real / (2.0 * math.pi) ** m * absint
    else:
        bmax = max(abs(periodic_bernoulli(m, x)) for x in np.linspace(0, 1, 101))
        bound = bmax / math.factorial(m) * absint
    return est, bound


# ---------------------------------------------------------------------------
# Closed-form actions
# ---------------------------------------------------------------------------

def _as_callable(f):
    return f.evaluate if hasattr(f, "evaluate") else f


def s3_action(f, lam: float) -> float:
    """Leading asymptotics of Tr f(|D|/Lambda) on S^3 (f even):
    Lambda^3 int_R x^2 f(x) dx - (Lambda/4) int_R f(x) dx."""
    fe = _as_callable(f)
    i2, _ = quad(lambda x: x * x * float(fe(x)), 0.0, np.inf, limit=400,
                 epsabs=1e-13, epsrel=1e-12)
    i0, _ = quad(lambda x: float(fe(x)), 0.0, np.inf, limit=400,
                 epsabs=1e-13, epsrel=1e-12)
    return lam ** 3 * 2.0 * i2 - lam / 4.0 * 2.0 * i0


def t3_action(f, lam: float) -> float:
    """(1/4 pi^3) Lambda^3 int_{R^3} f(|x|) dx = (Lambda^3/pi^2) int r^2 f."""
    fe = _as_callable(f)
    i2, _ = quad(lambda r: r * r * float(fe(r)), 0.0, np.inf, limit=400,
                 epsabs=1e-13, epsrel=1e-12)
    return lam ** 3 / math.pi ** 2 * i2


def s4_coefficients(M: int) -> list[Fraction]:
    """Exact c_m, m = 1..M, of the S^4 Euler--Maclaurin pipeline.

    c_m = (4/3) [ (2m+1)!/m! B_{2m+2}/(2m+2)! - (2m+3)!/m! B_{2m+4}/(2m+4)! ],
    multiplying Lambda^{-2m} phi^(m)(0) with phi(u) = f(sqrt(u)).
    """
    out = []
    for mm in range(1, M + 1):
        c = (Fraction(math.factorial(2 * mm + 1), math.factorial(mm))
             * bernoulli_number(2 * mm + 2) / math.factorial(2 * mm + 2)
             - Fraction(math.factorial(2 * mm + 3), math.factorial(mm))
             * bernoulli_number(2 * mm + 4) / math.factorial(2 * mm + 4))
        out.append(Fraction(4, 3) * c)
    return out


def s4_constant_term() -> Fraction:
    """Coefficient of f(0): (4/3)(B_2/2! - 3! B_4/4!) = 11/90."""
    c0 = bernoulli_number(2) / 2 - Fraction(6) * bernoulli_number(4) / 24
    return Fraction(4, 3) * c0


def s4_action(f, lam: float, M_terms: int = 3,
              sqrt_derivs: tuple | None = None) -> float:
    """S^4 action through order Lambda^{-2 M_terms} (f even Schwartz).

    sqrt_derivs[m-1] = phi^(m)(0) with phi(u) = f(sqrt(u)); taken from the
    cutoff when it carries them (Gaussians do).
    """
    fe = _as_callable(f)
    if sqrt_derivs is None:
        sqrt_derivs = tuple(getattr(f, "sqrt_derivs", ()) or ())
        if len(sqrt_derivs) < M_terms:
            raise ValueError("s4_action: need sqrt_derivs up to order M_terms")
    i3, _ = quad(lambda u: u ** 3 * float(fe(u)), 0.0, np.inf, limit=400,
                 epsabs=1e-13, epsrel=1e-12)
    i1, _ = quad(lambda u: u * float(fe(u)), 0.0, np.inf, limit=400,
                 epsabs=1e-13, epsrel=1e-12)
    val = (4.0 / 3.0) * lam ** 4 * i3 - (4.0 / 3.0) * lam ** 2 * i1
    val += float(s4_constant_term()) * float(fe(0.0))
    for mm, c in enumerate(s4_coefficients(M_terms), start=1):
        val += float(c) * lam ** (-2 * mm) * sqrt_derivs[mm - 1]
    return val


# ---------------------------------------------------------------------------
# Exact derivatives for the polynomial x Gaussian family
# ---------------------------------------------------------------------------

def poly_gauss_derivative(coeffs: list[float], a: float, order: int):
    """d^order/dx^order of (sum_j coeffs[j] x^j) e^{-a x^2}, exactly.

    Returns a callable; used for certified Euler--Maclaurin remainder bounds
    in the S^4 pipeline (g(x) = (x^3 - x) f(x/L), Gaussian f).
    """
    c = list(coeffs)
    for _ in range(order):
        # (P e^{-a x^2})' = (P' - 2 a x P) e^{-a x^2}
        dp = [c[j] * j for j in range(1, len(c))]
        new = [0.0] * (len(c) + 1)
        for j, v in enumerate(dp):
            new[j] += v
        for j, v in enumerate(c):
            new[j + 1] -= 2.0 * a * v
        c = new
    poly = np.polynomial.Polynomial(c)

    def fn(x: float) -> float:
        return float(poly(x) * math.exp(-a * x * x))

    return fn
