"""Eigenvalue/multiplicity sequences for the catalog of spectral triples.

A `Spectrum` is a lazily generated, strictly increasing sequence of
(singular value, multiplicity) pairs together with metadata: the summability
dimension p, the kernel dimension, and a tail model used by the summation
engine to certify truncations.

Catalog:
  * round spheres S^d (trivial/nontrivial spin for d = 1),
  * flat tori T^d with any of the 2^d spin structures,
  * noncommutative tori T^d_Theta (spectrum is Theta-independent),
  * standard Podles spheres (full D_q and simplified D_q^S),
plus a JSON-lines loader for externally supplied spectra.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

import numpy as np

from .special import q_number

__all__ = [
    "SpectrumEntry",
    "SpectrumMeta",
    "PodlesParams",
    "Spectrum",
    "PolynomialTail",
    "ExponentialTail",
    "LogSquareTail",
    "sphere_spectrum",
    "torus_spectrum",
    "nctorus_spectrum",
    "podles_spectrum",
    "podles_diag_A",
    "load_spectrum_jsonl",
    "save_spectrum_jsonl",
    "lattice_sq_counts",
    "shifted_lattice_sq4_counts",
]


@dataclass(frozen=True)
class SpectrumEntry:
    value: float
    mult: int


@dataclass(frozen=True)
class PolynomialTail:
    """Counting-function bound N(L) <= coeff * (offset + L)^power."""
    coeff: float
    power: float
    offset: float = 1.0


@dataclass(frozen=True)
class ExponentialTail:
    """Geometric tails: sup_{m>=n} M_{m+1}/M_m and inf_{m>=n} of gaps/ratios.

    `mult_ratio_sup(n)` bounds the multiplicity growth from index n on,
    `gap_inf(n)` the additive gap mu_{n+1}-mu_n, and `value_ratio_inf(n)`
    the multiplicative gap mu_{n+1}/mu_n.
    """
    mult_ratio_sup: Callable[[int], float]
    gap_inf: Callable[[int], float]
    value_ratio_inf: Callable[[int], float]


@dataclass(frozen=True)
class LogSquareTail:
    """mu_n = ln^2(n + shift), M_n = 1: heat tails via u = ln x substitution."""
    shift: float = 2.0


@dataclass(frozen=True)
class SpectrumMeta:
    dimension_p: float
    kernel_dim: int
    label: str
    tail: object | None = None  # PolynomialTail | ExponentialTail | LogSquareTail


class Spectrum:
    """Lazy strictly-increasing (value, mult) sequence with metadata.

    `heat0_closed`, when set by a factory, is an exact closed form of the
    kernel-free heat trace sum_n' M_n e^{-t mu_n} (e.g. the binomial
    generating function of sphere multiplicities); it lets quadratures reach
    arbitrarily small t.
    """

    def __init__(self, meta: SpectrumMeta, factory: Callable[[], Iterator[SpectrumEntry]],
                 heat0_closed: Callable[[float], float] | None = None):
        self.meta = meta
        self._factory = factory
        self.heat0_closed = heat0_closed

    def entries(self) -> Iterator[SpectrumEntry]:
        return self._factory()

    def __iter__(self) -> Iterator[SpectrumEntry]:
        return self._factory()

    def take(self, n: int) -> list[SpectrumEntry]:
        out = []
        for e in self._factory():
            out.append(e)
            if len(out) >= n:
                break
        return out

    def squared(self) -> "Spectrum":
        """Spectrum of D^2: singular values squared, dimension halved."""
        meta = self.meta
        tail = meta.tail
        if isinstance(tail, PolynomialTail):
            # N_sq(L) = N(sqrt(L)) <= coeff (offset + sqrt(L))^power
            tail = PolynomialTail(tail.coeff, tail.power / 2.0,
                                  offset=(tail.offset + 1.0) ** 2)
        elif isinstance(tail, ExponentialTail):
            base = tail

            def gap_inf(n: int, _b=base, _f=self._factory) -> float:
                # (mu_{n+1}^2 - mu_n^2) >= gap * (mu_{n+1} + mu_n) >= gap * 2 mu_n
                it = _f()
                mu = None
                for i, e in enumerate(it):
                    if i == n:
                        mu = e.value
                        break
                g = _b.gap_inf(n)
                return g * 2.0 * (mu if mu is not None else 0.0)

            tail = ExponentialTail(
                mult_ratio_sup=base.mult_ratio_sup,
                gap_inf=gap_inf,
                value_ratio_inf=lambda n, _b=base: _b.value_ratio_inf(n) ** 2,
            )
        new_meta = SpectrumMeta(meta.dimension_p / 2.0, meta.kernel_dim,
                                meta.label + "^2", tail)
        fac = self._factory

        def gen() -> Iterator[SpectrumEntry]:
            for e in fac():
                yield SpectrumEntry(e.value * e.value, e.mult)

        return Spectrum(new_meta, gen)


@dataclass(frozen=True)
class PodlesParams:
    q: float
    w: complex
    u: float = field(init=False)
    kappa: complex = field(init=False)

    def __post_init__(self):
        if not (0.0 < self.q < 1.0):
            raise ValueError("PodlesParams: need 0 < q < 1")
        if self.w == 0:
            raise ValueError("PodlesParams: need w != 0")
        object.__setattr__(self, "u", abs(self.w) * self.q / (1.0 - self.q ** 2))
        object.__setattr__(self, "kappa", 2j * math.pi / math.log(self.q))


# ---------------------------------------------------------------------------
# Spheres
# ---------------------------------------------------------------------------

def sphere_spectrum(d: int, spin: str = "nontrivial", n_max: int | None = None) -> Spectrum:
    """Dirac spectrum of the round S^d.

    For d >= 2 (or nontrivial spin on S^1): mu_n = n + d/2 with multiplicity
    2^{floor(d/2)+1} C(n+d-1, d-1).  Trivial spin on S^1: mu_n = n (n >= 1)
    with multiplicity 2 and a one-dimensional kernel.
    """
    if d < 1:
        raise ValueError("sphere_spectrum: need d >= 1")
    if spin not in ("trivial", "nontrivial"):
        raise ValueError(f"sphere_spectrum: unknown spin {spin!r}")
    if spin == "trivial" and d != 1:
        raise ValueError("sphere_spectrum: trivial spin only on S^1")
    if d == 1 and spin == "trivial":
        meta = SpectrumMeta(
            1.0, 1, "S^1 (trivial spin)",
            tail=PolynomialTail(coeff=2.0, power=1.0, offset=1.0))

        def gen() -> Iterator[SpectrumEntry]:
            n = 1
            while n_max is None or n <= n_max:
                yield SpectrumEntry(float(n), 2)
                n += 1

        def heat0(t: float) -> float:
            # 2 sum_{n>=1} e^{-tn} = 2 e^{-t}/(1 - e^{-t})
            return 2.0 / math.expm1(t)

        return Spectrum(meta, gen, heat0_closed=heat0)

    m = 2 ** (d // 2 + 1)
    # N(L): total count up to n = L - d/2 is m * C(n+d, d) <= (m/d!) (L + d)^d
    coeff = m * (1.0 + d) ** d / math.factorial(d)
    meta = SpectrumMeta(float(d), 0, f"S^{d}",
                        tail=PolynomialTail(coeff=coeff, power=float(d), offset=float(d)))

    def gen() -> Iterator[SpectrumEntry]:
        n = 0
        while n_max is None or n <= n_max:
            yield SpectrumEntry(n + d / 2.0, m * math.comb(n + d - 1, d - 1))
            n += 1

    def heat0(t: float) -> float:
        # m sum_n C(n+d-1, d-1) e^{-t(n + d/2)} = m e^{-td/2} (1-e^{-t})^{-d}
        return m * math.exp(-t * d / 2.0) * (-math.expm1(-t)) ** (-d)

    return Spectrum(meta, gen, heat0_closed=heat0)


# ---------------------------------------------------------------------------
# Lattice helpers (exact integer grouping of |k|^2)
# ---------------------------------------------------------------------------

def lattice_sq_counts(d: int, m_max: int) -> np.ndarray:
    """r_d(m) = #{k in Z^d : |k|^2 = m}, m = 0..m_max, via convolution.

    FFT convolution for large ranges; counts are small integers so the
    rounding is exact far beyond the ranges used here.
    """
    r1 = np.zeros(m_max + 1, dtype=np.int64)
    r1[0] = 1
    n = 1
    while n * n <= m_max:
        r1[n * n] = 2
        n += 1
    out = r1.copy()
    big = m_max > 20000
    if big:
        from scipy.signal import fftconvolve
    for _ in range(d - 1):
        if big:
            conv = fftconvolve(out.astype(float), r1.astype(float))[: m_max + 1]
            out = np.rint(conv).astype(np.int64)
        else:
            out = np.convolve(out, r1)[: m_max + 1]
    return out


def shifted_lattice_sq4_counts(d: int, s_bits: tuple[int, ...], m_max4: int) -> np.ndarray:
    """Counts of 4|k + s/2|^2 = |2k + s|^2 over k in Z^d, values 0..m_max4.

    Component j ranges over even integers (s_j = 0) or odd integers (s_j = 1);
    exact integer grouping of the shifted lattice norms.
    """
    out = np.zeros(m_max4 + 1, dtype=np.int64)
    out[0] = 1
    for sj in s_bits:
        r = np.zeros(m_max4 + 1, dtype=np.int64)
        n = sj
        while n * n <= m_max4:
            r[n * n] = 1 if n == 0 else 2
            n += 2
        out = np.convolve(out, r)[: m_max4 + 1]
    return out


def _lattice_tail(d: int, two_pi: bool) -> PolynomialTail:
    # N(L) <= 2^{floor(d/2)} * #(ball of radius L/(2pi) + diam) * margin
    scale = 2.0 * math.pi if two_pi else 1.0
    vol_d = math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)
    mult = 2 ** (d // 2)
    return PolynomialTail(coeff=mult * vol_d / scale ** d, power=float(d),
                          offset=scale * (math.sqrt(d) + 1.0))


def torus_spectrum(d: int, spin: tuple[int, ...] | None = None,
                   radius_cut: float = 10.0) -> Spectrum:
    """Dirac spectrum of the flat T^d with spin structure s in {0,1}^d.

    Singular values 2 pi |k + s/2| over k in Z^d with |k + s/2| <= radius_cut;
    each lattice point carries multiplicity 2^{floor(d/2)} (both signs
    combined); the kernel has dimension 2^{floor(d/2)} iff s = 0.
    """
    if radius_cut <= 0:
        raise ValueError("torus_spectrum: need radius_cut > 0")
    s_bits = tuple(int(b) for b in (spin if spin is not None else (0,) * d))
    if len(s_bits) != d or any(b not in (0, 1) for b in s_bits):
        raise ValueError("torus_spectrum: spin must be a d-bit vector")
    mult = 2 ** (d // 2)
    trivial = all(b == 0 for b in s_bits)
    kernel = mult if trivial else 0
    m_max4 = int(math.ceil(4.0 * radius_cut * radius_cut)) + 1
    counts = shifted_lattice_sq4_counts(d, s_bits, m_max4)
    meta = SpectrumMeta(float(d), kernel, f"T^{d} spin {''.join(map(str, s_bits))}",
                        tail=_lattice_tail(d, two_pi=True))

    def gen() -> Iterator[SpectrumEntry]:
        for m4 in range(1, m_max4 + 1):
            c = int(counts[m4])
            if c == 0:
                continue
            val = 2.0 * math.pi * 0.5 * math.sqrt(m4)
            if val > 2.0 * math.pi * radius_cut + 1e-12:
                return
            yield SpectrumEntry(val, c * mult)

    return Spectrum(meta, gen)


def nctorus_spectrum(d: int, radius_cut: float = 10.0) -> Spectrum:
    """|D| spectrum of the noncommutative torus: |k| over Z^d, Theta-independent.

    Multiplicity 2^{floor(d/2)} per lattice point; kernel dim 2^{floor(d/2)}.
    """
    if radius_cut <= 0:
        raise ValueError("nctorus_spectrum: need radius_cut > 0")
    mult = 2 ** (d // 2)
    m_max = int(math.ceil(radius_cut * radius_cut)) + 1
    counts = lattice_sq_counts(d, m_max)
    meta = SpectrumMeta(float(d), mult, f"T^{d}_Theta",
                        tail=_lattice_tail(d, two_pi=False))

    def gen() -> Iterator[SpectrumEntry]:
        for m in range(1, m_max + 1):
            c = int(counts[m])
            if c == 0:
                continue
            val = math.sqrt(m)
            if val > radius_cut + 1e-12:
                return
            yield SpectrumEntry(val, c * mult)

    return Spectrum(meta, gen)


# ---------------------------------------------------------------------------
# Podles spheres
# ---------------------------------------------------------------------------

def podles_spectrum(params: PodlesParams, simplified: bool = False,
                    n_max: int | None = None) -> Spectrum:
    """Singular values of the Podles Dirac operators, multiplicity 4(n+1).

    Full D_q:        mu_n = |w| [n+1]   with [x] the q-number,
    simplified D_q^S: mu_n = u q^{-(n+1)} = |w| q^{-n} / (1-q^2),
    so that mu_n(D_q) = mu_n^S - u^2 / mu_n^S.  Both are 0-dimensional.
    """
    q, u, aw = params.q, params.u, abs(params.w)

    def mu(n: int) -> float:
        if simplified:
            return u * q ** (-(n + 1))
        return aw * q_number(n + 1, q)

    def mult_ratio_sup(n: int) -> float:
        return (n + 2) / (n + 1)

    def gap_inf(n: int) -> float:
        return mu(n + 1) - mu(n)

    def value_ratio_inf(n: int) -> float:
        return mu(n + 1) / mu(n)

    tail = ExponentialTail(mult_ratio_sup, gap_inf, value_ratio_inf)
    label = f"Podles q={q} ({'D_q^S' if simplified else 'D_q'})"
    meta = SpectrumMeta(0.0, 0, label, tail=tail)

    def gen() -> Iterator[SpectrumEntry]:
        n = 0
        while n_max is None or n <= n_max:
            v = mu(n)
            if math.isinf(v):
                return
            yield SpectrumEntry(v, 4 * (n + 1))
            n += 1

    return Spectrum(meta, gen)


def _alpha0(params: PodlesParams, l: float, sign: int) -> float:
    q = params.q
    qn = lambda x: q_number(x, q)
    if sign > 0:
        num = (q - 1.0 / q) * qn(l - 0.5) * qn(l + 1.5) + q
    else:
        num = (q - 1.0 / q) * qn(l - 0.5) * qn(l + 1.5) - 1.0 / q
    return num / (math.sqrt(q) * qn(2 * l) * qn(2 * l + 2))


def podles_diag_A(params: PodlesParams, l: float, sign: int = +1,
                  return_terms: bool = False):
    """Sum over m of the diagonal coefficients A^0_{l,m,+/-} of pi_{+/-}(A).

    l must be a positive half-integer; the diagonal coefficients follow the
    equivariant-representation formulas

        A^0_{l,m} = q^{-1/2}/(1+q^2) ([l-m+1][l+m] - q^2 [l-m][l+m+1]) a^0_l
                    + 1/(1+q^2),

    with a^0_l depending on the representation sign.
    """
    if abs(2 * l - round(2 * l)) > 1e-12 or round(2 * l) % 2 == 0 or l <= 0:
        raise ValueError("podles_diag_A: l must be in N + 1/2")
    q = params.q
    a0 = _alpha0(params, l, sign)
    qn = lambda x: q_number(x, q)
    pref = q ** (-0.5) / (1.0 + q * q)
    const = 1.0 / (1.0 + q * q)
    total = 0.0
    terms = []
    m = -l
    while m <= l + 1e-9:
        val = pref * (qn(l - m + 1) * qn(l + m) - q * q * qn(l - m) * qn(l + m + 1)) * a0 \
            + const
        total += val
        if return_terms:
            terms.append(val)
        m += 1.0
    if return_terms:
        return total, terms
    return total


# ---------------------------------------------------------------------------
# External JSON-lines interface
# ---------------------------------------------------------------------------

def load_spectrum_jsonl(path: str) -> Spectrum:
    """Load a spectrum from JSON lines.

    First line is a header object {"p": float, "kernel": int, "label": str};
    each following line is {"value": float, "mult": int}.  Values must be
    strictly increasing with positive integer multiplicities.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in (l.strip() for l in fh) if ln]
    if not lines:
        raise ValueError("load_spectrum_jsonl: empty file")
    header = json.loads(lines[0])
    for key in ("p", "kernel", "label"):
        if key not in header:
            raise ValueError(f"load_spectrum_jsonl: header missing {key!r}")
    entries: list[SpectrumEntry] = []
    prev = 0.0
    for i, ln in enumerate(lines[1:], start=2):
        row = json.loads(ln)
        v, mlt = float(row["value"]), int(row["mult"])
        if v <= 0:
            raise ValueError(f"load_spectrum_jsonl: line {i}: value must be > 0")
        if entries and v <= prev:
            raise ValueError(f"load_spectrum_jsonl: line {i}: values must be strictly increasing")
        if mlt < 1:
            raise ValueError(f"load_spectrum_jsonl: line {i}: mult must be >= 1")
        entries.append(SpectrumEntry(v, mlt))
        prev = v
    meta = SpectrumMeta(float(header["p"]), int(header["kernel"]),
                        str(header["label"]), tail=None)
    return Spectrum(meta, lambda: iter(entries))


def save_spectrum_jsonl(path: str, spectrum: Spectrum, n: int) -> None:
    meta = spectrum.meta
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"p": meta.dimension_p, "kernel": meta.kernel_dim,
                             "label": meta.label}) + "\n")
        for e in spectrum.take(n):
            fh.write(json.dumps({"value": e.value, "mult": e.mult}) + "\n")


def merge_close_values(pairs: Iterable[tuple[float, int]],
                       rel_tol: float = 1e-12) -> list[SpectrumEntry]:
    """Group a sorted (value, mult) stream, merging values within rel_tol."""
    out: list[SpectrumEntry] = []
    for v, mlt in pairs:
        if out and abs(v - out[-1].value) <= rel_tol * max(1.0, abs(v)):
            out[-1] = SpectrumEntry(out[-1].value, out[-1].mult + mlt)
        else:
            out.append(SpectrumEntry(v, mlt))
    return out
