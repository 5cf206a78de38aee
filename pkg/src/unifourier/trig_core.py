"""
Trigonometric polynomials on the circle T = R / 2piZ.

Exact coefficient arithmetic, partial sums, FFT sampling, the Dirichlet,
Fejer and de la Vallee Poussin kernels, Lebesgue constants and certified
sup-norm bounds.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.signal import fftconvolve

from .exceptions import InvalidInput, QuadratureError

TWO_PI = 2.0 * math.pi

# direct product below this many coefficient pairs, FFT convolution above
_DIRECT_CONVOLVE_LIMIT = 1 << 16
_GRID_CHUNK = 1 << 22


def canonical_angle(t):
    """Reduce angle(s) to [0, 2pi)."""
    r = np.mod(np.asarray(t, dtype=float), TWO_PI)
    # mod can return exactly 2pi for tiny negative inputs
    r = np.where(r >= TWO_PI, 0.0, r)
    if r.ndim == 0:
        return float(r)
    return r


def circle_distance(a, b):
    """Geodesic distance on T, in [0, pi]."""
    d = np.abs(canonical_angle(a) - canonical_angle(b))
    d = np.minimum(d, TWO_PI - d)
    if np.ndim(d) == 0:
        return float(d)
    return d


@dataclass(frozen=True)
class CirclePoint:
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", canonical_angle(float(self.angle)))

    def __float__(self):
        return self.angle

    def distance(self, other) -> float:
        return circle_distance(self.angle, float(other))


@dataclass(frozen=True)
class SpectralBand:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise InvalidInput(f"empty band [{self.lo}, {self.hi}]")

    def contains(self, k: int) -> bool:
        return self.lo <= k <= self.hi


@dataclass(frozen=True, eq=False)
class TrigPoly:
    """
    p(t) = sum_{|k| <= d} c_k e^{ikt}.

    Parameters
    ----------
    coeffs : array_like of complex, length 2d+1
        ``coeffs[k + d]`` is the coefficient of ``e^{ikt}``.
    """

    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size % 2 == 0:
            raise InvalidInput("coefficient array must have odd length 2d+1")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # -- construction -------------------------------------------------------

    @classmethod
    def zero(cls) -> "TrigPoly":
        return cls(np.zeros(1, dtype=complex))

    @classmethod
    def constant(cls, c: complex) -> "TrigPoly":
        return cls(np.array([c], dtype=complex))

    @classmethod
    def monomial(cls, k: int, c: complex = 1.0) -> "TrigPoly":
        d = abs(int(k))
        a = np.zeros(2 * d + 1, dtype=complex)
        a[int(k) + d] = c
        return cls(a)

    @classmethod
    def from_dict(cls, table: dict) -> "TrigPoly":
        if not table:
            return cls.zero()
        d = max(abs(int(k)) for k in table)
        a = np.zeros(2 * d + 1, dtype=complex)
        for k, v in table.items():
            a[int(k) + d] += v
        return cls(a)

    @classmethod
    def from_triples(cls, triples: Iterable[Sequence[float]]) -> "TrigPoly":
        """Inverse of :meth:`to_triples`."""
        return cls.from_dict({int(k): complex(re, im) for k, re, im in triples})

    def to_triples(self) -> list[tuple[int, float, float]]:
        """Ordered (k, re, im) triples, k ascending, over -d..d."""
        d = self.degree
        return [(k - d, float(c.real), float(c.imag)) for k, c in enumerate(self.coeffs)]

    # -- basic properties ---------------------------------------------------

    @property
    def degree(self) -> int:
        return (self.coeffs.size - 1) // 2

    @property
    def frequencies(self) -> np.ndarray:
        d = self.degree
        return np.arange(-d, d + 1)

    def coeff(self, k: int) -> complex:
        d = self.degree
        if abs(k) > d:
            return 0j
        return complex(self.coeffs[k + d])

    def band(self) -> SpectralBand:
        nz = np.flatnonzero(self.coeffs)
        if nz.size == 0:
            return SpectralBand(0, 0)
        d = self.degree
        return SpectralBand(int(nz[0]) - d, int(nz[-1]) - d)

    def trim(self, tol: float = 0.0) -> "TrigPoly":
        """Drop leading coefficients with modulus <= tol; result has minimal degree."""
        mag = np.abs(self.coeffs)
        d = self.degree
        keep = np.flatnonzero(mag > tol)
        if keep.size == 0:
            return TrigPoly.zero()
        new_d = int(max(abs(keep[0] - d), abs(keep[-1] - d)))
        return self.pad(new_d) if new_d >= d else TrigPoly(self.coeffs[d - new_d : d + new_d + 1])

    def pad(self, degree: int) -> "TrigPoly":
        d = self.degree
        if degree < d:
            raise InvalidInput("pad cannot lower the degree; use partial_sum")
        extra = degree - d
        return TrigPoly(np.pad(self.coeffs, (extra, extra)))

    def is_real(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.coeffs - np.conj(self.coeffs[::-1])), initial=0.0) <= tol)

    # -- evaluation ---------------------------------------------------------

    def __call__(self, t):
        return evaluate(self, t)

    def sample(self, n_points: int) -> np.ndarray:
        """Values at t_j = 2pi j / N; exact up to FFT roundoff when N >= 2d+1."""
        N = int(n_points)
        d = self.degree
        if N < 2 * d + 1:
            raise InvalidInput(f"grid of {N} points aliases a degree-{d} polynomial")
        buf = np.zeros(N, dtype=complex)
        buf[: d + 1] = self.coeffs[d:]
        if d:
            buf[-d:] = self.coeffs[:d]
        return np.fft.ifft(buf) * N

    # -- arithmetic ---------------------------------------------------------

    def _aligned(self, other: "TrigPoly"):
        d = max(self.degree, other.degree)
        return self.pad(d).coeffs, other.pad(d).coeffs

    def __add__(self, other):
        if not isinstance(other, TrigPoly):
            other = TrigPoly.constant(other)
        a, b = self._aligned(other)
        return TrigPoly(a + b)

    __radd__ = __add__

    def __neg__(self):
        return TrigPoly(-self.coeffs)

    def __sub__(self, other):
        if not isinstance(other, TrigPoly):
            other = TrigPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TrigPoly):
            return multiply(self, other)
        return TrigPoly(self.coeffs * complex(other))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return TrigPoly(self.coeffs / complex(scalar))

    def conj(self) -> "TrigPoly":
        """Pointwise complex conjugate."""
        return TrigPoly(np.conj(self.coeffs[::-1]))

    def real_part(self) -> "TrigPoly":
        return (self + self.conj()) * 0.5

    def allclose(self, other: "TrigPoly", atol: float = 1e-12) -> bool:
        a, b = self._aligned(other)
        return bool(np.max(np.abs(a - b), initial=0.0) <= atol)

    def __repr__(self):
        return f"TrigPoly(degree={self.degree})"


def multiply(p: TrigPoly, q: TrigPoly) -> TrigPoly:
    """Exact product; degree is deg p + deg q."""
    a, b = p.coeffs, q.coeffs
    if a.size * b.size <= _DIRECT_CONVOLVE_LIMIT:
        return TrigPoly(np.convolve(a, b))
    return TrigPoly(fftconvolve(a, b))


def evaluate(p: TrigPoly, t, chunk: int = 1 << 22):
    """
    Evaluate the defining sum at arbitrary angles.

    No sampling is involved, so this doubles as the reference oracle for
    FFT-based paths.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    k = p.frequencies
    out = np.empty(t_arr.shape, dtype=complex)
    flat = t_arr.ravel()
    res = out.reshape(-1)
    step = max(1, chunk // max(k.size, 1))
    for s in range(0, flat.size, step):
        block = flat[s : s + step]
        res[s : s + step] = np.exp(1j * np.outer(block, k)) @ p.coeffs
    if np.ndim(t) == 0:
        return complex(out[0])
    return out


def partial_sum(p: TrigPoly, n: int) -> TrigPoly:
    """Keep exactly the coefficients with |k| <= n."""
    n = int(n)
    if n < 0:
        raise InvalidInput("partial sum order must be nonnegative")
    d = p.degree
    if n >= d:
        return p
    return TrigPoly(p.coeffs[d - n : d + n + 1])


def partial_sum_at(p: TrigPoly, n: int, t):
    """(s_n p)(t) without materializing the truncated polynomial twice."""
    return evaluate(partial_sum(p, n), t)


def modulate(p: TrigPoly, K: int) -> TrigPoly:
    """e^{iKt} p(t)."""
    K = int(K)
    d = p.degree
    new_d = d + abs(K)
    a = np.zeros(2 * new_d + 1, dtype=complex)
    start = new_d - d + K
    a[start : start + 2 * d + 1] = p.coeffs
    return TrigPoly(a)


def translate(p: TrigPoly, t0: float) -> TrigPoly:
    """t -> p(t - t0)."""
    return TrigPoly(p.coeffs * np.exp(-1j * p.frequencies * float(t0)))


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of a function on T at t_j = 2pi j / N, N a power of two."""

    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        s = np.array(self.samples, dtype=complex).ravel()
        N = s.size
        if N < 2 or N & (N - 1):
            raise InvalidInput(f"grid size must be a power of two >= 2, got {N}")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def size(self) -> int:
        return self.samples.size

    @property
    def nodes(self) -> np.ndarray:
        return TWO_PI * np.arange(self.size) / self.size

    @classmethod
    def from_callable(cls, fn: Callable, size: int) -> "GridFunction":
        t = TWO_PI * np.arange(size) / size
        return cls(np.asarray(fn(t), dtype=complex) * np.ones(size))

    @classmethod
    def from_poly(cls, p: TrigPoly, size: int) -> "GridFunction":
        return cls(p.sample(size))

    def sup(self) -> float:
        return float(np.max(np.abs(self.samples)))


def fourier_coeffs(f: GridFunction) -> TrigPoly:
    """
    Discrete Fourier coefficients for |k| <= N/2 - 1.

    Exact for trigonometric polynomials with 2d+1 <= N; otherwise frequencies
    at or above N/2 alias into the table.
    """
    N = f.size
    c = np.fft.fft(f.samples) / N
    d = N // 2 - 1
    return TrigPoly(np.concatenate([c[N - d :], c[: d + 1]]))


# -- kernels --------------------------------------------------------------------


def dirichlet_kernel(n: int) -> TrigPoly:
    if n < 0:
        raise InvalidInput("Dirichlet kernel order must be nonnegative")
    return TrigPoly(np.ones(2 * int(n) + 1, dtype=complex))


def dirichlet_eval(n: int, t, singular_tol: float = 1e-8):
    """
    Closed form sin((n + 1/2) t) / sin(t / 2).

    The removable singularity at t = 0 (mod 2pi) is branched to 2n+1 when
    |sin(t/2)| < singular_tol.
    """
    t_arr = np.asarray(t, dtype=float)
    half = np.sin(t_arr / 2.0)
    near = np.abs(half) < singular_tol
    safe = np.where(near, 1.0, half)
    val = np.where(near, 2.0 * n + 1.0, np.sin((n + 0.5) * t_arr) / safe)
    if val.ndim == 0:
        return float(val)
    return val


def _fejer_weights(degree: int, m: int) -> np.ndarray:
    k = np.abs(np.arange(-degree, degree + 1))
    return np.clip(1.0 - k / (m + 1.0), 0.0, None)


def fejer_mean(p, m: int) -> TrigPoly:
    """
    sigma_m: coefficient k scaled by (1 - |k|/(m+1)), degree <= m.

    Accepts a TrigPoly or a GridFunction; for grid input the weights are
    applied to the discrete coefficients, which keeps the result a positive
    average of the samples as long as m < N.
    """
    if m < 0:
        raise InvalidInput("Fejer order must be nonnegative")
    if isinstance(p, GridFunction):
        if m >= p.size:
            raise InvalidInput("Fejer order must be below the grid size")
        p = fourier_coeffs(p)
    q = partial_sum(p, m)
    return TrigPoly(q.coeffs * _fejer_weights(q.degree, m))


def vallee_poussin_mean(p, m: int) -> TrigPoly:
    """V_m = 2 sigma_{2m+1} - sigma_m; reproduces polynomials of degree <= m+1."""
    a = fejer_mean(p, 2 * m + 1)
    b = fejer_mean(p, m)
    return a * 2.0 - b


# -- Lebesgue constants ---------------------------------------------------------

_GL_LOW = np.polynomial.legendre.leggauss(10)
_GL_HIGH = np.polynomial.legendre.leggauss(20)


def _gauss(fn, a, b, rule):
    x, w = rule
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    pts = mid[:, None] + half[:, None] * x[None, :]
    return half * (fn(pts) @ w)


def _adaptive_pieces(fn, a, b, tol, max_subdivisions):
    """Integrate fn over the union of [a_i, b_i]; pieces where the 10- and 20-point
    Gauss rules disagree by more than their length share of tol are bisected."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    density = tol / float(np.sum(b - a))
    total = 0.0
    splits = 0
    while a.size:
        lo = _gauss(fn, a, b, _GL_LOW)
        hi = _gauss(fn, a, b, _GL_HIGH)
        ok = np.abs(hi - lo) <= density * (b - a)
        total += float(np.sum(hi[ok]))
        a, b = a[~ok], b[~ok]
        splits += a.size
        if splits > max_subdivisions:
            raise QuadratureError(f"adaptive quadrature exceeded {max_subdivisions} subdivisions")
        mid = 0.5 * (a + b)
        a, b = np.concatenate([a, mid]), np.concatenate([mid, b])
    return total


def step_function_coeffs(values, degree: int) -> TrigPoly:
    """
    Exact Fourier coefficients, |k| <= degree, of the step function equal to
    values[j] on [2pi j/L, 2pi (j+1)/L).

    c_k = (1 - e^{-2pi i k/L}) / (2pi i k) * V[k mod L] with V the DFT of the
    values, so the cost is one length-L FFT regardless of the degree.
    """
    v = np.asarray(values, dtype=complex)
    L = v.size
    V = np.fft.fft(v)
    k = np.arange(-degree, degree + 1)
    c = np.empty(k.size, dtype=complex)
    nz = k != 0
    kk = k[nz].astype(float)
    c[nz] = (1.0 - np.exp(-2j * math.pi * kk / L)) / (2j * math.pi * kk) * V[np.mod(k[nz], L)]
    c[~nz] = V[0] / L
    return TrigPoly(c)


@functools.lru_cache(maxsize=512)
def lebesgue_constant(n: int, tol: float = 1e-8, max_subdivisions: int = 100_000) -> float:
    """
    L_n = (1/2pi) int_T |D_n(t)| dt.

    Composite Gauss-Legendre on the lobes of D_n over [0, pi] (split at its n
    zeros 2pi j / (2n+1)), with bisection wherever the 10- and 20-point rules
    disagree by more than the local tolerance share.
    """
    n = int(n)
    if n < 0:
        raise InvalidInput("Lebesgue constant order must be nonnegative")
    if n == 0:
        return 1.0
    zeros = TWO_PI * np.arange(1, n + 1) / (2 * n + 1)
    edges = np.concatenate([[0.0], zeros, [math.pi]])

    def integrand(t):
        return np.abs(dirichlet_eval(n, t))

    # even integrand: (1/2pi) * 2 * int_0^pi
    return _adaptive_pieces(integrand, edges[:-1], edges[1:], tol * math.pi, max_subdivisions) / math.pi


# -- certified sup norm ---------------------------------------------------------


def max_modulus_on_grid(p: TrigPoly, N: int, chunk: int = _GRID_CHUNK) -> float:
    """
    max_j |p(2pi j / N)|.

    For N above ``chunk`` the grid is split into R = N / M cosets
    {2pi (R l + r) / N}; each coset is one length-M FFT of the coefficients
    twisted by e^{2pi i k r / N} and folded mod M, so memory stays O(M).
    """
    N = int(N)
    d = p.degree
    if d == 0:
        return float(abs(p.coeffs[0]))
    if N <= chunk or N % 2:
        return float(np.max(np.abs(p.sample(N))))
    M = 1 << int(math.ceil(math.log2(max(chunk, 2 * d + 1))))
    while N % M:
        M //= 2
    if M < 2 * d + 1:
        return float(np.max(np.abs(p.sample(N))))
    R = N // M
    k = p.frequencies
    idx = np.mod(k, M)
    best = 0.0
    for r in range(R):
        tw = p.coeffs * np.exp(2j * math.pi * k * r / N)
        buf = np.bincount(idx, tw.real, M) + 1j * np.bincount(idx, tw.imag, M)
        best = max(best, float(np.max(np.abs(np.fft.ifft(buf) * M))))
    return best


def certified_sup_norm(p: TrigPoly, oversample: int = 64, bound: str = "quadratic"):
    """
    Two-sided enclosure lower <= ||p||_inf <= upper.

    ``lower`` is the maximum modulus over N = oversample * max(deg, 1) uniform
    samples, less an FFT roundoff guard. Every point of T lies within h = pi/N
    of a node.

    bound="linear" uses |p'| <= d ||p|| directly: upper = lower / (1 - d h).
    bound="quadratic" (default) applies Bernstein twice to the real part of
    e^{-i arg p(t*)} p at a maximizer t*, where the derivative vanishes:
    upper = lower / (1 - (d h)^2 / 2).
    """
    if oversample < 8:
        raise InvalidInput("oversample must be at least 8")
    d = p.degree
    N = int(oversample) * max(d, 1)
    if N > _GRID_CHUNK:
        # large grids are swept coset by coset, which needs a power of two
        N = 1 << int(math.ceil(math.log2(N)))
    if N <= math.pi * d:
        raise InvalidInput("grid too coarse for the Bernstein correction")
    peak = max_modulus_on_grid(p, N)
    if d == 0:
        return peak, peak
    x = d * math.pi / N
    if bound == "linear":
        factor = 1.0 - x
    elif bound == "quadratic":
        factor = 1.0 - 0.5 * x * x
    else:
        raise InvalidInput(f"unknown bound {bound!r}")
    # FFT roundoff guard, applied on both sides
    guard = 8.0 * np.finfo(float).eps * math.log2(N) * float(np.sum(np.abs(p.coeffs)))
    return max(peak - guard, 0.0), (peak + guard) / factor
