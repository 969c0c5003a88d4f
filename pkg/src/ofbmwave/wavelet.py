"""Daubechies filter banks and the pyramidal discrete wavelet transform.

Filters are indexed ``k = 0 .. 2N - 1`` and applied by correlation,

    a[j+1, k] = sum_m h[m] a[j, 2k + m],   d[j+1, k] = sum_m g[m] a[j, 2k + m],

keeping only outputs whose support lies inside the available parent
coefficients (no boundary extension). Detail coefficients are returned
normalized as ``2^(-j/2) d[j, k]``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import OctaveError, ValidationError
from .model import SamplePath

__all__ = [
    "WaveletBank",
    "OctaveCoefficients",
    "make_bank",
    "pyramid",
    "octave_counts",
    "deepest_octave",
    "VARIANTS",
]

VARIANTS = ("la", "ep")
MAX_MOMENTS = 10


@dataclass(frozen=True, eq=False)
class WaveletBank:
    n_moments: int
    lowpass: np.ndarray
    highpass: np.ndarray
    variant: str

    @property
    def length(self) -> int:
        return self.lowpass.size


@dataclass(frozen=True, eq=False)
class OctaveCoefficients:
    octave: int
    coeffs: np.ndarray  # (K_j, n), normalized

    @property
    def k_count(self) -> int:
        return self.coeffs.shape[0]


def _halfband_roots(n_moments: int) -> np.ndarray:
    """Roots in ``y = sin^2(w/2)`` of sum_k C(N-1+k, k) y^k."""
    N = n_moments
    coefs = [math.comb(N - 1 + k, k) for k in range(N)]
    if N == 1:
        return np.empty(0, dtype=complex)
    return np.roots(coefs[::-1]).astype(complex)


def _root_groups(n_moments: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per real root / conjugate pair of the half-band factor, the two
    candidate zero sets in ``x = z^-1``: (outside unit circle, inside)."""
    groups = []
    for y in _halfband_roots(n_moments):
        if y.imag < -1e-12:
            continue  # handled with its conjugate
        b = 2 - 4 * y
        disc = np.sqrt(b * b - 4 + 0j)
        x1, x2 = (b + disc) / 2, (b - disc) / 2
        outer, inner = (x1, x2) if abs(x1) > abs(x2) else (x2, x1)
        if abs(y.imag) > 1e-12:
            groups.append((np.array([outer, np.conj(outer)]), np.array([inner, np.conj(inner)])))
        else:
            groups.append((np.array([outer.real]), np.array([inner.real])))
    return groups


def _taps(n_moments: int, zeros: np.ndarray) -> np.ndarray:
    # ascending powers of x = z^-1; np.poly works with descending coefficients
    q = np.poly(zeros) if zeros.size else np.array([1.0])
    q = np.real_if_close(q, tol=1e6).real
    base = np.array([math.comb(n_moments, k) for k in range(n_moments + 1)], dtype=float)
    h = np.convolve(base, q[::-1])
    return h * (math.sqrt(2) / h.sum())


def _phase_nonlinearity(zeros: np.ndarray, grid: np.ndarray) -> float:
    x = np.exp(-1j * grid)
    resp = np.prod(x[:, None] - zeros[None, :], axis=1)
    phase = np.unwrap(np.angle(resp))
    A = np.vstack([np.ones_like(grid), grid]).T
    coef, *_ = np.linalg.lstsq(A, phase, rcond=None)
    return float(np.sum((phase - A @ coef) ** 2))


def make_bank(n_moments: int, variant: str = "la") -> WaveletBank:
    """Orthogonal Daubechies filters with ``n_moments`` vanishing moments.

    ``variant`` is ``"ep"`` (extremal phase) or ``"la"`` (least asymmetric).
    """
    if variant not in VARIANTS:
        raise ValidationError(f"variant must be one of {VARIANTS}, got {variant!r}")
    if int(n_moments) != n_moments or not 1 <= n_moments <= MAX_MOMENTS:
        raise ValidationError(f"n_moments must be an integer in 1..{MAX_MOMENTS}, got {n_moments}")
    N = int(n_moments)
    groups = _root_groups(N)

    if variant == "ep" or not groups:
        zeros = np.concatenate([g[0] for g in groups]) if groups else np.empty(0)
    else:
        grid = np.linspace(0, math.pi, 513)[1:-1]
        best, best_cost = None, math.inf
        for choice in itertools.product((0, 1), repeat=len(groups)):
            zeros = np.concatenate([g[c] for g, c in zip(groups, choice)])
            cost = _phase_nonlinearity(zeros, grid)
            if cost < best_cost * (1 - 1e-9):
                best, best_cost = zeros, cost
        zeros = best

    h = _taps(N, zeros)
    L = h.size
    g = np.array([(-1) ** k * h[L - 1 - k] for k in range(L)])
    h.setflags(write=False)
    g.setflags(write=False)
    return WaveletBank(n_moments=N, lowpass=h, highpass=g, variant=variant)


def _filter_down(a: np.ndarray, f: np.ndarray) -> np.ndarray:
    L = f.size
    K = (a.shape[0] - L) // 2 + 1
    out = np.zeros((K,) + a.shape[1:])
    for m in range(L):
        out += f[m] * a[m : m + 2 * K - 1 : 2]
    return out


def octave_counts(nu: int, filter_len: int, j_max: int) -> list[int]:
    """Retained coefficient counts ``[K_1, ..., K_jmax]`` (0 once exhausted)."""
    counts = []
    a = int(nu)
    for _ in range(j_max):
        a = (a - filter_len) // 2 + 1 if a >= filter_len else 0
        counts.append(a)
    return counts


def pyramid(path: SamplePath | np.ndarray, bank: WaveletBank, j_max: int) -> list[OctaveCoefficients]:
    """Normalized detail coefficients for octaves ``1 .. j_max``."""
    data = path.data if isinstance(path, SamplePath) else np.asarray(path, dtype=float)
    if data.ndim == 1:
        data = data[:, None]
    if j_max < 1:
        raise ValidationError(f"j_max must be >= 1, got {j_max}")
    counts = octave_counts(data.shape[0], bank.length, j_max)
    if counts[-1] < 1:
        deepest = sum(1 for k in counts if k >= 1)
        raise OctaveError(
            f"octave {j_max} has no boundary-free coefficients for nu={data.shape[0]}; "
            f"deepest feasible octave is {deepest}",
            deepest=deepest,
        )
    out = []
    a = data
    for j in range(1, j_max + 1):
        d = _filter_down(a, bank.highpass)
        a = _filter_down(a, bank.lowpass)
        out.append(OctaveCoefficients(octave=j, coeffs=d * 2.0 ** (-j / 2)))
    return out


def deepest_octave(nu: int, bank: WaveletBank, n: int = 1) -> int:
    """Default coarsest octave ``log2(nu) - N``, lowered until ``K_j >= n + 1``."""
    nu = int(nu)
    if nu < 2 ** (bank.n_moments + 1):
        raise OctaveError(f"nu={nu} is too short for {bank.n_moments} vanishing moments")
    j2 = int(math.floor(math.log2(nu))) - bank.n_moments
    counts = octave_counts(nu, bank.length, j2)
    while j2 >= 1 and counts[j2 - 1] < n + 1:
        j2 -= 1
    if j2 < 1:
        raise OctaveError(f"no octave of nu={nu} retains {n + 1} coefficients", deepest=0)
    return j2
