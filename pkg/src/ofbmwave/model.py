"""Operator fractional Brownian motion: parameters and exact covariances.

The process is ``B(t) = P Y(t)`` where ``Y`` is a time-reversible multivariate
fBm with coordinate exponents ``h_q`` and cross-covariance

    R_ij(s, t) = sigma_ij / 2 * (|s|^H + |t|^H - |t - s|^H),  H = h_i + h_j.

``B`` is then operator self-similar with exponent ``P diag(h) P^{-1}``.
"""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import AdmissibilityError, ValidationError

__all__ = [
    "OfbmSpec",
    "SamplePath",
    "AdmissibilityReport",
    "mfbm_covariance",
    "increment_autocovariance",
    "exact_path_covariance",
    "check_admissibility",
    "spectral_blocks",
    "hurst_matrix_power",
]

PSD_RTOL = 1e-9


def _as_matrix(x, n, name):
    a = np.array(x, dtype=float)
    if a.shape != (n, n):
        raise ValidationError(f"{name} must be {n}x{n}, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} has non-finite entries")
    return a


@dataclass(frozen=True, eq=False)
class OfbmSpec:
    """Generative model: Hurst eigenvalues, mixing matrix and pre-mix covariance.

    ``mixing`` columns are rescaled to unit Euclidean norm (with a warning)
    when they are not already. ``premix_cov`` is the instantaneous covariance
    ``E[Y(1) Y(1)^T]`` of the unmixed coordinates.
    """

    hurst: np.ndarray
    mixing: np.ndarray = None
    premix_cov: np.ndarray = None

    def __post_init__(self):
        h = np.atleast_1d(np.array(self.hurst, dtype=float))
        if h.ndim != 1 or h.size == 0:
            raise ValidationError("hurst must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(h)) or np.any(h <= 0) or np.any(h >= 1):
            raise ValidationError(f"Hurst eigenvalues must lie in (0, 1), got {h.tolist()}")
        n = h.size
        P = np.eye(n) if self.mixing is None else _as_matrix(self.mixing, n, "mixing")
        S = np.eye(n) if self.premix_cov is None else _as_matrix(self.premix_cov, n, "premix_cov")

        norms = np.linalg.norm(P, axis=0)
        if np.any(norms == 0):
            raise ValidationError("mixing matrix has a zero column")
        if np.any(np.abs(norms - 1) > 1e-12):
            warnings.warn("mixing columns rescaled to unit Euclidean norm", stacklevel=3)
            P = P / norms
        if np.linalg.cond(P) > 1e12:
            raise ValidationError("mixing matrix is singular")

        if not np.allclose(S, S.T, rtol=0, atol=1e-12 * max(1.0, np.abs(S).max())):
            raise ValidationError("premix_cov is not symmetric")
        S = (S + S.T) / 2
        if np.any(np.diag(S) <= 0):
            raise ValidationError("premix_cov must have a strictly positive diagonal")
        ev = np.linalg.eigvalsh(S)
        if ev[0] < -PSD_RTOL * ev[-1]:
            raise ValidationError(f"premix_cov is not positive semidefinite (min eigenvalue {ev[0]:.3g})")

        for name, val in (("hurst", h), ("mixing", P), ("premix_cov", S)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @property
    def n(self) -> int:
        return self.hurst.size

    @property
    def hurst_matrix(self) -> np.ndarray:
        return self.mixing @ np.diag(self.hurst) @ np.linalg.inv(self.mixing)

    def exponent_sums(self) -> np.ndarray:
        return self.hurst[:, None] + self.hurst[None, :]

    def theory_conditions(self) -> list[str]:
        """Return the reasons (possibly none) why asymptotic theory may not apply."""
        issues = []
        if np.any(np.isclose(self.hurst, 0.5, rtol=0, atol=1e-12)):
            issues.append("a Hurst eigenvalue equals 1/2")
        if np.unique(self.hurst).size < self.n:
            issues.append("Hurst eigenvalues are not simple")
        return issues

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "hurst": self.hurst.tolist(),
            "mixing": self.mixing.tolist(),
            "premix_cov": self.premix_cov.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "OfbmSpec":
        try:
            hurst = d["hurst"]
        except (KeyError, TypeError):
            raise ValidationError("spec document needs a 'hurst' array") from None
        spec = cls(hurst, d.get("mixing"), d.get("premix_cov"))
        if "n" in d and int(d["n"]) != spec.n:
            raise ValidationError(f"'n'={d['n']} disagrees with len(hurst)={spec.n}")
        return spec

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "OfbmSpec":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"spec is not valid JSON: {exc}") from None
        return cls.from_dict(d)

    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]

    def __eq__(self, other):
        if not isinstance(other, OfbmSpec):
            return NotImplemented
        return (
            np.array_equal(self.hurst, other.hurst)
            and np.array_equal(self.mixing, other.mixing)
            and np.array_equal(self.premix_cov, other.premix_cov)
        )

    def __hash__(self):
        return hash(self.to_json())


@dataclass(frozen=True)
class SamplePath:
    """A discretely observed path; row ``k`` holds ``B(k)``."""

    data: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        a = np.array(self.data, dtype=float)
        if a.ndim == 1:
            a = a[:, None]
        if a.ndim != 2 or a.shape[0] < 2:
            raise ValidationError(f"path must be a (nu, n) array with nu >= 2, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            bad = np.argwhere(~np.isfinite(a))[0]
            raise ValidationError(f"non-finite value at row {bad[0]}, column {bad[1]}")
        a.setflags(write=False)
        object.__setattr__(self, "data", a)

    @property
    def nu(self) -> int:
        return self.data.shape[0]

    @property
    def n(self) -> int:
        return self.data.shape[1]


def mfbm_covariance(hurst_i, hurst_j, sigma_ij, s, t):
    """Cross-covariance ``E[Y_i(s) Y_j(t)]`` of time-reversible multivariate fBm.

    Broadcasts over array arguments.
    """
    args = [np.asarray(a, dtype=float) for a in (hurst_i, hurst_j, sigma_ij, s, t)]
    if not all(np.all(np.isfinite(a)) for a in args):
        raise ValidationError("mfbm_covariance: non-finite input")
    hi, hj, sig, s, t = args
    if np.any((hi <= 0) | (hi >= 1) | (hj <= 0) | (hj >= 1)):
        raise ValidationError("mfbm_covariance: Hurst exponents must lie in (0, 1)")
    H = hi + hj
    out = 0.5 * sig * (np.abs(s) ** H + np.abs(t) ** H - np.abs(t - s) ** H)
    return float(out) if out.ndim == 0 else out


def increment_autocovariance(spec: OfbmSpec, max_lag: int) -> np.ndarray:
    """``gamma[k, i, j] = E[dY_i(m + k) dY_j(m)]`` for ``k = 0..max_lag``.

    Symmetric in ``(i, j)`` and even in ``k`` (time reversibility).
    """
    k = np.arange(max_lag + 1, dtype=float)[:, None, None]
    H = spec.exponent_sums()[None]
    return 0.5 * spec.premix_cov[None] * (
        np.abs(k + 1) ** H - 2 * np.abs(k) ** H + np.abs(k - 1) ** H
    )


def hurst_matrix_power(spec: OfbmSpec, c: float) -> np.ndarray:
    """``c^H = P diag(c^h) P^{-1}``."""
    P = spec.mixing
    return P @ np.diag(c ** spec.hurst) @ np.linalg.inv(P)


def exact_path_covariance(spec: OfbmSpec, times) -> np.ndarray:
    """Joint covariance of ``(B(t_1), ..., B(t_T))`` as a ``(T n, T n)`` matrix.

    Index ``a * n + i`` is coordinate ``i`` at ``times[a]``.
    """
    t = np.asarray(times)
    if t.ndim != 1 or t.size == 0:
        raise ValidationError("times must be a non-empty 1-d sequence")
    if not np.all(np.equal(np.mod(t, 1), 0)) or np.any(t < 0):
        raise ValidationError("times must be nonnegative integers")
    if np.unique(t).size != t.size:
        raise ValidationError("times must be distinct")
    t = t.astype(float)
    n, T = spec.n, t.size
    H = spec.exponent_sums()[None, None]
    ta = t[:, None, None, None]
    tb = t[None, :, None, None]
    R = 0.5 * spec.premix_cov * (np.abs(ta) ** H + np.abs(tb) ** H - np.abs(ta - tb) ** H)
    P = spec.mixing
    C = np.einsum("ik,abkl,jl->aibj", P, R, P).reshape(T * n, T * n)
    C = (C + C.T) / 2

    ev = np.linalg.eigvalsh(C)
    scale = max(abs(ev[-1]), abs(ev[0]))
    if ev[0] < -PSD_RTOL * scale:
        raise AdmissibilityError(
            f"path covariance is not PSD: min eigenvalue {ev[0]:.3e} vs scale {scale:.3e}",
            diagnostic={"min_eigenvalue": float(ev[0]), "max_eigenvalue": float(ev[-1])},
        )
    return C


@dataclass(frozen=True)
class AdmissibilityReport:
    passed: bool
    embed_len: int
    min_eigenvalue: float
    worst_frequency: int
    max_block_norm: float

    def describe(self) -> str:
        return (
            f"embed_len={self.embed_len} min_eig={self.min_eigenvalue:.6e} "
            f"at frequency {self.worst_frequency} (max block norm {self.max_block_norm:.6e})"
        )


def _is_pow2(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


def spectral_blocks(spec: OfbmSpec, embed_len: int) -> np.ndarray:
    """Real symmetric ``(embed_len // 2 + 1, n, n)`` spectral blocks of the
    circulant embedding of the pre-mix increment autocovariance."""
    if not _is_pow2(embed_len) or embed_len < 2:
        raise ValidationError(f"embed_len must be a power of two >= 2, got {embed_len}")
    half = embed_len // 2
    gamma = increment_autocovariance(spec, half)
    # circulant first column: lags 0..half, then half-1..1
    c = np.concatenate([gamma, gamma[-2:0:-1]], axis=0)
    blocks = np.fft.rfft(c, axis=0).real
    return (blocks + blocks.transpose(0, 2, 1)) / 2


def _report(eigs: np.ndarray, embed_len: int) -> AdmissibilityReport:
    mins = eigs[:, 0]
    norms = np.abs(eigs).max(axis=1)
    worst = int(np.argmin(mins))
    max_norm = float(norms.max())
    return AdmissibilityReport(
        passed=bool(mins[worst] >= -PSD_RTOL * max_norm),
        embed_len=embed_len,
        min_eigenvalue=float(mins[worst]),
        worst_frequency=worst,
        max_block_norm=max_norm,
    )


def check_admissibility(spec: OfbmSpec, embed_len: int) -> AdmissibilityReport:
    """Test every spectral block of the circulant embedding for PSD-ness."""
    eigs = np.linalg.eigvalsh(spectral_blocks(spec, embed_len))
    return _report(eigs, embed_len)


def embed_len_for(nu: int) -> int:
    """Smallest power of two >= 2 (nu - 1)."""
    return 1 << max(1, math.ceil(math.log2(max(2 * (nu - 1), 2))))
