"""Wavelet eigenvalue regression and the univariate-like baseline.

For octaves ``j1..j2`` and weights with ``sum w_j = 0`` and ``sum j w_j = 1``,

    h_q   = 1/2 sum_j w_j log2 lambda_q(W(2^j))     (multivariate)
    h^U_q = 1/2 sum_j w_j log2 W(2^j)_qq            (univariate-like)

Eigenvalues are matched to Hurst eigenvalues purely by ascending order.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import NumericalError, ValidationError
from .model import SamplePath
from .spectrum import WaveletSpectrum, analyze_path
from .wavelet import WaveletBank, deepest_octave

__all__ = [
    "RegressionWeights",
    "HurstEstimates",
    "make_weights",
    "confidence_scalars",
    "estimate_multivariate",
    "estimate_univariate",
    "estimate",
    "median_estimate",
    "estimate_path",
    "interleave_split",
    "resolve_weights",
    "DEFAULT_J1",
    "SCHEMA_VERSION",
]

DEFAULT_J1 = 6
SCHEMA_VERSION = 1
B_POLICIES = ("nu-over-2j", "uniform")


@dataclass(frozen=True, eq=False)
class RegressionWeights:
    j1: int
    j2: int
    b: np.ndarray
    w: np.ndarray

    @property
    def octaves(self) -> np.ndarray:
        return np.arange(self.j1, self.j2 + 1)

    def fit_line(self, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Weighted least-squares (intercept, slope) of ``y[j, ...]`` on ``j``."""
        j = self.octaves.astype(float)
        slope = np.tensordot(self.w, y, axes=(0, 0))
        intercept = (np.tensordot(self.b, y, axes=(0, 0)) - slope * (self.b @ j)) / self.b.sum()
        return intercept, slope


def make_weights(j1: int, j2: int, b: Sequence[float]) -> RegressionWeights:
    """``w_j = b_j (V0 j - V1) / (V0 V2 - V1^2)`` with ``Vp = sum_j j^p b_j``."""
    j1, j2 = int(j1), int(j2)
    if j2 <= j1:
        raise ValidationError(f"need j2 > j1, got j1={j1}, j2={j2}")
    b = np.asarray(b, dtype=float)
    if b.shape != (j2 - j1 + 1,):
        raise ValidationError(f"b must have {j2 - j1 + 1} entries for octaves {j1}..{j2}, got {b.size}")
    if not np.all(np.isfinite(b)) or np.any(b < 0):
        raise ValidationError("confidence scalars b_j must be finite and nonnegative")
    if np.count_nonzero(b) < 2:
        raise ValidationError("at least two b_j must be positive")
    j = np.arange(j1, j2 + 1, dtype=float)
    # centred form of the same expression: dividing numerator and denominator
    # by V0 gives w_j = b_j (j - jbar) / sum_i b_i (i - jbar)^2, jbar = V1/V0,
    # which avoids the cancellation in V0*V2 - V1^2 for badly scaled b
    V0 = b.sum()
    dev = j - (b @ j) / V0
    dev -= (b @ dev) / V0
    den = b @ dev**2
    if not den > 0:
        raise ValidationError(f"degenerate regression design: V0*V2 - V1^2 = {den * V0}")
    w = b * dev / den
    b.setflags(write=False)
    w.setflags(write=False)
    return RegressionWeights(j1=j1, j2=j2, b=b, w=w)


def confidence_scalars(policy: str, j1: int, j2: int, nu: int | None = None) -> np.ndarray:
    j = np.arange(j1, j2 + 1, dtype=float)
    if policy == "uniform":
        return np.ones_like(j)
    if policy == "nu-over-2j":
        if nu is None:
            raise ValidationError("policy 'nu-over-2j' needs the sample size nu")
        return nu / 2.0**j
    raise ValidationError(f"unknown b policy {policy!r}; expected one of {B_POLICIES}")


def _select(spectrum: WaveletSpectrum, weights: RegressionWeights) -> np.ndarray:
    idx = [spectrum.index(j) for j in weights.octaves]
    return np.asarray(idx)


def _regress(values: np.ndarray, weights: RegressionWeights, octaves, what: str) -> np.ndarray:
    bad = np.argwhere(~(values > 0))
    if bad.size:
        r, q = bad[0]
        raise NumericalError(f"nonpositive {what} at octave j={int(octaves[r])}, q={q + 1}")
    return 0.5 * np.tensordot(weights.w, np.log2(values), axes=(0, 0))


def estimate_multivariate(spectrum: WaveletSpectrum, weights: RegressionWeights) -> np.ndarray:
    idx = _select(spectrum, weights)
    return _regress(spectrum.eigvals[idx], weights, weights.octaves, "eigenvalue")


def estimate_univariate(spectrum: WaveletSpectrum, weights: RegressionWeights) -> np.ndarray:
    idx = _select(spectrum, weights)
    return _regress(spectrum.diag[idx], weights, weights.octaves, "diagonal entry")


@dataclass(frozen=True, eq=False)
class HurstEstimates:
    h_multi: np.ndarray
    h_uni: np.ndarray
    weights: RegressionWeights
    k_counts: dict
    log2_eig: np.ndarray  # (J, n) over weights.octaves
    log2_diag: np.ndarray
    residuals_multi: np.ndarray
    residuals_uni: np.ndarray
    m: int = 1
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        js = [int(j) for j in self.weights.octaves]
        d = {
            "schema_version": SCHEMA_VERSION,
            "j1": self.weights.j1,
            "j2": self.weights.j2,
            "b": self.weights.b.tolist(),
            "w": self.weights.w.tolist(),
            "h_multivariate": self.h_multi.tolist(),
            "h_univariate": self.h_uni.tolist(),
            "K": {str(j): int(self.k_counts[j]) for j in js},
            "log2_eig": {str(j): row.tolist() for j, row in zip(js, self.log2_eig)},
            "log2_diag": {str(j): row.tolist() for j, row in zip(js, self.log2_diag)},
        }
        if self.m != 1:
            d["m"] = self.m
        d.update(self.extra)
        return d


def _from_logs(log2_eig, log2_diag, weights, k_counts, m=1) -> HurstEstimates:
    js = weights.octaves
    for arr, what in ((log2_eig, "eigenvalue"), (log2_diag, "diagonal entry")):
        bad = np.argwhere(~np.isfinite(arr))
        if bad.size:
            r, q = bad[0]
            raise NumericalError(f"nonpositive {what} at octave j={int(js[r])}, q={q + 1}")
    h_multi = 0.5 * np.tensordot(weights.w, log2_eig, axes=(0, 0))
    h_uni = 0.5 * np.tensordot(weights.w, log2_diag, axes=(0, 0))
    res = []
    for y in (log2_eig, log2_diag):
        a, s = weights.fit_line(y)
        res.append(y - a[None] - s[None] * js[:, None].astype(float))
    return HurstEstimates(
        h_multi=h_multi,
        h_uni=h_uni,
        weights=weights,
        k_counts=k_counts,
        log2_eig=log2_eig,
        log2_diag=log2_diag,
        residuals_multi=res[0],
        residuals_uni=res[1],
        m=m,
    )


def _logs(spectrum: WaveletSpectrum, weights: RegressionWeights):
    idx = _select(spectrum, weights)
    with np.errstate(divide="ignore", invalid="ignore"):
        le = np.where(spectrum.eigvals[idx] > 0, np.log2(spectrum.eigvals[idx]), np.nan)
        ld = np.where(spectrum.diag[idx] > 0, np.log2(spectrum.diag[idx]), np.nan)
    return le, ld


def estimate(spectrum: WaveletSpectrum, weights: RegressionWeights) -> HurstEstimates:
    """Both estimators plus the regression diagnostics."""
    le, ld = _logs(spectrum, weights)
    k = {int(j): int(spectrum.k_counts[spectrum.index(j)]) for j in weights.octaves}
    return _from_logs(le, ld, weights, k)


def median_estimate(spectra: Sequence[WaveletSpectrum], weights: RegressionWeights) -> HurstEstimates:
    """Regress the per-(j, q) medians of the log2 statistics across subtraces."""
    if len(spectra) == 0:
        raise ValidationError("median_estimate needs at least one spectrum")
    n = spectra[0].n
    for i, s in enumerate(spectra):
        if s.n != n:
            raise ValidationError(f"subtrace {i} has dimension {s.n}, expected {n}")
        for j in weights.octaves:
            s.index(j)
    logs = [_logs(s, weights) for s in spectra]
    le = np.median(np.stack([l[0] for l in logs]), axis=0)
    ld = np.median(np.stack([l[1] for l in logs]), axis=0)
    k = {int(j): int(min(s.k_counts[s.index(j)] for s in spectra)) for j in weights.octaves}
    return _from_logs(le, ld, weights, k, m=len(spectra))


def resolve_weights(
    nu: int,
    n: int,
    bank: WaveletBank,
    j1: int = DEFAULT_J1,
    j2: int | str | None = "auto",
    b: str | Sequence[float] = "nu-over-2j",
) -> RegressionWeights:
    """Weights for a path of length ``nu``; ``j2='auto'`` uses :func:`deepest_octave`."""
    if j2 is None or j2 == "auto":
        j2 = deepest_octave(nu, bank, n)
    j1, j2 = int(j1), int(j2)
    if j1 < 1:
        raise ValidationError(f"j1 must be >= 1, got {j1}")
    if j1 < DEFAULT_J1:
        warnings.warn(f"j1={j1} < {DEFAULT_J1}: lower variance at the price of more bias", stacklevel=2)
    bj = confidence_scalars(b, j1, j2, nu) if isinstance(b, str) else b
    return make_weights(j1, j2, bj)


def estimate_path(
    path: SamplePath | np.ndarray,
    bank: WaveletBank,
    j1: int = DEFAULT_J1,
    j2: int | str | None = "auto",
    b: str | Sequence[float] = "nu-over-2j",
) -> HurstEstimates:
    """Full pipeline on one path: pyramid, spectrum, both estimators."""
    data = path.data if isinstance(path, SamplePath) else np.atleast_2d(np.asarray(path, float).T).T
    nu, n = data.shape
    weights = resolve_weights(nu, n, bank, j1, j2, b)
    return estimate(analyze_path(data, bank, weights.j2), weights)


def interleave_split(path: SamplePath | np.ndarray, m: int) -> list[np.ndarray]:
    """Split into ``m`` subtraces by time interleaving: subtrace ``r`` keeps
    rows ``r, r + m, r + 2m, ...``. A deterministic stand-in for random
    projection splitting of traffic records."""
    data = path.data if isinstance(path, SamplePath) else np.asarray(path, dtype=float)
    if m < 1 or m > data.shape[0]:
        raise ValidationError(f"cannot split {data.shape[0]} rows into {m} subtraces")
    length = data.shape[0] // m
    return [data[r : r + m * length : m] for r in range(m)]
