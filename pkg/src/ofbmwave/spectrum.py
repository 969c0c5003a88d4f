"""Sample wavelet variance matrices and their eigenstructure."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NumericalError, ValidationError
from .model import SamplePath
from .wavelet import OctaveCoefficients, WaveletBank, pyramid

__all__ = [
    "WaveletSpectrum",
    "LogscaleRow",
    "wavelet_variance",
    "eigh_sorted",
    "wavelet_spectrum",
    "analyze_path",
    "logscale_diagram",
    "format_logscale_tsv",
    "eigvec_alignment",
]

SYM_RTOL = 1e-10
CLIP_RTOL = 1e-10
NONPOSITIVE = "NONPOS"


def wavelet_variance(coeffs: OctaveCoefficients | np.ndarray) -> np.ndarray:
    """``W = (1/K) sum_k D_k D_k^T`` over the rows of the coefficient matrix."""
    D = coeffs.coeffs if isinstance(coeffs, OctaveCoefficients) else np.asarray(coeffs, dtype=float)
    if D.ndim == 1:
        D = D[:, None]
    K = D.shape[0]
    if K < 1:
        raise ValidationError("no wavelet coefficients at this octave")
    W = D.T @ D / K
    return (W + W.T) / 2


def _sign_fix(vecs: np.ndarray) -> np.ndarray:
    # first component with |v| above rounding noise is made positive
    mag = np.abs(vecs)
    first = np.argmax(mag > 1e-12 * mag.max(axis=-2, keepdims=True), axis=-2)
    lead = np.take_along_axis(vecs, first[..., None, :], axis=-2)
    return vecs * np.where(lead < 0, -1.0, 1.0)


def eigh_sorted(W: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvectors (as columns).

    Accepts a single matrix or a stack ``(..., n, n)``. Eigenvalues within
    ``-1e-10 ||W||`` of zero are clipped to zero; anything more negative is
    an error. Each eigenvector has its first nonzero component positive.
    """
    W = np.asarray(W, dtype=float)
    if W.ndim < 2 or W.shape[-1] != W.shape[-2]:
        raise ValidationError(f"expected square matrices, got shape {W.shape}")
    scale = np.abs(W).max(axis=(-2, -1), keepdims=True)
    asym = np.abs(W - np.swapaxes(W, -1, -2)).max(axis=(-2, -1), keepdims=True)
    if np.any(asym > SYM_RTOL * np.maximum(scale, np.finfo(float).tiny)):
        raise ValidationError("matrix is not symmetric within 1e-10 relative")
    try:
        vals, vecs = np.linalg.eigh(W)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"symmetric eigensolver did not converge: {exc}") from None
    norm = np.linalg.norm(W, ord=2, axis=(-2, -1)) if W.ndim == 2 else np.abs(vals).max(axis=-1)
    floor = -CLIP_RTOL * np.asarray(norm)[..., None]
    if np.any(vals < floor):
        raise NumericalError(f"matrix is not PSD: min eigenvalue {vals.min():.3e}")
    vals = np.where(vals < 0, 0.0, vals)
    return vals, _sign_fix(vecs)


@dataclass(frozen=True, eq=False)
class WaveletSpectrum:
    octaves: np.ndarray  # (J,)
    W: np.ndarray  # (J, n, n)
    eigvals: np.ndarray  # (J, n) ascending
    eigvecs: np.ndarray  # (J, n, n) columns matched to eigvals
    k_counts: np.ndarray  # (J,)

    @property
    def n(self) -> int:
        return self.W.shape[-1]

    @property
    def diag(self) -> np.ndarray:
        return np.diagonal(self.W, axis1=-2, axis2=-1)

    @property
    def diag_log2(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log2(self.diag)

    @property
    def log2_eigvals(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log2(self.eigvals)

    def index(self, j: int) -> int:
        hits = np.flatnonzero(self.octaves == j)
        if hits.size == 0:
            raise ValidationError(f"octave {j} not in spectrum (has {self.octaves.tolist()})")
        return int(hits[0])


def wavelet_spectrum(coeffs: Sequence[OctaveCoefficients]) -> WaveletSpectrum:
    if not coeffs:
        raise ValidationError("empty coefficient list")
    W = np.stack([wavelet_variance(c) for c in coeffs])
    vals, vecs = eigh_sorted(W)
    return WaveletSpectrum(
        octaves=np.array([c.octave for c in coeffs]),
        W=W,
        eigvals=vals,
        eigvecs=vecs,
        k_counts=np.array([c.k_count for c in coeffs]),
    )


def analyze_path(path: SamplePath | np.ndarray, bank: WaveletBank, j_max: int) -> WaveletSpectrum:
    """Pyramid followed by per-octave variance and eigendecomposition."""
    return wavelet_spectrum(pyramid(path, bank, j_max))


@dataclass(frozen=True)
class LogscaleRow:
    j: int
    q: int
    log2_lambda: float
    log2_diag: float
    k: int
    valid: bool


def logscale_diagram(spectrum: WaveletSpectrum) -> list[LogscaleRow]:
    """One row per (octave, index); ``q`` is 1-based.

    Rows whose eigenvalue or diagonal entry is not positive carry
    ``valid=False`` and a NaN in the affected column.
    """
    rows = []
    for idx, j in enumerate(spectrum.octaves):
        for q in range(spectrum.n):
            lam = spectrum.eigvals[idx, q]
            dg = spectrum.W[idx, q, q]
            rows.append(
                LogscaleRow(
                    j=int(j),
                    q=q + 1,
                    log2_lambda=math.log2(lam) if lam > 0 else math.nan,
                    log2_diag=math.log2(dg) if dg > 0 else math.nan,
                    k=int(spectrum.k_counts[idx]),
                    valid=bool(lam > 0 and dg > 0),
                )
            )
    return rows


def _fmt(x: float) -> str:
    return NONPOSITIVE if math.isnan(x) else repr(float(x))


def format_logscale_tsv(rows: Sequence[LogscaleRow]) -> str:
    lines = ["j\tq\tlog2_lambda\tlog2_diag\tK"]
    for r in rows:
        lines.append(f"{r.j}\t{r.q}\t{_fmt(r.log2_lambda)}\t{_fmt(r.log2_diag)}\t{r.k}")
    return "\n".join(lines) + "\n"


def eigvec_alignment(spectrum: WaveletSpectrum, mixing: np.ndarray, j: int | None = None) -> float:
    """``|<u_n, p_n>|`` between the top eigenvector at octave ``j`` (default:
    coarsest) and the last unit-normalized mixing column."""
    idx = len(spectrum.octaves) - 1 if j is None else spectrum.index(j)
    u = spectrum.eigvecs[idx, :, -1]
    p = np.asarray(mixing, dtype=float)[:, -1]
    return float(abs(u @ p) / np.linalg.norm(p))
