"""Exact synthesis of OFBM sample paths.

Pre-mix increments (multivariate fractional Gaussian noise) are drawn by
circulant embedding of their matrix-valued autocovariance, cumulated from
``Y(0) = 0`` and mixed by ``P``. A Cholesky generator over the full path
covariance is kept as a brute-force reference for tests.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import AdmissibilityError, NumericalError, ValidationError
from .model import (
    PSD_RTOL,
    AdmissibilityReport,
    OfbmSpec,
    SamplePath,
    _report,
    embed_len_for,
    exact_path_covariance,
    spectral_blocks,
)

__all__ = [
    "SynthesisPlan",
    "build_plan",
    "synthesize",
    "cholesky_oracle",
    "derive_seed",
    "CHOLESKY_MAX_NU",
]

CHOLESKY_MAX_NU = 1024
MAX_DOUBLINGS = 3


def derive_seed(base_seed: int, *keys: int) -> int:
    """Mix a base seed with integer keys into an independent 64-bit seed.

    This is numpy's ``SeedSequence`` hash over the entropy tuple
    ``(base_seed, *keys)``; the first 64-bit word of its state is returned.
    """
    ss = np.random.SeedSequence([int(base_seed), *(int(k) for k in keys)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


@dataclass(frozen=True, eq=False)
class SynthesisPlan:
    spec: OfbmSpec
    nu: int
    embed_len: int
    factors: np.ndarray  # (embed_len // 2 + 1, n, n), S(f) = F F^T
    report: AdmissibilityReport


def build_plan(spec: OfbmSpec, nu: int, embed_len: int | None = None) -> SynthesisPlan:
    """Precompute the spectral square roots for paths of length ``nu``.

    On an inadmissible embedding the length is doubled up to three times
    before giving up.
    """
    nu = int(nu)
    if nu < 2:
        raise ValidationError(f"nu must be >= 2, got {nu}")
    m = embed_len_for(nu) if embed_len is None else int(embed_len)
    if m < 2 * (nu - 1):
        raise ValidationError(f"embed_len {m} is shorter than 2(nu-1) = {2 * (nu - 1)}")

    for attempt in range(MAX_DOUBLINGS + 1):
        blocks = spectral_blocks(spec, m)
        eigvals, eigvecs = np.linalg.eigh(blocks)
        report = _report(eigvals, m)
        if report.passed:
            break
        if attempt < MAX_DOUBLINGS:
            m *= 2
    else:
        raise AdmissibilityError(
            "circulant embedding is not PSD; reduce the cross-correlations in premix_cov "
            "or increase embed_len: " + report.describe(),
            diagnostic=report,
        )

    # negative eigenvalues here are within rounding tolerance of zero
    factors = eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))[:, None, :]
    factors.setflags(write=False)
    return SynthesisPlan(spec=spec, nu=nu, embed_len=m, factors=factors, report=report)


def synthesize(plan: SynthesisPlan, seed: int) -> SamplePath:
    """Draw one path ``B(0), ..., B(nu - 1)`` with ``B(0) = 0``.

    Deterministic in ``(plan, seed)``.
    """
    m = plan.embed_len
    half = m // 2
    n = plan.spec.n
    rng = _rng(seed)
    re = rng.standard_normal((half + 1, n))
    im = rng.standard_normal((half + 1, n))
    im[0] = 0.0
    im[half] = 0.0
    re[1:half] *= np.sqrt(0.5)
    im[1:half] *= np.sqrt(0.5)

    F = plan.factors
    spec_re = np.matmul(F, re[:, :, None])[:, :, 0]
    spec_im = np.matmul(F, im[:, :, None])[:, :, 0]
    incr = np.fft.irfft(spec_re + 1j * spec_im, n=m, axis=0)[: plan.nu - 1]
    incr *= np.sqrt(m)

    y = np.zeros((plan.nu, n))
    np.cumsum(incr, axis=0, out=y[1:])
    data = y @ plan.spec.mixing.T
    return SamplePath(data, meta={"seed": int(seed), "spec": plan.spec.digest()})


@functools.lru_cache(maxsize=8)
def _cholesky_factor(spec_json: str, nu: int) -> np.ndarray:
    spec = OfbmSpec.from_json(spec_json)
    C = exact_path_covariance(spec, np.arange(1, nu))
    try:
        return np.linalg.cholesky(C)
    except np.linalg.LinAlgError:
        pass
    ev, V = np.linalg.eigh(C)
    if ev[0] < -PSD_RTOL * ev[-1]:
        raise NumericalError(f"path covariance is not PSD (min eigenvalue {ev[0]:.3e})")
    return V * np.sqrt(np.clip(ev, 0.0, None))


def cholesky_oracle(spec: OfbmSpec, nu: int, seed: int) -> SamplePath:
    """Brute-force path generator from the full ``((nu-1) n)``-square covariance.

    O(nu^3 n^3); capped at ``nu <= 1024``.
    """
    nu = int(nu)
    if nu < 2:
        raise ValidationError(f"nu must be >= 2, got {nu}")
    if nu > CHOLESKY_MAX_NU:
        raise ValidationError(f"cholesky_oracle supports nu <= {CHOLESKY_MAX_NU}, got {nu}")
    L = _cholesky_factor(spec.to_json(), nu)
    z = _rng(seed).standard_normal(L.shape[0])
    data = np.zeros((nu, spec.n))
    data[1:] = (L @ z).reshape(nu - 1, spec.n)
    return SamplePath(data, meta={"seed": int(seed), "spec": spec.digest(), "oracle": "cholesky"})
