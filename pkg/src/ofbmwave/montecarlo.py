"""Replication engine for estimator performance studies.

Replication ``r`` at sample size ``nu`` always uses the seed
``derive_seed(base_seed, nu, r)``, so any single replication can be replayed
and the summary does not depend on the worker count.
"""

from __future__ import annotations

import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError, OfbmError, ValidationError
from .estimator import DEFAULT_J1, SCHEMA_VERSION, estimate, resolve_weights
from .spectrum import analyze_path
from .model import OfbmSpec
from .synthesis import SynthesisPlan, build_plan, derive_seed, synthesize
from .wavelet import make_bank

__all__ = [
    "McConfig",
    "McSummary",
    "ReplicationError",
    "run",
    "run_replication",
    "bootstrap_ci",
    "cross_covariances",
    "moments",
    "ESTIMATORS",
]

ESTIMATORS = ("multi", "uni")
_BOOT_TAG = 0xB007


class ReplicationError(NumericalError):
    def __init__(self, nu, rep, seed, cause):
        super().__init__(f"replication failed at nu={nu}, rep={rep}, seed={seed}: {cause}")
        self.nu, self.rep, self.seed = nu, rep, seed


@dataclass(frozen=True, eq=False)
class McConfig:
    spec: OfbmSpec
    nus: tuple
    reps: int
    base_seed: int = 0
    n_moments: int = 2
    variant: str = "la"
    j1: int = DEFAULT_J1
    j2: int | str = "auto"
    b: str = "nu-over-2j"
    bootstrap_b: int = 1000
    level: float = 0.95

    def __post_init__(self):
        nus = tuple(int(v) for v in self.nus)
        if not nus:
            raise ValidationError("nus must not be empty")
        for v in nus:
            if v < 2 or v & (v - 1):
                raise ValidationError(f"sample sizes must be powers of two, got {v}")
        if list(nus) != sorted(set(nus)):
            raise ValidationError("nus must be strictly ascending")
        if int(self.reps) < 1:
            raise ValidationError(f"reps must be >= 1, got {self.reps}")
        if not 0 < self.level < 1:
            raise ValidationError(f"level must be in (0, 1), got {self.level}")
        object.__setattr__(self, "nus", nus)
        object.__setattr__(self, "reps", int(self.reps))

    _KEYS = ("nus", "reps", "base_seed", "n_moments", "variant", "j1", "j2", "b", "bootstrap_b", "level")

    def to_dict(self) -> dict:
        d = {"spec": self.spec.to_dict()}
        d.update({k: getattr(self, k) for k in self._KEYS})
        d["nus"] = list(self.nus)
        return d

    @classmethod
    def from_dict(cls, d: dict, **overrides) -> "McConfig":
        if "spec" not in d:
            raise ValidationError("Monte Carlo config needs a 'spec' object")
        kw = {k: d[k] for k in cls._KEYS if k in d}
        kw.update({k: v for k, v in overrides.items() if v is not None})
        if "nus" not in kw or "reps" not in kw:
            raise ValidationError("Monte Carlo config needs 'nus' and 'reps'")
        return cls(spec=OfbmSpec.from_dict(d["spec"]), **kw)


def moments(x: np.ndarray) -> dict:
    """Two-pass mean, unbiased std, skewness and excess kurtosis along axis 0.

    Entries that need more samples than available are ``None``-filled (as NaN
    here, mapped to ``null`` in JSON).
    """
    x = np.asarray(x, dtype=float)
    R = x.shape[0]
    mean = x.mean(axis=0)
    dev = x - mean
    m2 = (dev**2).mean(axis=0)
    nan = np.full(mean.shape, np.nan)
    std = np.sqrt((dev**2).sum(axis=0) / (R - 1)) if R >= 2 else nan
    with np.errstate(divide="ignore", invalid="ignore"):
        skew = (dev**3).mean(axis=0) / m2**1.5 if R >= 3 else nan
        kurt = (dev**4).mean(axis=0) / m2**2 - 3.0 if R >= 4 else nan
    return {"mean": mean, "std": std, "skewness": skew, "kurtosis": kurt}


def bootstrap_ci(samples, level: float = 0.95, b: int = 1000, seed: int = 0):
    """Percentile bootstrap interval for the mean; ``(None, None)`` if fewer
    than 10 samples."""
    x = np.asarray(samples, dtype=float)
    R = x.size
    if R < 10:
        return None, None
    rng = np.random.Generator(np.random.Philox(int(seed)))
    idx = rng.integers(0, R, size=(int(b), R))
    means = x[idx].mean(axis=1)
    alpha = (1 - level) / 2
    lo, hi = np.quantile(means, [alpha, 1 - alpha])
    return float(lo), float(hi)


def cross_covariances(estimates: np.ndarray) -> np.ndarray:
    """Unbiased sample covariance of the columns of an ``(R, n)`` array."""
    x = np.asarray(estimates, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValidationError("cross_covariances needs an (R, n) array with R >= 2")
    dev = x - x.mean(axis=0)
    C = dev.T @ dev / (x.shape[0] - 1)
    return (C + C.T) / 2


# per-process state for the worker pool
_WORKER: dict = {}


def _init_worker(plan, bank, config):
    _WORKER.update(plan=plan, bank=bank, config=config)


def run_replication(plan: SynthesisPlan, bank, config: McConfig, rep: int):
    """One replication: estimates ``(2, n)`` (multi, uni) and the regression
    octaves' eigenvalues and diagonal entries, each ``(J, n)``."""
    seed = derive_seed(config.base_seed, plan.nu, rep)
    try:
        path = synthesize(plan, seed)
        weights = resolve_weights(path.nu, path.n, bank, config.j1, config.j2, config.b)
        spectrum = analyze_path(path, bank, weights.j2)
        est = estimate(spectrum, weights)
    except OfbmError as exc:
        raise ReplicationError(plan.nu, rep, seed, exc) from exc
    idx = [spectrum.index(j) for j in weights.octaves]
    return np.stack([est.h_multi, est.h_uni]), spectrum.eigvals[idx], spectrum.diag[idx], weights.octaves


def _worker_task(rep):
    w = _WORKER
    return rep, run_replication(w["plan"], w["bank"], w["config"], rep)


@dataclass(frozen=True, eq=False)
class McSummary:
    config: McConfig
    raw: dict  # nu -> (R, 2, n)
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "config": self.config.to_dict(), **self.stats}

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), indent=1, sort_keys=True, allow_nan=False) + "\n"

    def raw_csv(self) -> str:
        buf = io.StringIO()
        buf.write("nu,rep,estimator,q,h_hat\n")
        for nu in sorted(self.raw):
            arr = self.raw[nu]
            for r in range(arr.shape[0]):
                for e, name in enumerate(ESTIMATORS):
                    for q in range(arr.shape[2]):
                        buf.write(f"{nu},{r},{name},{q + 1},{float(arr[r, e, q])!r}\n")
        return buf.getvalue()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (float, np.floating)):
        return None if not math.isfinite(x) else float(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


def _summarize(config: McConfig, raw: dict) -> dict:
    truth = np.sort(config.spec.hurst)
    per_nu = {}
    for nu in config.nus:
        arr = raw[nu]
        entry = {"reps": int(arr.shape[0])}
        for e, name in enumerate(ESTIMATORS):
            x = arr[:, e, :]
            mom = moments(x)
            ci = [
                bootstrap_ci(x[:, q], config.level, config.bootstrap_b, derive_seed(config.base_seed, nu, _BOOT_TAG, e, q))
                for q in range(x.shape[1])
            ]
            entry[name] = {
                "mean": mom["mean"],
                "bias": mom["mean"] - truth,
                "std": mom["std"],
                "skewness": mom["skewness"],
                "kurtosis": mom["kurtosis"],
                "ci_low": [c[0] for c in ci],
                "ci_high": [c[1] for c in ci],
                "cov": cross_covariances(x) if x.shape[0] >= 2 else None,
            }
        per_nu[str(nu)] = entry

    decay = {}
    if len(config.nus) >= 2 and config.reps >= 2:
        lx = np.log2(np.array(config.nus, dtype=float))
        for e, name in enumerate(ESTIMATORS):
            ly = np.log2(np.stack([per_nu[str(nu)][name]["std"] for nu in config.nus]))
            decay[name] = np.polyfit(lx, ly, 1)[0]
    return {"truth": truth, "level": config.level, "per_nu": per_nu, "std_decay_slope": decay}


def run(config: McConfig, workers: int = 1) -> McSummary:
    """Run every replication for every sample size and aggregate."""
    bank = make_bank(config.n_moments, config.variant)
    raw, logscale = {}, {}
    for nu in config.nus:
        plan = build_plan(config.spec, nu)
        reps = range(config.reps)
        if workers <= 1:
            results = [(r, run_replication(plan, bank, config, r)) for r in reps]
        else:
            with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(plan, bank, config)) as ex:
                results = list(ex.map(_worker_task, reps, chunksize=max(1, config.reps // (4 * workers))))
        results.sort(key=lambda t: t[0])
        raw[nu] = np.stack([v[0] for _, v in results])
        # summed in replication order so the result is worker-count independent
        eig = sum(v[1] for _, v in results) / len(results)
        diag = sum(v[2] for _, v in results) / len(results)
        logscale[nu] = {"octaves": results[0][1][3], "log2_mean_eig": np.log2(eig), "log2_mean_diag": np.log2(diag)}
    stats = _summarize(config, raw)
    for nu in config.nus:
        stats["per_nu"][str(nu)]["logscale"] = logscale[nu]
    return McSummary(config=config, raw=raw, stats=stats)


def load_raw_csv(text: str) -> dict:
    """Inverse of :meth:`McSummary.raw_csv`: ``{nu: (R, 2, n) array}``."""
    rows = [line.split(",") for line in text.strip().splitlines()[1:]]
    out: dict = {}
    for nu, rep, est, q, h in rows:
        out.setdefault(int(nu), []).append((int(rep), ESTIMATORS.index(est), int(q) - 1, float(h)))
    arrays = {}
    for nu, items in out.items():
        R = 1 + max(i[0] for i in items)
        n = 1 + max(i[2] for i in items)
        a = np.full((R, 2, n), np.nan)
        for r, e, q, h in items:
            a[r, e, q] = h
        arrays[nu] = a
    return arrays
