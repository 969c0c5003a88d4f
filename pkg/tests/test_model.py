import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ofbmwave import (
    OfbmSpec,
    ValidationError,
    check_admissibility,
    cholesky_oracle,
    exact_path_covariance,
    mfbm_covariance,
)
from ofbmwave.errors import AdmissibilityError
from ofbmwave.model import hurst_matrix_power, increment_autocovariance

DATA = Path(__file__).parent / "data"

hurst_st = st.floats(0.05, 0.95)
time_st = st.floats(-50, 50)


def test_brownian_variance_and_covariance():
    assert mfbm_covariance(0.5, 0.5, 1.0, 1, 1) == 1.0
    assert mfbm_covariance(0.5, 0.5, 1.0, 1, 2) == 1.0


def test_cross_covariance_formula_value():
    # H = 1: 0.25 * (1 + 3 - 2)
    assert mfbm_covariance(0.3, 0.7, 0.5, 1, 3) == pytest.approx(0.5, abs=1e-15)


def test_cross_covariance_against_cholesky_paths():
    spec = OfbmSpec([0.3, 0.7], premix_cov=[[1.0, 0.5], [0.5, 1.0]])
    R = 5000
    prod = np.array([(lambda x: x[1, 0] * x[3, 1])(cholesky_oracle(spec, 4, 1000 + r).data) for r in range(R)])
    target = mfbm_covariance(0.3, 0.7, 0.5, 1, 3)
    se = prod.std(ddof=1) / np.sqrt(R)
    assert abs(prod.mean() - target) < 4 * se


@given(hurst_st, hurst_st, st.floats(-2, 2), time_st, time_st)
def test_covariance_symmetries(hi, hj, sig, s, t):
    r = mfbm_covariance(hi, hj, sig, s, t)
    assert r == pytest.approx(mfbm_covariance(hj, hi, sig, t, s), rel=1e-12, abs=1e-12)
    # time reversibility
    assert r == pytest.approx(mfbm_covariance(hi, hj, sig, -s, -t), rel=1e-12, abs=1e-12)
    assert mfbm_covariance(hi, hj, sig, 0.0, t) == pytest.approx(0.0, abs=1e-12)


def test_covariance_rejects_bad_input():
    with pytest.raises(ValidationError):
        mfbm_covariance(0.5, np.nan, 1.0, 1, 1)
    with pytest.raises(ValidationError):
        mfbm_covariance(0.5, 0.5, 1.0, np.inf, 1)
    with pytest.raises(ValidationError):
        mfbm_covariance(1.2, 0.5, 1.0, 1, 1)


def test_path_covariance_brownian():
    C = exact_path_covariance(OfbmSpec([0.5]), [1, 2])
    np.testing.assert_allclose(C, [[1, 1], [1, 2]], atol=1e-15)


def test_path_covariance_independent_blocks():
    spec = OfbmSpec([0.3, 0.6, 0.8], premix_cov=np.diag([1.0, 2.0, 0.5]))
    C = exact_path_covariance(spec, [1, 3, 7]).reshape(3, 3, 3, 3)
    off = C * (1 - np.eye(3))[None, :, None, :]
    assert np.all(off == 0)


def test_path_covariance_paper_spec_psd(paper):
    C = exact_path_covariance(paper, [1, 2, 3])
    assert np.allclose(C, C.T, atol=0)
    ev = np.linalg.eigvalsh(C)
    assert ev[0] >= -1e-9 * ev[-1]


@pytest.mark.parametrize("c", [2, 3, 5])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_operator_self_similarity(c, n):
    rng = np.random.default_rng(10 * c + n)
    h = np.sort(rng.uniform(0.1, 0.9, n))
    P = rng.standard_normal((n, n))
    P /= np.linalg.norm(P, axis=0)
    spec = OfbmSpec(h, P)
    times = np.array([1, 2, 4, 5])
    lhs = exact_path_covariance(spec, c * times)
    M = np.kron(np.eye(times.size), hurst_matrix_power(spec, c))
    rhs = M @ exact_path_covariance(spec, times) @ M.T
    np.testing.assert_allclose(lhs, rhs, rtol=1e-9, atol=1e-9 * np.abs(lhs).max())


def test_stationary_increments(paper):
    T = 7
    n = paper.n
    C = exact_path_covariance(paper, np.arange(T)).reshape(T, n, T, n)

    def incr_var(s, t):
        return C[t, :, t, :] + C[s, :, s, :] - C[t, :, s, :] - C[s, :, t, :]

    for lag in range(1, 4):
        ref = incr_var(0, lag)
        for s in range(1, T - lag):
            np.testing.assert_allclose(incr_var(s, s + lag), ref, rtol=1e-10, atol=1e-12)


def test_increment_autocovariance_matches_covariance_differences():
    spec = OfbmSpec([0.3, 0.7], premix_cov=[[1.0, 0.2], [0.2, 2.0]])
    gamma = increment_autocovariance(spec, 6)
    H = spec.exponent_sums()
    for k in range(7):
        for i in range(2):
            for j in range(2):
                hi, hj, sig = spec.hurst[i], spec.hurst[j], spec.premix_cov[i, j]
                ref = (
                    mfbm_covariance(hi, hj, sig, 1, k + 1)
                    - mfbm_covariance(hi, hj, sig, 1, k)
                    - mfbm_covariance(hi, hj, sig, 0, k + 1)
                    + mfbm_covariance(hi, hj, sig, 0, k)
                )
                assert gamma[k, i, j] == pytest.approx(ref, abs=1e-13)
    assert H.shape == (2, 2)


def test_mixing_columns_normalized_with_warning():
    with pytest.warns(UserWarning, match="rescaled"):
        spec = OfbmSpec([0.3, 0.7], [[2.0, 0.0], [0.0, 3.0]])
    np.testing.assert_allclose(np.linalg.norm(spec.mixing, axis=0), 1.0, atol=1e-15)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"hurst": [0.0, 0.5]},
        {"hurst": [0.5, 1.0]},
        {"hurst": [0.3, 0.7], "premix_cov": [[0.0, 0.0], [0.0, 1.0]]},
        {"hurst": [0.3, 0.7], "premix_cov": [[1.0, 0.5], [0.4, 1.0]]},
        {"hurst": [0.3, 0.7], "mixing": [[1.0, 1.0], [0.0, 0.0]]},
        {"hurst": [0.3, 0.7], "mixing": [[1.0, 0.0]]},
    ],
)
def test_invalid_specs_rejected(kwargs):
    with pytest.raises(ValidationError):
        OfbmSpec(**kwargs)


def test_json_roundtrip(paper):
    doc = json.loads(paper.to_json())
    assert set(doc) == {"n", "hurst", "mixing", "premix_cov"}
    assert OfbmSpec.from_json(paper.to_json()) == paper
    with pytest.raises(ValidationError):
        OfbmSpec.from_dict({"n": 3, "hurst": [0.3, 0.4]})


def test_theory_conditions():
    assert OfbmSpec([0.3, 0.7]).theory_conditions() == []
    assert len(OfbmSpec([0.5, 0.5]).theory_conditions()) == 2


@pytest.mark.parametrize("h", [[0.1], [0.5], [0.95], [0.2, 0.9], [0.3, 0.5, 0.8]])
def test_identity_covariance_is_admissible(h):
    rep = check_admissibility(OfbmSpec(h), 1024)
    assert rep.passed, rep.describe()


def test_strong_coherence_fixture():
    g = json.loads((DATA / "golden_admissibility.json").read_text())
    spec = OfbmSpec(g["hurst"], premix_cov=g["premix_cov"])
    rep = check_admissibility(spec, g["embed_len"])
    assert rep.passed == g["passed"]
    assert rep.worst_frequency == g["worst_frequency"]
    assert rep.min_eigenvalue == pytest.approx(g["min_eigenvalue"], rel=1e-9)
    assert rep.max_block_norm == pytest.approx(g["max_block_norm"], rel=1e-9)


def test_path_covariance_reports_inadmissible_spec():
    spec = OfbmSpec([0.3, 0.9], premix_cov=[[1.0, 0.99], [0.99, 1.0]])
    with pytest.raises(AdmissibilityError, match="min eigenvalue"):
        exact_path_covariance(spec, np.arange(1, 200))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0.05, 0.95), min_size=1, max_size=3))
def test_path_covariance_psd_for_independent_coordinates(h):
    C = exact_path_covariance(OfbmSpec(h), [1, 2, 3, 8])
    ev = np.linalg.eigvalsh(C)
    assert ev[0] >= -1e-9 * ev[-1]
