"""Regenerate the golden fixtures in this directory.

Run from the repository root: ``python tests/data/make_golden.py``. The W
fixture is only written when the pyramid and the direct equivalent-filter
computation agree.
"""

import json
import sys
from pathlib import Path

import numpy as np

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE.parent))

from conftest import direct_details  # noqa: E402

from ofbmwave import OfbmSpec, build_plan, check_admissibility, make_bank, pyramid, synthesize  # noqa: E402
from ofbmwave.spectrum import wavelet_variance  # noqa: E402


def golden_w6():
    spec = OfbmSpec([0.4, 0.8])
    path = synthesize(build_plan(spec, 2**12), 42)
    bank = make_bank(2, "la")
    W_pyr = wavelet_variance(pyramid(path, bank, 6)[5])
    d = np.column_stack([direct_details(path.data[:, q], bank, 6) for q in range(2)]) * 2.0**-3
    W_dir = d.T @ d / d.shape[0]
    assert np.allclose(W_pyr, W_dir, rtol=1e-12, atol=0), (W_pyr, W_dir)
    return {"seed": 42, "nu": 4096, "hurst": [0.4, 0.8], "octave": 6, "K": int(d.shape[0]), "W": W_pyr.tolist()}


def golden_admissibility():
    cov = [[1.0, 0.99], [0.99, 1.0]]
    spec = OfbmSpec([0.3, 0.9], premix_cov=cov)
    rep = check_admissibility(spec, 2048)
    return {
        "hurst": [0.3, 0.9],
        "premix_cov": cov,
        "embed_len": 2048,
        "passed": rep.passed,
        "min_eigenvalue": rep.min_eigenvalue,
        "worst_frequency": rep.worst_frequency,
        "max_block_norm": rep.max_block_norm,
    }


if __name__ == "__main__":
    (HERE / "golden_w6.json").write_text(json.dumps(golden_w6(), indent=1) + "\n")
    (HERE / "golden_admissibility.json").write_text(json.dumps(golden_admissibility(), indent=1) + "\n")
