"""
Daubechies filters and the wavelet pyramid
==========================================

Generate orthonormal Daubechies filters, run the boundary-free pyramid on a
fractional Brownian motion and read its Hurst exponent off the logscale
diagram.
"""

import numpy as np

from ofbmwave import OfbmSpec, analyze_path, build_plan, make_bank, pyramid, synthesize
from ofbmwave.spectrum import format_logscale_tsv, logscale_diagram
from ofbmwave.wavelet import deepest_octave

##############################################################################
# Filters
# -------
#
# ``make_bank(N)`` returns the 2N-tap lowpass/highpass pair with N vanishing
# moments, by spectral factorization. ``"la"`` picks the least asymmetric
# root set, ``"ep"`` the extremal-phase one.

for variant in ("ep", "la"):
    print(variant, np.round(make_bank(4, variant).lowpass, 6))

bank = make_bank(2)
t = np.arange(bank.length)
print("highpass moments:", [float(np.sum(t**p * bank.highpass)) for p in range(3)])

##############################################################################
# The pyramid
# -----------
#
# Octave ``j`` keeps only coefficients whose support lies inside the data,
# so ``K_j`` shrinks a little faster than ``nu / 2^j``. Polynomials of degree
# below ``N`` produce zero details.

ramp = np.arange(4096.0)
print("max detail of a ramp:", max(np.abs(o.coeffs).max() for o in pyramid(ramp, bank, 8)))
print("K_j:", [o.k_count for o in pyramid(ramp, bank, 8)])
print("deepest usable octave for nu=2^16:", deepest_octave(2**16, bank))

##############################################################################
# Logscale diagram of fBm
# -----------------------
#
# For fBm with exponent h the wavelet variance grows like ``2^{2hj}``.

path = synthesize(build_plan(OfbmSpec([0.7]), 2**16), seed=3)
spectrum = analyze_path(path, bank, 12)
rows = logscale_diagram(spectrum)
print(format_logscale_tsv(rows))
js = np.array([r.j for r in rows if 4 <= r.j <= 10])
ys = np.array([r.log2_lambda for r in rows if 4 <= r.j <= 10])
print("slope / 2 =", round(np.polyfit(js, ys, 1)[0] / 2, 3))
