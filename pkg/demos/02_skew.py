"""
Skew from gray-shade profiles
=============================

Each text region's skew comes from the bottom edge of its ink, sampled
at three points. The top edge is consulted only when those disagree.
"""

# %%
import math

import numpy as np

from cardbin import PipelineConfig, eliminate_background
from cardbin.regions import extract_components
from cardbin.skew import Side, compute_profile, estimate_skew, filter_profile, rotate_region
from cardbin.synth import CardSpec, Element, generate_card

config = PipelineConfig()

# %%
# A single 480 px bar rotated by 6 degrees.
card, _ = generate_card(CardSpec(elements=(Element("text", (272, 372, 480, 24), 6.0),)), seed=0)
clean = eliminate_background(card, config)
[cc] = extract_components(clean)
print("region", cc.bbox)

# %%
# The raw profile, and what survives the deviation band around its mean.
profile = compute_profile(clean, cc.bbox, Side.BOTTOM, config, cc.mask())
kept = filter_profile(profile)
print("columns", profile.n, "kept", kept.n)
print("heights (every 40th):", profile.heights[::40])

# %%
est = estimate_skew(clean, cc, config)
print("source", est.source.value)
print("chord angles (deg):", [round(math.degrees(a), 2) for a in est.bottom])
print("estimate %.2f deg" % math.degrees(est.angle))

# %%
# Undo the rotation and compare how many rows the ink spans.
straight = rotate_region(clean, cc.bbox, est.angle, mask=cc.mask())
x, y, w, h = cc.bbox
before = np.count_nonzero((clean[y:y + h, x:x + w] < 100).any(axis=1))
after = np.count_nonzero((straight < 100).any(axis=1))
print("ink rows", before, "->", after)

# %%
# Sweep the angle. Shorter bars read flatter, since the block grid blurs
# the profile by about one block per step.
for width in (300, 480):
    errs = []
    for deg in range(-10, 11, 2):
        img, _ = generate_card(CardSpec(elements=(Element("text", (272, 372, width, 24), deg),)), deg + 100)
        [c] = extract_components(eliminate_background(img, config))
        errs.append(abs(math.degrees(estimate_skew(eliminate_background(img, config), c, config).angle) - deg))
    print(f"{width} px: worst error {max(errs):.2f} deg")
