"""
Whole cards and a small scored corpus
=====================================

Run the full pipeline, look at the stage reports, then score a handful of
random cards against their generated annotations.
"""

# %%
import numpy as np

from cardbin import process_card
from cardbin.evaluation import ConfusionCounts, accuracy, score
from cardbin.imageio import save_binary, save_gray
from cardbin.synth import generate_card, random_spec

rng = np.random.default_rng(5)
card, truth = generate_card(random_spec(rng), seed=5)
result = process_card(card)
for report in result.reports:
    print(report.line())
print("peak / input bytes: %.2f" % (result.peak_bytes / card.nbytes))

# %%
# Write the input and output so they can be viewed with any PNM viewer.
save_gray(card, "demo_card.pgm")
save_binary(result.binary, "demo_card.pbm")

# %%
pooled = ConfusionCounts()
for seed in range(10):
    img, anns = generate_card(random_spec(rng), seed)
    r = process_card(img, trace_memory=False)
    counts = score(r.components, r.classes, anns)
    pooled = pooled + counts
    print(seed, counts)
print("accuracy %.2f%%" % accuracy(pooled))
