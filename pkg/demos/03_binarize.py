"""
Binarization with neighbour promotion
=====================================

Pixels darker than the midpoint of the region's intensity range are ink.
A lighter pixel with at least five ink neighbours joins them, which closes
one-pixel breaks in strokes.
"""

# %%
import numpy as np

from cardbin.binarize import binarize_region, neighbour_counts

patch = np.array([
    [200, 200, 200, 200, 200, 200, 200],
    [200,  30,  30, 200,  30,  30, 200],
    [200,  30,  30, 150,  30,  30, 200],
    [200,  30,  30, 200,  30,  30, 200],
    [200, 200, 200, 200, 200, 200, 200],
], dtype=np.uint8)

# %%
# Phase 1 alone leaves the stroke broken at column 3.
phase1 = patch < (30 + 200) // 2
print(phase1.astype(int))
print("ink neighbours:\n", neighbour_counts(phase1))

# %%
# The gap pixel at row 2 has six ink neighbours and is promoted. Its column
# neighbours above and below have only four and stay white.
print(binarize_region(patch, 30, 200))

# %%
# The result does not depend on the order pixels are visited in.
rng = np.random.default_rng(0)
ref = binarize_region(patch, 30, 200)
print(all(np.array_equal(ref, binarize_region(patch, 30, 200, rng.permutation(patch.size)))
          for _ in range(20)))
