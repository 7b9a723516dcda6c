"""
Background removal and region classification
=============================================

A synthetic card is cleaned block by block, then split into connected
components that are sorted into text, lines, noise and other marks.
"""

# %%
# Render a card with two text bars, a rule, a logo and some speckle.
import numpy as np

from cardbin import PipelineConfig, eliminate_background
from cardbin.regions import classify_components, extract_components
from cardbin.synth import CardSpec, Element, generate_card

spec = CardSpec(level=190, gradient=30, noise=2.0, speckle=25, elements=(
    Element("text", (80, 120, 420, 26)),
    Element("text", (80, 220, 300, 20), 4.0),
    Element("hrule", (60, 400, 600, 2)),
    Element("logo", (800, 100, 100, 100)),
))
card, truth = generate_card(spec, seed=1)
print(card.shape, card.dtype, "min", card.min(), "max", card.max())

# %%
# Blocks are ``W // 64`` by 2 pixels. A bright block with a small spread
# turns white; everything else is left alone.
config = PipelineConfig()
clean = eliminate_background(card, config)
print("block width", config.block_width(card.shape[1]))
print("white pixels: %.1f%% -> %.1f%%" % (100 * np.mean(card == 255), 100 * np.mean(clean == 255)))

# %%
# What is left falls apart into 8-connected components.
components = extract_components(clean)
classes = classify_components(components, card.shape[1], card.shape[0], config)
for cc, cls in zip(components, classes):
    print(f"{cls.value:8s} bbox={cc.bbox} area={cc.area} fill={cc.fill_ratio_pct}%")

# %%
# The thresholds scale with the card size.
print(config.thresholds(card.shape[1], card.shape[0]))
