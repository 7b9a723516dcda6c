"""Fast binarization of camera-captured business cards."""

from .background import eliminate_background
from .binarize import binarize_card, binarize_region
from .config import PipelineConfig, load_config, save_config
from .evaluation import Annotation, ConfusionCounts, accuracy, load_annotations, score
from .imageio import load_image, save_binary, save_gray
from .pipeline import CardResult, StageReport, process_card
from .regions import ConnectedComponent, RegionClass, classify_component, extract_components
from .skew import SkewEstimate, estimate_skew, rotate_region
from .synth import CardSpec, generate_card

__version__ = "0.1.0"

__all__ = [
    "Annotation", "CardResult", "CardSpec", "ConfusionCounts", "ConnectedComponent",
    "PipelineConfig", "RegionClass", "SkewEstimate", "StageReport", "accuracy",
    "binarize_card", "binarize_region", "classify_component", "eliminate_background",
    "estimate_skew", "extract_components", "generate_card", "load_annotations",
    "load_config", "load_image", "process_card", "rotate_region", "save_binary",
    "save_config", "save_gray", "score",
]
