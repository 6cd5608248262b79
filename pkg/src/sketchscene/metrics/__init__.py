from .fid import fid
from .ssim import ssim
from .shape import shape_similarity
from .accuracy import accuracy
from .extractor import (
    ClassifierFeatureExtractor,
    FeatureExtractor,
    PixelPCAExtractor,
    train_eval_classifier,
)
from .report import REFERENCE_FULL_SCALE, EvalReport, evaluate, fid_local, render_table

__all__ = [
    "fid",
    "ssim",
    "shape_similarity",
    "accuracy",
    "fid_local",
    "FeatureExtractor",
    "PixelPCAExtractor",
    "ClassifierFeatureExtractor",
    "train_eval_classifier",
    "EvalReport",
    "evaluate",
    "render_table",
    "REFERENCE_FULL_SCALE",
]
