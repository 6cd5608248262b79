from .adapter import read_source_directory
from .edges import extract_edges
from .gabor import GaborBank, gabor_features, feature_distance
from .records import InstanceAnnotation, ObjectTriplet, SceneRecord, SourceScene
from .retrieval import SketchPool, retrieve_sketch
from .placement import composite_background
from .builder import BuildConfig, build_dataset
from .loader import load_split
from .toy import ToyConfig, make_toy_source, make_toy_sketch_pool

__all__ = [
    "read_source_directory",
    "extract_edges",
    "GaborBank",
    "gabor_features",
    "feature_distance",
    "InstanceAnnotation",
    "ObjectTriplet",
    "SceneRecord",
    "SourceScene",
    "SketchPool",
    "retrieve_sketch",
    "composite_background",
    "BuildConfig",
    "build_dataset",
    "load_split",
    "ToyConfig",
    "make_toy_source",
    "make_toy_sketch_pool",
]
