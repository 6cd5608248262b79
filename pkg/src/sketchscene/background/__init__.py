from .compose import BackgroundInput, compose_background_input, fuse
from .inference import BackgroundModel, generate_background
from .networks import PatchCritic, UNetGenerator
from .train import BackgroundConfig, BackgroundTrainResult, train_background

__all__ = [
    "BackgroundInput",
    "compose_background_input",
    "fuse",
    "BackgroundModel",
    "generate_background",
    "PatchCritic",
    "UNetGenerator",
    "BackgroundConfig",
    "BackgroundTrainResult",
    "train_background",
]
