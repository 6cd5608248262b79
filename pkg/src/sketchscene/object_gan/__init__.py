from .inference import (
    classify_image,
    encode_sketch,
    generate_edge,
    generate_image,
    generate_image_batch,
    infer_object,
)
from .losses import (
    LossReport,
    classification_loss,
    gradient_penalty,
    join_pair_tensor,
    latent_reconstruction,
)
from .model import ObjectModelBundle, TrainConfig
from .networks import Classifier, Critic, Generator, SketchEncoder
from .train import TrainResult, compute_losses, train_object_model

__all__ = [
    "classify_image",
    "encode_sketch",
    "generate_edge",
    "generate_image",
    "generate_image_batch",
    "infer_object",
    "LossReport",
    "classification_loss",
    "gradient_penalty",
    "join_pair_tensor",
    "latent_reconstruction",
    "ObjectModelBundle",
    "TrainConfig",
    "Classifier",
    "Critic",
    "Generator",
    "SketchEncoder",
    "TrainResult",
    "compute_losses",
    "train_object_model",
]
