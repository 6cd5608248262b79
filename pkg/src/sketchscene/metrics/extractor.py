"""Feature embeddings behind FID, pluggable because no pretrained backbone
is assumed at desk scale.  The default is the penultimate layer of a small
classifier trained on the real corpus; a pixel-PCA embedding is provided
as a model-free alternative."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import numpy as np
import torch

from ..errors import ConfigurationError, InputError
from ..images import resize, to_grayscale
from ..object_gan.losses import to_batch_tensor
from ..object_gan.networks import Classifier, init_weights


@runtime_checkable
class FeatureExtractor(Protocol):
    """Deterministic image -> finite feature vector mapping used by FID."""

    kind: str
    output_dim: int

    def extract(self, images) -> np.ndarray: ...


def _as_image_list(images) -> list[np.ndarray]:
    if isinstance(images, np.ndarray) and images.ndim == 4:
        return [images[i] for i in range(images.shape[0])]
    return [np.asarray(im, dtype=np.float32) for im in images]


def _fit_resolution(image: np.ndarray, resolution: int) -> np.ndarray:
    if image.shape[:2] == (resolution, resolution):
        return image.astype(np.float32)
    return resize(image.astype(np.float32), resolution, resolution)


@dataclass
class ClassifierFeatureExtractor:
    """Penultimate-layer embedding of a trained convolutional classifier."""

    classifier: Classifier
    categories: list[str]
    kind: str = "toy_classifier"

    def __post_init__(self):
        self.classifier.eval()
        self.output_dim = self.classifier.feature_dim
        self.resolution = self.classifier.resolution

    def extract(self, images) -> np.ndarray:
        batch = np.stack(
            [_fit_resolution(im, self.resolution) for im in _as_image_list(images)]
        )
        with torch.no_grad():
            feats = self.classifier.features(to_batch_tensor(batch))
        out = feats.numpy().astype(np.float64)
        if not np.isfinite(out).all():
            raise InputError("non-finite features extracted")
        return out

    def classify(self, image: np.ndarray) -> np.ndarray:
        batch = np.stack([_fit_resolution(np.asarray(image, np.float32), self.resolution)])
        with torch.no_grad():
            logits = self.classifier(to_batch_tensor(batch))
        return torch.softmax(logits, dim=1).numpy()[0]


@dataclass
class PixelPCAExtractor:
    """Grayscale pixel projection onto the top principal components of a
    reference set; a deterministic, training-free embedding."""

    output_dim: int = 16
    resolution: int = 32
    kind: str = "pixel_pca"
    _mean: np.ndarray | None = field(default=None, repr=False)
    _components: np.ndarray | None = field(default=None, repr=False)

    def fit(self, images) -> "PixelPCAExtractor":
        flat = self._flatten(images)
        if flat.shape[0] < 2:
            raise InputError("need at least 2 reference images to fit")
        self._mean = flat.mean(axis=0)
        centered = flat - self._mean
        _, _, vt = np.linalg.svd(centered, full_matrices=False)
        k = min(self.output_dim, vt.shape[0])
        if k < self.output_dim:
            raise ConfigurationError(
                f"reference set supports only {k} components, need {self.output_dim}"
            )
        self._components = vt[: self.output_dim]
        return self

    def _flatten(self, images) -> np.ndarray:
        rows = []
        for im in _as_image_list(images):
            im = _fit_resolution(im, self.resolution)
            gray = to_grayscale(im) if im.ndim == 3 else im
            rows.append(gray.ravel())
        return np.asarray(rows, dtype=np.float64)

    def extract(self, images) -> np.ndarray:
        if self._components is None:
            raise ConfigurationError("pixel PCA extractor used before fit()")
        return (self._flatten(images) - self._mean) @ self._components.T


def train_eval_classifier(
    dataset,
    resolution: int = 64,
    base_width: int = 16,
    epochs: int = 8,
    batch_size: int = 64,
    learning_rate: float = 2e-4,
    seed: int = 0,
) -> ClassifierFeatureExtractor:
    """Supervised training of the evaluation classifier on real images.

    Kept independent from the generative model so accuracy judgments do not
    share weights with the generator being judged.
    """
    categories = list(dataset.categories)
    torch.manual_seed(seed)
    net = Classifier(len(categories), resolution, base_width)
    init_weights(net)
    optimizer = torch.optim.Adam(net.parameters(), lr=learning_rate, betas=(0.5, 0.999))
    loss_fn = torch.nn.CrossEntropyLoss()
    net.train()
    for epoch in range(1, epochs + 1):
        for batch in dataset.batches(batch_size, seed=seed, epoch=epoch):
            images = to_batch_tensor(np.asarray(batch["image"], dtype=np.float32))
            labels = torch.as_tensor(np.asarray(batch["category_index"]), dtype=torch.int64)
            loss = loss_fn(net(images), labels)
            optimizer.zero_grad(set_to_none=True)
            loss.backward()
            optimizer.step()
    net.eval()
    return ClassifierFeatureExtractor(classifier=net, categories=categories)
