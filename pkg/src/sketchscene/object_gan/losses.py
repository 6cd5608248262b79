"""Adversarial losses: Wasserstein critics with gradient penalty, the
auxiliary classification term, and the latent reconstruction penalty.

Sign conventions, fixed here once:

* critics minimize  E[D(fake)] - E[D(real)] (+ gradient penalty),
* generators minimize -E[D(fake)] per adversary,
* the classifier and the image generator both push classification
  likelihood up, so both minimize the (focal) negative log-likelihood —
  the classifier on real images with true labels, the image generator on
  its own outputs with the requested labels.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np
import torch
import torch.nn.functional as F

from ..errors import InputError

OPTIMIZER_KINDS = ("rmsprop-wgangp", "rmsprop-wgan", "adam-dcgan")


def scalar(value: torch.Tensor) -> float:
    """Detach a 0-dim loss tensor into a plain float for reporting."""
    return float(value.detach())


def to_batch_tensor(array: np.ndarray) -> torch.Tensor:
    """HWC / HW (optionally batched) numpy image(s) -> NCHW float tensor."""
    arr = np.asarray(array, dtype=np.float32)
    if arr.ndim == 2:
        arr = arr[None, None]
    elif arr.ndim == 3 and arr.shape[-1] in (1, 3, 4):
        arr = arr.transpose(2, 0, 1)[None]
    elif arr.ndim == 3:  # batch of single-channel images
        arr = arr[:, None]
    elif arr.ndim == 4:
        arr = arr.transpose(0, 3, 1, 2)
    else:
        raise InputError(f"cannot interpret array of shape {arr.shape} as images")
    return torch.from_numpy(np.ascontiguousarray(arr))


def from_batch_tensor(tensor: torch.Tensor) -> np.ndarray:
    """NCHW tensor -> batched HWC (3-channel) or HW (1-channel) numpy array."""
    arr = tensor.detach().cpu().numpy()
    if arr.shape[1] == 1:
        return arr[:, 0]
    return arr.transpose(0, 2, 3, 1)


def join_pair_tensor(edges: torch.Tensor, images: torch.Tensor) -> torch.Tensor:
    """Side-by-side (edge | image) composite; edge replicated to 3 channels."""
    if edges.shape[0] != images.shape[0] or edges.shape[-2:] != images.shape[-2:]:
        raise InputError(
            f"edge batch {tuple(edges.shape)} does not match image batch {tuple(images.shape)}"
        )
    return torch.cat([edges.expand(-1, 3, -1, -1), images], dim=3)


def gradient_penalty(
    critic,
    real,
    fake,
    weight: float,
    rng: np.random.Generator,
    with_details: bool = False,
):
    """weight * E[(||grad critic(mix)||_2 - 1)^2] at per-sample random mixes.

    ``critic`` maps a tensor batch to per-sample scores.  Returns a 0-dim
    tensor (differentiable, so training can backpropagate through it); with
    ``with_details`` also returns the mix points and their gradients for
    numerical cross-checks.
    """
    real_t = real if isinstance(real, torch.Tensor) else torch.as_tensor(real, dtype=torch.float32)
    fake_t = fake if isinstance(fake, torch.Tensor) else torch.as_tensor(fake, dtype=torch.float32)
    if real_t.shape != fake_t.shape:
        raise InputError(
            f"real batch shape {tuple(real_t.shape)} != fake batch shape {tuple(fake_t.shape)}"
        )
    eps_shape = (real_t.shape[0],) + (1,) * (real_t.ndim - 1)
    eps = torch.from_numpy(
        rng.uniform(size=eps_shape).astype(np.float32)
    )
    mix = (eps * real_t.detach() + (1.0 - eps) * fake_t.detach()).requires_grad_(True)
    scores = critic(mix)
    grads = torch.autograd.grad(
        scores.sum(), mix, create_graph=torch.is_grad_enabled()
    )[0]
    norms = grads.flatten(1).norm(2, dim=1)
    penalty = weight * ((norms - 1.0) ** 2).mean()
    if with_details:
        return penalty, mix, grads
    return penalty


def classification_loss(
    logits: torch.Tensor,
    targets: torch.Tensor,
    kind: str = "focal",
    gamma: float = 2.0,
) -> torch.Tensor:
    """Negative log-likelihood of the target class; 'focal' down-weights
    confident examples by (1 - p)^gamma with uniform class weighting."""
    log_probs = F.log_softmax(logits, dim=1)
    target_logp = log_probs.gather(1, targets.view(-1, 1)).squeeze(1)
    if kind == "ce":
        return -target_logp.mean()
    if kind == "focal":
        focus = (1.0 - target_logp.exp()) ** gamma
        return -(focus * target_logp).mean()
    raise InputError(f"unknown classifier loss kind {kind!r}")


@dataclass
class LossReport:
    """Every scalar tracked per training step (all plain floats)."""

    critic_joint: float = 0.0
    critic_edge: float = 0.0
    critic_image: float = 0.0
    gp_joint: float = 0.0
    gp_edge: float = 0.0
    gp_image: float = 0.0
    gen_edge: float = 0.0
    gen_image: float = 0.0
    classifier: float = 0.0
    latent_l1: float = 0.0

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    def to_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in self.field_names()}

    def is_finite(self) -> bool:
        return all(np.isfinite(v) for v in self.to_dict().values())


def critic_pair_loss(critic_fn, real: torch.Tensor, fake: torch.Tensor, mode: str) -> torch.Tensor:
    """Adversary-side loss on one real/fake pair for the given regime."""
    if mode == "adam-dcgan":
        real_scores, fake_scores = critic_fn(real), critic_fn(fake)
        return F.binary_cross_entropy_with_logits(
            real_scores, torch.ones_like(real_scores)
        ) + F.binary_cross_entropy_with_logits(fake_scores, torch.zeros_like(fake_scores))
    return critic_fn(fake).mean() - critic_fn(real).mean()


def generator_pair_loss(critic_fn, fake: torch.Tensor, mode: str) -> torch.Tensor:
    """Generator-side loss against one adversary."""
    if mode == "adam-dcgan":
        fake_scores = critic_fn(fake)
        return F.binary_cross_entropy_with_logits(fake_scores, torch.ones_like(fake_scores))
    return -critic_fn(fake).mean()


def latent_reconstruction(noise: torch.Tensor, recovered: torch.Tensor) -> torch.Tensor:
    """Mean over the batch of the L1 norm between sampled and recovered noise."""
    return (noise - recovered).abs().sum(dim=1).mean()
