"""Model bundle: configuration, network construction, checkpoint round trip."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import torch

from .. import checkpoint as ckpt
from ..errors import ConfigurationError
from ..latent import LatentCode
from .losses import OPTIMIZER_KINDS
from .networks import Classifier, Critic, Generator, SketchEncoder, init_weights

EDGE_STYLE_NAMES = ("xdog", "standard")


@dataclass(frozen=True)
class TrainConfig:
    num_categories: int
    noise_dim: int = 128
    resolution: int = 64
    base_width: int = 64
    optimizer_kind: str = "rmsprop-wgangp"
    learning_rate: float = 2e-4
    gp_weight: float = 10.0
    critic_steps_per_gen_step: int | None = None  # None -> regime default
    clamp_value: float = 0.01
    epochs: int = 30
    batch_size: int = 64
    classifier_loss: str = "focal"
    focal_gamma: float = 2.0
    latent_weight: float = 1.0
    condition_critics: bool = True
    use_joint_critic: bool = True
    use_edge_critic: bool = True
    use_image_critic: bool = True
    use_classifier: bool = True
    multiscale: bool = False
    checkpoint_interval: int = 10
    edge_styles: tuple[str, ...] = ("xdog", "standard")
    seed: int = 0

    def __post_init__(self):
        if self.num_categories < 1:
            raise ConfigurationError("num_categories must be >= 1")
        if self.noise_dim < 1:
            raise ConfigurationError("noise_dim must be >= 1")
        if self.resolution not in (64, 128):
            raise ConfigurationError(
                f"resolution must be 64 or 128, got {self.resolution}"
            )
        if self.optimizer_kind not in OPTIMIZER_KINDS:
            raise ConfigurationError(
                f"optimizer_kind must be one of {OPTIMIZER_KINDS}, got {self.optimizer_kind!r}"
            )
        if self.gp_weight < 0:
            raise ConfigurationError("gp_weight must be >= 0")
        if self.epochs < 0:
            raise ConfigurationError("epochs must be >= 0")
        if self.batch_size < 1:
            raise ConfigurationError("batch_size must be >= 1")
        if self.checkpoint_interval < 1:
            raise ConfigurationError("checkpoint_interval must be >= 1")
        if self.classifier_loss not in ("focal", "ce"):
            raise ConfigurationError("classifier_loss must be 'focal' or 'ce'")
        if self.multiscale and self.resolution != 128:
            raise ConfigurationError("multiscale critics are defined only at 128x128")
        if not self.edge_styles or any(s not in EDGE_STYLE_NAMES for s in self.edge_styles):
            raise ConfigurationError(
                f"edge_styles must be drawn from {EDGE_STYLE_NAMES}, got {self.edge_styles}"
            )
        if self.critic_steps_per_gen_step is not None and self.critic_steps_per_gen_step < 1:
            raise ConfigurationError("critic_steps_per_gen_step must be >= 1")

    @property
    def critic_steps(self) -> int:
        if self.critic_steps_per_gen_step is not None:
            return self.critic_steps_per_gen_step
        return 1 if self.optimizer_kind == "adam-dcgan" else 5

    @property
    def latent_dim(self) -> int:
        return self.noise_dim + self.num_categories

    def to_dict(self) -> dict:
        out = asdict(self)
        out["edge_styles"] = list(self.edge_styles)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "TrainConfig":
        data = dict(data)
        data["edge_styles"] = tuple(data.get("edge_styles", EDGE_STYLE_NAMES))
        return cls(**data)


@dataclass
class ObjectModelBundle:
    """All networks of the object model plus the config that shaped them."""

    config: TrainConfig
    categories: list[str]
    edge_generator: Generator
    image_generator: Generator
    encoder: SketchEncoder
    classifier: Classifier
    joint_critic: Critic
    edge_critic: Critic
    image_critic: Critic
    half_critics: dict[str, Critic] = field(default_factory=dict)

    @classmethod
    def initialize(cls, config: TrainConfig, categories: list[str]) -> "ObjectModelBundle":
        if len(categories) != config.num_categories:
            raise ConfigurationError(
                f"{len(categories)} category names for num_categories={config.num_categories}"
            )
        torch.manual_seed(config.seed)
        cond = config.num_categories if config.condition_critics else 0
        r, w = config.resolution, config.base_width
        bundle = cls(
            config=config,
            categories=list(categories),
            edge_generator=Generator(config.latent_dim, 1, r, w),
            image_generator=Generator(config.latent_dim, 3, r, w),
            encoder=SketchEncoder(config.noise_dim, r, w),
            classifier=Classifier(config.num_categories, r, w),
            joint_critic=Critic(3, r, w, width_factor=2, condition_dim=cond),
            edge_critic=Critic(1, r, w, condition_dim=cond),
            image_critic=Critic(3, r, w, condition_dim=cond),
        )
        if config.multiscale:
            bundle.half_critics = {
                "joint": Critic(3, r // 2, w, width_factor=2, condition_dim=cond),
                "edge": Critic(1, r // 2, w, condition_dim=cond),
                "image": Critic(3, r // 2, w, condition_dim=cond),
            }
        for module in bundle.modules().values():
            init_weights(module)
        return bundle

    def modules(self) -> dict[str, torch.nn.Module]:
        named = {
            "edge_generator": self.edge_generator,
            "image_generator": self.image_generator,
            "encoder": self.encoder,
            "classifier": self.classifier,
            "joint_critic": self.joint_critic,
            "edge_critic": self.edge_critic,
            "image_critic": self.image_critic,
        }
        for key, critic in self.half_critics.items():
            named[f"half_{key}_critic"] = critic
        return named

    def critic_fn(self, which: str, onehot: torch.Tensor | None):
        """Score function for one critic, with conditioning baked in."""
        critic = {
            "joint": self.joint_critic,
            "edge": self.edge_critic,
            "image": self.image_critic,
        }[which]
        if self.config.condition_critics:
            return lambda x: critic(x, onehot)
        return lambda x: critic(x)

    def eval_mode(self) -> "ObjectModelBundle":
        for module in self.modules().values():
            module.eval()
        return self

    def train_mode(self) -> "ObjectModelBundle":
        for module in self.modules().values():
            module.train()
        return self

    def codes_to_tensors(
        self, codes: list[LatentCode]
    ) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
        """Latent code batch -> (full input, noise part, category indices)."""
        full = torch.from_numpy(np.stack([c.concat() for c in codes]))
        noise = torch.from_numpy(np.stack([c.noise for c in codes]).astype(np.float32))
        labels = torch.as_tensor([c.category_index for c in codes], dtype=torch.int64)
        return full, noise, labels

    def onehot_tensor(self, labels: torch.Tensor) -> torch.Tensor:
        return torch.nn.functional.one_hot(
            labels, self.config.num_categories
        ).to(torch.float32)

    def save(self, path: str | Path, meta: dict | None = None) -> Path:
        arrays = {}
        for name, module in self.modules().items():
            for key, value in module.state_dict().items():
                arrays[f"{name}.{key}"] = value.detach().cpu().numpy()
        config = {"train": self.config.to_dict(), "categories": self.categories}
        return ckpt.save_checkpoint(path, arrays, config, meta or {})

    @classmethod
    def load(cls, path: str | Path) -> tuple["ObjectModelBundle", dict]:
        arrays, config, meta = ckpt.load_checkpoint(path)
        train_config = TrainConfig.from_dict(config["train"])
        bundle = cls.initialize(train_config, config["categories"])
        for name, module in bundle.modules().items():
            prefix = f"{name}."
            state = {
                key[len(prefix):]: torch.from_numpy(np.asarray(value))
                for key, value in arrays.items()
                if key.startswith(prefix)
            }
            module.load_state_dict(state, strict=True)
        bundle.eval_mode()
        return bundle, meta
