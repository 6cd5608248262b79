"""Training loop for the object model, plus the loss-assembly audit op.

Schedule: every batch runs `critic_steps` adversary updates (fakes
re-sampled each time, reals reused) followed by one generator update, so
critics always take critic_steps updates per generator step.  The joint
adversary's generator-side term belongs to BOTH generator losses, so the
two generator updates backpropagate separately — summing them would
double the shared gradient.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F

from ..errors import DataError, InputError, TrainingDiverged
from ..latent import LatentCode, sample_latent_batch
from .losses import (
    LossReport,
    scalar,
    classification_loss,
    critic_pair_loss,
    generator_pair_loss,
    gradient_penalty,
    join_pair_tensor,
    latent_reconstruction,
    to_batch_tensor,
)
from .model import ObjectModelBundle, TrainConfig

_CRITIC_NAMES = ("joint", "edge", "image")


def _half(x: torch.Tensor) -> torch.Tensor:
    return F.avg_pool2d(x, 2)


def _enabled_critics(config: TrainConfig) -> list[str]:
    flags = {
        "joint": config.use_joint_critic,
        "edge": config.use_edge_critic,
        "image": config.use_image_critic,
    }
    return [name for name in _CRITIC_NAMES if flags[name]]


def _real_fake(name: str, reals: dict, fakes: dict) -> tuple[torch.Tensor, torch.Tensor]:
    return reals[name], fakes[name]


def compute_losses(
    bundle: ObjectModelBundle,
    batch: dict,
    codes: list[LatentCode],
    rng: np.random.Generator | None = None,
    fake_edges: torch.Tensor | None = None,
    fake_images: torch.Tensor | None = None,
    edge_style: str | None = None,
    with_terms: bool = False,
):
    """Assemble every loss term for one (real batch, latent batch) pair.

    Used for audits and tests; the training loop computes the same terms
    but spreads them across its per-network update sequence.  ``fake_edges``
    / ``fake_images`` override the generator outputs, which lets callers pin
    fakes equal to reals.  Returns a LossReport of floats; with
    ``with_terms`` also a dict of the individual generator-side terms.
    """
    config = bundle.config
    if len(codes) == 0 or len(batch.get("image", ())) == 0:
        raise InputError("empty batch")
    if rng is None:
        rng = np.random.default_rng([config.seed, 909])
    style = edge_style or config.edge_styles[0]

    real_images = to_batch_tensor(batch["image"])
    real_edges = to_batch_tensor(batch[f"edge_{style}"])
    labels = torch.as_tensor(np.asarray(batch["category_index"]), dtype=torch.int64)
    onehot = bundle.onehot_tensor(labels)

    full, noise, gen_labels = bundle.codes_to_tensors(codes)
    gen_onehot = bundle.onehot_tensor(gen_labels)
    if fake_edges is None:
        fake_edges = bundle.edge_generator(full)
    if fake_images is None:
        fake_images = bundle.image_generator(full)

    reals = {"joint": join_pair_tensor(real_edges, real_images), "edge": real_edges, "image": real_images}
    fakes = {"joint": join_pair_tensor(fake_edges, fake_images), "edge": fake_edges, "image": fake_images}

    report = LossReport()
    terms: dict[str, float] = {}
    use_gp = config.optimizer_kind == "rmsprop-wgangp"
    for name in _enabled_critics(config):
        real, fake = _real_fake(name, reals, fakes)
        fn = bundle.critic_fn(name, onehot)
        d_loss = critic_pair_loss(fn, real, fake.detach(), config.optimizer_kind)
        gp = (
            gradient_penalty(fn, real, fake, config.gp_weight, rng)
            if use_gp
            else torch.zeros(())
        )
        gen_fn = bundle.critic_fn(name, gen_onehot)
        g_term = generator_pair_loss(gen_fn, fake, config.optimizer_kind)
        if config.multiscale:
            half = bundle.half_critics[name]
            cond = (lambda x: half(x, gen_onehot)) if config.condition_critics else half
            g_term = g_term + generator_pair_loss(cond, _half(fake), config.optimizer_kind)
        setattr(report, f"critic_{name}", scalar(d_loss))
        setattr(report, f"gp_{name}", scalar(gp))
        terms[f"gen_{name}"] = scalar(g_term)

    report.gen_edge = terms.get("gen_joint", 0.0) + terms.get("gen_edge", 0.0)
    report.gen_image = terms.get("gen_joint", 0.0) + terms.get("gen_image", 0.0)
    if config.use_classifier:
        report.classifier = scalar(
            classification_loss(
                bundle.classifier(real_images), labels, config.classifier_loss, config.focal_gamma
            )
        )
        terms["classification_of_fakes"] = scalar(
            classification_loss(
                bundle.classifier(fake_images), gen_labels, config.classifier_loss, config.focal_gamma
            )
        )
        report.gen_image += terms["classification_of_fakes"]
    report.latent_l1 = scalar(latent_reconstruction(noise, bundle.encoder(fake_edges)))
    if with_terms:
        return report, terms
    return report


@dataclass
class TrainResult:
    bundle: ObjectModelBundle
    checkpoints: list[Path]
    loss_log: Path
    history: list[dict]
    epoch_stats: list[dict]


def _make_optimizer(params, config: TrainConfig):
    if config.optimizer_kind == "adam-dcgan":
        return torch.optim.Adam(params, lr=config.learning_rate, betas=(0.5, 0.999))
    return torch.optim.RMSprop(params, lr=config.learning_rate)


def _check_dataset(dataset, config: TrainConfig) -> list[str]:
    categories = list(dataset.categories)
    if len(categories) != config.num_categories:
        raise DataError(
            f"dataset has {len(categories)} categories, config expects {config.num_categories}"
        )
    counts = dataset.category_counts()
    empty = sorted(cat for cat in categories if counts.get(cat, 0) == 0)
    if empty:
        raise DataError(f"categories with no training examples: {empty}")
    probe = dataset.load(0)["image"]
    if probe.shape[:2] != (config.resolution, config.resolution):
        raise DataError(
            f"dataset images are {probe.shape[1]}x{probe.shape[0]}, "
            f"config expects {config.resolution}x{config.resolution}"
        )
    return categories


def train_object_model(dataset, config: TrainConfig, out_dir: str | Path) -> TrainResult:
    """Run the full adversarial training schedule over ``dataset``.

    Emits checkpoint_epochNNNN.npz at epoch 0, every checkpoint_interval
    epochs, and the final epoch; appends one row per generator step to
    losses.csv.  Non-finite losses abort with a diagnostic checkpoint.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    categories = _check_dataset(dataset, config)

    bundle = ObjectModelBundle.initialize(config, categories).train_mode()
    modules = bundle.modules()
    optimizers = {name: _make_optimizer(m.parameters(), config) for name, m in modules.items()}

    def critic_modules(name: str) -> list[str]:
        names = [f"{name}_critic"]
        if config.multiscale:
            names.append(f"half_{name}_critic")
        return names

    loss_log = out_dir / "losses.csv"
    history: list[dict] = []
    epoch_stats: list[dict] = []
    checkpoints: list[Path] = []

    def save(tag_epoch: int, meta_extra: dict | None = None) -> Path:
        meta = {"epoch": tag_epoch, "optimizer_kind": config.optimizer_kind}
        meta.update(meta_extra or {})
        path = out_dir / f"checkpoint_epoch{tag_epoch:04d}.npz"
        bundle.save(path, meta)
        checkpoints.append(path)
        return path

    save(0)
    use_gp = config.optimizer_kind == "rmsprop-wgangp"
    clamp = config.optimizer_kind == "rmsprop-wgan"

    with loss_log.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("epoch", "step") + LossReport.field_names())

        for epoch in range(1, config.epochs + 1):
            rng = np.random.default_rng([config.seed, 31, epoch])
            epoch_reports: list[LossReport] = []
            for step, batch in enumerate(
                dataset.batches(config.batch_size, seed=config.seed, epoch=epoch)
            ):
                style = config.edge_styles[(epoch + step) % len(config.edge_styles)]
                real_images = to_batch_tensor(batch["image"])
                real_edges = to_batch_tensor(batch[f"edge_{style}"])
                labels = torch.as_tensor(
                    np.asarray(batch["category_index"]), dtype=torch.int64
                )
                onehot = bundle.onehot_tensor(labels)
                reals = {
                    "joint": join_pair_tensor(real_edges, real_images),
                    "edge": real_edges,
                    "image": real_images,
                }

                report = LossReport()
                for _ in range(config.critic_steps):
                    codes = sample_latent_batch(
                        config.num_categories, labels.numpy(), config.noise_dim, rng
                    )
                    full, _, _ = bundle.codes_to_tensors(codes)
                    with torch.no_grad():
                        fake_edges = bundle.edge_generator(full)
                        fake_images = bundle.image_generator(full)
                    fakes = {
                        "joint": join_pair_tensor(fake_edges, fake_images),
                        "edge": fake_edges,
                        "image": fake_images,
                    }
                    for name in _enabled_critics(config):
                        fn = bundle.critic_fn(name, onehot)
                        d_loss = critic_pair_loss(fn, reals[name], fakes[name], config.optimizer_kind)
                        gp = (
                            gradient_penalty(fn, reals[name], fakes[name], config.gp_weight, rng)
                            if use_gp
                            else torch.zeros(())
                        )
                        if config.multiscale:
                            half = bundle.half_critics[name]
                            hfn = (lambda x, h=half: h(x, onehot)) if config.condition_critics else half
                            d_loss = d_loss + critic_pair_loss(
                                hfn, _half(reals[name]), _half(fakes[name]), config.optimizer_kind
                            )
                            if use_gp:
                                gp = gp + gradient_penalty(
                                    hfn, _half(reals[name]), _half(fakes[name]), config.gp_weight, rng
                                )
                        for mod_name in critic_modules(name):
                            optimizers[mod_name].zero_grad(set_to_none=True)
                        (d_loss + gp).backward()
                        for mod_name in critic_modules(name):
                            optimizers[mod_name].step()
                            if clamp:
                                for p in modules[mod_name].parameters():
                                    p.data.clamp_(-config.clamp_value, config.clamp_value)
                        setattr(report, f"critic_{name}", scalar(d_loss))
                        setattr(report, f"gp_{name}", scalar(gp))

                    if config.use_classifier:
                        cls_loss = classification_loss(
                            bundle.classifier(real_images),
                            labels,
                            config.classifier_loss,
                            config.focal_gamma,
                        )
                        optimizers["classifier"].zero_grad(set_to_none=True)
                        cls_loss.backward()
                        optimizers["classifier"].step()
                        report.classifier = scalar(cls_loss)

                # generator step: fresh codes with uniformly random categories
                gen_cats = rng.integers(0, config.num_categories, size=len(labels))
                codes = sample_latent_batch(
                    config.num_categories, gen_cats, config.noise_dim, rng
                )
                full, noise, gen_labels = bundle.codes_to_tensors(codes)
                gen_onehot = bundle.onehot_tensor(gen_labels)
                fake_edges = bundle.edge_generator(full)
                fake_images = bundle.image_generator(full)
                fakes = {
                    "joint": join_pair_tensor(fake_edges, fake_images),
                    "edge": fake_edges,
                    "image": fake_images,
                }

                def gen_term(name: str) -> torch.Tensor:
                    fn = bundle.critic_fn(name, gen_onehot)
                    term = generator_pair_loss(fn, fakes[name], config.optimizer_kind)
                    if config.multiscale:
                        half = bundle.half_critics[name]
                        hfn = (lambda x, h=half: h(x, gen_onehot)) if config.condition_critics else half
                        term = term + generator_pair_loss(hfn, _half(fakes[name]), config.optimizer_kind)
                    return term

                zero = torch.zeros(())
                joint_term = gen_term("joint") if config.use_joint_critic else zero
                edge_term = gen_term("edge") if config.use_edge_critic else zero
                image_term = gen_term("image") if config.use_image_critic else zero
                latent_l1 = latent_reconstruction(noise, bundle.encoder(fake_edges))
                ac_fake = zero
                if config.use_classifier:
                    ac_fake = classification_loss(
                        bundle.classifier(fake_images),
                        gen_labels,
                        config.classifier_loss,
                        config.focal_gamma,
                    )
                gen_edge_loss = joint_term + edge_term
                gen_image_loss = joint_term + image_term + ac_fake

                # The joint term belongs to both generator losses, but a
                # single backward of joint + edge + image + classifier +
                # latent already hands each parameter set exactly the
                # gradient of its own loss: edge/image/classifier terms
                # touch only their own generator, and the shared joint term
                # flows once into each.
                total = (
                    joint_term
                    + edge_term
                    + image_term
                    + ac_fake
                    + config.latent_weight * latent_l1
                )
                for name in ("edge_generator", "image_generator", "encoder"):
                    optimizers[name].zero_grad(set_to_none=True)
                total.backward()
                for name in ("edge_generator", "image_generator", "encoder"):
                    optimizers[name].step()

                report.gen_edge = scalar(gen_edge_loss)
                report.gen_image = scalar(gen_image_loss)
                report.latent_l1 = scalar(latent_l1)

                if not report.is_finite():
                    path = save(epoch, {"diverged_at_step": step})
                    raise TrainingDiverged(
                        f"non-finite loss at epoch {epoch} step {step}", checkpoint_path=path
                    )
                writer.writerow(
                    [epoch, step] + [report.to_dict()[k] for k in LossReport.field_names()]
                )
                history.append({"epoch": epoch, "step": step, **report.to_dict()})
                epoch_reports.append(report)

            stats = {"epoch": epoch}
            for key in LossReport.field_names():
                stats[key] = float(np.mean([r.to_dict()[key] for r in epoch_reports]))
            epoch_stats.append(stats)
            if epoch % config.checkpoint_interval == 0 and epoch != config.epochs:
                save(epoch)
        if config.epochs > 0:
            save(config.epochs)

    bundle.eval_mode()
    return TrainResult(
        bundle=bundle,
        checkpoints=checkpoints,
        loss_log=loss_log,
        history=history,
        epoch_stats=epoch_stats,
    )
