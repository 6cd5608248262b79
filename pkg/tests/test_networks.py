from __future__ import annotations

import numpy as np
import pytest
import torch

from sketchscene.errors import ConfigurationError
from sketchscene.object_gan.networks import Classifier, Critic, Generator, SketchEncoder


@pytest.mark.parametrize("resolution", [64, 128])
def test_generator_output_shape_and_range(resolution):
    gen = Generator(latent_dim=10, out_channels=3, resolution=resolution, base_width=8)
    gen.eval()
    with torch.no_grad():
        out = gen(torch.randn(2, 10))
    assert out.shape == (2, 3, resolution, resolution)
    assert out.abs().max() <= 1.0


def test_generator_single_channel():
    gen = Generator(latent_dim=6, out_channels=1, resolution=64, base_width=8)
    with torch.no_grad():
        assert gen(torch.randn(1, 6)).shape == (1, 1, 64, 64)


def test_generator_rejects_wrong_latent_width():
    gen = Generator(latent_dim=6, out_channels=3, resolution=64, base_width=8)
    with pytest.raises(ConfigurationError):
        gen(torch.randn(1, 7))


def test_generator_rejects_bad_resolution():
    with pytest.raises(ConfigurationError):
        Generator(latent_dim=6, out_channels=3, resolution=48, base_width=8)


@pytest.mark.parametrize("width_factor,condition_dim", [(1, 0), (2, 0), (1, 4)])
def test_critic_scores_are_scalars(width_factor, condition_dim):
    critic = Critic(
        in_channels=3,
        resolution=64,
        base_width=8,
        width_factor=width_factor,
        condition_dim=condition_dim,
    )
    x = torch.randn(3, 3, 64, 64 * width_factor)
    onehot = torch.eye(condition_dim)[:3] if condition_dim else None
    with torch.no_grad():
        scores = critic(x, onehot) if condition_dim else critic(x)
    assert scores.shape == (3,)


def test_conditioning_changes_the_score():
    torch.manual_seed(0)
    critic = Critic(in_channels=3, resolution=64, base_width=8, condition_dim=2)
    x = torch.randn(1, 3, 64, 64)
    with torch.no_grad():
        s0 = critic(x, torch.tensor([[1.0, 0.0]]))
        s1 = critic(x, torch.tensor([[0.0, 1.0]]))
    assert not torch.equal(s0, s1)


def test_encoder_output_dim():
    enc = SketchEncoder(noise_dim=16, resolution=64, base_width=8)
    with torch.no_grad():
        out = enc(torch.randn(2, 1, 64, 64).clamp(-1, 1))
    assert out.shape == (2, 16)


def test_classifier_logits_and_features():
    clf = Classifier(num_categories=3, resolution=64, base_width=8)
    x = torch.randn(2, 3, 64, 64).clamp(-1, 1)
    with torch.no_grad():
        logits = clf(x)
        feats = clf.features(x)
    assert logits.shape == (2, 3)
    assert feats.shape == (2, clf.feature_dim)


def test_initialization_is_seeded():
    torch.manual_seed(5)
    a = Generator(latent_dim=6, out_channels=3, resolution=64, base_width=8)
    torch.manual_seed(5)
    b = Generator(latent_dim=6, out_channels=3, resolution=64, base_width=8)
    for pa, pb in zip(a.parameters(), b.parameters()):
        assert torch.equal(pa, pb)
