"""Loss primitives, checked against hand-computed values.

The gradient-penalty suite uses linear critics whose gradient field is known
in closed form: for f(x) = k * <v, x> with ||v|| = 1 the gradient norm is k
everywhere, so the penalty must equal weight * (k - 1)^2 regardless of the
interpolation points.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
import torch
from hypothesis import given
from hypothesis import strategies as st

from sketchscene.errors import InputError
from sketchscene.object_gan.losses import (
    LossReport,
    classification_loss,
    critic_pair_loss,
    from_batch_tensor,
    generator_pair_loss,
    gradient_penalty,
    join_pair_tensor,
    latent_reconstruction,
    to_batch_tensor,
)


class _LinearCritic(torch.nn.Module):
    """f(x) = scale * <direction, x>, with a unit-norm direction."""

    def __init__(self, shape, scale: float, dtype=torch.float32, seed: int = 0):
        super().__init__()
        gen = torch.Generator().manual_seed(seed)
        direction = torch.randn(shape, generator=gen, dtype=dtype)
        self.direction = direction / direction.norm()
        self.scale = scale

    def forward(self, x):
        return self.scale * (x * self.direction).flatten(1).sum(dim=1)


def _batches(shape=(4, 3, 8, 8), seed=1):
    gen = torch.Generator().manual_seed(seed)
    return torch.randn(shape, generator=gen), torch.randn(shape, generator=gen)


@pytest.mark.parametrize("scale,expected", [(1.0, 0.0), (2.0, 10.0), (3.0, 40.0)])
def test_gradient_penalty_closed_form(scale, expected):
    real, fake = _batches()
    critic = _LinearCritic(real.shape[1:], scale)
    penalty = gradient_penalty(critic, real, fake, 10.0, np.random.default_rng(0))
    assert float(penalty) == pytest.approx(expected, abs=1e-5)


def test_gradient_penalty_scales_with_weight():
    real, fake = _batches()
    critic = _LinearCritic(real.shape[1:], 2.0)
    rng = lambda: np.random.default_rng(0)
    p10 = float(gradient_penalty(critic, real, fake, 10.0, rng()))
    p5 = float(gradient_penalty(critic, real, fake, 5.0, rng()))
    assert p10 == pytest.approx(2 * p5, rel=1e-6)


def test_gradient_penalty_gradients_match_finite_differences():
    torch.manual_seed(2)
    real = torch.randn(2, 1, 6, 6, dtype=torch.float64)
    fake = torch.randn(2, 1, 6, 6, dtype=torch.float64)
    critic = torch.nn.Sequential(
        torch.nn.Conv2d(1, 4, 3, 2, 1), torch.nn.Tanh(), torch.nn.Flatten(), torch.nn.Linear(36, 1)
    ).double()
    fn = lambda x: critic(x).squeeze(1)

    _, mix, grads = gradient_penalty(
        fn, real, fake, 10.0, np.random.default_rng(3), with_details=True
    )
    x = mix.detach()
    h = 1e-5
    rng = np.random.default_rng(4)
    for _ in range(12):
        n = int(rng.integers(0, x.shape[0]))
        i = int(rng.integers(0, x.shape[2]))
        j = int(rng.integers(0, x.shape[3]))
        plus, minus = x.clone(), x.clone()
        plus[n, 0, i, j] += h
        minus[n, 0, i, j] -= h
        with torch.no_grad():
            numeric = (fn(plus)[n] - fn(minus)[n]) / (2 * h)
        analytic = float(grads[n, 0, i, j].detach())
        assert analytic == pytest.approx(float(numeric), rel=1e-3, abs=1e-8)


def test_gradient_penalty_shape_mismatch():
    real, fake = _batches()
    critic = _LinearCritic(real.shape[1:], 1.0)
    with pytest.raises(InputError):
        gradient_penalty(critic, real, fake[:2], 10.0, np.random.default_rng(0))


def test_gradient_penalty_is_differentiable():
    real, fake = _batches(shape=(2, 1, 4, 4))
    lin = torch.nn.Linear(16, 1)
    fn = lambda x: lin(x.flatten(1)).squeeze(1)
    penalty = gradient_penalty(fn, real, fake, 10.0, np.random.default_rng(0))
    penalty.backward()
    assert lin.weight.grad is not None
    assert torch.isfinite(lin.weight.grad).all()


def _manual_focal(logits, targets, gamma):
    logp = torch.log_softmax(logits, dim=1)
    vals = []
    for row, t in zip(logp, targets):
        p = math.exp(row[t])
        vals.append(-((1 - p) ** gamma) * float(row[t]))
    return sum(vals) / len(vals)


def test_classification_loss_focal_matches_manual():
    logits = torch.tensor([[2.0, -1.0, 0.5], [0.0, 0.0, 0.0]])
    targets = torch.tensor([0, 2])
    got = float(classification_loss(logits, targets, "focal", gamma=2.0))
    assert got == pytest.approx(_manual_focal(logits, targets, 2.0), rel=1e-6)


def test_classification_loss_ce_matches_torch():
    logits = torch.randn(5, 4, generator=torch.Generator().manual_seed(0))
    targets = torch.tensor([0, 1, 2, 3, 1])
    got = float(classification_loss(logits, targets, "ce"))
    want = float(torch.nn.functional.cross_entropy(logits, targets))
    assert got == pytest.approx(want, rel=1e-6)


@given(st.integers(0, 2**31 - 1))
def test_focal_never_exceeds_ce(seed):
    gen = torch.Generator().manual_seed(seed)
    logits = torch.randn(4, 3, generator=gen)
    targets = torch.randint(0, 3, (4,), generator=gen)
    focal = float(classification_loss(logits, targets, "focal", gamma=2.0))
    ce = float(classification_loss(logits, targets, "ce"))
    assert focal <= ce + 1e-7
    assert focal >= 0.0


def test_classification_loss_gamma_zero_equals_ce():
    gen = torch.Generator().manual_seed(1)
    logits = torch.randn(6, 3, generator=gen)
    targets = torch.randint(0, 3, (6,), generator=gen)
    focal0 = float(classification_loss(logits, targets, "focal", gamma=0.0))
    ce = float(classification_loss(logits, targets, "ce"))
    assert focal0 == pytest.approx(ce, rel=1e-6)


def test_classification_loss_unknown_kind():
    with pytest.raises(InputError):
        classification_loss(torch.zeros(1, 2), torch.zeros(1, dtype=torch.int64), "hinge")


def test_wasserstein_critic_loss_sign():
    """Critic loss is E[D(fake)] - E[D(real)], computed by hand."""
    fn = lambda x: x.flatten(1).sum(dim=1)
    real = torch.ones(2, 1, 2, 2)
    fake = torch.zeros(2, 1, 2, 2)
    loss = critic_pair_loss(fn, real, fake, "rmsprop-wgangp")
    assert float(loss) == pytest.approx(0.0 - 4.0)
    gen = generator_pair_loss(fn, fake + 0.5, "rmsprop-wgangp")
    assert float(gen) == pytest.approx(-2.0)


def test_dcgan_losses_use_bce():
    fn = lambda x: x.flatten(1).mean(dim=1)
    real = torch.zeros(1, 1, 2, 2)
    fake = torch.zeros(1, 1, 2, 2)
    loss = float(critic_pair_loss(fn, real, fake, "adam-dcgan"))
    # both scores are 0 -> BCE(0, 1) + BCE(0, 0) = 2 * ln 2
    assert loss == pytest.approx(2 * math.log(2), rel=1e-6)
    gen = float(generator_pair_loss(fn, fake, "adam-dcgan"))
    assert gen == pytest.approx(math.log(2), rel=1e-6)


def test_latent_reconstruction_manual():
    noise = torch.tensor([[1.0, -1.0], [0.5, 0.5]])
    recovered = torch.tensor([[0.0, 0.0], [0.5, 0.5]])
    # per-sample L1 sums: 2.0 and 0.0 -> mean 1.0
    assert float(latent_reconstruction(noise, recovered)) == pytest.approx(1.0)


def test_to_batch_tensor_layouts():
    hw = np.zeros((4, 5), dtype=np.float32)
    hwc = np.zeros((4, 5, 3), dtype=np.float32)
    fused = np.zeros((4, 5, 4), dtype=np.float32)
    batch_gray = np.zeros((2, 4, 5), dtype=np.float32)
    batch_color = np.zeros((2, 4, 5, 3), dtype=np.float32)
    assert to_batch_tensor(hw).shape == (1, 1, 4, 5)
    assert to_batch_tensor(hwc).shape == (1, 3, 4, 5)
    assert to_batch_tensor(fused).shape == (1, 4, 4, 5)
    assert to_batch_tensor(batch_gray).shape == (2, 1, 4, 5)
    assert to_batch_tensor(batch_color).shape == (2, 3, 4, 5)
    with pytest.raises(InputError):
        to_batch_tensor(np.zeros((2, 2, 2, 2, 2), dtype=np.float32))


def test_batch_tensor_roundtrip():
    rng = np.random.default_rng(0)
    color = rng.uniform(-1, 1, size=(2, 4, 5, 3)).astype(np.float32)
    gray = rng.uniform(-1, 1, size=(2, 4, 5)).astype(np.float32)
    np.testing.assert_allclose(from_batch_tensor(to_batch_tensor(color)), color, atol=1e-7)
    np.testing.assert_allclose(from_batch_tensor(to_batch_tensor(gray)), gray, atol=1e-7)


def test_join_pair_tensor_layout():
    edges = torch.zeros(2, 1, 4, 4)
    images = torch.ones(2, 3, 4, 4)
    joined = join_pair_tensor(edges, images)
    assert joined.shape == (2, 3, 4, 8)
    assert torch.equal(joined[..., :4], torch.zeros(2, 3, 4, 4))
    assert torch.equal(joined[..., 4:], images)
    with pytest.raises(InputError):
        join_pair_tensor(torch.zeros(2, 1, 4, 4), torch.ones(2, 3, 8, 8))


def test_loss_report_round_trip_and_finiteness():
    report = LossReport(critic_joint=1.5, latent_l1=2.0)
    d = report.to_dict()
    assert set(d) == set(LossReport.field_names())
    assert report.is_finite()
    report.gen_edge = float("nan")
    assert not report.is_finite()
