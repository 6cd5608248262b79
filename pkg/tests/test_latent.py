from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sketchscene.errors import InputError
from sketchscene.latent import LatentCode, one_hot, sample_latent, sample_latent_batch


@given(st.integers(1, 32), st.data())
def test_one_hot_is_indicator(num_categories, data):
    index = data.draw(st.integers(0, num_categories - 1))
    vec = one_hot(num_categories, index)
    assert vec.shape == (num_categories,)
    assert vec.sum() == 1.0
    assert vec[index] == 1.0
    assert vec.dtype == np.float32


@pytest.mark.parametrize("index", [-1, 3, 100])
def test_one_hot_out_of_range(index):
    with pytest.raises(InputError):
        one_hot(3, index)


def test_sample_latent_deterministic_per_seed():
    a = sample_latent(4, 2, 8, np.random.default_rng(7))
    b = sample_latent(4, 2, 8, np.random.default_rng(7))
    c = sample_latent(4, 2, 8, np.random.default_rng(8))
    np.testing.assert_array_equal(a.noise, b.noise)
    assert not np.array_equal(a.noise, c.noise)


def test_concat_layout_noise_then_onehot():
    code = sample_latent(3, 1, 5, np.random.default_rng(0))
    flat = code.concat()
    assert flat.shape == (8,)
    np.testing.assert_array_equal(flat[:5], code.noise)
    np.testing.assert_array_equal(flat[5:], code.onehot)


def test_sample_latent_batch_matches_requested_categories():
    cats = np.array([0, 1, 1, 0])
    codes = sample_latent_batch(2, cats, 6, np.random.default_rng(3))
    assert len(codes) == 4
    assert [int(np.argmax(c.onehot)) for c in codes] == cats.tolist()
    # noise draws differ between batch entries
    assert not np.array_equal(codes[0].noise, codes[1].noise)


def test_latent_code_properties():
    code = LatentCode(noise=np.zeros(4, dtype=np.float32), onehot=one_hot(3, 2))
    assert code.noise_dim == 4
    assert code.num_categories == 3
    assert code.category_index == 2


def test_sample_latent_bad_noise_dim():
    with pytest.raises(InputError):
        sample_latent(2, 0, 0, np.random.default_rng(0))
