import numpy as np
import pytest
from scipy.stats import chisquare

from app.core import Tensor
from app.shaping import SamplerStats, gumbel_draw, sample_gumbel, ste_combine


def test_near_degenerate_distribution_always_picks_dominant_symbol():
    draw = gumbel_draw(Tensor([1.0 - 1e-12, 1e-12]), 1.0, np.random.default_rng(0), batch=100_000)
    assert not np.any(draw.index)


def test_hard_index_frequencies_follow_probs():
    probs = np.array([0.4, 0.3, 0.2, 0.1])
    draw = gumbel_draw(Tensor(probs), 5.0, np.random.default_rng(11), batch=100_000)
    counts = np.bincount(draw.index, minlength=4)
    assert chisquare(counts, probs * 100_000).pvalue >= 0.01


def test_low_temperature_is_nearly_one_hot():
    probs = Tensor(np.full(16, 1.0 / 16))
    draw = gumbel_draw(probs, 0.01, np.random.default_rng(2), batch=10_000)
    peaks = draw.soft.data.max(axis=-1)
    # misses need a top-two Gumbel gap below ~0.07, about 7% of uniform draws
    assert np.mean(peaks > 0.999) >= 0.9
    assert np.mean(peaks) > 0.97


def test_hard_index_ignores_temperature():
    probs = Tensor([0.1, 0.2, 0.7])
    g = sample_gumbel((50, 3), np.random.default_rng(4))
    a = gumbel_draw(probs, 1.0, gumbel=g)
    b = gumbel_draw(probs, 0.05, gumbel=g)
    np.testing.assert_array_equal(a.index, b.index)
    np.testing.assert_array_equal(a.hard, np.eye(3)[a.index])


def test_zero_probability_is_clamped_and_counted():
    stats = SamplerStats()
    draw = gumbel_draw(Tensor([0.5, 0.5, 0.0]), 1.0, np.random.default_rng(0), batch=1000, stats=stats)
    assert stats.clamped == 1
    assert not np.any(draw.index == 2)
    assert np.all(np.isfinite(draw.soft.data))


def test_temperature_must_be_positive():
    with pytest.raises(ValueError):
        gumbel_draw(Tensor([0.5, 0.5]), 0.0, np.random.default_rng(0))


def test_needs_rng_or_noise():
    with pytest.raises(ValueError):
        gumbel_draw(Tensor([0.5, 0.5]), 1.0)


def test_ste_forward_is_one_hot_backward_is_soft():
    logits = Tensor([0.3, -1.0, 0.8, 0.1], requires_grad=True)
    g = sample_gumbel((8, 4), np.random.default_rng(3))
    weights = np.random.default_rng(6).normal(size=(8, 4))

    draw = gumbel_draw(logits.softmax(), 0.5, gumbel=g)
    out = ste_combine(draw)
    assert np.all(out.data.sum(axis=-1) == 1.0)
    assert np.all(np.count_nonzero(out.data, axis=-1) == 1)
    (out * weights).sum().backward()
    via_ste = logits.grad.copy()

    (gumbel_draw(logits.softmax(), 0.5, gumbel=g).soft * weights).sum().backward()
    np.testing.assert_allclose(via_ste, logits.grad, atol=1e-14)
