import numpy as np
import pytest

from app.baselines import qam_constellation
from app.config import get_settings
from app.models.config import ExperimentConfig, TrainConfig


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def qam16():
    return qam_constellation(16)


@pytest.fixture
def small_train_config() -> TrainConfig:
    """Four frames of 16 subcarriers per batch and a handful of steps."""
    return TrainConfig(
        m=16, n_data=16, snr_db=10.0, lam=0.01, batch_symbols=64,
        steps_phase1=3, steps_phase2=2, lr=0.01, seed=7,
    )


@pytest.fixture
def small_experiment(tmp_path) -> ExperimentConfig:
    return ExperimentConfig(
        m=16, n_data=16, snr_db=10.0, batch_symbols=64, steps_phase1=2, steps_phase2=2,
        seed=3, snr_grid=[0.0, 10.0], n_frames=50, n_symbols=800, reference_steps=5,
        out_dir=str(tmp_path / "out"),
    )


@pytest.fixture
def qam_frames(qam16, rng):
    """Factory for random 16-QAM frames: (indices, symbols), both [frames, n_data]."""

    def make(frames: int, n_data: int = 16):
        indices = rng.integers(0, qam16.m, size=(frames, n_data))
        return indices, qam16.points[indices]

    return make


@pytest.fixture(autouse=True)
def _fresh_settings(monkeypatch):
    """Settings are cached per process; tests that set OSHP_* env vars need a fresh read."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
