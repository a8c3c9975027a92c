import numpy as np
import pytest

from app.baselines import qam_constellation
from app.core import Adam
from app.errors import NonFiniteError, NonFiniteGradientError, TrainingDivergedError
from app.models.config import TrainConfig
from app.models.results import TraceRow
from app.services import trainer_service
from app.services.trainer_service import (
    DivergenceGuard,
    draw_batch_noise,
    forward_batch,
    init_networks,
    make_rngs,
    reference_loss,
    replay_loss,
    train_reference_demapper,
    train_two_phase,
)


def test_seed_streams_are_reproducible_and_distinct():
    a_init, a_data = make_rngs(5)
    b_init, b_data = make_rngs(5)
    assert a_init.random() == b_init.random()
    assert a_data.random() == b_data.random()
    c_init, c_data = make_rngs(5)
    assert c_init.random() != c_data.random()


def test_initial_cross_entropy_is_near_log_m(small_train_config):
    cfg = small_train_config.model_copy(update={"lam": 0.0})
    result = forward_batch(init_networks(cfg), cfg, np.random.default_rng(0))
    assert result.loss.cross_entropy == pytest.approx(np.log(16), rel=0.2)
    assert result.loss.total == pytest.approx(result.loss.cross_entropy - result.loss.entropy)
    assert result.indices.shape == (64,)


def test_phase_two_adds_weighted_papr(small_train_config):
    nets = init_networks(small_train_config)
    noise = draw_batch_noise(small_train_config, np.random.default_rng(1))
    one = forward_batch(nets, small_train_config, phase=1, noise=noise).loss
    two = forward_batch(nets, small_train_config, phase=2, noise=noise).loss
    assert one.cross_entropy == two.cross_entropy
    assert two.total - one.total == pytest.approx(0.01 * one.papr_term, rel=1e-9)
    assert one.papr_term >= 1.0


def test_zero_lambda_phase_two_matches_phase_one(small_train_config):
    cfg = small_train_config.model_copy(update={"lam": 0.0})
    nets = init_networks(cfg)
    noise = draw_batch_noise(cfg, np.random.default_rng(2))
    assert forward_batch(nets, cfg, phase=1, noise=noise).loss.total == forward_batch(
        nets, cfg, phase=2, noise=noise
    ).loss.total


def test_held_one_hot_changes_only_the_nn1_gradient(small_train_config):
    nets = init_networks(small_train_config)
    noise = draw_batch_noise(small_train_config, np.random.default_rng(5))
    params = nets.parameters()

    def grads(straight_through):
        for p in params.values():
            p.grad = None
        result = forward_batch(nets, small_train_config, phase=2, noise=noise, straight_through=straight_through)
        result.total.backward()
        return result.loss.total, {name: p.grad.copy() for name, p in params.items()}

    ste_total, ste = grads(True)
    held_total, held = grads(False)
    assert ste_total == held_total
    for name in params:
        if name.startswith("nn1."):
            continue
        np.testing.assert_allclose(held[name], ste[name], rtol=1e-10, atol=1e-14)
    assert any(not np.allclose(held[name], ste[name]) for name in params if name.startswith("nn1."))


def test_training_is_deterministic_for_a_seed(small_train_config):
    first = train_two_phase(small_train_config)
    second = train_two_phase(small_train_config)
    assert [r.total for r in first.trace] == [r.total for r in second.trace]
    assert first.final_loss == second.final_loss
    for name, p in first.nets.parameters().items():
        np.testing.assert_array_equal(p.data, second.nets.parameters()[name].data)


def test_trace_follows_both_phases(small_train_config):
    seen = []
    run = train_two_phase(small_train_config, on_step=seen.append)
    assert [r.step for r in run.trace] == [1, 2, 3, 4, 5]
    assert [r.phase for r in run.trace] == [1, 1, 1, 2, 2]
    assert seen == run.trace
    assert run.phase == 2
    assert run.final_loss == replay_loss(run.nets, small_train_config, 2)


def test_skipping_phase_two_leaves_phase_one_model(small_train_config):
    cfg = small_train_config.model_copy(update={"steps_phase2": 0})
    run = train_two_phase(cfg)
    assert run.phase == 1
    assert {r.phase for r in run.trace} == {1}


def test_training_moves_weights(small_train_config):
    before = {k: v.data.copy() for k, v in init_networks(small_train_config).parameters().items()}
    run = train_two_phase(small_train_config)
    assert any(not np.array_equal(before[k], v.data) for k, v in run.nets.parameters().items())


def test_guard_trips_after_patience():
    guard = DivergenceGuard(factor=10.0, patience=3)
    trace = []
    guard.observe(1, 2.0, trace)
    assert guard.limit == 20.0
    guard.observe(2, 25.0, trace)
    guard.observe(3, 25.0, trace)
    guard.observe(4, 5.0, trace)
    guard.observe(5, 25.0, trace)
    guard.observe(6, 25.0, trace)
    with pytest.raises(TrainingDivergedError) as info:
        guard.observe(7, 25.0, trace)
    assert info.value.step == 7


def test_guard_uses_floor_for_small_initial_loss():
    guard = DivergenceGuard()
    guard.observe(1, -0.01, [])
    assert guard.limit == 10.0


def test_non_finite_loss_becomes_divergence(monkeypatch, small_train_config):
    def broken(*args, **kwargs):
        raise NonFiniteError("log produced nan")

    monkeypatch.setattr(trainer_service, "forward_batch", broken)
    with pytest.raises(TrainingDivergedError) as info:
        train_two_phase(small_train_config)
    assert info.value.step == 1


def test_non_finite_gradient_reports_global_step(monkeypatch, small_train_config):
    calls = {"n": 0}
    original = Adam.step

    def step(self):
        calls["n"] += 1
        if calls["n"] == 4:
            raise NonFiniteGradientError(1, "nn2.w0")
        original(self)

    monkeypatch.setattr(Adam, "step", step)
    with pytest.raises(NonFiniteGradientError) as info:
        train_two_phase(small_train_config)
    assert info.value.step == 4
    assert info.value.parameter == "nn2.w0"


def test_reference_demapper_learns(small_train_config):
    qam = qam_constellation(4)
    cfg = small_train_config.model_copy(update={"m": 4, "snr_db": 20.0})
    untrained = train_reference_demapper(qam, cfg, steps=0)
    trained = train_reference_demapper(qam, cfg, steps=60)
    assert sorted(trained.parameters())[0].startswith("nn3.")
    before = reference_loss(untrained, qam, cfg, np.random.default_rng(9)).item()
    after = reference_loss(trained, qam, cfg, np.random.default_rng(9)).item()
    assert after < before


def test_trace_row_from_breakdown(small_train_config):
    loss = forward_batch(init_networks(small_train_config), small_train_config, np.random.default_rng(4)).loss
    row = TraceRow.from_breakdown(9, loss)
    assert row.step == 9
    assert row.papr_db == pytest.approx(10 * np.log10(loss.papr_term))


@pytest.mark.slow
def test_high_snr_training_recovers_entropy():
    cfg = TrainConfig(
        m=4, n_data=16, snr_db=40.0, lam=0.0, batch_symbols=256,
        steps_phase1=600, steps_phase2=0, lr=0.01, seed=1,
    )
    run = train_two_phase(cfg)
    loss = forward_batch(run.nets, cfg, np.random.default_rng(99)).loss
    assert loss.mi_estimate == pytest.approx(loss.entropy, abs=0.05)
