"""
Fast invariant suite behind the `selftest` command: gradient checks,
ACO structure, Gumbel sampler fidelity and CCDF monotonicity.
"""
import logging
import time
from typing import Callable, List, Optional

import numpy as np
from scipy.stats import chisquare

from app.baselines import qam_constellation
from app.core import ComplexTensor, Tensor, affine_forward, grad_check, unitary_dft
from app.core.gradcheck import analytic_gradients, sample_coordinates
from app.models.config import TrainConfig
from app.models.results import SelftestCheck, SelftestReport
from app.ofdm import ccdf, demodulate, modulate, papr_db
from app.services.trainer_service import draw_batch_noise, forward_batch, init_networks
from app.shaping import gumbel_draw, nn1_distribution, sample_gumbel, ste_combine

logger = logging.getLogger(__name__)

SELFTEST_SEED = 20240611


def _rng(offset: int) -> np.random.Generator:
    return np.random.default_rng([SELFTEST_SEED, offset])


def _check(name: str, observed: float, tolerance: float, detail: str = "", below: bool = True) -> SelftestCheck:
    passed = observed < tolerance if below else observed >= tolerance
    return SelftestCheck(name=name, passed=bool(passed), observed=float(observed), tolerance=tolerance, detail=detail)


def check_affine_grad() -> SelftestCheck:
    rng = _rng(1)
    params = {
        "x": Tensor(rng.normal(size=(3, 4)), requires_grad=True),
        "w": Tensor(rng.normal(size=(4, 5)), requires_grad=True),
        "b": Tensor(rng.normal(size=5), requires_grad=True),
    }
    err = grad_check(lambda: affine_forward(params["x"], params["w"], params["b"]).sum(), params)
    return _check("affine_grad", err, 1e-6, "sum of affine output vs central differences")


def check_dft_grad() -> SelftestCheck:
    rng = _rng(2)
    v = ComplexTensor.from_numpy(rng.normal(size=16) + 1j * rng.normal(size=16), requires_grad=True)
    c_re, c_im = rng.normal(size=16), rng.normal(size=16)

    def loss() -> Tensor:
        out = unitary_dft(v, inverse=True)
        return (out.re * c_re).sum() + (out.im * out.im * c_im).sum()

    err = grad_check(loss, {"re": v.re, "im": v.im})
    return _check("dft_grad", err, 1e-6, "weighted IFFT output vs central differences")


def check_clip_grad() -> SelftestCheck:
    rng = _rng(3)
    data = ComplexTensor.from_numpy(rng.normal(size=8) + 1j * rng.normal(size=8), requires_grad=True)
    weights = rng.normal(size=32)

    def loss() -> Tensor:
        return (modulate(data).time_clipped * weights).sum()

    err = grad_check(loss, {"re": data.re, "im": data.im})
    return _check("clip_grad", err, 1e-5, "zero-clipped ACO signal vs central differences")


def _random_qam_frames(frames: int, n_data: int, offset: int) -> np.ndarray:
    qam = qam_constellation(16)
    return qam.points[_rng(offset).integers(0, qam.m, size=(frames, n_data))]


def check_clipping_halving() -> SelftestCheck:
    data = _random_qam_frames(100, 16, 4)
    received = demodulate(modulate(data).time_clipped).numpy()
    err = float(np.max(np.abs(received - data / 2.0)))
    return _check("clipping_halving", err, 1e-9, "data subcarriers of the clipped frame equal X/2")


def check_antisymmetry() -> SelftestCheck:
    x = modulate(_random_qam_frames(100, 16, 5)).time_unclipped.data
    half = x.shape[-1] // 2
    err = float(np.max(np.abs(x[:, :half] + x[:, half:])))
    return _check("antisymmetry", err, 1e-10, "x(n) + x(n + 2N) over 100 frames")


def check_gumbel_chi2() -> SelftestCheck:
    rng = _rng(6)
    probs = rng.dirichlet(np.ones(16))
    draws = 100_000
    draw = gumbel_draw(Tensor(probs), tau=1.0, rng=rng, batch=draws)
    counts = np.bincount(draw.index, minlength=probs.size)
    p_value = float(chisquare(counts, f_exp=probs * draws).pvalue)
    return _check("gumbel_chi2", p_value, 0.01, f"{draws} hard draws, 16 symbols", below=False)


def check_gumbel_temperature() -> SelftestCheck:
    rng = _rng(7)
    probs = Tensor(rng.dirichlet(np.ones(16)))
    noise = sample_gumbel((10_000, 16), rng)
    sharpness = [
        float(np.mean(np.max(gumbel_draw(probs, tau, gumbel=noise).soft.data, axis=-1)))
        for tau in (1.0, 0.1, 0.01)
    ]
    margin = min(b - a for a, b in zip(sharpness, sharpness[1:]))
    detail = "E[max soft] at tau 1, 0.1, 0.01: " + ", ".join(f"{s:.4f}" for s in sharpness)
    return SelftestCheck(name="gumbel_temperature", passed=margin > 0.0, observed=margin, tolerance=0.0, detail=detail)


def check_ccdf_monotone() -> SelftestCheck:
    paprs = papr_db(modulate(_random_qam_frames(2000, 16, 8)).time_clipped.data)
    thresholds = np.arange(0.0, 16.0, 0.25)
    curve = ccdf(paprs, thresholds)
    direct = np.array([np.count_nonzero(paprs >= t) for t in thresholds]) / paprs.size
    rises = float(np.max(np.diff(curve.y), initial=0.0))
    mismatch = float(np.max(np.abs(np.asarray(curve.y) - direct)))
    return _check("ccdf_monotone", max(rises, mismatch), 1e-15, "2000-frame CCDF vs direct count")


def check_full_chain_grad() -> SelftestCheck:
    cfg = TrainConfig(m=16, n_data=16, snr_db=10.0, lam=0.01, batch_symbols=64, seed=SELFTEST_SEED)
    nets = init_networks(cfg)
    params = nets.parameters()
    noise = draw_batch_noise(cfg, _rng(9))

    # the one-hot draw is held constant here; ste_grad covers the sampler adjoint
    def loss() -> Tensor:
        return forward_batch(nets, cfg, phase=2, noise=noise, straight_through=False).total

    grads = analytic_gradients(loss, params)
    coords = sample_coordinates(grads, 20, _rng(10), min_magnitude=1e-6, prefixes=("nn1.", "nn2.", "nn3."), top=200)
    err = grad_check(loss, params, coordinates=coords)
    return _check("full_chain_grad", err, 1e-4, f"phase-2 loss, {len(coords)} parameters, 4 frames, frozen noise")


def check_ste_grad() -> SelftestCheck:
    cfg = TrainConfig(m=16, n_data=16, snr_db=10.0, batch_symbols=64, seed=SELFTEST_SEED)
    nets = init_networks(cfg)
    params = {name: p for name, p in nets.parameters().items() if name.startswith("nn1.")}
    rng = _rng(11)
    noise = sample_gumbel((cfg.batch_symbols, cfg.m), rng)
    weights = rng.normal(size=(cfg.batch_symbols, cfg.m))

    def draw():
        return gumbel_draw(nn1_distribution(cfg.snr_db, nets).probs, cfg.tau, gumbel=noise)

    def surrogate() -> Tensor:
        return (ste_combine(draw()) * weights).sum()

    def relaxed() -> Tensor:
        return (draw().soft * weights).sum()

    grads = analytic_gradients(relaxed, params)
    coords = sample_coordinates(grads, 20, _rng(12), min_magnitude=1e-6, top=200)
    err = grad_check(surrogate, params, coordinates=coords, reference=relaxed)
    return _check("ste_grad", err, 1e-4, f"straight-through adjoint vs relaxed sample, {len(coords)} NN1 parameters")


CHECKS: List[Callable[[], SelftestCheck]] = [
    check_affine_grad,
    check_dft_grad,
    check_clip_grad,
    check_clipping_halving,
    check_antisymmetry,
    check_gumbel_chi2,
    check_gumbel_temperature,
    check_ccdf_monotone,
    check_ste_grad,
    check_full_chain_grad,
]


def run_selftest(checks: Optional[List[Callable[[], SelftestCheck]]] = None) -> SelftestReport:
    started = time.perf_counter()
    results = []
    for check in checks or CHECKS:
        try:
            result = check()
        except Exception as e:
            name = check.__name__.removeprefix("check_")
            result = SelftestCheck(name=name, passed=False, observed=float("nan"), tolerance=0.0, detail=f"raised {e!r}")
        level = logging.INFO if result.passed else logging.ERROR
        logger.log(level, "%s %s: observed %.3e, tolerance %.1e", "PASS" if result.passed else "FAIL",
                   result.name, result.observed, result.tolerance, extra={"check": result.name})
        results.append(result)
    return SelftestReport(checks=results, seconds=time.perf_counter() - started)
