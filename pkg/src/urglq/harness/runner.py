"""Monte Carlo execution of scenario studies.

Every trial draws from its own random stream, derived from ``(seed, trial)``
only. The same trial index therefore sees the same mismatch realization and
the same unit-power waveforms at every grid point and for every method, and
dropping or reordering trials never changes another trial's numbers.
"""

from __future__ import annotations

import dataclasses
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from ..arraymodel import (GainPhase, RandomDoa, SourceSpec, SvRandomError, apply_gain_phase_perturbation,
                          apply_sv_random_error, complex_gaussian, draw_gain_phase, perturb_doa,
                          steering_vector)
from ..beamformer import (PipelineConfig, linear_baseline_weights, optimal_weights, smi_weights,
                          urglq_weights)
from ..covariance import true_ipncm
from ..errors import BeamformingError, ConfigurationError
from ..metrics import output_sinr
from ..reconstruction import Riemann
from .config import ScenarioConfig

log = logging.getLogger(__name__)

NAN = float("nan")


@dataclass(frozen=True)
class TrialResult:
    method: str
    snr_db: float
    snapshots: int
    trial: int
    sinr_db: float
    deviation_db: float
    seed: int


@dataclass(frozen=True)
class Truth:
    """Ground truth of one trial: actual angles and steering vectors."""

    desired_angle: float
    interference_angles: tuple
    desired_sv: np.ndarray
    interference_svs: tuple


def trial_streams(seed: int, trial: int):
    """Independent generators for the mismatch draw and for the waveforms."""
    mismatch_ss, data_ss = np.random.SeedSequence([seed, trial]).spawn(2)
    return np.random.default_rng(mismatch_ss), np.random.default_rng(data_ss)


def draw_truth(config: ScenarioConfig, rng) -> Truth:
    geom = config.geometry
    mm = config.mismatch
    angles = [config.desired_doa, *config.interference_doas]
    n_hit = len(angles) if config.perturbs_interference else 1
    if isinstance(mm, RandomDoa):
        angles = [perturb_doa(a, mm.bound, rng) if i < n_hit else a for i, a in enumerate(angles)]
    svs = [steering_vector(geom, a) for a in angles]
    if isinstance(mm, GainPhase):
        # sensor-level errors: one realization shared by every perturbed arrival
        gains, phases = draw_gain_phase(mm, geom.num_sensors, rng)
        svs[:n_hit] = [apply_gain_phase_perturbation(a, gains, phases) for a in svs[:n_hit]]
    elif isinstance(mm, SvRandomError):
        svs[:n_hit] = [apply_sv_random_error(a, rng.uniform(0.0, mm.rho_max), rng=rng) for a in svs[:n_hit]]
    return Truth(angles[0], tuple(angles[1:]), svs[0], tuple(svs[1:]))


def synthesize(config: ScenarioConfig, truth: Truth, snr_db: float, K: int, rng):
    """Snapshot matrix for one grid point, plus the true IPNCM and desired power.

    Unit-power waveforms are drawn first and scaled afterwards, so a trial's
    data at different SNRs differ only by the desired-signal scale.
    """
    M = config.geometry.num_sensors
    n_int = len(truth.interference_svs)
    noise = complex_gaussian(rng, (M, K), 1.0)
    waves = complex_gaussian(rng, (1 + n_int, K), 1.0)
    p_s = config.noise_power * 10.0 ** (snr_db / 10.0)
    p_i = config.noise_power * 10.0 ** (config.inr_db / 10.0)
    x = math.sqrt(config.noise_power) * noise + math.sqrt(p_s) * np.outer(truth.desired_sv, waves[0])
    for a, s in zip(truth.interference_svs, waves[1:]):
        x += math.sqrt(p_i) * np.outer(a, s)
    interferers = [SourceSpec(ang, p_i) for ang in truth.interference_angles]
    R_inf = true_ipncm(config.geometry, interferers, config.noise_power, truth.interference_svs)
    return x, R_inf, p_s


def method_weights(method: str, config: ScenarioConfig, x, truth: Truth | None = None, R_inf=None):
    """Weights of ``method`` from snapshots ``x``; ``optimal`` needs the ground truth."""
    geom = config.geometry
    a0 = steering_vector(geom, config.desired_doa)
    doas = list(config.interference_doas)
    if method == "optimal":
        if truth is None:
            raise ConfigurationError("the optimal beamformer needs ground truth")
        return optimal_weights(R_inf, truth.desired_sv)
    if method == "smi":
        return smi_weights(x, a0)
    if method == "linear":
        return linear_baseline_weights(x, config.desired_doa, doas, config.L, geom, config.half_width)
    cfg = pipeline_config(method, config)
    return urglq_weights(x, config.desired_doa, doas, geom, cfg)


def pipeline_config(method: str, config: ScenarioConfig) -> PipelineConfig:
    """Pipeline knobs behind the ``urglq*`` method names."""
    base = PipelineConfig(alpha=config.alpha, half_width=config.half_width)
    if method == "urglq":
        return base
    if method == "urglq-nocorr":
        return dataclasses.replace(base, correction=False)
    if method.startswith("urglq-riemann:"):
        try:
            L = int(method.split(":", 1)[1])
        except ValueError:
            raise ConfigurationError(f"bad method {method!r}; expected urglq-riemann:<L>") from None
        return dataclasses.replace(base, quadrature=Riemann(L))
    raise ConfigurationError(f"unknown method {method!r}")


def run_trial(config: ScenarioConfig, trial: int, grid=None) -> List[TrialResult]:
    """All grid points and methods for one trial index."""
    grid = config.grid if grid is None else grid
    out = []
    for snr_db, K in grid:
        mm_rng, data_rng = trial_streams(config.seed, trial)
        truth = draw_truth(config, mm_rng)
        x, R_inf, p_s = synthesize(config, truth, snr_db, K, data_rng)
        sinr_opt = output_sinr(optimal_weights(R_inf, truth.desired_sv), p_s, R_inf, truth.desired_sv)
        for method in config.methods:
            try:
                w = method_weights(method, config, x, truth, R_inf)
                sinr = output_sinr(w, p_s, R_inf, truth.desired_sv)
            except BeamformingError as exc:
                log.warning("trial %d, %s at SNR %g dB, K=%d failed: %s", trial, method, snr_db, K, exc)
                sinr = NAN
            out.append(TrialResult(method, snr_db, K, trial, sinr, sinr_opt - sinr, config.seed))
    return out


def _run_trial_star(args):
    return run_trial(*args)


def _sort_key(r: TrialResult, grid_index, method_index):
    return (grid_index[(r.snr_db, r.snapshots)], r.trial, method_index[r.method])


def run_scenario(config: ScenarioConfig, workers: int | None = None, trials: Sequence[int] | None = None) -> List[TrialResult]:
    """Run every (grid point, trial, method) and return rows ordered by grid point, trial, method.

    ``workers`` defaults to ``config.workers`` and then to the CPU count;
    the output is identical for any worker count.
    """
    trials = list(range(config.trials)) if trials is None else list(trials)
    workers = workers or config.workers or os.cpu_count() or 1
    if workers > 1 and len(trials) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_trial_star, [(config, t) for t in trials], chunksize=4))
    else:
        chunks = [run_trial(config, t) for t in trials]
    rows = [r for chunk in chunks for r in chunk]
    grid_index = {g: i for i, g in enumerate(config.grid)}
    method_index = {m: i for i, m in enumerate(config.methods)}
    rows.sort(key=lambda r: _sort_key(r, grid_index, method_index))
    return rows


@dataclass(frozen=True)
class Aggregate:
    method: str
    snr_db: float
    snapshots: int
    mean_sinr_db: float
    std_sinr_db: float
    count: int


def aggregate(results: Sequence[TrialResult]) -> List[Aggregate]:
    """Mean and (population) standard deviation of SINR per method and grid point.

    Failed trials (NaN SINR) are left out of the statistics.
    """
    groups = {}
    for r in results:
        groups.setdefault((r.method, r.snr_db, r.snapshots), []).append(r.sinr_db)
    out = []
    for (method, snr, K), values in groups.items():
        v = np.asarray(values, dtype=float)
        v = v[np.isfinite(v)]
        mean = float(v.mean()) if v.size else NAN
        std = float(v.std()) if v.size else NAN
        out.append(Aggregate(method, snr, K, mean, std, int(v.size)))
    return out


def glq_compare(config: ScenarioConfig, l_values: Sequence[int] = (2, 5, 10, 20, 50), workers=None):
    """Mean SINR of the pipeline with GLQ versus midpoint sums of ``L`` cells.

    Runs at the first grid point of ``config``. Returns rows
    ``(L, method, mean_sinr_db)``; the ``glq3`` row repeats for every ``L``
    because it does not depend on it.
    """
    snr, K = config.grid[0]
    methods = ("urglq",) + tuple(f"urglq-riemann:{int(L)}" for L in l_values)
    cfg = config.replace(methods=methods, snr_grid_db=(snr,), snapshot_grid=(K,))
    means = {a.method: a.mean_sinr_db for a in aggregate(run_scenario(cfg, workers))}
    rows = []
    for L in l_values:
        rows.append((int(L), "glq3", means["urglq"]))
        rows.append((int(L), "riemann", means[f"urglq-riemann:{int(L)}"]))
    return rows
