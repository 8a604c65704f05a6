"""Seeded Monte Carlo engine: per-trial optimisation and rate statistics.

Every trial owns a 64-bit seed derived from ``(master_seed, sweep_index,
trial)``; channels and random initialisations come from separate child
streams of that seed, so re-running a single trial from its recorded seed
reproduces it exactly and changing the init scheme leaves channels intact.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import relay as relay_mod
from . import two_node as two_node_mod
from .channel import (
    ArrayGeometry,
    ClusterParams,
    RicianParams,
    sample_geometric_channel,
    sample_si_channel,
)
from .optimizer import Constraint, Init, OptimizationError, OptimizerConfig, ascend, init_gaussian, init_svd
from .relay import RelayScenario
from .two_node import LinkPowers, TwoNodeScenario

SCENARIOS = ("two_node", "relay")
SWEEPS = ("snr", "sir", "rate")


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str = "two_node"
    geometry: ArrayGeometry = ArrayGeometry()
    clusters: ClusterParams = ClusterParams()
    rician: RicianParams = RicianParams()
    snr_db: float = 5.0
    sir_db: float = 0.0
    si_power_db: float = 0.0
    relay_n: int = 4
    ue_tx: int = 2
    ue_rx: int = 1
    optimizer: OptimizerConfig = OptimizerConfig()
    sweep: str = "snr"
    grid: tuple[float, ...] = (5.0,)
    trials: int = 1000
    master_seed: int = 0
    # relay only: also optimise the SI-free (half-duplex) problem per trial
    half_duplex: bool = True

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        if self.sweep not in SWEEPS:
            raise ValueError(f"sweep must be one of {SWEEPS}, got {self.sweep!r}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        grid = tuple(float(g) for g in self.grid)
        if not grid:
            raise ValueError("sweep grid is empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError(f"sweep grid must be strictly increasing, got {grid}")
        object.__setattr__(self, "grid", grid)
        for name in ("relay_n", "ue_tx", "ue_rx"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError(f"master_seed must fit in 64 bits, got {self.master_seed}")

    def at(self, value: float) -> "ExperimentConfig":
        """Copy with the sweep variable pinned to ``value``."""
        if self.sweep == "snr":
            return replace(self, snr_db=value)
        if self.sweep == "sir":
            return replace(self, sir_db=value)
        return self


@dataclass
class TrialRecord:
    sweep: float
    trial: int
    seed: int
    rate_uplink: float
    rate_downlink: float
    iterations: int
    init: str
    converged: bool
    extras: dict[str, float] = field(default_factory=dict)

    @property
    def rate(self) -> float:
        return self.rate_uplink + self.rate_downlink


@dataclass
class RateSamples:
    sweep: float
    records: list[TrialRecord]

    def __len__(self):
        return len(self.records)

    def values(self, name: str = "rate") -> np.ndarray:
        """Per-trial values of a record attribute or extra, in trial order."""
        return np.array(
            [getattr(r, name) if hasattr(r, name) else r.extras[name] for r in self.records],
            dtype=float,
        )


def trial_seed(master_seed: int, sweep_index: int, trial: int) -> int:
    ss = np.random.SeedSequence(master_seed, spawn_key=(sweep_index, trial))
    return int(ss.generate_state(1, np.uint64)[0])


def _streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    chan_ss, init_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(chan_ss), np.random.default_rng(init_ss)


def draw_two_node(cfg: ExperimentConfig, rng: np.random.Generator) -> TwoNodeScenario:
    g = cfg.geometry
    h12 = sample_geometric_channel(g, cfg.clusters, rng)
    h21 = sample_geometric_channel(g, cfg.clusters, rng)
    h11 = sample_si_channel(g, cfg.rician, rng)
    h22 = sample_si_channel(g, cfg.rician, rng)
    rho = 10 ** (cfg.snr_db / 10)
    powers = LinkPowers(rho, 10 ** (cfg.si_power_db / 10), 1.0)
    return TwoNodeScenario(h12, h21, h11, h22, powers, powers)


def draw_relay(cfg: ExperimentConfig, rng: np.random.Generator) -> RelayScenario:
    g = cfg.geometry
    up = replace(g, n_tx=cfg.ue_tx, n_rx=cfg.relay_n)
    down = replace(g, n_tx=cfg.relay_n, n_rx=cfg.ue_rx)
    relay_arrays = replace(g, n_tx=cfg.relay_n, n_rx=cfg.relay_n)
    h_u = sample_geometric_channel(up, cfg.clusters, rng)
    h_d = sample_geometric_channel(down, cfg.clusters, rng)
    h_si = sample_si_channel(relay_arrays, cfg.rician, rng)
    return RelayScenario(
        h_u, h_d, h_si, LinkPowers.from_db(cfg.snr_db, cfg.sir_db), LinkPowers.from_db(cfg.snr_db)
    )


def initial_vectors(links, sizes, opt: OptimizerConfig, rng) -> list[np.ndarray]:
    """Starting vectors of the given ``sizes``.

    ``links`` holds ``(h, precoder_index, combiner_index)`` triples; SVD
    initialisation places the dominant right and left singular vectors of
    each ``h`` at those positions.
    """
    if opt.init == Init.GAUSSIAN:
        return [init_gaussian(n, rng, opt.constraint) for n in sizes]
    x = [None] * len(sizes)
    for h, fi, wi in links:
        x[fi], x[wi] = init_svd(h, opt.constraint)
    return x


def run_trial(cfg: ExperimentConfig, sweep_value: float, trial: int, seed: int) -> TrialRecord:
    """Draw one realisation, optimise it and record the rates."""
    cfg = cfg.at(sweep_value)
    chan_rng, init_rng = _streams(seed)
    opt = cfg.optimizer
    extras: dict[str, float] = {}

    if cfg.scenario == "two_node":
        s = draw_two_node(cfg, chan_rng)
        obj, grads = two_node_mod.objective_and_gradients(s)
        # ordering [f1, f2, w1, w2]
        links = ((s.h12, 0, 3), (s.h21, 1, 2))
        x0 = initial_vectors(links, s.sizes, opt, init_rng)
        trace = ascend(obj, grads, x0, opt)
        r1, r2 = two_node_mod.link_rates(s, *trace.final_vectors)
        # "uplink" is node 1 -> node 2, "downlink" node 2 -> node 1
        up, down = r2, r1
        extras["upper_bound"] = two_node_mod.upper_bound(s)
        svd = initial_vectors(links, s.sizes, replace(opt, init=Init.SVD), None)
        extras["svd_rate"] = two_node_mod.two_node_sum_rate(s, *svd)
    else:
        s = draw_relay(cfg, chan_rng)
        obj, grads = relay_mod.objective_and_gradients(s)
        # ordering [f_ue, f_r, w_r, w_d]
        x0 = initial_vectors(((s.h_u, 0, 2), (s.h_d, 1, 3)), s.sizes, opt, init_rng)
        trace = ascend(obj, grads, x0, opt)
        up, down = relay_mod.relay_rates(s, *trace.final_vectors)
        if cfg.half_duplex:
            hd = s.without_si()
            obj0, grads0 = relay_mod.objective_and_gradients(hd)
            hd_trace = ascend(obj0, grads0, x0, opt)
            hd_up, hd_down = relay_mod.half_duplex_rates(s, *hd_trace.final_vectors)
            extras.update(hd_uplink=hd_up, hd_downlink=hd_down, hd_iterations=hd_trace.iterations)

    return TrialRecord(
        sweep=sweep_value,
        trial=trial,
        seed=seed,
        rate_uplink=up,
        rate_downlink=down,
        iterations=trace.iterations,
        init=opt.init.value,
        converged=trace.converged,
        extras=extras,
    )


def _run_trial_job(args):
    cfg, value, index, trial, seed = args
    try:
        return run_trial(cfg, value, trial, seed)
    except OptimizationError as exc:
        raise OptimizationError(f"sweep point {value} (index {index}), trial {trial}: {exc}") from exc


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> list[RateSamples]:
    """One :class:`RateSamples` per sweep point (a single one for rate sweeps).

    Results are gathered in trial order, so ``jobs`` never changes them.
    """
    points = [cfg.snr_db] if cfg.sweep == "rate" else list(cfg.grid)
    tasks = [
        (cfg, value, i, t, trial_seed(cfg.master_seed, i, t))
        for i, value in enumerate(points)
        for t in range(cfg.trials)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_trial_job, tasks, chunksize=max(1, len(tasks) // (8 * jobs))))
    else:
        records = [_run_trial_job(task) for task in tasks]

    out = []
    for i, value in enumerate(points):
        out.append(RateSamples(value, records[i * cfg.trials : (i + 1) * cfg.trials]))
    return out


def _as_rates(samples) -> np.ndarray:
    rates = samples.values("rate") if isinstance(samples, RateSamples) else np.asarray(samples, dtype=float)
    if rates.size == 0:
        raise ValueError("no samples")
    return rates


def outage_probability(samples, r: float) -> float:
    """Fraction of trials whose rate is strictly below ``r``."""
    rates = _as_rates(samples)
    return float(np.mean(rates < r))


def outage_curve(samples, grid) -> np.ndarray:
    rates = np.sort(_as_rates(samples))
    return np.searchsorted(rates, np.asarray(grid, dtype=float), side="left") / rates.size


def rate_quantile(samples, p: float) -> float:
    """Largest rate supported with outage at most ``p``."""
    rates = np.sort(_as_rates(samples))
    k = int(math.floor(p * rates.size))
    return float(rates[min(k, rates.size - 1)])


def rate_gain(fd_mean: float, hd_mean: float) -> float:
    """Percent improvement of the full-duplex rate over half-duplex."""
    if hd_mean == 0:
        raise ZeroDivisionError("half-duplex mean rate is zero")
    return 100.0 * (fd_mean - hd_mean) / hd_mean


def iteration_stats(samples) -> dict[str, float]:
    if isinstance(samples, RateSamples):
        its = samples.values("iterations")
    else:
        its = np.asarray(samples, dtype=float)
    if its.size == 0:
        raise ValueError("no samples")
    return {"mean": float(its.mean()), "median": float(np.median(its)), "max": float(its.max())}
