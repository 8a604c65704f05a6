"""Dual-hop full-duplex relay: uplink/downlink rates, gradients and duplex modes.

The uplink UE sends through ``h_u`` to the relay, which simultaneously
forwards through ``h_d`` to the downlink UE. The relay's own transmission
leaks into its receiver through ``h_si``. Vectors are ordered
``[f_ue, f_r, w_r, w_d]`` throughout.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .two_node import LN2, LinkPowers


@dataclass(frozen=True)
class RelayScenario:
    h_u: np.ndarray
    h_d: np.ndarray
    h_si: np.ndarray
    powers_u: LinkPowers
    powers_d: LinkPowers
    sigma2: float = 1.0

    def __post_init__(self):
        relay_rx, _ = self.h_u.shape
        _, relay_tx = self.h_d.shape
        if self.h_si.shape != (relay_rx, relay_tx):
            raise ValueError(
                f"h_si has shape {self.h_si.shape}, expected relay RX x TX = ({relay_rx}, {relay_tx})"
            )
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be > 0, got {self.sigma2}")

    @property
    def sizes(self) -> tuple[int, int, int, int]:
        """Lengths of (f_ue, f_r, w_r, w_d)."""
        return self.h_u.shape[1], self.h_d.shape[1], self.h_u.shape[0], self.h_d.shape[0]

    def without_si(self) -> "RelayScenario":
        return replace(self, powers_u=replace(self.powers_u, tau=0.0))


@dataclass(frozen=True)
class DuplexMode:
    """Fraction of time the relay spends in full-duplex; the rest is half-duplex."""

    fd_fraction: float = 1.0

    def __post_init__(self):
        if not 0 <= self.fd_fraction <= 1:
            raise ValueError(f"fd_fraction must lie in [0, 1], got {self.fd_fraction}")


FULL_DUPLEX = DuplexMode(1.0)
HALF_DUPLEX = DuplexMode(0.0)


def hybrid(fd_fraction: float = 0.5) -> DuplexMode:
    return DuplexMode(fd_fraction)


def _check(s: RelayScenario, vecs) -> None:
    for name, v, n in zip(("f_ue", "f_r", "w_r", "w_d"), vecs, s.sizes):
        if np.shape(v) != (n,):
            raise ValueError(f"{name} has shape {np.shape(v)}, expected ({n},)")


def relay_rates(s: RelayScenario, f_ue, f_r, w_r, w_d) -> tuple[float, float]:
    """(uplink, downlink) rates in bits/s/Hz."""
    _check(s, (f_ue, f_r, w_r, w_d))
    sig_u = s.powers_u.rho * abs(np.vdot(w_r, s.h_u @ f_ue)) ** 2
    int_u = s.powers_u.tau * abs(np.vdot(w_r, s.h_si @ f_r)) ** 2
    noise_u = s.sigma2 * np.vdot(w_r, w_r).real
    sig_d = s.powers_d.rho * abs(np.vdot(w_d, s.h_d @ f_r)) ** 2
    noise_d = s.sigma2 * np.vdot(w_d, w_d).real
    return float(np.log2(1 + sig_u / (int_u + noise_u))), float(np.log2(1 + sig_d / noise_d))


def relay_sum_rate(s: RelayScenario, f_ue, f_r, w_r, w_d) -> float:
    up, down = relay_rates(s, f_ue, f_r, w_r, w_d)
    return up + down


def relay_gradients(s: RelayScenario, f_ue, f_r, w_r, w_d):
    """Wirtinger gradients of uplink + downlink w.r.t. conj of (f_ue, f_r, w_r, w_d).

    ``f_r`` enters both terms: as the downlink signal and as uplink SI.
    """
    _check(s, (f_ue, f_r, w_r, w_d))
    rho_u, tau = s.powers_u.rho, s.powers_u.tau
    rho_d = s.powers_d.rho

    a = np.vdot(w_r, s.h_u @ f_ue)
    b = np.vdot(w_r, s.h_si @ f_r)
    noise_u = tau * abs(b) ** 2 + s.sigma2 * np.vdot(w_r, w_r).real
    total_u = noise_u + rho_u * abs(a) ** 2
    d_noise_wr = tau * (s.h_si @ f_r) * np.conj(b) + s.sigma2 * w_r
    d_noise_fr = tau * (s.h_si.conj().T @ w_r) * b

    c = np.vdot(w_d, s.h_d @ f_r)
    noise_d = s.sigma2 * np.vdot(w_d, w_d).real
    total_d = noise_d + rho_d * abs(c) ** 2

    g_fue = rho_u * (s.h_u.conj().T @ w_r) * a / total_u
    g_wr = (rho_u * (s.h_u @ f_ue) * np.conj(a) + d_noise_wr) / total_u - d_noise_wr / noise_u
    g_fr = d_noise_fr / total_u - d_noise_fr / noise_u + rho_d * (s.h_d.conj().T @ w_d) * c / total_d
    g_wd = (rho_d * (s.h_d @ f_r) * np.conj(c) + s.sigma2 * w_d) / total_d - s.sigma2 * w_d / noise_d
    return g_fue / LN2, g_fr / LN2, g_wr / LN2, g_wd / LN2


def objective_and_gradients(s: RelayScenario):
    """Adapters for :func:`fdbeam.optimizer.ascend` over ``[f_ue, f_r, w_r, w_d]``."""

    def objective(x):
        return relay_sum_rate(s, *x)

    def gradients(x):
        return relay_gradients(s, *x)

    return objective, gradients


def half_duplex_rates(s: RelayScenario, f_ue, f_r, w_r, w_d) -> tuple[float, float]:
    """Time-shared rates: SI removed, each direction active half the time."""
    up, down = relay_rates(s.without_si(), f_ue, f_r, w_r, w_d)
    return up / 2, down / 2


def mode_rates(s: RelayScenario, mode: DuplexMode, fd_vectors=None, hd_vectors=None):
    """(uplink, downlink) for a duplex mode.

    ``fd_vectors`` should be optimised with SI present and ``hd_vectors``
    without it; only the ones the mode actually uses are required.
    """
    alpha = mode.fd_fraction
    up = down = 0.0
    if alpha > 0:
        fu, fd = relay_rates(s, *fd_vectors)
        up, down = alpha * fu, alpha * fd
    if alpha < 1:
        hu, hd = half_duplex_rates(s, *hd_vectors)
        up, down = up + (1 - alpha) * hu, down + (1 - alpha) * hd
    return up, down
