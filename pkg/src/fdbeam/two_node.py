"""Two-node full-duplex link: sum rate, its gradients and the SVD upper bound.

Node u transmits with precoder ``f_u`` and receives with combiner ``w_u``.
``h12`` carries node 1 -> node 2, ``h21`` node 2 -> node 1, and ``h11``/``h22``
are each node's own TX -> RX leakage.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LN2 = np.log(2.0)


@dataclass(frozen=True)
class LinkPowers:
    """Linear transmit power, self-interference power and noise variance."""

    rho: float = 1.0
    tau: float = 0.0
    sigma2: float = 1.0

    def __post_init__(self):
        if self.rho < 0 or self.tau < 0:
            raise ValueError(f"rho and tau must be >= 0, got {self.rho}, {self.tau}")
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be > 0, got {self.sigma2}")

    @classmethod
    def from_db(cls, snr_db: float, sir_db: float | None = None, sigma2: float = 1.0):
        """SNR = rho / sigma2 and SIR = rho / tau; ``sir_db=None`` means no SI."""
        rho = sigma2 * 10 ** (snr_db / 10)
        tau = 0.0 if sir_db is None else rho / 10 ** (sir_db / 10)
        return cls(rho, tau, sigma2)

    def scaled(self, c: float) -> "LinkPowers":
        return LinkPowers(self.rho * c, self.tau * c, self.sigma2 * c)


@dataclass(frozen=True)
class TwoNodeScenario:
    h12: np.ndarray
    h21: np.ndarray
    h11: np.ndarray
    h22: np.ndarray
    powers1: LinkPowers
    powers2: LinkPowers

    def __post_init__(self):
        # node u has n_tx[u] transmit and n_rx[u] receive elements
        n_rx1, n_tx2 = self.h21.shape
        n_rx2, n_tx1 = self.h12.shape
        if self.h11.shape != (n_rx1, n_tx1) or self.h22.shape != (n_rx2, n_tx2):
            raise ValueError(
                f"inconsistent shapes: h12 {self.h12.shape}, h21 {self.h21.shape}, "
                f"h11 {self.h11.shape}, h22 {self.h22.shape}"
            )

    @property
    def sizes(self) -> tuple[int, int, int, int]:
        """Lengths of (f1, f2, w1, w2)."""
        return self.h12.shape[1], self.h21.shape[1], self.h21.shape[0], self.h12.shape[0]


def _check(s: TwoNodeScenario, vecs) -> None:
    for name, v, n in zip(("f1", "f2", "w1", "w2"), vecs, s.sizes):
        if np.shape(v) != (n,):
            raise ValueError(f"{name} has shape {np.shape(v)}, expected ({n},)")


def _link_terms(rho, rx: LinkPowers, w, h, f, h_si, f_si):
    """Signal and interference-plus-noise power seen through combiner ``w``.

    ``rho`` is the far-end transmit power; ``rx`` supplies the receiving
    node's SI power and noise variance.
    """
    a = np.vdot(w, h @ f)
    b = np.vdot(w, h_si @ f_si)
    signal = rho * abs(a) ** 2
    noise = rx.sigma2 * np.vdot(w, w).real + rx.tau * abs(b) ** 2
    return a, b, signal, noise


def link_rates(s: TwoNodeScenario, f1, f2, w1, w2) -> tuple[float, float]:
    """Rates (bits/s/Hz) received at node 1 and at node 2."""
    _check(s, (f1, f2, w1, w2))
    _, _, sig1, n1 = _link_terms(s.powers2.rho, s.powers1, w1, s.h21, f2, s.h11, f1)
    _, _, sig2, n2 = _link_terms(s.powers1.rho, s.powers2, w2, s.h12, f1, s.h22, f2)
    return float(np.log2(1 + sig1 / n1)), float(np.log2(1 + sig2 / n2))


def two_node_sum_rate(s: TwoNodeScenario, f1, f2, w1, w2) -> float:
    r1, r2 = link_rates(s, f1, f2, w1, w2)
    return r1 + r2


def two_node_gradients(s: TwoNodeScenario, f1, f2, w1, w2):
    """Wirtinger gradients of the sum rate w.r.t. conj of (f1, f2, w1, w2)."""
    _check(s, (f1, f2, w1, w2))
    grads = {}
    # Each link rate is log2(N + S) - log2(N), with N the interference-plus-noise power.
    for rho, p, w, h, f, h_si, f_si, keys in (
        (s.powers2.rho, s.powers1, w1, s.h21, f2, s.h11, f1, ("w1", "f2", "f1")),
        (s.powers1.rho, s.powers2, w2, s.h12, f1, s.h22, f2, ("w2", "f1", "f2")),
    ):
        a, b, signal, noise = _link_terms(rho, p, w, h, f, h_si, f_si)
        total = signal + noise
        d_sig_w = rho * (h @ f) * np.conj(a)
        d_noise_w = p.sigma2 * w + p.tau * (h_si @ f_si) * np.conj(b)
        d_sig_f = rho * (h.conj().T @ w) * a
        d_noise_fsi = p.tau * (h_si.conj().T @ w) * b

        kw, kf, kfsi = keys
        grads[kw] = grads.get(kw, 0) + ((d_sig_w + d_noise_w) / total - d_noise_w / noise) / LN2
        grads[kf] = grads.get(kf, 0) + d_sig_f / total / LN2
        grads[kfsi] = grads.get(kfsi, 0) + (d_noise_fsi / total - d_noise_fsi / noise) / LN2
    return grads["f1"], grads["f2"], grads["w1"], grads["w2"]


def upper_bound(s: TwoNodeScenario) -> float:
    """Interference-free rate with dominant-singular-mode beamforming on both links."""
    lam12 = np.linalg.norm(s.h12, 2)
    lam21 = np.linalg.norm(s.h21, 2)
    return float(
        np.log2(1 + lam12**2 * s.powers1.rho / s.powers2.sigma2)
        + np.log2(1 + lam21**2 * s.powers2.rho / s.powers1.sigma2)
    )


def objective_and_gradients(s: TwoNodeScenario):
    """Adapters for :func:`fdbeam.optimizer.ascend` over ``[f1, f2, w1, w2]``."""

    def objective(x):
        return two_node_sum_rate(s, *x)

    def gradients(x):
        return two_node_gradients(s, *x)

    return objective, gradients
