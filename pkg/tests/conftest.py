import numpy as np
import pytest

from fdbeam.channel import ArrayGeometry, ClusterParams, RicianParams, sample_geometric_channel, sample_si_channel
from fdbeam.relay import RelayScenario
from fdbeam.two_node import LinkPowers, TwoNodeScenario

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_two_node(rng, n=4, snr_db=5.0, tau=1.0, sizes=None):
    """Random two-node scenario; ``sizes`` = (n_tx1, n_rx1, n_tx2, n_rx2)."""
    n_tx1, n_rx1, n_tx2, n_rx2 = sizes or (n, n, n, n)
    clusters = ClusterParams()
    rician = RicianParams()
    h12 = sample_geometric_channel(ArrayGeometry(n_tx1, n_rx2), clusters, rng)
    h21 = sample_geometric_channel(ArrayGeometry(n_tx2, n_rx1), clusters, rng)
    h11 = sample_si_channel(ArrayGeometry(n_tx1, n_rx1), rician, rng)
    h22 = sample_si_channel(ArrayGeometry(n_tx2, n_rx2), rician, rng)
    p = LinkPowers(10 ** (snr_db / 10), tau, 1.0)
    return TwoNodeScenario(h12, h21, h11, h22, p, p)


def make_relay(rng, relay_n=4, ue_tx=2, ue_rx=1, snr_db=10.0, sir_db=0.0):
    clusters = ClusterParams()
    h_u = sample_geometric_channel(ArrayGeometry(ue_tx, relay_n), clusters, rng)
    h_d = sample_geometric_channel(ArrayGeometry(relay_n, ue_rx), clusters, rng)
    h_si = sample_si_channel(ArrayGeometry(relay_n, relay_n), RicianParams(), rng)
    return RelayScenario(h_u, h_d, h_si, LinkPowers.from_db(snr_db, sir_db), LinkPowers.from_db(snr_db))


def random_point(rng, sizes):
    return [
        (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2 * n) for n in sizes
    ]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
