import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fdbeam.channel import (
    ArrayGeometry,
    ClusterParams,
    DegenerateGeometryError,
    RicianParams,
    channel_from_csv,
    channel_to_csv,
    los_si_channel,
    sample_geometric_channel,
    sample_si_channel,
    si_distances,
    ula_steering,
)


def test_steering_broadside():
    np.testing.assert_allclose(ula_steering(0.0, 4, 0.5), 0.5 * np.ones(4), atol=1e-15)


def test_steering_endfire_half_wavelength():
    np.testing.assert_allclose(ula_steering(np.pi / 2, 2, 0.5), np.array([1, -1]) / np.sqrt(2), atol=1e-15)


@given(
    angle=st.floats(-np.pi, np.pi),
    n=st.integers(1, 64),
    spacing=st.floats(0.05, 4.0),
)
def test_steering_unit_norm(angle, n, spacing):
    assert abs(np.linalg.norm(ula_steering(angle, n, spacing)) - 1) < 1e-12


def test_steering_matrix_columns():
    angles = np.array([-0.3, 0.0, 1.1])
    a = ula_steering(angles, 5)
    assert a.shape == (5, 3)
    for k, ang in enumerate(angles):
        np.testing.assert_allclose(a[:, k], ula_steering(ang, 5))


def test_single_path_scalar_channel():
    rng = np.random.default_rng(3)
    h = sample_geometric_channel(ArrayGeometry(1, 1), ClusterParams(1, 1, 0.1), rng)
    rng = np.random.default_rng(3)
    rng.uniform(size=4)  # two centres, two offsets
    alpha = (rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2)
    assert h.shape == (1, 1)
    assert h[0, 0] == pytest.approx(alpha, abs=1e-14)


@pytest.mark.parametrize("n_cl,n_ray,n_tx,n_rx", [(1, 2, 8, 8), (2, 2, 16, 8), (6, 8, 4, 4)])
def test_geometric_rank_bound(n_cl, n_ray, n_tx, n_rx):
    rng = np.random.default_rng(0)
    h = sample_geometric_channel(ArrayGeometry(n_tx, n_rx), ClusterParams(n_cl, n_ray), rng)
    assert h.shape == (n_rx, n_tx)
    assert np.linalg.matrix_rank(h, tol=1e-9) <= min(n_cl * n_ray, n_tx, n_rx)


def test_geometric_power_normalisation():
    rng = np.random.default_rng(2024)
    geom = ArrayGeometry(16, 16)
    power = np.mean(
        [np.linalg.norm(sample_geometric_channel(geom, ClusterParams(), rng)) ** 2 for _ in range(10_000)]
    )
    assert abs(power / 256 - 1) < 0.05


def test_geometric_channel_deterministic():
    geom, cl = ArrayGeometry(8, 4), ClusterParams()
    a = sample_geometric_channel(geom, cl, np.random.default_rng(9))
    b = sample_geometric_channel(geom, cl, np.random.default_rng(9))
    assert np.array_equal(a, b)


def test_los_single_element_unit_distance():
    h = los_si_channel(ArrayGeometry(1, 1, separation=1.0, angle=0.7))
    assert h[0, 0] == pytest.approx(1.0, abs=1e-12)


def test_los_single_element_half_wavelength():
    h = los_si_channel(ArrayGeometry(1, 1, separation=0.5))
    assert h[0, 0] == pytest.approx(-2.0, abs=1e-12)


def test_los_two_by_two_against_geometry_oracle():
    # distances and entries from an independent plain-math placement script
    expected = np.array(
        [
            [0.5 + 2.4492935982947064e-16j, -0.4 - 2.4492935982947064e-16j],
            [-0.3853999440677609 - 0.13650507125117592j, 0.3186418042931538 + 0.11778524397932928j],
        ]
    )
    h = los_si_channel(ArrayGeometry(2, 2, spacing=0.5, separation=2.0, angle=np.pi / 6))
    np.testing.assert_allclose(h, expected, atol=1e-12)
    np.testing.assert_allclose(
        si_distances(ArrayGeometry(2, 2, 0.5, 2.0, np.pi / 6)),
        [[2.0, 2.5], [2.4458231349729433, 2.9436479934701936]],
        atol=1e-12,
    )


def test_los_magnitude_is_inverse_distance():
    geom = ArrayGeometry(16, 16)
    np.testing.assert_allclose(np.abs(los_si_channel(geom)), 1 / si_distances(geom), rtol=1e-14)


def test_mirrored_geometry_transposes_distances():
    # swapping roles: the mirrored placement puts RX where TX was and vice versa
    geom = ArrayGeometry(3, 5, 0.5, 2.0, 0.0)
    swapped = ArrayGeometry(5, 3, 0.5, 2.0, 0.0)
    np.testing.assert_allclose(si_distances(swapped), si_distances(geom).T, atol=1e-12)


def test_los_degenerate_geometry():
    with pytest.raises(DegenerateGeometryError):
        los_si_channel(ArrayGeometry(4, 4, spacing=0.5, separation=1.0, angle=np.pi))


def test_rician_zero_kappa_is_nlos():
    geom = ArrayGeometry(4, 4)
    h = sample_si_channel(geom, RicianParams(0.0), np.random.default_rng(1))
    rng = np.random.default_rng(1)
    nlos = (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))) / np.sqrt(2)
    assert np.array_equal(h, nlos)


def test_rician_large_kappa_is_los():
    geom = ArrayGeometry(4, 4)
    h = sample_si_channel(geom, RicianParams(1e12), np.random.default_rng(1))
    los = los_si_channel(geom)
    assert np.linalg.norm(h - los) / np.linalg.norm(los) < 1e-5


def test_rician_table_weights():
    w_los, w_nlos = RicianParams(10 ** 0.5).weights
    assert w_los == pytest.approx(0.87163, abs=5e-6)
    assert w_nlos == pytest.approx(0.49016, abs=5e-6)


@given(st.floats(0, 1e9))
def test_rician_energy_split(kappa):
    w_los, w_nlos = RicianParams(kappa).weights
    assert w_los**2 + w_nlos**2 == pytest.approx(1.0, abs=1e-12)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        ArrayGeometry(0, 4)
    with pytest.raises(ValueError):
        ArrayGeometry(4, 4, spacing=0)
    with pytest.raises(ValueError):
        ArrayGeometry(4, 4, angle=4.0)
    with pytest.raises(ValueError):
        ClusterParams(0, 8)
    with pytest.raises(ValueError):
        ClusterParams(6, 8, np.pi)
    with pytest.raises(ValueError):
        RicianParams(-1.0)


@settings(max_examples=20)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_channel_csv_roundtrip(n_rx, n_tx, seed):
    h = sample_geometric_channel(ArrayGeometry(n_tx, n_rx), ClusterParams(), np.random.default_rng(seed))
    assert np.array_equal(channel_from_csv(channel_to_csv(h)), h)
