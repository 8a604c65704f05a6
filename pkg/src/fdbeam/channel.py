"""Clustered geometric mmWave channels and near-field Rician self-interference."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np


class DegenerateGeometryError(ValueError):
    pass


@dataclass(frozen=True)
class ArrayGeometry:
    """TX/RX uniform linear arrays at one full-duplex node.

    All lengths are in carrier wavelengths.
    """

    n_tx: int = 16
    n_rx: int = 16
    spacing: float = 0.5
    separation: float = 2.0
    angle: float = np.pi / 6

    def __post_init__(self):
        if self.n_tx < 1 or self.n_rx < 1:
            raise ValueError(f"array sizes must be >= 1, got n_tx={self.n_tx}, n_rx={self.n_rx}")
        if self.spacing <= 0:
            raise ValueError(f"spacing must be > 0, got {self.spacing}")
        if self.separation <= 0:
            raise ValueError(f"separation must be > 0, got {self.separation}")
        if not 0 <= self.angle <= np.pi:
            raise ValueError(f"angle must lie in [0, pi], got {self.angle}")


@dataclass(frozen=True)
class ClusterParams:
    n_cl: int = 6
    n_ray: int = 8
    angular_spread: float = np.deg2rad(20.0)

    def __post_init__(self):
        if self.n_cl < 1 or self.n_ray < 1:
            raise ValueError(f"n_cl and n_ray must be >= 1, got {self.n_cl}, {self.n_ray}")
        if not 0 < self.angular_spread < np.pi:
            raise ValueError(f"angular_spread must lie in (0, pi), got {self.angular_spread}")


@dataclass(frozen=True)
class RicianParams:
    kappa: float = 10 ** 0.5

    def __post_init__(self):
        if not self.kappa >= 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")

    @property
    def weights(self) -> tuple[float, float]:
        """(LOS weight, NLOS weight); squares sum to one."""
        if np.isinf(self.kappa):
            return 1.0, 0.0
        return float(np.sqrt(self.kappa / (self.kappa + 1))), float(np.sqrt(1 / (self.kappa + 1)))


def ula_steering(angle, n: int, spacing: float = 0.5) -> np.ndarray:
    """Unit-norm ULA response ``exp(j 2 pi spacing m sin(angle)) / sqrt(n)``.

    A scalar angle gives a length-``n`` vector; an array of angles gives an
    ``(n, len(angle))`` matrix with one steering vector per column.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    m = np.arange(n)
    phase = 2 * np.pi * spacing * np.multiply.outer(m, np.sin(angle))
    return np.exp(1j * phase) / np.sqrt(n)


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """i.i.d. CN(0, 1) samples."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def sample_geometric_channel(
    geom: ArrayGeometry, clusters: ClusterParams, rng: np.random.Generator
) -> np.ndarray:
    """Draw an ``n_rx x n_tx`` clustered channel with E||H||_F^2 = n_rx * n_tx.

    Cluster centres (AoA and AoD independently) are uniform on [-pi/2, pi/2];
    rays are offset uniformly within +-angular_spread/2 of their centre.
    """
    n_cl, n_ray = clusters.n_cl, clusters.n_ray
    half = clusters.angular_spread / 2
    aoa_c = rng.uniform(-np.pi / 2, np.pi / 2, n_cl)
    aod_c = rng.uniform(-np.pi / 2, np.pi / 2, n_cl)
    aoa = (aoa_c[:, None] + rng.uniform(-half, half, (n_cl, n_ray))).ravel()
    aod = (aod_c[:, None] + rng.uniform(-half, half, (n_cl, n_ray))).ravel()
    gains = complex_gaussian(rng, n_cl * n_ray)

    a_rx = ula_steering(aoa, geom.n_rx, geom.spacing)
    a_tx = ula_steering(aod, geom.n_tx, geom.spacing)
    scale = np.sqrt(geom.n_rx * geom.n_tx / (n_cl * n_ray))
    return scale * (a_rx * gains) @ a_tx.conj().T


def si_distances(geom: ArrayGeometry) -> np.ndarray:
    """``(n_rx, n_tx)`` matrix of TX-element to RX-element distances.

    TX element p sits at (-p * spacing, 0); RX element q at
    (separation + q * spacing * cos(angle), q * spacing * sin(angle)), so the
    two arrays open away from each other and the closest pair is
    ``separation`` apart.
    """
    p = np.arange(geom.n_tx)
    q = np.arange(geom.n_rx)
    tx = np.stack([-p * geom.spacing, np.zeros_like(p, dtype=float)], axis=1)
    rx = np.stack(
        [
            geom.separation + q * geom.spacing * np.cos(geom.angle),
            q * geom.spacing * np.sin(geom.angle),
        ],
        axis=1,
    )
    return np.linalg.norm(rx[:, None, :] - tx[None, :, :], axis=2)


def los_si_channel(geom: ArrayGeometry) -> np.ndarray:
    """Spherical-wavefront LOS leakage, entry (q, p) = exp(-j 2 pi d_pq) / d_pq."""
    d = si_distances(geom)
    # closer than 1e-9 wavelengths counts as coincident
    if np.any(d < 1e-9):
        q, p = np.argwhere(d < 1e-9)[0]
        raise DegenerateGeometryError(f"RX element {q} coincides with TX element {p}")
    return np.exp(-2j * np.pi * d) / d


def sample_si_channel(
    geom: ArrayGeometry, rician: RicianParams, rng: np.random.Generator
) -> np.ndarray:
    w_los, w_nlos = rician.weights
    h_nlos = complex_gaussian(rng, (geom.n_rx, geom.n_tx))
    if w_los == 0:
        return h_nlos
    return w_los * los_si_channel(geom) + w_nlos * h_nlos


def channel_to_csv(h: np.ndarray) -> str:
    """Row-major CSV, one row per matrix row, cells formatted ``re,im``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in np.atleast_2d(h):
        writer.writerow([f"{float(z.real)!r},{float(z.imag)!r}" for z in row.astype(complex)])
    return buf.getvalue()


def channel_from_csv(text: str) -> np.ndarray:
    rows = []
    for row in csv.reader(io.StringIO(text)):
        if not row:
            continue
        rows.append([complex(*map(float, cell.split(","))) for cell in row])
    return np.array(rows, dtype=complex)
