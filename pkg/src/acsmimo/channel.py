"""Angular channel model: array responses, DFT sparsification, support sets.

A user's propagation environment is described by an angular scattering
function gamma(theta) supported on a few multipath-cluster intervals.  UL and
DL channel vectors are drawn from that density on a fine angle grid; in the
Fourier (beamspace) basis the resulting vectors concentrate their variance on
a small index set that can be computed analytically from the cluster
geometry, separately per carrier frequency.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

_TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class ScatteringProfile:
    """Angular scattering function as weighted intervals.

    ``intervals`` is a sequence of (lo, hi, density) triples in radians with
    density in power per radian.  Overlapping or touching intervals of any
    density are merged on construction (densities add where they overlap is
    NOT supported: overlaps must agree or be disjoint; in practice profiles
    are built from disjoint clusters, and equal-density overlaps merge
    exactly).  Zero-density pieces are dropped.
    """

    intervals: tuple

    def __init__(self, intervals):
        cleaned = []
        for lo, hi, dens in intervals:
            lo, hi, dens = float(lo), float(hi), float(dens)
            if dens < 0:
                raise ValueError(f"density must be >= 0, got {dens}")
            if hi <= lo:
                raise ValueError(f"empty interval ({lo}, {hi})")
            if dens > 0:
                cleaned.append((lo, hi, dens))
        if not cleaned:
            raise ValueError("profile has zero total power")
        cleaned.sort()
        merged = [cleaned[0]]
        for lo, hi, dens in cleaned[1:]:
            plo, phi, pdens = merged[-1]
            if lo < phi or (lo == phi and dens == pdens):
                if dens != pdens:
                    raise ValueError("overlapping intervals with different densities")
                merged[-1] = (plo, max(phi, hi), pdens)
            else:
                merged.append((lo, hi, dens))
        object.__setattr__(self, "intervals", tuple(merged))

    @property
    def total_power(self):
        return sum((hi - lo) * dens for lo, hi, dens in self.intervals)

    @property
    def support(self):
        """Union of positive-density intervals, as (lo, hi) pairs."""
        return [(lo, hi) for lo, hi, _ in self.intervals]

    def validate_range(self, theta_max):
        for lo, hi, _ in self.intervals:
            if lo < -theta_max or hi > theta_max:
                raise ValueError(
                    f"interval ({lo:.4f}, {hi:.4f}) outside [-{theta_max:.4f}, {theta_max:.4f})"
                )

    def density_on(self, theta):
        """Evaluate gamma(theta) on an array of angles."""
        theta = np.asarray(theta)
        out = np.zeros(theta.shape)
        for lo, hi, dens in self.intervals:
            out[(theta >= lo) & (theta < hi)] = dens
        return out

    def normalized(self, power=1.0):
        """Same support, densities scaled to the given total power."""
        s = power / self.total_power
        return ScatteringProfile([(lo, hi, dens * s) for lo, hi, dens in self.intervals])


@dataclass(frozen=True)
class SupportSet:
    """Sorted set of active Fourier-basis indices, tagged with its band."""

    indices: np.ndarray
    band: str

    def __init__(self, indices, band, M=None):
        if band not in ("ul", "dl"):
            raise ValueError(f"band must be 'ul' or 'dl', got {band!r}")
        idx = np.unique(np.asarray(list(indices), dtype=np.int64))
        if idx.size and (idx[0] < 0 or (M is not None and idx[-1] >= M)):
            raise ValueError("support index out of range")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "band", band)

    def __len__(self):
        return int(self.indices.size)

    def __iter__(self):
        return iter(self.indices.tolist())

    def as_set(self):
        return set(self.indices.tolist())

    def __eq__(self, other):
        return (
            isinstance(other, SupportSet)
            and self.band == other.band
            and np.array_equal(self.indices, other.indices)
        )


@dataclass
class ChannelRealization:
    """One channel draw in both antenna and Fourier coordinates."""

    h_spatial: np.ndarray
    h_fourier: np.ndarray
    band: str


# ---------------------------------------------------------------------------
# array / DFT primitives


def array_response(cfg, theta, band):
    """ULA response at angle of arrival theta for the given band.

    Entry l is exp(j * (2 pi / c) * f_band * l * d * sin(theta)); every entry
    has unit magnitude.  theta must lie in [-theta_max, theta_max).
    """
    if not (-cfg.theta_max <= theta < cfg.theta_max):
        raise ValueError(f"theta={theta} outside [{-cfg.theta_max}, {cfg.theta_max})")
    ell = np.arange(cfg.M)
    phase = _TWO_PI * cfg.spatial_slope(band) * np.sin(theta)
    return np.exp(1j * phase * ell)


def _steering_grid(cfg, thetas, band):
    """Stacked array responses, shape (len(thetas), M)."""
    ell = np.arange(cfg.M)[None, :]
    phase = _TWO_PI * cfg.spatial_slope(band) * np.sin(np.asarray(thetas))[:, None]
    return np.exp(1j * phase * ell)


@lru_cache(maxsize=8)
def _dft_cached(M):
    k = np.arange(M)[:, None]
    ell = np.arange(M)[None, :]
    F = np.exp(1j * _TWO_PI / M * k * (ell - M / 2)) / np.sqrt(M)
    F.setflags(write=False)
    return F


def dft_matrix(M):
    """Unitary M x M DFT with the half-shifted column index.

    [F]_{k,l} = exp(j 2 pi k (l - M/2) / M) / sqrt(M).  F^H F = I.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    return _dft_cached(int(M))


def to_fourier(h_spatial, M=None):
    """F^H h for spatial vectors (last axis = antennas)."""
    F = dft_matrix(h_spatial.shape[-1] if M is None else M)
    return h_spatial @ F.conj()


def angle_grid(cfg):
    """Midpoint grid of cfg.grid_size angles covering [-theta_max, theta_max)."""
    G = cfg.grid_size
    step = 2.0 * cfg.theta_max / G
    return -cfg.theta_max + (np.arange(G) + 0.5) * step, step


# ---------------------------------------------------------------------------
# channel synthesis


class ChannelSampler:
    """Repeated i.i.d. channel draws for one profile and band.

    Precomputes the density-weighted steering matrix on the active grid
    points so that each draw is a single matrix product.  The angular gain
    process is realized as independent complex Gaussians per grid cell with
    variance gamma(theta_g) * dtheta.
    """

    def __init__(self, cfg, profile, band):
        profile.validate_range(cfg.theta_max)
        thetas, step = angle_grid(cfg)
        gamma = profile.density_on(thetas)
        active = gamma > 0
        if not active.any():
            raise ValueError("profile has no power on the angle grid")
        self.cfg = cfg
        self.band = band
        self._weighted = np.sqrt(gamma[active] * step)[:, None] * _steering_grid(
            cfg, thetas[active], band
        )
        self.n_active = int(active.sum())

    def draw_spatial(self, rng, n=1):
        """n spatial-domain channel vectors, shape (n, M)."""
        xi = rng.standard_normal((n, self.n_active)) + 1j * rng.standard_normal(
            (n, self.n_active)
        )
        return (xi / np.sqrt(2.0)) @ self._weighted

    def draw(self, rng):
        h = self.draw_spatial(rng, 1)[0]
        return ChannelRealization(h, to_fourier(h), self.band)


def sample_channel(cfg, profile, band, rng):
    """One channel realization for the profile; see ChannelSampler."""
    return ChannelSampler(cfg, profile, band).draw(rng)


# ---------------------------------------------------------------------------
# beamspace statistics


def dirichlet_power(psi, M):
    """|D_M(psi)|^2 with D_M(psi) = sin(pi psi M) / sin(pi psi).

    Periodic in psi with period 1; removable singularities at integer psi
    are evaluated by their limit M^2.
    """
    psi = np.asarray(psi, dtype=float)
    frac = psi - np.round(psi)
    small = np.abs(frac) < 1e-12
    den = np.sin(np.pi * frac)
    den = np.where(small, 1.0, den)
    ratio = np.sin(np.pi * M * frac) / den
    return np.where(small, float(M) ** 2, ratio**2)


def _psi(cfg, sin_theta, band, i):
    return cfg.spatial_slope(band) * sin_theta - i / cfg.M + 0.5


def variance_vector(cfg, profile, band):
    """Per-index variance of the Fourier channel coefficients.

    [v]_i = (1/M) * integral of gamma(theta) |D_M(psi_i(theta))|^2 dtheta,
    evaluated by midpoint quadrature on the cfg.grid_size angle grid.
    """
    profile.validate_range(cfg.theta_max)
    thetas, step = angle_grid(cfg)
    gamma = profile.density_on(thetas)
    active = gamma > 0
    psi = _psi(cfg, np.sin(thetas[active])[None, :], band, np.arange(cfg.M)[:, None])
    kern = dirichlet_power(psi, cfg.M)
    return (kern @ (gamma[active] * step)) / cfg.M


def index_interval(cfg, i, band):
    """Angular interval where index i captures significant energy.

    Returns the set {theta : |psi_{band,i}(theta)| <= 1/M} intersected with
    [-theta_max, theta_max), as a (lo, hi) pair in radians, or None when the
    intersection is empty.  Solved analytically by inverting sin(theta).
    """
    slope = cfg.spatial_slope(band)
    p = i / cfg.M - 0.5
    s_lo = (p - 1.0 / cfg.M) / slope
    s_hi = (p + 1.0 / cfg.M) / slope
    s_min = np.sin(-cfg.theta_max)
    s_max = np.sin(cfg.theta_max)
    lo = max(s_lo, s_min)
    hi = min(s_hi, s_max)
    if lo >= hi:
        return None
    return (float(np.arcsin(lo)), float(np.arcsin(hi)))


def _intersects(a, b):
    # positive-length overlap; point contact carries no energy
    return max(a[0], b[0]) < min(a[1], b[1])


def theoretical_support(cfg, profile, band):
    """Indices whose angular interval meets the scattering support."""
    profile.validate_range(cfg.theta_max)
    sup = profile.support
    hits = []
    for i in range(cfg.M):
        iv = index_interval(cfg, i, band)
        if iv is None:
            continue
        if any(_intersects(iv, s) for s in sup):
            hits.append(i)
    return SupportSet(hits, band, M=cfg.M)
