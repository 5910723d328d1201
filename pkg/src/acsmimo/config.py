"""System-level configuration for the FDD massive MIMO simulator."""

from dataclasses import dataclass, field, replace

import numpy as np

SPEED_OF_LIGHT = 299792458.0


@dataclass(frozen=True)
class SystemConfig:
    """Scalar system parameters shared by every stage of the pipeline.

    Parameters
    ----------
    M : int
        Number of BS antennas (uniform linear array).
    K : int
        Number of single-antenna users.
    T : int
        Downlink pilot dimension (signal dimensions spent on probing).
    N_c : int
        Resource-block size in time-frequency tiles.
    L : int
        Number of uplink pilot snapshots per user.
    P : float
        Downlink transmit power, linear scale.
    sigma2 : float
        Uplink noise variance, linear scale.
    f_ul, f_dl : float
        Uplink / downlink carrier frequencies in Hz.
    c : float
        Propagation speed in m/s.
    d : float
        Antenna spacing in m.  ``None`` selects lambda_ul / (2 sin theta_max),
        which maps the scanned angular range onto the full spatial-frequency
        period of the array.
    theta_max : float
        Half angular range in radians; the array scans
        [-theta_max, theta_max).
    grid_size : int
        Angle-grid resolution G used for quadrature and channel synthesis.
        ``None`` selects 8*M (8 grid points per Dirichlet main lobe).
    """

    M: int = 128
    K: int = 20
    T: int = 16
    N_c: int = 128
    L: int = 10
    P: float = 128.0
    sigma2: float = 10 ** (-1.5)
    f_ul: float = 2.0e9
    f_dl: float = 2.2e9
    c: float = SPEED_OF_LIGHT
    d: float = None
    theta_max: float = np.pi / 3
    grid_size: int = None

    def __post_init__(self):
        if self.M < 2:
            raise ValueError(f"M must be >= 2, got {self.M}")
        if not (1 <= self.T <= self.N_c):
            raise ValueError(f"T must satisfy 1 <= T <= N_c, got T={self.T}, N_c={self.N_c}")
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")
        if self.sigma2 <= 0 or self.P <= 0:
            raise ValueError("P and sigma2 must be positive")
        if not (0 < self.theta_max < np.pi / 2):
            raise ValueError("theta_max must lie in (0, pi/2) so sin(theta) is invertible")
        if self.d is None:
            lam_ul = self.c / self.f_ul
            object.__setattr__(self, "d", lam_ul / (2.0 * np.sin(self.theta_max)))
        if self.grid_size is None:
            object.__setattr__(self, "grid_size", 8 * self.M)
        if self.grid_size < 4 * self.M:
            raise ValueError(f"grid_size must be >= 4*M, got {self.grid_size}")

    def carrier(self, band):
        """Carrier frequency for band 'ul' or 'dl'."""
        if band == "ul":
            return self.f_ul
        if band == "dl":
            return self.f_dl
        raise ValueError(f"band must be 'ul' or 'dl', got {band!r}")

    def spatial_slope(self, band):
        """(d/c) * f_band: slope of the array spatial frequency in sin(theta)."""
        return self.d / self.c * self.carrier(band)

    def with_pilot_dim(self, T):
        return replace(self, T=T)

    def with_power(self, P):
        return replace(self, P=P)


def table1_config(**overrides):
    """Full-scale configuration from the simulation parameter table.

    M=128 antennas, K=20 users, L=10 UL pilots, N_c=128,
    f_dl = 1.1 f_ul, d = lambda_ul / (2 sin theta_max), 2*theta_max = 2*pi/3.
    Only the ratio f_dl/f_ul and the product (d/c)*f enter the model, so the
    absolute UL carrier is fixed at 2 GHz.
    """
    base = dict(M=128, K=20, N_c=128, L=10, f_ul=2.0e9, f_dl=2.2e9)
    base.update(overrides)
    return SystemConfig(**base)


def desk_config(**overrides):
    """Reduced-scale configuration for CI-speed experiments (M=64, K=10)."""
    base = dict(M=64, K=10, N_c=128, L=10, f_ul=2.0e9, f_dl=2.2e9)
    base.update(overrides)
    return SystemConfig(**base)
