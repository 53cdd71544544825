"""Core domain types and elementary constructors.

Holds the global OFDMA numerology, per-UE resource assignments, channel
path descriptions and the small pure functions (steering vectors,
selection matrices, index variance) everything else is built from.

Index convention: subcarrier indices live in ``1..N`` and sensing-symbol
indices in ``1..G`` throughout the public API.  Zero-based indexing is an
internal storage detail applied at array boundaries only.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AssignmentError, ConfigError

SPEED_OF_LIGHT = 2.99792458e8

_REL_TOL = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class SystemConfig:
    """Global OFDMA numerology and array geometry.

    Attributes
    ----------
    n_subcarriers : int
        Total number of subcarriers N in the shared pool.
    subcarrier_spacing : float
        Subcarrier spacing in Hz.
    carrier_freq : float
        Carrier frequency in Hz.
    symbol_duration : float
        Full OFDM symbol length in seconds (cyclic prefix included).
    cp_duration : float
        Cyclic prefix length in seconds.
    sample_duration : float
        Baseband sample length in seconds; must equal
        ``1 / (n_subcarriers * subcarrier_spacing)``.
    n_rx_antennas, n_tx_antennas : int
        ULA sizes at the receiver and at each UE.
    n_ues : int
        Number of UEs sharing the pool.
    n_symbols : int
        Number of OFDM symbols G in the frame set.
    antenna_spacing : float
        ULA element spacing in meters.
    noise_power : float
        Complex AWGN power sigma^2 per time-domain sample (linear).
    """

    n_subcarriers: int
    subcarrier_spacing: float
    carrier_freq: float
    symbol_duration: float
    cp_duration: float
    sample_duration: float
    n_rx_antennas: int
    n_tx_antennas: int
    n_ues: int
    n_symbols: int
    antenna_spacing: float
    noise_power: float
    speed_of_light: float = SPEED_OF_LIGHT

    def __post_init__(self):
        for name in ("n_subcarriers", "n_rx_antennas", "n_tx_antennas",
                     "n_ues", "n_symbols"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        for name in ("subcarrier_spacing", "carrier_freq", "symbol_duration",
                     "cp_duration", "sample_duration", "antenna_spacing"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.noise_power < 0:
            raise ConfigError("noise_power must be nonnegative")
        t_expected = self.cp_duration + self.n_subcarriers * self.sample_duration
        if abs(self.symbol_duration - t_expected) > _REL_TOL * t_expected:
            raise ConfigError(
                "symbol_duration must equal cp_duration + N*sample_duration "
                f"({self.symbol_duration} vs {t_expected})")
        t_sam = 1.0 / (self.n_subcarriers * self.subcarrier_spacing)
        if abs(self.sample_duration - t_sam) > _REL_TOL * t_sam:
            raise ConfigError(
                f"sample_duration must equal 1/(N*subcarrier_spacing) "
                f"({self.sample_duration} vs {t_sam})")

    @property
    def wavelength(self) -> float:
        return self.speed_of_light / self.carrier_freq


@dataclass(frozen=True)
class ResourceAssignment:
    """Subcarrier and sensing-symbol index sets of one UE (1-based)."""

    ue_index: int
    subcarriers: tuple[int, ...]
    symbols: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "subcarriers", tuple(int(i) for i in self.subcarriers))
        object.__setattr__(self, "symbols", tuple(int(i) for i in self.symbols))
        if self.ue_index < 1:
            raise AssignmentError("ue_index must be >= 1")
        for name in ("subcarriers", "symbols"):
            idx = getattr(self, name)
            if len(idx) == 0:
                raise AssignmentError(f"{name} must be nonempty")
            if len(set(idx)) != len(idx):
                raise AssignmentError(f"duplicate indices in {name}: {idx}")
            if min(idx) < 1:
                raise AssignmentError(f"{name} indices must be >= 1")

    @property
    def n_subcarriers(self) -> int:
        return len(self.subcarriers)

    @property
    def n_symbols(self) -> int:
        return len(self.symbols)

    def validate_against(self, config: SystemConfig) -> None:
        if max(self.subcarriers) > config.n_subcarriers:
            raise AssignmentError(
                f"subcarrier index {max(self.subcarriers)} exceeds pool size "
                f"{config.n_subcarriers}")
        if max(self.symbols) > config.n_symbols:
            raise AssignmentError(
                f"symbol index {max(self.symbols)} exceeds frame length "
                f"{config.n_symbols}")


@dataclass(frozen=True)
class ChannelPath:
    """One propagation path: complex gain, delay, radial velocity, AOA/AOD.

    Angles are in radians; the spatial phase used by steering vectors is
    ``2*pi*d*cos(angle)/wavelength``.
    """

    gain: complex
    delay: float
    radial_velocity: float
    aoa: float
    aod: float

    def __post_init__(self):
        if self.delay < 0:
            raise ConfigError("path delay must be nonnegative")
        if abs(self.radial_velocity) >= 1e4:
            raise ConfigError("|radial_velocity| must be < 1e4 m/s")

    def doppler_ratio(self) -> float:
        """Two-way Doppler stretch 2*v/c (dimensionless)."""
        return 2.0 * self.radial_velocity / SPEED_OF_LIGHT

    def rx_phase(self, config: SystemConfig) -> float:
        return 2 * np.pi * config.antenna_spacing * np.cos(self.aoa) / config.wavelength

    def tx_phase(self, config: SystemConfig) -> float:
        return 2 * np.pi * config.antenna_spacing * np.cos(self.aod) / config.wavelength


def uniform_beamformer(n_tx: int) -> np.ndarray:
    """Unit-norm uniform beamforming vector (1/sqrt(M))*[1, ..., 1]."""
    return np.ones(n_tx, dtype=complex) / np.sqrt(n_tx)


@dataclass(frozen=True)
class UeChannel:
    """Per-UE channel: propagation paths plus the transmit beamformer."""

    paths: tuple[ChannelPath, ...]
    beamformer: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(self.paths))
        if len(self.paths) == 0:
            raise ConfigError("UeChannel needs at least one path")
        bf = np.asarray(self.beamformer, dtype=complex)
        if abs(np.linalg.norm(bf) - 1.0) > 1e-6:
            raise ConfigError("beamformer must have unit Euclidean norm")
        object.__setattr__(self, "beamformer", _readonly(bf))


@dataclass(frozen=True)
class DataGrid:
    """Per-UE modulated data: one (G, N_k) complex array per UE.

    Entries are unit-modulus when produced by :func:`random_qpsk_grid`;
    arbitrary nonzero entries are accepted on ingestion.
    """

    per_ue: tuple[np.ndarray, ...]

    def __post_init__(self):
        arrays = tuple(_readonly(np.asarray(a, dtype=complex)) for a in self.per_ue)
        if len(arrays) == 0:
            raise ConfigError("DataGrid needs at least one UE")
        g = arrays[0].shape[0]
        for a in arrays:
            if a.ndim != 2 or a.shape[0] != g:
                raise ConfigError("all UEs must carry the same number of symbols")
        object.__setattr__(self, "per_ue", arrays)

    @property
    def n_symbols(self) -> int:
        return self.per_ue[0].shape[0]


def random_qpsk_grid(config: SystemConfig,
                     assignments: Sequence[ResourceAssignment],
                     seed: int) -> DataGrid:
    """Draw a seeded unit-modulus QPSK grid for every UE and symbol."""
    rng = np.random.default_rng(seed)
    per_ue = []
    for a in assignments:
        k = rng.integers(0, 4, size=(config.n_symbols, a.n_subcarriers))
        per_ue.append(np.exp(1j * (np.pi / 4 + np.pi / 2 * k)))
    return DataGrid(per_ue=tuple(per_ue))


def steering_vector(angle_param: float, n_elements: int) -> np.ndarray:
    """ULA steering vector [1, e^{j*Omega}, ..., e^{j*(M-1)*Omega}]."""
    if n_elements < 1:
        raise ConfigError("n_elements must be >= 1")
    return np.exp(1j * angle_param * np.arange(n_elements))


def selection_matrix(assignment: ResourceAssignment, n_total: int) -> np.ndarray:
    """0/1 selection matrix with row i selecting subcarrier zeta[i].

    The result is N_k x N with exactly one 1 per row, and satisfies
    ``Gamma @ Gamma.T == I``.
    """
    idx = assignment.subcarriers
    if max(idx) > n_total:
        raise AssignmentError(
            f"subcarrier index {max(idx)} exceeds pool size {n_total}")
    gamma = np.zeros((len(idx), n_total))
    gamma[np.arange(len(idx)), np.asarray(idx) - 1] = 1.0
    return gamma


def index_variance(indices: Sequence[int]) -> float:
    """Population variance of an integer index set, computed exactly.

    Uses integer arithmetic (n*sum(x^2) - sum(x)^2) / n^2 so large indices
    do not suffer cancellation before the final division.
    """
    idx = [int(i) for i in indices]
    n = len(idx)
    if n == 0:
        raise AssignmentError("index_variance of an empty set is undefined")
    s1 = sum(idx)
    s2 = sum(i * i for i in idx)
    return (n * s2 - s1 * s1) / (n * n)
