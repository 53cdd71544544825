"""OFDMA frame-set synthesis through the delay-Doppler channel.

Builds the received time-domain symbols for all UEs under the slow-time
approximation: the carrier Doppler phase is constant within one OFDM symbol
and advances per symbol as exp(-j*2*pi*fc*(2v/c)*[(g-1)*Ts + Tc]); the
per-subcarrier delay phase is exp(-j*2*pi*zeta*df*tau).  Frames are
produced post-CP-removal, so no cyclic-prefix samples are materialized.

DFT convention: the frequency<->time maps are the unitary DFT pair
(1/sqrt(N) both ways).  With unit-modulus data this keeps the per-RE noise
power after demodulation equal to the time-domain sample noise power, so a
single sigma^2 means the same thing in the frame, CSI and CRB domains, and
compensated CSI magnitudes equal the effective path amplitude directly.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, OverlapError
from .model import (DataGrid, ResourceAssignment, SystemConfig, UeChannel,
                    _readonly, steering_vector)


def freq_to_time(grid: np.ndarray, axis: int = -1) -> np.ndarray:
    """Unitary inverse DFT along ``axis`` (frequency bins -> time samples)."""
    n = grid.shape[axis]
    return np.fft.ifft(grid, axis=axis) * np.sqrt(n)


def time_to_freq(samples: np.ndarray, axis: int = -1) -> np.ndarray:
    """Unitary forward DFT along ``axis`` (time samples -> frequency bins)."""
    n = samples.shape[axis]
    return np.fft.fft(samples, axis=axis) / np.sqrt(n)


@dataclass(frozen=True)
class OfdmaFrameSet:
    """Received time-domain symbols: complex array (G, M_R, N)."""

    frames: np.ndarray
    data: DataGrid
    rng_seed: int

    def __post_init__(self):
        f = np.asarray(self.frames, dtype=complex)
        if f.ndim != 3:
            raise ConfigError("frames must have shape (G, M_R, N)")
        object.__setattr__(self, "frames", _readonly(f))

    @property
    def n_symbols(self) -> int:
        return self.frames.shape[0]


def check_disjoint(assignments: Sequence[ResourceAssignment]) -> None:
    """Raise OverlapError if any two UEs share a subcarrier."""
    for i in range(len(assignments)):
        for j in range(i + 1, len(assignments)):
            shared = set(assignments[i].subcarriers) & set(assignments[j].subcarriers)
            if shared:
                raise OverlapError(
                    f"UEs {assignments[i].ue_index} and {assignments[j].ue_index} "
                    f"share subcarrier(s) {sorted(shared)}")


def ue_gain(channel: UeChannel, path_index: int, config: SystemConfig) -> complex:
    """Scalar transmit-side gain a^T(Omega_t) @ beamformer for one path."""
    if len(channel.beamformer) != config.n_tx_antennas:
        raise ConfigError(
            f"beamformer length {len(channel.beamformer)} != n_tx_antennas "
            f"{config.n_tx_antennas}")
    path = channel.paths[path_index]
    at = steering_vector(path.tx_phase(config), config.n_tx_antennas)
    return complex(at @ channel.beamformer)


def effective_amplitude(channel: UeChannel, path_index: int,
                        config: SystemConfig) -> complex:
    """Slow-time CSI amplitude of a path at receive antenna 0.

    alpha * exp(-j*2*pi*fc*tau*(1 - 2v/c)) * exp(-j*2*pi*fc*(2v/c)*Tc)
    times the transmit-side gain; antenna m scales it by exp(j*m*Omega_r).
    """
    path = channel.paths[path_index]
    dvc = path.doppler_ratio()
    fc = config.carrier_freq
    abar = path.gain * np.exp(-2j * np.pi * fc * path.delay * (1.0 - dvc))
    return abar * np.exp(-2j * np.pi * fc * dvc * config.cp_duration) \
        * ue_gain(channel, path_index, config)


def synthesize_frames(config: SystemConfig,
                      channels: Sequence[UeChannel],
                      assignments: Sequence[ResourceAssignment],
                      data: DataGrid,
                      seed: int = 0,
                      allow_overlap: bool = False) -> OfdmaFrameSet:
    """Noiseless received frame set for all UEs (superposition over paths).

    ``allow_overlap`` permits subcarrier-sharing UEs, which is only useful
    to demonstrate that compensation then fails; the default rejects it.
    """
    k_ues = len(channels)
    if len(assignments) != k_ues or len(data.per_ue) != k_ues:
        raise ConfigError("channels, assignments and data must align per UE")
    if data.n_symbols != config.n_symbols:
        raise ConfigError(
            f"data grid has {data.n_symbols} symbols, config expects "
            f"{config.n_symbols}")
    for a, d in zip(assignments, data.per_ue):
        a.validate_against(config)
        if d.shape[1] != a.n_subcarriers:
            raise ConfigError(
                f"UE {a.ue_index}: data width {d.shape[1]} != assigned "
                f"subcarriers {a.n_subcarriers}")
    if not allow_overlap:
        check_disjoint(assignments)

    g_all = np.arange(config.n_symbols, dtype=float)  # absolute symbol index - 1
    frames = np.zeros((config.n_symbols, config.n_rx_antennas,
                       config.n_subcarriers), dtype=complex)
    for channel, assignment, symbols in zip(channels, assignments, data.per_ue):
        cols = np.asarray(assignment.subcarriers) - 1
        freqs = np.asarray(assignment.subcarriers, float) * config.subcarrier_spacing
        for l in range(len(channel.paths)):
            path = channel.paths[l]
            dvc = path.doppler_ratio()
            amp = effective_amplitude(channel, l, config)
            doppler = np.exp(-2j * np.pi * config.carrier_freq * dvc
                             * g_all * config.symbol_duration)
            delay_phases = np.exp(-2j * np.pi * freqs * path.delay)
            grid = np.zeros((config.n_symbols, config.n_subcarriers), dtype=complex)
            grid[:, cols] = amp * doppler[:, None] * delay_phases[None, :] * symbols
            rx = steering_vector(path.rx_phase(config), config.n_rx_antennas)
            frames += rx[None, :, None] * freq_to_time(grid, axis=1)[:, None, :]
    return OfdmaFrameSet(frames=frames, data=data, rng_seed=seed)


def add_awgn(frame_set: OfdmaFrameSet, noise_power: float,
             seed: int) -> OfdmaFrameSet:
    """Add complex AWGN with per-sample variance ``noise_power``.

    The stream is split per symbol index so parallel per-symbol generation
    would reproduce the same frames.
    """
    if noise_power < 0:
        raise ConfigError("noise_power must be nonnegative")
    if noise_power == 0:
        return OfdmaFrameSet(frames=frame_set.frames, data=frame_set.data,
                             rng_seed=seed)
    g, m_r, n = frame_set.frames.shape
    noise = np.empty((g, m_r, n), dtype=complex)
    scale = np.sqrt(noise_power / 2.0)
    for sym in range(g):
        rng = np.random.default_rng([seed, sym])
        block = rng.standard_normal((m_r, n, 2))
        noise[sym] = scale * (block[..., 0] + 1j * block[..., 1])
    return OfdmaFrameSet(frames=frame_set.frames + noise, data=frame_set.data,
                         rng_seed=seed)


def measure_re_snr(noiseless: OfdmaFrameSet, assignment: ResourceAssignment,
                   noise_power: float) -> float:
    """Measured per-resource-element SNR: mean demodulated useful power on
    the UE's assigned REs divided by the per-RE noise power."""
    grid = time_to_freq(noiseless.frames, axis=2)
    cols = np.asarray(assignment.subcarriers) - 1
    rows = np.asarray(assignment.symbols) - 1
    useful = grid[np.ix_(rows, range(grid.shape[1]), cols)]
    return float(np.mean(np.abs(useful) ** 2) / noise_power)
