"""Inter-carrier interference and achievable communication rates.

The Doppler-perturbed demodulation matrix of one path is

    Qt[n1, n2] = exp(-j*2*pi*(n1-1)*df*tau) / N
                 * sum_p exp(j*2*pi*(n1-n2)*(p-1)/N)
                 * exp(j*2*pi*(2v/c)*(1-n1)*(p-1)/N)

whose off-diagonal entries carry the ICI leaked between subcarriers.  A
sample-exact synthesis of one OFDM symbol (per-sample Doppler stretch on
every subcarrier) is provided to tie the matrix to the time-domain model:
demodulating the exact samples reproduces the Qt columns.

Per-symbol constant carrier phase factors are omitted throughout this
module; they affect neither interference power nor rates.

Rates are log2-based (bits/s/Hz).  The interference-plus-noise power is a
seeded Monte Carlo expectation over unit-modulus data draws; the desired
signal on a subcarrier is its phase-rotated own component (the Qt
diagonal), so zero velocity yields exactly zero ICI.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .model import (ChannelPath, DataGrid, ResourceAssignment, SystemConfig,
                    UeChannel, _readonly, steering_vector)
from .synthesis import check_disjoint, ue_gain


@dataclass(frozen=True)
class IciMatrix:
    """Doppler-perturbed demodulation matrix Qt of one propagation path."""

    values: np.ndarray
    path: ChannelPath

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(np.asarray(self.values, complex)))

    def max_off_diagonal(self) -> float:
        off = np.abs(self.values - np.diag(np.diag(self.values)))
        return float(off.max())


@dataclass(frozen=True)
class RateReport:
    """Per-subcarrier achievable rates with exact and approximate noise.

    ``rates_exact`` uses the measured interference-plus-noise power per
    subcarrier, ``rates_approx`` plain noise; both are tuples over UEs of
    (G, N_k) arrays.  ``inp_power`` maps each assigned subcarrier (1-based)
    to its interference-plus-noise power.
    """

    rates_exact: tuple[np.ndarray, ...]
    rates_approx: tuple[np.ndarray, ...]
    inp_power: dict[int, float]
    noise_power: float

    def sum_rate(self, exact: bool = True) -> float:
        """Total rate over all assigned subcarriers, averaged over symbols."""
        rates = self.rates_exact if exact else self.rates_approx
        return float(sum(r.sum(axis=1).mean() for r in rates))


def ici_matrix(path: ChannelPath, config: SystemConfig) -> IciMatrix:
    """Direct summation of the Qt closed form (no small-Doppler approximation).

    The inner sum over samples is carried out by an exact FFT along the
    sample axis.  Zero velocity gives exactly the phase diagonal
    diag(exp(-j*2*pi*(n-1)*df*tau)).
    """
    n = config.n_subcarriers
    dvc = path.doppler_ratio()
    rows = np.arange(n, dtype=float)      # n1 - 1
    p = np.arange(n, dtype=float)         # p - 1
    if dvc == 0.0:
        qt = np.diag(np.exp(-2j * np.pi * rows * config.subcarrier_spacing
                            * path.delay)).astype(complex)
        return IciMatrix(values=qt, path=path)
    # sum_p e^{j2pi p[(n1-n2) + dvc(1-n1)]/N} == FFT_p->(n2-1) of
    # e^{j2pi p[(n1-1) + dvc(1-n1)]/N}, evaluated row-wise.
    base = np.exp(2j * np.pi * np.outer(rows - dvc * rows, p) / n)
    row_phase = np.exp(-2j * np.pi * rows * config.subcarrier_spacing * path.delay)
    qt = row_phase[:, None] * np.fft.fft(base, axis=1) / n
    return IciMatrix(values=qt, path=path)


def doppler_stretch_matrix(path: ChannelPath, config: SystemConfig) -> np.ndarray:
    """Per-sample subcarrier phase matrix Q[n, p] of the exact time model.

    Q[n, p] = exp(-j*2*pi*(n-1)*df*[(2v/c - 1)*(p-1)*Tsam + tau]).
    """
    n = config.n_subcarriers
    rows = np.arange(n, dtype=float)[:, None]
    p = np.arange(n, dtype=float)[None, :]
    dvc = path.doppler_ratio()
    arg = (dvc - 1.0) * p * config.sample_duration + path.delay
    return np.exp(-2j * np.pi * rows * config.subcarrier_spacing * arg)


def demodulate_exact(samples: np.ndarray) -> np.ndarray:
    """Frequency transform used by the exact-model consistency check
    (forward DFT with 1/N scaling along the last axis)."""
    return np.fft.fft(samples, axis=-1) / samples.shape[-1]


def _padded_row(symbols: np.ndarray, assignment: ResourceAssignment,
                n_total: int) -> np.ndarray:
    row = np.zeros(n_total, dtype=complex)
    row[np.asarray(assignment.subcarriers) - 1] = symbols
    return row


def sample_exact_symbol(channels: Sequence[UeChannel],
                        assignments: Sequence[ResourceAssignment],
                        data: DataGrid, config: SystemConfig,
                        symbol_index: int) -> np.ndarray:
    """Noiseless (M_R, N) time samples of one OFDM symbol, sample-exact.

    Every subcarrier of every path is phase-advanced per sample, so the
    Doppler-induced ICI is present in full rather than folded into a
    per-symbol constant.
    """
    m_r = config.n_rx_antennas
    out = np.zeros((m_r, config.n_subcarriers), dtype=complex)
    for channel, assignment in zip(channels, assignments):
        srow = _padded_row(data.per_ue[assignment.ue_index - 1][symbol_index - 1],
                           assignment, config.n_subcarriers)
        for l, path in enumerate(channel.paths):
            h = _channel_vector(channel, l, config)
            stretched = srow @ doppler_stretch_matrix(path, config)
            out += np.outer(h, stretched)
    return out


def _channel_vector(channel: UeChannel, path_index: int,
                    config: SystemConfig) -> np.ndarray:
    """Receive-side channel vector h = alpha * a(Omega_r) * (a^T(Omega_t) w)."""
    path = channel.paths[path_index]
    rx = steering_vector(path.rx_phase(config), config.n_rx_antennas)
    return path.gain * rx * ue_gain(channel, path_index, config)


def _owner_of(subcarrier: int,
              assignments: Sequence[ResourceAssignment]) -> ResourceAssignment:
    for a in assignments:
        if subcarrier in a.subcarriers:
            return a
    raise ConfigError(f"subcarrier {subcarrier} is not assigned to any UE")


def _ici_terms(channels, assignments, config):
    """Precompute per-(UE, path) channel vectors and Qt matrices."""
    terms = []
    for channel, assignment in zip(channels, assignments):
        per_path = []
        for l, path in enumerate(channel.paths):
            per_path.append((_channel_vector(channel, l, config),
                             ici_matrix(path, config).values))
        terms.append((assignment, per_path))
    return terms


def _draw_rows(assignments, config, rng):
    rows = []
    for a in assignments:
        k = rng.integers(0, 4, size=a.n_subcarriers)
        rows.append(_padded_row(np.exp(1j * (np.pi / 4 + np.pi / 2 * k)),
                                a, config.n_subcarriers))
    return rows


def ici_power(channels: Sequence[UeChannel],
              assignments: Sequence[ResourceAssignment],
              config: SystemConfig, subcarrier: int,
              n_draws: int = 100, seed: int = 0) -> float:
    """Interference power on one subcarrier (noise excluded).

    Monte Carlo expectation over seeded unit-modulus data draws of the
    received power minus the phase-rotated own component, averaged over
    receive antennas.  Independent of the OFDM symbol index.
    """
    check_disjoint(assignments)
    owner = _owner_of(subcarrier, assignments)
    col = subcarrier - 1
    own_pos = owner.subcarriers.index(subcarrier)
    terms = _ici_terms(channels, assignments, config)
    rng = np.random.default_rng(seed)
    acc = 0.0
    for _ in range(n_draws):
        rows = _draw_rows(assignments, config, rng)
        received = np.zeros(config.n_rx_antennas, dtype=complex)
        desired = np.zeros(config.n_rx_antennas, dtype=complex)
        for (assignment, per_path), row in zip(terms, rows):
            for h, qt in per_path:
                received += h * (row @ qt[:, col])
                if assignment.ue_index == owner.ue_index:
                    # same association as the received term so that a
                    # phase-diagonal qt cancels exactly, not just to rounding
                    desired += h * (qt[col, col] * row[col])
        acc += float(np.mean(np.abs(received - desired) ** 2))
    return acc / n_draws


def achievable_rates(channels: Sequence[UeChannel],
                     assignments: Sequence[ResourceAssignment],
                     data: DataGrid, config: SystemConfig,
                     noise_power: float | None = None,
                     n_draws: int = 100, seed: int = 0) -> RateReport:
    """Per-subcarrier rates log2 det(I + x x^H / inp) for the given data.

    ``rates_exact`` uses inp = measured ICI power + noise on each
    subcarrier; ``rates_approx`` takes the interference-free shortcut
    inp = noise.  For a rank-one signal the determinant reduces to
    1 + ||x||^2 / inp.
    """
    check_disjoint(assignments)
    sigma2 = config.noise_power if noise_power is None else noise_power
    if sigma2 <= 0:
        raise ConfigError("noise power must be positive for rates")
    terms = _ici_terms(channels, assignments, config)

    inp: dict[int, float] = {}
    for assignment in assignments:
        for sc in assignment.subcarriers:
            inp[sc] = ici_power(channels, assignments, config, sc,
                                n_draws=n_draws, seed=seed) + sigma2

    rates_exact, rates_approx = [], []
    for (assignment, per_path), grid in zip(terms, (data.per_ue[a.ue_index - 1]
                                                    for a in assignments)):
        g = grid.shape[0]
        cols = np.asarray(assignment.subcarriers) - 1
        # desired vector per (g, n): sum over paths of h * Qt[n, n] * s
        gain = np.zeros((config.n_rx_antennas, len(cols)), dtype=complex)
        for h, qt in per_path:
            gain += np.outer(h, qt[cols, cols])
        power = (np.linalg.norm(gain, axis=0) ** 2)[None, :] * np.abs(grid) ** 2
        inp_row = np.array([inp[sc] for sc in assignment.subcarriers])
        rates_exact.append(np.log2(1.0 + power / inp_row[None, :]))
        rates_approx.append(np.log2(1.0 + power / sigma2))
        assert rates_exact[-1].shape == (g, len(cols))

    return RateReport(rates_exact=tuple(rates_exact),
                      rates_approx=tuple(rates_approx),
                      inp_power=inp, noise_power=sigma2)
