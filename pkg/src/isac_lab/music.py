"""2-D MUSIC estimation of (range, velocity) pairs from compensated CSI.

Snapshots are the vectorized per-antenna CSI blocks; their sample
covariance is eigendecomposed and delay-Doppler pairs are read off the
peaks of 1 / (a^H U_n U_n^H a) over a range-velocity grid, followed by
iterated per-axis quadratic refinement of the denominator around each
discrete peak.

Coherent multipath needs decorrelation: forward-only 2-D spatial smoothing
over (slow-time x frequency) subarrays is available for uniform index
lattices.  Non-uniform schemes run unsmoothed with light diagonal loading,
which is sufficient for single-path scenes.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, DegeneracyError
from .compensation import CsiBlock
from .model import ResourceAssignment, SystemConfig


@dataclass(frozen=True)
class MusicConfig:
    """Search grids, model order and optional smoothing subarray sizes.

    ``range_grid`` and ``velocity_grid`` are (min, max, step) in meters and
    m/s.  ``smoothing`` is (freq_sub, time_sub) or None; subarrays must be
    at least 2 wide and no wider than the assigned lattice.
    """

    range_grid: tuple[float, float, float]
    velocity_grid: tuple[float, float, float]
    n_sources: int = 1
    smoothing: tuple[int, int] | None = None
    refine_rounds: int = 3
    refine_shrink: float = 5.0

    def __post_init__(self):
        if self.n_sources < 1:
            raise ConfigError("n_sources must be >= 1")
        for name in ("range_grid", "velocity_grid"):
            lo, hi, step = getattr(self, name)
            if not (hi > lo and step > 0):
                raise ConfigError(f"{name} must satisfy max > min and step > 0")
        if self.smoothing is not None:
            f_sub, t_sub = self.smoothing
            if f_sub < 2 or t_sub < 2:
                raise ConfigError("smoothing subarray sizes must be >= 2")

    def range_points(self) -> np.ndarray:
        lo, hi, step = self.range_grid
        return np.arange(lo, hi + step / 2, step)

    def velocity_points(self) -> np.ndarray:
        lo, hi, step = self.velocity_grid
        return np.arange(lo, hi + step / 2, step)


@dataclass(frozen=True)
class EstimateSet:
    """Estimated (range m, velocity m/s, peak value) triples, strongest
    peak first; ``resolved`` is False when fewer local maxima than the
    requested model order were found."""

    pairs: tuple[tuple[float, float, float], ...]
    resolved: bool


def _uniform_step(indices: Sequence[int], what: str) -> int:
    steps = np.diff(np.asarray(indices))
    if len(steps) == 0 or not np.all(steps == steps[0]):
        raise ConfigError(
            f"spatial smoothing needs a uniform {what} lattice, got {indices}")
    return int(steps[0])


def _snapshot_matrix(blocks: Sequence[CsiBlock],
                     smoothing: tuple[int, int] | None,
                     assignment: ResourceAssignment | None) -> np.ndarray:
    """Stack snapshots as columns of a (dim, n_snapshots) matrix."""
    if len(blocks) == 0:
        raise ConfigError("need at least one CSI block")
    g_k, n_k = blocks[0].values.shape
    if smoothing is None:
        return np.stack([b.values.ravel() for b in blocks], axis=1)
    f_sub, t_sub = smoothing
    if f_sub > n_k or t_sub > g_k:
        raise ConfigError("smoothing subarrays exceed the CSI block")
    if assignment is None:
        raise ConfigError("smoothing requires the resource assignment")
    _uniform_step(assignment.subcarriers, "subcarrier")
    _uniform_step(assignment.symbols, "symbol")
    cols = []
    for b in blocks:
        for i in range(g_k - t_sub + 1):
            for j in range(n_k - f_sub + 1):
                cols.append(b.values[i:i + t_sub, j:j + f_sub].ravel())
    return np.stack(cols, axis=1)


def sample_covariance(blocks: Sequence[CsiBlock],
                      config: MusicConfig,
                      assignment: ResourceAssignment | None = None) -> np.ndarray:
    """Hermitian PSD sample covariance of the (possibly smoothed) snapshots.

    Without smoothing a light diagonal load (1e-6 of the mean diagonal)
    conditions the matrix; with smoothing enabled the number of subarrays
    per block must exceed the model order.
    """
    snaps = _snapshot_matrix(blocks, config.smoothing, assignment)
    dim, n_snap = snaps.shape
    if config.smoothing is not None:
        per_block = n_snap // len(blocks)
        if per_block < config.n_sources + 1:
            raise ConfigError(
                f"{per_block} subarrays per block cannot support model order "
                f"{config.n_sources}")
    elif n_snap < config.n_sources:
        raise ConfigError(
            f"{n_snap} snapshots cannot support model order {config.n_sources}")
    cov = snaps @ snaps.conj().T / n_snap
    cov = 0.5 * (cov + cov.conj().T)
    if config.smoothing is None:
        cov = cov + (1e-6 * np.trace(cov).real / dim) * np.eye(dim)
    return cov


def signal_subspace(snapshots: np.ndarray, n_sources: int) -> np.ndarray:
    """Dominant eigenvectors of the snapshot sample covariance.

    When there are fewer snapshots than dimensions the eigendecomposition
    is carried out in snapshot space (Gram matrix), which yields the same
    leading eigenvectors at a fraction of the cost.
    """
    dim, n_snap = snapshots.shape
    if n_sources >= dim:
        raise ConfigError("model order must be smaller than the snapshot dimension")
    if n_sources > n_snap:
        raise ConfigError(
            f"{n_snap} snapshots cannot support model order {n_sources}")
    if n_snap >= dim:
        cov = snapshots @ snapshots.conj().T / n_snap
        _, vec = np.linalg.eigh(cov)
        return vec[:, -n_sources:]
    gram = snapshots.conj().T @ snapshots
    _, vec = np.linalg.eigh(gram)
    basis = snapshots @ vec[:, -n_sources:]
    norms = np.linalg.norm(basis, axis=0)
    if np.any(norms == 0):
        raise DegeneracyError("rank-deficient snapshots for requested model order")
    return basis / norms


def _steering_lattices(assignment: ResourceAssignment, config: SystemConfig,
                       smoothing: tuple[int, int] | None):
    zeta = np.asarray(assignment.subcarriers, dtype=float)
    psi = np.asarray(assignment.symbols, dtype=float)
    if smoothing is not None:
        f_sub, t_sub = smoothing
        zeta = zeta[:f_sub]
        psi = psi[:t_sub]
    freq = zeta * config.subcarrier_spacing
    slow = (psi - 1.0) * config.carrier_freq * config.symbol_duration
    return slow, freq


def steering_from_lattice(slow: np.ndarray, freq: np.ndarray,
                          delay: float, doppler_ratio: float) -> np.ndarray:
    xi = np.exp(-2j * np.pi * slow * doppler_ratio)
    tau = np.exp(-2j * np.pi * freq * delay)
    return np.kron(xi, tau)


def music_spectrum(cov: np.ndarray, grid_point: tuple[float, float],
                   assignment: ResourceAssignment, config: SystemConfig,
                   n_sources: int = 1,
                   smoothing: tuple[int, int] | None = None) -> float:
    """Pseudo-spectrum 1/(a^H U_n U_n^H a) at one (delay, 2v/c) point.

    Exact subspace orthogonality (zero denominator) is reported as +inf.
    """
    delay, doppler = grid_point
    slow, freq = _steering_lattices(assignment, config, smoothing)
    a = steering_from_lattice(slow, freq, delay, doppler)
    if len(a) != cov.shape[0]:
        raise ConfigError("covariance size does not match the steering lattice")
    val, vec = np.linalg.eigh(cov)
    if n_sources >= cov.shape[0]:
        raise ConfigError("noise subspace is empty")
    u_s = vec[:, -n_sources:]
    den = float(np.linalg.norm(a) ** 2 - np.linalg.norm(u_s.conj().T @ a) ** 2)
    if den <= 0:
        return float("inf")
    return 1.0 / den


class _SpectrumEvaluator:
    """Batched denominator evaluation over separable (range, velocity) grids."""

    def __init__(self, u_s: np.ndarray, slow: np.ndarray, freq: np.ndarray,
                 speed_of_light: float):
        g_k, n_k = len(slow), len(freq)
        self.dim = g_k * n_k
        # (n_sources, G_k, N_k), conjugated once up front
        self.u = u_s.T.reshape(-1, g_k, n_k).conj()
        self.slow = slow
        self.freq = freq
        self.c = speed_of_light

    def denominator(self, ranges: np.ndarray, velocities: np.ndarray) -> np.ndarray:
        """den[i, j] for velocity i, range j; uses a^H a = dim."""
        tau = np.exp(-2j * np.pi * np.outer(self.freq, ranges / self.c))
        xi = np.exp(-2j * np.pi * np.outer(self.slow, 2.0 * velocities / self.c))
        acc = np.zeros((len(velocities), len(ranges)))
        for u in self.u:
            acc += np.abs(xi.T @ u @ tau) ** 2
        return self.dim - acc

    def denominator_at(self, rng: float, vel: float) -> float:
        return float(self.denominator(np.array([rng]), np.array([vel]))[0, 0])


def _local_minima(d: np.ndarray) -> list[tuple[int, int]]:
    """Strict 4-neighborhood local minima; falls back to the global argmin."""
    mask = np.ones(d.shape, dtype=bool)
    mask[1:, :] &= d[1:, :] < d[:-1, :]
    mask[:-1, :] &= d[:-1, :] < d[1:, :]
    mask[:, 1:] &= d[:, 1:] < d[:, :-1]
    mask[:, :-1] &= d[:, :-1] < d[:, 1:]
    out = [(int(i), int(j)) for i, j in zip(*np.nonzero(mask))]
    if not out:
        iv, ir = np.unravel_index(int(np.argmin(d)), d.shape)
        out = [(int(iv), int(ir))]
    return out


def _refine_axis(evaluate, x0: float, step: float, other: float,
                 axis: str) -> float:
    if axis == "range":
        d0 = evaluate(x0, other)
        dm = evaluate(x0 - step, other)
        dp = evaluate(x0 + step, other)
    else:
        d0 = evaluate(other, x0)
        dm = evaluate(other, x0 - step)
        dp = evaluate(other, x0 + step)
    curv = dm - 2 * d0 + dp
    if curv <= 0 or not np.isfinite(curv):
        return x0
    return x0 + 0.5 * step * (dm - dp) / curv


def estimate(blocks: Sequence[CsiBlock], assignment: ResourceAssignment,
             system_config: SystemConfig, config: MusicConfig) -> EstimateSet:
    """Grid search plus iterated per-axis quadratic refinement.

    Deterministic given its inputs.  Peaks are ranked by the refined
    pseudo-spectrum value and at most ``n_sources`` pairs are returned;
    ``resolved`` is False when the grid shows fewer local maxima.
    """
    snaps = _snapshot_matrix(blocks, config.smoothing, assignment)
    u_s = signal_subspace(snaps, config.n_sources)
    slow, freq = _steering_lattices(assignment, system_config, config.smoothing)
    ev = _SpectrumEvaluator(u_s, slow, freq, system_config.speed_of_light)

    ranges = config.range_points()
    velocities = config.velocity_points()
    d = ev.denominator(ranges, velocities)
    minima = _local_minima(d)
    minima.sort(key=lambda ij: d[ij])
    minima = minima[:config.n_sources]

    def eval_rv(rng, vel):
        return ev.denominator_at(rng, vel)

    pairs = []
    for iv, ir in minima:
        r0, v0 = float(ranges[ir]), float(velocities[iv])
        sr = config.range_grid[2]
        sv = config.velocity_grid[2]
        for _ in range(config.refine_rounds):
            r0 = _refine_axis(eval_rv, r0, sr, v0, "range")
            v0 = _refine_axis(eval_rv, v0, sv, r0, "velocity")
            sr /= config.refine_shrink
            sv /= config.refine_shrink
        den = eval_rv(r0, v0)
        peak = float("inf") if den <= 0 else 1.0 / den
        pairs.append((r0, v0, peak))

    pairs.sort(key=lambda p: -p[2])
    return EstimateSet(pairs=tuple(pairs), resolved=len(pairs) == config.n_sources)
