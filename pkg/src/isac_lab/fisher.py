"""Numerical Fisher-information CRB for joint (delay, Doppler) estimation.

This is the oracle the closed forms in :mod:`isac_lab.schemes` are checked
against.  The unknowns are p = [tau, 2v/c] with the complex amplitude beta
treated as a nuisance parameter, which is equivalent to projecting the
derivative vectors onto the orthogonal complement of the manifold:

    CRB^{-1} = (2 |beta|^2 / sigma^2) * Re{ V^H (I - A (A^H A)^{-1} A^H) V }

where A is the vectorized delay-Doppler manifold over the assigned
(symbol, subcarrier) lattice and V holds its analytic derivatives.
Reported entries are variances of (tau, 2v/c); multiply by c^2 and c^2/4
to convert to range (m^2) and velocity ((m/s)^2).
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegeneracyError
from .model import ResourceAssignment, SystemConfig, index_variance


@dataclass(frozen=True)
class FisherProblem:
    """Single-path estimation problem on one UE's resource lattice."""

    assignment: ResourceAssignment
    delay: float
    doppler_ratio: float  # 2v/c
    beta: complex
    noise_power: float
    config: SystemConfig

    def __post_init__(self):
        if self.noise_power <= 0:
            raise ConfigError("noise_power must be positive")
        if abs(self.beta) == 0:
            raise ConfigError("beta must be nonzero")
        self.assignment.validate_against(self.config)


def _phase_factors(problem: FisherProblem):
    cfg = problem.config
    zeta = np.asarray(problem.assignment.subcarriers, dtype=float)
    psi = np.asarray(problem.assignment.symbols, dtype=float)
    freq = zeta * cfg.subcarrier_spacing                    # delay axis (Hz)
    slow = (psi - 1.0) * cfg.carrier_freq * cfg.symbol_duration  # Doppler axis
    return slow, freq


def build_manifold(problem: FisherProblem) -> np.ndarray:
    """Vectorized manifold xi kron tau, symbol-major, unit-modulus entries.

    Entry (g, n) has phase -2*pi*[fc*(psi[g]-1)*Ts*(2v/c) + zeta[n]*df*tau].
    """
    slow, freq = _phase_factors(problem)
    xi = np.exp(-2j * np.pi * slow * problem.doppler_ratio)
    tau = np.exp(-2j * np.pi * freq * problem.delay)
    return np.kron(xi, tau)


def manifold_derivatives(problem: FisherProblem) -> np.ndarray:
    """Analytic d(manifold)/d[tau, 2v/c], columns aligned with the manifold."""
    slow, freq = _phase_factors(problem)
    a = build_manifold(problem)
    g_k, n_k = len(slow), len(freq)
    d_tau = (-2j * np.pi) * np.tile(freq, g_k) * a
    d_dop = (-2j * np.pi) * np.repeat(slow, n_k) * a
    return np.stack([d_tau, d_dop], axis=1)


def _projected_residual_numeric(problem: FisherProblem) -> np.ndarray:
    a = build_manifold(problem)
    v = manifold_derivatives(problem)
    vha = v.conj().T @ a
    gram = (a.conj() @ a).real  # equals G_k * N_k for unit-modulus entries
    return v.conj().T @ v - np.outer(vha, vha.conj()) / gram


def projection_residual(problem: FisherProblem) -> np.ndarray:
    """V^H V - V^H A (A^H A)^{-1} A^H V from the explicit index sums.

    Independent route from the vector arithmetic in :func:`fisher_crb`:
    every entry is assembled from scalar sums over the index lists.  The
    result is diagonal up to rounding,
    ``4 pi^2 G_k N_k diag(df^2 var_zeta, (fc Ts)^2 var_psi)``.
    """
    cfg = problem.config
    zeta = np.asarray(problem.assignment.subcarriers, dtype=float)
    psi = np.asarray(problem.assignment.symbols, dtype=float)
    n_k, g_k = len(zeta), len(psi)
    df = cfg.subcarrier_spacing
    fcts = cfg.carrier_freq * cfg.symbol_duration
    four_pi2 = 4 * np.pi ** 2

    sz, sz2 = zeta.sum(), (zeta ** 2).sum()
    sp, sp2 = psi.sum(), (psi ** 2).sum()

    vhv = np.array([
        [four_pi2 * df ** 2 * g_k * sz2, four_pi2 * df * fcts * sz * sp],
        [four_pi2 * df * fcts * sz * sp, four_pi2 * fcts ** 2 * n_k * sp2],
    ], dtype=complex)
    proj = np.array([
        [four_pi2 * df ** 2 * g_k ** 2 * sz ** 2,
         four_pi2 * df * fcts * g_k * n_k * sz * sp],
        [four_pi2 * df * fcts * g_k * n_k * sz * sp,
         four_pi2 * fcts ** 2 * n_k ** 2 * sp ** 2],
    ], dtype=complex) / (g_k * n_k)
    return vhv - proj


def fisher_crb(problem: FisherProblem) -> np.ndarray:
    """2x2 CRB for [tau, 2v/c] via the numeric projection form."""
    zeta_var = index_variance(problem.assignment.subcarriers)
    psi_var = index_variance(problem.assignment.symbols)
    if zeta_var <= 0 or psi_var <= 0:
        raise DegeneracyError(
            "degenerate index set: both subcarrier and symbol variances must "
            "be positive for an invertible Fisher matrix")
    residual = _projected_residual_numeric(problem).real
    fim = (2.0 * abs(problem.beta) ** 2 / problem.noise_power) * residual
    det = fim[0, 0] * fim[1, 1] - fim[0, 1] * fim[1, 0]
    if det <= 0:
        raise DegeneracyError("singular projected Fisher matrix")
    return np.array([[fim[1, 1], -fim[0, 1]], [-fim[1, 0], fim[0, 0]]]) / det


def crb_range_velocity(problem: FisherProblem) -> tuple[float, float]:
    """Convert the [tau, 2v/c] CRB diagonal to range (m^2) and velocity
    ((m/s)^2) via R = c*tau and v = (c/2)*(2v/c)."""
    crb = fisher_crb(problem)
    c = problem.config.speed_of_light
    return c ** 2 * crb[0, 0], (c ** 2 / 4.0) * crb[1, 1]
