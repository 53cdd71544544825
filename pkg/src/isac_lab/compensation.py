"""Data compensation: strip known payload from received frames to get CSI.

For unit-modulus data the compensator is the conjugate of the transmitted
symbol on each assigned subcarrier and zero elsewhere, which removes the
data while nulling every other UE's subcarriers.  Interference-free
compensation exists if and only if the UEs' subcarrier sets are pairwise
disjoint; the overlap case raises :class:`OverlapError` (a forced
extraction is available to measure the resulting leakage).
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CompensationError, ConfigError
from .model import DataGrid, ResourceAssignment, _readonly
from .synthesis import OfdmaFrameSet, check_disjoint, time_to_freq

_MIN_SYMBOL_MODULUS = 1e-6


@dataclass(frozen=True)
class CompensationMatrix:
    """Diagonal compensator of one UE for one OFDM symbol.

    ``diag`` has length N: reciprocal data on the UE's subcarriers, exact
    zero on all other subcarriers.
    """

    diag: np.ndarray
    ue_index: int

    def __post_init__(self):
        object.__setattr__(self, "diag", _readonly(np.asarray(self.diag, complex)))


@dataclass(frozen=True)
class CsiBlock:
    """Compensated CSI of one UE at one receive antenna, shape (G_k, N_k).

    Rows follow the UE's sensing-symbol list, columns its subcarrier list.
    """

    values: np.ndarray
    antenna_index: int

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(np.asarray(self.values, complex)))


def build_compensator(data: DataGrid, assignment: ResourceAssignment,
                      symbol_index: int, n_total: int) -> CompensationMatrix:
    """Compensator for one (UE, symbol): reciprocal on support, zero off it.

    ``symbol_index`` is the 1-based absolute OFDM symbol index.
    """
    if not (1 <= symbol_index <= data.n_symbols):
        raise ConfigError(f"symbol_index {symbol_index} out of range")
    symbols = data.per_ue[assignment.ue_index - 1][symbol_index - 1]
    if np.any(np.abs(symbols) < _MIN_SYMBOL_MODULUS):
        raise CompensationError(
            f"UE {assignment.ue_index} symbol {symbol_index}: data modulus "
            f"below {_MIN_SYMBOL_MODULUS}, compensation ill-conditioned")
    diag = np.zeros(n_total, dtype=complex)
    diag[np.asarray(assignment.subcarriers) - 1] = 1.0 / symbols
    return CompensationMatrix(diag=diag, ue_index=assignment.ue_index)


def build_compensators(data: DataGrid, assignment: ResourceAssignment,
                       n_total: int) -> list[CompensationMatrix]:
    """One compensator per assigned sensing symbol, aligned with psi."""
    return [build_compensator(data, assignment, g, n_total)
            for g in assignment.symbols]


def _csi_stack(frame_set: OfdmaFrameSet,
               compensators: Sequence[CompensationMatrix],
               assignment: ResourceAssignment) -> np.ndarray:
    """(M_R, G_k, N_k) compensated CSI for all antennas at once."""
    if len(compensators) != assignment.n_symbols:
        raise ConfigError("need one compensator per assigned sensing symbol")
    rows = np.asarray(assignment.symbols) - 1
    cols = np.asarray(assignment.subcarriers) - 1
    grid = time_to_freq(frame_set.frames[rows], axis=2)  # (G_k, M_R, N)
    diags = np.stack([c.diag for c in compensators])     # (G_k, N)
    compensated = grid * diags[:, None, :]
    return np.transpose(compensated[:, :, cols], (1, 0, 2))


def extract_csi(frame_set: OfdmaFrameSet,
                compensators: Sequence[CompensationMatrix],
                assignment: ResourceAssignment,
                antenna: int,
                peers: Sequence[ResourceAssignment] = (),
                force_overlap: bool = False) -> CsiBlock:
    """Compensated CSI block of one UE at one antenna.

    ``peers`` are the other UEs' assignments; if any of them shares a
    subcarrier with this UE the extraction raises :class:`OverlapError`
    unless ``force_overlap`` is set (useful only to measure the leakage
    that overlap causes).
    """
    if peers and not force_overlap:
        check_disjoint([assignment, *peers])
    n_antennas = frame_set.frames.shape[1]
    if not (0 <= antenna < n_antennas):
        raise ConfigError(f"antenna {antenna} out of range 0..{n_antennas - 1}")
    values = _csi_stack(frame_set, compensators, assignment)[antenna]
    return CsiBlock(values=values, antenna_index=antenna)


def extract_csi_all(frame_set: OfdmaFrameSet,
                    assignment: ResourceAssignment,
                    peers: Sequence[ResourceAssignment] = (),
                    force_overlap: bool = False) -> list[CsiBlock]:
    """CSI blocks of one UE for every receive antenna.

    Compensators are built from the frame set's own data grid.
    """
    if peers and not force_overlap:
        check_disjoint([assignment, *peers])
    n_total = frame_set.frames.shape[2]
    comps = build_compensators(frame_set.data, assignment, n_total)
    stack = _csi_stack(frame_set, comps, assignment)
    return [CsiBlock(values=stack[m], antenna_index=m)
            for m in range(stack.shape[0])]


def cross_ue_leakage(frame_set_all: OfdmaFrameSet,
                     frame_set_solo: OfdmaFrameSet,
                     assignment: ResourceAssignment) -> float:
    """Relative leakage power in one UE's CSI caused by the other UEs.

    Compares extractions from a frame set with every UE active against one
    where only this UE transmits; returns leakage power / solo CSI power.
    """
    full = np.stack([b.values for b in
                     extract_csi_all(frame_set_all, assignment)])
    solo = np.stack([b.values for b in
                     extract_csi_all(frame_set_solo, assignment)])
    ref = float(np.mean(np.abs(solo) ** 2))
    if ref == 0:
        raise ConfigError("solo CSI has zero power")
    return float(np.mean(np.abs(full - solo) ** 2)) / ref
