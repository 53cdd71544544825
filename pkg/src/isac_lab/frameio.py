"""Binary dump formats for frames and CSI blocks.

Both layouts are little-endian with a fixed 8-byte magic, integer header
fields, then interleaved complex64 payload in C order.

Frames  (magic ISACFRM1): uint32 G, M_R, N; uint64 seed; complex64[G,M_R,N]
CSI     (magic ISACCSI1): uint32 M, G_k, N_k; float64 subcarrier_spacing,
        carrier_freq, symbol_duration; uint32 zeta[N_k]; uint32 psi[G_k];
        complex64[M, G_k, N_k]
"""

import struct
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .compensation import CsiBlock
from .model import SPEED_OF_LIGHT, ResourceAssignment, SystemConfig
from .synthesis import OfdmaFrameSet

_FRAME_MAGIC = b"ISACFRM1"
_CSI_MAGIC = b"ISACCSI1"


def dump_frames(frame_set: OfdmaFrameSet, path) -> None:
    g, m_r, n = frame_set.frames.shape
    with open(path, "wb") as fh:
        fh.write(_FRAME_MAGIC)
        fh.write(struct.pack("<IIIQ", g, m_r, n, frame_set.rng_seed))
        fh.write(np.ascontiguousarray(frame_set.frames.astype("<c8")).tobytes())


def load_frames(path) -> tuple[np.ndarray, int]:
    """Returns (frames array of shape (G, M_R, N), rng seed)."""
    with open(path, "rb") as fh:
        if fh.read(8) != _FRAME_MAGIC:
            raise ConfigError(f"{path} is not a frame dump")
        g, m_r, n, seed = struct.unpack("<IIIQ", fh.read(20))
        data = np.frombuffer(fh.read(), dtype="<c8")
    if data.size != g * m_r * n:
        raise ConfigError(f"{path}: truncated frame payload")
    return data.reshape(g, m_r, n).astype(complex), seed


@dataclass(frozen=True)
class SteeringParams:
    """The slice of the system config a stored CSI block needs for MUSIC."""

    subcarrier_spacing: float
    carrier_freq: float
    symbol_duration: float
    speed_of_light: float = SPEED_OF_LIGHT


@dataclass(frozen=True)
class CsiDump:
    """A reloaded CSI dump: per-antenna blocks plus steering geometry."""

    blocks: tuple[CsiBlock, ...]
    assignment: ResourceAssignment
    params: SteeringParams


def dump_csi(blocks: Sequence[CsiBlock], assignment: ResourceAssignment,
             config: SystemConfig, path) -> None:
    values = np.stack([b.values for b in blocks])
    m, g_k, n_k = values.shape
    if (g_k, n_k) != (assignment.n_symbols, assignment.n_subcarriers):
        raise ConfigError("CSI block shape does not match the assignment")
    with open(path, "wb") as fh:
        fh.write(_CSI_MAGIC)
        fh.write(struct.pack("<III", m, g_k, n_k))
        fh.write(struct.pack("<ddd", config.subcarrier_spacing,
                             config.carrier_freq, config.symbol_duration))
        fh.write(np.asarray(assignment.subcarriers, dtype="<u4").tobytes())
        fh.write(np.asarray(assignment.symbols, dtype="<u4").tobytes())
        fh.write(np.ascontiguousarray(values.astype("<c8")).tobytes())


def load_csi(path) -> CsiDump:
    with open(path, "rb") as fh:
        if fh.read(8) != _CSI_MAGIC:
            raise ConfigError(f"{path} is not a CSI dump")
        m, g_k, n_k = struct.unpack("<III", fh.read(12))
        df, fc, ts = struct.unpack("<ddd", fh.read(24))
        zeta = np.frombuffer(fh.read(4 * n_k), dtype="<u4")
        psi = np.frombuffer(fh.read(4 * g_k), dtype="<u4")
        data = np.frombuffer(fh.read(), dtype="<c8")
    if data.size != m * g_k * n_k:
        raise ConfigError(f"{path}: truncated CSI payload")
    values = data.reshape(m, g_k, n_k).astype(complex)
    assignment = ResourceAssignment(
        ue_index=1, subcarriers=tuple(int(i) for i in zeta),
        symbols=tuple(int(i) for i in psi))
    blocks = tuple(CsiBlock(values=values[i], antenna_index=i) for i in range(m))
    return CsiDump(blocks=blocks, assignment=assignment,
                   params=SteeringParams(subcarrier_spacing=df,
                                         carrier_freq=fc, symbol_duration=ts))
