"""Scenario definition: config-file ingestion and desk-scale defaults.

Scenario files are INI text (key/value pairs grouped in sections; nesting
is expressed with dotted section names).  Schema:

    [system]            one key per SystemConfig field (except the speed
                        of light, which is fixed)
    [ue.<k>]            subcarriers = 1 4 7 ...   (1-based indices)
                        symbols     = 1 4 7 ...
                        beamformer  = <complex> <complex> ...  (optional,
                                      unit norm; default uniform)
    [ue.<k>.path.<l>]   gain (complex), delay (s), radial_velocity (m/s),
                        aoa (rad), aod (rad)

UE and path numbering must be contiguous from 1.  All values are plain
text; no binary formats.
"""

import configparser
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .model import (ChannelPath, ResourceAssignment, SystemConfig, UeChannel,
                    uniform_beamformer)
from .schemes import SchemeKind, generate_scheme
from .synthesis import ue_gain

_SYSTEM_KEYS = {
    "n_subcarriers": int, "subcarrier_spacing": float, "carrier_freq": float,
    "symbol_duration": float, "cp_duration": float, "sample_duration": float,
    "n_rx_antennas": int, "n_tx_antennas": int, "n_ues": int,
    "n_symbols": int, "antenna_spacing": float, "noise_power": float,
}
_PATH_KEYS = {"gain": complex, "delay": float, "radial_velocity": float,
              "aoa": float, "aod": float}


@dataclass(frozen=True)
class Scenario:
    """A complete simulation setup: numerology, assignments and channels."""

    config: SystemConfig
    assignments: tuple[ResourceAssignment, ...]
    channels: tuple[UeChannel, ...]


def _parse_section(section, keys, where):
    out = {}
    for key in section:
        if key not in keys:
            raise ConfigError(f"unknown key {key!r} in [{where}]")
        out[key] = keys[key](section[key])
    missing = set(keys) - set(out)
    if missing:
        raise ConfigError(f"missing key(s) {sorted(missing)} in [{where}]")
    return out


def load_scenario(path) -> Scenario:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read scenario file {path}")
    if "system" not in parser:
        raise ConfigError("scenario file needs a [system] section")
    config = SystemConfig(**_parse_section(parser["system"], _SYSTEM_KEYS, "system"))

    assignments, channels = [], []
    for k in range(1, config.n_ues + 1):
        ue_name = f"ue.{k}"
        if ue_name not in parser:
            raise ConfigError(f"missing section [{ue_name}]")
        sec = parser[ue_name]
        for key in sec:
            if key not in ("subcarriers", "symbols", "beamformer"):
                raise ConfigError(f"unknown key {key!r} in [{ue_name}]")
        try:
            subcarriers = tuple(int(t) for t in sec["subcarriers"].split())
            symbols = tuple(int(t) for t in sec["symbols"].split())
        except KeyError as exc:
            raise ConfigError(f"[{ue_name}] needs {exc.args[0]}") from None
        assignment = ResourceAssignment(ue_index=k, subcarriers=subcarriers,
                                        symbols=symbols)
        assignment.validate_against(config)
        assignments.append(assignment)

        if "beamformer" in sec:
            bf = np.array([complex(t) for t in sec["beamformer"].split()])
            if len(bf) != config.n_tx_antennas:
                raise ConfigError(f"[{ue_name}] beamformer length != n_tx_antennas")
        else:
            bf = uniform_beamformer(config.n_tx_antennas)

        paths = []
        l = 1
        while f"{ue_name}.path.{l}" in parser:
            vals = _parse_section(parser[f"{ue_name}.path.{l}"], _PATH_KEYS,
                                  f"{ue_name}.path.{l}")
            paths.append(ChannelPath(**vals))
            l += 1
        if not paths:
            raise ConfigError(f"UE {k} has no [{ue_name}.path.1] section")
        channels.append(UeChannel(paths=tuple(paths), beamformer=bf))

    for name in parser.sections():
        if name == "system" or name.startswith("ue."):
            continue
        raise ConfigError(f"unknown section [{name}]")
    return Scenario(config=config, assignments=tuple(assignments),
                    channels=tuple(channels))


def save_scenario(scenario: Scenario, path) -> None:
    parser = configparser.ConfigParser()
    cfg = scenario.config
    parser["system"] = {k: repr(_SYSTEM_KEYS[k](getattr(cfg, k)))
                        for k in _SYSTEM_KEYS}
    for assignment, channel in zip(scenario.assignments, scenario.channels):
        k = assignment.ue_index
        parser[f"ue.{k}"] = {
            "subcarriers": " ".join(str(i) for i in assignment.subcarriers),
            "symbols": " ".join(str(i) for i in assignment.symbols),
            "beamformer": " ".join(repr(complex(b)) for b in channel.beamformer),
        }
        for l, p in enumerate(channel.paths, start=1):
            parser[f"ue.{k}.path.{l}"] = {
                "gain": repr(complex(p.gain)),
                "delay": repr(float(p.delay)),
                "radial_velocity": repr(float(p.radial_velocity)),
                "aoa": repr(float(p.aoa)),
                "aod": repr(float(p.aod)),
            }
    with open(path, "w") as fh:
        parser.write(fh)


# ---------------------------------------------------------------------------
# Desk-scale defaults: 48-subcarrier/48-symbol pool, 16 per UE, 3 UEs,
# 28 GHz carrier, 100 kHz spacing, 8 RX / 2 TX antennas.
# ---------------------------------------------------------------------------

DESK_POOL = 48
DESK_COUNT = 16
DESK_UES = 3
DESK_RANGES_M = (30.0, 50.0, 80.0)
DESK_VELOCITIES_MS = (10.0, 30.0, 20.0)
_DESK_AOAS = (np.deg2rad(60.0), np.deg2rad(100.0), np.deg2rad(140.0))
_DESK_AODS = (np.deg2rad(90.0), np.deg2rad(80.0), np.deg2rad(105.0))


def desk_config(noise_power: float = 1e-2, n_ues: int = DESK_UES) -> SystemConfig:
    """Default numerology with a 1/8-symbol cyclic prefix."""
    n = DESK_POOL
    df = 100e3
    fc = 28e9
    t_sam = 1.0 / (n * df)
    t_c = 6 * t_sam
    c = SystemConfig.__dataclass_fields__["speed_of_light"].default
    return SystemConfig(
        n_subcarriers=n, subcarrier_spacing=df, carrier_freq=fc,
        symbol_duration=t_c + n * t_sam, cp_duration=t_c, sample_duration=t_sam,
        n_rx_antennas=8, n_tx_antennas=2, n_ues=n_ues, n_symbols=n,
        antenna_spacing=c / fc / 2, noise_power=noise_power)


def make_target_channel(config: SystemConfig, range_m: float,
                        velocity_ms: float, aoa: float, aod: float,
                        unit_amplitude: bool = True) -> UeChannel:
    """Single-path UE channel for a target at the given range and velocity.

    With ``unit_amplitude`` the path gain absorbs the transmit-side array
    factor so the per-antenna CSI amplitude has modulus one, making the
    configured noise power directly the inverse per-RE SNR.
    """
    path = ChannelPath(gain=1.0 + 0.0j, delay=range_m / config.speed_of_light,
                       radial_velocity=velocity_ms, aoa=aoa, aod=aod)
    channel = UeChannel(paths=(path,),
                        beamformer=uniform_beamformer(config.n_tx_antennas))
    if unit_amplitude:
        g = ue_gain(channel, 0, config)
        path = ChannelPath(gain=1.0 / g, delay=path.delay,
                           radial_velocity=velocity_ms, aoa=aoa, aod=aod)
        channel = UeChannel(paths=(path,), beamformer=channel.beamformer)
    return channel


def desk_channels(config: SystemConfig, n_ues: int = DESK_UES) -> tuple[UeChannel, ...]:
    """Targets at 30/50/80 m moving at 10/30/20 m/s."""
    return tuple(
        make_target_channel(config, DESK_RANGES_M[k], DESK_VELOCITIES_MS[k],
                            _DESK_AOAS[k], _DESK_AODS[k])
        for k in range(n_ues))


def scheme_assignments(kind: SchemeKind, n_ues: int = DESK_UES,
                       pool: int = DESK_POOL, count: int = DESK_COUNT,
                       symbol_kind: SchemeKind | None = None,
                       symbol_ue_index: int | None = None) -> tuple[ResourceAssignment, ...]:
    """Assignments for n_ues UEs under one named scheme.

    Subcarriers follow the scheme per UE; sensing symbols reuse the same
    pattern but may overlap across UEs (time resources are shareable), so
    every UE gets the UE-1 symbol pattern unless ``symbol_ue_index`` says
    otherwise.
    """
    symbol_kind = symbol_kind or kind
    out = []
    for k in range(1, n_ues + 1):
        sub = generate_scheme(kind, pool, count, k, n_ues)
        sym = generate_scheme(symbol_kind, pool, count,
                              symbol_ue_index if symbol_ue_index else 1, n_ues)
        out.append(ResourceAssignment(ue_index=k, subcarriers=sub, symbols=sym))
    return tuple(out)


def assignments_from_lists(subcarrier_lists: Sequence[Sequence[int]],
                           symbol_lists: Sequence[Sequence[int]]) -> tuple[ResourceAssignment, ...]:
    return tuple(
        ResourceAssignment(ue_index=k + 1, subcarriers=tuple(sub),
                           symbols=tuple(sym))
        for k, (sub, sym) in enumerate(zip(subcarrier_lists, symbol_lists)))
