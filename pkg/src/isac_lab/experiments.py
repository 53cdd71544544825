"""Named desk-scale experiments with seeded Monte Carlo and CSV emission.

Each experiment assembles a scenario from the desk defaults, runs a
deterministic campaign derived from (spec, seed) and returns a
:class:`ResultTable`; ``run`` optionally writes ``<name>.csv`` plus a
manifest recording the seed, the config hash and the library version.
Identical (spec, seed) always reproduce byte-identical CSV.

Experiments:
  fig3_ici          ICI magnitudes of the Doppler-perturbed demodulation
                    matrix at a 1024-subcarrier numerology.  Velocity
                    labels are km/h (vehicular speeds; 10 km/h = 2.78 m/s).
  fig4_peaks        single-trial estimation peaks per scheme at one SNR.
  fig5_range_mse    single-UE range MSE vs CRB across schemes and SNR.
  fig6_velocity_mse single-UE velocity MSE vs CRB (same campaign).
  fig6_maxmin       multi-UE worst-case range MSE/CRB vs the partition bound.
  fig7_rate_vs_crb  sum rate and worst-case CRB across partition schemes.

SNR convention: per resource element after compensation, so the noise
power is 10^(-SNR/10) for unit-amplitude paths.  CRB curves use the
combined Fisher information of all receive antennas.
"""

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .errors import ConfigError
from .compensation import extract_csi_all
from .fisher import FisherProblem, crb_range_velocity
from .model import (ResourceAssignment, SystemConfig, index_variance,
                    random_qpsk_grid)
from .music import MusicConfig, estimate
from .partition import PartitionInstance, variance_bound
from .rates import achievable_rates, ici_matrix
from .scenario import (DESK_COUNT, DESK_POOL, DESK_RANGES_M, DESK_UES,
                       desk_channels, desk_config, make_target_channel,
                       scheme_assignments)
from .schemes import (EDGE_FIRST, INTERLEAVED, SUBBAND, CrbInputs, SchemeKind,
                      TABLE1_SINGLE_UE, TABLE2_GENERALIZED, crb_range,
                      crb_velocity)
from .synthesis import add_awgn, check_disjoint, synthesize_frames

EXPERIMENT_NAMES = ("fig3_ici", "fig4_peaks", "fig5_range_mse",
                    "fig6_velocity_mse", "fig6_maxmin", "fig7_rate_vs_crb")

SINGLE_UE_RANGE_M = 50.0
SINGLE_UE_VELOCITY_MS = 20.0
FIG3_SPEEDS_KMH = (10.0, 20.0, 30.0)
FIG3_POOL = 1024

_SINGLE_UE_MUSIC = MusicConfig(range_grid=(30.0, 70.0, 0.25),
                               velocity_grid=(0.0, 40.0, 0.25))
_MULTI_UE_MUSIC = MusicConfig(range_grid=(20.0, 90.0, 0.25),
                              velocity_grid=(0.0, 40.0, 0.25))


@dataclass(frozen=True)
class ExperimentSpec:
    """What to run: experiment name, Monte Carlo size, SNR grid, seed and
    optional SystemConfig field overrides."""

    name: str
    trials: int = 100
    snr_grid_db: tuple[float, ...] = (-20, -15, -10, -5, 0, 5, 10, 15, 20, 25, 30)
    seed: int = 0
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        grid = tuple(float(s) for s in self.snr_grid_db)
        if list(grid) != sorted(grid):
            raise ConfigError("snr_grid_db must be sorted ascending")
        object.__setattr__(self, "snr_grid_db", grid)


@dataclass(frozen=True)
class ResultRow:
    scheme: str
    snr_db: float
    metric: str
    value: float
    ci_halfwidth: float = 0.0


@dataclass(frozen=True)
class ResultTable:
    rows: tuple[ResultRow, ...]

    def to_csv(self) -> str:
        lines = ["scheme,snr_db,metric,value,ci_halfwidth"]
        for r in self.rows:
            lines.append(f"{r.scheme},{r.snr_db:.12g},{r.metric},"
                         f"{r.value:.12g},{r.ci_halfwidth:.12g}")
        return "\n".join(lines) + "\n"

    def lookup(self, scheme: str, snr_db: float, metric: str) -> float:
        for r in self.rows:
            if r.scheme == scheme and r.metric == metric and r.snr_db == snr_db:
                return r.value
        raise KeyError((scheme, snr_db, metric))


def _subseed(*parts: int) -> int:
    return int(np.random.SeedSequence(list(parts)).generate_state(1, np.uint64)[0])


def _apply_overrides(config: SystemConfig, overrides: dict) -> SystemConfig:
    if not overrides:
        return config
    unknown = set(overrides) - set(config.__dataclass_fields__)
    if unknown:
        raise ConfigError(f"unknown config override(s): {sorted(unknown)}")
    return replace(config, **overrides)


def _single_ue_assignment(scheme: str) -> ResourceAssignment:
    idx = TABLE1_SINGLE_UE[scheme]
    return ResourceAssignment(ue_index=1, subcarriers=idx, symbols=idx)


def _multi_ue_assignments(scheme: str) -> tuple[ResourceAssignment, ...]:
    """Three-UE subcarrier partitions; all UEs share the interleaved UE-1
    sensing-symbol pattern (time resources may overlap across UEs)."""
    symbols = TABLE1_SINGLE_UE[INTERLEAVED]
    if scheme == "generalized":
        subs = TABLE2_GENERALIZED
    else:
        subs = tuple(a.subcarriers for a in scheme_assignments(SchemeKind(scheme)))
    return tuple(ResourceAssignment(ue_index=k + 1, subcarriers=subs[k],
                                    symbols=symbols) for k in range(len(subs)))


def _crb_pair(assignment: ResourceAssignment, config: SystemConfig,
              sigma2: float) -> tuple[float, float, float, float]:
    """(range closed, range oracle, velocity closed, velocity oracle), all
    for the combined M_R-antenna observation with unit per-antenna amplitude."""
    beta_power = float(config.n_rx_antennas)
    inputs = CrbInputs(
        beta_power=beta_power, noise_power=sigma2,
        n_k=assignment.n_subcarriers, g_k=assignment.n_symbols,
        subcarrier_spacing=config.subcarrier_spacing,
        carrier_freq=config.carrier_freq,
        symbol_duration=config.symbol_duration,
        zeta_variance=index_variance(assignment.subcarriers),
        psi_variance=index_variance(assignment.symbols))
    closed_r, closed_v = crb_range(inputs), crb_velocity(inputs)
    problem = FisherProblem(
        assignment=assignment, delay=SINGLE_UE_RANGE_M / config.speed_of_light,
        doppler_ratio=2 * SINGLE_UE_VELOCITY_MS / config.speed_of_light,
        beta=complex(np.sqrt(beta_power)), noise_power=sigma2, config=config)
    oracle_r, oracle_v = crb_range_velocity(problem)
    return closed_r, oracle_r, closed_v, oracle_v


def _run_trial(config: SystemConfig, channels, assignments, music_config,
               sigma2: float, data_seed: int, noise_seed: int):
    """One synthesize -> compensate -> estimate pass; returns the estimated
    (range, velocity) of every UE."""
    data = random_qpsk_grid(config, assignments, seed=data_seed)
    noiseless = synthesize_frames(config, channels, assignments, data)
    frames = add_awgn(noiseless, sigma2, seed=noise_seed)
    out = []
    for k in range(len(assignments)):
        blocks = extract_csi_all(frames, assignments[k])
        est = estimate(blocks, assignments[k], config, music_config)
        out.append(est.pairs[0][:2])
    return out


@dataclass
class _MseCurves:
    """Per-scheme, per-SNR squared-error samples and CRB values."""

    sq_range: dict
    sq_velocity: dict
    crb: dict  # (scheme, snr) -> (closed_r, oracle_r, closed_v, oracle_v)


def single_ue_mse_campaign(spec: ExperimentSpec) -> _MseCurves:
    """Shared Monte Carlo behind fig5_range_mse and fig6_velocity_mse."""
    config = _apply_overrides(desk_config(n_ues=1), spec.overrides)
    channel = make_target_channel(config, SINGLE_UE_RANGE_M,
                                  SINGLE_UE_VELOCITY_MS,
                                  np.deg2rad(60.0), np.deg2rad(90.0))
    sq_r, sq_v, crb = {}, {}, {}
    for si, scheme in enumerate(sorted(TABLE1_SINGLE_UE)):
        assignment = _single_ue_assignment(scheme)
        for gi, snr in enumerate(spec.snr_grid_db):
            sigma2 = 10.0 ** (-snr / 10.0)
            cfg = replace(config, noise_power=sigma2)
            errs_r, errs_v = [], []
            for t in range(spec.trials):
                (r_hat, v_hat), = _run_trial(
                    cfg, [channel], [assignment], _SINGLE_UE_MUSIC, sigma2,
                    data_seed=_subseed(spec.seed, 101, si, gi, t),
                    noise_seed=_subseed(spec.seed, 202, si, gi, t))
                errs_r.append((r_hat - SINGLE_UE_RANGE_M) ** 2)
                errs_v.append((v_hat - SINGLE_UE_VELOCITY_MS) ** 2)
            sq_r[scheme, snr] = np.asarray(errs_r)
            sq_v[scheme, snr] = np.asarray(errs_v)
            crb[scheme, snr] = _crb_pair(assignment, cfg, sigma2)
    return _MseCurves(sq_range=sq_r, sq_velocity=sq_v, crb=crb)


def _mse_rows(curves: _MseCurves, spec: ExperimentSpec, axis: str) -> ResultTable:
    rows = []
    pick = curves.sq_range if axis == "range" else curves.sq_velocity
    crb_index = (0, 1) if axis == "range" else (2, 3)
    for (scheme, snr), sq in sorted(pick.items()):
        mse = float(sq.mean())
        ci = 1.96 * float(sq.std(ddof=1)) / np.sqrt(len(sq)) if len(sq) > 1 else 0.0
        closed = curves.crb[scheme, snr][crb_index[0]]
        oracle = curves.crb[scheme, snr][crb_index[1]]
        rows += [
            ResultRow(scheme, snr, f"mse_{axis}", mse, ci),
            ResultRow(scheme, snr, f"crb_{axis}_closed", closed),
            ResultRow(scheme, snr, f"crb_{axis}_oracle", oracle),
        ]
    return ResultTable(rows=tuple(rows))


def _fig3(spec: ExperimentSpec) -> ResultTable:
    n = FIG3_POOL
    df = 100e3
    t_sam = 1.0 / (n * df)
    base = desk_config()
    config = _apply_overrides(replace(
        base, n_subcarriers=n, sample_duration=t_sam, cp_duration=6 * t_sam,
        symbol_duration=(n + 6) * t_sam), spec.overrides)
    delay = SINGLE_UE_RANGE_M / config.speed_of_light
    rows = []
    from .model import ChannelPath
    for kmh in (0.0,) + FIG3_SPEEDS_KMH:
        path = ChannelPath(gain=1.0, delay=delay, radial_velocity=kmh / 3.6,
                           aoa=np.deg2rad(60.0), aod=np.deg2rad(90.0))
        qt = ici_matrix(path, config).values
        off = np.abs(qt - np.diag(np.diag(qt)))
        diag_dev = float(np.max(np.abs(np.abs(np.diag(qt)) - 1.0)))
        label = f"kmh{kmh:g}"
        rows += [
            ResultRow("-", 0.0, f"max_offdiag_{label}", float(off.max())),
            ResultRow("-", 0.0, f"mean_offdiag_{label}",
                      float(off.sum() / (n * n - n))),
            ResultRow("-", 0.0, f"max_diag_modulus_dev_{label}", diag_dev),
        ]
    return ResultTable(rows=tuple(rows))


def _fig4(spec: ExperimentSpec) -> ResultTable:
    snr = spec.snr_grid_db[-1] if spec.snr_grid_db else 20.0
    sigma2 = 10.0 ** (-snr / 10.0)
    config = _apply_overrides(desk_config(n_ues=1, noise_power=sigma2),
                              spec.overrides)
    channel = make_target_channel(config, SINGLE_UE_RANGE_M,
                                  SINGLE_UE_VELOCITY_MS,
                                  np.deg2rad(60.0), np.deg2rad(90.0))
    rows = []
    for si, scheme in enumerate(sorted(TABLE1_SINGLE_UE)):
        assignment = _single_ue_assignment(scheme)
        data = random_qpsk_grid(config, [assignment],
                                seed=_subseed(spec.seed, 301, si))
        frames = add_awgn(synthesize_frames(config, [channel], [assignment], data),
                          sigma2, seed=_subseed(spec.seed, 302, si))
        blocks = extract_csi_all(frames, assignment)
        est = estimate(blocks, assignment, config, _SINGLE_UE_MUSIC)
        r_hat, v_hat, peak = est.pairs[0]
        # peak sharpness as the pseudo-spectrum denominator curvature at the
        # refined peak (inverse squared mainlobe width per axis)
        from .music import (_SpectrumEvaluator, _snapshot_matrix,
                            _steering_lattices, signal_subspace)
        snaps = _snapshot_matrix(blocks, None, assignment)
        u_s = signal_subspace(snaps, 1)
        slow, freq = _steering_lattices(assignment, config, None)
        ev = _SpectrumEvaluator(u_s, slow, freq, config.speed_of_light)
        d_r, d_v = 0.5, 0.5
        curv_r = (ev.denominator_at(r_hat + d_r, v_hat)
                  + ev.denominator_at(r_hat - d_r, v_hat)
                  - 2 * ev.denominator_at(r_hat, v_hat)) / d_r ** 2
        curv_v = (ev.denominator_at(r_hat, v_hat + d_v)
                  + ev.denominator_at(r_hat, v_hat - d_v)
                  - 2 * ev.denominator_at(r_hat, v_hat)) / d_v ** 2
        rows += [
            ResultRow(scheme, snr, "range_estimate_m", r_hat),
            ResultRow(scheme, snr, "velocity_estimate_ms", v_hat),
            ResultRow(scheme, snr, "abs_range_error_m",
                      abs(r_hat - SINGLE_UE_RANGE_M)),
            ResultRow(scheme, snr, "abs_velocity_error_ms",
                      abs(v_hat - SINGLE_UE_VELOCITY_MS)),
            ResultRow(scheme, snr, "peak_range_curvature", float(curv_r)),
            ResultRow(scheme, snr, "peak_velocity_curvature", float(curv_v)),
        ]
    return ResultTable(rows=tuple(rows))


def _fig6_maxmin(spec: ExperimentSpec) -> ResultTable:
    config = _apply_overrides(desk_config(), spec.overrides)
    channels = desk_channels(config)
    instance = PartitionInstance(pool_size=DESK_POOL, n_ues=DESK_UES,
                                 counts=(DESK_COUNT,) * DESK_UES)
    bound = variance_bound(instance).binding
    rows = []
    for si, scheme in enumerate(("edge-first", "generalized", "interleaved")):
        assignments = _multi_ue_assignments(scheme)
        check_disjoint(assignments)
        for gi, snr in enumerate(spec.snr_grid_db):
            sigma2 = 10.0 ** (-snr / 10.0)
            cfg = replace(config, noise_power=sigma2)
            beta_power = float(cfg.n_rx_antennas)
            crbs_closed, crbs_oracle = [], []
            for a, ch in zip(assignments, channels):
                inputs = CrbInputs(
                    beta_power=beta_power, noise_power=sigma2,
                    n_k=a.n_subcarriers, g_k=a.n_symbols,
                    subcarrier_spacing=cfg.subcarrier_spacing,
                    carrier_freq=cfg.carrier_freq,
                    symbol_duration=cfg.symbol_duration,
                    zeta_variance=index_variance(a.subcarriers),
                    psi_variance=index_variance(a.symbols))
                crbs_closed.append(crb_range(inputs))
                problem = FisherProblem(
                    assignment=a, delay=ch.paths[0].delay,
                    doppler_ratio=ch.paths[0].doppler_ratio(),
                    beta=complex(np.sqrt(beta_power)), noise_power=sigma2,
                    config=cfg)
                crbs_oracle.append(crb_range_velocity(problem)[0])
            crb_low = crb_range(CrbInputs(
                beta_power=beta_power, noise_power=sigma2, n_k=DESK_COUNT,
                g_k=DESK_COUNT, subcarrier_spacing=cfg.subcarrier_spacing,
                carrier_freq=cfg.carrier_freq,
                symbol_duration=cfg.symbol_duration,
                zeta_variance=bound, psi_variance=bound))

            sq_max = []
            for t in range(spec.trials):
                ests = _run_trial(
                    cfg, channels, assignments, _MULTI_UE_MUSIC, sigma2,
                    data_seed=_subseed(spec.seed, 401, si, gi, t),
                    noise_seed=_subseed(spec.seed, 402, si, gi, t))
                errs = [(r - DESK_RANGES_M[k]) ** 2
                        for k, (r, _) in enumerate(ests)]
                sq_max.append(max(errs))
            sq_max = np.asarray(sq_max)
            ci = (1.96 * float(sq_max.std(ddof=1)) / np.sqrt(len(sq_max))
                  if len(sq_max) > 1 else 0.0)
            rows += [
                ResultRow(scheme, snr, "max_mse_range", float(sq_max.mean()), ci),
                ResultRow(scheme, snr, "max_crb_range_closed", max(crbs_closed)),
                ResultRow(scheme, snr, "max_crb_range_oracle", max(crbs_oracle)),
                ResultRow(scheme, snr, "crb_range_lower_bound", crb_low),
            ]
    return ResultTable(rows=tuple(rows))


def _fig7(spec: ExperimentSpec) -> ResultTable:
    config = _apply_overrides(desk_config(), spec.overrides)
    channels = desk_channels(config)
    beta_power = float(config.n_rx_antennas)
    rows = []
    for si, scheme in enumerate((EDGE_FIRST, "generalized", INTERLEAVED, SUBBAND)):
        assignments = _multi_ue_assignments(scheme)
        data = random_qpsk_grid(config, assignments,
                                seed=_subseed(spec.seed, 501, si))
        for snr in spec.snr_grid_db:
            # rates SNR is per subcarrier after combining over antennas
            sigma2_rate = beta_power * 10.0 ** (-snr / 10.0)
            report = achievable_rates(channels, assignments, data, config,
                                      noise_power=sigma2_rate,
                                      seed=_subseed(spec.seed, 502, si))
            sigma2 = 10.0 ** (-snr / 10.0)
            max_crb = max(
                crb_range(CrbInputs(
                    beta_power=beta_power, noise_power=sigma2,
                    n_k=a.n_subcarriers, g_k=a.n_symbols,
                    subcarrier_spacing=config.subcarrier_spacing,
                    carrier_freq=config.carrier_freq,
                    symbol_duration=config.symbol_duration,
                    zeta_variance=index_variance(a.subcarriers),
                    psi_variance=index_variance(a.symbols)))
                for a in assignments)
            excess = max(report.inp_power.values()) - report.noise_power
            rows += [
                ResultRow(scheme, snr, "sum_rate_exact", report.sum_rate(True)),
                ResultRow(scheme, snr, "sum_rate_approx", report.sum_rate(False)),
                ResultRow(scheme, snr, "max_crb_range", max_crb),
                ResultRow(scheme, snr, "max_ici_power", excess),
            ]
    return ResultTable(rows=tuple(rows))


_RUNNERS = {
    "fig3_ici": _fig3,
    "fig4_peaks": _fig4,
    "fig5_range_mse": lambda spec: _mse_rows(single_ue_mse_campaign(spec), spec, "range"),
    "fig6_velocity_mse": lambda spec: _mse_rows(single_ue_mse_campaign(spec), spec, "velocity"),
    "fig6_maxmin": _fig6_maxmin,
    "fig7_rate_vs_crb": _fig7,
}


def _config_hash(spec: ExperimentSpec) -> str:
    payload = json.dumps({
        "name": spec.name, "trials": spec.trials, "seed": spec.seed,
        "snr_grid_db": list(spec.snr_grid_db),
        "overrides": {k: repr(v) for k, v in sorted(spec.overrides.items())},
    }, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


def run(spec: ExperimentSpec, out_dir=None) -> ResultTable:
    """Run one named experiment; optionally write CSV and manifest."""
    if spec.name not in _RUNNERS:
        raise ConfigError(
            f"unknown experiment {spec.name!r}; expected one of {EXPERIMENT_NAMES}")
    table = _RUNNERS[spec.name](spec)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{spec.name}.csv").write_text(table.to_csv())
        manifest = {
            "experiment": spec.name,
            "seed": spec.seed,
            "trials": spec.trials,
            "snr_grid_db": list(spec.snr_grid_db),
            "config_hash": _config_hash(spec),
            "library_version": __version__,
            "columns": "1:scheme 2:snr_db 3:metric 4:value 5:ci_halfwidth",
        }
        (out / f"{spec.name}.manifest.json").write_text(
            json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return table


def validate(spec: ExperimentSpec,
             assignments: Sequence[ResourceAssignment] | None = None,
             music_config: MusicConfig | None = None,
             truths: Sequence[tuple[float, float]] | None = None) -> list[str]:
    """Diagnostic-only checks; returns human-readable findings (empty = OK).

    Checks the experiment name, config overrides, subcarrier disjointness
    of the (given or implied) assignments, and that MUSIC grids bracket the
    stated truths.
    """
    diagnostics: list[str] = []
    if spec.name not in _RUNNERS:
        diagnostics.append(f"unknown experiment name {spec.name!r}")
    try:
        _apply_overrides(desk_config(), spec.overrides)
    except ConfigError as exc:
        diagnostics.append(f"config overrides invalid: {exc}")

    if assignments is None and spec.name in ("fig6_maxmin", "fig7_rate_vs_crb"):
        assignments = _multi_ue_assignments(INTERLEAVED)
    if assignments:
        for i in range(len(assignments)):
            for j in range(i + 1, len(assignments)):
                shared = (set(assignments[i].subcarriers)
                          & set(assignments[j].subcarriers))
                if shared:
                    diagnostics.append(
                        f"UEs {assignments[i].ue_index} and "
                        f"{assignments[j].ue_index} share subcarrier(s) "
                        f"{sorted(shared)}: interference-free compensation "
                        f"does not exist under overlap")

    music_config = music_config or _SINGLE_UE_MUSIC
    if truths is None and spec.name in ("fig4_peaks", "fig5_range_mse",
                                        "fig6_velocity_mse"):
        truths = [(SINGLE_UE_RANGE_M, SINGLE_UE_VELOCITY_MS)]
    for (r, v) in truths or ():
        r_lo, r_hi, _ = music_config.range_grid
        v_lo, v_hi, _ = music_config.velocity_grid
        if not (r_lo <= r <= r_hi):
            diagnostics.append(f"true range {r} m outside grid [{r_lo}, {r_hi}]")
        if not (v_lo <= v <= v_hi):
            diagnostics.append(f"true velocity {v} m/s outside grid [{v_lo}, {v_hi}]")
    return diagnostics
