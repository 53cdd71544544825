"""The ``isac-lab`` command line.

Subcommands:
  run        execute a named experiment, write CSV + manifest
  crb        closed-form CRBs of a scheme (optionally vs the Fisher oracle)
  partition  solve/bound a max-min-variance subcarrier partition
  rates      sum rate and worst-case CRB per scheme (rate/CRB trade table)
  estimate   run the 2-D MUSIC estimator on a dumped CSI file
  validate   diagnostic checks for an experiment spec

Set ISAC_LAB_THREADS to cap the linear-algebra thread count; it is the
only environment variable the tool reads.
"""

import argparse
import os
import sys


def _thread_setup():
    n = os.environ.get("ISAC_LAB_THREADS")
    if n:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
            os.environ.setdefault(var, n)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isac-lab",
        description="OFDMA joint sensing/communication simulation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a named experiment")
    p_run.add_argument("--experiment", required=True)
    p_run.add_argument("--trials", type=int, default=100)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--snr", type=float, nargs="+", default=None,
                       help="SNR grid in dB (ascending)")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--config", default=None,
                       help="scenario file; its noise power and antenna "
                            "settings override the desk defaults (the "
                            "experiments keep their own pool geometry)")

    p_crb = sub.add_parser("crb", help="closed-form CRBs of a scheme")
    _scheme_args(p_crb)
    p_crb.add_argument("--snr-db", type=float, default=20.0)
    p_crb.add_argument("--oracle", action="store_true",
                       help="also evaluate the Fisher-projection oracle")

    p_part = sub.add_parser("partition", help="max-min-variance partitioning")
    p_part.add_argument("--pool", type=int, required=True)
    p_part.add_argument("--ues", type=int, required=True)
    p_part.add_argument("--counts", type=int, nargs="+", required=True)
    p_part.add_argument("--method", choices=("exact", "interleaved", "bound"),
                        default="interleaved")

    p_rates = sub.add_parser("rates", help="sum-rate vs worst-case CRB table")
    p_rates.add_argument("--snr", type=float, nargs="+",
                         default=[0, 10, 20, 30])
    p_rates.add_argument("--trials", type=int, default=100,
                         help="data draws for the interference expectation")
    p_rates.add_argument("--seed", type=int, default=0)

    p_est = sub.add_parser("estimate", help="2-D MUSIC on a dumped CSI file")
    p_est.add_argument("--csi", required=True)
    p_est.add_argument("--range", dest="range_grid", default="10:100:0.25",
                       help="min:max:step in meters")
    p_est.add_argument("--velocity", dest="velocity_grid", default="0:40:0.25",
                       help="min:max:step in m/s")
    p_est.add_argument("--n-sources", type=int, default=1)
    p_est.add_argument("--truth-range", type=float, default=None)
    p_est.add_argument("--truth-velocity", type=float, default=None)
    p_est.add_argument("--out", default=None, help="CSV output file (default stdout)")

    p_val = sub.add_parser("validate", help="diagnostics for an experiment spec")
    p_val.add_argument("--experiment", required=True)
    p_val.add_argument("--trials", type=int, default=100)
    p_val.add_argument("--seed", type=int, default=0)
    return parser


def _scheme_args(p):
    p.add_argument("--scheme", required=True,
                   help="subband | interleaved | edge-first | "
                        "generalized:<seed> | table1 | table2")
    p.add_argument("--pool", type=int, default=48)
    p.add_argument("--count", type=int, default=16)
    p.add_argument("--ues", type=int, default=3)
    p.add_argument("--ue", type=int, default=None,
                   help="restrict output to one UE (default: all)")


def _scheme_rows(name: str, pool: int, count: int, ues: int):
    """Resolve a CLI scheme spelling to (label, ue_index, subcarriers) rows."""
    from .schemes import (SchemeKind, TABLE1_SINGLE_UE, TABLE2_GENERALIZED,
                          generate_scheme)
    name = name.strip().lower()
    if name == "table1":
        return [(f"table1:{tag}", 1, idx) for tag, idx in
                sorted(TABLE1_SINGLE_UE.items())]
    if name == "table2":
        return [(f"table2:generalized", k + 1, idx)
                for k, idx in enumerate(TABLE2_GENERALIZED)]
    kind = SchemeKind.parse(name)
    return [(name, k, generate_scheme(kind, pool, count, k, ues))
            for k in range(1, ues + 1)]


def _cmd_crb(args) -> int:
    from .fisher import FisherProblem, crb_range_velocity
    from .model import ResourceAssignment, index_variance
    from .scenario import desk_config
    from .schemes import CrbInputs, crb_range, crb_velocity

    config = desk_config()
    sigma2 = 10.0 ** (-args.snr_db / 10.0)
    rows = _scheme_rows(args.scheme, args.pool, args.count, args.ues)
    if args.ue is not None:
        rows = [r for r in rows if r[1] == args.ue]
    print("scheme,ue,zeta_variance,crb_range_m2,crb_velocity_ms2"
          + (",oracle_range_m2,oracle_velocity_ms2" if args.oracle else ""))
    for label, ue, idx in rows:
        zv = index_variance(idx)
        inputs = CrbInputs(beta_power=1.0, noise_power=sigma2,
                           n_k=len(idx), g_k=len(idx),
                           subcarrier_spacing=config.subcarrier_spacing,
                           carrier_freq=config.carrier_freq,
                           symbol_duration=config.symbol_duration,
                           zeta_variance=zv, psi_variance=zv)
        line = (f"{label},{ue},{zv:.12g},{crb_range(inputs):.12g},"
                f"{crb_velocity(inputs):.12g}")
        if args.oracle:
            assignment = ResourceAssignment(ue_index=1, subcarriers=idx,
                                            symbols=idx)
            problem = FisherProblem(
                assignment=assignment, delay=50.0 / config.speed_of_light,
                doppler_ratio=2 * 20.0 / config.speed_of_light,
                beta=1.0 + 0j, noise_power=sigma2, config=config)
            o_r, o_v = crb_range_velocity(problem)
            line += f",{o_r:.12g},{o_v:.12g}"
        print(line)
    return 0


def _cmd_partition(args) -> int:
    from .partition import (PartitionInstance, exact_partition,
                            interleaved_partition, variance_bound)
    instance = PartitionInstance(pool_size=args.pool, n_ues=args.ues,
                                 counts=tuple(args.counts))
    bound = variance_bound(instance)
    print("ue,count,bound_variance")
    for k, (c, b) in enumerate(zip(instance.counts, bound.per_ue), start=1):
        print(f"{k},{c},{b:.12g}")
    print(f"binding,,{bound.binding:.12g}")
    if args.method == "bound":
        return 0
    solve = interleaved_partition if args.method == "interleaved" else exact_partition
    solution = solve(instance)
    print("ue,subcarriers")
    for k, subset in enumerate(solution.subsets, start=1):
        print(f"{k}," + " ".join(str(i) for i in subset))
    print(f"min_variance,,{solution.min_variance:.12g}")
    print(f"gap,,{solution.gap:.12g}")
    return 0


def _cmd_rates(args) -> int:
    from .experiments import ExperimentSpec, run
    spec = ExperimentSpec(name="fig7_rate_vs_crb", trials=args.trials,
                          snr_grid_db=tuple(sorted(args.snr)), seed=args.seed)
    table = run(spec)
    sys.stdout.write(table.to_csv())
    return 0


def _parse_grid(text: str):
    lo, hi, step = (float(t) for t in text.split(":"))
    return (lo, hi, step)


def _cmd_estimate(args) -> int:
    from .frameio import load_csi
    from .music import MusicConfig, estimate

    dump = load_csi(args.csi)
    config = MusicConfig(range_grid=_parse_grid(args.range_grid),
                         velocity_grid=_parse_grid(args.velocity_grid),
                         n_sources=args.n_sources)
    est = estimate(dump.blocks, dump.assignment, dump.params, config)
    lines = ["trial,pair,range_m,velocity_ms,peak,truth_range_m,"
             "truth_velocity_ms,range_error_m,velocity_error_ms"]
    for i, (r, v, peak) in enumerate(est.pairs):
        tr = "" if args.truth_range is None else f"{args.truth_range:.12g}"
        tv = "" if args.truth_velocity is None else f"{args.truth_velocity:.12g}"
        er = "" if args.truth_range is None else f"{r - args.truth_range:.12g}"
        ev = "" if args.truth_velocity is None else f"{v - args.truth_velocity:.12g}"
        lines.append(f"0,{i},{r:.12g},{v:.12g},{peak:.12g},{tr},{tv},{er},{ev}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if est.resolved else 1


def _cmd_run(args) -> int:
    from .experiments import ExperimentSpec, run
    overrides = {}
    if args.config:
        from .scenario import load_scenario
        scenario = load_scenario(args.config)
        overrides = {name: getattr(scenario.config, name)
                     for name in ("noise_power", "n_rx_antennas",
                                  "n_tx_antennas", "antenna_spacing")}
    kwargs = {}
    if args.snr is not None:
        kwargs["snr_grid_db"] = tuple(args.snr)
    spec = ExperimentSpec(name=args.experiment, trials=args.trials,
                          seed=args.seed, overrides=overrides, **kwargs)
    table = run(spec, out_dir=args.out)
    if args.out is None:
        sys.stdout.write(table.to_csv())
    else:
        print(f"wrote {args.experiment}.csv and manifest to {args.out}")
    return 0


def _cmd_validate(args) -> int:
    from .experiments import ExperimentSpec, validate
    spec = ExperimentSpec(name=args.experiment, trials=args.trials,
                          seed=args.seed)
    diagnostics = validate(spec)
    for line in diagnostics:
        print(line)
    print(f"{len(diagnostics)} finding(s)")
    return 0 if not diagnostics else 1


def main(argv=None) -> int:
    _thread_setup()
    args = _build_parser().parse_args(argv)
    handler = {
        "run": _cmd_run,
        "crb": _cmd_crb,
        "partition": _cmd_partition,
        "rates": _cmd_rates,
        "estimate": _cmd_estimate,
        "validate": _cmd_validate,
    }[args.command]
    from .errors import IsacLabError
    try:
        return handler(args)
    except IsacLabError as exc:
        print(f"isac-lab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
