"""Command-line surface: run one scenario, sweep a grid, emit a topology.

Exit codes: 0 success, 2 configuration error, 3 attacker placement violation.
"""

import argparse
import sys

from . import topology
from .attack import PlacementViolation
from .scenario import ConfigError, load_config, run_scenario, sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PLACEMENT = 3


def _parse_seeds(text):
    # "1..5" or "1,2,3"
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(s) for s in text.split(",") if s]


def _parse_levels(text):
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        out.append(tok if tok == "none" else int(tok))
    return out


def _cmd_run(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out_prefix = args.out
    cfg.validate()
    sim, summary, paths = run_scenario(cfg)
    print(
        f"of={summary['of']} level={summary['level']} loss={summary['loss']} "
        f"seed={summary['seed']} pdr={summary['pdr']:.4f} "
        f"mean_power_mw={summary['mean_power_mw']:.4f} "
        f"resets={summary['trickle_resets']} "
        f"attack_children={summary['attack_children']}"
    )
    for name in sorted(paths):
        print(f"  wrote {paths[name]}")
    return EXIT_OK


def _cmd_sweep(args):
    cfg = load_config(args.config)
    rows = sweep(
        cfg,
        seeds=_parse_seeds(args.seeds),
        ofs=[s.strip() for s in args.of.split(",") if s.strip()],
        levels=_parse_levels(args.level),
        losses=[float(s) for s in args.loss.split(",") if s],
        out_prefix=args.out or cfg.out_prefix or "sweep",
    )
    failures = [r for r in rows if r.get("status") != "ok"]
    print(f"sweep: {len(rows)} cells, {len(failures)} failed")
    for row in failures:
        print(f"  {row['of']} level={row['level']} loss={row['loss']} "
              f"seed={row['seed']}: {row['status']}", file=sys.stderr)
    return EXIT_OK


def _cmd_topo(args):
    spec = args.spec
    if spec == "grid51":
        positions = topology.grid51(args.level or 3)
    elif spec == "small11":
        positions = topology.small11()
    elif spec.startswith("random"):
        n = args.n or 20
        area = args.area or 100.0
        tx_range = args.range or topology.DEFAULT_TX_RANGE
        positions = topology.random_topology(n, area, args.seed or 1, tx_range)
    else:
        raise ConfigError(f"unknown topology spec {spec!r}")
    topology.write_topology_file(args.emit, positions)
    print(f"wrote {len(positions)} positions to {args.emit}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rplsim",
        description="Deterministic RPL DODAG simulator with rank-attack scenarios")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario config")
    p_run.add_argument("config")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--out", default=None, help="output file prefix")
    p_run.set_defaults(fn=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a grid of scenarios")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--seeds", required=True, help="e.g. 1..5 or 1,2,3")
    p_sweep.add_argument("--of", required=True, help="comma list: of0,mrhof,secof")
    p_sweep.add_argument("--level", required=True, help="comma list: 1,2,3,none")
    p_sweep.add_argument("--loss", required=True, help="comma list: 0,0.25,0.5")
    p_sweep.add_argument("--out", default=None)
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_topo = sub.add_parser("topo", help="emit a topology file")
    p_topo.add_argument("spec", help="grid51 | small11 | random")
    p_topo.add_argument("--emit", required=True)
    p_topo.add_argument("--level", type=int, default=None)
    p_topo.add_argument("--n", type=int, default=None)
    p_topo.add_argument("--area", type=float, default=None)
    p_topo.add_argument("--range", type=float, default=None)
    p_topo.add_argument("--seed", type=int, default=None)
    p_topo.set_defaults(fn=_cmd_topo)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except PlacementViolation as exc:
        print(f"placement violation: {exc}", file=sys.stderr)
        return EXIT_PLACEMENT
    except (ConfigError, topology.TopologyError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
