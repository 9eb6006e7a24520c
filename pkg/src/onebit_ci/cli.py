"""Command-line front end.

Subcommands:
  run           Monte Carlo SER sweep, results to CSV.
  prop-check    audit the saturation count bound of the relaxed optimum.
  oracle-check  compare both branch-and-bound precoders against brute force.
  plot          render a results CSV as an SER-vs-SNR figure.

Exit codes: 0 success, 1 bad arguments or config, 2 numerical failure,
3 a checked property was violated.
"""

import argparse
import itertools
import logging
import sys

import numpy as np

from .ci_matrix import build_ci_matrix, min_scaling
from .geometry import Constellation
from .lp import LpNumericalError, solve_maxmin
from .precoders import (
    box_problem,
    exhaustive_solve,
    precode_fbb,
    precode_pbb,
)
from .sim import (
    KNOWN_SCHEMES,
    SCHEME_CI,
    SCHEME_PBB,
    SCHEME_ZF,
    SWEEP_NODE_BUDGET,
    campaign_from_mapping,
    gen_channel,
    load_campaign,
    run_campaign,
    write_csv,
    _stream,
)

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_VIOLATION = 3

_RUN_DEFAULTS = dict(
    n_t=64, k_users=16, mod_order=4,
    snr_grid_db=tuple(range(0, 33, 4)),
    trials=50, symbols_per_channel=10,
    schemes=(SCHEME_ZF, SCHEME_CI, SCHEME_PBB),
    seed=2024, node_budget=SWEEP_NODE_BUDGET, measure_time=True,
)
_LARGE_OVERRIDES = dict(n_t=128, k_users=16, mod_order=8)

_PROP_GRID = ((8, 2), (16, 4), (32, 8), (64, 16))
_PROP_MODS = (4, 8)


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped onto the config exit code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _parse_snr(text: str) -> tuple:
    """Accept 'start:stop:step' (inclusive) or a comma list like '0,8,16'."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"expected start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("SNR step must be positive")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        if n < 1:
            raise ValueError(f"empty SNR range {text!r}")
        return tuple(start + i * step for i in range(n))
    return tuple(float(p) for p in text.split(","))


def _random_instance(n_t, k, mod, rng):
    con = Constellation(mod)
    channel = gen_channel(k, n_t, rng)
    symbols = con.symbols[rng.integers(0, mod, size=k)]
    return build_ci_matrix(channel, symbols, con)


def _cmd_run(args) -> int:
    if args.config:
        campaign = load_campaign(args.config)
    else:
        params = dict(_RUN_DEFAULTS)
        if args.large:
            params.update(_LARGE_OVERRIDES)
        campaign = campaign_from_mapping(params)
    overrides = {}
    if args.nt is not None:
        overrides["n_t"] = args.nt
    if args.k is not None:
        overrides["k_users"] = args.k
    if args.mod is not None:
        overrides["mod_order"] = args.mod
    if args.snr is not None:
        overrides["snr_grid_db"] = _parse_snr(args.snr)
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.spc is not None:
        overrides["symbols_per_channel"] = args.spc
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.schemes is not None:
        overrides["schemes"] = tuple(s.strip() for s in args.schemes.split(","))
    if args.budget is not None:
        overrides["node_budget"] = args.budget
    if args.no_timing:
        overrides["measure_time"] = False
    if overrides:
        merged = {k: getattr(campaign, k) for k in campaign.__dataclass_fields__}
        merged.update(overrides)
        campaign = campaign_from_mapping(merged)

    log.info(
        "campaign: N_t=%d K=%d mod=%d, %d SNR points, %d decisions/point, schemes=%s",
        campaign.n_t, campaign.k_users, campaign.mod_order,
        len(campaign.snr_grid_db), campaign.decisions_per_point, ",".join(campaign.schemes),
    )
    records = run_campaign(campaign)
    write_csv(args.out, campaign, records)
    print(f"wrote {len(records)} rows to {args.out}")
    return EXIT_OK


def _cmd_prop_check(args) -> int:
    """Sample relaxed optima and count interior coordinates against the 2K-1 cap."""
    cells = list(itertools.product(_PROP_GRID, _PROP_MODS))
    per_cell = -(-args.instances // len(cells))
    checked = 0
    violations = 0
    for cell_idx, ((n_t, k), mod) in enumerate(cells):
        rng = _stream(args.seed, 9, trial=cell_idx)
        for _ in range(per_cell):
            m = _random_instance(n_t, k, mod, rng)
            rel = solve_maxmin(box_problem(m))
            checked += 1
            if rel.interior.size > 2 * k - 1:
                violations += 1
                log.error(
                    "interior count %d exceeds %d at N_t=%d K=%d mod=%d",
                    rel.interior.size, 2 * k - 1, n_t, k, mod,
                )
    print(f"checked {checked} relaxed optima: {violations} saturation-bound violations")
    return EXIT_VIOLATION if violations else EXIT_OK


def _brute_force_residual(m, part, u) -> float:
    """Best objective over all sign assignments of the residual coordinates."""
    n = 2 * m.n_antennas
    x_e = np.empty(n)
    x_e[part.fixed_idx] = part.x_fixed
    best = -np.inf
    for bits in itertools.product((u, -u), repeat=part.n_residual):
        x_e[part.residual_idx] = bits
        best = max(best, min_scaling(m, x_e))
    return best


def _cmd_oracle_check(args) -> int:
    """Cross-check both branch-and-bound precoders against enumeration."""
    mismatches = 0

    rng = _stream(args.seed, 10)
    for _ in range(args.pbb_instances):
        n_t = int(rng.integers(2, 9))
        k = int(rng.integers(1, min(3, n_t) + 1))
        mod = int(rng.choice([4, 8]))
        m = _random_instance(n_t, k, mod, rng)
        res = precode_pbb(m)
        ref = _brute_force_residual(m, res.partition, 1.0 / np.sqrt(2.0 * n_t))
        if not res.complete or abs(res.objective - ref) > 1e-9:
            mismatches += 1
            log.error("partial BB mismatch: got %.12g, brute force %.12g", res.objective, ref)

    rng = _stream(args.seed, 11)
    for _ in range(args.fbb_instances):
        n_t = int(rng.integers(1, 7))
        k = int(rng.integers(1, min(2, n_t) + 1))
        mod = int(rng.choice([4, 8]))
        m = _random_instance(n_t, k, mod, rng)
        res = precode_fbb(m)
        ref = min_scaling(m, exhaustive_solve(m).x_e)
        if not res.complete or abs(res.objective - ref) > 1e-9:
            mismatches += 1
            log.error("full BB mismatch: got %.12g, exhaustive %.12g", res.objective, ref)

    total = args.pbb_instances + args.fbb_instances
    print(f"checked {total} instances: {mismatches} oracle mismatches")
    return EXIT_VIOLATION if mismatches else EXIT_OK


def _cmd_plot(args) -> int:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    from .sim import read_csv

    rows = read_csv(args.csv)
    if not rows:
        raise ValueError(f"no data rows in {args.csv}")
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    markers = itertools.cycle("osd^v*")
    for scheme in sorted({r["scheme"] for r in rows}):
        pts = sorted((r["snr_db"], r["ser"]) for r in rows if r["scheme"] == scheme)
        ax.semilogy([p[0] for p in pts], [p[1] for p in pts],
                    marker=next(markers), label=scheme)
    ax.set_xlabel("transmit SNR (dB)")
    ax.set_ylabel("symbol error rate")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out)
    plt.close(fig)
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="onebit-ci", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[], help="run an SER sweep")
    run.add_argument("--config", help="flat YAML campaign file")
    run.add_argument("--nt", type=int, help="transmit antennas")
    run.add_argument("--k", type=int, help="single-antenna users")
    run.add_argument("--mod", type=int, help="PSK order (4, 8, ...)")
    run.add_argument("--snr", help="SNR grid in dB: start:stop:step or comma list")
    run.add_argument("--trials", type=int, help="independent channel draws")
    run.add_argument("--spc", type=int, help="symbol vectors per channel")
    run.add_argument("--seed", type=int, help="campaign seed")
    run.add_argument("--schemes", help=f"comma list from {','.join(KNOWN_SCHEMES)}")
    run.add_argument("--budget", type=int, help="branch-and-bound node budget")
    run.add_argument("--no-timing", action="store_true",
                     help="skip wall-clock columns so reruns are byte-identical")
    run.add_argument("--large", action="store_true",
                     help="preset for the wide-array shape (N_t=128, 8PSK)")
    run.add_argument("--out", default="results.csv", help="output CSV path")
    run.set_defaults(func=_cmd_run)

    prop = sub.add_parser("prop-check", help="audit the saturation count bound")
    prop.add_argument("--instances", type=int, default=1000, help="total instances across the grid")
    prop.add_argument("--seed", type=int, default=2024)
    prop.set_defaults(func=_cmd_prop_check)

    oracle = sub.add_parser("oracle-check", help="branch-and-bound vs brute force")
    oracle.add_argument("--pbb-instances", type=int, default=200)
    oracle.add_argument("--fbb-instances", type=int, default=100)
    oracle.add_argument("--seed", type=int, default=2024)
    oracle.set_defaults(func=_cmd_oracle_check)

    plot = sub.add_parser("plot", help="render a results CSV")
    plot.add_argument("--csv", required=True, help="input results CSV")
    plot.add_argument("--out", default="ser.svg", help="output figure path")
    plot.set_defaults(func=_cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except LpNumericalError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
