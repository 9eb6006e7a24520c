"""Monte Carlo symbol-error-rate campaigns over Rayleigh fading.

A campaign sweeps transmit SNR for a fixed antenna/user/modulation shape and
a set of precoding schemes. Channels, payload symbols, and noise draw from
independent counter-based streams keyed by (seed, purpose, trial, SNR index),
so every scheme sees the same channels, symbols, and noise, and adding a
scheme or an SNR point never perturbs the other draws. Precoding depends on
the channel and symbols but not on the noise level, so each transmit vector
is computed once per (trial, symbol) and reused across the whole SNR grid.
"""

import csv
import logging
import time
from dataclasses import dataclass

import numpy as np
import yaml

from .ci_matrix import build_ci_matrix
from .geometry import Constellation, detect_indices
from .precoders import (
    exhaustive_solve,
    precode_ci_relaxed,
    precode_fbb,
    precode_pbb,
    precode_zf_quantized,
)

log = logging.getLogger(__name__)

# Campaigns cap the search at a small node count by default: the refinement
# gain saturates after a few dozen expansions while an uncapped search on
# large arrays can run for hours per transmit vector.
SWEEP_NODE_BUDGET = 50

SCHEME_ZF = "zf"
SCHEME_CI = "ci"
SCHEME_PBB = "pbb"
SCHEME_FBB = "fbb"
SCHEME_EXH = "exhaustive"
KNOWN_SCHEMES = (SCHEME_ZF, SCHEME_CI, SCHEME_PBB, SCHEME_FBB, SCHEME_EXH)

CSV_HEADER = (
    "scheme", "snr_db", "n_t", "k", "mod",
    "errors", "sent", "ser", "ci_halfwidth", "mean_nodes", "mean_solve_ms",
)

_PURPOSE_CHANNEL = 1
_PURPOSE_SYMBOLS = 2
_PURPOSE_NOISE = 3


@dataclass(frozen=True)
class SimCampaign:
    """Campaign description; validated on construction."""

    n_t: int
    k_users: int
    mod_order: int
    snr_grid_db: tuple
    trials: int
    symbols_per_channel: int
    schemes: tuple
    seed: int
    node_budget: int = SWEEP_NODE_BUDGET
    measure_time: bool = True

    def __post_init__(self):
        if not (1 <= self.k_users <= self.n_t):
            raise ValueError(f"need 1 <= K <= N_t, got K={self.k_users}, N_t={self.n_t}")
        if self.mod_order < 4 or self.mod_order & (self.mod_order - 1):
            raise ValueError(f"modulation order must be a power of two >= 4, got {self.mod_order}")
        if len(self.snr_grid_db) == 0:
            raise ValueError("SNR grid is empty")
        if self.trials < 1 or self.symbols_per_channel < 1:
            raise ValueError("trials and symbols_per_channel must be >= 1")
        if not self.schemes:
            raise ValueError("no schemes selected")
        unknown = [s for s in self.schemes if s not in KNOWN_SCHEMES]
        if unknown:
            raise ValueError(f"unknown schemes {unknown}; known: {list(KNOWN_SCHEMES)}")
        if len(set(self.schemes)) != len(self.schemes):
            raise ValueError("duplicate scheme in campaign")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must fit in 64 bits")
        if self.node_budget < 1:
            raise ValueError("node budget must be >= 1")
        object.__setattr__(self, "snr_grid_db", tuple(float(s) for s in self.snr_grid_db))
        object.__setattr__(self, "schemes", tuple(self.schemes))

    @property
    def decisions_per_point(self) -> int:
        return self.trials * self.symbols_per_channel * self.k_users


@dataclass(frozen=True)
class SerRecord:
    """One (scheme, SNR) cell of a campaign."""

    scheme: str
    snr_db: float
    errors: int
    sent: int
    mean_nodes: float | None = None
    mean_solve_ms: float | None = None

    @property
    def ser(self) -> float:
        return self.errors / self.sent if self.sent else float("nan")

    @property
    def ci_halfwidth(self) -> float:
        """Normal-approximation 95% half-width on the SER estimate."""
        if not self.sent:
            return float("nan")
        p = self.ser
        return float(1.96 * np.sqrt(max(p * (1.0 - p), 0.0) / self.sent))


def _stream(seed: int, purpose: int, trial: int = 0, snr_idx: int = 0) -> np.random.Generator:
    key = np.array([seed, (purpose << 56) | (snr_idx << 40) | trial], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def gen_channel(k_users: int, n_t: int, rng: np.random.Generator) -> np.ndarray:
    """K x N_t Rayleigh channel with unit-variance complex Gaussian entries."""
    re = rng.standard_normal((k_users, n_t))
    im = rng.standard_normal((k_users, n_t))
    return (re + 1j * im) / np.sqrt(2.0)


def transmit(x, channel: np.ndarray, sigma2: float, rng: np.random.Generator) -> np.ndarray:
    """One noisy downlink use: y = H x + n with n ~ CN(0, sigma2 I)."""
    if sigma2 <= 0:
        raise ValueError(f"noise variance must be positive, got {sigma2}")
    xv = getattr(x, "x", x)
    noise = rng.standard_normal(channel.shape[0]) + 1j * rng.standard_normal(channel.shape[0])
    return channel @ xv + np.sqrt(sigma2 / 2.0) * noise


def _precode(scheme, m, channel, symbols, budget):
    """Returns (complex transmit vector, node count or None, search completed)."""
    if scheme == SCHEME_ZF:
        return precode_zf_quantized(channel, symbols).x, None, True
    if scheme == SCHEME_CI:
        return precode_ci_relaxed(m)[0].x, None, True
    if scheme == SCHEME_PBB:
        res = precode_pbb(m, budget=budget)
        return res.x.x, res.nodes_expanded, res.complete
    if scheme == SCHEME_FBB:
        res = precode_fbb(m, budget=budget)
        return res.x.x, res.nodes_expanded, res.complete
    if scheme == SCHEME_EXH:
        return exhaustive_solve(m).x, None, True
    raise ValueError(f"unknown scheme {scheme!r}")


def run_campaign(campaign: SimCampaign) -> list[SerRecord]:
    """Run the sweep and return one record per (scheme, SNR), ordered by (scheme, SNR).

    A scheme that raises during precoding is aborted for the rest of the
    campaign and reported with whatever it accumulated; the other schemes
    continue unaffected.
    """
    con = Constellation(campaign.mod_order)
    k, n_t, spc = campaign.k_users, campaign.n_t, campaign.symbols_per_channel
    sigma2 = np.array([10.0 ** (-s / 10.0) for s in campaign.snr_grid_db])
    needs_ci = [s for s in campaign.schemes if s != SCHEME_ZF]

    errors = {s: np.zeros(len(sigma2), dtype=np.int64) for s in campaign.schemes}
    sent = {s: np.zeros(len(sigma2), dtype=np.int64) for s in campaign.schemes}
    nodes_total = {s: 0 for s in campaign.schemes}
    node_calls = {s: 0 for s in campaign.schemes}
    time_total = {s: 0.0 for s in campaign.schemes}
    time_calls = {s: 0 for s in campaign.schemes}
    incomplete = {s: 0 for s in campaign.schemes}
    aborted: dict[str, str] = {}

    for trial in range(campaign.trials):
        channel = gen_channel(k, n_t, _stream(campaign.seed, _PURPOSE_CHANNEL, trial))
        sym_idx = _stream(campaign.seed, _PURPOSE_SYMBOLS, trial).integers(
            0, campaign.mod_order, size=(spc, k)
        )
        symbols = con.symbols[sym_idx]

        # Precode every symbol vector once; noiseless receive points are
        # reused across the entire SNR grid.
        hx = {}
        for scheme in campaign.schemes:
            if scheme in aborted:
                continue
            rows = np.empty((spc, k), dtype=complex)
            try:
                for j in range(spc):
                    m = build_ci_matrix(channel, symbols[j], con) if scheme in needs_ci else None
                    start = time.perf_counter() if campaign.measure_time else 0.0
                    x, nodes, complete = _precode(scheme, m, channel, symbols[j], campaign.node_budget)
                    if campaign.measure_time:
                        time_total[scheme] += time.perf_counter() - start
                        time_calls[scheme] += 1
                    if nodes is not None:
                        nodes_total[scheme] += nodes
                        node_calls[scheme] += 1
                    if not complete:
                        incomplete[scheme] += 1
                    rows[j] = channel @ x
            except Exception as exc:
                aborted[scheme] = f"{type(exc).__name__}: {exc}"
                log.error("scheme %r aborted at trial %d: %s", scheme, trial, aborted[scheme])
                continue
            hx[scheme] = rows

        for snr_idx in range(len(sigma2)):
            noise_rng = _stream(campaign.seed, _PURPOSE_NOISE, trial, snr_idx)
            noise = noise_rng.standard_normal((spc, k)) + 1j * noise_rng.standard_normal((spc, k))
            noise *= np.sqrt(sigma2[snr_idx] / 2.0)
            for scheme, rows in hx.items():
                detected = detect_indices(rows + noise, con)
                errors[scheme][snr_idx] += int(np.count_nonzero(detected != sym_idx))
                sent[scheme][snr_idx] += sym_idx.size

    for scheme, count in incomplete.items():
        if count:
            log.warning(
                "scheme %r: %d of %d searches hit the %d-node budget (incumbents used)",
                scheme, count, node_calls[scheme], campaign.node_budget,
            )

    records = []
    for scheme in campaign.schemes:
        mean_nodes = nodes_total[scheme] / node_calls[scheme] if node_calls[scheme] else None
        mean_ms = 1000.0 * time_total[scheme] / time_calls[scheme] if time_calls[scheme] else None
        for snr_idx, snr_db in enumerate(campaign.snr_grid_db):
            records.append(SerRecord(
                scheme=scheme,
                snr_db=snr_db,
                errors=int(errors[scheme][snr_idx]),
                sent=int(sent[scheme][snr_idx]),
                mean_nodes=mean_nodes,
                mean_solve_ms=mean_ms,
            ))
    records.sort(key=lambda r: (r.scheme, r.snr_db))
    return records


def write_csv(path, campaign: SimCampaign, records: list[SerRecord]) -> None:
    """Write campaign results with a fixed column set.

    Runs with identical campaigns produce byte-identical files when
    ``measure_time`` is off (wall-clock means are the only nondeterministic
    cells; they are left empty in that mode).
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow([
                r.scheme,
                repr(r.snr_db),
                campaign.n_t,
                campaign.k_users,
                campaign.mod_order,
                r.errors,
                r.sent,
                repr(r.ser),
                repr(r.ci_halfwidth),
                "" if r.mean_nodes is None else repr(r.mean_nodes),
                "" if r.mean_solve_ms is None else repr(r.mean_solve_ms),
            ])


def read_csv(path) -> list[dict]:
    """Read a results file back into a list of per-row dicts with parsed numbers."""
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            parsed = dict(row)
            for key in ("snr_db", "ser", "ci_halfwidth", "mean_nodes", "mean_solve_ms"):
                parsed[key] = float(row[key]) if row[key] else None
            for key in ("n_t", "k", "mod", "errors", "sent"):
                parsed[key] = int(row[key])
            out.append(parsed)
    return out


_CONFIG_KEYS = {
    "n_t", "k_users", "mod_order", "snr_grid_db", "trials",
    "symbols_per_channel", "schemes", "seed", "node_budget", "measure_time",
}


def campaign_from_mapping(mapping: dict) -> SimCampaign:
    """Build a campaign from a flat mapping, rejecting unknown keys."""
    if not isinstance(mapping, dict):
        raise ValueError(f"campaign config must be a mapping, got {type(mapping).__name__}")
    unknown = sorted(set(mapping) - _CONFIG_KEYS)
    if unknown:
        raise ValueError(f"unknown config keys {unknown}; known: {sorted(_CONFIG_KEYS)}")
    kwargs = dict(mapping)
    for key in ("snr_grid_db", "schemes"):
        if key in kwargs:
            kwargs[key] = tuple(kwargs[key])
    return SimCampaign(**kwargs)


def load_campaign(path) -> SimCampaign:
    """Load a campaign from a flat YAML file."""
    with open(path) as fh:
        data = yaml.safe_load(fh)
    return campaign_from_mapping(data)
