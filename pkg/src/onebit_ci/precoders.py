"""Transmit-vector generators for the 1-bit downlink.

All precoders share one yardstick: the smallest scaling coefficient
(:func:`onebit_ci.ci_matrix.min_scaling`) of the stacked transmit vector.
The schemes form a quality ladder on every instance:

  exhaustive = full branch-and-bound  >=  partial branch-and-bound
                                      >=  relax-and-quantize
with quantized zero-forcing as the linear baseline off the ladder.
"""

import heapq
import logging
from dataclasses import dataclass

import numpy as np

from .ci_matrix import CiMatrix, min_scaling, stack_complex, unstack_complex
from .lp import BoxedMaxMinLp, RelaxedSolution, solve_maxmin, solve_restricted

log = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 10**6
PRUNE_EPS = 1e-9
_BORDERLINE_FACTOR = 10.0
_ENUMERATION_LIMIT = 16  # max stacked length for exhaustive_solve


@dataclass(frozen=True)
class OneBitVector:
    """Complex transmit vector whose entries come from the four-point 1-bit alphabet.

    Every real and imaginary part is exactly +-1/sqrt(2*N_t), which makes the
    total transmit power 1 up to floating-point roundoff.
    """

    x: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=complex)
        if x.ndim != 1 or x.size < 1:
            raise ValueError(f"expected a nonempty 1-d vector, got shape {x.shape}")
        u = 1.0 / np.sqrt(2.0 * x.size)
        for part in (x.real, x.imag):
            if not np.all((part == u) | (part == -u)):
                raise ValueError("entries must have real and imaginary parts exactly +-1/sqrt(2*N_t)")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)

    @property
    def n_t(self) -> int:
        return self.x.size

    @property
    def x_e(self) -> np.ndarray:
        """Stacked real form [Re(x); Im(x)]."""
        return stack_complex(self.x)


@dataclass(frozen=True)
class Partition:
    """Split of the stacked coordinates into bound-saturated (fixed) and residual parts."""

    fixed_idx: np.ndarray
    residual_idx: np.ndarray
    x_fixed: np.ndarray

    @property
    def n_fixed(self) -> int:
        return self.fixed_idx.size

    @property
    def n_residual(self) -> int:
        return self.residual_idx.size


@dataclass(frozen=True)
class SearchResult:
    """Outcome of a branch-and-bound run.

    ``complete`` is False when the node budget ran out first; the incumbent is
    then still a valid 1-bit vector, just without the optimality certificate.
    """

    x: OneBitVector
    objective: float
    nodes_expanded: int
    complete: bool
    partition: Partition


def _amplitude(n_t: int) -> float:
    return 1.0 / np.sqrt(2.0 * n_t)


def _snap(v: np.ndarray, u: float) -> np.ndarray:
    # sign(0) resolves to +1
    return np.where(np.asarray(v) >= 0.0, u, -u)


def quantize(x_e: np.ndarray, n_t: int) -> OneBitVector:
    """Sign-snap a stacked real vector onto the 1-bit alphabet."""
    x_e = np.asarray(x_e, dtype=float)
    if x_e.shape != (2 * n_t,):
        raise ValueError(f"stacked vector has shape {x_e.shape}, expected ({2 * n_t},)")
    return OneBitVector(unstack_complex(_snap(x_e, _amplitude(n_t))))


def quantize_complex(x: np.ndarray) -> OneBitVector:
    """Sign-snap a complex vector onto the 1-bit alphabet."""
    x = np.asarray(x, dtype=complex)
    return quantize(stack_complex(x), x.size)


def box_problem(m: CiMatrix) -> BoxedMaxMinLp:
    """The relaxed problem: max-min scaling over the 1-bit amplitude box."""
    u = _amplitude(m.n_antennas)
    n = 2 * m.n_antennas
    return BoxedMaxMinLp(rows=m.m, lower=np.full(n, -u), upper=np.full(n, u))


def precode_ci_relaxed(m: CiMatrix) -> tuple[OneBitVector, RelaxedSolution]:
    """Relax-and-quantize: solve the box LP, then sign-snap the optimum."""
    rel = solve_maxmin(box_problem(m))
    return quantize(rel.v, m.n_antennas), rel


def partition_solution(rel: RelaxedSolution, n_t: int, max_residual: int | None = None) -> Partition:
    """Split a relaxed optimum into fixed (saturated) and residual coordinates.

    Fixed coordinates take their sign-snapped values, which is a no-op up to
    the saturation tolerance. Saturated entries that are not exactly on the
    bound (within ten times the tolerance) are promoted into the residual set
    so the search can revisit them, unless that would push the residual count
    past ``max_residual``; the promotion is then skipped and logged.
    """
    u = _amplitude(n_t)
    if rel.v.shape != (2 * n_t,):
        raise ValueError(f"solution length {rel.v.size} does not match 2*N_t={2 * n_t}")
    residual = set(rel.interior.tolist())
    gap = u - np.abs(rel.v)
    borderline = [i for i in rel.saturated.tolist() if 0.0 < gap[i] <= _BORDERLINE_FACTOR * (1e-6 * u)]
    promoted = residual | set(borderline)
    if borderline and (max_residual is None or len(promoted) <= max_residual):
        residual = promoted
    elif borderline:
        log.warning(
            "skipping promotion of %d borderline coordinates (residual cap %s)",
            len(borderline), max_residual,
        )
    residual_idx = np.array(sorted(residual), dtype=np.int64)
    fixed_idx = np.setdiff1d(np.arange(2 * n_t), residual_idx, assume_unique=True)
    return Partition(
        fixed_idx=fixed_idx,
        residual_idx=residual_idx,
        x_fixed=_snap(rel.v[fixed_idx], u),
    )


def _one_opt(m: CiMatrix, x_e: np.ndarray, flippable: np.ndarray) -> tuple[np.ndarray, float]:
    """Greedy sign-flip descent restricted to the flippable coordinates.

    Repeatedly applies the single flip that most improves the worst scaling
    coefficient until no flip helps. Returns a copy and its objective.
    """
    x_e = x_e.copy()
    vals = m.m @ x_e
    obj = float(vals.min())
    for _ in range(4 * flippable.size):
        # objective of every single-coordinate flip in one shot
        deltas = vals[:, None] - 2.0 * (m.m[:, flippable] * x_e[flippable])
        flip_objs = deltas.min(axis=0)
        best = int(np.argmax(flip_objs))
        if flip_objs[best] <= obj:
            return x_e, obj
        j = int(flippable[best])
        vals -= 2.0 * x_e[j] * m.m[:, j]
        x_e[j] = -x_e[j]
        obj = float(flip_objs[best])
    return x_e, obj


def _best_first_search(m, problem, base_fixed, residual_idx, root_rel, budget):
    """Best-first branch-and-bound over the residual coordinates.

    Node bounds come from the restricted LP relaxation, evaluated lazily: a
    child enters the queue under its parent's bound and is only solved when
    it surfaces, so queue entries killed by a better incumbent never cost an
    LP. The incumbent starts at the quantized root relaxation (hence never
    worse than relax-and-quantize) and every evaluated relaxation is
    sign-snapped and polished by flip descent into a further candidate.
    Branching picks the residual coordinate farthest from its quantized
    value; the child matching the relaxed sign is pushed first.
    """
    u = _amplitude(m.n_antennas)
    residual = [int(i) for i in residual_idx]
    res_arr = np.array(residual, dtype=np.int64)

    incumbent = _snap(root_rel.v, u)
    for i, val in base_fixed.items():
        incumbent[i] = val
    incumbent, incumbent_obj = _one_opt(m, incumbent, res_arr)

    if not residual:
        return incumbent, incumbent_obj, 0, True

    # heap entries: (-bound, tiebreak, assignment, relaxed v or None if the
    # bound is inherited from the parent and the node's own LP is pending)
    heap = [(-root_rel.t, 0, {}, root_rel.v)]
    counter = 1
    nodes_expanded = 0

    while heap and nodes_expanded < budget:
        neg_bound, _, assignment, v_rel = heapq.heappop(heap)
        if -neg_bound <= incumbent_obj + PRUNE_EPS:
            continue

        if v_rel is None:
            rel = solve_restricted(problem, {**base_fixed, **assignment})
            cand, cand_obj = _one_opt(m, _snap(rel.v, u), res_arr)
            if cand_obj > incumbent_obj:
                incumbent, incumbent_obj = cand, cand_obj
            if rel.t > incumbent_obj + PRUNE_EPS:
                heapq.heappush(heap, (-rel.t, counter, assignment, rel.v))
                counter += 1
            continue

        nodes_expanded += 1
        unassigned = [i for i in residual if i not in assignment]
        dist = [abs(v_rel[i] - (u if v_rel[i] >= 0 else -u)) for i in unassigned]
        branch = unassigned[int(np.argmax(dist))]
        preferred = u if v_rel[branch] >= 0 else -u

        for val in (preferred, -preferred):
            child = dict(assignment)
            child[branch] = val
            if len(child) == len(residual):
                # fully assigned: base plus a complete residual sign pattern
                x_e = np.empty(2 * m.n_antennas)
                for i, bv in base_fixed.items():
                    x_e[i] = bv
                for i, cv in child.items():
                    x_e[i] = cv
                obj = min_scaling(m, x_e)
                if obj > incumbent_obj:
                    incumbent, incumbent_obj = x_e, obj
            else:
                heapq.heappush(heap, (neg_bound, counter, child, None))
                counter += 1

    complete = all(-neg_bound <= incumbent_obj + PRUNE_EPS for neg_bound, *_ in heap)
    return incumbent, incumbent_obj, nodes_expanded, complete


def precode_pbb(m: CiMatrix, budget: int = DEFAULT_NODE_BUDGET) -> SearchResult:
    """Partial branch-and-bound: exact search over the non-saturated coordinates only.

    The relaxed optimum leaves at most 2K-1 coordinates off the box bound;
    those are searched exactly while the saturated ones stay pinned at their
    sign-snapped values. Exact over its restricted space when it completes
    within budget, otherwise the incumbent is returned flagged.
    """
    if budget < 1:
        raise ValueError(f"node budget must be >= 1, got {budget}")
    problem = box_problem(m)
    root = solve_maxmin(problem)
    part = partition_solution(root, m.n_antennas, max_residual=2 * m.k_users - 1)
    base_fixed = {int(i): float(v) for i, v in zip(part.fixed_idx, part.x_fixed)}
    x_e, obj, nodes, complete = _best_first_search(m, problem, base_fixed, part.residual_idx, root, budget)
    if not complete:
        log.debug("partial BB budget of %d nodes exhausted; returning incumbent", budget)
    return SearchResult(
        x=OneBitVector(unstack_complex(x_e)),
        objective=obj,
        nodes_expanded=nodes,
        complete=complete,
        partition=part,
    )


def precode_fbb(m: CiMatrix, budget: int = DEFAULT_NODE_BUDGET) -> SearchResult:
    """Full branch-and-bound over all stacked coordinates (globally optimal, exponential)."""
    if budget < 1:
        raise ValueError(f"node budget must be >= 1, got {budget}")
    n = 2 * m.n_antennas
    problem = box_problem(m)
    root = solve_maxmin(problem)
    part = Partition(
        fixed_idx=np.zeros(0, dtype=np.int64),
        residual_idx=np.arange(n, dtype=np.int64),
        x_fixed=np.zeros(0),
    )
    x_e, obj, nodes, complete = _best_first_search(m, problem, {}, part.residual_idx, root, budget)
    if not complete:
        log.debug("full BB budget of %d nodes exhausted; returning incumbent", budget)
    return SearchResult(
        x=OneBitVector(unstack_complex(x_e)),
        objective=obj,
        nodes_expanded=nodes,
        complete=complete,
        partition=part,
    )


def zf_unquantized(channel: np.ndarray, symbols: np.ndarray) -> np.ndarray:
    """Zero-forcing direction H^H (H H^H)^{-1} s (no power normalization)."""
    channel = np.asarray(channel, dtype=complex)
    symbols = np.asarray(symbols, dtype=complex)
    gram = channel @ channel.conj().T
    try:
        np.linalg.cholesky(gram)
    except np.linalg.LinAlgError:
        raise ValueError("channel is rank deficient; zero-forcing is undefined") from None
    return channel.conj().T @ np.linalg.solve(gram, symbols)


def precode_zf_quantized(channel: np.ndarray, symbols: np.ndarray) -> OneBitVector:
    """Quantized zero-forcing baseline: sign-snap the ZF direction."""
    return quantize_complex(zf_unquantized(channel, symbols))


def exhaustive_solve(m: CiMatrix) -> OneBitVector:
    """True argmax of min-scaling over every 1-bit vector, by enumeration.

    Guarded to 2*N_t <= 16 stacked coordinates. Sign patterns are encoded as
    integers (bit j set means stacked coordinate j is negative), and ties
    resolve to the smallest encoding, so the all-positive pattern wins a
    global tie.
    """
    n = 2 * m.n_antennas
    if n > _ENUMERATION_LIMIT:
        raise ValueError(f"enumeration over 2^{n} patterns refused (limit 2^{_ENUMERATION_LIMIT})")
    u = _amplitude(m.n_antennas)
    codes = np.arange(2**n, dtype=np.uint32)
    bits = (codes[:, None] >> np.arange(n)[None, :]) & 1
    patterns = u * (1.0 - 2.0 * bits.astype(float))
    objectives = (patterns @ m.m.T).min(axis=1)
    best = int(np.argmax(objectives))
    return OneBitVector(unstack_complex(patterns[best]))
