"""Independent oracles and instance generators shared by the test modules.

Everything here deliberately avoids the library's solver and search code:
the LP oracle enumerates candidate basic points directly and the search
oracles enumerate sign patterns, so agreement between library and oracle is
evidence rather than tautology.
"""

import itertools

import numpy as np

from onebit_ci import Constellation, build_ci_matrix, gen_channel


def random_ci_instance(rng, n_t, k, mod):
    """Random channel, symbol draw, and assembled CI matrix."""
    con = Constellation(mod)
    channel = gen_channel(k, n_t, rng)
    symbols = con.symbols[rng.integers(0, mod, size=k)]
    return channel, symbols, con, build_ci_matrix(channel, symbols, con)


def maxmin_oracle(rows, lower, upper, offsets=None):
    """Enumerate candidate optima of max_v min_l (rows[l].v + offsets[l]) over the box.

    At an optimum some set S of rows is tight and the coordinates split into
    free ones (F) and bound-pinned ones. For each (S, F) with |F| = |S| - 1
    the tight-row equations pin (v_F, t) once the remaining coordinates take
    a bound pattern, so all candidates are solutions of small linear systems.
    The best feasible candidate over all (S, F, pattern) is the optimum.
    """
    rows = np.asarray(rows, dtype=float)
    r, n = rows.shape
    offsets = np.zeros(r) if offsets is None else np.asarray(offsets, dtype=float)
    best = -np.inf
    coords = list(range(n))
    for s_size in range(1, min(r, n + 1) + 1):
        for s_set in itertools.combinations(range(r), s_size):
            s = list(s_set)
            a_rows = rows[s]
            for f_set in itertools.combinations(coords, s_size - 1):
                f = list(f_set)
                p = [c for c in coords if c not in f_set]
                # unknowns (v_F, t): rows_S[:, F] v_F - t = -off_S - rows_S[:, P] v_P
                a = np.concatenate([a_rows[:, f], -np.ones((s_size, 1))], axis=1)
                if abs(np.linalg.det(a)) < 1e-12:
                    continue
                if p:
                    patterns = np.array(list(itertools.product(*[(lower[c], upper[c]) for c in p])))
                else:
                    patterns = np.zeros((1, 0))
                rhs = -offsets[s] - patterns @ a_rows[:, p].T
                sols = np.linalg.solve(a, rhs.T).T
                v_f = sols[:, :-1]
                ok = np.all((v_f >= lower[f] - 1e-9) & (v_f <= upper[f] + 1e-9), axis=1)
                if not ok.any():
                    continue
                v = np.empty((int(ok.sum()), n))
                v[:, f] = np.clip(v_f[ok], lower[f], upper[f])
                v[:, p] = patterns[ok]
                cand = (v @ rows.T + offsets).min(axis=1).max()
                best = max(best, float(cand))
    return best


def all_one_bit_vectors(n_t):
    """Every stacked 1-bit vector, one per row (2^(2 n_t) of them)."""
    u = 1.0 / np.sqrt(2.0 * n_t)
    cols = list(itertools.product((u, -u), repeat=2 * n_t))
    return np.array(cols)


def best_one_bit_objective(m):
    """Max of min_l (m.m @ x) over every 1-bit vector, by direct enumeration."""
    patterns = all_one_bit_vectors(m.n_antennas)
    return float((patterns @ m.m.T).min(axis=1).max())


def best_residual_objective(m, partition):
    """Best objective over sign choices of the residual coordinates only."""
    u = 1.0 / np.sqrt(2.0 * m.n_antennas)
    x_e = np.empty(2 * m.n_antennas)
    x_e[partition.fixed_idx] = partition.x_fixed
    best = -np.inf
    for pattern in itertools.product((u, -u), repeat=partition.n_residual):
        x_e[partition.residual_idx] = pattern
        best = max(best, float((m.m @ x_e).min()))
    return best
