"""Real-valued scaling-coefficient matrix for constructive-interference precoding.

For K users and N_t antennas the matrix maps the stacked real transmit vector
x_E = [Re(x); Im(x)] (length 2*N_t) to the 2K scaling coefficients
[alpha_1^A .. alpha_K^A, alpha_1^B .. alpha_K^B]: the coordinates of each
user's noiseless received sample in the basis of its two decomposed symbol
parts. Row k belongs to user k's upper-boundary coefficient, row K+k to the
lower one.
"""

from dataclasses import dataclass

import numpy as np

from .geometry import Constellation, decompose_symbol

DEGENERATE_TOL = 1e-12


class DegenerateDecompositionError(ValueError):
    """The two decomposition directions are (numerically) parallel."""


@dataclass(frozen=True)
class CiMatrix:
    """Coefficient matrix of shape (2K, 2N_t) with its dimensions."""

    m: np.ndarray
    k_users: int
    n_antennas: int

    def __post_init__(self):
        expected = (2 * self.k_users, 2 * self.n_antennas)
        if self.m.shape != expected:
            raise ValueError(f"matrix shape {self.m.shape} does not match {expected}")
        if not np.all(np.isfinite(self.m)):
            raise ValueError("matrix entries must be finite")
        self.m.setflags(write=False)


def stack_complex(x: np.ndarray) -> np.ndarray:
    """Stack a complex vector as [Re(x); Im(x)]."""
    x = np.asarray(x)
    return np.concatenate([x.real, x.imag])


def unstack_complex(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`stack_complex`."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size % 2:
        raise ValueError(f"stacked vector must be 1-d with even length, got shape {v.shape}")
    n = v.size // 2
    return v[:n] + 1j * v[n:]


def _user_rows(h: np.ndarray, s_a: complex, s_b: complex) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient rows (p, q) for one user from its channel and symbol parts.

    Obtained by equating real and imaginary parts of
    h^T x = alpha_a * s_a + alpha_b * s_b and solving the 2x2 system for the
    two coefficients; the shared denominator is the cross product of the two
    decomposition directions.
    """
    d = s_a.real * s_b.imag - s_a.imag * s_b.real
    if abs(d) < DEGENERATE_TOL:
        raise DegenerateDecompositionError(
            f"decomposition directions are parallel (denominator {d:.3g})"
        )
    hr, hi = h.real, h.imag
    a = (s_b.imag * hr - s_b.real * hi) / d
    b = -(s_b.imag * hi + s_b.real * hr) / d
    c = (s_a.real * hi - s_a.imag * hr) / d
    e = (s_a.real * hr + s_a.imag * hi) / d
    return np.concatenate([a, b]), np.concatenate([c, e])


def build_ci_matrix(channel: np.ndarray, symbols: np.ndarray, constellation: Constellation) -> CiMatrix:
    """Assemble the scaling-coefficient matrix for a channel and symbol vector.

    ``channel`` is K x N_t complex with N_t >= K >= 1; each entry of
    ``symbols`` must be a constellation point.
    """
    channel = np.asarray(channel, dtype=complex)
    symbols = np.asarray(symbols, dtype=complex)
    if channel.ndim != 2:
        raise ValueError(f"channel must be a 2-d matrix, got shape {channel.shape}")
    k, n_t = channel.shape
    if k < 1 or n_t < k:
        raise ValueError(f"need N_t >= K >= 1, got K={k}, N_t={n_t}")
    if symbols.shape != (k,):
        raise ValueError(f"expected {k} symbols, got shape {symbols.shape}")
    if not np.all(np.isfinite(channel)):
        raise ValueError("channel entries must be finite")

    m = np.empty((2 * k, 2 * n_t))
    for i in range(k):
        dec = decompose_symbol(symbols[i], constellation)
        p, q = _user_rows(channel[i], dec.s_a, dec.s_b)
        m[i] = p
        m[k + i] = q
    return CiMatrix(m=m, k_users=k, n_antennas=n_t)


def scaling_coefficients(m: CiMatrix, x_e: np.ndarray) -> np.ndarray:
    """All 2K scaling coefficients of a stacked transmit vector."""
    return m.m @ np.asarray(x_e, dtype=float)


def min_scaling(m: CiMatrix, x_e: np.ndarray) -> float:
    """Smallest scaling coefficient, the max-min objective every precoder drives up."""
    x_e = np.asarray(x_e, dtype=float)
    if x_e.shape != (2 * m.n_antennas,):
        raise ValueError(f"stacked vector has shape {x_e.shape}, expected ({2 * m.n_antennas},)")
    return float(np.min(m.m @ x_e))
