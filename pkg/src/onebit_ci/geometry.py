"""M-PSK constellation geometry: decision boundaries, symbol decomposition, detection."""

from dataclasses import dataclass, field

import numpy as np

MEMBERSHIP_TOL = 1e-9


def _is_power_of_two(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Constellation:
    """Unit-magnitude M-PSK constellation.

    Symbols sit at angles 2*pi*i/M + phase for i = 0..M-1, ordered by angle.
    The default reference phase pi/M places decision boundaries on multiples
    of 2*pi/M (for QPSK: the coordinate axes).
    """

    order: int
    phase: float = None  # type: ignore[assignment]
    symbols: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not _is_power_of_two(self.order):
            raise ValueError(f"constellation order must be a power of two >= 2, got {self.order}")
        if self.phase is None:
            object.__setattr__(self, "phase", np.pi / self.order)
        pts = np.exp(1j * (2.0 * np.pi * np.arange(self.order) / self.order + self.phase))
        pts.setflags(write=False)
        object.__setattr__(self, "symbols", pts)

    @property
    def boundary_halfangle(self) -> float:
        """Half the angular width of a decision sector, pi/M."""
        return np.pi / self.order

    def index_of(self, s: complex, tol: float = MEMBERSHIP_TOL) -> int:
        """Index of the constellation point equal to ``s`` within ``tol``.

        Raises ValueError when ``s`` is not a member.
        """
        d = np.abs(self.symbols - s)
        i = int(np.argmin(d))
        if d[i] > tol:
            raise ValueError(f"{s!r} is not a constellation point (order {self.order}, min distance {d[i]:.3g})")
        return i


@dataclass(frozen=True)
class SymbolDecomposition:
    """A symbol split into two parts parallel to its decision boundaries.

    ``s_a`` is aligned with the upper boundary (symbol angle + pi/M), ``s_b``
    with the lower (symbol angle - pi/M); the parts sum back to the symbol.
    """

    s_a: complex
    s_b: complex


def decompose_symbol(s: complex, constellation: Constellation) -> SymbolDecomposition:
    """Decompose constellation symbol ``s`` along its two decision boundaries.

    For M-PSK the two parts have equal magnitude 1/(2*cos(pi/M)) and angles
    arg(s) +- pi/M, so s_a + s_b = s. BPSK is rejected: it has a single
    decision boundary and no two-part decomposition.
    """
    m = constellation.order
    if m == 2:
        raise ValueError("BPSK has a single decision boundary; two-part decomposition is undefined")
    constellation.index_of(s)  # membership guard
    theta = np.angle(s)
    half = np.pi / m
    amp = 1.0 / (2.0 * np.cos(half))
    return SymbolDecomposition(
        s_a=complex(amp * np.exp(1j * (theta + half))),
        s_b=complex(amp * np.exp(1j * (theta - half))),
    )


def detect(y: complex, constellation: Constellation) -> int:
    """Maximum-likelihood PSK decision: index of the symbol with nearest angle.

    ``y = 0`` has no angle; the tie resolves to index 0.
    """
    if not np.isfinite(y):
        raise ValueError(f"received sample must be finite, got {y!r}")
    if y == 0:
        return 0
    m = constellation.order
    rel = (np.angle(y) - constellation.phase) * m / (2.0 * np.pi)
    return int(np.round(rel)) % m


def detect_indices(y: np.ndarray, constellation: Constellation) -> np.ndarray:
    """Vectorized ``detect`` over an array of received samples."""
    m = constellation.order
    rel = (np.angle(y) - constellation.phase) * m / (2.0 * np.pi)
    idx = np.mod(np.round(rel).astype(np.int64), m)
    return np.where(y == 0, 0, idx)
