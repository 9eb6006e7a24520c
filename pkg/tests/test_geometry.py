"""Tests for PSK constellation handling, boundary decomposition, and detection."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from onebit_ci import Constellation, decompose_symbol, detect, detect_indices

SQRT2 = np.sqrt(2.0)


class TestConstellation:
    """Constellation construction and symbol lookup."""

    def test_qpsk_symbols_are_diagonal(self):
        """Default QPSK phase puts symbols on the quadrant diagonals."""
        con = Constellation(4)
        expected = np.exp(1j * (np.pi / 4 + np.pi / 2 * np.arange(4)))
        np.testing.assert_allclose(con.symbols, expected, atol=1e-15)

    def test_unit_modulus(self):
        """All PSK symbols have unit magnitude."""
        for order in (4, 8, 16, 32):
            con = Constellation(order)
            np.testing.assert_allclose(np.abs(con.symbols), 1.0, atol=1e-15)

    @pytest.mark.parametrize("order", [3, 5, 6, 12, 0, -4])
    def test_rejects_non_power_of_two(self, order):
        """Orders that are not powers of two are refused."""
        with pytest.raises(ValueError):
            Constellation(order)

    def test_index_of_roundtrip(self):
        """Every constellation point maps back to its own index."""
        con = Constellation(8)
        for i, s in enumerate(con.symbols):
            assert con.index_of(s) == i

    def test_index_of_rejects_non_member(self):
        """Points off the constellation are refused."""
        con = Constellation(4)
        with pytest.raises(ValueError):
            con.index_of(0.5 + 0.1j)

    def test_boundary_halfangle(self):
        """The decision sector half-angle is pi over the order."""
        assert Constellation(4).boundary_halfangle == pytest.approx(np.pi / 4)
        assert Constellation(8).boundary_halfangle == pytest.approx(np.pi / 8)


class TestDecomposeSymbol:
    """Splitting a symbol along its two decision boundaries."""

    def test_qpsk_diagonal_symbol(self):
        """s = (1+j)/sqrt(2) splits into j/sqrt(2) and 1/sqrt(2)."""
        con = Constellation(4)
        dec = decompose_symbol((1 + 1j) / SQRT2, con)
        np.testing.assert_allclose(dec.s_a, 1j / SQRT2, atol=1e-15)
        np.testing.assert_allclose(dec.s_b, 1 / SQRT2, atol=1e-15)

    def test_qpsk_real_axis_symbol(self):
        """s = 1 splits into conjugate halves (1+j)/2 and (1-j)/2."""
        con = Constellation(4, phase=0.0)
        dec = decompose_symbol(1.0 + 0.0j, con)
        np.testing.assert_allclose(dec.s_a, (1 + 1j) / 2, atol=1e-15)
        np.testing.assert_allclose(dec.s_b, (1 - 1j) / 2, atol=1e-15)

    def test_8psk_component_angles(self):
        """8PSK parts sit on the boundaries at theta +- pi/8 with equal length."""
        con = Constellation(8, phase=np.pi / 8)
        theta = np.pi / 8
        dec = decompose_symbol(np.exp(1j * theta), con)
        amp = 1.0 / (2.0 * np.cos(np.pi / 8))
        np.testing.assert_allclose(dec.s_a, amp * np.exp(1j * (theta + np.pi / 8)), atol=1e-15)
        np.testing.assert_allclose(dec.s_b, amp * np.exp(1j * (theta - np.pi / 8)), atol=1e-15)
        np.testing.assert_allclose(dec.s_a + dec.s_b, np.exp(1j * theta), atol=1e-15)

    @pytest.mark.parametrize("order", [4, 8, 16])
    def test_parts_sum_to_symbol(self, order):
        """The two boundary components reconstruct the symbol for every index."""
        con = Constellation(order)
        for s in con.symbols:
            dec = decompose_symbol(s, con)
            np.testing.assert_allclose(dec.s_a + dec.s_b, s, atol=1e-12)

    def test_rejects_non_member(self):
        """Decomposition requires an exact constellation point."""
        con = Constellation(4)
        with pytest.raises(ValueError):
            decompose_symbol(0.9 * con.symbols[0], con)

    def test_rejects_bpsk(self):
        """Two-point constellations have no two-boundary decomposition."""
        with pytest.raises(ValueError):
            decompose_symbol(1.0 + 0.0j, Constellation(2))


class TestDetect:
    """Nearest-symbol decisions by angular sector."""

    def test_first_quadrant_angle(self):
        """arg(y) inside (0, pi/2) decides the first QPSK symbol."""
        con = Constellation(4)
        assert detect(0.9 + 0.1j, con) == 0

    @given(st.integers(min_value=0, max_value=7), st.floats(min_value=1e-3, max_value=1e3))
    def test_positive_scaling_preserves_decision(self, idx, scale):
        """Scaling by a positive real never changes the decided index."""
        con = Constellation(8)
        assert detect(scale * con.symbols[idx], con) == idx

    def test_exact_symbol(self):
        """A rotation by pi/2 from the first QPSK point lands on index 1."""
        con = Constellation(4)
        assert detect(np.exp(1j * (np.pi / 4 + np.pi / 2)), con) == 1

    def test_zero_maps_to_index_zero(self):
        """The all-boundaries point y = 0 resolves to index 0 by convention."""
        con = Constellation(4)
        assert detect(0.0 + 0.0j, con) == 0

    def test_rejects_non_finite(self):
        """NaN or infinite observations are refused."""
        con = Constellation(4)
        with pytest.raises(ValueError):
            detect(complex(np.nan, 0.0), con)

    def test_vectorized_matches_scalar(self):
        """detect_indices agrees with per-element detect on random points."""
        con = Constellation(8)
        rng = np.random.default_rng(5)
        y = rng.standard_normal((4, 6)) + 1j * rng.standard_normal((4, 6))
        got = detect_indices(y, con)
        expected = np.array([[detect(v, con) for v in row] for row in y])
        np.testing.assert_array_equal(got, expected)

    def test_vectorized_zero_convention(self):
        """Vectorized detection keeps the y = 0 convention."""
        con = Constellation(4)
        y = np.array([0.0 + 0.0j, con.symbols[2]])
        np.testing.assert_array_equal(detect_indices(y, con), [0, 2])

    @given(st.integers(min_value=0, max_value=3))
    def test_noiseless_roundtrip(self, idx):
        """Each QPSK symbol detects as itself."""
        con = Constellation(4)
        assert detect(con.symbols[idx], con) == idx
