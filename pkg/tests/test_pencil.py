import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weylscope import gallery
from weylscope.pencil import (
    MatrixTuple,
    det_poly,
    hyperbolicity_check,
    line_poly_coeffs,
    localisation,
    localise,
    pencil_eval,
    support_function,
)

PAULI = gallery.pauli_triple()
DIAG = gallery.diag_pair()
CARDIOID = gallery.cardioid_pair()
NIL = gallery.nilpotent_pair()


def random_hermitian_tuple(rng, n, N):
    mats = []
    for _ in range(n):
        z = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
        mats.append((z + z.conj().T) / 2)
    return MatrixTuple(tuple(mats))


class TestPencilEval:
    def test_pauli_third_axis(self):
        assert np.allclose(pencil_eval(PAULI, [0, 0, 1]), gallery.PAULI_3)

    def test_diag_combination(self):
        assert np.allclose(pencil_eval(DIAG, [2.0, 3.0]), np.diag([2.0, 3.0]))

    def test_zero_direction(self):
        assert np.allclose(pencil_eval(PAULI, np.zeros(3)), np.zeros((2, 2)))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            pencil_eval(PAULI, [1.0, 2.0])


class TestDetPoly:
    def test_pauli_quadric(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            xi = rng.standard_normal(4)
            expected = xi[0] ** 2 - np.sum(xi[1:] ** 2)
            assert det_poly(PAULI, xi) == pytest.approx(expected, abs=1e-12)

    def test_cardioid_vanishes_at_double_direction(self):
        assert det_poly(CARDIOID, [1.0, 1.0, 0.0]) == pytest.approx(0.0, abs=1e-12)

    def test_circle_point_factorisation(self):
        a = np.array([2.0, 0.0])
        tup = gallery.circle_point_pair(a)
        rng = np.random.default_rng(1)
        for _ in range(10):
            xi = rng.standard_normal(3)
            expected = (xi[0] + a @ xi[1:]) * (xi[0] ** 2 - np.sum(xi[1:] ** 2))
            assert det_poly(tup, xi) == pytest.approx(expected, rel=1e-10, abs=1e-12)


class TestHyperbolicity:
    def test_hermitian_short_circuit(self):
        verdict = hyperbolicity_check(PAULI)
        assert verdict.verdict == "hyperbolic"
        assert verdict.directions_tested == 0

    def test_nilpotent_pair_sampling_clean(self):
        # Oracle: <A, s> is upper triangular with diagonal (0, s_2), so the
        # spectrum {0, s_2} is real in every direction.
        verdict = hyperbolicity_check(NIL, direction_count=512, tol=1e-9)
        assert verdict.verdict == "inconclusive"
        assert verdict.worst_imag < 1e-9

    def test_skew_matrix_refuted(self):
        verdict = hyperbolicity_check(gallery.skew_single(), direction_count=8)
        assert verdict.verdict == "not_hyperbolic"
        assert verdict.worst_imag == pytest.approx(1.0, abs=1e-9)


class TestSupportFunction:
    def test_pauli_sphere(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            s = rng.standard_normal(3)
            s /= np.linalg.norm(s)
            assert support_function(PAULI, s) == pytest.approx(1.0, abs=1e-12)

    def test_diag_directions(self):
        assert support_function(DIAG, [1.0, 0.0]) == pytest.approx(1.0)
        assert support_function(DIAG, [-1.0, 0.0]) == pytest.approx(0.0, abs=1e-12)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            support_function(NIL, [1.0, 0.0])


class TestLocalisation:
    def test_cardioid_double_point(self):
        mu, value = localisation(CARDIOID, [1.0, 1.0, 0.0], [1.0, 0.0, 0.0])
        assert mu == 2
        assert value == pytest.approx(2.0, rel=1e-9)

    def test_pauli_simple_point(self):
        # Oracle: gradient of xi0^2 - |xi|^2 at (1,1,0,0) is (2,-2,0,0), so the
        # localisation is 2*z0 - 2*z1 with multiplicity one.
        mu, value = localisation(PAULI, [1.0, 1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0])
        assert mu == 1
        assert value == pytest.approx(2.0, rel=1e-9)

    def test_regular_point_multiplicity_zero(self):
        xi = np.array([3.0, 0.2, -0.4, 0.1])
        mu, value = localisation(PAULI, xi, [0.3, 1.0, 0.0, 0.0])
        assert mu == 0
        assert value == pytest.approx(det_poly(PAULI, xi), rel=1e-10)

    def test_degenerate_line_rejected(self):
        # Zero tuple: the polynomial of the augmented zero pencil vanishes
        # identically only when zeta_0 = xi_0 = 0 stays on the variety.
        zero = MatrixTuple((np.zeros((2, 2)),))
        with pytest.raises(ValueError):
            localisation(zero, [0.0, 1.0], [0.0, 1.0])

    def test_localise_object_cardioid(self):
        loc = localise(CARDIOID, [1.0, 1.0, 0.0])
        assert loc.multiplicity == 2
        rng = np.random.default_rng(42)
        for _ in range(10):
            z = rng.standard_normal(3)
            expected = 2.0 * ((z[0] - z[1]) ** 2 - z[2] ** 2)
            assert loc(z) == pytest.approx(expected, rel=1e-8, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_det_poly_homogeneous(seed):
    rng = np.random.default_rng(seed)
    A = random_hermitian_tuple(rng, 2, 3)
    zeta = rng.standard_normal(3)
    t = rng.uniform(0.2, 2.5)
    lhs = det_poly(A, t * zeta)
    rhs = t ** A.N * det_poly(A, zeta)
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_localisation_homogeneous(seed):
    rng = np.random.default_rng(seed)
    loc = localise(CARDIOID, [1.0, 1.0, 0.0])
    zeta = rng.standard_normal(3)
    t = rng.uniform(0.3, 2.0)
    assert loc(t * zeta) == pytest.approx(t**loc.multiplicity * loc(zeta), rel=1e-7, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_hermitian_pencil_real_spectrum(seed):
    rng = np.random.default_rng(seed)
    A = random_hermitian_tuple(rng, 3, 3)
    s = rng.standard_normal(3)
    eigs = np.linalg.eigvals(pencil_eval(A, s))
    assert np.max(np.abs(eigs.imag)) < 1e-12 * max(1.0, np.max(np.abs(eigs)))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_support_function_subadditive(seed):
    rng = np.random.default_rng(seed)
    A = random_hermitian_tuple(rng, 2, 3)
    s1, s2 = rng.standard_normal(2), rng.standard_normal(2)
    h = lambda s: support_function(A, s)
    assert h(s1 + s2) <= h(s1) + h(s2) + 1e-10
