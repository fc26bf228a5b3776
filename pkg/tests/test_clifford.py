import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weylscope.clifford import (
    CliffordElement,
    CliffordMatrix,
    PairedVector,
    blade_product,
    cauchy_kernel,
    chi_minus,
    chi_plus,
    dirac_residual,
    kelvin_inverse,
    sphere_area,
    vector_func_calc,
)


def random_element(rng, n):
    dim = 1 << n
    return CliffordElement(n, rng.standard_normal(dim) + 1j * rng.standard_normal(dim))


def random_vector(rng, n):
    v = rng.standard_normal(n)
    while np.linalg.norm(v) < 1e-3:
        v = rng.standard_normal(n)
    return v


class TestBladeProduct:
    def test_generator_squares_to_minus_one(self):
        assert blade_product(0b1, 0b1, 2) == (-1, 0)

    def test_distinct_generators_merge(self):
        assert blade_product(0b01, 0b10, 2) == (1, 0b11)

    def test_unit_acts_trivially(self):
        assert blade_product(0, 0b110, 3) == (1, 0b110)

    def test_reversed_generators_pick_up_sign(self):
        assert blade_product(0b10, 0b01, 2) == (-1, 0b11)


class TestProduct:
    def test_sum_difference_product(self):
        # (e1 + e2)(e1 - e2) = -2 e12
        n = 2
        u = CliffordElement.from_dict(n, {0b01: 1.0, 0b10: 1.0})
        v = CliffordElement.from_dict(n, {0b01: 1.0, 0b10: -1.0})
        expected = CliffordElement.from_dict(n, {0b11: -2.0})
        assert (u * v).approx_eq(expected)

    def test_vector_square_is_minus_norm(self):
        x = CliffordElement.vector([3.0, 4.0])
        expected = CliffordElement.scalar(2, -25.0)
        assert (x * x).approx_eq(expected)

    def test_unit_element(self):
        rng = np.random.default_rng(7)
        u = random_element(rng, 3)
        e0 = CliffordElement.scalar(3, 1.0)
        assert (e0 * u).approx_eq(u) and (u * e0).approx_eq(u)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            CliffordElement.scalar(2, 1.0) * CliffordElement.scalar(3, 1.0)


class TestConjugation:
    def test_generator_flips(self):
        e1 = CliffordElement.blade(2, 0b01)
        assert e1.conj().approx_eq(-e1)

    def test_bivector(self):
        e12 = CliffordElement.blade(2, 0b11)
        assert e12.conj().approx_eq(-e12)

    def test_unit_fixed(self):
        e0 = CliffordElement.scalar(2, 1.0)
        assert e0.conj().approx_eq(e0)

    def test_blade_times_conjugate_is_unit(self):
        for n in (1, 2, 3, 4):
            e0 = CliffordElement.scalar(n, 1.0)
            for mask in range(1 << n):
                es = CliffordElement.blade(n, mask)
                assert (es * es.conj()).approx_eq(e0)
                assert (es.conj() * es).approx_eq(e0)


class TestKelvinInverse:
    def test_unit(self):
        x = PairedVector(1.0, np.zeros(2))
        assert kelvin_inverse(x).approx_eq(CliffordElement.scalar(2, 1.0))

    def test_generator(self):
        x = PairedVector(0.0, np.array([1.0]))
        assert kelvin_inverse(x).approx_eq(CliffordElement.blade(1, 0b1, -1.0))

    def test_diagonal_paravector(self):
        x = PairedVector(1.0, np.array([1.0]))
        expected = CliffordElement.from_dict(1, {0: 0.5, 1: -0.5})
        assert kelvin_inverse(x).approx_eq(expected)

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            kelvin_inverse(PairedVector(0.0, np.zeros(3)))


class TestVectorFunctionalCalculus:
    def test_identity_reproduces_ix(self):
        out = vector_func_calc(lambda t: t, np.array([1.0, 0.0, 0.0]))
        assert out.approx_eq(CliffordElement.blade(3, 0b001, 1.0j))

    def test_half_line_indicator_gives_idempotent(self):
        xvec = np.array([0.3, -1.2, 0.4])
        out = vector_func_calc(lambda t: 1.0 if t > 0 else 0.0, xvec)
        assert out.approx_eq(chi_plus(xvec), tol=1e-14)

    def test_square_gives_norm(self):
        xvec = np.array([2.0, -1.0])
        out = vector_func_calc(lambda t: t * t, xvec)
        assert out.approx_eq(CliffordElement.scalar(2, 5.0), tol=1e-12)

    def test_zero_vector_returns_scalar(self):
        out = vector_func_calc(lambda t: 3.0 + t, np.zeros(2))
        assert out.approx_eq(CliffordElement.scalar(2, 3.0))


class TestCauchyKernel:
    def test_plane_value_at_unit(self):
        out = cauchy_kernel(PairedVector(1.0, np.zeros(1)))
        assert out.approx_eq(CliffordElement.scalar(1, 1.0 / (2 * np.pi)), tol=1e-15)

    def test_three_dim_value_at_unit(self):
        out = cauchy_kernel(PairedVector(1.0, np.zeros(3)))
        assert out.approx_eq(CliffordElement.scalar(3, 1.0 / (2 * np.pi**2)), tol=1e-15)

    def test_homogeneity(self):
        x = PairedVector(0.7, np.array([-0.3, 1.1]))
        t = 1.9
        scaled = cauchy_kernel(PairedVector(t * x.x0, t * x.xvec))
        assert scaled.approx_eq(cauchy_kernel(x).scale(t**-2), tol=1e-12)

    def test_sphere_areas(self):
        assert sphere_area(1) == pytest.approx(2 * np.pi)
        assert sphere_area(2) == pytest.approx(4 * np.pi)
        assert sphere_area(3) == pytest.approx(2 * np.pi**2)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**31 - 1))
def test_associativity_property(n, seed):
    rng = np.random.default_rng(seed)
    u, v, w = (random_element(rng, n) for _ in range(3))
    lhs = (u * v) * w
    rhs = u * (v * w)
    assert lhs.approx_eq(rhs, tol=1e-10 * max(1.0, lhs.norm()))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**31 - 1))
def test_conjugation_antiautomorphism(n, seed):
    rng = np.random.default_rng(seed)
    u, v = (random_element(rng, n) for _ in range(2))
    assert (u * v).conj().approx_eq(v.conj() * u.conj(), tol=1e-10 * max(1.0, u.norm() * v.norm()))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**31 - 1))
def test_idempotent_relations(n, seed):
    rng = np.random.default_rng(seed)
    xvec = random_vector(rng, n)
    cp, cm = chi_plus(xvec), chi_minus(xvec)
    e0 = CliffordElement.scalar(n, 1.0)
    zero = CliffordElement.zero(n)
    assert (cp * cp).approx_eq(cp, tol=1e-13)
    assert (cm * cm).approx_eq(cm, tol=1e-13)
    assert (cp * cm).approx_eq(zero, tol=1e-13)
    assert (cp + cm).approx_eq(e0, tol=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**31 - 1))
def test_kelvin_identity(n, seed):
    rng = np.random.default_rng(seed)
    x = PairedVector(rng.standard_normal(), random_vector(rng, n))
    inv = kelvin_inverse(x)
    e0 = CliffordElement.scalar(n, 1.0)
    assert (x.as_element() * inv).approx_eq(e0, tol=1e-13)
    assert (inv * x.as_element()).approx_eq(e0, tol=1e-13)


class TestMatrixCoefficients:
    def test_matrix_blade_product_matches_scalar_signs(self):
        rng = np.random.default_rng(11)
        n, N = 3, 2
        T = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
        S = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
        u = CliffordMatrix(n, N, np.stack([T if m == 0b011 else np.zeros((N, N)) for m in range(8)]))
        v = CliffordMatrix(n, N, np.stack([S if m == 0b110 else np.zeros((N, N)) for m in range(8)]))
        sign, target = blade_product(0b011, 0b110, n)
        out = u * v
        assert np.allclose(out.coeff(target), sign * T @ S)

    def test_element_matrix_mixed_product(self):
        n, N = 2, 2
        A = np.array([[1.0, 2.0], [3.0, 4.0]], dtype=complex)
        m = CliffordMatrix.from_matrix(n, A)
        e1 = CliffordElement.blade(n, 0b01)
        out = e1 * m
        assert np.allclose(out.coeff(0b01), A)

    def test_module_norm(self):
        n, N = 1, 2
        c = np.zeros((2, N, N), dtype=complex)
        c[0] = np.diag([3.0, 1.0])
        c[1] = np.diag([4.0, 0.0])
        assert CliffordMatrix(n, N, c).norm() == pytest.approx(5.0)


class TestMonogenicity:
    def test_kernel_dirac_residual_second_order(self):
        # Central differences on an exactly monogenic function: the residual
        # must shrink by ~4 per halving of h.
        rng = np.random.default_rng(3)
        for n in (2, 3):
            point = np.concatenate(([1.1], rng.standard_normal(n)))
            point *= 1.4 / np.linalg.norm(point)
            point[0] = max(point[0], 0.6)

            def E(coords):
                return cauchy_kernel(PairedVector(coords[0], coords[1:]))

            res = [dirac_residual(E, point, h, n).norm() for h in (1e-2, 5e-3, 2.5e-3)]
            assert res[0] / res[1] == pytest.approx(4.0, abs=0.5)
            assert res[1] / res[2] == pytest.approx(4.0, abs=0.5)
