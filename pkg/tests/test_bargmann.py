import math

import numpy as np
import pytest

from fockbounds.bargmann import C0_DERIVED
from fockbounds.bargmann import MonomialExpansion
from fockbounds.bargmann import PlanarQuadrature
from fockbounds.bargmann import ShiftedFock
from fockbounds.bargmann import ZeroBased
from fockbounds.bargmann import bargmann_expansion
from fockbounds.bargmann import bargmann_transform
from fockbounds.bargmann import fock_norm_sq
from fockbounds.bargmann import fock_shift
from fockbounds.bargmann import gabor_from_fock
from fockbounds.bargmann import monomial_eval
from fockbounds.bargmann import monomial_table
from fockbounds.bargmann import phi_test
from fockbounds.bargmann import planar_norm_sq
from fockbounds.bargmann import reproducing_eval
from fockbounds.bargmann import sampling_sum
from fockbounds.phase_space import GAUSSIAN
from fockbounds.phase_space import HermiteBasis
from fockbounds.phase_space import LineQuadrature
from fockbounds.phase_space import PhasePoint
from fockbounds.phase_space import SquareLattice
from fockbounds.phase_space import gabor_coefficient
from fockbounds.phase_space import gabor_coefficients
from fockbounds.phase_space import tf_shift
from fockbounds.util.exceptions import DivergenceError
from fockbounds.util.exceptions import ExtentTooSmall
from fockbounds.util.exceptions import RimNotNegligible
from fockbounds.util.exceptions import TailNotCertified
from fockbounds.util.exceptions import ValidationError
from fockbounds.util.exceptions import ZeroWindowCenter
from tests.test_util import random_coeffs
from tests.test_util import random_points


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


class TestMonomials(object):
    def test_closed_form(self):
        z = np.array([0.2 + 0.1j, -1.3j, 2.0])
        expected = math.sqrt(math.pi ** 3 / 6.0) * z ** 3
        assert np.allclose(monomial_eval(3, z), expected)

    def test_large_index_does_not_overflow(self):
        values = monomial_table(400, np.array([3.0 + 4.0j]))
        assert np.all(np.isfinite(values))

    def test_expansion_matches_table(self, rng):
        coeffs = random_coeffs(rng, 12)
        z = random_points(rng, 7, 2.0)
        F = MonomialExpansion(coeffs)
        expected = np.tensordot(coeffs, monomial_table(12, z), axes=(0, 0))
        assert np.allclose(F(z), expected)
        assert F.degree == 11


class TestBargmannTransform(object):
    def test_hermite_goes_to_monomials(self, rng):
        z = random_points(rng, 10, 1.5)
        expected = monomial_table(21, z)
        for n in range(21):
            coeffs = np.zeros(n + 1)
            coeffs[n] = 1.0
            assert np.max(np.abs(bargmann_transform(coeffs, z) - expected[n])) < 1e-6

    def test_window_maps_to_constant(self):
        z = np.array([0.0, 0.7 - 0.2j, -1.1 + 1.4j])
        assert np.allclose(bargmann_transform(GAUSSIAN, z), 2.0 ** -0.25,
                           rtol=0, atol=1e-10)

    def test_intertwines_shifts(self, rng):
        coeffs = random_coeffs(rng, 6)
        f = HermiteBasis(6).function(coeffs)
        F = bargmann_expansion(coeffs)
        for _ in range(20):
            zeta = PhasePoint.from_complex(random_points(rng, 1, 1.0)[0])
            z = random_points(rng, 1, 1.0)
            lhs = bargmann_transform(lambda t: tf_shift(f, zeta, t), z)
            rhs = fock_shift(zeta, F, z)
            assert np.max(np.abs(lhs - rhs)) < 1e-8
            assert np.allclose(ShiftedFock(zeta, F)(z), rhs)

    def test_unitary(self, rng):
        coeffs = random_coeffs(rng, 12)
        quad = PlanarQuadrature(6.0, 0.05)

        def transformed(z):
            return np.concatenate([bargmann_transform(coeffs, z[k:k + 1000])
                                   for k in range(0, len(z), 1000)])

        assert abs(planar_norm_sq(transformed, quad) - 1.0) < 1e-6

    def test_extent_checked(self):
        with pytest.raises(ExtentTooSmall):
            bargmann_transform(GAUSSIAN, np.array([3.0]),
                               LineQuadrature(extent=2.0))


class TestFockNorm(object):
    def test_isometry(self, rng):
        coeffs = random_coeffs(rng, 6)
        F = MonomialExpansion(coeffs)
        quad = PlanarQuadrature(6.0, 0.05)
        assert abs(fock_norm_sq(F) - 1.0) < 1e-12
        assert abs(planar_norm_sq(F, quad) - 1.0) < 1e-6

    def test_constant_function(self):
        quad = PlanarQuadrature(6.0, 0.05)
        assert abs(fock_norm_sq(ZeroBased(1.0), quad) - 1.0) < 1e-9

    def test_zero_based_monomial(self):
        e5 = ZeroBased(math.sqrt(math.pi ** 5 / 120.0), origin_order=5)
        quad = PlanarQuadrature(7.0, 0.05)
        assert abs(fock_norm_sq(e5, quad) - 1.0) < 1e-6

    def test_shift_preserves_norm(self, rng):
        F = MonomialExpansion(0.6 * random_coeffs(rng, 6))
        quad = PlanarQuadrature(7.0, 0.02)
        for zeta in (PhasePoint(0.4, -0.2), PhasePoint(-0.3, 0.9)):
            shifted = planar_norm_sq(ShiftedFock(zeta, F), quad)
            assert abs(shifted - fock_norm_sq(F)) < 1e-8

    def test_quadrature_weights(self):
        quad = PlanarQuadrature(3.0, 0.1)
        assert abs(quad.total_weight() - 9.0 * math.pi) < 1e-10
        assert abs(quad.integrate(lambda z: np.ones(len(z))) - 9.0 * math.pi) < 1e-10
        assert quad.size == int(np.sum(quad.counts))

    def test_growing_integrand(self):
        coeffs = np.zeros(61)
        coeffs[60] = 1.0
        with pytest.raises(DivergenceError):
            planar_norm_sq(MonomialExpansion(coeffs), PlanarQuadrature(2.0))

    def test_rim_not_negligible(self):
        with pytest.raises(RimNotNegligible):
            planar_norm_sq(ZeroBased(1.0), PlanarQuadrature(1.5))

    def test_quadrature_path_needs_quadrature(self):
        with pytest.raises(ValidationError):
            fock_norm_sq(ZeroBased(1.0))


class TestZeroBased(object):
    def test_product_form(self, rng):
        F = ZeroBased(2.0, [1.0, 1j], origin_order=1)
        z = random_points(rng, 9, 2.0)
        direct = 2.0 * z * (1.0 - z) * (1.0 - z / 1j)
        assert np.allclose(F(z), direct)
        assert np.allclose(F.logabs(z), np.log(np.abs(direct)))

    def test_zero_gives_minus_infinity(self):
        F = ZeroBased(1.0, [0.5 + 0.5j])
        assert F.logabs(np.array([0.5 + 0.5j]))[0] == -np.inf

    def test_origin_zero_rejected(self):
        with pytest.raises(ValidationError):
            ZeroBased(1.0, [0.0, 1.0])
        with pytest.raises(ValidationError):
            ZeroBased(0.0)


class TestKernelAndPhi(object):
    def test_reproducing_kernel(self, rng):
        F = MonomialExpansion(random_coeffs(rng, 10))
        z = random_points(rng, 5, 1.5)
        assert np.allclose(reproducing_eval(F, z), F(z))

    def test_phi_on_its_ray(self):
        w = 1.2 - 0.5j
        assert np.allclose(phi_test(0.3, w, w), math.exp(0.3 * abs(w) ** 2))

    def test_phi_off_its_ray(self):
        assert abs(abs(phi_test(1.0, 1.0, 1j)) - math.exp(-1.0)) < 1e-15

    def test_phi_comparable_near_center(self):
        a, w = 0.8, 1.5 + 0.5j
        axis = np.linspace(-1.0, 1.0, 41)
        d = (axis[:, np.newaxis] + 1j * axis[np.newaxis, :]).ravel()
        z = w + d[np.abs(d) <= 1.0]
        deviation = np.log(np.abs(phi_test(a, w, z))) - a * np.abs(z) ** 2
        assert np.max(np.abs(deviation)) <= a * (2.0 * abs(w) + 1.0) / abs(w)

    def test_phi_needs_center(self):
        with pytest.raises(ZeroWindowCenter):
            phi_test(0.3, 0.0, 1.0)


class TestSampling(object):
    def test_equivalence_identity(self, rng):
        lattice = SquareLattice(0.8)
        rho = 9.0
        points = lattice.enumerate(rho)
        quad = LineQuadrature.for_radius(rho)
        for _ in range(5):
            coeffs = random_coeffs(rng, 8)
            gabor = np.sum(np.abs(gabor_coefficients(coeffs, GAUSSIAN, points,
                                                     quad)) ** 2)
            fock = sampling_sum(MonomialExpansion(coeffs), lattice, rho)
            assert abs(gabor - fock) <= 1e-6 * gabor

    def test_wrong_prefactor_breaks_identity(self, rng):
        lattice = SquareLattice(0.8)
        coeffs = random_coeffs(rng, 4)
        F = MonomialExpansion(coeffs)
        right = sampling_sum(F, lattice, 8.0)
        wrong = sampling_sum(F, lattice, 8.0, c0=0.5)
        assert abs(wrong / right - 0.5 / C0_DERIVED) < 1e-12

    def test_single_point(self):
        F = MonomialExpansion([1.0])
        value = sampling_sum(F, SquareLattice(0.8), 0.5, tail_tol=None)
        assert abs(value - C0_DERIVED) < 1e-15

    def test_uncertified_tail(self, rng):
        F = MonomialExpansion(random_coeffs(rng, 10))
        with pytest.raises(TailNotCertified):
            sampling_sum(F, SquareLattice(0.8), 1.0)

    def test_gabor_from_fock(self, rng):
        coeffs = random_coeffs(rng, 5)
        F = MonomialExpansion(coeffs)
        quad = LineQuadrature()
        for z in random_points(rng, 4, 2.0):
            zeta = PhasePoint.from_complex(z)
            direct = abs(gabor_coefficient(coeffs, GAUSSIAN, zeta, quad)) ** 2
            assert abs(gabor_from_fock(F, zeta) - direct) < 1e-12
