import math

import numpy as np
import pytest

from fockbounds.bargmann import C0_DERIVED
from fockbounds.bargmann import MonomialExpansion
from fockbounds.bargmann import sampling_sum
from fockbounds.frame_bounds import DualWindow
from fockbounds.frame_bounds import b_lower_probe
from fockbounds.frame_bounds import build_gram
from fockbounds.frame_bounds import canonical_dual
from fockbounds.frame_bounds import coupling_blocks
from fockbounds.frame_bounds import default_radius
from fockbounds.frame_bounds import estimate_frame_bounds
from fockbounds.frame_bounds import fit_decay
from fockbounds.frame_bounds import lambda_extremes
from fockbounds.frame_bounds import reconstruction_error
from fockbounds.frame_bounds import relative_change
from fockbounds.frame_bounds import walnut_upper_bound
from fockbounds.phase_space import GAUSSIAN
from fockbounds.phase_space import SquareLattice
from fockbounds.phase_space import gaussian_envelope_bound
from fockbounds.phase_space import sech_window
from fockbounds.util.exceptions import RadiusTooSmall
from fockbounds.util.exceptions import RegimeError
from fockbounds.util.exceptions import ValidationError
from tests.test_util import random_coeffs


def _psd_with_spectrum(rng, spectrum):
    size = len(spectrum)
    q, _ = np.linalg.qr(rng.standard_normal((size, size))
                        + 1j * rng.standard_normal((size, size)))
    return (q * spectrum) @ q.conj().T


class TestGram(object):
    def test_single_entry(self):
        gram = build_gram(0.8, 1, rho=0.5, check_radius=False)
        assert gram.entries.shape == (1, 1)
        assert abs(gram.entries[0, 0] - C0_DERIVED) < 1e-15

    def test_radius_precondition(self):
        with pytest.raises(RadiusTooSmall):
            build_gram(0.8, 100, rho=5.0)
        with pytest.raises(ValidationError):
            build_gram(0.8, 0)

    def test_hermitian_with_mod4_sparsity(self):
        gram = build_gram(0.8, 40)
        entries = gram.entries
        assert np.array_equal(entries, entries.conj().T)
        n = np.arange(40)
        off = (n[:, np.newaxis] - n[np.newaxis, :]) % 4 != 0
        assert np.max(np.abs(entries[off])) <= 1e-12 * np.max(np.abs(entries))

    def test_quadratic_form_is_sampling_sum(self):
        rng = np.random.default_rng(3)
        gram = build_gram(0.8, 12)
        for _ in range(3):
            v = random_coeffs(rng, 12)
            F = MonomialExpansion(np.conj(v))
            expected = sampling_sum(F, SquareLattice(0.8), gram.rho,
                                    tail_tol=None)
            assert abs(gram.quadratic_form(v) - expected) < 1e-12
            assert abs(gram.rayleigh_quotient(2.0 * v) - expected) < 1e-12

    def test_top_left_entry_bounds_B_from_below(self):
        gram = build_gram(0.75, 20)
        assert abs(gram.entries[0, 0].real - b_lower_probe(0.75)) < 1e-12
        assert abs(b_lower_probe(0.75) - 1.2767) < 1e-4

    def test_positive_semidefinite(self):
        entries = build_gram(0.9, 60).entries
        eig = np.linalg.eigvalsh(entries)
        assert eig[0] >= -1e-12 * eig[-1]

    def test_grows_with_lattice_radius(self):
        rng = np.random.default_rng(8)
        inner = build_gram(0.8, 30, rho=4.0, check_radius=False)
        outer = build_gram(0.8, 30, rho=default_radius(30))
        assert outer.points > inner.points
        for _ in range(5):
            v = random_coeffs(rng, 30)
            assert inner.quadratic_form(v) <= outer.quadratic_form(v) + 1e-12


class TestEigenvalues(object):
    def test_dense_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(4):
            spectrum = np.sort(rng.uniform(0.1, 2.0, 8))
            matrix = _psd_with_spectrum(rng, spectrum)
            low, high = lambda_extremes(matrix)
            assert abs(low - spectrum[0]) < 1e-8
            assert abs(high - spectrum[-1]) < 1e-8

    def test_decoupled_blocks(self):
        rng = np.random.default_rng(5)
        matrix = np.zeros((5, 5), dtype=complex)
        matrix[:4, :4] = _psd_with_spectrum(rng, np.array([0.5, 1.0, 1.5, 3.0]))
        matrix[4, 4] = 0.2
        blocks = coupling_blocks(matrix)
        assert sorted(len(b) for b in blocks) == [1, 4]
        low, high = lambda_extremes(matrix)
        assert abs(low - 0.2) < 1e-12
        assert abs(high - 3.0) < 1e-8

    def test_gram_against_eigh(self):
        gram = build_gram(0.8, 40)
        eig = np.linalg.eigvalsh(gram.entries)
        low, high = lambda_extremes(gram)
        assert abs(low - eig[0]) < 1e-6 * eig[-1]
        assert abs(high - eig[-1]) < 1e-6 * eig[-1]

    def test_subspace_monotonicity(self):
        rho = default_radius(40)
        small = lambda_extremes(build_gram(0.8, 20, rho))
        large = lambda_extremes(build_gram(0.8, 40, rho))
        assert small[0] >= large[0] - 1e-6
        assert small[1] <= large[1] + 1e-6

    def test_clustered_bottom_of_spectrum(self):
        rng = np.random.default_rng(21)
        spectrum = np.concatenate(([0.25184481, 0.25184493],
                                   np.linspace(0.5, 3.0, 38)))
        low, high = lambda_extremes(_psd_with_spectrum(rng, spectrum))
        assert abs(low - 0.25184481) < 1e-8
        assert abs(high - 3.0) < 1e-8

    @pytest.mark.parametrize("a", [0.6, 0.95])
    def test_gram_with_near_degenerate_minimum(self, a):
        gram = build_gram(a, 200)
        eig = np.linalg.eigvalsh(gram.entries)
        low, high = lambda_extremes(gram)
        assert abs(low - eig[0]) < 1e-7 * eig[-1]
        assert abs(high - eig[-1]) < 1e-7 * eig[-1]

    def test_non_square(self):
        with pytest.raises(ValidationError):
            lambda_extremes(np.zeros((2, 3)))


class TestUpperBounds(object):
    def test_walnut_values(self):
        assert abs(walnut_upper_bound(GAUSSIAN, 1.0) - 17.413) < 1e-3
        assert abs(walnut_upper_bound(GAUSSIAN, 0.8) - 22.04) < 1e-2

    def test_walnut_sech(self):
        assert walnut_upper_bound(sech_window(1.0), 0.8) > 0


class TestDual(object):
    def test_decay_fit_of_gaussian(self):
        kappa, _ = fit_decay(lambda t: np.exp(-math.pi * 0.5 * t * t))
        assert 0.3 < kappa < 0.5

    def test_dual_window(self):
        dual = canonical_dual(0.8, N=60)
        assert isinstance(dual, DualWindow)
        assert dual.residual <= 1e-10
        assert abs(dual.dual_lower
                   - 1.0 / ((1.0 + 1.0 / 0.8) ** 2 * dual.w_norm ** 2)) < 1e-15
        if dual.kappa_ok:
            expected = 1.0 / ((1.0 + 1.0 / 0.8) ** 2
                              * gaussian_envelope_bound(dual.kappa_fit) ** 2)
            assert abs(dual.envelope_lower - expected) < 1e-15
        else:
            assert dual.envelope_lower is None
        t = np.linspace(-1.0, 1.0, 5)
        assert np.all(np.isfinite(dual(t)))

    def test_dual_needs_frame_prefactor(self):
        gram = build_gram(0.8, 20, c0=0.5)
        with pytest.raises(ValidationError):
            canonical_dual(0.8, N=20, gram=gram)

    @pytest.mark.slow
    def test_dual_chain(self):
        for a in (0.8, 0.9):
            gram = build_gram(a, 300)
            A_est, _ = lambda_extremes(gram)
            dual = canonical_dual(a, 300, gram=gram)
            assert dual.dual_lower <= A_est
            assert 0.2 <= dual.kappa_fit / (1.0 - a * a) <= 5.0
            assert reconstruction_error(dual, a) < 1e-4


class TestEstimate(object):
    def test_relative_change(self):
        assert relative_change(1.1, 1.0) == pytest.approx(0.1)
        assert relative_change(0.0, 0.0) == 0.0
        assert relative_change(1.0, 0.0) == float("inf")

    def test_regime(self):
        with pytest.raises(RegimeError):
            estimate_frame_bounds(0.4, N=10)
        with pytest.raises(RegimeError):
            estimate_frame_bounds(1.0, N=10)

    def test_small_run(self):
        report = estimate_frame_bounds(0.8, N=40, with_dual=False)
        assert 0 < report.A_est < report.B_est
        assert report.b_lower_probe <= report.B_est + 1e-6
        assert 1.0 < report.B_est < min(100.0, report.walnut_upper)
        assert report.condition == report.B_est / report.A_est
        assert report.ratio_A == report.A_est / (1.0 - 0.8 * 0.8)
        assert report.dual_lower is None
        row = report.as_row()
        assert row["ratio_A"] == report.ratio_A
        assert isinstance(row["notes"], str)

    def test_dual_skipped_for_other_prefactor(self):
        report = estimate_frame_bounds(0.8, N=20, c0=0.5)
        assert report.dual_lower is None
        assert report.envelope_lower is None
        assert "dual-skipped-c0" in report.notes

    @pytest.mark.slow
    def test_lower_bound_scaling(self):
        reports = [estimate_frame_bounds(a, N=300)
                   for a in (0.6, 0.7, 0.8, 0.9, 0.95)]
        ratios = [r.ratio_A for r in reports]
        assert max(ratios) / min(ratios) <= 4.0
        A = [r.A_est for r in reports]
        assert all(x > y for x, y in zip(A, A[1:]))
        for r in reports:
            assert 1.0 - 1e-6 < r.B_est < 100.0 + 1e-6
            assert r.B_est <= r.walnut_upper + 1e-6
            assert r.b_lower_probe <= r.B_est + 1e-6
