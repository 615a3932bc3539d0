# -*- coding: utf-8 -*-
"""
Invariant suites run at small sizes by the 'selftest' subcommand.

Each suite raises ValidationError on the first broken invariant and
otherwise returns a short detail string.
"""

import logging
import math

import mpmath
import numpy as np

from fockbounds.bargmann import MonomialExpansion
from fockbounds.bargmann import bargmann_transform
from fockbounds.bargmann import monomial_table
from fockbounds.bargmann import sampling_sum
from fockbounds.extremal import annulus_contains_ring
from fockbounds.extremal import partition_annulus
from fockbounds.extremal import select_radius
from fockbounds.extremal import truncated_sigma_identity
from fockbounds.frame_bounds import G0_COEFF
from fockbounds.frame_bounds import build_gram
from fockbounds.frame_bounds import lambda_extremes
from fockbounds.phase_space import GAUSSIAN
from fockbounds.phase_space import HermiteBasis
from fockbounds.phase_space import LineQuadrature
from fockbounds.phase_space import SquareLattice
from fockbounds.phase_space import amalgam_norm
from fockbounds.phase_space import gabor_coefficients
from fockbounds.phase_space import theta_sum
from fockbounds.sigma import SigmaEvaluator
from fockbounds.sigma import sigma_logabs
from fockbounds.sigma import sigma_theta_logabs
from fockbounds.util.exceptions import EXIT_OK
from fockbounds.util.exceptions import EXIT_VALIDATION
from fockbounds.util.exceptions import FockBoundsError
from fockbounds.util.exceptions import ValidationError

# Module level logger.
logger = logging.getLogger(__name__)

SELFTEST_A = 0.8


def _require(condition, message, *args):
    if not condition:
        raise ValidationError(message % args)


def phase_space_suite(cfg):
    a = 0.75
    exact = float(mpmath.jtheta(3, 0, mpmath.exp(-mpmath.pi * a * a)))
    _require(abs(theta_sum(a) - exact) < 1e-12,
             "theta(%g)=%.15g, jtheta gives %.15g", a, theta_sum(a), exact)

    quad = LineQuadrature()
    table = HermiteBasis(12).table(quad.nodes)
    gram = quad.integrate(table[:, np.newaxis, :] * table[np.newaxis, :, :])
    deviation = float(np.max(np.abs(gram - np.eye(12))))
    _require(deviation < 1e-10, "Hermite functions off orthonormal by %.3e",
             deviation)

    norm = amalgam_norm(GAUSSIAN, GAUSSIAN.envelope)
    _require(abs(norm - 2.08643) < 1e-4, "||g0||_W = %.8g", norm)
    return "theta, Hermite orthonormality, amalgam norm"


def bargmann_suite(cfg):
    z = np.array([0.0, 0.3 - 0.2j, -0.7 + 0.5j, 1.1 + 0.4j])
    count = 8
    expected = monomial_table(count, z)
    for n in range(count):
        coeffs = np.zeros(n + 1)
        coeffs[n] = 1.0
        diff = float(np.max(np.abs(bargmann_transform(coeffs, z) - expected[n])))
        _require(diff < 1e-8, "B h_%d differs from e_%d by %.3e", n, n, diff)

    g0 = bargmann_transform(GAUSSIAN, np.array([0.0]))[0]
    _require(abs(g0 - G0_COEFF) < 1e-10,
             "B g0(0) = %r, expected 2^(-1/4)", g0)

    # Gabor coefficients against c0-weighted Fock samples.
    rng = np.random.default_rng(cfg.seed)
    lattice = SquareLattice(SELFTEST_A)
    rho = 7.0
    points = lattice.enumerate(rho)
    quad = LineQuadrature.for_radius(rho)
    trials = 2 if cfg.quick else 5
    for _ in range(trials):
        coeffs = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        gabor = float(np.sum(np.abs(gabor_coefficients(coeffs, GAUSSIAN,
                                                        points, quad)) ** 2))
        fock = sampling_sum(MonomialExpansion(coeffs), lattice, rho, cfg.c0,
                            tail_tol=None)
        _require(abs(gabor - fock) <= 1e-6 * gabor,
                 "Gabor sum %.12g vs sampling sum %.12g with c0=%g",
                 gabor, fock, cfg.c0)
    return "B h_n = e_n, B g0, equivalence identity at c0=%g" % cfg.c0


def frame_bounds_suite(cfg):
    N = 12 if cfg.quick else 24
    gram = build_gram(SELFTEST_A, N)
    A_est, B_est = lambda_extremes(gram, seed=cfg.seed)
    eig = np.linalg.eigvalsh(gram.entries)
    _require(abs(A_est - eig[0]) < 1e-8 and abs(B_est - eig[-1]) < 1e-8,
             "extremes (%.12g, %.12g) vs eigh (%.12g, %.12g)",
             A_est, B_est, eig[0], eig[-1])

    n = np.arange(N)
    off = (n[:, np.newaxis] - n[np.newaxis, :]) % 4 != 0
    leak = float(np.max(np.abs(gram.entries[off])))
    scale = float(np.max(np.abs(gram.entries)))
    _require(leak <= 1e-12 * scale, "Gram entries off the mod-4 pattern: %.3e",
             leak)
    diagonal = float(np.max(np.abs(np.diag(gram.entries).imag)))
    _require(diagonal == 0.0, "Gram diagonal has imaginary part %.3e", diagonal)
    return "power iteration vs eigh at N=%d, mod-4 sparsity" % N


def extremal_suite(cfg):
    sel = select_radius(0.99)
    _require(sel.R_lo < sel.R < sel.R_hi, "R=%g outside (%g, %g)",
             sel.R, sel.R_lo, sel.R_hi)
    _require(abs(math.pi * sel.b2 * sel.R ** 2 - sel.n_R) < 1e-9,
             "pi b^2 R^2 = %.12g is not n_R=%d",
             math.pi * sel.b2 * sel.R ** 2, sel.n_R)
    plain, weierstrass = truncated_sigma_identity(sel, 0.37 + 0.81j)
    _require(abs(plain - weierstrass) < 1e-9,
             "plain product %.15g vs Weierstrass form %.15g",
             plain, weierstrass)
    if cfg.quick:
        return "radius selection, truncated sigma identity"
    partition = partition_annulus(sel)
    _require(partition.count == sel.p_R, "%d sectors for p_R=%d",
             partition.count, sel.p_R)
    spread = float(np.max(np.abs(partition.areas * sel.b2 - 1.0)))
    _require(spread < 1e-8, "sector areas off b^-2 by %.3e", spread)
    _require(annulus_contains_ring(sel), "annulus does not hold the outer ring")
    return "radius selection, sigma identity, equal-area partition"


def sigma_suite(cfg):
    ev = SigmaEvaluator(1.0, 24.0)
    z = np.array([0.31 + 0.17j, -1.4 + 0.6j, 2.2 - 1.3j])
    values = sigma_logabs(ev, z)
    for point, value in zip(z, values):
        exact = sigma_theta_logabs(1.0, point)
        _require(abs(value - exact) < 1e-7,
                 "log|sigma(%r)| = %.12g, theta form %.12g",
                 point, value, exact)
    return "truncated product vs theta closed form"


SUITES = (
    ("phase_space", phase_space_suite),
    ("bargmann", bargmann_suite),
    ("frame_bounds", frame_bounds_suite),
    ("extremal", extremal_suite),
    ("sigma", sigma_suite),
)


def run_selftest(cfg):
    """
    Run every suite; quick mode shrinks sizes and skips the partition.

    :param cfg: RunConfig
    :return: (rows, exit_code)
    """
    rows = []
    exit_code = EXIT_OK
    for name, suite in SUITES:
        try:
            detail = suite(cfg)
            status = "pass"
        except FockBoundsError as err:
            if cfg.debug:
                raise
            logger.error("selftest %s failed: %s" % (name, err))
            detail = "%s: %s" % (type(err).__name__, err)
            status = "fail"
            exit_code = max(exit_code, EXIT_VALIDATION)
        logger.info("selftest %s: %s" % (name, status))
        rows.append({"suite": name, "status": status, "detail": detail})
    return rows, exit_code
