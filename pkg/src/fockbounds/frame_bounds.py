# -*- coding: utf-8 -*-
"""
Frame-bound estimates for the Gaussian Gabor system over a*Z^2.

A and B are read off as extremal eigenvalues of the truncated sampling Gram
matrix in the Fock monomial basis; upper and lower bounds come from the
Walnut amalgam estimate, the lower estimate for B at f = g0 and the canonical dual window.
"""

import logging
import math
from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import field

import numpy as np
from scipy.ndimage import maximum_filter1d
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import cg

from fockbounds.bargmann import C0_DERIVED
from fockbounds.phase_space import GAUSSIAN
from fockbounds.phase_space import HermiteBasis
from fockbounds.phase_space import LineQuadrature
from fockbounds.phase_space import SquareLattice
from fockbounds.phase_space import amalgam_norm
from fockbounds.phase_space import gabor_coefficients
from fockbounds.phase_space import gaussian_envelope_bound
from fockbounds.phase_space import theta_sum
from fockbounds.util.exceptions import NoConvergence
from fockbounds.util.exceptions import RadiusTooSmall
from fockbounds.util.exceptions import RegimeError
from fockbounds.util.exceptions import ValidationError
from fockbounds.util.numerics import log_factorial

# Module level logger.
logger = logging.getLogger(__name__)

G0_COEFF = 2.0 ** -0.25
DEFAULT_N = 300
# Relative change in A_est that flags an unstable truncation.
INSTABILITY = 0.1
# Entries below this fraction of max|G| do not couple indices.
BLOCK_TOL = 1e-12
# Krylov block size and spacing of the Rayleigh-Ritz steps in power_iteration.
KRYLOV_DIM = 8
REFINE_EVERY = 20


def default_radius(N):
    return math.sqrt(N / math.pi) + 3.0


@dataclass(frozen=True, eq=False)
class GramMatrix:
    a: float
    N: int
    rho: float
    c0: float
    entries: np.ndarray
    points: int = 0

    def quadratic_form(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=complex)
        return float(np.real(np.vdot(coeffs, self.entries @ coeffs)))

    def rayleigh_quotient(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=complex)
        return self.quadratic_form(coeffs) / float(np.vdot(coeffs, coeffs).real)


def build_gram(a, N, rho=None, c0=C0_DERIVED, check_radius=True):
    """
    G_nm = c0 sum_{|lambda| <= rho} e_n(lambda) conj(e_m(lambda)) e^(-pi|lambda|^2).

    Every term is formed from its log-magnitude and phase, and the lattice
    points enter in order of increasing |lambda|.

    :param a: lattice spacing
    :param N: number of monomials e_0 .. e_{N-1}
    :param rho: lattice radius, defaults to sqrt(N/pi) + 3
    :param c0: sampling prefactor
    :param check_radius: reject rho < sqrt(N/pi) + 3
    :return: GramMatrix
    """
    if N < 1:
        raise ValidationError("Gram dimension must be >= 1, got %d" % N)
    if rho is None:
        rho = default_radius(N)
    if check_radius and rho < default_radius(N) - 1e-12:
        raise RadiusTooSmall("rho=%g is below sqrt(N/pi)+3=%g for N=%d"
                             % (rho, default_radius(N), N))
    points = SquareLattice(a).enumerate(rho)
    r2 = np.abs(points) ** 2
    n = np.arange(N, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        logmag = (0.5 * n[np.newaxis, :] * np.log(math.pi * r2)[:, np.newaxis]
                  - 0.5 * log_factorial(n)[np.newaxis, :]
                  - 0.5 * math.pi * r2[:, np.newaxis])
    logmag[:, 0] = -0.5 * math.pi * r2
    values = np.exp(logmag + 1j * n[np.newaxis, :] * np.angle(points)[:, np.newaxis])
    entries = c0 * (values.T @ np.conj(values))
    entries = 0.5 * (entries + entries.conj().T)
    logger.debug("Gram a=%g N=%d rho=%g over %d lattice points"
                 % (a, N, rho, len(points)))
    return GramMatrix(a, N, rho, c0, entries, len(points))


def coupling_blocks(matrix, tol=BLOCK_TOL):
    """
    Index sets of the connected components of the coupling graph of matrix.
    """
    mags = np.abs(matrix)
    scale = float(np.max(mags)) if mags.size else 0.0
    if scale == 0:
        return [np.arange(matrix.shape[0])]
    count, labels = connected_components(csr_matrix(mags > tol * scale),
                                         directed=False)
    return [np.flatnonzero(labels == k) for k in range(count)]


def ritz_refine(matrix, v, size=KRYLOV_DIM):
    """
    Rayleigh-Ritz step on the Krylov space of v with dimension size.

    :return: (top Ritz value, Ritz vector, residual norm, gap to the next
              Ritz value)
    """
    basis = [v / np.linalg.norm(v)]
    images = []
    for _ in range(min(size, matrix.shape[0])):
        w = matrix @ basis[-1]
        images.append(w)
        if len(basis) == min(size, matrix.shape[0]):
            break
        w = w.copy()
        for _ in range(2):
            for q in basis:
                w -= np.vdot(q, w) * q
        nrm = np.linalg.norm(w)
        if nrm <= 1e-13 * max(np.linalg.norm(images[-1]), 1e-300):
            break
        basis.append(w / nrm)
    Q = np.column_stack(basis)
    MQ = np.column_stack(images)
    H = Q.conj().T @ MQ
    values, vectors = np.linalg.eigh(0.5 * (H + H.conj().T))
    y = vectors[:, -1]
    x = Q @ y
    residual = float(np.linalg.norm(MQ @ y - values[-1] * x))
    gap = float(values[-1] - values[-2]) if len(values) > 1 else float("inf")
    return float(values[-1]), x / np.linalg.norm(x), residual, gap


def power_iteration(matrix, rng, tol=1e-10, max_iter=200000, residual_tol=1e-7,
                    scale=None, refine_every=REFINE_EVERY):
    """
    Dominant eigenvalue of a Hermitian positive semidefinite matrix.

    Every refine_every steps the iterate is replaced by the top Ritz vector
    of its Krylov block, which separates eigenvalues clustered at the top.
    Stops once the Ritz value moves by less than tol*scale and either the
    residual ||Mv - lambda v|| is at most residual_tol*scale or the
    Kato-Temple bound residual^2/gap is at most tol*scale.

    :return: (eigenvalue, residual, iterations)
    """
    size = matrix.shape[0]
    v = rng.standard_normal(size).astype(matrix.dtype)
    v /= np.linalg.norm(v)
    lam = None
    residual = float("inf")
    for iteration in range(1, max_iter + 1):
        w = matrix @ v
        nrm = np.linalg.norm(w)
        if nrm == 0:
            return 0.0, 0.0, iteration
        v = w / nrm
        if (iteration - 1) % refine_every:
            continue
        lam_new, v, residual, gap = ritz_refine(matrix, v)
        ref = scale if scale is not None else abs(lam_new)
        if lam is not None and abs(lam_new - lam) <= tol * ref:
            if residual <= residual_tol * ref:
                return lam_new, residual, iteration
            if gap > 0 and residual * residual / gap <= tol * ref:
                return lam_new, residual, iteration
        lam = lam_new
    raise NoConvergence("Power iteration did not converge in %d steps, "
                        "residual %.3e" % (max_iter, residual),
                        last_residual=residual, iterations=max_iter)


def lambda_extremes(G, tol=1e-10, max_iter=200000, seed=0, residual_tol=1e-7):
    """
    Smallest and largest eigenvalue of a Hermitian PSD matrix.

    The matrix is split into its decoupled blocks (for square lattices these
    are the residue classes of the index mod 4). On each block lambda_max
    comes from power iteration and lambda_min from power iteration on
    lambda_max*I - G.

    :param G: GramMatrix or square array
    :return: (lambda_min, lambda_max)
    """
    matrix = G.entries if isinstance(G, GramMatrix) else np.asarray(G)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValidationError("Eigenvalue extremes need a square matrix")
    rng = np.random.default_rng(seed)
    blocks = [matrix[np.ix_(idx, idx)] for idx in coupling_blocks(matrix)]

    top = []
    for block in blocks:
        if block.shape[0] == 1:
            top.append(float(np.real(block[0, 0])))
        else:
            top.append(power_iteration(block, rng, tol, max_iter,
                                       residual_tol)[0])
    lam_max = max(top)

    bottom = []
    for block in blocks:
        if block.shape[0] == 1:
            bottom.append(float(np.real(block[0, 0])))
            continue
        shifted = lam_max * np.eye(block.shape[0], dtype=block.dtype) - block
        mu, _, iterations = power_iteration(shifted, rng, tol, max_iter,
                                            residual_tol, scale=lam_max)
        logger.debug("block %d: lambda_min in %d steps"
                     % (block.shape[0], iterations))
        bottom.append(lam_max - mu)
    return min(bottom), lam_max


def walnut_upper_bound(w, a, sup_grid=256, k_max=12):
    """
    (1 + 1/a)^2 ||w||_W^2, an upper frame bound for any window w.
    """
    norm = amalgam_norm(w, w.envelope, sup_grid, k_max)
    return (1.0 + 1.0 / a) ** 2 * norm * norm


def b_lower_probe(a):
    """
    sum_lambda |<g0, pi_lambda g0>|^2 / ||g0||^2 = 2^(-1/2) theta(a)^2.
    """
    return C0_DERIVED * theta_sum(a) ** 2


@dataclass(frozen=True, eq=False)
class DualWindow:
    a: float
    coeffs: np.ndarray
    kappa_fit: float
    fit_offset: float
    w_norm: float
    dual_lower: float
    envelope_lower: float = None
    residual: float = 0.0

    @property
    def kappa_ok(self):
        return self.kappa_fit > 0

    def __call__(self, t):
        return HermiteBasis(len(self.coeffs)).synthesize(self.coeffs, t)

    def envelope(self, t):
        t = np.asarray(t, dtype=float)
        if not self.kappa_ok:
            return np.zeros_like(t)
        return np.exp(self.fit_offset - math.pi * self.kappa_fit * t * t)


def fit_decay(gamma, t_min=1.0, t_max=4.0, step=1.0 / 64):
    """
    Least-squares fit of log E(t) = c - pi kappa t^2 on [t_min, t_max],
    where E is the running maximum of |gamma| over unit windows.

    :return: (kappa, c)
    """
    width = int(round(1.0 / step))
    t = np.arange(t_min - 0.5, t_max + 0.5 + step / 2, step)
    envelope = maximum_filter1d(np.abs(gamma(t)), size=width + 1)
    inside = (t >= t_min - 1e-12) & (t <= t_max + 1e-12)
    t, envelope = t[inside], envelope[inside]
    design = np.column_stack((np.ones_like(t), -math.pi * t * t))
    (offset, kappa), _, _, _ = np.linalg.lstsq(design, np.log(envelope),
                                               rcond=None)
    return float(kappa), float(offset)


def canonical_dual(a, N=DEFAULT_N, rho=None, gram=None, sup_grid=256, k_max=12,
                   rtol=1e-11):
    """
    Canonical dual gamma = S^-1 g0 in the Hermite basis.

    With c0 = 2^(-1/2) the Gram matrix is the frame operator in the Hermite
    basis, and g0 = 2^(-1/4) h_0.

    :param a: lattice spacing
    :param N: Hermite dimension
    :param rho: lattice radius
    :param gram: prebuilt GramMatrix with c0 = 2^(-1/2)
    :return: DualWindow
    """
    if gram is None:
        gram = build_gram(a, N, rho, C0_DERIVED)
    elif abs(gram.c0 - C0_DERIVED) > 1e-15:
        raise ValidationError("Canonical dual needs the frame-operator "
                              "prefactor 2^(-1/2), got %r" % gram.c0)
    size = gram.N
    rhs = np.zeros(size, dtype=complex)
    rhs[0] = G0_COEFF
    coeffs, info = cg(gram.entries, rhs, rtol=rtol, maxiter=10 * size)
    residual = float(np.linalg.norm(gram.entries @ coeffs - rhs))
    if info != 0 or residual > 1e-10:
        raise NoConvergence("Dual solve stopped with info=%d, residual %.3e"
                            % (info, residual), last_residual=residual,
                            iterations=info if info > 0 else None)

    def gamma(t):
        return HermiteBasis(size).synthesize(coeffs, t)

    kappa, offset = fit_decay(gamma)
    if kappa > 0:
        envelope_lower = 1.0 / ((1.0 + 1.0 / a) ** 2
                                * gaussian_envelope_bound(kappa) ** 2)
    else:
        logger.warning("Dual decay fit failed at a=%g: kappa=%g" % (a, kappa))
        envelope_lower = None
    draft = DualWindow(a, coeffs, kappa, offset, 0.0, 0.0, envelope_lower,
                       residual)
    w_norm = amalgam_norm(gamma, draft.envelope, sup_grid, k_max)
    dual_lower = 1.0 / ((1.0 + 1.0 / a) ** 2 * w_norm * w_norm)
    logger.info("dual a=%g: kappa=%.4g ||gamma||_W=%.6g" % (a, kappa, w_norm))
    return DualWindow(a, coeffs, kappa, offset, w_norm, dual_lower,
                      envelope_lower, residual)


def reconstruction_error(dual, a, radius=6.0, quad=None):
    """
    L^2 distance between sum_lambda <g0, pi_lambda g0> pi_lambda gamma and g0.
    """
    points = SquareLattice(a).enumerate(radius)
    if quad is None:
        quad = LineQuadrature.for_radius(radius)
    weights = gabor_coefficients([G0_COEFF], GAUSSIAN, points, quad)
    t = quad.nodes
    rebuilt = np.zeros(len(t), dtype=complex)
    for point, weight in zip(points, weights):
        rebuilt += (weight * np.exp(2j * math.pi * point.imag * t)
                    * dual(t - point.real))
    diff = rebuilt - GAUSSIAN(t)
    return math.sqrt(quad.step * float(np.sum(np.abs(diff) ** 2)))


@dataclass(frozen=True)
class BoundsReport:
    a: float
    N: int
    rho: float
    c0: float
    A_est: float
    B_est: float
    walnut_upper: float
    b_lower_probe: float
    dual_lower: float = None
    envelope_lower: float = None
    kappa_fit: float = None
    A_half_N: float = None
    A_rho_minus_1: float = None
    instability: bool = False
    notes: tuple = field(default_factory=tuple)

    @property
    def ratio_A(self):
        return self.A_est / (1.0 - self.a * self.a)

    @property
    def condition(self):
        return self.B_est / self.A_est if self.A_est > 0 else float("inf")

    def as_row(self):
        row = asdict(self)
        row["ratio_A"] = self.ratio_A
        row["condition"] = self.condition
        row["notes"] = ";".join(self.notes)
        return row


def relative_change(value, reference):
    if reference == 0:
        return float("inf") if value != 0 else 0.0
    return abs(value - reference) / abs(reference)


def estimate_frame_bounds(a, N=DEFAULT_N, rho=None, c0=C0_DERIVED, seed=0,
                          tol=1e-10, max_iter=200000, with_dual=True):
    """
    Frame bounds A(a), B(a) from the truncated Gram matrix, with the Walnut
    upper bound, the lower estimate for B and the dual-window lower bound.

    :param a: lattice spacing in (1/2, 1)
    :param N: Gram dimension
    :param rho: lattice radius, defaults to sqrt(N/pi) + 3
    :param c0: sampling prefactor
    :return: BoundsReport
    """
    if not 0.5 < a < 1.0:
        raise RegimeError("Frame bounds are estimated for 1/2 < a < 1, got %g"
                          % a)
    if rho is None:
        rho = default_radius(N)
    gram = build_gram(a, N, rho, c0)
    A_est, B_est = lambda_extremes(gram, tol, max_iter, seed)
    walnut = walnut_upper_bound(GAUSSIAN, a)

    A_half = lambda_extremes(build_gram(a, max(N // 2, 1), rho, c0),
                             tol, max_iter, seed)[0]
    A_shrunk = lambda_extremes(build_gram(a, N, rho - 1.0, c0,
                                          check_radius=False),
                               tol, max_iter, seed)[0]
    instability = (relative_change(A_half, A_est) > INSTABILITY
                   or relative_change(A_shrunk, A_est) > INSTABILITY)
    notes = []
    if instability:
        notes.append("unstable-truncation")
        logger.warning("a=%g: A_est=%.6g moves to %.6g (N/2) and %.6g (rho-1)"
                       % (a, A_est, A_half, A_shrunk))

    dual_lower = envelope_lower = kappa = None
    if with_dual and c0 != C0_DERIVED:
        # The dual bound lives on the 2^(-1/2) normalisation of A_est.
        notes.append("dual-skipped-c0")
        logger.info("a=%g: no dual bound for c0=%g" % (a, c0))
    elif with_dual and A_est > 0:
        dual = canonical_dual(a, N, rho, gram=gram)
        dual_lower = dual.dual_lower
        envelope_lower = dual.envelope_lower
        kappa = dual.kappa_fit
        if not dual.kappa_ok:
            notes.append("negative-kappa")

    logger.info("a=%g N=%d: A=%.6g B=%.6g" % (a, N, A_est, B_est))
    return BoundsReport(a, N, rho, c0, A_est, B_est, walnut, b_lower_probe(a),
                        dual_lower, envelope_lower, kappa, A_half, A_shrunk,
                        instability, tuple(notes))
