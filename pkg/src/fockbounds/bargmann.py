# -*- coding: utf-8 -*-
"""
Fock-space side: the Bargmann transform, Fock norms, Fock shifts, the
reproducing kernel, the comparison function Phi and lattice sampling sums.
"""

import logging
import math

import numpy as np
from numpy.polynomial import polynomial
from scipy.special import gammaincc

from fockbounds.phase_space import HermiteBasis
from fockbounds.phase_space import LineQuadrature
from fockbounds.util.exceptions import DivergenceError
from fockbounds.util.exceptions import ExtentTooSmall
from fockbounds.util.exceptions import RimNotNegligible
from fockbounds.util.exceptions import TailNotCertified
from fockbounds.util.exceptions import ValidationError
from fockbounds.util.exceptions import ZeroWindowCenter
from fockbounds.util.numerics import extended_sum
from fockbounds.util.numerics import gauss_legendre
from fockbounds.util.numerics import log_abs_product
from fockbounds.util.numerics import log_factorial
from fockbounds.util.numerics import log_product

# Module level logger.
logger = logging.getLogger(__name__)

# Prefactor forced by |<f, pi_z g0>|^2 = 2^(-1/2) e^(-pi|z|^2) |Bf(conj z)|^2.
C0_DERIVED = 2.0 ** -0.5
BARGMANN_SCALE = 2.0 ** 0.25
# Points per evaluation chunk in planar quadrature.
CHUNK_POINTS = 1 << 18


def monomial_table(count, z):
    """
    Values of e_0, ..., e_{count-1} at z in the log-magnitude domain.

    :param count: number of monomials
    :param z: complex evaluation points
    :return: complex array of shape (count,) + z.shape
    """
    z = np.asarray(z, dtype=complex)
    n = np.arange(count, dtype=float).reshape((count,) + (1,) * z.ndim)
    with np.errstate(divide="ignore", invalid="ignore"):
        logr = np.log(np.abs(z))
        logmag = (0.5 * n * (math.log(math.pi) + 2.0 * logr)
                  - 0.5 * log_factorial(n))
    if count:
        logmag[0] = 0.0
    return np.exp(logmag + 1j * n * np.angle(z))


def monomial_eval(n, z):
    return monomial_table(n + 1, z)[n]


class FockFunction(object):
    def __call__(self, z):
        raise NotImplementedError()

    def logabs(self, z):
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self(z)))


class MonomialExpansion(FockFunction):
    """
    F = sum_n c_n e_n with e_n(z) = (pi^n/n!)^(1/2) z^n.
    """

    def __init__(self, coeffs):
        self.coeffs = np.asarray(coeffs, dtype=complex)
        n = np.arange(len(self.coeffs))
        self.power_coeffs = self.coeffs * np.exp(
            0.5 * (n * math.log(math.pi) - log_factorial(n)))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def norm_sq(self):
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def __call__(self, z):
        return polynomial.polyval(np.asarray(z, dtype=complex),
                                  self.power_coeffs)


class ZeroBased(FockFunction):
    """
    F(z) = leading * z^k * prod_j (1 - z/zeta_j), evaluated through
    log-magnitudes so thousands of zeros neither overflow nor underflow.
    """

    def __init__(self, leading, zeros=(), origin_order=0):
        if leading == 0:
            raise ValidationError("Leading factor must be nonzero")
        zeros = np.asarray(zeros, dtype=complex).ravel()
        if np.any(zeros == 0):
            raise ValidationError("Zeros at the origin go in origin_order")
        self.leading = complex(leading)
        self.zeros = zeros
        self.origin_order = int(origin_order)
        self._scale_logs = np.log(np.abs(zeros))

    def logabs(self, z):
        z = np.asarray(z, dtype=complex)
        out = math.log(abs(self.leading)) + log_abs_product(
            z, self.zeros, self._scale_logs)
        if self.origin_order:
            with np.errstate(divide="ignore"):
                out = out + self.origin_order * np.log(np.abs(z))
        return out

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return self.leading * z ** self.origin_order * np.exp(
            log_product(z, self.zeros))


class PlanarQuadrature(object):
    """
    Polar product rule: composite Gauss-Legendre in r, trapezoidal in angle.

    Each radial panel of width dr carries panel_nodes Gauss nodes; the ring
    at radius r has max(min_angular, ceil(2 pi r / dr)) equispaced angles.
    """

    def __init__(self, outer_radius, dr=0.02, panel_nodes=3, min_angular=32):
        if not (outer_radius > 0 and dr > 0):
            raise ValidationError("Planar quadrature needs positive radius "
                                  "and step")
        panels = int(math.ceil(outer_radius / dr - 1e-9))
        self.outer_radius = outer_radius
        self.dr = outer_radius / panels
        knots, weights = gauss_legendre(0.0, self.dr, panel_nodes)
        starts = self.dr * np.arange(panels)
        self.radii = (starts[:, np.newaxis] + knots[np.newaxis, :]).ravel()
        self.radial_weights = np.tile(weights, panels)
        self.counts = np.maximum(
            min_angular,
            np.ceil(2.0 * math.pi * self.radii / self.dr)).astype(int)

    @property
    def size(self):
        return int(np.sum(self.counts))

    def total_weight(self):
        return float(np.sum(self.radial_weights * self.radii)) * 2.0 * math.pi

    def _chunks(self):
        start = 0
        while start < len(self.radii):
            stop = start
            points = 0
            while stop < len(self.radii) and (
                    points == 0 or points + self.counts[stop] <= CHUNK_POINTS):
                points += self.counts[stop]
                stop += 1
            yield start, stop
            start = stop

    def ring_points(self, start, stop):
        counts = self.counts[start:stop]
        ring = np.repeat(np.arange(start, stop), counts)
        offsets = np.concatenate(([0], np.cumsum(counts)[:-1]))
        j = np.arange(len(ring)) - np.repeat(offsets, counts)
        theta = 2.0 * math.pi * (j + 0.5) / self.counts[ring]
        z = self.radii[ring] * np.exp(1j * theta)
        w = (2.0 * math.pi * self.radii[ring] * self.radial_weights[ring]
             / self.counts[ring])
        return z, w, offsets

    def profile(self, integrand):
        """
        Per-ring integrals and means of a real integrand.

        :param integrand: vectorised function of complex points
        :return: RingProfile
        """
        totals = np.zeros(len(self.radii))
        means = np.zeros(len(self.radii))
        for start, stop in self._chunks():
            z, w, offsets = self.ring_points(start, stop)
            values = np.asarray(integrand(z), dtype=float)
            totals[start:stop] = np.add.reduceat(values * w, offsets)
            means[start:stop] = (np.add.reduceat(values, offsets)
                                 / self.counts[start:stop])
        return RingProfile(self.radii, totals, means)

    def integrate(self, integrand):
        """
        Integrate a real integrand over the disc |z| <= outer_radius.

        Rings are reduced independently and then summed in ring order.
        """
        return self.profile(integrand).total()


class RingProfile(object):
    def __init__(self, radii, totals, means):
        self.radii = radii
        self.totals = totals
        self.means = means

    def total(self, min_radius=None):
        totals = self.totals
        if min_radius is not None:
            totals = totals[self.radii > min_radius]
        return float(extended_sum(totals)) if len(totals) else 0.0

    def check_rim(self, rim_tol):
        means = self.means
        peak = float(np.max(means)) if len(means) else 0.0
        if peak <= 0:
            return
        if len(means) > 1 and means[-1] > means[-2] and means[-1] > rim_tol * peak:
            raise DivergenceError("Integrand still increasing at R_out=%g"
                                  % self.radii[-1])
        if means[-1] > rim_tol * peak:
            raise RimNotNegligible("Rim integrand %.3e exceeds %.1e of peak "
                                   "%.3e" % (means[-1], rim_tol, peak))


def weighted_density(F):
    """
    |F(z)|^2 exp(-pi|z|^2) as a vectorised function.
    """
    if isinstance(F, ZeroBased):
        return lambda z: np.exp(2.0 * F.logabs(z) - math.pi * np.abs(z) ** 2)
    return lambda z: np.abs(F(z)) ** 2 * np.exp(-math.pi * np.abs(z) ** 2)


def planar_norm_sq(F, quad, rim_tol=1e-16):
    """
    Fock norm of any evaluatable function by planar quadrature.
    """
    profile = quad.profile(weighted_density(F))
    profile.check_rim(rim_tol)
    return profile.total()


def fock_norm_sq(F, quad=None, rim_tol=1e-16):
    """
    ||F||_F^2 = int |F(z)|^2 exp(-pi|z|^2) dm(z).

    :param F: MonomialExpansion (exact coefficient norm) or any other
        FockFunction (planar quadrature)
    :param quad: PlanarQuadrature for the quadrature path
    :return: squared norm
    """
    if isinstance(F, MonomialExpansion):
        return F.norm_sq()
    if quad is None:
        raise ValidationError("Quadrature norm needs a PlanarQuadrature")
    return planar_norm_sq(F, quad, rim_tol)


def _sampled(f, t):
    if callable(f):
        return np.asarray(f(t))
    coeffs = np.asarray(f)
    return HermiteBasis(max(len(coeffs), 1)).synthesize(coeffs, t)


def bargmann_transform(f, z, quad=None):
    """
    Bf(z) = 2^(1/4) exp(-pi z^2/2) int f(t) exp(-pi t^2 + 2 pi t z) dt.

    :param f: Hermite coefficient vector or vectorised function of t
    :param z: complex point(s)
    :param quad: LineQuadrature
    :return: complex value(s) shaped like z
    """
    if quad is None:
        quad = LineQuadrature()
    z = np.asarray(z, dtype=complex)
    t = quad.nodes
    fvals = _sampled(f, t)
    flat = z.ravel()[:, np.newaxis]
    # Combined exponent keeps exp(2 pi t z) from overflowing on its own.
    kernel = np.exp(-math.pi * t * t + 2.0 * math.pi * t * flat
                    - 0.5 * math.pi * flat * flat)
    values = fvals[np.newaxis, :] * kernel
    edge = np.abs(values[:, 0]) + np.abs(values[:, -1])
    mass = quad.step * np.sum(np.abs(values), axis=1)
    if np.any(edge > quad.tol * np.maximum(mass, 1.0)):
        raise ExtentTooSmall("Bargmann integrand not negligible at extent "
                             "%g for some |Re z| up to %g"
                             % (quad.extent, np.max(np.abs(flat.real))))
    out = BARGMANN_SCALE * quad.integrate(values, check=False)
    return out.reshape(z.shape)


def bargmann_expansion(coeffs):
    """
    Bargmann transform of sum_n c_n h_n, which is sum_n c_n e_n.
    """
    return MonomialExpansion(coeffs)


def fock_shift(zeta, F, z):
    """
    (beta_zeta F)(z) = e^(i pi x xi) e^(-pi|zeta|^2/2) e^(pi zeta z) F(z - conj zeta).
    """
    z = np.asarray(z, dtype=complex)
    c = zeta.to_complex()
    phase = (1j * math.pi * zeta.x * zeta.xi - 0.5 * math.pi * abs(c) ** 2
             + math.pi * c * z)
    return np.exp(phase) * F(z - np.conj(c))


class ShiftedFock(FockFunction):
    def __init__(self, zeta, F):
        self.zeta = zeta
        self.F = F

    def __call__(self, z):
        return fock_shift(self.zeta, self.F, z)


def reproducing_eval(F, z):
    """
    <F, K_z>_F with K_z(w) = exp(pi conj(z) w), taken coefficient-wise.

    K_z has coefficients conj(e_n(z)) in the monomial basis.
    """
    kernel = np.conj(monomial_table(len(F.coeffs), z))
    return np.tensordot(F.coeffs, np.conj(kernel), axes=(0, 0))


def phi_test(a, w, z):
    """
    Phi_{a,w}(z) = exp(a conj(w) z^2 / w), comparable to exp(a|z|^2) near w.
    """
    if w == 0:
        raise ZeroWindowCenter("Phi is undefined for w = 0")
    z = np.asarray(z, dtype=complex)
    return np.exp(a * np.conj(w) * z * z / w)


def monomial_tail_bound(norm_sq, count, lattice, rho):
    """
    Certified bound for sum over |lambda| > rho of |F(lambda)|^2 e^(-pi|lambda|^2).

    By Cauchy-Schwarz |F(z)|^2 e^(-pi|z|^2) <= ||F||^2 Q(count, pi|z|^2)
    with Q the regularised upper incomplete gamma function. Lattice points
    beyond rho own cells outside rho - a/sqrt(2), so the lattice sum is
    dominated by the area integral of that bound divided by a^2, which is
    (count Q(count+1, x) - x Q(count, x)) / a^2 at x = pi r0^2.
    """
    r0 = max(rho - lattice.a / math.sqrt(2.0), 0.0)
    x = math.pi * r0 * r0
    if x < count:
        # Bound is only monotone past the peak of the weight.
        return float("inf")
    tail = count * gammaincc(count + 1, x) - x * gammaincc(count, x)
    return norm_sq * max(tail, 0.0) / lattice.size


def sampling_sum(F, lat, rho, c0=C0_DERIVED, tail_tol=1e-10):
    """
    c0 * sum over |lambda| <= rho of |F(lambda)|^2 exp(-pi|lambda|^2).

    :param F: FockFunction
    :param lat: SquareLattice
    :param rho: lattice radius
    :param c0: prefactor
    :param tail_tol: relative tolerance for the certified tail, None to skip
    :return: truncated sampling sum
    """
    points = lat.enumerate(rho)
    weights = weighted_density(F)(points)
    total = c0 * float(extended_sum(weights)) if len(points) else 0.0
    if tail_tol is None:
        return total
    if isinstance(F, MonomialExpansion):
        tail = c0 * monomial_tail_bound(F.norm_sq(), len(F.coeffs), lat, rho)
    else:
        shell = lat.enumerate(rho + 2.0 * lat.a)
        shell = shell[np.abs(shell) > rho]
        tail = c0 * float(np.sum(weighted_density(F)(shell)))
    if tail > tail_tol * max(total, 1.0):
        raise TailNotCertified("Sampling tail %.3e beyond rho=%g exceeds %.1e"
                               % (tail, rho, tail_tol))
    logger.debug("sampling sum %.12g over %d points, tail %.3e"
                 % (total, len(points), tail))
    return total


def gabor_from_fock(F, zeta):
    """
    |<f, pi_zeta g0>|^2 = 2^(-1/2) exp(-pi|zeta|^2) |Bf(conj zeta)|^2.
    """
    c = zeta.to_complex()
    value = complex(np.asarray(F(np.conj(c))))
    return C0_DERIVED * math.exp(-math.pi * abs(c) ** 2) * abs(value) ** 2
