# -*- coding: utf-8 -*-
"""
Weierstrass sigma function of the square lattice a*Z^2.

For square lattices log|sigma(z)| - (pi/2) a^-2 |z|^2 stays bounded away
from the lattice points; the evaluators here measure that band.
"""

import logging
import math

import mpmath
import numpy as np

from fockbounds.phase_space import SquareLattice
from fockbounds.util.exceptions import OutOfRegime
from fockbounds.util.exceptions import ValidationError
from fockbounds.util.numerics import log_abs_product

# Module level logger.
logger = logging.getLogger(__name__)

# Eisenstein sum G_4 of the Gaussian integers, Gamma(1/4)^8 / (960 pi^2).
G4_UNIT = float(mpmath.gamma(0.25) ** 8 / (960 * mpmath.pi ** 2))
NOME = math.exp(-math.pi)


def default_sigma_radius(test_radius):
    return 2.0 * test_radius + 20.0


class SigmaEvaluator(object):
    """
    Truncated Weierstrass product over the lattice points 0 < |lambda| <= rho.

    With eisenstein_correction the remainder of the product beyond rho is
    added back through its leading terms -Re(z^4 T_4/4 + z^8 T_8/8), where
    T_k = G_k - sum_{0<|lambda|<=rho} lambda^-k; the disc is invariant under
    multiplication by i, so the remainders for k not divisible by 4 vanish.
    """

    def __init__(self, a, rho_sigma, eisenstein_correction=True):
        if not rho_sigma > a:
            raise ValidationError("rho_sigma=%g must exceed a=%g"
                                  % (rho_sigma, a))
        self.lattice = SquareLattice(a)
        self.a = a
        self.rho_sigma = rho_sigma
        self.eisenstein_correction = eisenstein_correction
        points = self.lattice.enumerate(rho_sigma)
        self.zeros = points[points != 0]
        self._scale_logs = np.log(np.abs(self.zeros))
        self.s1 = complex(np.sum(1.0 / self.zeros))
        self.s2 = complex(np.sum(1.0 / self.zeros ** 2))
        g4 = G4_UNIT / a ** 4
        g8 = 3.0 * g4 * g4 / 7.0
        self.t4 = g4 - complex(np.sum(self.zeros ** -4.0))
        self.t8 = g8 - complex(np.sum(self.zeros ** -8.0))
        logger.debug("sigma a=%g rho=%g: %d zeros, T4=%.3e"
                     % (a, rho_sigma, len(self.zeros), abs(self.t4)))

    def tail(self, z):
        z = np.asarray(z, dtype=complex)
        return -np.real(z ** 4 * self.t4 / 4.0 + z ** 8 * self.t8 / 8.0)

    def logabs(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore"):
            out = np.log(np.abs(z)) + log_abs_product(z, self.zeros,
                                                      self._scale_logs)
        out = out + np.real(z * self.s1 + 0.5 * z * z * self.s2)
        if self.eisenstein_correction:
            out = out + self.tail(z)
        return out


def sigma_logabs(ev, z):
    """
    log|sigma(z)| from the truncated product.

    :param ev: SigmaEvaluator
    :param z: complex point(s) with |z| <= rho_sigma/2
    :return: real value(s), -inf at lattice points
    """
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > 0.5 * ev.rho_sigma):
        raise OutOfRegime("|z| up to %g exceeds rho_sigma/2 = %g"
                          % (np.max(np.abs(z)), 0.5 * ev.rho_sigma))
    return ev.logabs(z)


def sigma_theta_logabs(a, z):
    """
    log|sigma(z)| in closed form through Jacobi's theta_1:

        sigma(z) = (a/pi) exp(pi z^2 / (2 a^2)) theta_1(pi z/a, q) / theta_1'(0, q)

    with nome q = exp(-pi) for the square lattice.
    """
    z = complex(z)
    if z == 0:
        return float("-inf")
    q = mpmath.mpf(NOME)
    v = mpmath.pi * mpmath.mpc(z.real, z.imag) / a
    numerator = mpmath.jtheta(1, v, q)
    if numerator == 0:
        return float("-inf")
    derivative = mpmath.jtheta(1, 0, q, 1)
    value = (mpmath.log(a / mpmath.pi) + math.pi * (z * z).real / (2.0 * a * a)
             + mpmath.log(abs(numerator)) - mpmath.log(abs(derivative)))
    return float(value)


def _grid(test_radius, step):
    axis = np.arange(-test_radius, test_radius + step / 2, step)
    x, y = np.meshgrid(axis, axis, indexing="ij")
    z = (x + 1j * y).ravel()
    return z[np.abs(z) <= test_radius]


def lattice_distance(a, z):
    z = np.asarray(z, dtype=complex)
    nearest = a * (np.rint(z.real / a) + 1j * np.rint(z.imag / a))
    return np.abs(z - nearest)


def growth_check(ev, eps=0.1, test_radius=4.0, step=0.05):
    """
    Extremes of log|sigma(z)| - (pi/2) a^-2 |z|^2 over grid points with
    |z| <= test_radius and distance at least eps from the lattice.

    :return: (sup_dev, inf_dev)
    """
    if test_radius > 0.5 * ev.rho_sigma:
        raise OutOfRegime("test_radius=%g exceeds rho_sigma/2 = %g"
                          % (test_radius, 0.5 * ev.rho_sigma))
    z = _grid(test_radius, step)
    z = z[lattice_distance(ev.a, z) >= eps]
    dev = sigma_logabs(ev, z) - 0.5 * math.pi * np.abs(z) ** 2 / ev.a ** 2
    return float(np.max(dev)), float(np.min(dev))


def quasi_period_deviation(ev, z, generator):
    """
    log|sigma(z+g)| - log|sigma(z)| - (pi/2) a^-2 (|z+g|^2 - |z|^2)
    for a lattice vector g.
    """
    z = complex(z)
    w = z + complex(generator)
    values = sigma_logabs(ev, np.array([z, w]))
    expected = 0.5 * math.pi * (abs(w) ** 2 - abs(z) ** 2) / ev.a ** 2
    return float(values[1] - values[0] - expected)


def sigma_check_row(a, eps=0.1, test_radius=4.0, rho_sigma=None, step=0.05):
    """
    Growth band at rho_sigma and at 2 rho_sigma with the drift between them.
    """
    if rho_sigma is None:
        rho_sigma = default_sigma_radius(test_radius)
    sup_dev, inf_dev = growth_check(SigmaEvaluator(a, rho_sigma), eps,
                                    test_radius, step)
    sup_2, inf_2 = growth_check(SigmaEvaluator(a, 2.0 * rho_sigma), eps,
                                test_radius, step)
    drift = max(abs(sup_2 - sup_dev), abs(inf_2 - inf_dev))
    logger.info("sigma a=%g: band [%.6g, %.6g], drift %.3e"
                % (a, inf_dev, sup_dev, drift))
    return {
        "a": a, "eps": eps, "test_radius": test_radius,
        "rho_sigma": rho_sigma, "sup_dev": sup_dev, "inf_dev": inf_dev,
        "sup_dev_doubled": sup_2, "inf_dev_doubled": inf_2,
        "drift": drift,
    }
