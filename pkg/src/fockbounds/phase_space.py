# -*- coding: utf-8 -*-
"""
Real-line side: phase-space points, square lattices, windows, the Hermite
basis, line quadrature and Wiener amalgam norms.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from fockbounds.util.exceptions import EnvelopeMissing
from fockbounds.util.exceptions import ExtentTooSmall
from fockbounds.util.exceptions import ValidationError
from fockbounds.util.numerics import extended_sum

# Module level logger.
logger = logging.getLogger(__name__)

SQRT2PI = math.sqrt(2.0 * math.pi)
H0_SCALE = 2.0 ** 0.25


@dataclass(frozen=True)
class PhasePoint:
    """
    A point (x, xi) of the time-frequency plane, identified with x + i*xi.
    """
    x: float
    xi: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.xi)):
            raise ValidationError("Phase point must be finite, got (%r, %r)"
                                  % (self.x, self.xi))

    @classmethod
    def from_complex(cls, z):
        z = complex(z)
        return cls(z.real, z.imag)

    def to_complex(self):
        return complex(self.x, self.xi)


@dataclass(frozen=True)
class SquareLattice:
    """
    The lattice a*Z^2, identified with the points a(m + in).
    """
    a: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValidationError("Lattice spacing must be positive, got %r"
                                  % self.a)

    @property
    def size(self):
        return self.a * self.a

    @property
    def density(self):
        return 1.0 / self.size

    def indices(self, rho):
        """
        Integer pairs (m, n) with |a(m + in)| <= rho.

        Ordered by increasing m^2 + n^2, then lexicographically in (m, n).

        :param rho: enumeration radius
        :return: (m, n) integer arrays
        """
        if rho < 0:
            return np.zeros(0, dtype=int), np.zeros(0, dtype=int)
        k = int(math.floor(rho / self.a)) + 1
        axis = np.arange(-k, k + 1)
        m, n = np.meshgrid(axis, axis, indexing="ij")
        m = m.ravel()
        n = n.ravel()
        r2 = m * m + n * n
        keep = self.a * self.a * r2 <= rho * rho
        m, n, r2 = m[keep], n[keep], r2[keep]
        order = np.lexsort((n, m, r2))
        return m[order], n[order]

    def enumerate(self, rho):
        m, n = self.indices(rho)
        return self.a * (m + 1j * n)


@dataclass(frozen=True)
class Window:
    """
    Gaussian window exp(-pi t^2) or the sech window 1/cosh(pi gamma t).
    """
    kind: str = "gaussian"
    gamma: float = 1.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "sech"):
            raise ValidationError("Unknown window '%s'" % self.kind)
        if self.kind == "sech" and not self.gamma > 0:
            raise ValidationError("Sech window needs gamma > 0, got %r"
                                  % self.gamma)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "gaussian":
            return np.exp(-math.pi * t * t)
        return 1.0 / np.cosh(math.pi * self.gamma * t)

    def envelope(self, t):
        """
        A nonincreasing majorant of |w| in |t|.
        """
        t = np.abs(np.asarray(t, dtype=float))
        if self.kind == "gaussian":
            return np.exp(-math.pi * t * t)
        return 2.0 * np.exp(-math.pi * self.gamma * t)


GAUSSIAN = Window()


def sech_window(gamma):
    return Window("sech", gamma)


def window_eval(w, t):
    return w(t)


def window_envelope(w):
    return w.envelope


def hermite_table(count, t):
    """
    Values of h_0, ..., h_{count-1} at t.

    Normalised so that every h_n has unit L^2 norm and its Bargmann
    transform is the Fock monomial (pi^n/n!)^(1/2) z^n:

        h_0(t) = 2^(1/4) exp(-pi t^2)
        h_{n+1} = sqrt(2/(n+1)) x h_n - sqrt(n/(n+1)) h_{n-1},  x = sqrt(2 pi) t

    :param count: number of functions
    :param t: evaluation points
    :return: array of shape (count,) + t.shape
    """
    t = np.asarray(t, dtype=float)
    table = np.zeros((count,) + t.shape)
    if count == 0:
        return table
    x = SQRT2PI * t
    table[0] = H0_SCALE * np.exp(-math.pi * t * t)
    if count > 1:
        table[1] = math.sqrt(2.0) * x * table[0]
    for n in range(1, count - 1):
        table[n + 1] = (math.sqrt(2.0 / (n + 1)) * x * table[n]
                        - math.sqrt(n / (n + 1.0)) * table[n - 1])
    return table


def hermite_eval(n, t):
    if n < 0:
        raise ValidationError("Hermite index must be >= 0, got %d" % n)
    return hermite_table(n + 1, t)[n]


class HermiteBasis(object):
    def __init__(self, count):
        if count < 1:
            raise ValidationError("Hermite basis needs count >= 1, got %d"
                                  % count)
        self.count = count

    def table(self, t):
        return hermite_table(self.count, t)

    def synthesize(self, coeffs, t):
        """
        Evaluate sum_n c_n h_n(t).

        :param coeffs: coefficient vector, length <= count
        :param t: evaluation points
        :return: values at t (complex if coeffs are)
        """
        coeffs = np.asarray(coeffs)
        table = hermite_table(len(coeffs), t)
        return np.tensordot(coeffs, table, axes=(0, 0))

    def function(self, coeffs):
        coeffs = np.array(coeffs)
        return lambda t: self.synthesize(coeffs, t)


class LineQuadrature(object):
    """
    Trapezoidal rule on the nodes {kh : |kh| <= T}.

    For integrands dominated by exp(-pi t^2) times a polynomial the
    uniform trapezoidal rule is spectrally accurate, so the error is
    governed by the truncation at T.
    """

    def __init__(self, step=1.0 / 64, extent=8.0, tol=1e-12):
        if not (step > 0 and extent > 0):
            raise ValidationError("Quadrature needs step, extent > 0")
        self.step = step
        self.extent = extent
        self.tol = tol
        k = int(math.floor(extent / step + 1e-9))
        self.nodes = step * np.arange(-k, k + 1)

    @classmethod
    def for_radius(cls, rho, step=1.0 / 64):
        return cls(step, max(8.0, rho + 6.0))

    def tail_estimate(self, values):
        """
        Bound for the mass outside [-T, T] of an integrand with Gaussian
        tails, from its edge values.
        """
        edge = np.abs(values[..., 0]) + np.abs(values[..., -1])
        return edge / (2.0 * math.pi * self.extent)

    def integrate(self, values, check=True):
        values = np.asarray(values)
        if check:
            tail = np.max(self.tail_estimate(values))
            if tail > self.tol:
                raise ExtentTooSmall(
                    "Estimated tail %.3e exceeds %.1e at extent %g"
                    % (tail, self.tol, self.extent))
        return self.step * np.sum(values, axis=-1)


def tf_shift(f, zeta, t):
    """
    Time-frequency shift: exp(2 pi i xi t) f(t - x).
    """
    t = np.asarray(t, dtype=float)
    return np.exp(2j * math.pi * zeta.xi * t) * f(t - zeta.x)


def gabor_coefficients(f, w, zetas, quad):
    """
    <f, pi_zeta w> for many phase points at once.

    :param f: Hermite coefficient vector of f
    :param w: Window
    :param zetas: complex array (x + i xi)
    :param quad: LineQuadrature
    :return: complex array shaped like zetas
    """
    zetas = np.asarray(zetas, dtype=complex)
    t = quad.nodes
    fvals = HermiteBasis(max(len(f), 1)).synthesize(np.asarray(f), t)
    flat = zetas.ravel()
    shifted = (np.exp(-2j * math.pi * flat.imag[:, np.newaxis] * t)
               * w(t[np.newaxis, :] - flat.real[:, np.newaxis]))
    return quad.integrate(fvals * shifted).reshape(zetas.shape)


def gabor_coefficient(f, w, zeta, quad):
    return complex(gabor_coefficients(f, w, [zeta.to_complex()], quad)[0])


def _sup_on_cell(f, k, grid):
    vals = np.abs(f(grid + k))
    i = int(np.argmax(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    best = float(vals[i])
    if hi > lo:
        res = minimize_scalar(lambda s: -float(np.abs(f(np.array([s + k]))[0])),
                              bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        best = max(best, -float(res.fun))
    return best


def cell_order(k_max):
    """
    0, -1, 1, -2, 2, ... up to |k| = k_max.
    """
    order = [0]
    for k in range(1, k_max + 1):
        order.extend((-k, k))
    return order


def amalgam_tail(envelope, k_max, cutoff=1e-300, limit=100000):
    """
    Envelope-certified remainder of the amalgam series beyond |k| = k_max.

    For k > k_max the cell [k, k+1] is bounded by E(k); for k < -k_max the
    cell [k, k+1] is bounded by E(|k| - 1).
    """
    total = 0.0
    for j in range(k_max, k_max + limit):
        term = float(envelope(j))
        if j > k_max:
            term *= 2.0
        total += term
        if term < cutoff:
            break
    return total


def amalgam_norm(f, envelope=None, sup_grid=256, k_max=12):
    """
    Wiener amalgam norm sum_k sup_{t in [0,1]} |f(t + k)|.

    :param f: vectorised real-line function
    :param envelope: nonincreasing majorant E with |f(t)| <= E(|t|)
    :param sup_grid: grid points per unit cell
    :param k_max: cells |k| <= k_max are summed explicitly
    :return: norm including the certified tail
    """
    if envelope is None:
        raise EnvelopeMissing("Amalgam norm needs a decay envelope for the tail")
    grid = np.linspace(0.0, 1.0, sup_grid)
    sups = [_sup_on_cell(f, k, grid) for k in cell_order(k_max)]
    tail = amalgam_tail(envelope, k_max)
    logger.debug("amalgam: %d cells, tail %.3e" % (len(sups), tail))
    return float(extended_sum(np.array(sups))) + tail


def gaussian_envelope_bound(kappa):
    """
    Amalgam bound 2 + kappa^(-1/2) for |g(t)| <= exp(-pi kappa t^2).
    """
    if not kappa > 0:
        raise ValidationError("kappa must be positive, got %r" % kappa)
    return 2.0 + kappa ** -0.5


def theta_sum(a, cutoff=1e-18):
    """
    sum_m exp(-pi a^2 m^2).
    """
    terms = [1.0]
    m = 1
    while True:
        term = math.exp(-math.pi * a * a * m * m)
        if term < cutoff:
            break
        terms.extend((term, term))
        m += 1
    return math.fsum(terms)
