# -*- coding: utf-8 -*-

import numpy as np
from scipy.special import gammaln

# Terms per block when evaluating log-products over many zeros.
BLOCK_ELEMENTS = 1 << 22


def extended_sum(terms, axis=-1):
    """
    Sum in extended precision.

    numpy reduces contiguous data pairwise; accumulating in longdouble on
    top of that keeps the rounding error of a few thousand log terms well
    below 1e-13.

    :param terms: array of float64 terms
    :param axis: axis to reduce
    :return: float64 array (or scalar) of sums
    """
    total = np.sum(np.asarray(terms, dtype=np.longdouble), axis=axis)
    return np.asarray(total, dtype=np.float64)


def log_factorial(n):
    return gammaln(np.asarray(n, dtype=float) + 1.0)


def gauss_legendre(a, b, n):
    """
    Gauss-Legendre nodes and weights on [a, b].

    :param a: lower end
    :param b: upper end
    :param n: number of nodes
    :return: (nodes, weights)
    """
    knots, weights = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * knots + 0.5 * (b + a), 0.5 * (b - a) * weights


def log_abs_product(points, zeros, scale_logs=None):
    """
    Sum over zeros of log|1 - z/zeta| for every point z.

    Evaluated as log|zeta - z| - log|zeta| in blocks of points so memory
    stays bounded for thousands of zeros. A point equal to a zero gets -inf.

    :param points: complex array of evaluation points
    :param zeros: complex array of nonzero zeros
    :param scale_logs: precomputed log|zeta| (optional)
    :return: float array shaped like points
    """
    points = np.asarray(points, dtype=complex)
    zeros = np.asarray(zeros, dtype=complex).ravel()
    flat = points.ravel()
    out = np.zeros(flat.shape, dtype=float)
    if zeros.size == 0:
        return out.reshape(points.shape)
    if scale_logs is None:
        scale_logs = np.log(np.abs(zeros))
    offset = float(extended_sum(scale_logs))
    step = max(1, BLOCK_ELEMENTS // zeros.size)
    with np.errstate(divide="ignore"):
        for start in range(0, flat.size, step):
            block = flat[start:start + step]
            dist = np.abs(zeros[np.newaxis, :] - block[:, np.newaxis])
            out[start:start + step] = extended_sum(np.log(dist), axis=1) - offset
    return out.reshape(points.shape)


def log_product(points, zeros):
    """
    Complex sum over zeros of log(1 - z/zeta), up to multiples of 2 pi i.

    The real part agrees with log_abs_product; exponentiate the result to
    get the product itself.
    """
    points = np.asarray(points, dtype=complex)
    zeros = np.asarray(zeros, dtype=complex).ravel()
    flat = points.ravel()
    out = np.zeros(flat.shape, dtype=complex)
    if zeros.size == 0:
        return out.reshape(points.shape)
    step = max(1, BLOCK_ELEMENTS // zeros.size)
    with np.errstate(divide="ignore", invalid="ignore"):
        for start in range(0, flat.size, step):
            block = flat[start:start + step]
            terms = np.log(1.0 - block[:, np.newaxis] / zeros[np.newaxis, :])
            out[start:start + step] = (extended_sum(terms.real, axis=1)
                                       + 1j * np.sum(terms.imag, axis=1))
    return out.reshape(points.shape)
