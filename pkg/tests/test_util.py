import math

import numpy as np


def random_coeffs(rng, count, complex_values=True):
    """
    Hermite/monomial coefficient vector with unit norm.
    """
    coeffs = rng.standard_normal(count)
    if complex_values:
        coeffs = coeffs + 1j * rng.standard_normal(count)
    return coeffs / np.linalg.norm(coeffs)


def brute_force_count(a, rho):
    """
    Number of (m, n) with a^2 (m^2 + n^2) <= rho^2, by a plain double loop.
    """
    k = int(math.floor(rho / a)) + 1
    return sum(1 for m in range(-k, k + 1) for n in range(-k, k + 1)
               if a * a * (m * m + n * n) <= rho * rho)


def random_points(rng, count, radius):
    r = radius * np.sqrt(rng.uniform(size=count))
    return r * np.exp(2j * math.pi * rng.uniform(size=count))
