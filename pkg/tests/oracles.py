"""Independent reference computations used by the tests.

Nothing here imports the package's quadrature or update code.
"""

import numpy as np


def trapezoid_integral(x, y):
    """Trapezoid rule on arbitrary nodes."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    return float(np.sum(np.diff(x) * (y[1:] + y[:-1]) / 2))


def trapezoid_moments(x, y):
    """Mean and variance of an unnormalized density tabulated at uniform nodes."""
    w = np.full(x.size, x[1] - x[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    z = w @ y
    m = w @ (x * y) / z
    v = w @ ((x - m) ** 2 * y) / z
    return float(m), float(v)


def gaussian_product_moments(mu, var, s, noise_var, lo=-30.0, hi=30.0, n=200_001):
    """Posterior moments of N(mu, var) prior times N(s; a, noise_var) likelihood by brute force."""
    x = np.linspace(lo, hi, n)
    y = np.exp(-((x - mu) ** 2) / (2 * var) - (s - x) ** 2 / (2 * noise_var))
    return trapezoid_moments(x, y)


def normal_pdf(x, mean, var):
    return np.exp(-((x - mean) ** 2) / (2 * var)) / np.sqrt(2 * np.pi * var)
