"""Simultaneous-iteration (Aberth) root finder for univariate polynomials."""

import logging
import numpy as np

from .config import Tolerances
from .utils import _seeded_generator

__all__ = ["aberth_roots"]

logger = logging.getLogger(__name__)


def aberth_roots(coefficients, seed = 0, tolerances = None):
    """
    All complex roots of a polynomial by Aberth's method.

    Parameters
    ----------
    coefficients : sequence
        Coefficients in ascending powers; anything ``complex()`` accepts,
        including ``Fraction``.
    seed : int
        Rotates the initial circle of guesses: the starting points are
        ``R * exp(2*pi*i*(k + u)/n)`` with ``u`` in [0, 1) drawn from the seed
        and ``R`` the Fujiwara bound of the roots.
    tolerances : Tolerances, optional
        Uses ``root_convergence`` (relative step size) and ``root_max_iter``.

    Returns
    -------
    numpy.ndarray
        Complex roots, sorted by (real, imaginary) part. Roots of the
        input are assumed simple; use a square-free factor.

    Examples
    --------
    >>> np.round(aberth_roots([-1, 0, 1]), 12)
    array([-1.+0.j,  1.+0.j])
    """
    tol = tolerances or Tolerances()
    coeffs = np.array([complex(c) for c in coefficients], dtype = np.complex128)
    nz = np.nonzero(coeffs)[0]
    if nz.size == 0:
        raise ValueError("The zero polynomial has no finite set of roots")
    coeffs = coeffs[: nz[-1] + 1]
    n = coeffs.size - 1
    if n == 0:
        return np.empty(0, dtype = np.complex128)
    desc = coeffs[::-1] / coeffs[-1]
    if n == 1:
        return np.array([-desc[1]])
    deriv = desc[:-1] * np.arange(n, 0, -1)

    # Fujiwara bound
    ratios = np.abs(desc[1:]) ** (1.0 / np.arange(1, n + 1))
    ratios[-1] = (np.abs(desc[-1]) / 2) ** (1.0 / n)
    radius = 2 * ratios.max()
    if radius == 0:
        return np.zeros(n, dtype = np.complex128)
    offset = _seeded_generator(seed, stream = 3).random()
    z = radius * np.exp(2j * np.pi * (np.arange(n) + offset) / n)

    converged = False
    for _ in range(tol.root_max_iter):
        p = np.polyval(desc, z)
        dp = np.polyval(deriv, z)
        dp[dp == 0] = np.finfo(float).tiny
        ratio = p / dp
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1)
        inv = 1 / diff
        np.fill_diagonal(inv, 0)
        denom = 1 - ratio * inv.sum(axis = 1)
        denom[denom == 0] = np.finfo(float).tiny
        step = ratio / denom
        z = z - step
        if np.all(np.abs(step) <= tol.root_convergence * np.maximum(1, np.abs(z))):
            converged = True
            break
    if not converged:
        logger.debug("Aberth iteration stopped after %d steps (degree %d)", tol.root_max_iter, n)

    # two Newton polishing steps
    for _ in range(2):
        dp = np.polyval(deriv, z)
        ok = dp != 0
        z[ok] = z[ok] - np.polyval(desc, z[ok]) / dp[ok]
    return np.array(sorted(z, key = lambda w: (w.real, w.imag)))
