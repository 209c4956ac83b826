"""
Zero-dimensional ideals: Groebner bases, standard monomials, multiplication
matrices, numeric extraction of the solution points, and the local
(at-the-origin) quotient dimension by truncated linear algebra.

Global computations run on sympy ring elements (``Polynomial.element``)
in graded reverse lex order.
"""

import heapq
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np
from sympy import QQ
from sympy.polys.groebnertools import red_groebner, spoly
from sympy.polys.matrices import DomainMatrix
from sympy.polys.monomials import monomial_divides
from sympy.polys.orderings import grevlex

from .config import Tolerances, Caps
from .errors import (CapExceededError, NotZeroDimensionalError, UndecidedError,
                     PreconditionError, DegenerateCombinationError,
                     IllConditionedError, DimensionMismatchError)
from .exact import SparseEchelon, charpoly, matrices_commute, squarefree_decomposition
from .poly import Polynomial
from .roots import aberth_roots
from .utils import _as_qq, _from_qq, _seeded_generator

__all__ = [
    "MonomialOrder", "QuotientAlgebra", "CriticalPointSet",
    "groebner_basis", "normal_form", "quotient_dimension",
    "multiplication_matrices", "solve_zero_dim_system",
    "local_quotient_dimension",
]

logger = logging.getLogger(__name__)


class MonomialOrder(Enum):
    """
    GLOBAL is graded reverse lex (a well-order). LOCAL ranks lower total
    degree first, ties broken by reverse lex; it is only used at the origin.
    """
    GLOBAL = "graded-reverse-lex"
    LOCAL = "negative-graded"

    def key(self, exps):
        """Larger key means 'leads'."""
        if self is MonomialOrder.GLOBAL:
            return grevlex(exps)
        return (-sum(exps), tuple(-e for e in reversed(exps)))


def _add_exps(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _check_generators(gens):
    gens = list(gens)
    if not gens:
        raise PreconditionError("At least one generator is required")
    variables = gens[0].variables
    for g in gens:
        if g.variables != variables:
            raise DimensionMismatchError("Generators live in different variables")
    if all(g.is_zero() for g in gens):
        raise PreconditionError("All generators are zero")
    return gens, variables


def _buchberger(elements, ring, caps):
    """
    Reduced Groebner basis of sympy ring elements, ascending by leading monomial.

    Pairs are taken smallest lcm first; the coprime-leads and chain criteria
    drop pairs. The S-polynomial degree and pair queue are capped.
    """
    basis = []
    queue = []
    done = set()
    unit = [ring.one]

    def add(g):
        g = g.monic()
        k = len(basis)
        basis.append(g)
        for i in range(k):
            lcm = ring.monomial_lcm(basis[i].LM, g.LM)
            # coprime leading monomials: the pair reduces to zero
            if lcm == ring.monomial_mul(basis[i].LM, g.LM):
                done.add((i, k))
                continue
            heapq.heappush(queue, (ring.order(lcm), i, k))
        if len(queue) > caps.pair_queue:
            raise CapExceededError(
                f"Pair queue exceeded {caps.pair_queue} entries", pairs = len(queue))
        return g.LM == ring.zero_monom

    for g in elements:
        r = g.rem(basis)
        if r and add(r):
            return unit

    steps = 0
    while queue:
        _, i, j = heapq.heappop(queue)
        done.add((i, j))
        lcm = ring.monomial_lcm(basis[i].LM, basis[j].LM)
        if sum(lcm) > caps.spoly_degree:
            raise CapExceededError(
                f"S-polynomial degree {sum(lcm)} exceeds cap {caps.spoly_degree}",
                degree = sum(lcm))
        # chain criterion
        if any(k not in (i, j) and monomial_divides(basis[k].LM, lcm)
               and (min(i, k), max(i, k)) in done and (min(j, k), max(j, k)) in done
               for k in range(len(basis))):
            continue
        r = spoly(basis[i], basis[j], ring).rem(basis)
        steps += 1
        if r and add(r):
            return unit
    logger.debug("Buchberger: %d reductions, %d basis elements before interreduction",
                 steps, len(basis))
    # red_groebner consumes its argument
    reduced = red_groebner(list(basis), ring)
    return sorted(reduced, key = lambda g: ring.order(g.LM))


def groebner_basis(gens, order = MonomialOrder.GLOBAL, caps = None):
    """
    Reduced Groebner basis by Buchberger's algorithm.

    Parameters
    ----------
    gens : list of Polynomial
        Generators in common variables, not all zero.
    order : MonomialOrder
        Only ``MonomialOrder.GLOBAL``; local questions go through
        ``local_quotient_dimension``.
    caps : Caps, optional
        S-polynomial degree and pair-queue caps.

    Returns
    -------
    list of Polynomial
        Monic reduced basis, sorted by leading monomial (ascending). It
        agrees with ``sympy.groebner(..., order='grevlex')``.

    Examples
    --------
    >>> x_minus_y, y2 = parse_poly("x - y", "x,y"), parse_poly("y^2", "x,y")
    >>> [str(g) for g in groebner_basis([x_minus_y, y2])]
    ['x - y', 'y^2']
    """
    gens, variables = _check_generators(gens)
    if order is not MonomialOrder.GLOBAL:
        raise PreconditionError(
            "Buchberger's algorithm needs a well-order; use local_quotient_dimension "
            "for the local order")
    caps = caps or Caps.from_env()
    ring = gens[0].ring
    basis = _buchberger([g.element for g in gens if g], ring, caps)
    return [Polynomial.from_element(variables, g) for g in basis]


def normal_form(p, basis, order = MonomialOrder.GLOBAL):
    """Remainder of ``p`` on division by a Groebner ``basis``."""
    divisors = [g.element.monic() for g in basis if not g.is_zero()]
    return Polynomial.from_element(p.variables, p.element.rem(divisors))


def _standard_monomials(leads, nvars, order):
    """Sorted standard monomials, or None when there are infinitely many."""
    if any(sum(lm) == 0 for lm in leads):
        return []
    for i in range(nvars):
        if not any(lm[i] > 0 and sum(lm) == lm[i] for lm in leads):
            return None
    zero = (0,) * nvars
    seen = {zero}
    stack = [zero]
    while stack:
        m = stack.pop()
        for i in range(nvars):
            nxt = m[:i] + (m[i] + 1,) + m[i + 1:]
            if nxt not in seen and not any(monomial_divides(lm, nxt) for lm in leads):
                seen.add(nxt)
                stack.append(nxt)
    return sorted(seen, key = order.key)


def quotient_dimension(gens, order = MonomialOrder.GLOBAL, caps = None):
    """
    Dimension of the quotient ring by the ideal of ``gens``.

    Returns
    -------
    int or float
        Number of standard monomials; ``math.inf`` when the quotient is
        infinite dimensional; 0 for the unit ideal. With
        ``MonomialOrder.LOCAL`` the local dimension at the origin is returned.

    Examples
    --------
    >>> quotient_dimension([parse_poly("2*x", "x,y"), parse_poly("2*y", "x,y")])
    1
    """
    if order is MonomialOrder.LOCAL:
        return local_quotient_dimension(gens, caps = caps)
    basis = groebner_basis(gens, order, caps)
    leads = [g.element.LM for g in basis]
    std = _standard_monomials(leads, basis[0].nvars, order)
    return math.inf if std is None else len(std)


class QuotientAlgebra:
    """
    Finite-dimensional quotient ring ``Q[x] / <gens>``.

    Attributes
    ----------
    generators : tuple of Polynomial
    order : MonomialOrder
    groebner : tuple of Polynomial
        Reduced Groebner basis.
    basis : tuple of tuple
        Standard monomials (exponent vectors), ascending in ``order``.

    Raises
    ------
    NotZeroDimensionalError
        When the quotient is infinite dimensional.
    """

    def __init__(self, gens, order = MonomialOrder.GLOBAL, caps = None):
        gens, variables = _check_generators(gens)
        self.generators = tuple(gens)
        self.variables = variables
        self.order = order
        self.groebner = tuple(groebner_basis(gens, order, caps))
        self._ring = gens[0].ring
        self._divisors = [g.element for g in self.groebner]
        std = _standard_monomials([g.LM for g in self._divisors], len(variables), order)
        if std is None:
            raise NotZeroDimensionalError(
                "The ideal is not zero-dimensional (infinitely many standard monomials)")
        self.basis = tuple(std)
        self._index = {m: k for k, m in enumerate(self.basis)}
        self._matrices = None

    @property
    def dimension(self):
        return len(self.basis)

    def __repr__(self):
        return f"QuotientAlgebra(dimension={self.dimension}, variables={list(self.variables)})"

    def _coordinates(self, element):
        coords = [QQ(0)] * self.dimension
        for e, c in element.rem(self._divisors).iterterms():
            coords[self._index[e]] = c
        return coords

    def normal_form(self, p):
        """Coordinates of ``p`` modulo the ideal in the standard-monomial basis."""
        return [_from_qq(c) for c in self._coordinates(p.element)]

    def multiplication_matrix(self, variable):
        return self.multiplication_matrices()[variable]

    def multiplication_matrices(self):
        """
        ``{variable: DomainMatrix}``; column j holds the normal form of
        ``variable * basis[j]``.
        """
        if self._matrices is None:
            mats = {}
            dim = self.dimension
            for i, v in enumerate(self.variables):
                cols = []
                for m in self.basis:
                    shifted = m[:i] + (m[i] + 1,) + m[i + 1:]
                    cols.append(self._coordinates(self._ring.from_dict({shifted: QQ(1)})))
                rows = [[cols[j][r] for j in range(dim)] for r in range(dim)]
                mats[v] = DomainMatrix(rows, (dim, dim), QQ)
            self._matrices = mats
        return self._matrices

    def matrices_commute(self):
        mats = list(self.multiplication_matrices().values())
        return all(matrices_commute(a, b)
                   for k, a in enumerate(mats) for b in mats[k + 1:])


def multiplication_matrices(q: QuotientAlgebra):
    """Per-variable multiplication matrices of a finite quotient (exact)."""
    return q.multiplication_matrices()


@dataclass(frozen = True)
class CriticalPointSet:
    """
    Numeric solution points of a zero-dimensional system.

    ``points[k]`` has multiplicity ``multiplicities[k]`` and relative
    residual ``residuals[k]``; the multiplicities add up to
    ``total_with_multiplicity``, the dimension of the quotient algebra.
    """
    variables: tuple
    points: tuple
    multiplicities: tuple
    residuals: tuple
    total_with_multiplicity: int
    seed: int = 0
    diagnostics: dict = field(default_factory = dict, compare = False)

    def __post_init__(self):
        if sum(self.multiplicities) != self.total_with_multiplicity:
            raise ValueError("Multiplicities do not add up to the quotient dimension")
        if not (len(self.points) == len(self.multiplicities) == len(self.residuals)):
            raise ValueError("Points, multiplicities and residuals differ in length")

    def __len__(self):
        return len(self.points)

    def norms(self):
        return [float(np.linalg.norm(np.asarray(p))) for p in self.points]

    def count_within(self, radius):
        """Points with ``|x| < radius`` counted with multiplicity."""
        return sum(m for p, m in zip(self.points, self.multiplicities)
                   if np.linalg.norm(np.asarray(p)) < radius)

    def select(self, radius = math.inf, real_tolerance = None):
        """Indices of points within ``radius`` (and real, when a tolerance is given)."""
        out = []
        for k, p in enumerate(self.points):
            arr = np.asarray(p)
            if np.linalg.norm(arr) >= radius:
                continue
            if real_tolerance is not None and np.any(
                    np.abs(arr.imag) > real_tolerance * np.maximum(1, np.abs(arr))):
                continue
            out.append(k)
        return out


def _weights(nvars, seed, attempt):
    rng = _seeded_generator(seed, stream = 10 + attempt)
    draw = rng.integers(1, 60, size = nvars, endpoint = True)
    signs = rng.choice([-1, 1], size = nvars)
    return [Fraction(int(d * s)) for d, s in zip(draw, signs)]


def _combination(mats, weights):
    names = list(mats)
    dim = mats[names[0]].shape[0]
    out = DomainMatrix.zeros((dim, dim), QQ)
    for w, v in zip(weights, names):
        out = out + mats[v] * _as_qq(w)
    return out


def _separating_combination(mats, nvars, seed, caps):
    """Combination with the most distinct eigenvalues, seen for two seeds."""
    best = None
    seen = {}
    dim = next(iter(mats.values())).shape[0]
    for attempt in range(caps.max_reseeds + 1):
        weights = _weights(nvars, seed, attempt)
        m = _combination(mats, weights)
        factors = squarefree_decomposition(charpoly(m))
        distinct = sum(len(f) - 1 for f, _ in factors)
        if distinct == dim:
            return m, factors, attempt
        seen[distinct] = seen.get(distinct, 0) + 1
        if best is None or distinct > best[0]:
            best = (distinct, m, factors, attempt)
        elif distinct == best[0] and seen[distinct] >= 2:
            return best[1], best[2], best[3]
        logger.debug("combination %d has %d distinct eigenvalues, reseeding", attempt, distinct)
    raise DegenerateCombinationError(
        f"No stable separating combination after {caps.max_reseeds} reseeds",
        distinct_counts = sorted(seen))


def _as_complex_matrix(m):
    return np.array([[float(v) for v in row] for row in m.to_list()], dtype = np.complex128)


def _null_basis(a, k):
    # k right singular vectors of smallest singular value
    _, _, vh = np.linalg.svd(a)
    return vh[-k:].conj().T


def _relative_residual(g, point):
    total = 0j
    scale = 0.0
    biggest = 0.0
    for exps, c in g.terms.items():
        value = complex(float(c))
        for z, e in zip(point, exps):
            value *= z ** e
        total += value
        scale += abs(value)
        biggest = max(biggest, abs(float(c)))
    scale = max(scale, biggest)
    return abs(total) / scale if scale else abs(total)


def solve_zero_dim_system(gens, seed = 0, tolerances = None, caps = None):
    """
    Numeric solutions of a zero-dimensional polynomial system.

    The characteristic polynomial of a random rational combination of the
    multiplication matrices is computed exactly and split into square-free
    factors; the roots of each factor are found with Aberth's method and
    the coordinates are read off the spectral projector of each eigenvalue.

    Parameters
    ----------
    gens : list of Polynomial
    seed : int
        Drives the random combination (reseeded on eigenvalue collisions)
        and the root finder's start.
    tolerances : Tolerances, optional
    caps : Caps, optional

    Returns
    -------
    CriticalPointSet

    Raises
    ------
    NotZeroDimensionalError
        When the system has infinitely many solutions.
    DegenerateCombinationError
        When no random combination separates the points.
    IllConditionedError
        When a point's relative residual exceeds ``tolerances.residual``.

    Examples
    --------
    >>> g = parse_poly("x*y*z - x - y - z", "x,y,z")
    >>> sol = solve_zero_dim_system(gradient(g))
    >>> sol.total_with_multiplicity
    2
    """
    tol = tolerances or Tolerances()
    caps = caps or Caps.from_env()
    q = QuotientAlgebra(gens, MonomialOrder.GLOBAL, caps)
    variables = q.variables
    if q.dimension == 0:
        return CriticalPointSet(variables, (), (), (), 0, seed)
    mats = q.multiplication_matrices()
    m, factors, attempt = _separating_combination(mats, len(variables), seed, caps)

    m_num = _as_complex_matrix(m)
    coord_mats = [_as_complex_matrix(mats[v]) for v in variables]
    eye = np.eye(q.dimension, dtype = np.complex128)
    raw_points = []
    for factor, mult in factors:
        for lam in aberth_roots(factor, seed = seed + attempt, tolerances = tol):
            shifted = np.linalg.matrix_power(m_num - lam * eye, mult)
            right = _null_basis(shifted, mult)
            left = _null_basis(shifted.T, mult)
            projector = right @ np.linalg.solve(left.T @ right, left.T)
            coords = tuple(complex(np.trace(cm @ projector) / mult) for cm in coord_mats)
            raw_points.append((coords, mult))

    # merge numerically coincident points
    merged = []
    for coords, mult in raw_points:
        arr = np.asarray(coords)
        for item in merged:
            ref = np.asarray(item[0])
            if np.linalg.norm(arr - ref) < tol.clustering * max(1.0, np.linalg.norm(ref)):
                total = item[1] + mult
                item[0] = tuple((ref * item[1] + arr * mult) / total)
                item[1] = total
                break
        else:
            merged.append([coords, mult])

    residuals = tuple(max(_relative_residual(g, coords) for g in q.generators)
                      for coords, _ in merged)
    worst = max(residuals, default = 0.0)
    if worst > tol.residual:
        raise IllConditionedError(
            f"Worst relative residual {worst:.3e} exceeds {tol.residual:.1e}",
            worst_residual = worst)
    return CriticalPointSet(
        variables = variables,
        points = tuple(tuple(c) for c, _ in merged),
        multiplicities = tuple(int(mult) for _, mult in merged),
        residuals = residuals,
        total_with_multiplicity = q.dimension,
        seed = seed,
        diagnostics = {"reseeds": attempt, "distinct_eigenvalues": len(merged)},
    )


# Local quotient at the origin
# ----------------------------
def _monomials_below(nvars, degree):
    """All exponent vectors of total degree < ``degree``, local order first."""
    out = []
    for d in range(degree):
        for combo in combinations_with_replacement(range(nvars), d):
            exps = [0] * nvars
            for i in combo:
                exps[i] += 1
            out.append(tuple(exps))
    out.sort(key = MonomialOrder.LOCAL.key, reverse = True)
    return out


def _truncated_standard_monomials(gens, nvars, degree):
    monomials = _monomials_below(nvars, degree)
    column = {m: k for k, m in enumerate(monomials)}
    echelon = SparseEchelon()
    for g in gens:
        order = g.order
        if order >= degree:
            continue
        for m in monomials:
            if sum(m) + order >= degree:
                continue
            row = {}
            for e, c in g.terms.items():
                shifted = _add_exps(m, e)
                if sum(shifted) < degree:
                    row[column[shifted]] = c
            echelon.insert(row)
    pivots = set(echelon.pivots)
    return frozenset(m for k, m in enumerate(monomials) if k not in pivots)


def local_quotient_dimension(gens, degree_cap = None, caps = None):
    """
    Dimension of the local algebra of ``<gens>`` at the origin.

    Works in ``Q[x] / m^D`` for growing ``D``: the standard monomials of the
    truncated ideal under the local order are accepted once they agree for
    two consecutive ``D`` and leave a full degree layer ``d < D`` of
    non-standard monomials, which certifies ``m^d`` inside the ideal.

    Parameters
    ----------
    gens : list of Polynomial
    degree_cap : int, optional
        Largest truncation degree tried; defaults to ``Caps.degree_cap``
        (environment variable ``CHARCYCLE_DEGREE_CAP``).

    Raises
    ------
    UndecidedError
        When no certificate is found below the cap, e.g. for a
        non-isolated singular point.

    Examples
    --------
    >>> f = parse_poly("x^3 - y^2", "x,y")
    >>> local_quotient_dimension(gradient(f))
    2
    """
    gens, variables = _check_generators(gens)
    caps = caps or Caps.from_env()
    cap = caps.degree_cap if degree_cap is None else degree_cap
    gens = [g for g in gens if not g.is_zero()]
    if any(g.constant_term != 0 for g in gens):
        return 0
    nvars = len(variables)
    previous = None
    for degree in range(2, cap + 1):
        std = _truncated_standard_monomials(gens, nvars, degree)
        top = max((sum(m) for m in std), default = -1)
        logger.debug("truncation degree %d: %d standard monomials (top degree %d)",
                     degree, len(std), top)
        if std == previous and top <= degree - 2:
            return len(std)
        previous = std
    raise UndecidedError(
        f"No finiteness certificate up to truncation degree {cap}", degree_cap = cap)
