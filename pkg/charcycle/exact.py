"""
Exact rational linear algebra.

Dense matrices are sympy ``DomainMatrix`` objects over ``QQ``; plain
lists of rows are accepted wherever a matrix goes in. Univariate
polynomials handed to the root finder are ascending lists of
``Fraction``. Nothing in here rounds.
"""

from fractions import Fraction

from sympy import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError
from sympy.polys.rings import PolyRing

from .utils import _as_qq, _from_qq

__all__ = [
    "SparseEchelon", "as_domain_matrix", "as_fraction_rows", "charpoly", "invert_matrix",
    "matrices_commute", "squarefree_decomposition",
]

_UNIVARIATE = PolyRing("t", QQ)


class SparseEchelon:
    """
    Incrementally built row echelon form of sparse rows.

    Rows are dicts ``{column: Fraction}``. Columns are integers and the
    leading entry of a row is its smallest column, so callers choose the
    pivoting order by how they number columns.

    Examples
    --------
    >>> e = SparseEchelon()
    >>> e.insert({0: 1, 2: 1})
    True
    >>> e.insert({0: 2, 2: 2})
    False
    >>> sorted(e.pivots)
    [0]
    """

    def __init__(self):
        self._rows = {}

    @property
    def pivots(self):
        return self._rows.keys()

    @property
    def rank(self):
        return len(self._rows)

    def reduce(self, row):
        """Return ``row`` reduced by the stored pivots (leading part only)."""
        row = {c: Fraction(v) for c, v in row.items() if v != 0}
        while row:
            lead = min(row)
            pivot = self._rows.get(lead)
            if pivot is None:
                return row
            factor = row[lead]
            for c, v in pivot.items():
                value = row.get(c, 0) - factor * v
                if value:
                    row[c] = value
                else:
                    row.pop(c, None)
        return row

    def insert(self, row):
        """Insert a row; returns True when it increased the rank."""
        row = self.reduce(row)
        if not row:
            return False
        lead = min(row)
        scale = row[lead]
        self._rows[lead] = {c: v / scale for c, v in row.items()}
        return True


def as_domain_matrix(matrix):
    """``DomainMatrix`` over ``QQ`` from a DomainMatrix or a list of rows."""
    if isinstance(matrix, DomainMatrix):
        return matrix.convert_to(QQ)
    rows = [[_as_qq(v) for v in row] for row in matrix]
    ncols = len(rows[0]) if rows else 0
    return DomainMatrix(rows, (len(rows), ncols), QQ)


def as_fraction_rows(matrix):
    return [[_from_qq(v) for v in row] for row in as_domain_matrix(matrix).to_list()]


def matrices_commute(a, b):
    a, b = as_domain_matrix(a), as_domain_matrix(b)
    return (a * b).to_list() == (b * a).to_list()


def invert_matrix(matrix):
    """
    Exact inverse, as a list of rows of ``Fraction``.

    Raises
    ------
    ZeroDivisionError
        When the matrix is singular.
    """
    try:
        inverse = as_domain_matrix(matrix).inv()
    except DMNonInvertibleMatrixError as exc:
        raise ZeroDivisionError("Singular matrix") from exc
    return as_fraction_rows(inverse)


def charpoly(matrix):
    """
    Characteristic polynomial det(t*I - M), ascending ``Fraction`` coefficients.

    Examples
    --------
    >>> charpoly([[0, 1], [0, 0]])
    [Fraction(0, 1), Fraction(0, 1), Fraction(1, 1)]
    """
    coeffs = as_domain_matrix(matrix).charpoly()
    return [_from_qq(c) for c in reversed(coeffs)]


def squarefree_decomposition(p):
    """
    Square-free decomposition of a univariate polynomial.

    Parameters
    ----------
    p : list
        Ascending coefficients.

    Returns
    -------
    list of (list, int)
        Pairs ``(factor, multiplicity)`` with monic, pairwise coprime,
        square-free factors of positive degree (ascending coefficients)
        such that ``p`` is a constant times the product of
        ``factor ** multiplicity``.
    """
    element = _UNIVARIATE.from_dict({(k,): _as_qq(c) for k, c in enumerate(p) if c != 0})
    if element.is_ground:
        return []
    _, factors = element.sqf_list()
    out = []
    for factor, k in factors:
        # to_dense is descending
        out.append(([_from_qq(c) for c in reversed(factor.to_dense())], k))
    return out
