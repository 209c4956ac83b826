from charcycle.exact import (SparseEchelon, as_domain_matrix, as_fraction_rows, charpoly,
                             invert_matrix, matrices_commute, squarefree_decomposition)
from charcycle.roots import aberth_roots
from fractions import Fraction
import numpy as np
import pytest

def test_sparse_echelon():
    """Can detect dependent rows"""
    e = SparseEchelon()
    assert e.insert({0: 1, 2: 1}), "first row failed"
    assert not e.insert({0: 2, 2: 2}), "dependent row failed"
    assert e.insert({0: 1, 1: 3}), "independent row failed"
    assert sorted(e.pivots) == [0, 1], "pivots failed"
    assert e.rank == 2, "rank failed"
    assert e.reduce({0: 1, 1: 3, 2: 1}) == {}, "reduction failed"

def test_charpoly_matches_numpy():
    """Can compute characteristic polynomials exactly"""
    rng = np.random.default_rng(3)
    for _ in range(10):
        m = rng.integers(-4, 5, size = (4, 4))
        actual = [float(c) for c in reversed(charpoly([[Fraction(int(v)) for v in row] for row in m]))]
        expected = np.poly(m.astype(float))
        assert np.allclose(actual, expected), "charpoly failed"
    assert charpoly([[0, 1], [0, 0]]) == [0, 0, 1], "nilpotent charpoly failed"

def test_invert_matrix():
    """Can invert a rational matrix exactly"""
    m = [[Fraction(2), Fraction(1)], [Fraction(5), Fraction(3)]]
    inv = invert_matrix(m)
    assert inv == [[3, -1], [-5, 2]], "inverse failed"
    product = as_domain_matrix(m) * as_domain_matrix(inv)
    assert as_fraction_rows(product) == [[1, 0], [0, 1]], "product failed"
    with pytest.raises(ZeroDivisionError):
        invert_matrix([[1, 2], [2, 4]])

def test_matrices_commute():
    """Can tell commuting from non-commuting matrices"""
    a = [[1, 2], [0, 1]]
    assert matrices_commute(a, [[3, 4], [0, 3]]), "commuting pair failed"
    assert not matrices_commute(a, [[0, 0], [1, 0]]), "non-commuting pair failed"

def test_squarefree_decomposition():
    """Can split a polynomial into square-free factors"""
    actual = squarefree_decomposition([2, -3, 0, 1])  # (t - 1)^2 (t + 2)
    expected = [([2, 1], 1), ([-1, 1], 2)]
    assert actual == expected, "square-free decomposition failed"
    actual = squarefree_decomposition([0, 0, 0, Fraction(1, 2)])
    assert actual == [([0, 1], 3)], "monic power failed"
    assert squarefree_decomposition([5]) == [], "constant failed"

def test_aberth_roots():
    """Can find all roots of a square-free polynomial"""
    roots = aberth_roots([Fraction(-6), Fraction(11), Fraction(-6), Fraction(1)])
    assert np.allclose(roots, [1, 2, 3]), "real roots failed"
    roots = aberth_roots([1, 0, 1], seed = 4)
    assert np.allclose(sorted(roots, key = lambda z: z.imag), [-1j, 1j]), "complex roots failed"
