import numpy as np
from fractions import Fraction
from itertools import chain
from numbers import Rational
from pathlib import Path
from typing import Union

from sympy import QQ


__all__ = []

def _list_flatten(l):
    l = [x if isinstance(x, (list, tuple)) else [x] for x in l]
    return list(chain.from_iterable(l))

def _as_list(x):
    if x is None:
        out = []
    elif _is_string(x):
        # Comma separated names, as typed on the command line
        out = [val.strip() for val in x.split(',') if val.strip()]
    elif _is_tuple(x) | _is_list(x):
        out = _list_flatten(x)
    else:
        out = [x]
    return out

def _is_integer(x):
    return isinstance(x, (int, np.integer)) and not isinstance(x, bool)

def _is_rational(x):
    return isinstance(x, Rational) and not isinstance(x, bool)

def _is_list(x):
    return isinstance(x, list)

def _is_string(x):
    return isinstance(x, str)

def _is_tuple(x):
    return isinstance(x, tuple)

def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, QQ.dtype):
        return _from_qq(x)
    if _is_rational(x):
        return Fraction(x)
    if _is_string(x):
        return Fraction(x.strip())
    if isinstance(x, float):
        # Exact binary value would leak rounding noise into exact counts
        return Fraction(str(x))
    raise TypeError(f"Cannot use {x!r} as an exact rational")

def _as_qq(x):
    """sympy ``QQ`` element from anything ``_as_fraction`` accepts (or a QQ element)."""
    if isinstance(x, QQ.dtype):
        return x
    x = _as_fraction(x)
    return QQ(x.numerator, x.denominator)

def _from_qq(c):
    return Fraction(int(c.numerator), int(c.denominator))

def _seeded_generator(seed, stream = 0):
    # Counter-based: the same (seed, stream) always yields the same draws
    bit_generator = np.random.Philox(key = [int(seed) & (2**64 - 1), int(stream)])
    return np.random.Generator(bit_generator)

def _sign_power(k):
    """(-1)**k for any integer k."""
    return -1 if k % 2 else 1

def _expand_to_full_path(p: Union[str, Path]) -> str:
    # Expand '~' and relative segments into an absolute path string
    p = Path(p)
    return str(p.expanduser().resolve())
