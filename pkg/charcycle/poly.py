"""
Exact sparse multivariate polynomials over the rationals.

A ``Polynomial`` wraps an element of the sympy ring ``QQ[x_1, ..., x_n]``
in graded reverse lexicographic order; that order is also the canonical
term order for printing, equality and iteration. Coefficients come out
as ``fractions.Fraction``; floating point only appears in ``evaluate``.
"""

import re
import logging
import threading
from collections import OrderedDict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType
from typing import Mapping

from sympy import QQ, Symbol
from sympy.polys.orderings import grevlex
from sympy.polys.rings import PolyRing

from .errors import (PolynomialParseError, UnknownVariableError,
                     DimensionMismatchError, PreconditionError)
from .exact import invert_matrix
from .utils import (_as_list, _as_fraction, _as_qq, _from_qq, _is_integer, _is_rational,
                    _is_string, _seeded_generator)

__all__ = [
    "Polynomial", "RationalLinearForm",
    "parse_poly", "differentiate", "gradient", "hessian",
    "substitute_linear", "evaluate",
    "random_linear_form", "random_linear_change",
    "polynomial_ring",
]

logger = logging.getLogger(__name__)

_IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _check_variables(variables):
    variables = tuple(_as_list(variables))
    if not variables:
        raise PreconditionError("At least one variable is required")
    for name in variables:
        if not (_is_string(name) and _IDENTIFIER.match(name)):
            raise PreconditionError(f"Invalid variable name {name!r}", variable = str(name))
    if len(set(variables)) != len(variables):
        repeated = sorted({v for v in variables if variables.count(v) > 1})
        raise PreconditionError(f"Repeated variable names in {list(variables)}",
                                repeated = repeated)
    return variables


@lru_cache(maxsize = None)
def polynomial_ring(variables):
    """
    The sympy ring ``QQ[variables]`` with graded reverse lex order.

    Examples
    --------
    >>> polynomial_ring(('x', 'y')).ngens
    2
    """
    return PolyRing(tuple(Symbol(v) for v in variables), QQ, grevlex)


class Polynomial:
    """
    Sparse polynomial with exact rational coefficients.

    Parameters
    ----------
    variables : list of str
        Ordered variable names. A comma separated string is accepted.
    terms : dict or iterable of pairs
        Map from exponent vector to coefficient. Repeated exponent vectors
        (when pairs are given) are merged; zero coefficients are dropped.

    Raises
    ------
    PreconditionError
        For missing, invalid or repeated variable names and negative exponents.

    Examples
    --------
    >>> p = Polynomial(['x', 'y'], {(3, 0): 1, (0, 2): -1})
    >>> print(p)
    x^3 - y^2
    >>> p == parse_poly("x^3 - y^2", ['x', 'y'])
    True
    """
    __slots__ = ("_variables", "_element", "_terms", "_hash")

    def __init__(self, variables, terms = None):
        variables = _check_variables(variables)
        items = terms.items() if isinstance(terms, Mapping) else (terms or ())
        merged = {}
        for exps, coeff in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(variables):
                raise DimensionMismatchError(
                    f"Exponent vector {exps} does not match {len(variables)} variables")
            if any(e < 0 for e in exps):
                raise PreconditionError(f"Negative exponent in {exps}")
            merged[exps] = merged.get(exps, QQ(0)) + _as_qq(coeff)
        self._variables = variables
        self._element = polynomial_ring(variables).from_dict(merged)
        self._terms = None
        self._hash = None

    @classmethod
    def from_element(cls, variables, element):
        """Wrap a sympy ring element of ``polynomial_ring(variables)``."""
        out = cls.__new__(cls)
        out._variables = tuple(variables)
        out._element = element
        out._terms = None
        out._hash = None
        return out

    @classmethod
    def constant(cls, variables, value):
        variables = _check_variables(variables)
        return cls(variables, {(0,) * len(variables): value})

    @classmethod
    def variable(cls, variables, name):
        variables = _check_variables(variables)
        if name not in variables:
            raise UnknownVariableError(f"Unknown variable {name!r}", variable = name)
        return cls.from_element(variables, polynomial_ring(variables).gens[variables.index(name)])

    # Properties
    # ----------
    @property
    def variables(self):
        return self._variables

    @property
    def nvars(self):
        return len(self._variables)

    @property
    def ring(self):
        return self._element.ring

    @property
    def element(self):
        """The underlying sympy ``PolyElement``; treat it as read-only."""
        return self._element

    @property
    def terms(self):
        """Read-only view of the term map, in canonical (descending) order."""
        if self._terms is None:
            self._terms = {e: _from_qq(c) for e, c in self._element.terms()}
        return MappingProxyType(self._terms)

    @property
    def degree(self):
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._element.itermonoms()), default = -1)

    @property
    def order(self):
        """Lowest total degree of a term; -1 for the zero polynomial."""
        return min((sum(e) for e in self._element.itermonoms()), default = -1)

    def is_zero(self):
        return not self._element

    def is_constant(self):
        return self._element.is_ground

    @property
    def constant_term(self):
        return self.coefficient((0,) * self.nvars)

    def coefficient(self, exps):
        return _from_qq(self._element.get(tuple(exps), QQ(0)))

    def max_abs_coefficient(self):
        return max((abs(c) for c in self.terms.values()), default = Fraction(0))

    # Arithmetic
    # ----------
    def _wrap(self, element):
        return Polynomial.from_element(self._variables, element)

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other._variables != self._variables:
                raise DimensionMismatchError(
                    f"Variables differ: {self._variables} vs {other._variables}")
            return other._element
        if _is_rational(other):
            return self._element.ring.ground_new(_as_qq(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._wrap(self._element + other)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(-self._element)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._wrap(self._element - other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._wrap(self._element * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not _is_rational(other):
            return NotImplemented
        return self._wrap(self._element.quo_ground(_as_qq(other)))

    def __pow__(self, k):
        if not _is_integer(k) or k < 0:
            raise ValueError("Only nonnegative integer powers are supported")
        return self._wrap(self._element ** int(k))

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self._variables == other._variables and self._element == other._element
        if _is_rational(other):
            return self.is_constant() and self.constant_term == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._variables, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self._element)

    # Printing
    # --------
    def __str__(self):
        if not self._element:
            return "0"
        pieces = []
        for exps, coeff in self.terms.items():
            sign = "-" if coeff < 0 else "+"
            pieces.append((sign, _format_term(abs(coeff), exps, self._variables)))
        first_sign, first = pieces[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"Polynomial('{self}', variables={list(self._variables)})"


def _format_term(coeff, exps, variables):
    factors = []
    for name, e in zip(variables, exps):
        if e == 1:
            factors.append(name)
        elif e > 1:
            factors.append(f"{name}^{e}")
    if not factors:
        return str(coeff)
    if coeff == 1:
        return "*".join(factors)
    return "*".join([str(coeff)] + factors)


# Parsing
# -------
_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^]))")


def _tokenize(text):
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise PolynomialParseError(f"Unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    # expr   := ['+'|'-'] term (('+'|'-') term)*
    # term   := coeff ('*' factor)* | factor ('*' factor)*
    # coeff  := int | int '/' uint
    # factor := var ('^' uint)?

    def __init__(self, text, variables):
        self.tokens = _tokenize(text)
        self.i = 0
        self.variables = variables
        self.index = {v: k for k, v in enumerate(variables)}

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind, value = None):
        tok = self.peek()
        if tok[0] != kind or (value is not None and tok[1] != value):
            expected = value or kind
            found = tok[1] or "end of input"
            raise PolynomialParseError(f"Expected {expected}, found {found!r}", tok[2])
        self.i += 1
        return tok

    def expr(self):
        terms = {}
        sign = 1
        if self.peek()[0] == "op" and self.peek()[1] in "+-":
            sign = -1 if self.take("op")[1] == "-" else 1
        self.term(terms, sign)
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            sign = -1 if self.take("op")[1] == "-" else 1
            self.term(terms, sign)
        tok = self.peek()
        if tok[0] != "end":
            raise PolynomialParseError(f"Unexpected token {tok[1]!r}", tok[2])
        return Polynomial(self.variables, terms.items())

    def term(self, terms, sign):
        coeff = Fraction(sign)
        exps = [0] * len(self.variables)
        if self.peek()[0] == "int":
            coeff *= self.coeff()
        else:
            self.factor(exps)
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take("op", "*")
            self.factor(exps)
        key = tuple(exps)
        terms[key] = terms.get(key, 0) + coeff

    def coeff(self):
        num = int(self.take("int")[1])
        if self.peek()[0] == "op" and self.peek()[1] == "/":
            self.take("op", "/")
            tok = self.take("int")
            den = int(tok[1])
            if den == 0:
                raise PolynomialParseError("Division by zero", tok[2])
            return Fraction(num, den)
        return Fraction(num)

    def factor(self, exps):
        kind, name, pos = self.peek()
        if kind != "name":
            raise PolynomialParseError(f"Expected a variable, found {name or 'end of input'!r}", pos)
        self.take("name")
        if name not in self.index:
            raise UnknownVariableError(
                f"Unknown variable {name!r} (declared: {', '.join(self.variables)})",
                variable = name, position = pos)
        power = 1
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take("op", "^")
            power = int(self.take("int")[1])
        exps[self.index[name]] += power


def parse_poly(text: str, variables) -> Polynomial:
    """
    Parse a polynomial from text.

    Parameters
    ----------
    text : str
        Expression such as ``"x^3 - y^2"`` or ``"1/2*x*y + 3"``. A leading
        sign is accepted; whitespace is ignored.
    variables : list of str or str
        Declared variables, in order. ``"x,y,z"`` is accepted.

    Returns
    -------
    Polynomial
        The canonical polynomial; ``parse_poly(str(p), vars) == p``.

    Examples
    --------
    >>> parse_poly("2*x*y + x*y", "x,y")
    Polynomial('3*x*y', variables=['x', 'y'])
    """
    variables = _check_variables(variables)
    return _Parser(text, variables).expr()


# Calculus
# --------
def differentiate(p: Polynomial, v: str) -> Polynomial:
    """
    Formal partial derivative of ``p`` with respect to ``v``.

    Examples
    --------
    >>> f = parse_poly("x^3 - y^2", "x,y")
    >>> print(differentiate(f, 'x'))
    3*x^2
    """
    if v not in p.variables:
        raise UnknownVariableError(f"Unknown variable {v!r}", variable = v)
    return Polynomial.from_element(p.variables, p.element.diff(p.variables.index(v)))


def gradient(p: Polynomial) -> list:
    """List of the partial derivatives, in variable order."""
    return [differentiate(p, v) for v in p.variables]


def hessian(p: Polynomial) -> list:
    """Matrix (list of rows) of second partial derivatives."""
    grad = gradient(p)
    return [[differentiate(g, v) for v in p.variables] for g in grad]


def substitute_linear(p: Polynomial, mapping, new_variables = None) -> Polynomial:
    """
    Compose ``p`` with an affine-linear change of variables.

    Parameters
    ----------
    p : Polynomial
    mapping : dict or list
        Image of every variable of ``p``, either as a dict keyed by variable
        name or as a list in variable order. Images are Polynomials (or
        strings parsed in ``new_variables``) of degree at most one.
    new_variables : list of str, optional
        Variables of the result. Inferred from the images when omitted.

    Returns
    -------
    Polynomial
        ``p`` evaluated at the images, in ``new_variables``.

    Examples
    --------
    >>> f = parse_poly("x^2 + y^2 + z^2", "x,y,z")
    >>> g = substitute_linear(f, {'x': 'x', 'y': 'y', 'z': '-x - y'}, "x,y")
    >>> print(g)
    2*x^2 + 2*x*y + 2*y^2
    """
    if isinstance(mapping, Mapping):
        missing = set(p.variables) - set(mapping)
        extra = set(mapping) - set(p.variables)
        if missing or extra:
            raise DimensionMismatchError(
                f"Substitution must map exactly {list(p.variables)}",
                missing = sorted(missing), extra = sorted(extra))
        images = [mapping[v] for v in p.variables]
    else:
        images = list(mapping)
        if len(images) != p.nvars:
            raise DimensionMismatchError(
                f"Substitution has {len(images)} images for {p.nvars} variables")
    if new_variables is None:
        found = [img.variables for img in images if isinstance(img, Polynomial)]
        if not found:
            raise ValueError("new_variables is required when images are given as text")
        new_variables = found[0]
    new_variables = _check_variables(new_variables)
    images = [parse_poly(img, new_variables) if _is_string(img)
              else img if isinstance(img, Polynomial)
              else Polynomial.constant(new_variables, img)
              for img in images]
    for v, img in zip(p.variables, images):
        if img.variables != new_variables:
            raise DimensionMismatchError(f"Image of {v} is not in {list(new_variables)}")
        if img.degree > 1:
            raise PreconditionError(f"Image of {v} has degree {img.degree} > 1")

    ring = polynomial_ring(new_variables)
    # powers[k][e] = images[k] ** e, built on demand
    powers = [[ring.one] for _ in images]
    def power(k, e):
        while len(powers[k]) <= e:
            powers[k].append(powers[k][-1] * images[k].element)
        return powers[k][e]

    out = ring.zero
    for exps, c in p.element.terms():
        term = ring.ground_new(c)
        for k, e in enumerate(exps):
            if e:
                term = term * power(k, e)
        out += term
    return Polynomial.from_element(new_variables, out)


def _horner(terms, point, k):
    # terms: [(exps, complex coefficient)]; nested Horner from variable k on
    if k == len(point):
        return sum((c for _, c in terms), 0j)
    by_power = {}
    for exps, c in terms:
        by_power.setdefault(exps[k], []).append((exps, c))
    value = 0j
    for e in range(max(by_power), -1, -1):
        value *= point[k]
        if e in by_power:
            value += _horner(by_power[e], point, k + 1)
    return value


def evaluate(p: Polynomial, point) -> complex:
    """
    Evaluate ``p`` at a complex point.

    Nested Horner scheme in the variable order: ``p`` is a polynomial in
    the first variable whose coefficients are evaluated recursively in the
    remaining ones. The operation sequence depends only on ``p``, so the
    result is deterministic.

    Examples
    --------
    >>> evaluate(parse_poly("x^2 + y^2", "x,y"), (1, 1j))
    0j
    """
    point = tuple(complex(z) for z in point)
    if len(point) != p.nvars:
        raise DimensionMismatchError(
            f"Point has {len(point)} coordinates for {p.nvars} variables")
    if p.is_zero():
        return 0j
    terms = [(exps, complex(float(c))) for exps, c in p.terms.items()]
    return _horner(terms, point, 0)


# Random linear data
# ------------------
@dataclass(frozen = True)
class RationalLinearForm:
    """
    Linear form ``c_1 x_1 + ... + c_n x_n`` with exact coefficients.

    ``seed`` records how the coefficients were drawn; it is ``None`` for
    forms written by hand (the real test function ``x_1``, for example).
    """
    coefficients: tuple
    seed: int = None

    def __post_init__(self):
        coefficients = tuple(_as_fraction(c) for c in self.coefficients)
        if not coefficients:
            raise ValueError("A linear form needs at least one coefficient")
        if all(c == 0 for c in coefficients):
            raise ValueError("A linear form must have a nonzero coefficient")
        object.__setattr__(self, "coefficients", coefficients)

    @property
    def n(self):
        return len(self.coefficients)

    def __len__(self):
        return len(self.coefficients)

    def negated(self):
        return RationalLinearForm(tuple(-c for c in self.coefficients), self.seed)

    def as_polynomial(self, variables):
        variables = _check_variables(variables)
        if len(variables) != self.n:
            raise DimensionMismatchError(
                f"Form has {self.n} coefficients for {len(variables)} variables")
        terms = {}
        for k, c in enumerate(self.coefficients):
            terms[tuple(1 if j == k else 0 for j in range(self.n))] = c
        return Polynomial(variables, terms)

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.coefficients) + ")"


# (n, coefficients) -> first seed that drew them; oldest entries are evicted
_seen_forms = OrderedDict()
_seen_lock = threading.Lock()
SEEN_FORMS_LIMIT = 4096

COEFFICIENT_RANGE = (-100, 100)


def _record_form(form):
    key = (form.n, form.coefficients)
    with _seen_lock:
        previous = _seen_forms.setdefault(key, form.seed)
        _seen_forms.move_to_end(key)
        while len(_seen_forms) > SEEN_FORMS_LIMIT:
            _seen_forms.popitem(last = False)
    if previous != form.seed:
        logger.warning("linear forms for seeds %s and %s coincide: %s",
                       previous, form.seed, form)
    return previous


def random_linear_form(n: int, seed: int) -> RationalLinearForm:
    """
    Reproducible "generic" linear form.

    Coefficients are integers drawn uniformly from [-100, 100] by a Philox
    counter-based generator keyed by ``seed``; draws with a zero
    coefficient lie on a coordinate hyperplane and are redrawn. Two seeds
    giving the same form are allowed but logged as a warning; the most
    recent ``SEEN_FORMS_LIMIT`` forms are remembered for that check.

    Examples
    --------
    >>> random_linear_form(3, 0) == random_linear_form(3, 0)
    True
    """
    if not _is_integer(n) or n < 1:
        raise ValueError("n must be a positive integer")
    rng = _seeded_generator(seed, stream = 1)
    low, high = COEFFICIENT_RANGE
    while True:
        draw = rng.integers(low, high, size = n, endpoint = True)
        if all(draw):
            break
    form = RationalLinearForm(tuple(Fraction(int(c)) for c in draw), int(seed))
    _record_form(form)
    return form


def random_linear_change(variables, seed: int):
    """
    Random invertible linear change of coordinates and its exact inverse.

    Returns
    -------
    tuple of dict
        ``(forward, inverse)`` substitutions ``{name: Polynomial}`` in the
        same variables, such that substituting ``forward`` and then
        ``inverse`` is the identity.
    """
    variables = _check_variables(variables)
    n = len(variables)
    rng = _seeded_generator(seed, stream = 2)
    while True:
        matrix = [[Fraction(int(v)) for v in row]
                  for row in rng.integers(-5, 5, size = (n, n), endpoint = True)]
        try:
            inverse = invert_matrix(matrix)
        except ZeroDivisionError:
            continue
        break
    def as_mapping(m):
        out = {}
        for i, v in enumerate(variables):
            terms = {tuple(1 if j == k else 0 for j in range(n)): m[i][k] for k in range(n)}
            out[v] = Polynomial(variables, terms)
        return out
    return as_mapping(matrix), as_mapping(inverse)
