"""
Cycle algebra over a stratification.

A Lagrangian cycle is a finite integer combination of conormal varieties
``[T*_S X]`` indexed by stratum labels. Local Euler characteristic
functions and cycles are converted into each other with the index rule

    chi(T) = sum over S >= T of m_S * Eu_{closure S}(T),

solved top-down (maximal strata first) in the inverse direction.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from graphlib import TopologicalSorter, CycleError
from types import MappingProxyType

import polars as pl

from .config import DEFAULT_STABILITY_WINDOW
from .errors import (PosetError, PosetMismatchError, MissingEulerRowError,
                     MissingMorseDataError, NotStabilizedError, PreconditionError)
from .utils import _as_fraction, _is_integer, _sign_power

__all__ = [
    "Stratum", "StratificationPoset", "EulerObstructionTable",
    "LagrangianCycle", "ConstructibleFunction",
    "FamilyOfCycles", "ConstancyReport",
    "cycle_add", "cycle_negate", "cycle_scale", "cycle_shift",
    "chi_from_cc", "cc_from_chi", "pair_with_test",
    "limit_of_family", "constancy_check",
    "isolated_hypersurface_strata",
]

logger = logging.getLogger(__name__)


@dataclass(frozen = True)
class Stratum:
    label: str
    dim: int
    ambient_dim: int
    real: bool = False


class StratificationPoset:
    """
    Strata with their closure order.

    Parameters
    ----------
    strata : list of Stratum
    closure : iterable of pairs
        ``(T, S)`` meaning ``T`` lies in the closure of ``S``. The order is
        completed reflexively and transitively.

    Raises
    ------
    PosetError
        When the relation has a cycle, or dimension does not drop strictly
        along the strict order.

    Examples
    --------
    >>> P = StratificationPoset([Stratum("Z_reg", 1, 2), Stratum("{0}", 0, 2)],
    ...                         [("{0}", "Z_reg")])
    >>> P.top_down()
    ('Z_reg', '{0}')
    """

    def __init__(self, strata, closure = ()):
        strata = list(strata)
        labels = [s.label for s in strata]
        if len(set(labels)) != len(labels):
            raise PosetError("Each stratum needs exactly one label", labels = labels)
        self._strata = {s.label: s for s in strata}
        above = {s: set() for s in labels}
        for lower, upper in closure:
            for label in (lower, upper):
                if label not in self._strata:
                    raise PosetError(f"Unknown stratum {label!r} in closure relation")
            if lower != upper:
                above[lower].add(upper)
        # a topological order of the "is contained in the closure of" graph
        try:
            order = tuple(TopologicalSorter(above).static_order())
        except CycleError as e:
            raise PosetError("Closure relation has a cycle", cycle = list(e.args[1])) from None
        # static_order lists the strata above a stratum before it
        closed = {}
        for label in order:
            up = set(above[label])
            for parent in above[label]:
                up |= closed[parent]
            closed[label] = up
        self._above = {k: frozenset(v) for k, v in closed.items()}
        self._order = order
        for label, ups in self._above.items():
            for up in ups:
                if self._strata[up].dim <= self._strata[label].dim:
                    raise PosetError(
                        f"Dimension must drop from {up!r} to {label!r}",
                        upper = up, lower = label)

    @property
    def labels(self):
        return tuple(self._strata)

    def __contains__(self, label):
        return label in self._strata

    def __len__(self):
        return len(self._strata)

    def __iter__(self):
        return iter(self._strata.values())

    def __eq__(self, other):
        if not isinstance(other, StratificationPoset):
            return NotImplemented
        return self._strata == other._strata and self._above == other._above

    def __hash__(self):
        return hash((frozenset(self._strata.items()), frozenset(self._above.items())))

    def __repr__(self):
        return f"StratificationPoset({list(self.labels)})"

    def stratum(self, label):
        return self._strata[label]

    def dim(self, label):
        return self._strata[label].dim

    def leq(self, lower, upper):
        """``lower`` lies in the closure of ``upper`` (reflexive)."""
        return lower == upper or upper in self._above[lower]

    def above(self, label):
        """Strata whose closure contains ``label``, including itself."""
        return frozenset({label}) | self._above[label]

    def below(self, label):
        return frozenset(t for t in self._strata if self.leq(t, label))

    def top_down(self):
        """Labels ordered so that every stratum comes after all strata above it."""
        return self._order

    def to_polars(self):
        return pl.DataFrame({
            "stratum": list(self.labels),
            "dim": [s.dim for s in self],
            "ambient_dim": [s.ambient_dim for s in self],
            "closure_of": [";".join(sorted(self._above[s])) for s in self.labels],
        })

    @classmethod
    def from_polars(cls, df):
        """
        Build from a table with columns ``stratum``, ``dim``,
        ``ambient_dim`` and ``closure_of`` (strata whose closure contains
        the row's stratum, separated by ``;``).
        """
        strata = [Stratum(r["stratum"], int(r["dim"]), int(r["ambient_dim"]))
                  for r in df.iter_rows(named = True)]
        closure = []
        for r in df.iter_rows(named = True):
            for upper in (r["closure_of"] or "").split(";"):
                if upper.strip():
                    closure.append((r["stratum"], upper.strip()))
        return cls(strata, closure)


class EulerObstructionTable:
    """
    Values ``Eu_{closure S}(T)`` for ``T <= S``.

    Parameters
    ----------
    poset : StratificationPoset
    rows : dict
        ``{S: {T: value}}``. Every row must have ``Eu(S, S) = 1`` and only
        mention strata in the closure of ``S``. Missing diagonal entries
        are filled with 1.
    """

    def __init__(self, poset, rows):
        self.poset = poset
        clean = {}
        for upper, row in rows.items():
            if upper not in poset:
                raise ValueError(f"Unknown stratum {upper!r}")
            row = {t: int(v) for t, v in row.items()}
            row.setdefault(upper, 1)
            if row[upper] != 1:
                raise ValueError(f"Eu({upper}, {upper}) must be 1, got {row[upper]}")
            outside = [t for t in row if not poset.leq(t, upper)]
            if outside:
                raise ValueError(f"Row {upper!r} has entries outside its closure: {outside}")
            clean[upper] = MappingProxyType(row)
        self._rows = clean

    @classmethod
    def smooth_closures(cls, poset):
        """Every closure smooth: all entries 1."""
        return cls(poset, {s: {t: 1 for t in poset.below(s)} for s in poset.labels})

    @classmethod
    def isolated_hypersurface(cls, poset, n, mu_section, zreg = "Z_reg", origin = "{0}"):
        """``Eu_Z(0) = 1 + (-1)^n mu_section``; the point row is trivial."""
        return cls(poset, {
            zreg: {zreg: 1, origin: 1 + _sign_power(n) * mu_section},
            origin: {origin: 1},
        })

    @classmethod
    def from_polars(cls, poset, df):
        """Table with columns ``closure``, ``stratum`` and ``eu``."""
        rows = {}
        for r in df.iter_rows(named = True):
            rows.setdefault(r["closure"], {})[r["stratum"]] = r["eu"]
        return cls(poset, rows)

    def has_row(self, label):
        return label in self._rows

    def value(self, upper, lower):
        if upper not in self._rows:
            raise MissingEulerRowError(f"No Euler obstruction row for {upper!r}", stratum = upper)
        if not self.poset.leq(lower, upper):
            return 0
        row = self._rows[upper]
        if lower not in row:
            raise MissingEulerRowError(
                f"Euler obstruction row {upper!r} has no value at {lower!r}",
                stratum = upper, at = lower)
        return row[lower]

    def to_polars(self):
        out = [(s, t, v) for s, row in self._rows.items() for t, v in row.items()]
        return pl.DataFrame(out, schema = ["closure", "stratum", "eu"], orient = "row")


def _check_same_poset(a, b):
    if a.poset != b.poset:
        raise PosetMismatchError("Cycles live over different stratifications")


class LagrangianCycle:
    """
    Integer combination ``sum m_S [T*_S X]`` over a stratification.

    Zero multiplicities are dropped; labels must belong to the poset.

    Examples
    --------
    >>> c = LagrangianCycle(P, {"Z_reg": -1, "{0}": 2})
    >>> print(c)
    -[T*_{Z_reg}] + 2[T*_{0}]
    """

    __slots__ = ("poset", "_mult")

    def __init__(self, poset, multiplicities = None):
        multiplicities = dict(multiplicities or {})
        unknown = [s for s in multiplicities if s not in poset]
        if unknown:
            raise PosetMismatchError(f"Strata {unknown} are not in the stratification")
        for s, m in multiplicities.items():
            if not _is_integer(m):
                raise TypeError(f"Multiplicity of {s!r} must be an integer, got {m!r}")
        self.poset = poset
        self._mult = MappingProxyType({s: int(m) for s, m in multiplicities.items() if m != 0})

    @property
    def multiplicities(self):
        return self._mult

    @property
    def support(self):
        return frozenset(self._mult)

    def __getitem__(self, label):
        return self._mult.get(label, 0)

    def is_zero(self):
        return not self._mult

    def __eq__(self, other):
        if not isinstance(other, LagrangianCycle):
            return NotImplemented
        return self.poset == other.poset and dict(self._mult) == dict(other._mult)

    def __hash__(self):
        return hash(frozenset(self._mult.items()))

    def __add__(self, other):
        return cycle_add(self, other)

    def __neg__(self):
        return cycle_negate(self)

    def __sub__(self, other):
        return cycle_add(self, cycle_negate(other))

    def __mul__(self, k):
        return cycle_scale(self, k)

    __rmul__ = __mul__

    def __str__(self):
        if not self._mult:
            return "0"
        pieces = []
        for label in self.poset.top_down():
            m = self._mult.get(label)
            if m is None:
                continue
            name = label[1:-1] if label.startswith("{") and label.endswith("}") else label
            body = f"[T*_{{{name}}}]"
            coeff = "" if abs(m) == 1 else str(abs(m))
            pieces.append(("-" if m < 0 else "+", coeff + body))
        text = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"LagrangianCycle({dict(self._mult)})"

    def as_records(self):
        """``[{'stratum', 'dim', 'multiplicity'}]`` in top-down order, zeros omitted."""
        return [{"stratum": s, "dim": self.poset.dim(s), "multiplicity": self._mult[s]}
                for s in self.poset.top_down() if s in self._mult]

    def to_polars(self):
        return pl.DataFrame(self.as_records(),
                            schema = {"stratum": pl.Utf8, "dim": pl.Int64, "multiplicity": pl.Int64})


class ConstructibleFunction:
    """Integer value per stratum; unlisted strata carry 0."""

    __slots__ = ("poset", "_values")

    def __init__(self, poset, values = None):
        values = dict(values or {})
        unknown = [s for s in values if s not in poset]
        if unknown:
            raise PosetMismatchError(f"Strata {unknown} are not in the stratification")
        self.poset = poset
        self._values = MappingProxyType({s: int(v) for s, v in values.items() if v != 0})

    @property
    def values(self):
        return self._values

    def __getitem__(self, label):
        return self._values.get(label, 0)

    def __eq__(self, other):
        if not isinstance(other, ConstructibleFunction):
            return NotImplemented
        return self.poset == other.poset and dict(self._values) == dict(other._values)

    def __hash__(self):
        return hash(frozenset(self._values.items()))

    def __repr__(self):
        return f"ConstructibleFunction({ {s: self[s] for s in self.poset.top_down()} })"


# Cycle arithmetic
# ----------------
def cycle_add(a: LagrangianCycle, b: LagrangianCycle) -> LagrangianCycle:
    _check_same_poset(a, b)
    out = dict(a.multiplicities)
    for s, m in b.multiplicities.items():
        out[s] = out.get(s, 0) + m
    return LagrangianCycle(a.poset, out)


def cycle_negate(c: LagrangianCycle) -> LagrangianCycle:
    return LagrangianCycle(c.poset, {s: -m for s, m in c.multiplicities.items()})


def cycle_scale(c: LagrangianCycle, k: int) -> LagrangianCycle:
    if not _is_integer(k):
        return NotImplemented
    return LagrangianCycle(c.poset, {s: k * m for s, m in c.multiplicities.items()})


def cycle_shift(c: LagrangianCycle, k: int) -> LagrangianCycle:
    """Cycle of the shifted complex ``F[k]``: multiplicities times ``(-1)^k``."""
    return cycle_scale(c, _sign_power(k))


# Index theorem
# -------------
def chi_from_cc(c: LagrangianCycle, eu: EulerObstructionTable) -> ConstructibleFunction:
    """
    Local Euler characteristics from a characteristic cycle.

    ``chi(T) = sum_{S >= T} m_S Eu_{closure S}(T)``.

    Raises
    ------
    MissingEulerRowError
        When a stratum in the support of ``c`` has no Euler obstruction row.
    """
    if c.poset != eu.poset:
        raise PosetMismatchError("Cycle and Euler obstruction table use different stratifications")
    for s in c.support:
        if not eu.has_row(s):
            raise MissingEulerRowError(f"No Euler obstruction row for {s!r}", stratum = s)
    values = {}
    for t in c.poset.labels:
        values[t] = sum(m * eu.value(s, t) for s, m in c.multiplicities.items()
                        if c.poset.leq(t, s))
    return ConstructibleFunction(c.poset, values)


def cc_from_chi(chi: ConstructibleFunction, eu: EulerObstructionTable) -> LagrangianCycle:
    """
    Characteristic cycle from local Euler characteristics.

    Inverts ``chi_from_cc`` along the closure order, maximal strata first.

    Raises
    ------
    MissingEulerRowError
        When a stratum with nonzero multiplicity has no Euler obstruction row.
    """
    poset = chi.poset
    if poset != eu.poset:
        raise PosetMismatchError("Function and Euler obstruction table use different stratifications")
    mult = {}
    for t in poset.top_down():
        higher = sum(m * eu.value(s, t) for s, m in mult.items()
                     if s != t and poset.leq(t, s))
        m = chi[t] - higher
        if m:
            if not eu.has_row(t):
                raise MissingEulerRowError(f"No Euler obstruction row for {t!r}", stratum = t)
            mult[t] = m
    return LagrangianCycle(poset, mult)


def pair_with_test(c: LagrangianCycle, morse_data) -> int:
    """
    Signed pairing of ``c`` with the graph of ``d phi``.

    Parameters
    ----------
    c : LagrangianCycle
    morse_data : dict
        ``{stratum: [Morse index, ...]}`` for the critical points of the
        test function on each stratum of the support.

    Returns
    -------
    int
        ``sum_S m_S * sum_p (-1)^index(p)``.

    Examples
    --------
    >>> pair_with_test(LagrangianCycle(P, {"S": 3}), {"S": [1]})
    -3
    """
    total = 0
    for s, m in c.multiplicities.items():
        if s not in morse_data:
            raise MissingMorseDataError(f"No Morse data for stratum {s!r}", stratum = s)
        total += m * sum(_sign_power(k) for k in morse_data[s])
    return total


# Families and limits
# -------------------
def _payload_text(p):
    return str(p)


@dataclass(frozen = True)
class FamilyOfCycles:
    """
    Samples ``(a, payload)`` at strictly decreasing positive parameters.

    The payload is a ``LagrangianCycle`` or an integer pairing.
    """
    samples: tuple

    def __post_init__(self):
        samples = tuple((_as_fraction(a), p) for a, p in self.samples)
        if len(samples) < 2:
            raise PreconditionError("A family needs at least two samples")
        params = [a for a, _ in samples]
        if any(a <= 0 for a in params):
            raise PreconditionError("Family parameters must be positive")
        if any(x <= y for x, y in zip(params, params[1:])):
            raise PreconditionError("Family parameters must be strictly decreasing")
        object.__setattr__(self, "samples", samples)

    @property
    def parameters(self):
        return tuple(a for a, _ in self.samples)

    @property
    def payloads(self):
        return tuple(p for _, p in self.samples)

    def __len__(self):
        return len(self.samples)

    def tail(self, k):
        return self.samples[-k:]

    def to_polars(self):
        return pl.DataFrame({
            "a": [str(a) for a in self.parameters],
            "payload": [_payload_text(p) for p in self.payloads],
        })


@dataclass(frozen = True)
class ConstancyReport:
    passed: bool
    value: object
    deviations: tuple = ()

    def as_dict(self):
        return {
            "passed": self.passed,
            "value": _payload_text(self.value),
            "deviations": [{"a": str(a), "payload": _payload_text(p)} for a, p in self.deviations],
        }


def limit_of_family(fam: FamilyOfCycles, stability_window = DEFAULT_STABILITY_WINDOW):
    """
    Limit as the parameter goes to zero, read off the last samples.

    Returns
    -------
    LagrangianCycle or int
        The common payload of the last ``stability_window`` samples.

    Raises
    ------
    NotStabilizedError
        When those samples differ; carries the tail.

    Examples
    --------
    >>> limit_of_family(FamilyOfCycles(((Fraction(1, 10), 2), (Fraction(1, 100), 2),
    ...                                 (Fraction(1, 1000), 2))))
    2
    """
    if stability_window < 1:
        raise ValueError("stability_window must be positive")
    if len(fam) < stability_window:
        raise PreconditionError(
            f"Family has {len(fam)} samples, fewer than the window {stability_window}")
    tail = fam.tail(stability_window)
    first = tail[0][1]
    if any(p != first for _, p in tail[1:]):
        raise NotStabilizedError(
            f"Last {stability_window} samples differ",
            tail = [(str(a), _payload_text(p)) for a, p in tail])
    return first


def constancy_check(fam: FamilyOfCycles) -> ConstancyReport:
    """
    Whether every sample of the family carries the same payload.

    The reference value is the most frequent payload (ties go to the one
    seen at the smallest parameter); the report lists the samples that
    differ from it.
    """
    counts = Counter(_payload_text(p) for p in fam.payloads)
    best = max(counts.values())
    reference = next(p for p in reversed(fam.payloads) if counts[_payload_text(p)] == best)
    deviations = tuple((a, p) for a, p in fam.samples if p != reference)
    if deviations:
        logger.info("family not constant: %d deviating sample(s)", len(deviations))
    return ConstancyReport(not deviations, reference, deviations)


def isolated_hypersurface_strata(n, zreg = "Z_reg", origin = "{0}"):
    """Stratification of the zero locus of an isolated singularity in ``n`` variables."""
    return StratificationPoset(
        [Stratum(zreg, n - 1, n), Stratum(origin, 0, n)],
        [(origin, zreg)],
    )
