"""Truncated Malcev-Neumann series with exact rational coefficients.

A ``Series`` is a sparse map from exponent vectors to nonzero exact rational
coefficients, attached to a ``FieldSpec`` (which fixes the term order) and a
precision ``Box`` on which the stored coefficients are guaranteed to agree
with the untruncated series.  ``exact=True`` marks a Laurent polynomial whose
stored terms are its complete support; such values are exact everywhere and
the box is only carried along for bookkeeping.

Coefficients are ``fractions.Fraction`` values, with plain ``int`` allowed to
flow through as a fast path; both prune to nothing when they equal zero.

Box propagation through products follows the shift-and-intersect rule: each
factor's box is shifted by the other factor's initial phi-exponent, or — when
the other factor is exact, hence has fully known finite support — by every
exponent of that support, and everything is intersected.  Inversion and
stream composition sum geometric-style tails until the box-pruned power of
the positive-order part becomes empty, which terminates because only finitely
many sums of elements from a finite revlex-positive set can stay inside a
fixed box.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from fractions import Fraction
from functools import cmp_to_key
from math import factorial, gcd
from operator import add as _int_add

from .errors import (
    BadInitialTerm,
    NonpositiveOrder,
    OutOfPrecision,
    SpecMismatch,
    UsageError,
    ZeroDivisor,
    ZeroSeries,
)
from .ordering import Box, FieldSpec, revlex_compare


def _coeff(value):
    """Normalize a coefficient: integral Fractions become plain ints."""
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else value
    if isinstance(value, int):
        return value
    raise UsageError(f"coefficient {value!r} is not an exact rational")


def _recip(value):
    return _coeff(1 / Fraction(value))


def _vec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _vec_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _vec_neg(a):
    return tuple(-x for x in a)


class Series:
    """A truncated element of a twisted iterated Laurent field."""

    __slots__ = ("spec", "terms", "box", "exact")

    def __init__(self, spec, terms, box=None, exact=True):
        if box is None:
            box = spec.default_box()
        if len(box) != spec.n:
            raise SpecMismatch("box dimension does not match the field")
        clean = {}
        for exponent, value in terms.items():
            exponent = tuple(exponent)
            if len(exponent) != spec.n:
                raise SpecMismatch(
                    f"exponent {exponent} does not fit a {spec.n}-variable field"
                )
            value = _coeff(value)
            if value == 0:
                continue
            if exact or box.contains(spec.phi(exponent)):
                clean[exponent] = value
        self.spec = spec
        self.terms = clean
        self.box = box
        self.exact = exact

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def zero(cls, spec, box=None):
        return cls(spec, {}, box=box, exact=True)

    @classmethod
    def constant(cls, spec, value, box=None):
        return cls(spec, {(0,) * spec.n: value}, box=box, exact=True)

    @classmethod
    def monomial(cls, spec, exponent, coeff=1, box=None):
        return cls(spec, {tuple(exponent): coeff}, box=box, exact=True)

    @classmethod
    def variable(cls, spec, name, box=None):
        return cls.monomial(spec, spec.unit(name), box=box)

    # ------------------------------------------------------------------
    # basic queries

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def with_box(self, box):
        """Re-truncate to a (usually smaller) box; the guarantee persists."""
        if self.exact:
            return Series(self.spec, self.terms, box=box, exact=True)
        merged = self.box.intersect(box)
        if merged is None:
            raise OutOfPrecision("no overlap with the guaranteed box")
        return Series(self.spec, self.terms, box=merged, exact=False)

    def initial_term(self):
        """Exponent and coefficient of the least stored term."""
        if not self.terms:
            raise ZeroSeries("zero series has no initial term")
        spec = self.spec
        best = None
        best_phi = None
        for exponent in self.terms:
            p = spec.phi(exponent)
            if best is None or revlex_compare(p, best_phi) < 0:
                best, best_phi = exponent, p
        return best, self.terms[best]

    def order(self):
        return self.initial_term()[0]

    def coefficient(self, exponent):
        """Coefficient at an exponent; OutOfPrecision outside the guarantee."""
        exponent = tuple(exponent)
        if not self.exact and not self.box.contains(self.spec.phi(exponent)):
            raise OutOfPrecision(f"exponent {exponent} is outside the guaranteed box")
        return self.terms.get(exponent, 0)

    def constant_coefficient(self):
        return self.coefficient((0,) * self.spec.n)

    def guarantees(self, exponent):
        return self.exact or self.box.contains(self.spec.phi(tuple(exponent)))

    # ------------------------------------------------------------------
    # ring structure

    def _require_same_spec(self, other):
        if self.spec != other.spec:
            raise SpecMismatch("series live in different fields")

    def __add__(self, other):
        if not isinstance(other, Series):
            other = Series.constant(self.spec, other, box=self.box)
        self._require_same_spec(other)
        exact = self.exact and other.exact
        box = _meet_boxes(self, other)
        terms = dict(self.terms)
        for exponent, value in other.terms.items():
            terms[exponent] = terms.get(exponent, 0) + value
        return Series(self.spec, terms, box=box, exact=exact)

    __radd__ = __add__

    def __neg__(self):
        return Series(
            self.spec,
            {k: -v for k, v in self.terms.items()},
            box=self.box,
            exact=self.exact,
        )

    def __sub__(self, other):
        if not isinstance(other, Series):
            other = Series.constant(self.spec, other, box=self.box)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, value):
        value = _coeff(value)
        if value == 0:
            return Series(self.spec, {}, box=self.box, exact=self.exact)
        return Series(
            self.spec,
            {k: v * value for k, v in self.terms.items()},
            box=self.box,
            exact=self.exact,
        )

    def shift(self, exponent):
        """Multiply by the monomial x^exponent (exactness preserved)."""
        exponent = tuple(exponent)
        moved = {_vec_add(k, exponent): v for k, v in self.terms.items()}
        return Series(
            self.spec,
            moved,
            box=self.box.shift(self.spec.phi(exponent)),
            exact=self.exact,
        )

    def __mul__(self, other):
        if not isinstance(other, Series):
            return self.scale(other)
        return multiply(self, other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n):
        if not isinstance(n, int):
            raise UsageError("series powers must be integers")
        if n < 0:
            return self.invert() ** (-n)
        result = Series.constant(self.spec, 1, box=self.box)
        base = self
        while n:
            if n & 1:
                result = result * base
            base_needed = n > 1
            if base_needed:
                base = base * base
            n >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, Series):
            return self * other.invert()
        return self.scale(_recip(other))

    def __rtruediv__(self, other):
        return self.invert().scale(other)

    def invert(self):
        """Multiplicative inverse, truncated to the shifted box.

        Writes the series as c·x^m·(1 - tau) with ord(tau) positive and sums
        the geometric series in tau until the pruned power dies out.
        """
        if not self.terms:
            if self.exact:
                raise ZeroDivisor("cannot invert the zero series")
            raise OutOfPrecision("no initial term visible inside the box")
        spec = self.spec
        m, c = self.initial_term()
        inv_c = _recip(c)
        result_box = self.box.shift(_vec_neg(spec.phi(m)))
        if len(self.terms) == 1:
            return Series(spec, {_vec_neg(m): inv_c}, box=result_box, exact=self.exact)
        tau = {}
        for exponent, value in self.terms.items():
            if exponent == m:
                continue
            tau[_vec_sub(exponent, m)] = _coeff(-Fraction(value) * inv_c)
        total = _geometric_sum(spec, tau, self.box, lambda n: 1)
        shifted = {_vec_sub(k, m): _coeff(v * Fraction(inv_c)) for k, v in total.items()}
        return Series(spec, shifted, box=result_box, exact=False)

    def compose_stream(self, coefficients):
        """Sum coefficients(n)·self^n for n ≥ 0; needs ord(self) > 0."""
        spec = self.spec
        if self.terms:
            m, _ = self.initial_term()
            if not spec.is_positive(m):
                raise NonpositiveOrder(
                    f"composition needs positive order, initial exponent is {m}"
                )
        total = _geometric_sum(spec, self.terms, self.box, coefficients)
        return Series(spec, total, box=self.box, exact=False)

    def derivative(self, name):
        """Termwise d/dx on the named variable's exponent."""
        i = self.spec.index(name)
        unit = self.spec.unit(name)
        out = {}
        for exponent, value in self.terms.items():
            e = exponent[i]
            if e:
                out[_vec_sub(exponent, unit)] = value * e
        box = self.box.shift(_vec_neg(self.spec.phi(unit)))
        return Series(self.spec, out, box=box, exact=self.exact)

    # ------------------------------------------------------------------
    # coefficient extraction

    def _selected_indices(self, names):
        indices = []
        for name in names:
            i = self.spec.index(name)
            if i in indices:
                raise UsageError(f"variable {name!r} selected twice")
            indices.append(i)
        return indices

    def _project(self, names, want):
        spec = self.spec
        selected = self._selected_indices(names)
        keep = [i for i in range(spec.n) if i not in selected]
        if not keep:
            raise UsageError(
                "projection must leave at least one variable; "
                "use coefficient() for a full constant term"
            )
        residual = FieldSpec(
            tuple(spec.variables[i] for i in keep),
            tuple(tuple(spec.twist[i][j] for j in keep) for i in keep),
        )
        out = {}
        for exponent, value in self.terms.items():
            if all(exponent[i] == want for i in selected):
                out[tuple(exponent[i] for i in keep)] = value
        return Series(residual, out, box=self.box.project(keep), exact=self.exact)

    def ct(self, names):
        """Constant term in the named variables, projected out."""
        return self._project(names, 0)

    def res(self, names):
        """Residue (coefficient of exponent -1) in the named variables."""
        return self._project(names, -1)

    def ct_scalar(self):
        """Constant term in all variables, as a coefficient."""
        return self.coefficient((0,) * self.spec.n)

    def res_scalar(self):
        """Residue in all variables, as a coefficient."""
        return self.coefficient((-1,) * self.spec.n)

    def x_initial_term(self, names):
        """The x-term of least order, split into exponent and coefficient.

        Returns ``(leading_exponent, x_exponents, coefficient_series)`` where
        ``leading_exponent`` is the full exponent vector of the least stored
        term, ``x_exponents`` its restriction to the named variables, and the
        coefficient series collects every stored term sharing that x-part,
        projected onto the remaining variables.
        """
        if not self.terms:
            raise ZeroSeries("zero series has no x-initial term")
        selected = self._selected_indices(names)
        leading, _ = self.initial_term()
        xpart = tuple(leading[i] for i in selected)
        keep = [i for i in range(self.spec.n) if i not in selected]
        if keep:
            residual = FieldSpec(
                tuple(self.spec.variables[i] for i in keep),
                tuple(tuple(self.spec.twist[i][j] for j in keep) for i in keep),
            )
            out = {}
            for exponent, value in self.terms.items():
                if tuple(exponent[i] for i in selected) == xpart:
                    out[tuple(exponent[i] for i in keep)] = value
            coeff = Series(residual, out, box=self.box.project(keep), exact=self.exact)
        else:
            coeff = None
        return leading, xpart, coeff

    # ------------------------------------------------------------------
    # comparison and presentation

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return (
            self.spec == other.spec
            and self.terms == other.terms
            and self.box == other.box
            and self.exact == other.exact
        )

    __hash__ = None

    def equals_on(self, other, box=None):
        """Mathematical equality on the common guaranteed region."""
        if not isinstance(other, Series):
            other = Series.constant(self.spec, other, box=self.box)
        self._require_same_spec(other)
        region = box
        for side in (self, other):
            if not side.exact:
                region = side.box if region is None else region.intersect(side.box)
                if region is None:
                    raise OutOfPrecision("no common guaranteed box to compare on")
        spec = self.spec
        for exponent in set(self.terms) | set(other.terms):
            if region is not None and not region.contains(spec.phi(exponent)):
                continue
            if self.terms.get(exponent, 0) != other.terms.get(exponent, 0):
                return False
        return True

    def is_zero_on(self, box=None):
        return self.equals_on(Series.zero(self.spec, box=self.box), box=box)

    def sorted_terms(self):
        spec = self.spec
        return sorted(
            self.terms.items(), key=cmp_to_key(lambda a, b: spec.compare(a[0], b[0]))
        )

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exponent, value in self.sorted_terms():
            mono = "*".join(
                name if e == 1 else f"{name}^{e}"
                for name, e in zip(self.spec.variables, exponent)
                if e != 0
            )
            if not mono:
                text = str(value)
            elif value == 1:
                text = mono
            elif value == -1:
                text = "-" + mono
            else:
                text = f"{value}*{mono}"
            if parts:
                if text.startswith("-"):
                    parts.append(" - " + text[1:])
                else:
                    parts.append(" + " + text)
            else:
                parts.append(text)
        return "".join(parts)

    def __repr__(self):
        flag = "exact" if self.exact else "truncated"
        return f"Series({self!s} | {','.join(self.spec.variables)} | {flag})"

    def to_json(self):
        return {
            "vars": list(self.spec.variables),
            "twist": [list(row) for row in self.spec.twist],
            "terms": [
                {"exp": list(exponent), "coeff": str(Fraction(value))}
                for exponent, value in self.sorted_terms()
            ],
            "box": self.box.to_json(),
            "exact": self.exact,
        }

    @classmethod
    def from_json(cls, data):
        spec = FieldSpec(
            tuple(data["vars"]), tuple(tuple(row) for row in data["twist"])
        )
        box = Box(tuple((lo, hi) for lo, hi in data["box"]))
        terms = {
            tuple(item["exp"]): Fraction(item["coeff"]) for item in data["terms"]
        }
        return cls(spec, terms, box=box, exact=data["exact"])


# ----------------------------------------------------------------------
# multiplication

def _meet_boxes(a, b):
    box = a.box.intersect(b.box)
    if box is None:
        if a.exact and b.exact:
            return a.box
        raise OutOfPrecision("operand boxes do not overlap")
    return box


def _lcm(a, b):
    return a * b // gcd(a, b)


def _int_normal(terms):
    """Factor out the common denominator: (den, integer term dict)."""
    den = 1
    for value in terms.values():
        if isinstance(value, Fraction):
            den = _lcm(den, value.denominator)
    if den == 1:
        return 1, terms
    out = {}
    for exponent, value in terms.items():
        if isinstance(value, Fraction):
            out[exponent] = value.numerator * (den // value.denominator)
        else:
            out[exponent] = value * den
    return den, out


def _convolve(spec, aterms, bterms, keep):
    """Raw convolution of sparse term dicts, pruned to ``keep`` if given.

    The pair loop runs on integers (common denominators pulled out first);
    rational normalization happens once per output term, not once per pair.
    """
    int_add = _int_add
    if not aterms or not bterms:
        return {}
    if len(aterms) > len(bterms):
        aterms, bterms = bterms, aterms
    da, aterms = _int_normal(aterms)
    db, bterms = _int_normal(bterms)
    out = {}
    get = out.get
    if keep is None:
        bitems = list(bterms.items())
        for ka, va in aterms.items():
            for kb, vb in bitems:
                key = tuple(map(int_add, ka, kb))
                out[key] = get(key, 0) + va * vb
    else:
        bounds = keep.bounds
        # sort by the most significant phi-coordinate so each outer term only
        # scans the admissible band
        bphi = sorted(
            ((spec.phi(k), k, v) for k, v in bterms.items()),
            key=lambda item: item[0][-1],
        )
        blast = [item[0][-1] for item in bphi]
        lo_last, hi_last = bounds[-1]
        for ka, va in aterms.items():
            pa = spec.phi(ka)
            shifted = tuple((lo - x, hi - x) for (lo, hi), x in zip(bounds, pa))
            start = bisect_left(blast, lo_last - pa[-1])
            stop = bisect_right(blast, hi_last - pa[-1])
            for pb, kb, vb in bphi[start:stop]:
                ok = True
                for y, (lo, hi) in zip(pb, shifted):
                    if y < lo or y > hi:
                        ok = False
                        break
                if not ok:
                    continue
                key = tuple(map(int_add, ka, kb))
                out[key] = get(key, 0) + va * vb
    scale = da * db
    if scale == 1:
        return {k: v for k, v in out.items() if v != 0}
    return {k: _coeff(Fraction(v, scale)) for k, v in out.items() if v != 0}


def multiply(a, b, box=None):
    """Product with shift-and-intersect box propagation.

    ``box`` optionally clips the claimed result box further.
    """
    a._require_same_spec(b)
    spec = a.spec
    if a.exact and b.exact:
        result_box = _meet_boxes(a, b)
        if box is not None:
            clipped = result_box.intersect(box)
            result_box = clipped if clipped is not None else result_box
        return Series(spec, _convolve(spec, a.terms, b.terms, None),
                      box=result_box, exact=True)
    if (a.exact and not a.terms) or (b.exact and not b.terms):
        return Series.zero(spec, box=_meet_boxes(a, b))
    candidates = []
    for mine, other in ((a, b), (b, a)):
        if mine.exact:
            continue
        if other.exact:
            for exponent in other.terms:
                candidates.append(mine.box.shift(spec.phi(exponent)))
        elif other.terms:
            initial, _ = other.initial_term()
            candidates.append(mine.box.shift(spec.phi(initial)))
        else:
            candidates.append(mine.box)
    result_box = candidates[0]
    for candidate in candidates[1:]:
        result_box = result_box.intersect(candidate)
        if result_box is None:
            raise OutOfPrecision("product has no guaranteed region")
    if box is not None:
        result_box = result_box.intersect(box)
        if result_box is None:
            raise OutOfPrecision("product has no guaranteed region in the given box")
    terms = _convolve(spec, a.terms, b.terms, result_box)
    return Series(spec, terms, box=result_box, exact=False)


# ----------------------------------------------------------------------
# geometric machinery

def _geometric_sum(spec, tau, box, coefficients):
    """Sum of coefficients(n)·tau^n pruned to ``box``.

    Requires every exponent of ``tau`` to be revlex-positive through the
    twist; the pruned powers then provably die out (only finitely many sums
    of elements of a finite positive set fit inside a fixed box).
    """
    zero = (0,) * spec.n
    total = {}
    c0 = _coeff(coefficients(0))
    if c0 != 0:
        total[zero] = c0
    if not tau:
        return total
    power = {zero: 1}
    n = 0
    while power:
        n += 1
        power = _convolve(spec, power, tau, box)
        if not power:
            break
        cn = _coeff(coefficients(n))
        if cn != 0:
            for exponent, value in power.items():
                total[exponent] = total.get(exponent, 0) + value * cn
    return {k: v for k, v in total.items() if v != 0}


def exp_of(series):
    """exp applied to a positive-order series."""
    return series.compose_stream(lambda n: Fraction(1, factorial(n)))


def log_of(series):
    """log of a series whose initial term is exactly 1."""
    if not series.terms:
        raise BadInitialTerm("log needs initial term 1, series is zero")
    exponent, value = series.initial_term()
    if any(exponent) or value != 1:
        raise BadInitialTerm(f"log needs initial term 1, found {value} at {exponent}")
    tail = series - Series.constant(series.spec, 1, box=series.box)
    return tail.compose_stream(lambda n: Fraction((-1) ** (n + 1), n) if n else 0)


def compose_univariate(coefficients, series):
    """Sum coefficients(n)·series^n; the stream view of composition."""
    return series.compose_stream(coefficients)
