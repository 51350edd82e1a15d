"""Sparse multivariate polynomials over Q(zeta_m).

A polynomial is a finite map from exponent vectors (plain int tuples) to
nonzero scalars.  Terms are stored in descending graded-lex order with
the natural variable priority x1 > x2 > ... > xn, so iteration and text
output are deterministic.  Polynomials are immutable; all operations are
pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DegreeCapError, FieldMismatchError, VariableCountError
from .field import CyclotomicScalar, FieldConfig

# Hard bound on the total degree of any stored monomial.  Keeps all
# expansions desk-scale; exceeding it raises instead of running away.
MAX_TOTAL_DEGREE = 32

NEG_INF = float("-inf")

# Weight vector used by the omega-degree lemmas in three variables.
OMEGA = (-1, 0, 1)


@dataclass(frozen=True)
class MonomialOrder:
    """A total order on monomials: lex or graded lex, with a variable priority.

    ``priority`` lists 0-based variable indices from most to least
    significant; the default is x1 > x2 > ... > xn.
    """

    kind: str
    priority: tuple

    def __post_init__(self):
        if self.kind not in ("lex", "grlex"):
            raise ValueError(f"unknown order kind {self.kind!r}")
        if sorted(self.priority) != list(range(len(self.priority))):
            raise ValueError("priority must be a permutation of the variables")

    @classmethod
    def lex(cls, n: int, priority=None) -> "MonomialOrder":
        return cls("lex", tuple(priority) if priority else tuple(range(n)))

    @classmethod
    def grlex(cls, n: int, priority=None) -> "MonomialOrder":
        return cls("grlex", tuple(priority) if priority else tuple(range(n)))

    def key(self, beta):
        """Sort key: bigger key = bigger monomial."""
        permuted = tuple(beta[p] for p in self.priority)
        if self.kind == "grlex":
            return (sum(beta),) + permuted
        return permuted

    def greater(self, a, b) -> bool:
        return self.key(a) > self.key(b)

    def __str__(self):
        vars_desc = ">".join(f"x{p + 1}" for p in self.priority)
        return f"{self.kind}:{vars_desc}"


def _check_beta(beta, n):
    if len(beta) != n:
        raise VariableCountError(f"exponent vector {beta} does not have {n} entries")
    if any(e < 0 for e in beta):
        raise ValueError(f"negative exponent in {beta}")
    if sum(beta) > MAX_TOTAL_DEGREE:
        raise DegreeCapError(
            f"total degree {sum(beta)} exceeds the construction cap {MAX_TOTAL_DEGREE}"
        )


class Polynomial:
    """Immutable sparse polynomial in n variables over one field config."""

    __slots__ = ("n", "config", "terms")

    def __init__(self, n: int, config: FieldConfig, terms=None):
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "config", config)
        cleaned = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for beta, coeff in items:
                beta = tuple(beta)
                _check_beta(beta, n)
                coeff = config.scalar(coeff)
                if not coeff.is_zero():
                    cleaned[beta] = coeff
        ordered = sorted(cleaned, key=lambda b: (sum(b), b), reverse=True)
        object.__setattr__(self, "terms", {b: cleaned[b] for b in ordered})

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, n: int, config: FieldConfig) -> "Polynomial":
        return cls(n, config)

    @classmethod
    def constant(cls, n: int, config: FieldConfig, value) -> "Polynomial":
        return cls(n, config, {(0,) * n: value})

    @classmethod
    def variable(cls, n: int, config: FieldConfig, index: int) -> "Polynomial":
        """The variable x_index, 1-based."""
        if not 1 <= index <= n:
            raise VariableCountError(f"variable index {index} out of range 1..{n}")
        beta = tuple(1 if i == index - 1 else 0 for i in range(n))
        return cls(n, config, {beta: 1})

    @classmethod
    def monomial(cls, n: int, config: FieldConfig, beta, coeff=1) -> "Polynomial":
        return cls(n, config, {tuple(beta): coeff})

    # -- basic queries ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self):
        """Total degree; NEG_INF for the zero polynomial."""
        if not self.terms:
            return NEG_INF
        return max(sum(b) for b in self.terms)

    def deg_omega(self, omega=OMEGA):
        """Weighted degree max(omega . beta); NEG_INF for zero."""
        if len(omega) != self.n:
            raise VariableCountError("weight vector length mismatch")
        if not self.terms:
            return NEG_INF
        return max(sum(w * e for w, e in zip(omega, b)) for b in self.terms)

    def coefficient(self, beta) -> CyclotomicScalar:
        return self.terms.get(tuple(beta), self.config.zero)

    def leading_term(self, order: MonomialOrder):
        """(-largest monomial, its coefficient) under the given order."""
        if not self.terms:
            raise ValueError("the zero polynomial has no leading term")
        beta = max(self.terms, key=order.key)
        return beta, self.terms[beta]

    def homogeneous_components(self) -> dict:
        """Map degree -> homogeneous part; empty for the zero polynomial."""
        parts = {}
        for beta, coeff in self.terms.items():
            parts.setdefault(sum(beta), {})[beta] = coeff
        return {
            d: Polynomial(self.n, self.config, bucket)
            for d, bucket in sorted(parts.items())
        }

    def homogeneous_component(self, d: int) -> "Polynomial":
        bucket = {b: c for b, c in self.terms.items() if sum(b) == d}
        return Polynomial(self.n, self.config, bucket)

    # -- arithmetic ---------------------------------------------------------

    def _check_compat(self, other):
        if other.n != self.n:
            raise VariableCountError(
                f"cannot combine polynomials in {self.n} and {other.n} variables"
            )
        if other.config.m != self.config.m:
            raise FieldMismatchError(
                f"mixed conductors m={self.config.m} and m={other.config.m}"
            )

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            self._check_compat(other)
            return other
        if isinstance(other, (int, Fraction, CyclotomicScalar)):
            return Polynomial.constant(self.n, self.config, other)
        return None

    def __add__(self, other):
        g = self._coerce(other)
        if g is None:
            return NotImplemented
        acc = dict(self.terms)
        for beta, coeff in g.terms.items():
            s = acc.get(beta)
            acc[beta] = coeff if s is None else s + coeff
        return Polynomial(self.n, self.config, acc)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.n, self.config, {b: -c for b, c in self.terms.items()})

    def __sub__(self, other):
        g = self._coerce(other)
        if g is None:
            return NotImplemented
        return self + (-g)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CyclotomicScalar)):
            return self.scale(other)
        g = self._coerce(other)
        if g is None:
            return NotImplemented
        acc = {}
        for b1, c1 in self.terms.items():
            for b2, c2 in g.terms.items():
                beta = tuple(e1 + e2 for e1, e2 in zip(b1, b2))
                prod = c1 * c2
                s = acc.get(beta)
                acc[beta] = prod if s is None else s + prod
        return Polynomial(self.n, self.config, acc)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, CyclotomicScalar)):
            return self.scale(other)
        return self.__mul__(other)

    def scale(self, value) -> "Polynomial":
        c = self.config.scalar(value)
        if c.is_zero():
            return Polynomial.zero(self.n, self.config)
        return Polynomial(self.n, self.config, {b: k * c for b, k in self.terms.items()})

    def __truediv__(self, value):
        if isinstance(value, (int, Fraction, CyclotomicScalar)):
            return self.scale(self.config.scalar(value).inverse())
        return NotImplemented

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("polynomial powers take nonnegative integer exponents")
        acc = Polynomial.constant(self.n, self.config, 1)
        base = self
        e = exponent
        while e:
            if e & 1:
                acc = acc * base
            if e > 1:
                base = base * base
            e >>= 1
        return acc

    # -- comparison / hashing --------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return (
                self.n == other.n
                and self.config.m == other.config.m
                and self.terms == other.terms
            )
        if isinstance(other, (int, Fraction, CyclotomicScalar)):
            return self == Polynomial.constant(self.n, self.config, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.n, self.config.m, tuple(self.terms.items())))

    # -- formatting -------------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        chunks = []
        for beta, coeff in self.terms.items():
            sign, body = _term_text(beta, coeff)
            if not chunks:
                chunks.append(("-" if sign < 0 else "") + body)
            else:
                chunks.append((" - " if sign < 0 else " + ") + body)
        return "".join(chunks)

    def __repr__(self):
        return f"<poly {self} (n={self.n}, m={self.config.m})>"


def _monomial_text(beta) -> str:
    factors = []
    for i, e in enumerate(beta):
        if e == 1:
            factors.append(f"x{i + 1}")
        elif e > 1:
            factors.append(f"x{i + 1}^{e}")
    return "*".join(factors)


def _term_text(beta, coeff: CyclotomicScalar):
    """(sign, body) for one term; multi-component scalars are parenthesized."""
    mon = _monomial_text(beta)
    parts = coeff.components()
    if len(parts) > 1:
        body = f"({coeff})"
        return 1, f"{body}*{mon}" if mon else body
    power, q = parts[0]
    sign = -1 if q < 0 else 1
    q = abs(q)
    factors = []
    if power == 0:
        if q != 1 or not mon:
            factors.append(str(q))
    else:
        if q != 1:
            factors.append(str(q))
        factors.append("z" if power == 1 else f"z^{power}")
    if mon:
        factors.append(mon)
    return sign, "*".join(factors)


def monomial_basis(n: int, d: int) -> tuple:
    """All exponent vectors of total degree d, descending graded-lex.

    This is the fixed coordinate order used by every per-degree matrix.
    """
    if d < 0:
        raise ValueError("degree must be nonnegative")

    out = []

    def emit(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for e in range(remaining, -1, -1):
            emit(prefix + (e,), remaining - e, slots - 1)

    emit((), d, n)
    return tuple(out)


def component_dimension(n: int, d: int) -> int:
    """dim of the homogeneous component of degree d: C(d+n-1, n-1)."""
    return math.comb(d + n - 1, n - 1)


@dataclass(frozen=True)
class GradedComponent:
    """The degree-d homogeneous slice with its ordered monomial basis."""

    n: int
    degree: int
    basis: tuple

    @classmethod
    def of(cls, n: int, d: int) -> "GradedComponent":
        return cls(n, d, monomial_basis(n, d))

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def index(self) -> dict:
        return {beta: i for i, beta in enumerate(self.basis)}


def substitute_linear(f: Polynomial, matrix) -> Polynomial:
    """Apply the algebra endomorphism x_j -> sum_i x_i * M[i][j].

    The convention matches maps given by a row vector of variables times a
    matrix.  Multiplicative and linear; composition satisfies
    substitute_linear(substitute_linear(f, M), M2) = substitute_linear(f, M2 * M).
    """
    rows = matrix.rows
    if matrix.nrows != f.n or matrix.ncols != f.n:
        raise VariableCountError(
            f"matrix is {matrix.nrows}x{matrix.ncols}, expected {f.n}x{f.n}"
        )
    images = []
    for j in range(f.n):
        col = {}
        for i in range(f.n):
            if not rows[i][j].is_zero():
                beta = tuple(1 if k == i else 0 for k in range(f.n))
                col[beta] = rows[i][j]
        images.append(Polynomial(f.n, f.config, col))

    pow_cache = [{0: Polynomial.constant(f.n, f.config, 1)} for _ in range(f.n)]

    def image_power(j, e):
        cache = pow_cache[j]
        if e not in cache:
            top = max(cache)
            acc = cache[top]
            for k in range(top + 1, e + 1):
                acc = acc * images[j]
                cache[k] = acc
        return cache[e]

    result = Polynomial.zero(f.n, f.config)
    for beta, coeff in f.terms.items():
        term = Polynomial.constant(f.n, f.config, coeff)
        for j, e in enumerate(beta):
            if e:
                term = term * image_power(j, e)
        result = result + term
    return result
