"""Exact arithmetic in the cyclotomic field K = Q(zeta_m).

Scalars are represented by their coordinates in the power basis
1, zeta, ..., zeta^(phi(m)-1) modulo the m-th cyclotomic polynomial,
with ``fractions.Fraction`` coordinates.  m = 1 gives plain Q.  All
values are immutable, so they can be shared freely between workers.
"""

from __future__ import annotations

import functools
from fractions import Fraction

from .errors import FieldMismatchError

Rational = Fraction


def _int_poly_div_exact(num, den):
    """Exact division of integer coefficient lists (constant term first)."""
    num = list(num)
    dn = len(den) - 1
    q = [0] * (len(num) - dn)
    for k in range(len(q) - 1, -1, -1):
        c = num[k + dn]
        # den is monic for every cyclotomic divisor used here
        q[k] = c
        for i, d in enumerate(den):
            num[k + i] -= c * d
    if any(num):
        raise ArithmeticError("polynomial division was not exact")
    return q


@functools.lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> tuple:
    """Coefficients of the m-th cyclotomic polynomial, constant term first.

    Computed by exact division: Phi_m = (x^m - 1) / prod(Phi_d) over the
    proper divisors d of m.  Always monic with integer coefficients.
    """
    if m < 1:
        raise ValueError("conductor m must be a positive integer")
    poly = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            poly = _int_poly_div_exact(poly, cyclotomic_poly(d))
    return tuple(poly)


def _frac_poly_trim(p):
    while p and p[-1] == 0:
        p.pop()
    return p


def _frac_poly_divmod(num, den):
    num = list(num)
    den = list(den)
    q = [Fraction(0)] * max(len(num) - len(den) + 1, 0)
    inv_lead = 1 / den[-1]
    for k in range(len(q) - 1, -1, -1):
        c = num[k + len(den) - 1] * inv_lead
        q[k] = c
        if c:
            for i, d in enumerate(den):
                num[k + i] -= c * d
    return q, _frac_poly_trim(num)


def _frac_poly_xgcd(a, b):
    """Extended Euclid on Fraction coefficient lists: g = u*a + v*b."""
    r0, r1 = list(a), list(b)
    u0, u1 = [Fraction(1)], []
    v0, v1 = [], [Fraction(1)]

    def sub_scaled(p, q, quo):
        out = list(p) + [Fraction(0)] * max(0, len(q) + len(quo) - 1 - len(p))
        for i, qc in enumerate(quo):
            if qc:
                for j, c in enumerate(q):
                    out[i + j] -= qc * c
        return _frac_poly_trim(out)

    while _frac_poly_trim(list(r1)):
        quo, rem = _frac_poly_divmod(r0, r1)
        r0, r1 = r1, rem
        u0, u1 = u1, sub_scaled(u0, u1, quo)
        v0, v1 = v1, sub_scaled(v0, v1, quo)
    return r0, u0, v0


class FieldConfig:
    """Shared context for one conductor m: the modulus Phi_m and its degree.

    Use :func:`field` to obtain the cached instance for a given m.
    """

    __slots__ = ("m", "phi_m", "modulus", "_zero", "_one")

    def __init__(self, m: int):
        if m < 1:
            raise ValueError("conductor m must be a positive integer")
        self.m = m
        self.modulus = cyclotomic_poly(m)
        self.phi_m = len(self.modulus) - 1
        self._zero = None
        self._one = None

    def __eq__(self, other):
        return isinstance(other, FieldConfig) and other.m == self.m

    def __hash__(self):
        return hash(("FieldConfig", self.m))

    def __repr__(self):
        return f"FieldConfig(m={self.m})"

    def scalar(self, value) -> CyclotomicScalar:
        """Embed an int, Fraction, or scalar of the same field."""
        if isinstance(value, CyclotomicScalar):
            if value.config.m != self.m:
                raise FieldMismatchError(
                    f"scalar of conductor {value.config.m} used in field m={self.m}"
                )
            return value
        q = Fraction(value)
        coeffs = (q,) + (Fraction(0),) * (self.phi_m - 1)
        return CyclotomicScalar(coeffs, self)

    @property
    def zero(self) -> CyclotomicScalar:
        if self._zero is None:
            self._zero = self.scalar(0)
        return self._zero

    @property
    def one(self) -> CyclotomicScalar:
        if self._one is None:
            self._one = self.scalar(1)
        return self._one

    def zeta(self) -> CyclotomicScalar:
        """The distinguished primitive m-th root of unity (1 when m = 1)."""
        if self.phi_m == 1:
            # x = zeta reduces to a rational: zeta_1 = 1, zeta_2 = -1
            return self.scalar(1 if self.m == 1 else -1)
        coeffs = [Fraction(0)] * self.phi_m
        coeffs[1] = Fraction(1)
        return CyclotomicScalar(tuple(coeffs), self)


@functools.lru_cache(maxsize=None)
def field(m: int) -> FieldConfig:
    """Cached field configuration for conductor m."""
    return FieldConfig(m)


class CyclotomicScalar:
    """An element of Q(zeta_m) in reduced power-basis coordinates.

    Equality is coefficient-wise; the representation is always canonical
    (length phi(m), fully reduced modulo Phi_m).  Instances are immutable.
    """

    __slots__ = ("coeffs", "config")

    def __init__(self, coeffs, config: FieldConfig):
        if len(coeffs) != config.phi_m:
            raise ValueError(
                f"expected {config.phi_m} coordinates for m={config.m}, got {len(coeffs)}"
            )
        object.__setattr__(self, "coeffs", tuple(coeffs))
        object.__setattr__(self, "config", config)

    def __setattr__(self, name, value):
        raise AttributeError("CyclotomicScalar is immutable")

    # -- coercion helpers -------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, CyclotomicScalar):
            if other.config.m != self.config.m:
                raise FieldMismatchError(
                    f"mixed conductors m={self.config.m} and m={other.config.m}"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return self.config.scalar(other)
        return None

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def __bool__(self):
        return not self.is_zero()

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return CyclotomicScalar(
            tuple(x + y for x, y in zip(self.coeffs, b.coeffs)), self.config
        )

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicScalar(tuple(-x for x in self.coeffs), self.config)

    def __sub__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return CyclotomicScalar(
            tuple(x - y for x, y in zip(self.coeffs, b.coeffs)), self.config
        )

    def __rsub__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return b - self

    def _reduce(self, prod):
        mod = self.config.modulus
        phi = self.config.phi_m
        for k in range(len(prod) - 1, phi - 1, -1):
            c = prod[k]
            if c:
                for i in range(phi + 1):
                    prod[k - phi + i] -= c * mod[i]
        return CyclotomicScalar(tuple(prod[:phi]), self.config)

    def __mul__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        n = self.config.phi_m
        prod = [Fraction(0)] * (2 * n - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        prod[i + j] += x * y
        return self._reduce(prod)

    __rmul__ = __mul__

    def inverse(self) -> CyclotomicScalar:
        if self.is_zero():
            raise ZeroDivisionError("zero has no inverse")
        g, u, _ = _frac_poly_xgcd(list(self.coeffs), list(self.config.modulus))
        # Phi_m is irreducible over Q, so the gcd is a nonzero constant
        scale = 1 / g[0]
        inv = [c * scale for c in u]
        inv += [Fraction(0)] * (2 * self.config.phi_m - 1 - len(inv))
        return self._reduce(inv)

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return self * b.inverse()

    def __rtruediv__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return b * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        base = self
        if exponent < 0:
            base = self.inverse()
            exponent = -exponent
        acc = self.config.one
        while exponent:
            if exponent & 1:
                acc = acc * base
            base = base * base
            exponent >>= 1
        return acc

    # -- comparison ----------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, CyclotomicScalar):
            if other.config.m != self.config.m:
                return (
                    self.is_rational()
                    and other.is_rational()
                    and self.coeffs[0] == other.coeffs[0]
                )
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.config.m, self.coeffs))

    # -- formatting ----------------------------------------------------------

    def components(self):
        """Nonzero (power, coefficient) pairs in ascending power order."""
        return [(i, c) for i, c in enumerate(self.coeffs) if c]

    def __str__(self):
        parts = self.components()
        if not parts:
            return "0"
        chunks = []
        for i, c in parts:
            if not chunks:
                chunks.append(_component_text(i, c))
            else:
                chunks.append((" - " if c < 0 else " + ") + _component_text(i, abs(c)))
        return "".join(chunks)

    def __repr__(self):
        return f"<{self} in Q(zeta_{self.config.m})>"


def _component_text(power: int, coeff: Fraction) -> str:
    if power == 0:
        return str(coeff)
    z = "z" if power == 1 else f"z^{power}"
    if coeff == 1:
        return z
    if coeff == -1:
        return "-" + z
    return f"{coeff}*{z}"


def root_of_unity_order(a: CyclotomicScalar):
    """Least j >= 1 with a^j = 1, or None if a is not a root of unity.

    Roots of unity in Q(zeta_m) have order dividing lcm(2, m), so testing
    j = 1 .. 2m is exhaustive.
    """
    if a.is_zero():
        raise ValueError("0 is not a root of unity")
    one = a.config.one
    power = a
    for j in range(1, 2 * a.config.m + 1):
        if power == one:
            return j
        power = power * a
    return None


def is_primitive_root(a: CyclotomicScalar, m: int) -> bool:
    """True when a has exact multiplicative order m."""
    if a.is_zero():
        return False
    return root_of_unity_order(a) == m
