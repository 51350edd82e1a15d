"""Per-degree image structure of graded linear maps.

All maps handled here preserve total degree, so the image of the whole
ring is the direct sum of the per-degree images eta(R_d).  That turns
membership into exact linear algebra: build the matrix of eta restricted
to R_d in the monomial basis, row-reduce once, then solve each target
component against it.  The reduction keeps generator bookkeeping, so a
positive answer always comes with an exact preimage witness and a
negative one with the residual that cannot be matched.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass
from math import comb

from .errors import (
    ClosedFormUnavailable,
    DegreeCapError,
    LTConditionError,
    MemberRegionError,
)
from .field import field, root_of_unity_order
from .matrix import RowReducer
from .maps import (
    DERIVATION,
    EDERIVATION,
    ENDOMORPHISM,
    CanonicalCase,
    LinearMapSpec,
    lowering_derivation,
    one_minus_exp,
    triangular_ederivation,
    apply_map,
    variable_images,
)
from .poly import (
    OMEGA,
    GradedComponent,
    MonomialOrder,
    Polynomial,
    monomial_basis,
)

# Per-degree systems stay at most dim(R_10) = 66 square by default.
DEFAULT_DEGREE_CAP = 10

_CACHE = {}
_CACHE_LOCK = threading.Lock()


def clear_image_cache():
    with _CACHE_LOCK:
        _CACHE.clear()


class GradedImage:
    """Row-reduced basis of eta(R_d) with exact solve support."""

    def __init__(self, spec: LinearMapSpec, degree: int):
        self.spec = spec
        self.degree = degree
        self.component = GradedComponent.of(spec.n, degree)
        self.index = self.component.index()
        self.reducer = RowReducer(self.component.dimension, spec.config)
        for vec in _generator_vectors(spec, self.component, self.index):
            self.reducer.insert(vec)

    @property
    def rank(self) -> int:
        return self.reducer.rank

    def vector_of(self, f: Polynomial) -> list:
        """Coordinates of a homogeneous polynomial of this degree."""
        vec = [self.spec.config.zero] * self.component.dimension
        for beta, coeff in f.terms.items():
            if sum(beta) != self.degree:
                raise ValueError(f"{f} is not homogeneous of degree {self.degree}")
            vec[self.index[beta]] = coeff
        return vec

    def polynomial_of(self, vec) -> Polynomial:
        terms = {
            beta: c for beta, c in zip(self.component.basis, vec) if not c.is_zero()
        }
        return Polynomial(self.spec.n, self.spec.config, terms)

    def basis_polynomials(self) -> list:
        """The reduced image basis, one polynomial per pivot row."""
        return [self.polynomial_of(row) for row in self.reducer.basis_vectors()]

    def solve(self, f: Polynomial):
        """(witness, residual): witness maps onto f - residual; residual is
        zero exactly when f lies in the image."""
        rem, combo = self.reducer.reduce(self.vector_of(f))
        witness_terms = {}
        for g, c in combo.items():
            witness_terms[self.component.basis[g]] = c
        witness = Polynomial(self.spec.n, self.spec.config, witness_terms)
        residual = self.polynomial_of(rem)
        return witness, residual


def _generator_vectors(spec: LinearMapSpec, component: GradedComponent, index):
    """Images of the basis monomials as coordinate vectors, basis order."""
    config = spec.config
    zero = config.zero
    dim = component.dimension
    n = spec.n
    rows = spec.matrix.rows
    out = []
    if spec.kind == DERIVATION:
        for beta in component.basis:
            vec = [zero] * dim
            for j, e in enumerate(beta):
                if e == 0:
                    continue
                for i in range(n):
                    a = rows[i][j]
                    if a.is_zero():
                        continue
                    gamma = list(beta)
                    gamma[j] -= 1
                    gamma[i] += 1
                    k = index[tuple(gamma)]
                    vec[k] = vec[k] + a * e
            out.append(vec)
        return out

    images = variable_images(spec)
    pow_cache = [{0: Polynomial.constant(n, config, 1)} for _ in range(n)]

    def image_power(j, e):
        cache = pow_cache[j]
        if e not in cache:
            top = max(cache)
            acc = cache[top]
            for k in range(top + 1, e + 1):
                acc = acc * images[j]
                cache[k] = acc
        return cache[e]

    for beta in component.basis:
        prod = Polynomial.constant(n, config, 1)
        for j, e in enumerate(beta):
            if e:
                prod = prod * image_power(j, e)
        vec = [zero] * dim
        for gamma, coeff in prod.terms.items():
            vec[index[gamma]] = coeff
        if spec.kind == EDERIVATION:
            for k, c in enumerate(vec):
                vec[k] = -c
            vec[index[beta]] = vec[index[beta]] + config.one
        out.append(vec)
    return out


def image_basis(spec: LinearMapSpec, d: int, cap=None) -> GradedImage:
    """Cached row-reduced basis of eta(R_d); deterministic basis order."""
    if d < 0:
        raise ValueError("degree must be nonnegative")
    limit = DEFAULT_DEGREE_CAP if cap is None else cap
    if d > limit:
        raise DegreeCapError(f"degree {d} exceeds the engine cap {limit}")
    key = (spec, d)
    with _CACHE_LOCK:
        hit = _CACHE.get(key)
    if hit is not None:
        return hit
    built = GradedImage(spec, d)
    with _CACHE_LOCK:
        return _CACHE.setdefault(key, built)


@dataclass(frozen=True)
class MembershipVerdict:
    """Answer plus certificate: an exact preimage when the answer is yes,
    the first unmatched homogeneous residual when it is no."""

    member: bool
    witness: Polynomial | None = None
    failing: tuple | None = None  # (degree, residual polynomial)

    def __bool__(self):
        return self.member


def member(spec: LinearMapSpec, f: Polynomial, cap=None) -> MembershipVerdict:
    """Decide f in im(eta) degree by degree, with certificates."""
    if f.is_zero():
        return MembershipVerdict(True, Polynomial.zero(f.n, f.config))
    witness = Polynomial.zero(f.n, f.config)
    for d, part in f.homogeneous_components().items():
        gi = image_basis(spec, d, cap=cap)
        w, residual = gi.solve(part)
        if not residual.is_zero():
            return MembershipVerdict(False, None, (d, residual))
        witness = witness + w
    return MembershipVerdict(True, witness)


# -- closed-form monomial rules -----------------------------------------------------


def _inner(alpha, beta):
    config = alpha[0].config
    acc = config.zero
    for a, e in zip(alpha, beta):
        if e:
            acc = acc + a * e
    return acc


def _power_product(alpha, beta):
    """prod a_i^{e_i} with the 0^0 = 1 convention."""
    config = alpha[0].config
    acc = config.one
    for a, e in zip(alpha, beta):
        if e:
            acc = acc * a**e
    return acc


def monomial_member_closed_form(case: CanonicalCase, beta) -> bool:
    """Membership of a single monomial by the per-family rule.

    Raises ClosedFormUnavailable for the parameter/monomial combinations
    that only the per-degree solver decides (nilpotent full block; full
    block at a root of unity on degrees divisible by the root order).
    """
    beta = tuple(beta)
    if len(beta) != case.n:
        raise ValueError("exponent vector length mismatch")
    if not any(beta):
        raise ValueError("the unit monomial is excluded; test beta != 0")
    if case.family == "diag":
        alpha = case.alpha()
        if case.kind == DERIVATION:
            return not _inner(alpha, beta).is_zero()
        return _power_product(alpha, beta) != 1
    if case.family == "jordan2":
        if beta[-1] > 0:
            return True
        alpha = case.alpha()
        if case.kind == DERIVATION:
            return not _inner(alpha, beta).is_zero()
        return _power_product(alpha, beta) != 1
    # jordan3
    a = case.params[0]
    if a.is_zero():
        raise ClosedFormUnavailable(
            "full nilpotent block has no closed-form rule; use the solver"
        )
    order = root_of_unity_order(a)
    if case.kind == DERIVATION:
        return True
    if order is None:
        return True
    if sum(beta) % order != 0:
        return True
    raise ClosedFormUnavailable(
        f"degree divisible by the root order {order}; use the solver"
    )


# -- constructive preimages ----------------------------------------------------------


def _shift(beta, src, dst, k=1):
    out = list(beta)
    out[src] -= k
    out[dst] += k
    return tuple(out)


def _lower(beta, idx, k):
    out = list(beta)
    out[idx] -= k
    return tuple(out)


def constructive_preimage(case: CanonicalCase, beta) -> Polynomial:
    """Explicit preimage of a monomial under a jordan2 map, by the
    eigenvalue-chain recurrences; exact by construction."""
    beta = tuple(beta)
    if case.family != "jordan2":
        raise MemberRegionError("constructive preimages cover the jordan2 family")
    if len(beta) != case.n:
        raise ValueError("exponent vector length mismatch")
    n = case.n
    config = case.config
    alpha = case.alpha()
    last, prev = n - 1, n - 2

    if case.kind == DERIVATION:
        ab = _inner(alpha, beta)
        if not ab.is_zero():
            k = beta[prev]
            inv = ab.inverse()
            g = Polynomial.monomial(n, config, _shift(beta, prev, last, k), inv)
            for i in range(k - 1, -1, -1):
                step = Polynomial.monomial(n, config, _shift(beta, prev, last, i), inv)
                g = step - g.scale(inv * (k - i))
            return g
        if beta[last] == 0:
            raise MemberRegionError(
                f"monomial {beta} has zero eigenvalue pairing and no x{n} factor"
            )
        return Polynomial.monomial(
            n, config, _shift(beta, last, prev), config.scalar(1) / (beta[prev] + 1)
        )

    memo = {}

    def rec(b):
        hit = memo.get(b)
        if hit is not None:
            return hit
        ab = _power_product(alpha, b)
        k = b[prev]
        if ab != 1:
            c = (config.one - ab).inverse()
            g = Polynomial.monomial(n, config, b, c)
            for i in range(1, k + 1):
                coeff = c * comb(k, i) * _power_product(alpha, _lower(b, prev, i))
                g = g + rec(_shift(b, prev, last, i)).scale(coeff)
        else:
            if b[last] == 0:
                raise MemberRegionError(
                    f"monomial {b} is fixed by the endomorphism and has no x{n} factor"
                )
            down = list(b)
            down[last] -= 1
            apow = _power_product(alpha, tuple(down))
            c = -(config.scalar(k + 1) * apow).inverse()
            up = list(b)
            up[prev] += 1
            up[last] -= 1
            g = Polynomial.monomial(n, config, tuple(up), c)
            for i in range(2, k + 2):
                expo = list(b)
                expo[prev] -= i - 1
                expo[last] -= 1
                coeff = c * comb(k + 1, i) * _power_product(alpha, tuple(expo))
                g = g + rec(_shift(b, prev, last, i - 1)).scale(coeff)
        memo[b] = g
        return g

    return rec(beta)


def quotient_member(case: CanonicalCase, f: Polynomial, cap=None) -> MembershipVerdict:
    """jordan2 membership without the per-degree solver: every monomial
    with an x_n factor lies in the image; the rest reduce to the diagonal
    rule.  The witness is assembled from constructive preimages."""
    if case.family != "jordan2":
        raise MemberRegionError("quotient membership covers the jordan2 family")
    alpha = case.alpha()
    failing = {}
    for beta, coeff in f.terms.items():
        if beta[-1] > 0:
            continue
        if not any(beta):
            ok = False
        elif case.kind == DERIVATION:
            ok = not _inner(alpha, beta).is_zero()
        else:
            ok = _power_product(alpha, beta) != 1
        if not ok:
            failing[beta] = coeff
    if failing:
        d = min(sum(b) for b in failing)
        residual = Polynomial(
            f.n, f.config, {b: c for b, c in failing.items() if sum(b) == d}
        )
        return MembershipVerdict(False, None, (d, residual))
    witness = Polynomial.zero(f.n, f.config)
    for beta, coeff in f.terms.items():
        witness = witness + constructive_preimage(case, beta).scale(coeff)
    return MembershipVerdict(True, witness)


# -- leading-term elimination ---------------------------------------------------------


def lt_triangular_preimage(
    spec: LinearMapSpec, order: MonomialOrder, beta, max_steps=None
) -> Polynomial:
    """Preimage of a monomial by descending leading-term elimination.

    Works whenever the image of every encountered monomial keeps that
    monomial as its leading term with a nonzero coefficient; the first
    violation raises LTConditionError.  Termination is guaranteed because
    the residual's leading monomial strictly decreases inside one finite
    homogeneous component.
    """
    beta = tuple(beta)
    if not any(beta):
        raise ValueError("the unit monomial is excluded; eliminate beta != 0")
    n = spec.n
    config = spec.config
    target = Polynomial.monomial(n, config, beta)
    limit = max_steps if max_steps is not None else 4 * comb(sum(beta) + n - 1, n - 1)
    g = Polynomial.zero(n, config)
    residual = target
    steps = 0
    while not residual.is_zero():
        steps += 1
        if steps > limit:
            raise LTConditionError("elimination did not terminate within bounds")
        gamma, c = residual.leading_term(order)
        if not any(gamma):
            raise LTConditionError("residual dropped to a constant term")
        image = apply_map(spec, Polynomial.monomial(n, config, gamma))
        if image.is_zero():
            raise LTConditionError(f"image of {gamma} is zero")
        lt_gamma, a_gamma = image.leading_term(order)
        if lt_gamma != gamma:
            raise LTConditionError(
                f"leading term of the image of {gamma} is {lt_gamma}, not {gamma}"
            )
        scale = c / a_gamma
        g = g + Polynomial.monomial(n, config, gamma, scale)
        residual = residual - image.scale(scale)
    return g


# -- degree-block decomposition --------------------------------------------------------


@dataclass(frozen=True)
class BCDecomposition:
    """Split of a polynomial by total degree modulo m: the part supported
    on degrees divisible by m, and everything else."""

    m: int
    b_part: Polynomial
    c_part: Polynomial


def bc_decompose(f: Polynomial, m: int) -> BCDecomposition:
    if m < 1:
        raise ValueError("m must be a positive integer")
    b_terms = {}
    c_terms = {}
    for beta, coeff in f.terms.items():
        (b_terms if sum(beta) % m == 0 else c_terms)[beta] = coeff
    return BCDecomposition(
        m,
        Polynomial(f.n, f.config, b_terms),
        Polynomial(f.n, f.config, c_terms),
    )


# -- subspace identities -----------------------------------------------------------------


IDENTITIES = ("lemC", "lemDB", "delta_contains_D", "exp_image")


@dataclass(frozen=True)
class IdentityReport:
    identity: str
    m: int
    degree: int
    lhs_rank: int
    rhs_rank: int
    relation: str  # "equal" or "contained"
    holds: bool
    elapsed_ms: float

    def to_json_dict(self) -> dict:
        out = {
            "identity": self.identity,
            "m": self.m,
            "degree": self.degree,
            "lhs_rank": self.lhs_rank,
            "rhs_rank": self.rhs_rank,
            self.relation: self.holds,
            "elapsed_ms": self.elapsed_ms,
        }
        return out


def _joint_rank(a: GradedImage, b: GradedImage) -> int:
    red = RowReducer(a.component.dimension, a.spec.config)
    for row in a.reducer.basis_vectors():
        red.insert(list(row))
    for row in b.reducer.basis_vectors():
        red.insert(list(row))
    return red.rank


def verify_subspace_identity(
    identity: str, m: int, d: int, spec: LinearMapSpec | None = None, cap=None
) -> IdentityReport:
    """Compare per-degree image subspaces for one of the named identities.

    lemC:             the degree-d component not divisible by m is hit in
                      full by the triangular E-derivation at a = zeta_m.
    lemDB:            on degrees divisible by m the same E-derivation and
                      the lowering derivation have identical images.
    delta_contains_D: the E-derivation image contains the lowering
                      derivation image, degree by degree.
    exp_image:        id - exp(D) and D have identical images per degree,
                      for a nilpotent derivation D (default: lowering).
    """
    if identity not in IDENTITIES:
        raise ValueError(f"unknown identity {identity!r}; choose from {IDENTITIES}")
    if m < 1:
        raise ValueError("m must be a positive integer")
    t0 = time.perf_counter()
    config = field(m)

    def _ms():
        return round((time.perf_counter() - t0) * 1000.0, 3)

    if identity == "lemC":
        delta = triangular_ederivation(config.zeta())
        if d % m == 0:
            return IdentityReport(identity, m, d, 0, 0, "equal", True, _ms())
        gi = image_basis(delta, d, cap=cap)
        dim = gi.component.dimension
        return IdentityReport(identity, m, d, gi.rank, dim, "equal", gi.rank == dim, _ms())

    if identity == "lemDB":
        if d % m != 0:
            return IdentityReport(identity, m, d, 0, 0, "equal", True, _ms())
        delta = triangular_ederivation(config.zeta())
        low = lowering_derivation(config)
        lhs = image_basis(delta, d, cap=cap)
        rhs = image_basis(low, d, cap=cap)
        joint = _joint_rank(lhs, rhs)
        holds = lhs.rank == rhs.rank == joint
        return IdentityReport(identity, m, d, lhs.rank, rhs.rank, "equal", holds, _ms())

    if identity == "delta_contains_D":
        delta = triangular_ederivation(config.zeta())
        low = lowering_derivation(config)
        lhs = image_basis(delta, d, cap=cap)
        rhs = image_basis(low, d, cap=cap)
        joint = _joint_rank(lhs, rhs)
        holds = joint == lhs.rank
        return IdentityReport(
            identity, m, d, lhs.rank, rhs.rank, "contained", holds, _ms()
        )

    base = spec if spec is not None else lowering_derivation(config)
    delta = one_minus_exp(base)
    lhs = image_basis(delta, d, cap=cap)
    rhs = image_basis(base, d, cap=cap)
    joint = _joint_rank(lhs, rhs)
    holds = lhs.rank == rhs.rank == joint
    return IdentityReport(identity, m, d, lhs.rank, rhs.rank, "equal", holds, _ms())


# -- omega sweeps ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OmegaSweepReport:
    kind: str
    d_max: int
    omega: tuple
    checked: int
    violations: tuple
    holds: bool


def omega_member_sweep(
    spec: LinearMapSpec, d_max: int, omega=OMEGA, cap=None
) -> OmegaSweepReport:
    """Check that every monomial of negative weighted degree (|beta| up to
    d_max) lies in the image; reports violations, expected none."""
    checked = 0
    violations = []
    for d in range(1, d_max + 1):
        for beta in monomial_basis(spec.n, d):
            if sum(w * e for w, e in zip(omega, beta)) >= 0:
                continue
            checked += 1
            verdict = member(
                spec, Polynomial.monomial(spec.n, spec.config, beta), cap=cap
            )
            if not verdict.member:
                violations.append(beta)
    return OmegaSweepReport(
        spec.kind, d_max, tuple(omega), checked, tuple(violations), not violations
    )
