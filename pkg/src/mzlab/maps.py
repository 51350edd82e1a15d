"""Linear derivations, endomorphisms, and E-derivations of K[x1..xn].

Every map is determined by a square matrix A through the row-vector
convention: the map sends x_j to sum_i x_i * A[i][j].  A derivation
extends by the Leibniz rule, an endomorphism by substitution, and an
E-derivation is identity minus its underlying endomorphism.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, lcm

from .errors import (
    JordanizeError,
    MapKindError,
    NilpotencyError,
    SingularMatrixError,
)
from .field import CyclotomicScalar, FieldConfig
from .matrix import Matrix, RowReducer
from .poly import Polynomial, substitute_linear

DERIVATION = "derivation"
ENDOMORPHISM = "endo"
EDERIVATION = "ederivation"
KINDS = (DERIVATION, ENDOMORPHISM, EDERIVATION)

FAMILIES = ("diag", "jordan2", "jordan3")


@dataclass(frozen=True)
class LinearMapSpec:
    """A matrix-defined linear map; for an E-derivation the matrix is the
    matrix of the underlying endomorphism."""

    kind: str
    matrix: Matrix

    def __post_init__(self):
        if self.kind not in KINDS:
            raise MapKindError(f"unknown map kind {self.kind!r}")
        if not self.matrix.is_square():
            raise ValueError("map matrix must be square")

    @property
    def n(self) -> int:
        return self.matrix.nrows

    @property
    def config(self) -> FieldConfig:
        return self.matrix.config

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "matrix": [[str(e) for e in row] for row in self.matrix.rows],
        }


@dataclass(frozen=True)
class ConjugationMap:
    """An invertible change of variables, applied as sigma . eta . sigma^-1."""

    matrix: Matrix

    def __post_init__(self):
        if not self.matrix.is_square():
            raise ValueError("conjugation matrix must be square")
        if self.matrix.det().is_zero():
            raise SingularMatrixError("conjugation matrix is singular")

    def inverse(self) -> "ConjugationMap":
        return ConjugationMap(self.matrix.inverse())


@dataclass(frozen=True)
class CanonicalCase:
    """One of the canonical families, with its eigenvalue parameters.

    diag:    n parameters (a_1, ..., a_n), each x_i -> a_i x_i.
    jordan2: n-1 parameters; diagonal on x_1..x_{n-2}, and a 2-block
             x_{n-1} -> a_{n-1} x_{n-1} + x_n, x_n -> a_{n-1} x_n.
    jordan3: one parameter; a single full-size block
             x_i -> a x_i + x_{i+1} (i < n), x_n -> a x_n.
    """

    family: str
    kind: str
    params: tuple
    n: int = 3

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.kind not in (DERIVATION, EDERIVATION):
            raise MapKindError("canonical cases are derivations or E-derivations")
        expected = {"diag": self.n, "jordan2": self.n - 1, "jordan3": 1}[self.family]
        if len(self.params) != expected:
            raise ValueError(
                f"{self.family} in {self.n} variables takes {expected} parameters"
            )
        if self.family == "jordan2" and self.n < 2:
            raise ValueError("jordan2 needs at least two variables")

    @property
    def config(self) -> FieldConfig:
        return self.params[0].config

    def alpha(self) -> tuple:
        """The eigenvalue vector paired with exponent vectors in the
        closed-form membership rules (last eigenvalue repeated for the
        2-block)."""
        if self.family == "diag":
            return self.params
        if self.family == "jordan2":
            return self.params + (self.params[-1],)
        raise ValueError("jordan3 has no diagonal eigenvalue vector")


def canonical(case: CanonicalCase) -> LinearMapSpec:
    """The exact matrix map for a canonical family member."""
    n = case.n
    config = case.config
    zero = config.zero
    cols = [[zero] * n for _ in range(n)]  # cols[j][i] = coeff of x_i in image of x_j
    if case.family == "diag":
        for j in range(n):
            cols[j][j] = case.params[j]
    elif case.family == "jordan2":
        for j in range(n - 2):
            cols[j][j] = case.params[j]
        b = case.params[n - 2]
        cols[n - 2][n - 2] = b
        cols[n - 2][n - 1] = config.one
        cols[n - 1][n - 1] = b
    else:
        a = case.params[0]
        for j in range(n):
            cols[j][j] = a
            if j + 1 < n:
                cols[j][j + 1] = config.one
    rows = [[cols[j][i] for j in range(n)] for i in range(n)]
    matrix = Matrix(rows, config)
    if case.kind == EDERIVATION:
        return LinearMapSpec(EDERIVATION, matrix)
    return LinearMapSpec(DERIVATION, matrix)


# -- application ----------------------------------------------------------------


def variable_images(spec: LinearMapSpec) -> list:
    """Images of x_1..x_n under the matrix (column) action as polynomials."""
    n = spec.n
    config = spec.config
    out = []
    for j in range(n):
        terms = {}
        for i in range(n):
            e = spec.matrix.rows[i][j]
            if not e.is_zero():
                terms[tuple(1 if k == i else 0 for k in range(n))] = e
        out.append(Polynomial(n, config, terms))
    return out


def derivation_apply(spec: LinearMapSpec, f: Polynomial) -> Polynomial:
    """Leibniz extension of the matrix action to all of K[x1..xn]."""
    if spec.kind != DERIVATION:
        raise MapKindError(f"derivation_apply needs a derivation, got {spec.kind}")
    images = variable_images(spec)
    acc = Polynomial.zero(f.n, f.config)
    for beta, coeff in f.terms.items():
        for j, e in enumerate(beta):
            if e == 0 or images[j].is_zero():
                continue
            lowered = tuple(b - 1 if k == j else b for k, b in enumerate(beta))
            acc = acc + images[j] * Polynomial.monomial(f.n, f.config, lowered, coeff * e)
    return acc


def endomorphism_apply(spec: LinearMapSpec, f: Polynomial) -> Polynomial:
    if spec.kind != ENDOMORPHISM:
        raise MapKindError(f"endomorphism_apply needs an endomorphism, got {spec.kind}")
    return substitute_linear(f, spec.matrix)


def ederivation_apply(spec: LinearMapSpec, f: Polynomial) -> Polynomial:
    """f minus the substitution image of f (identity minus endomorphism)."""
    if spec.kind != EDERIVATION:
        raise MapKindError(f"ederivation_apply needs an E-derivation, got {spec.kind}")
    return f - substitute_linear(f, spec.matrix)


def apply_map(spec: LinearMapSpec, f: Polynomial) -> Polynomial:
    if spec.kind == DERIVATION:
        return derivation_apply(spec, f)
    if spec.kind == ENDOMORPHISM:
        return endomorphism_apply(spec, f)
    return ederivation_apply(spec, f)


# -- structure -------------------------------------------------------------------


def is_nilpotent(matrix: Matrix):
    """Least k <= n with A^k = 0, else None."""
    return matrix.is_nilpotent()


def exp_derivation(spec: LinearMapSpec) -> LinearMapSpec:
    """The exponential automorphism of a nilpotent derivation, as an
    endomorphism spec with matrix sum(A^k / k!)."""
    if spec.kind != DERIVATION:
        raise MapKindError("exp_derivation needs a derivation")
    index = is_nilpotent(spec.matrix)
    if index is None:
        raise NilpotencyError("matrix is not nilpotent; the series does not stop")
    config = spec.config
    acc = Matrix.identity(spec.n, config)
    power = Matrix.identity(spec.n, config)
    for k in range(1, index):
        power = power * spec.matrix
        acc = acc + power.scale(Fraction(1, factorial(k)))
    return LinearMapSpec(ENDOMORPHISM, acc)


def one_minus_exp(spec: LinearMapSpec) -> LinearMapSpec:
    """The E-derivation id - e^D of a nilpotent derivation D."""
    return LinearMapSpec(EDERIVATION, exp_derivation(spec).matrix)


def conjugate(sigma: ConjugationMap, spec: LinearMapSpec) -> LinearMapSpec:
    """Replace the map eta by sigma . eta . sigma^-1 (matrix S A S^-1)."""
    s = sigma.matrix
    if s.nrows != spec.n:
        raise ValueError("conjugation dimension mismatch")
    return LinearMapSpec(spec.kind, s * spec.matrix * s.inverse())


# -- distinguished maps -----------------------------------------------------------


def lowering_derivation(config: FieldConfig) -> LinearMapSpec:
    """The nilpotent derivation x2 -> x1, x3 -> -x2 (and x1 -> 0)."""
    return LinearMapSpec(
        DERIVATION, Matrix([[0, 1, 0], [0, 0, -1], [0, 0, 0]], config)
    )


def triangular_endo(a: CyclotomicScalar) -> LinearMapSpec:
    """The endomorphism x1 -> a*x1, x2 -> a*x1 + a*x2,
    x3 -> -a/2*x1 - a*x2 + a*x3.

    This is a times the exponential of the lowering derivation; at a = 1
    it is exactly that exponential.
    """
    config = a.config
    half = config.scalar(Fraction(1, 2))
    rows = [
        [a, a, -a * half],
        [config.zero, a, -a],
        [config.zero, config.zero, a],
    ]
    return LinearMapSpec(ENDOMORPHISM, Matrix(rows, config))


def triangular_ederivation(a: CyclotomicScalar) -> LinearMapSpec:
    """id minus :func:`triangular_endo`."""
    return LinearMapSpec(EDERIVATION, triangular_endo(a).matrix)


# -- similarity -------------------------------------------------------------------


def find_similarity(a: Matrix, b: Matrix, attempts: int = 200) -> Matrix:
    """An invertible S with S*A*S^-1 = B, found by solving S A = B S exactly.

    The intertwiner space is computed as a nullspace; invertible elements
    are dense in it when A and B are similar, so scanning small integer
    combinations of the basis finds one quickly.
    """
    if a.nrows != b.nrows or not a.is_square() or not b.is_square():
        raise ValueError("similarity needs square matrices of equal size")
    n = a.nrows
    config = a.config
    zero = config.zero
    # unknowns s_kl flattened as k*n + l; one equation per entry (i, j)
    system = []
    for i in range(n):
        for j in range(n):
            row = [zero] * (n * n)
            for k in range(n):
                row[i * n + k] = row[i * n + k] + a.rows[k][j]
                row[k * n + j] = row[k * n + j] - b.rows[i][k]
            system.append(row)
    basis = Matrix(system, config).nullspace()
    if not basis:
        raise SingularMatrixError("matrices are not similar")

    def as_matrix(vec):
        return Matrix([[vec[i * n + j] for j in range(n)] for i in range(n)], config)

    candidates = list(basis)
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            candidates.append([x + y for x, y in zip(basis[i], basis[j])])
    coeff = 2
    while len(candidates) < attempts:
        stacked = [zero] * (n * n)
        for i, v in enumerate(basis):
            c = config.scalar(coeff + i)
            stacked = [x + c * y for x, y in zip(stacked, v)]
        candidates.append(stacked)
        coeff += 1
    for vec in candidates[:attempts]:
        s = as_matrix(vec)
        if not s.det().is_zero():
            return s
    raise SingularMatrixError("no invertible intertwiner found")


# -- automatic canonicalization ----------------------------------------------------


def _char_poly(matrix: Matrix) -> list:
    """Characteristic polynomial coefficients (constant first), n <= 3."""
    n = matrix.nrows
    config = matrix.config
    one = config.one
    if n == 1:
        return [-matrix.rows[0][0], one]
    if n == 2:
        tr = matrix.rows[0][0] + matrix.rows[1][1]
        return [matrix.det(), -tr, one]
    if n == 3:
        r = matrix.rows
        tr = r[0][0] + r[1][1] + r[2][2]
        minors = (
            r[1][1] * r[2][2] - r[1][2] * r[2][1]
            + r[0][0] * r[2][2] - r[0][2] * r[2][0]
            + r[0][0] * r[1][1] - r[0][1] * r[1][0]
        )
        return [-matrix.det(), minors, -tr, one]
    raise JordanizeError("automatic canonicalization is limited to n <= 3")


def _eval_poly(coeffs, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _deflate(coeffs, root: Fraction):
    """Synthetic division by (x - root); valid when root is a true root."""
    k = len(coeffs) - 1
    q = [Fraction(0)] * k
    q[k - 1] = Fraction(coeffs[k])
    for i in range(k - 1, 0, -1):
        q[i - 1] = coeffs[i] + root * q[i]
    return q


def _rational_roots(coeffs: list, config: FieldConfig) -> list:
    """All rational roots with multiplicity, via the rational root test."""
    rats = []
    for c in coeffs:
        if not c.is_rational():
            raise JordanizeError("characteristic polynomial is not rational")
        rats.append(c.as_rational())
    den = lcm(*(c.denominator for c in rats))
    ints = [Fraction(c * den) for c in rats]

    def candidates():
        lead = int(ints[-1])
        k = 0
        while ints[k] == 0:
            k += 1
        const = int(ints[k])
        ps = [d for d in range(1, abs(const) + 1) if const % d == 0]
        qs = [d for d in range(1, abs(lead) + 1) if lead % d == 0]
        out = {Fraction(0)} if k > 0 else set()
        for p in ps:
            for q in qs:
                out.add(Fraction(p, q))
                out.add(Fraction(-p, q))
        return sorted(out)

    roots = []
    work = list(ints)
    for cand in candidates():
        while len(work) > 1 and _eval_poly(work, cand) == 0:
            work = _deflate(work, cand)
            roots.append(cand)
    if len(roots) != len(coeffs) - 1:
        raise JordanizeError("not all eigenvalues are rational")
    return [config.scalar(r) for r in sorted(roots)]


def _independent_from(vectors, pool, config: FieldConfig):
    """First pool vector outside the span of the given vectors."""
    width = len(pool[0])
    red = RowReducer(width, config)
    for v in vectors:
        red.insert(list(v))
    base_rank = red.rank
    for cand in pool:
        rem, _ = red.reduce(list(cand))
        if any(not e.is_zero() for e in rem):
            return cand
    raise JordanizeError(f"no independent vector found (rank {base_rank})")


def jordanize(spec: LinearMapSpec):
    """(CanonicalCase, ConjugationMap) with conjugate(sigma, spec) canonical.

    Offered only when every eigenvalue is rational (n <= 3); otherwise use
    the explicit constructors plus :func:`find_similarity`.
    """
    if spec.kind == DERIVATION:
        case_kind = DERIVATION
    elif spec.kind == EDERIVATION:
        case_kind = EDERIVATION
    else:
        raise MapKindError("canonical families cover derivations and E-derivations")
    matrix = spec.matrix
    n = matrix.nrows
    config = matrix.config
    if n > 3:
        raise JordanizeError("automatic canonicalization is limited to n <= 3")
    roots = _rational_roots(_char_poly(matrix), config)

    groups = []
    for r in roots:
        if groups and groups[-1][0] == r:
            groups[-1][1] += 1
        else:
            groups.append([r, 1])

    ident = Matrix.identity(n, config)
    standard = [
        [config.one if i == j else config.zero for i in range(n)] for j in range(n)
    ]
    blocks = []  # (eigenvalue, size, chain columns top-first)
    for value, mult in groups:
        nmat = matrix - ident.scale(value)
        eigvecs = nmat.nullspace()
        geom = len(eigvecs)
        if mult == geom:
            for i in range(mult):
                blocks.append((value, 1, [eigvecs[i]]))
        elif mult == 2:
            w = _independent_from(eigvecs, (nmat * nmat).nullspace(), config)
            blocks.append((value, 2, [w, nmat.apply_col(w)]))
        elif mult == 3 and geom == 2:
            w = _independent_from(eigvecs, (nmat * nmat).nullspace(), config)
            nw = nmat.apply_col(w)
            v = _independent_from([nw], eigvecs, config)
            blocks.append((value, 1, [v]))
            blocks.append((value, 2, [w, nw]))
        else:
            w = _independent_from((nmat * nmat).nullspace(), standard, config)
            nw = nmat.apply_col(w)
            blocks.append((value, 3, [w, nw, nmat.apply_col(nw)]))

    blocks.sort(key=lambda b: (b[1], b[0].as_rational()))
    sizes = tuple(size for _, size, _ in blocks)
    if sizes == (1,) * n:
        family = "diag"
        params = tuple(v for v, _, _ in blocks)
    elif sizes[:-1] == (1,) * (n - 2) and sizes[-1] == 2:
        family = "jordan2"
        params = tuple(v for v, s, _ in blocks if s == 1) + (blocks[-1][0],)
    elif sizes == (n,):
        family = "jordan3"
        params = (blocks[0][0],)
    else:
        raise JordanizeError(f"unsupported block structure {sizes}")

    columns = []
    for _, _, chain in blocks:
        columns.extend(chain)
    p = Matrix(list(zip(*columns)), config)
    sigma = ConjugationMap(p.inverse())
    case = CanonicalCase(family, case_kind, params, n)
    expected = canonical(case).matrix
    got = sigma.matrix * matrix * sigma.matrix.inverse()
    if got != expected:
        raise JordanizeError("canonicalization self-check failed")
    return case, sigma


# -- wire format -------------------------------------------------------------------


def spec_from_json_dict(data: dict, config: FieldConfig) -> LinearMapSpec:
    """Load {"kind", "n", "matrix"} with scalar-text entries."""
    from .parse import parse_scalar

    kind = data.get("kind")
    if kind not in KINDS:
        raise MapKindError(f"unknown map kind {kind!r}")
    n = data.get("n")
    matrix = data.get("matrix")
    if not isinstance(matrix, list) or len(matrix) != n:
        raise ValueError("matrix must be a list of n rows")
    rows = []
    for row in matrix:
        if len(row) != n:
            raise ValueError("matrix rows must have n entries")
        rows.append([parse_scalar(str(e), config) for e in row])
    return LinearMapSpec(kind, Matrix(rows, config))
