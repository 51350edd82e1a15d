"""Desk-scale, falsification-only evidence for the MZ-subspace property.

A subspace M is MZ when membership of every power f^i forces g*f^m into M
for all large m, for every f and multiplier g.  That quantifies over all
powers, so a scan can only falsify; every clean report here is evidence,
not proof, and the serialized reports say so.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field as dc_field

from .errors import ClosedFormUnavailable, DegreeCapError, MemberRegionError
from .field import field
from .image import (
    DEFAULT_DEGREE_CAP,
    constructive_preimage,
    image_basis,
    member,
    monomial_member_closed_form,
    omega_member_sweep,
    verify_subspace_identity,
)
from .maps import (
    DERIVATION,
    EDERIVATION,
    CanonicalCase,
    LinearMapSpec,
    apply_map,
    canonical,
    exp_derivation,
    lowering_derivation,
    triangular_ederivation,
    triangular_endo,
)
from .matrix import Matrix, RowReducer
from .poly import Polynomial, monomial_basis

EVIDENCE_NOTE = "falsification-only: a clean scan is evidence, not proof"


def default_multipliers(n: int, config) -> tuple:
    """All monomials of degree at most two, in the fixed basis order."""
    out = []
    for d in range(3):
        for beta in monomial_basis(n, d):
            out.append(Polynomial.monomial(n, config, beta))
    return tuple(out)


@dataclass(frozen=True)
class MZScanConfig:
    power_bound: int = 6
    tail_bound: int = 8
    multipliers: tuple = ()
    degree_cap: int = DEFAULT_DEGREE_CAP

    def __post_init__(self):
        if self.power_bound < 1 or self.tail_bound < 1:
            raise ValueError("power and tail bounds must be at least 1")


@dataclass(frozen=True)
class MZScanReport:
    """Per-power membership and per-multiplier tail starts of one scan."""

    map_json: dict
    f_text: str
    power_bound: int
    tail_bound: int
    powers: tuple  # ((i, bool), ...)
    tails: tuple  # ((g_text, tail_start or None), ...)

    def all_powers_member(self) -> bool:
        return all(ok for _, ok in self.powers)

    def tail_start(self, g_text: str):
        for g, start in self.tails:
            if g == g_text:
                return start
        raise KeyError(g_text)

    def clean(self) -> bool:
        return self.all_powers_member() and all(
            start is not None for _, start in self.tails
        )

    def to_json_dict(self) -> dict:
        return {
            "semantics": EVIDENCE_NOTE,
            "map": self.map_json,
            "f": self.f_text,
            "power_bound": self.power_bound,
            "tail_bound": self.tail_bound,
            "powers": [{"i": i, "member": ok} for i, ok in self.powers],
            "tails": [
                {"g": g, "tail_start": start, "checked_to": self.tail_bound}
                for g, start in self.tails
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


def mz_scan(spec: LinearMapSpec, f: Polynomial, config: MZScanConfig) -> MZScanReport:
    """Scan power membership of f and tail starts for each multiplier."""
    multipliers = config.multipliers or default_multipliers(f.n, f.config)
    deg_f = f.degree()
    deg_f = 0 if deg_f == float("-inf") else deg_f
    max_g = max((g.degree() for g in multipliers if not g.is_zero()), default=0)
    needed = deg_f * max(config.power_bound, config.tail_bound) + max_g
    if needed > config.degree_cap:
        raise DegreeCapError(
            f"scan needs degree {needed}, above the cap {config.degree_cap}"
        )

    f_powers = [Polynomial.constant(f.n, f.config, 1)]
    top = max(config.power_bound, config.tail_bound)
    for _ in range(top):
        f_powers.append(f_powers[-1] * f)

    powers = tuple(
        (i, member(spec, f_powers[i], cap=config.degree_cap).member)
        for i in range(1, config.power_bound + 1)
    )

    tails = []
    for g in multipliers:
        last_fail = 0
        for m in range(1, config.tail_bound + 1):
            if not member(spec, g * f_powers[m], cap=config.degree_cap).member:
                last_fail = m
        start = None if last_fail == config.tail_bound else last_fail + 1
        tails.append((str(g), start))
    return MZScanReport(
        spec.to_json_dict(),
        str(f),
        config.power_bound,
        config.tail_bound,
        powers,
        tuple(tails),
    )


def power_escape_search(spec: LinearMapSpec, f: Polynomial, bound: int, cap=None):
    """First i <= bound with f^i outside the image, or None (inconclusive).

    No finite escape bound follows from the power criterion alone, so a
    None answer means "not found within the window", never "none exists".
    """
    limit = DEFAULT_DEGREE_CAP if cap is None else cap
    deg_f = f.degree()
    deg_f = 0 if deg_f == float("-inf") else deg_f
    if deg_f * bound > limit:
        raise DegreeCapError(f"{bound} powers of degree {deg_f} exceed cap {limit}")
    power = Polynomial.constant(f.n, f.config, 1)
    for i in range(1, bound + 1):
        power = power * f
        if not member(spec, power, cap=limit).member:
            return i
    return None


# -- sample table -----------------------------------------------------------------------


def default_family_samples() -> tuple:
    """Five parameter samples per closed-form family: identity and zero
    eigenvalues, roots of unity for m in {2, 3, 4}, and the non-root
    values 2 and -1/2."""
    return (
        ("diag", DERIVATION, 1, ("1", "-1", "0")),
        ("diag", DERIVATION, 1, ("1", "1", "1")),
        ("diag", DERIVATION, 1, ("2", "-1/2", "1")),
        ("diag", DERIVATION, 2, ("z", "1", "-1")),
        ("diag", DERIVATION, 4, ("z", "2", "-1/2")),
        ("diag", EDERIVATION, 1, ("1", "1", "1")),
        ("diag", EDERIVATION, 1, ("2", "-1/2", "1")),
        ("diag", EDERIVATION, 2, ("z", "-1", "1")),
        ("diag", EDERIVATION, 3, ("z", "z^2", "1")),
        ("diag", EDERIVATION, 4, ("z", "z^2", "-1")),
        ("jordan2", DERIVATION, 1, ("1", "-1")),
        ("jordan2", DERIVATION, 1, ("1", "1")),
        ("jordan2", DERIVATION, 1, ("0", "0")),
        ("jordan2", DERIVATION, 1, ("2", "-1/2")),
        ("jordan2", DERIVATION, 3, ("z", "1")),
        ("jordan2", EDERIVATION, 1, ("2", "1")),
        ("jordan2", EDERIVATION, 1, ("1", "1")),
        ("jordan2", EDERIVATION, 1, ("0", "0")),
        ("jordan2", EDERIVATION, 2, ("z", "-1/2")),
        ("jordan2", EDERIVATION, 4, ("2", "z")),
        ("jordan3", DERIVATION, 1, ("1",)),
        ("jordan3", DERIVATION, 1, ("2",)),
        ("jordan3", DERIVATION, 1, ("-1/2",)),
        ("jordan3", DERIVATION, 2, ("z",)),
        ("jordan3", DERIVATION, 1, ("-1",)),
        ("jordan3", EDERIVATION, 1, ("2",)),
        ("jordan3", EDERIVATION, 1, ("-1/2",)),
        ("jordan3", EDERIVATION, 2, ("z",)),
        ("jordan3", EDERIVATION, 3, ("z",)),
        ("jordan3", EDERIVATION, 4, ("z",)),
    )


def build_case(family: str, kind: str, m: int, param_texts) -> CanonicalCase:
    from .parse import parse_scalar

    config = field(m)
    params = tuple(parse_scalar(t, config) for t in param_texts)
    return CanonicalCase(family, kind, params, 3)


# -- the one-shot suite ------------------------------------------------------------------


@dataclass
class SuiteResult:
    rows: list = dc_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r["status"] == "pass" for r in self.rows)

    def add(self, check_id, case=None, params=None, m=None, d=None, ok=True, detail=""):
        self.rows.append(
            {
                "check_id": check_id,
                "case": case,
                "params": params,
                "m": m,
                "d": d,
                "status": "pass" if ok else "fail",
                "detail": detail,
            }
        )

    def to_json_lines(self) -> str:
        return "\n".join(json.dumps(r) for r in self.rows)


def _closed_form_agreement(case: CanonicalCase, spec, d_max, cap):
    compared = agreed = skipped = 0
    first_bad = None
    for d in range(1, d_max + 1):
        for beta in monomial_basis(3, d):
            try:
                closed = monomial_member_closed_form(case, beta)
            except ClosedFormUnavailable:
                skipped += 1
                continue
            compared += 1
            oracle = member(
                spec, Polynomial.monomial(3, case.config, beta), cap=cap
            ).member
            if closed == oracle:
                agreed += 1
            elif first_bad is None:
                first_bad = (beta, closed, oracle)
    return compared, agreed, skipped, first_bad


def theorem_suite(d_max: int = 6, m_list=(2, 3, 4), samples=None, cap=None) -> SuiteResult:
    """Every finite-degree check in one deterministic pass: closed-form
    versus solver sweeps, the four subspace identities, omega sweeps,
    constructive preimage soundness, and the reference scans."""
    cap = DEFAULT_DEGREE_CAP if cap is None else cap
    result = SuiteResult()
    rng = random.Random(20260809)
    table = samples if samples is not None else default_family_samples()

    for family, kind, m, params in table:
        case = build_case(family, kind, m, params)
        spec = canonical(case)
        compared, agreed, skipped, bad = _closed_form_agreement(
            case, spec, d_max, cap
        )
        detail = f"compared {compared}, agreed {agreed}, deferred {skipped}"
        if bad:
            detail += f"; first mismatch {bad[0]}: rule {bad[1]}, solver {bad[2]}"
        result.add(
            "closed_form_oracle",
            case=f"{family}-{kind}",
            params=",".join(params),
            m=m,
            d=d_max,
            ok=compared == agreed,
            detail=detail,
        )

    for m in m_list:
        for d in range(0, d_max + 1):
            for identity in ("lemC", "lemDB", "delta_contains_D"):
                rep = verify_subspace_identity(identity, m, d, cap=cap)
                result.add(
                    f"identity_{identity}",
                    case="triangular_ederivation",
                    params="z",
                    m=m,
                    d=d,
                    ok=rep.holds,
                    detail=f"lhs_rank {rep.lhs_rank}, rhs_rank {rep.rhs_rank}",
                )
    for d in range(0, d_max + 1):
        rep = verify_subspace_identity("exp_image", 1, d, cap=cap)
        result.add(
            "identity_exp_image",
            case="lowering_derivation",
            params=None,
            m=1,
            d=d,
            ok=rep.holds,
            detail=f"lhs_rank {rep.lhs_rank}, rhs_rank {rep.rhs_rank}",
        )

    low = lowering_derivation(field(1))
    sweep = omega_member_sweep(low, d_max, cap=cap)
    result.add(
        "omega_sweep",
        case="lowering_derivation",
        m=1,
        d=d_max,
        ok=sweep.holds,
        detail=f"checked {sweep.checked}, violations {len(sweep.violations)}",
    )
    for m in m_list:
        delta = triangular_ederivation(field(m).zeta())
        sweep = omega_member_sweep(delta, d_max, cap=cap)
        result.add(
            "omega_sweep",
            case="triangular_ederivation",
            params="z",
            m=m,
            d=d_max,
            ok=sweep.holds,
            detail=f"checked {sweep.checked}, violations {len(sweep.violations)}",
        )

    for family, kind, m, params in table:
        if family != "jordan2":
            continue
        case = build_case(family, kind, m, params)
        spec = canonical(case)
        tried = verified = 0
        for _ in range(20):
            beta = tuple(rng.randrange(0, 4) for _ in range(3))
            if not any(beta):
                continue
            try:
                g = constructive_preimage(case, beta)
            except MemberRegionError:
                continue
            tried += 1
            if apply_map(spec, g) == Polynomial.monomial(3, case.config, beta):
                verified += 1
        result.add(
            "preimage_soundness",
            case=f"{family}-{kind}",
            params=",".join(params),
            m=m,
            ok=tried == verified and tried > 0,
            detail=f"verified {verified} of {tried} preimages by application",
        )

    config1 = field(1)
    diag_case = build_case("diag", DERIVATION, 1, ("1", "-1", "0"))
    diag_spec = canonical(diag_case)
    x1 = Polynomial.variable(3, config1, 1)
    x2 = Polynomial.variable(3, config1, 2)
    report = mz_scan(
        diag_spec, x1, MZScanConfig(6, 8, (x2,), degree_cap=max(cap, 9))
    )
    ok = report.all_powers_member() and report.tail_start("x2") == 2
    result.add(
        "mz_scan_reference",
        case="diag-derivation",
        params="1,-1,0",
        m=1,
        ok=ok,
        detail=f"powers clean: {report.all_powers_member()}, x2 tail {report.tail_start('x2')}",
    )

    config2 = field(2)
    delta = triangular_ederivation(config2.zeta())
    x3 = Polynomial.variable(3, config2, 3)
    escape = power_escape_search(delta, x3, 4, cap=cap)
    result.add(
        "escape_reference",
        case="triangular_ederivation",
        params="z",
        m=2,
        ok=escape == 2,
        detail=f"first power outside the image: {escape}",
    )
    return result


# -- fault injection ------------------------------------------------------------------------


def perturbation_catches(m: int, i: int, j: int, d_max: int = 8, cap=None) -> bool:
    """Bump one entry of the triangular endomorphism at a = zeta_m by one
    and report whether any of the tracked checks notices.

    For m = 1 the exponential comparison catches everything; for m > 1 the
    per-degree identity checks are rerun against the perturbed map.
    """
    cap = DEFAULT_DEGREE_CAP if cap is None else cap
    config = field(m)
    endo = triangular_endo(config.zeta())
    rows = [list(r) for r in endo.matrix.rows]
    rows[i][j] = rows[i][j] + config.one
    perturbed = Matrix(rows, config)

    if m == 1:
        reference = exp_derivation(lowering_derivation(config))
        return perturbed != reference.matrix

    delta = LinearMapSpec(EDERIVATION, perturbed)
    low = lowering_derivation(config)
    for d in range(1, d_max + 1):
        lhs = image_basis(delta, d, cap=cap)
        if d % m != 0:
            if lhs.rank != lhs.component.dimension:
                return True  # full-hit check on degrees outside the block
            continue
        rhs = image_basis(low, d, cap=cap)
        if lhs.rank != rhs.rank:
            return True
        red = RowReducer(lhs.component.dimension, config)
        for row in lhs.reducer.basis_vectors():
            red.insert(list(row))
        for row in rhs.reducer.basis_vectors():
            red.insert(list(row))
        if red.rank != lhs.rank:
            return True
    return False


def mutation_sensitivity(m_values=(1, 2, 3, 4), d_max: int = 8, cap=None) -> dict:
    """(m, i, j) -> caught flag for every single-entry perturbation."""
    out = {}
    for m in m_values:
        for i in range(3):
            for j in range(3):
                out[(m, i, j)] = perturbation_catches(m, i, j, d_max=d_max, cap=cap)
    return out
