"""Command-line interface: one subcommand per engine operation.

Exit codes: 0 = success or a true mathematical answer, 1 = a negative
mathematical answer (non-member, failed identity, falsified scan,
monomial outside a constructive region), 2 = usage, parse, or input
errors.  Results are printed as single JSON objects (or JSON lines for
``suite``); ``--text`` switches to a short human-readable line.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import (
    DegreeCapError,
    LTConditionError,
    MemberRegionError,
    MzlabError,
    NilpotencyError,
    ParseError,
)
from .field import field
from .image import (
    DEFAULT_DEGREE_CAP,
    image_basis,
    lt_triangular_preimage,
    member,
    verify_subspace_identity,
    IDENTITIES,
    constructive_preimage,
)
from .maps import (
    DERIVATION,
    EDERIVATION,
    KINDS,
    CanonicalCase,
    ConjugationMap,
    LinearMapSpec,
    apply_map,
    canonical,
    conjugate,
    exp_derivation,
    lowering_derivation,
    spec_from_json_dict,
    triangular_ederivation,
    triangular_endo,
)
from .matrix import Matrix
from .mzscan import MZScanConfig, mz_scan, theorem_suite
from .parse import parse_polynomial, parse_scalar
from .poly import MonomialOrder, Polynomial

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2

SCHEMA_VERSION = 1

CASE_NAMES = {
    "diag-deriv": ("diag", DERIVATION),
    "diag-ederiv": ("diag", EDERIVATION),
    "jordan2-deriv": ("jordan2", DERIVATION),
    "jordan2-ederiv": ("jordan2", EDERIVATION),
    "jordan3-deriv": ("jordan3", DERIVATION),
    "jordan3-ederiv": ("jordan3", EDERIVATION),
}

BUILTIN_MAPS = ("D", "phi_a", "delta_a")


def _parse_order(text: str, n: int) -> MonomialOrder:
    kind, _, perm = text.partition(":")
    if kind not in ("lex", "grlex"):
        raise ParseError(f"unknown order kind {kind!r}", 1)
    if not perm:
        return MonomialOrder(kind, tuple(range(n)))
    names = perm.split(">") if ">" in perm else perm.split(",")
    priority = []
    for name in names:
        name = name.strip()
        if name.startswith("x"):
            name = name[1:]
        priority.append(int(name) - 1)
    return MonomialOrder(kind, tuple(priority))


def _emit(args, payload: dict, text_line: str) -> None:
    if args.text:
        print(text_line)
    else:
        print(json.dumps({"schema_version": SCHEMA_VERSION, **payload}))


def _load_map_data(args) -> dict:
    source = args.file if getattr(args, "file", None) else args.map
    if source is None:
        raise MzlabError("no map given; use --map/--file or --case")
    if source.strip().startswith("{"):
        return json.loads(source)
    with open(source, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _resolve_case(args, config) -> CanonicalCase:
    family, kind = CASE_NAMES[args.case]
    if not args.params:
        raise MzlabError(f"--case {args.case} needs --params")
    params = tuple(parse_scalar(t, config) for t in args.params.split(","))
    return CanonicalCase(family, kind, params, args.n)


def _resolve_map(args, config) -> LinearMapSpec:
    """A map from --case/--params, a builtin name, inline JSON, or a file.

    With both --file and --map, --map may name a kind to reinterpret the
    file's matrix (for example an endomorphism file read as the
    E-derivation it induces)."""
    if getattr(args, "case", None):
        return canonical(_resolve_case(args, config))
    name = getattr(args, "map", None)
    if name == "D":
        return lowering_derivation(config)
    if name == "phi_a":
        return triangular_endo(config.zeta())
    if name == "delta_a":
        return triangular_ederivation(config.zeta())
    data = _load_map_data(args)
    if getattr(args, "file", None) and name in KINDS:
        data = {**data, "kind": name}
    return spec_from_json_dict(data, config)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, default=3, help="number of variables")
    parser.add_argument("--m", type=int, default=1, help="field conductor (m=1: rationals)")
    parser.add_argument(
        "--cap",
        type=int,
        default=None,
        help=f"per-degree engine cap (default {DEFAULT_DEGREE_CAP}; env MZLAB_CAP overrides)",
    )
    parser.add_argument(
        "--order",
        default="grlex",
        help="monomial order, e.g. grlex, lex:x1>x2>x3, grlex:x3>x2>x1",
    )
    parser.add_argument(
        "--text", action="store_true", help="human-readable output instead of JSON"
    )


def _add_map_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--map", help="map file, inline JSON, builtin (D, phi_a, delta_a), or kind override with --file")
    parser.add_argument("--file", help="map JSON file")
    parser.add_argument("--case", choices=sorted(CASE_NAMES), help="canonical family")
    parser.add_argument("--params", help="comma-separated scalar parameters for --case")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mzlab",
        description="Exact image structure of linear derivations and E-derivations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("apply", help="apply a map to a polynomial")
    _add_common(p)
    _add_map_args(p)
    p.add_argument("--poly", required=True)

    p = sub.add_parser("member", help="decide membership in the image, with witness")
    _add_common(p)
    _add_map_args(p)
    p.add_argument("--poly", required=True)

    p = sub.add_parser("preimage", help="produce a preimage of a monomial")
    _add_common(p)
    _add_map_args(p)
    p.add_argument("--beta", required=True, help="comma-separated exponents, e.g. 1,0,1")
    p.add_argument(
        "--method",
        choices=("constructive", "lt", "oracle"),
        default=None,
        help="constructive (jordan2 cases), lt (leading-term elimination), oracle",
    )

    p = sub.add_parser("image-basis", help="row-reduced basis of the degree-d image")
    _add_common(p)
    _add_map_args(p)
    p.add_argument("--degree", "-d", type=int, required=True)

    p = sub.add_parser("canonical", help="matrix of a canonical family member")
    _add_common(p)
    p.add_argument("--family", choices=("diag", "jordan2", "jordan3"), required=True)
    p.add_argument("--kind", choices=("derivation", "ederivation"), required=True)
    p.add_argument("--params", required=True)

    p = sub.add_parser("conjugate", help="conjugate a map by an invertible matrix")
    _add_common(p)
    _add_map_args(p)
    p.add_argument("--sigma", required=True, help="matrix rows as JSON, inline or a file")

    p = sub.add_parser("exp", help="exponential automorphism of a nilpotent derivation")
    _add_common(p)
    _add_map_args(p)

    p = sub.add_parser("verify", help="check a per-degree subspace identity")
    _add_common(p)
    p.add_argument("identity", choices=IDENTITIES)
    p.add_argument("--degree", "-d", type=int, required=True)

    p = sub.add_parser("mz-scan", help="power membership and multiplier tail scan")
    _add_common(p)
    _add_map_args(p)
    p.add_argument("--poly", required=True)
    p.add_argument("--powers", type=int, default=6)
    p.add_argument("--tail", type=int, default=8)
    p.add_argument("--multipliers", help="semicolon-separated polynomials")

    p = sub.add_parser("suite", help="run every finite-degree check; JSON lines")
    _add_common(p)
    p.add_argument("--dmax", type=int, default=6)
    p.add_argument("--m-list", default="2,3,4")

    return parser


def _engine_cap(args) -> int:
    if args.cap is not None:
        return args.cap
    env = os.environ.get("MZLAB_CAP")
    if env is not None:
        return int(env)
    return DEFAULT_DEGREE_CAP


def _cmd_apply(args, config) -> int:
    spec = _resolve_map(args, config)
    f = parse_polynomial(args.poly, args.n, config)
    result = apply_map(spec, f)
    _emit(args, {"result": str(result)}, str(result))
    return EXIT_OK


def _cmd_member(args, config) -> int:
    spec = _resolve_map(args, config)
    f = parse_polynomial(args.poly, args.n, config)
    verdict = member(spec, f, cap=_engine_cap(args))
    payload = {
        "member": verdict.member,
        "witness": str(verdict.witness) if verdict.witness is not None else None,
        "failing_degree": verdict.failing[0] if verdict.failing else None,
        "residual": str(verdict.failing[1]) if verdict.failing else None,
    }
    if verdict.member:
        _emit(args, payload, f"member; witness {payload['witness']}")
        return EXIT_OK
    _emit(
        args,
        payload,
        f"not a member; degree {payload['failing_degree']} residual {payload['residual']}",
    )
    return EXIT_NEGATIVE


def _cmd_preimage(args, config) -> int:
    beta = tuple(int(t) for t in args.beta.split(","))
    if len(beta) != args.n:
        raise MzlabError(f"--beta needs {args.n} exponents")
    target = Polynomial.monomial(args.n, config, beta)
    method = args.method
    if method is None:
        method = "constructive" if getattr(args, "case", None) else "oracle"
    if method == "constructive":
        if not getattr(args, "case", None):
            raise MzlabError("constructive preimages need --case jordan2-...")
        case = _resolve_case(args, config)
        spec = canonical(case)
        witness = constructive_preimage(case, beta)
    elif method == "lt":
        spec = _resolve_map(args, config)
        order = _parse_order(args.order, args.n)
        witness = lt_triangular_preimage(spec, order, beta)
    else:
        spec = _resolve_map(args, config)
        verdict = member(spec, target, cap=_engine_cap(args))
        if not verdict.member:
            payload = {
                "member": False,
                "witness": None,
                "residual": str(verdict.failing[1]),
            }
            _emit(args, payload, "not a member")
            return EXIT_NEGATIVE
        witness = verdict.witness
    verified = apply_map(spec, witness) == target
    payload = {
        "method": method,
        "beta": list(beta),
        "witness": str(witness),
        "verified": verified,
    }
    _emit(args, payload, f"witness {witness} (verified: {verified})")
    return EXIT_OK if verified else EXIT_NEGATIVE


def _cmd_image_basis(args, config) -> int:
    spec = _resolve_map(args, config)
    gi = image_basis(spec, args.degree, cap=_engine_cap(args))
    payload = {
        "degree": args.degree,
        "dimension": gi.component.dimension,
        "rank": gi.rank,
        "basis": [str(p) for p in gi.basis_polynomials()],
    }
    _emit(
        args,
        payload,
        f"degree {args.degree}: rank {gi.rank} of {gi.component.dimension}",
    )
    return EXIT_OK


def _cmd_canonical(args, config) -> int:
    params = tuple(parse_scalar(t, config) for t in args.params.split(","))
    case = CanonicalCase(args.family, args.kind, params, args.n)
    spec = canonical(case)
    _emit(args, spec.to_json_dict(), str(spec.matrix))
    return EXIT_OK


def _load_matrix(text: str, n: int, config) -> Matrix:
    if text.strip().startswith("["):
        data = json.loads(text)
    else:
        with open(text, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    if len(data) != n or any(len(row) != n for row in data):
        raise MzlabError(f"sigma must be an {n}x{n} matrix")
    return Matrix([[parse_scalar(str(e), config) for e in row] for row in data], config)


def _cmd_conjugate(args, config) -> int:
    spec = _resolve_map(args, config)
    sigma = ConjugationMap(_load_matrix(args.sigma, args.n, config))
    result = conjugate(sigma, spec)
    _emit(args, result.to_json_dict(), str(result.matrix))
    return EXIT_OK


def _cmd_exp(args, config) -> int:
    spec = _resolve_map(args, config)
    result = exp_derivation(spec)
    _emit(args, result.to_json_dict(), str(result.matrix))
    return EXIT_OK


def _cmd_verify(args, config) -> int:
    report = verify_subspace_identity(
        args.identity, args.m, args.degree, cap=_engine_cap(args)
    )
    _emit(
        args,
        report.to_json_dict(),
        f"{args.identity} m={args.m} d={args.degree}: "
        f"{'holds' if report.holds else 'FAILS'} "
        f"(lhs {report.lhs_rank}, rhs {report.rhs_rank})",
    )
    return EXIT_OK if report.holds else EXIT_NEGATIVE


def _cmd_mz_scan(args, config) -> int:
    spec = _resolve_map(args, config)
    f = parse_polynomial(args.poly, args.n, config)
    multipliers = ()
    if args.multipliers:
        multipliers = tuple(
            parse_polynomial(t, args.n, config) for t in args.multipliers.split(";")
        )
    scan_config = MZScanConfig(
        args.powers, args.tail, multipliers, degree_cap=_engine_cap(args)
    )
    report = mz_scan(spec, f, scan_config)
    clean = report.clean()
    _emit(
        args,
        report.to_json_dict(),
        f"powers clean: {report.all_powers_member()}; "
        + "; ".join(f"{g}: tail {start}" for g, start in report.tails),
    )
    return EXIT_OK if clean else EXIT_NEGATIVE


def _cmd_suite(args, config) -> int:
    m_list = tuple(int(t) for t in args.m_list.split(","))
    result = theorem_suite(d_max=args.dmax, m_list=m_list, cap=_engine_cap(args))
    if args.text:
        for row in result.rows:
            print(
                f"{row['status']:4} {row['check_id']} case={row['case']} "
                f"m={row['m']} d={row['d']} {row['detail']}"
            )
    else:
        print(result.to_json_lines())
    return EXIT_OK if result.passed else EXIT_NEGATIVE


_COMMANDS = {
    "apply": _cmd_apply,
    "member": _cmd_member,
    "preimage": _cmd_preimage,
    "image-basis": _cmd_image_basis,
    "canonical": _cmd_canonical,
    "conjugate": _cmd_conjugate,
    "exp": _cmd_exp,
    "verify": _cmd_verify,
    "mz-scan": _cmd_mz_scan,
    "suite": _cmd_suite,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = field(args.m)
        return _COMMANDS[args.command](args, config)
    except (MemberRegionError, LTConditionError) as exc:
        # the mathematical hypothesis fails: a definite negative answer
        print(json.dumps({"schema_version": SCHEMA_VERSION, "error": str(exc)}))
        return EXIT_NEGATIVE
    except (ParseError, DegreeCapError, NilpotencyError, MzlabError) as exc:
        print(f"mzlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"mzlab: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
