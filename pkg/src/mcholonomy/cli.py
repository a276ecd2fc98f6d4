"""Command-line front end.

Every input is a JSON document tagged ``"schema": "mc-holonomy/1"``.
Reports go to stdout (or ``--output``) as canonical JSON: sorted keys,
rationals as strings.  Exit status 0 means success, 1 an invariant or
validation failure, 2 unusable input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

import jsonschema

from . import __version__
from .dupont import dupont_contraction, dupont_terms, faces, monomials, p_rank
from .forms import FormError, PolyForm
from .holonomy import (
    HolonomyError,
    bch_oracle,
    edge,
    edge_value,
    fill_horn,
    gamma_check,
    is_thin,
    lie_algebra,
    rho,
    unwrap_lie,
    wrap_lie,
)
from .linf import AlgebraError, CurvedLinfPresentation, curvature_residual, validate_algebra
from .perturb import ContractionError, FiniteContraction, kuranishi_solve, transfer_structure
from .tensor import FormValuedElement, face_restriction, mc_residual_on_simplex
from .vectors import fraction_str, to_fraction
from .words import CutoffError

SCHEMA_TAG = "mc-holonomy/1"

_RATIONAL = {"type": ["string", "integer"], "pattern": r"^\s*-?\d+(\s*/\s*-?\d*[1-9]\d*)?\s*$"}
_VECTOR = {"type": "object", "additionalProperties": _RATIONAL}
_FORM = {
    "type": "object",
    "required": ["n", "terms"],
    "properties": {
        "n": {"type": "integer", "minimum": 0},
        "terms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["exp", "coef"],
                "properties": {
                    "exp": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    "ds": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                    "coef": _RATIONAL,
                },
            },
        },
    },
}
_ELEMENT = {"type": "object", "additionalProperties": _FORM}
_TAG = {"const": SCHEMA_TAG}

ALGEBRA_SCHEMA = {
    "type": "object",
    "required": ["schema", "basis"],
    "properties": {
        "schema": _TAG,
        "lie": {"type": "boolean"},
        "basis": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["name", "deg"],
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "deg": {"type": "integer"},
                    "weight": {"type": "integer", "minimum": 1},
                },
            },
        },
        "brackets": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["in", "out"],
                "properties": {
                    "arity": {"type": "integer", "minimum": 0},
                    "in": {"type": "array", "items": {"type": "string"}},
                    "out": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["name", "coef"],
                            "properties": {"name": {"type": "string"}, "coef": _RATIONAL},
                        },
                    },
                },
            },
        },
        "cutoff": {"type": "integer", "minimum": 1},
        "arity_cap": {"type": ["integer", "null"], "minimum": 0},
    },
}

SIMPLEX_SCHEMA = {
    "type": "object",
    "required": ["schema", "n", "element"],
    "properties": {"schema": _TAG, "n": {"type": "integer", "minimum": 0}, "element": _ELEMENT},
}

HORN_SCHEMA = {
    "type": "object",
    "required": ["schema", "n", "i"],
    "properties": {
        "schema": _TAG,
        "n": {"type": "integer", "minimum": 1},
        "i": {"type": "integer", "minimum": 1},
        "faces": {"type": "object", "patternProperties": {r"^\d+$": _ELEMENT}, "additionalProperties": False},
        "edges": {"type": "object", "patternProperties": {r"^\d+$": _VECTOR}, "additionalProperties": False},
    },
    "oneOf": [{"required": ["faces"]}, {"required": ["edges"]}],
}

_SPACE = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["name", "deg"],
        "properties": {
            "name": {"type": "string"},
            "deg": {"type": "integer"},
            "weight": {"type": "integer", "minimum": 1},
        },
    },
}
_MATRIX = {"type": "object", "additionalProperties": _VECTOR}

CONTRACTION_SCHEMA = {
    "type": "object",
    "required": ["schema", "big"],
    "properties": {
        "schema": _TAG,
        "big": _SPACE,
        "small": _SPACE,
        **{label: _MATRIX for label in ("D", "d", "p", "i", "h")},
        "seed": _VECTOR,
    },
}

BCH_SCHEMA = {
    "type": "object",
    "required": ["schema", "x", "y"],
    "properties": {
        "schema": _TAG,
        "x": _VECTOR,
        "y": _VECTOR,
        "depth": {"type": "integer", "minimum": 1, "maximum": 4},
    },
}


class InputError(Exception):
    """Unusable input: missing file, bad JSON or a schema violation."""


class CheckFailed(Exception):
    """An invariant did not hold; carries the partial report."""

    def __init__(self, report: dict):
        super().__init__(report.get("error", "invariant failure"))
        self.report = report


# ------------------------------------------------------------------ I/O helpers


def _pointer(path) -> str:
    return "/" + "/".join(str(p).replace("~", "~0").replace("/", "~1") for p in path) if path else ""


def load_document(path: str, schema: Mapping) -> dict:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"{path}: no such file")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        lines = [f"{path}#{_pointer(e.absolute_path)}: {e.message}" for e in errors]
        raise InputError("\n".join(lines))
    return data


def _vec_json(vec: Mapping) -> dict:
    return {str(k): fraction_str(c) for k, c in sorted(vec.items(), key=lambda t: str(t[0])) if c}


def _vec_in(data: Mapping) -> dict:
    return {k: to_fraction(v) for k, v in data.items() if to_fraction(v)}


def _face_key(face) -> str:
    return "".join(str(v) for v in face) if all(v < 10 for v in face) else ",".join(map(str, face))


def _whitney_json(y: Mapping) -> dict:
    out: dict = {}
    for (name, face), c in sorted(y.items(), key=lambda t: (t[0][1], t[0][0])):
        if c:
            out.setdefault(_face_key(face), {})[name] = fraction_str(c)
    return out


def dump(report: Any) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


# ------------------------------------------------------------------ algebra loading


def load_algebra(path: str, args) -> tuple[CurvedLinfPresentation, dict]:
    data = load_document(path, ALGEBRA_SCHEMA)
    names = [b["name"] for b in data["basis"]]
    if len(set(names)) != len(names):
        raise InputError(f"{path}#/basis: duplicate basis names")
    cutoff = args.cutoff_w if args.cutoff_w is not None else data.get("cutoff")
    try:
        if data.get("lie"):
            bracket, diff = {}, {}
            for idx, br in enumerate(data.get("brackets", [])):
                out = {o["name"]: o["coef"] for o in br["out"]}
                if len(br["in"]) == 2:
                    bracket[tuple(br["in"])] = out
                elif len(br["in"]) == 1:
                    diff[br["in"][0]] = out
                else:
                    raise InputError(f"{path}#/brackets/{idx}/in: Lie data has brackets of arity 1 or 2 only")
            basis = [(b["name"], b["deg"], b.get("weight", 1)) for b in data["basis"]]
            for key in list(bracket) + [(k,) for k in diff]:
                for k in key:
                    if k not in names:
                        raise InputError(f"{path}#/brackets: unknown basis vector {k!r}")
            g = lie_algebra(basis, bracket, diff, cutoff)
            L = wrap_lie(g)
            if args.arity_cap is not None:
                L = CurvedLinfPresentation(L.basis, L.structure_constants(), L.cutoff, args.arity_cap)
        else:
            doc = dict(data)
            if cutoff is not None:
                doc["cutoff"] = cutoff
            if args.arity_cap is not None:
                doc["arity_cap"] = args.arity_cap
            L = CurvedLinfPresentation.from_json(doc)
    except AlgebraError as exc:
        raise InputError(f"{path}: {exc}") from None
    return L, data


def load_simplex(path: str, L) -> FormValuedElement:
    data = load_document(path, SIMPLEX_SCHEMA)
    return _element(path, "/element", data["n"], data["element"], L)


def _element(path, where, n, coeffs, L) -> FormValuedElement:
    for name, form in coeffs.items():
        if name not in L:
            raise InputError(f"{path}#{where}/{name}: unknown basis vector")
        if form["n"] != n:
            raise InputError(f"{path}#{where}/{name}/n: form on the {form['n']}-simplex, expected {n}")
    try:
        return FormValuedElement.from_json(n, coeffs)
    except FormError as exc:
        raise InputError(f"{path}#{where}: {exc}") from None


# ------------------------------------------------------------------ commands


def cmd_validate(args) -> dict:
    L, _ = load_algebra(args.algebra, args)
    bad = validate_algebra(L)
    report = {
        "command": "validate",
        "dimension": len(L.basis),
        "cutoff": L.cutoff,
        "violations": [str(v) for v in bad],
        "status": "PASS" if not bad else "FAIL",
    }
    if bad:
        raise CheckFailed(report)
    return report


def cmd_mc_check(args) -> dict:
    L, _ = load_algebra(args.algebra, args)
    x = load_simplex(args.element, L)
    try:
        res = mc_residual_on_simplex(x.n, L, x)
    except FormError as exc:
        raise InputError(f"{args.element}: {exc}") from None
    report = {
        "command": "mc-check",
        "n": x.n,
        "residual": res.to_json(),
        "gauge": gamma_check(L, x),
        "thin": is_thin(x),
        "status": "PASS" if not res else "FAIL",
    }
    if res:
        raise CheckFailed(report)
    return report


def cmd_dupont_verify(args) -> dict:
    n = args.n
    if n < 1:
        raise InputError("--n must be at least 1")
    try:
        dupont_contraction(n, verify_degree=args.degree)
        identities = "PASS"
    except ContractionError as exc:
        identities = f"FAIL: {exc}"
    count = len(dupont_terms(n))
    rank = p_rank(n, args.degree)
    report = {
        "command": "dupont-verify",
        "n": n,
        "degree": args.degree,
        "monomials": len(monomials(n, args.degree)),
        "identities": identities,
        "s_terms": count,
        "s_terms_expected": 2 ** (n + 1) - 2,
        "p_rank": rank,
        "p_rank_expected": len(faces(n)),
    }
    ok = identities == "PASS" and count == 2 ** (n + 1) - 2 and rank == 2 ** (n + 1) - 1
    report["status"] = "PASS" if ok else "FAIL"
    if not ok:
        raise CheckFailed(report)
    return report


def cmd_holonomy(args) -> dict:
    L, _ = load_algebra(args.algebra, args)
    x = load_simplex(args.element, L)
    try:
        r = rho(L, x)
    except HolonomyError as exc:
        raise CheckFailed({"command": "holonomy", "status": "FAIL", "error": str(exc)})
    from .holonomy import whitney_part

    report = {
        "command": "holonomy",
        "n": x.n,
        "whitney": _whitney_json(whitney_part(r)),
        "element": r.to_json(),
        "gauge": gamma_check(L, r),
        "status": "PASS",
    }
    if x.n == 1:
        report["edge"] = _vec_json(edge_value(r))
    if not report["gauge"]:
        report["status"] = "FAIL"
        raise CheckFailed(report)
    return report


def cmd_fill_horn(args) -> dict:
    L, _ = load_algebra(args.algebra, args)
    data = load_document(args.horn, HORN_SCHEMA)
    n, i = data["n"], data["i"]
    if i > n:
        raise InputError(f"{args.horn}#/i: horn index {i} exceeds n = {n}")
    faces_ = {}
    if "edges" in data:
        if n != 2:
            raise InputError(f"{args.horn}#/edges: edge shorthand needs n = 2")
        for j, vec in data["edges"].items():
            for k in vec:
                if k not in L:
                    raise InputError(f"{args.horn}#/edges/{j}/{k}: unknown basis vector")
            faces_[int(j)] = edge(L, 1, _vec_in(vec))
    else:
        for j, coeffs in data["faces"].items():
            faces_[int(j)] = _element(args.horn, f"/faces/{j}", n - 1, coeffs, L)
    want = set(range(n + 1)) - {i}
    if set(faces_) != want:
        raise InputError(f"{args.horn}: horn faces must be exactly {sorted(want)}, got {sorted(faces_)}")
    try:
        x = fill_horn(L, n, i, faces_)
    except (HolonomyError, FormError) as exc:
        raise CheckFailed({"command": "fill-horn", "status": "FAIL", "error": str(exc)})
    missing = face_restriction(x, i)
    report = {
        "command": "fill-horn",
        "n": n,
        "i": i,
        "filler": x.to_json(),
        "missing_face": missing.to_json(),
        "thin": is_thin(x),
        "gauge": gamma_check(L, x),
        "status": "PASS",
    }
    if n == 2:
        report["third_edge"] = _vec_json(edge_value(missing))
    return report


def _load_contraction(path: str, cutoff: int, verify: bool = True) -> tuple[FiniteContraction, dict]:
    data = load_document(path, CONTRACTION_SCHEMA)
    try:
        return FiniteContraction.from_json(data, cutoff, verify=verify), data
    except ContractionError as exc:
        raise CheckFailed({"status": "FAIL", "error": f"contraction: {exc}"})
    except (AlgebraError, KeyError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_transfer(args) -> dict:
    L, _ = load_algebra(args.algebra, args)
    c, _ = _load_contraction(args.contraction, L.cutoff)
    try:
        t = transfer_structure(L, c, max_len=args.word_len)
        P = t.presentation()
    except ContractionError as exc:
        raise CheckFailed({"command": "transfer", "status": "FAIL", "error": str(exc)})
    bad = validate_algebra(P)
    report = {
        "command": "transfer",
        "algebra": {"schema": SCHEMA_TAG, **P.to_json()},
        "violations": [str(v) for v in bad],
        "status": "PASS" if not bad else "FAIL",
    }
    if bad:
        raise CheckFailed(report)
    return report


def cmd_kuranishi(args) -> dict:
    L, _ = load_algebra(args.algebra, args)
    c, data = _load_contraction(args.contraction, L.cutoff)
    seed = _vec_in(data.get("seed", {}))
    try:
        x = kuranishi_solve(L, c, seed)
    except ContractionError as exc:
        raise CheckFailed({"command": "kuranishi", "status": "FAIL", "error": str(exc)})
    return {
        "command": "kuranishi",
        "solution": _vec_json(x),
        "residual": _vec_json(curvature_residual(L, x)),
        "status": "PASS",
    }


def cmd_bch(args) -> dict:
    L, _ = load_algebra(args.algebra, args)
    data = load_document(args.pair, BCH_SCHEMA)
    try:
        g = unwrap_lie(L)
    except AlgebraError as exc:
        raise InputError(f"{args.algebra}: {exc}") from None
    x, y = _vec_in(data["x"]), _vec_in(data["y"])
    for label, v in (("x", x), ("y", y)):
        for k in v:
            if k not in L:
                raise InputError(f"{args.pair}#/{label}/{k}: unknown basis vector")
    depth = data.get("depth", min(L.cutoff, 4))
    z = bch_oracle(g.lie_bracket, x, y, depth)
    report = {"command": "bch", "depth": depth, "bch": _vec_json(z), "status": "PASS"}
    if args.check_holonomy:
        third = edge_value(face_restriction(fill_horn(L, 2, 1, {2: edge(L, 1, x), 0: edge(L, 1, y)}), 1))
        report["holonomy"] = _vec_json(third)
        if {k: v for k, v in third.items() if v} != {k: v for k, v in z.items() if v}:
            report["status"] = "FAIL"
            raise CheckFailed(report)
    return report


COMMANDS = {
    "validate": cmd_validate,
    "mc-check": cmd_mc_check,
    "dupont-verify": cmd_dupont_verify,
    "holonomy": cmd_holonomy,
    "fill-horn": cmd_fill_horn,
    "transfer": cmd_transfer,
    "kuranishi": cmd_kuranishi,
    "bch": cmd_bch,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cutoff-w", type=int, help="override the nilpotency cutoff W")
    common.add_argument("--arity-cap", type=int, help="reject brackets above this arity")
    common.add_argument("--word-len", type=int, help="cap on coalgebra word length during transfer")
    common.add_argument("--output", "-o", help="write the JSON report here instead of stdout")
    common.add_argument("--quiet", "-q", action="store_true", help="print nothing; rely on the exit status")

    parser = argparse.ArgumentParser(prog="mcholonomy", description="Exact Maurer-Cartan and holonomy computations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check the curved L-infinity relations")
    p.add_argument("algebra")
    p = sub.add_parser("mc-check", parents=[common], help="Maurer-Cartan residual of a form-valued element")
    p.add_argument("algebra")
    p.add_argument("element")
    p = sub.add_parser("dupont-verify", parents=[common], help="identities of the Dupont contraction")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--degree", type=int, default=3, help="polynomial degree of the test monomials")
    p = sub.add_parser("holonomy", parents=[common], help="retract a simplex onto the gauge locus")
    p.add_argument("algebra")
    p.add_argument("element")
    p = sub.add_parser("fill-horn", parents=[common], help="thin filler of a horn")
    p.add_argument("algebra")
    p.add_argument("horn")
    p = sub.add_parser("transfer", parents=[common], help="transferred brackets along a contraction")
    p.add_argument("algebra")
    p.add_argument("contraction")
    p = sub.add_parser("kuranishi", parents=[common], help="gauge-fixed Maurer-Cartan element")
    p.add_argument("algebra")
    p.add_argument("contraction")
    p = sub.add_parser("bch", parents=[common], help="truncated Baker-Campbell-Hausdorff series")
    p.add_argument("algebra")
    p.add_argument("pair")
    p.add_argument("--check-holonomy", action="store_true", help="compare with the Lambda^2_1 filler")
    return parser


def _positive(args):
    for flag in ("cutoff_w", "arity_cap", "word_len"):
        v = getattr(args, flag, None)
        if v is not None and v < (0 if flag == "arity_cap" else 1):
            raise InputError(f"--{flag.replace('_', '-')} must be positive")


def _emit(args, report: dict):
    text = dump(report)
    if args.output:
        Path(args.output).write_text(text)
    elif not args.quiet:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _positive(args)
        report = COMMANDS[args.command](args)
    except InputError as exc:
        if not args.quiet:
            print(f"error: {exc}", file=sys.stderr)
        return 2
    except CheckFailed as exc:
        report = {"command": args.command, **exc.report}
        _emit(args, report)
        if not args.quiet and "error" in report:
            print(f"failed: {report['error']}", file=sys.stderr)
        return 1
    except CutoffError as exc:
        if not args.quiet:
            print(f"cutoff overflow: {exc}", file=sys.stderr)
        return 1
    _emit(args, report)
    return 0


if __name__ == "__main__":
    sys.exit(main())
