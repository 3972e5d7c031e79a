"""Command-line front end: ``qhyp <subcommand> [options]``.

Matrices are read in the {"rows", "cols", "entries"} JSON format, points as
either a bare list of [w, x, y, z] quaternions or a point-lift object.
Results go to stdout (or ``--out``) as JSON, except ``sweep`` which writes CSV.
Input errors exit with status 2 and a JSON error object on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Sequence

import numpy as np

from . import certify as cert
from .errors import QHypError
from .experiments import (
    comparison_sweep,
    random_heisenberg,
    random_loxodromic,
    random_regular_elliptic,
    random_symplectic,
)
from .hypmodel import PointLift, bergman_distance, cosh_half_distance, cross_ratio
from .isometry import MODULUS_TOL, SIGN_TOL, UNIPOTENT_TOL, classify, invariants
from .probe import run_probe
from .quatcore import MERGE_TOL, SYMPLECTIC_TOL, HermitianForm, QMatrix

TOL_DEFAULTS = {
    "symplectic": SYMPLECTIC_TOL,
    "merge": MERGE_TOL,
    "modulus": MODULUS_TOL,
    "sign": SIGN_TOL,
    "unipotent": UNIPOTENT_TOL,
    "conv": 1e-9,
}


class InputError(Exception):
    """Bad command line or input file; reported as exit status 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


# ---------------------------------------------------------------------------
# input helpers


def _load_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc


def _load_matrix(path: str) -> QMatrix:
    return QMatrix.from_json(_load_json(path))


def _load_point(path: str, J: HermitianForm) -> PointLift:
    return PointLift.from_json(_load_json(path), J)


def _load_complex_2x2(path: str) -> np.ndarray:
    """Rows of entries, each a real number or a [re, im] pair."""
    obj = _load_json(path)
    try:
        rows = [[complex(*e) if isinstance(e, list) else complex(e) for e in row] for row in obj]
        h = np.array(rows, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{path}: expected a 2x2 complex matrix: {exc}") from exc
    if h.shape != (2, 2):
        raise InputError(f"{path}: expected a 2x2 complex matrix, got shape {h.shape}")
    return h


def _form(args, size: int) -> HermitianForm:
    if size < 2:
        raise InputError(f"matrices must be at least 2x2, got size {size}")
    return HermitianForm.parse(args.form, size - 1)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("QHYP_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise InputError(f"QHYP_SEED must be an integer, got {env!r}") from exc


def _split_tolerances(argv: Sequence[str]) -> tuple[list[str], dict[str, float]]:
    """Pull ``--tol.<name> VALUE`` / ``--tol.<name>=VALUE`` out of argv."""
    rest: list[str] = []
    tols = dict(TOL_DEFAULTS)
    it = iter(argv)
    for arg in it:
        if not arg.startswith("--tol."):
            rest.append(arg)
            continue
        name, eq, value = arg[len("--tol."):].partition("=")
        if not eq:
            value = next(it, None)
            if value is None:
                raise InputError(f"--tol.{name} needs a value")
        if name not in TOL_DEFAULTS:
            raise InputError(f"unknown tolerance {name!r}; known: {', '.join(sorted(TOL_DEFAULTS))}")
        try:
            tol = float(value)
        except ValueError as exc:
            raise InputError(f"--tol.{name}: not a number: {value!r}") from exc
        if not tol > 0 or not math.isfinite(tol):
            raise InputError(f"--tol.{name} must be positive and finite")
        tols[name] = tol
    return rest, tols


def _classify_kwargs(tols: dict[str, float]) -> dict:
    return {
        "tol": tols["symplectic"],
        "merge_tol": tols["merge"],
        "modulus_tol": tols["modulus"],
        "sign_tol": tols["sign"],
        "unipotent_tol": tols["unipotent"],
    }


# ---------------------------------------------------------------------------
# subcommands; each returns (payload, exit_code)


def cmd_classify(args, tols):
    A = _load_matrix(args.matrix)
    C = classify(A, _form(args, A.rows), **_classify_kwargs(tols))
    return C.to_json(), 0


def cmd_invariants(args, tols):
    A = _load_matrix(args.matrix)
    C = classify(A, _form(args, A.rows), **_classify_kwargs(tols))
    out = invariants(C).to_json()
    out["kind"] = C.kind.value
    return out, 0


def cmd_certify(args, tols):
    pred = args.predicate
    if pred == "sl2c":
        if args.theta is None or args.h is None:
            raise InputError("sl2c needs --theta and --h")
        c = cert.sl2c_certificate(args.theta, _load_complex_2x2(args.h))
    else:
        if args.g is None or args.h is None:
            raise InputError(f"{pred} needs --g and --h")
        g, h = _load_matrix(args.g), _load_matrix(args.h)
        if pred == "shimizu":
            c = cert.shimizu_certificate(g, h, tol=tols["symplectic"])
        else:
            J = _form(args, g.rows)
            if pred == "elliptic":
                c = cert.elliptic_certificate(g, h, J, tol=tols["symplectic"])
            else:
                c = cert.cao_parker_certificate(g, h, J, tol=tols["symplectic"])
    code = 1 if args.strict and c.verdict is cert.Verdict.NOT_APPLICABLE else 0
    return c.to_json(), code


def cmd_probe(args, tols):
    g, h = _load_matrix(args.g), _load_matrix(args.h)
    tr = run_probe(g, h, _form(args, g.rows), args.max_steps, tols["conv"])
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(tr.to_csv())
    return tr.to_json(), 0


def cmd_sweep(args, tols):
    rows = comparison_sweep(args.min, args.max, args.step)
    lines = ["theta,sinHalfSq,sinSq,better"]
    lines += [f"{r.theta!r},{r.sin_half_sq!r},{r.sin_sq!r},{r.better.value}" for r in rows]
    return "\n".join(lines) + "\n", 0


def cmd_sample(args, tols):
    seed = _seed(args)
    n = args.n
    if n < 1:
        raise InputError("--n must be >= 1")
    if args.kind == "symplectic":
        A = random_symplectic(n, HermitianForm.parse(args.form, n), seed, args.scale)
    elif args.kind == "regular-elliptic":
        A = random_regular_elliptic(n, seed, scale=args.scale)
    elif args.kind == "loxodromic":
        A = random_loxodromic(n, seed, scale=args.scale)
    else:
        A = random_heisenberg(n, seed, zeta_norm=0.0 if n == 1 else 0.4, scale=args.scale)
    return A.to_json(), 0


def cmd_distance(args, tols):
    obj = _load_json(args.z)
    size = len(obj["vector"] if isinstance(obj, dict) else obj)
    J = _form(args, size)
    z, w = PointLift.from_json(obj, J), _load_point(args.w, J)
    return {"coshHalf": cosh_half_distance(z, w, J), "distance": bergman_distance(z, w, J)}, 0


def cmd_crossratio(args, tols):
    obj = _load_json(args.points[0])
    size = len(obj["vector"] if isinstance(obj, dict) else obj)
    J = _form(args, size)
    pts = [PointLift.from_json(obj, J)] + [_load_point(p, J) for p in args.points[1:]]
    return cross_ratio(*pts, J).to_json(), 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--form", choices=["ball", "siegel"], default="ball")
    common.add_argument("--strict", action="store_true", help="exit 1 on NotApplicable verdicts")
    common.add_argument("--seed", type=int, default=None, help="RNG seed (falls back to $QHYP_SEED)")
    common.add_argument("--out", default=None, help="write output here instead of stdout")

    p = _Parser(
        prog="qhyp",
        description="Quaternionic hyperbolic isometries and Jorgensen-type certificates.",
        epilog="Tolerances: --tol.<name> VALUE with name in " + ", ".join(sorted(TOL_DEFAULTS)),
    )
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("classify", parents=[common], help="dynamical type of a matrix")
    s.add_argument("matrix")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("invariants", parents=[common], help="delta, delta_ct, delta_cp, M_g")
    s.add_argument("matrix")
    s.set_defaults(func=cmd_invariants)

    s = sub.add_parser("certify", parents=[common], help="evaluate one certificate")
    s.add_argument("--predicate", required=True, choices=["elliptic", "caoparker", "shimizu", "sl2c"])
    s.add_argument("--g", help="generator g (T for shimizu)")
    s.add_argument("--h", help="generator h (A for shimizu; 2x2 complex for sl2c)")
    s.add_argument("--theta", type=float)
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("probe", parents=[common], help="conjugation iteration h -> h g h^-1")
    s.add_argument("--g", required=True)
    s.add_argument("--h", required=True)
    s.add_argument("--max-steps", type=int, default=200)
    s.add_argument("--csv", help="also write (k, a11Mod, bound) rows here")
    s.set_defaults(func=cmd_probe)

    s = sub.add_parser("sweep", parents=[common], help="sin^2(theta/2) against sin^2(theta)")
    s.add_argument("--min", type=float, default=0.0)
    s.add_argument("--max", type=float, default=math.pi)
    s.add_argument("--step", type=float, default=1e-3)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("sample", parents=[common], help="seeded random group element")
    s.add_argument(
        "--kind",
        choices=["symplectic", "regular-elliptic", "loxodromic", "heisenberg"],
        default="symplectic",
    )
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--scale", type=float, default=1.0)
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("distance", parents=[common], help="Bergman distance of two points")
    s.add_argument("z")
    s.add_argument("w")
    s.set_defaults(func=cmd_distance)

    s = sub.add_parser("crossratio", parents=[common], help="[z1, z2, z3, z4]")
    s.add_argument("points", nargs=4)
    s.set_defaults(func=cmd_crossratio)
    return p


def _fail(kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return 2


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv, tols = _split_tolerances(argv)
        args = build_parser().parse_args(argv)
        payload, code = args.func(args, tols)
    except InputError as exc:
        return _fail("InputError", str(exc))
    except (QHypError, ValueError, KeyError, TypeError, OverflowError) as exc:
        return _fail(type(exc).__name__, str(exc))

    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2) + "\n"
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            return _fail("InputError", f"cannot write {args.out}: {exc.strerror}")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
