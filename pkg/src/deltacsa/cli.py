"""``dcsa`` command-line front end.

Exit status: 0 for a completed analysis (negative verdicts included),
2 when the input lies outside the supported class, 1 for parse and I/O
errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from . import galois, linalg
from .dcsa import (
    Dcsa,
    associated_module,
    constants_algebra,
    find_split_matrix,
    splitting_tower,
    module_tower,
    split_check,
    tensor_power,
    DEFAULT_SIZE_LIMIT,
)
from .diffmod import (
    DiffModule,
    gauge_transform,
    ratmatrix,
    render_matrix,
    transport_fundamental,
    verify_fundamental,
)
from .errors import DivisionByZero, ParseError, SingularGauge, SingularMatrix, SizeLimit, UnsupportedClass
from .hyperexp import parse_tower
from .hypersolve import SplittingTower, fundamental_over, solve_diagonal, solve_rank1, solve_triangular_2x2
from .ideals import delta_stable_subspaces, flag_criterion, reductive_criterion

COMMANDS = (
    "associated-ode",
    "solve",
    "constants",
    "split-check",
    "gauge-check",
    "ideals",
    "classify",
    "tensor-power",
)

EXIT_OK, EXIT_INPUT, EXIT_CLASS = 0, 1, 2


@dataclass
class JobSpec:
    algebra: Dcsa
    command: str
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")


# ---------------------------------------------------------------------------
# input


def _load_json_arg(inline, path, what):
    if inline is not None and path is not None:
        raise ValueError(f"give either --{what} or --{what}-file, not both")
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    if inline is None:
        return None
    return json.loads(inline)


def _tower(texts):
    return None if not texts else SplittingTower.parse(texts)


def _tower_matrix(data):
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise ValueError("matrix must be a JSON list of rows")
    return tuple(tuple(parse_tower(str(v)) for v in r) for r in data)


# ---------------------------------------------------------------------------
# commands


def _solve_conn(conn) -> dict:
    conn = ratmatrix(conn)
    if linalg.is_diagonal(conn):
        fm = solve_diagonal(conn)
        return {"fundamental_matrix": fm.to_json(), "tower": fm.tower.to_json(), "verified": fm.verify().passed}
    if len(conn) == 2 and linalg.is_upper_triangular(conn):
        sol = solve_triangular_2x2(conn)
        out = sol.to_json()
        out["tower"] = sol.tower.to_json()
        out["verified"] = sol.fundamental.verify().passed if sol.fundamental else None
        return out
    tower = SplittingTower(tuple(solve_rank1(conn[i][i]) for i in range(len(conn))))
    fm = fundamental_over(conn, tower)
    if fm is None:
        return {"fundamental_matrix": None, "tower": tower.to_json(), "verified": None,
                "note": "no fundamental matrix over the tower of the diagonal entries"}
    return {"fundamental_matrix": fm.to_json(), "tower": tower.to_json(), "verified": fm.verify().passed}


def cmd_associated_ode(job: JobSpec) -> dict:
    return {"basis": [f"E{k + 1}{l + 1}" for k in range(job.algebra.n) for l in range(job.algebra.n)],
            "connection": associated_module(job.algebra).to_json()}


def cmd_solve(job: JobSpec) -> dict:
    alg = job.algebra
    if job.options.get("column"):
        if not alg.is_triangular():
            raise UnsupportedClass("solver needs diagonal or triangular P")
        return {"module": "column", **_solve_conn(alg.P)}
    if not alg.is_triangular():
        raise UnsupportedClass("solver needs diagonal or triangular P")
    return {"module": "associated", **_solve_conn(associated_module(alg).conn)}


def cmd_constants(job: JobSpec) -> dict:
    alg = job.algebra
    ca = constants_algebra(alg, _tower(job.options.get("tower")))
    out = ca.to_json()
    out["trivial"] = ca.dimension == alg.n ** 2
    out["closed_under_multiplication"] = ca.is_closed()
    out["rank_over_base"] = ca.rank_over_base()
    return out


def cmd_split_check(job: JobSpec) -> dict:
    alg = job.algebra
    z = job.options.get("Z")
    projective = job.options.get("projective", False)
    if z is not None:
        return {"source": "given", **split_check(alg, _tower_matrix(z), projective).to_json()}
    tower = _tower(job.options.get("tower")) or splitting_tower(alg)
    fm = find_split_matrix(alg, tower)
    if fm is None:
        return {"source": "search", "tower": tower.to_json(), "passed": False, "Z": None}
    cert = split_check(alg, fm.entries, projective)
    return {"source": "search", "tower": tower.to_json(), "Z": fm.to_json(), **cert.to_json()}


def cmd_gauge_check(job: JobSpec) -> dict:
    alg = job.algebra
    m = job.options.get("gauge")
    if m is None:
        raise ValueError("gauge-check needs --gauge")
    m = ratmatrix(m)
    a = gauge_transform(alg.P, m)
    out = {"transformed": render_matrix(a)}
    target = job.options.get("target")
    if target is not None:
        out["equals_target"] = a == ratmatrix(target)
    if alg.is_diagonal():
        z = solve_diagonal(alg.P).entries
        moved = transport_fundamental(z, m)
        out["transported_fundamental"] = render_matrix(moved)
        out["transport_verified"] = verify_fundamental(DiffModule(a), moved).passed
    return out


def cmd_ideals(job: JobSpec) -> dict:
    alg = job.algebra
    lattice = delta_stable_subspaces(alg.P)
    flag = flag_criterion(alg)
    return {
        "stable_subspaces": lattice.to_json(),
        "reductive": reductive_criterion(alg).to_json(),
        "flag": None if flag is None else flag.to_json(),
    }


def _group(logders) -> dict:
    desc = galois.tower_description(list(logders))
    return {**desc.to_json(), "summary": desc.descriptor.summary(),
            "order": desc.algebraic_degree if desc.transcendence_degree == 0 else None}


def cmd_classify(job: JobSpec) -> dict:
    alg = job.algebra
    return {
        "module_tower": {"generators": module_tower(alg).to_json(), **_group(module_tower(alg).logders)},
        "splitting_tower": {"generators": splitting_tower(alg).to_json(), **_group(splitting_tower(alg).logders)},
    }


def cmd_tensor_power(job: JobSpec) -> dict:
    m = job.options.get("m", 2)
    bound = job.options.get("bound", DEFAULT_SIZE_LIMIT)
    power = tensor_power(job.algebra, m, bound)
    out = {"m": m, **power.to_json()}
    tower = _tower(job.options.get("tower"))
    if tower is not None:
        ca = constants_algebra(power, tower)
        out["trivial_over_tower"] = ca.dimension == power.n ** 2
        out["horizontal_dimension"] = ca.dimension
    return out


HANDLERS = {
    "associated-ode": cmd_associated_ode,
    "solve": cmd_solve,
    "constants": cmd_constants,
    "split-check": cmd_split_check,
    "gauge-check": cmd_gauge_check,
    "ideals": cmd_ideals,
    "classify": cmd_classify,
    "tensor-power": cmd_tensor_power,
}


def run(job: JobSpec) -> dict:
    return HANDLERS[job.command](job)


# ---------------------------------------------------------------------------
# output


def _format(value, indent=0) -> list:
    pad = "  " * indent
    lines = []
    if isinstance(value, dict):
        for k, v in value.items():
            if isinstance(v, (dict, list)) and v and not _is_flat_matrix(v):
                lines.append(f"{pad}{k}:")
                lines.extend(_format(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_inline(v)}")
    elif isinstance(value, list):
        for v in value:
            if isinstance(v, dict):
                lines.append(f"{pad}-")
                lines.extend(_format(v, indent + 1))
            else:
                lines.append(f"{pad}- {_inline(v)}")
    else:
        lines.append(f"{pad}{_inline(value)}")
    return lines


def _is_flat_matrix(v) -> bool:
    return isinstance(v, list) and all(isinstance(r, list) and all(isinstance(e, str) for e in r) for r in v) and bool(v)


def _inline(v) -> str:
    if _is_flat_matrix(v):
        return "[" + "; ".join(", ".join(r) for r in v) + "]"
    if isinstance(v, list):
        return "[" + ", ".join(_inline(e) for e in v) + "]"
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dcsa", description="Differential matrix algebras over Q(x).")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--P", dest="P", help="P as inline JSON (list of rows or {\"n\", \"P\"})")
    ap.add_argument("--P-file", dest="P_file", help="read P from a JSON file")
    ap.add_argument("--json", action="store_true", help="emit a JSON report")
    ap.add_argument("--tower", action="append", default=[], metavar="GEN",
                    help="tower generator such as '(x)^(1/2)' (repeatable)")
    ap.add_argument("--column", action="store_true", help="solve: use the column module Y' = PY")
    ap.add_argument("--Z", dest="Z", help="split-check: candidate matrix as JSON")
    ap.add_argument("--Z-file", dest="Z_file")
    ap.add_argument("--projective", action="store_true", help="split-check: accept Z' = (P + sI)Z")
    ap.add_argument("--gauge", help="gauge-check: gauge matrix m as JSON")
    ap.add_argument("--target", help="gauge-check: compare the result with this matrix")
    ap.add_argument("--m", type=int, default=2, help="tensor-power exponent")
    ap.add_argument("--bound", type=int, default=DEFAULT_SIZE_LIMIT, help="tensor-power size bound")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        data = _load_json_arg(args.P, args.P_file, "P")
        if data is None:
            raise ValueError("no algebra given: use --P or --P-file")
        options = {
            "tower": args.tower,
            "column": args.column,
            "Z": _load_json_arg(args.Z, args.Z_file, "Z"),
            "projective": args.projective,
            "gauge": None if args.gauge is None else json.loads(args.gauge),
            "target": None if args.target is None else json.loads(args.target),
            "m": args.m,
            "bound": args.bound,
        }
        job = JobSpec(Dcsa.from_json(data), args.command, options)
        report = run(job)
    except (UnsupportedClass, SizeLimit) as e:
        print(f"dcsa: unsupported input: {e}", file=sys.stderr)
        return EXIT_CLASS
    except (ParseError, DivisionByZero, SingularGauge, SingularMatrix, ValueError, KeyError, TypeError, OSError) as e:
        print(f"dcsa: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INPUT
    if args.json:
        print(json.dumps({"command": args.command, "algebra": job.algebra.to_json(), "report": report}, indent=2))
    else:
        print(f"{args.command} (n = {job.algebra.n})")
        print("\n".join(_format(report, 1)))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
