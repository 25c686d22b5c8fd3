"""Command-line front end.

Every subcommand prints one report (JSON by default, `--format text` for
key/value lines).  Reports carry `schema: 1`, the precision and the seed used.
Exit codes: 0 when every check passes, 1 when a check fails, 2 for unusable
input (parse errors, malformed JSON), 3 when the library raises an error.
"""
import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from .config import default_precision, working_precision
from .connect import Connection, NuChoice, epsilon_degree, irregularity
from .epsilon import eps_class
from .errors import EpsdrError, ParseError
from .globalcurve import GlobalFamily, derham, gm_det_class, product_formula_check, ufun_matrix
from .laurent import Laurent
from .parse import (format_value, names_in, parse_expression, parse_family_entry,
                    parse_family_form, parse_puncture, parse_split, parse_tree, ring_for)
from .scalars import QQX
from .symbol import cc_symbol, residue_theorem_check, weil_reciprocity_check

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_ERROR = 0, 1, 2, 3


class InputError(Exception):
    """Malformed JSON input or a literal of the wrong kind."""

    code = "bad_input"


# -- input -----------------------------------------------------------------------

def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _matrix(data, key, rank, parse):
    rows = data.get(key)
    if rows is None:
        return None
    if len(rows) != rank or any(len(r) != rank for r in rows):
        raise InputError(f"{key} must be a {rank}x{rank} matrix")
    return [[parse(str(e)) for e in row] for row in rows]


def _series_entry(src):
    value = parse_expression(src, ring=QQX)
    if isinstance(value, tuple):
        raise InputError(f"matrix entry {src!r} is a form, expected a series")
    if isinstance(value, Laurent):
        return value
    return Laurent.const(QQX, value)


def load_connection(data):
    """{rank, A_t, A_x (optional), precision (optional)} with series literals."""
    try:
        rank = int(data["rank"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError("connection needs an integer rank") from exc
    a_t = _matrix(data, "A_t", rank, _series_entry)
    if a_t is None:
        raise InputError("connection needs A_t")
    return Connection(a_t, _matrix(data, "A_x", rank, _series_entry))


def load_family(data):
    """{punctures, rank, A_t, A_x} with rational expressions in t and x."""
    try:
        rank = int(data["rank"])
        points = [parse_puncture(p) for p in data["punctures"]]
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError("family needs rank and punctures") from exc
    finite = tuple(p for p in points if p is not None)

    def entry(src):
        return parse_family_entry(src, finite)
    a_t = _matrix(data, "A_t", rank, entry)
    if a_t is None:
        raise InputError("family needs A_t")
    a_x = _matrix(data, "A_x", rank, entry)
    return GlobalFamily(finite, ufun_matrix(a_t, finite),
                        None if a_x is None else ufun_matrix(a_x, finite))


def parse_nu(src):
    """A local form u t^l dt, e.g. "dt", "t^-2*dt", "(1 + x*t)*dt/t"."""
    value = parse_expression(src, ring=QQX)
    if not (isinstance(value, tuple) and value[1] == "dt"):
        raise InputError(f"{src!r} is not a multiple of dt")
    return NuChoice.from_coefficient(value[0])


def _laurent_pair(f_src, g_src, nil_order):
    names = names_in(parse_tree(f_src)[0]) | names_in(parse_tree(g_src)[0])
    ring = ring_for(names, nil_order)
    out = []
    for src in (f_src, g_src):
        v = parse_expression(src, ring=ring, nil_order=nil_order)
        if isinstance(v, tuple):
            raise InputError(f"{src!r} is a form, expected a series")
        out.append(v if isinstance(v, Laurent) else Laurent.const(ring, v))
    return out


# -- subcommands -------------------------------------------------------------------

def cmd_symbol(args):
    f, g = _laurent_pair(args.f, args.g, args.nil_order)
    value = cc_symbol(f, g)
    return True, {"f": format_value(f), "g": format_value(g), "value": format_value(value)}


def cmd_reciprocity(args):
    f, g = parse_split(args.f, args.nil_order), parse_split(args.g, args.nil_order)
    weil = weil_reciprocity_check(f, g)
    resid = residue_theorem_check(f, g)
    ok = weil.product == 1 and resid.product == 0
    return ok, {
        "symbols": {str(p): format_value(v) for p, v in weil.per_point},
        "product": format_value(weil.product),
        "residues": {str(p): format_value(v) for p, v in resid.per_point},
        "residue_sum": format_value(resid.product),
    }


def cmd_irregularity(args):
    c = load_connection(_read_json(args.connection))
    return True, {"rank": c.rank, "irregularity": irregularity(c, seed=args.seed)}


def cmd_eps_degree(args):
    c = load_connection(_read_json(args.connection))
    nu = parse_nu(args.nu)
    return True, {"rank": c.rank, "ell": nu.ell, "degree": epsilon_degree(c, nu, seed=args.seed)}


def cmd_eps_class(args):
    c = load_connection(_read_json(args.connection))
    e = eps_class(c, parse_nu(args.nu))
    return e.form is not None, {
        "degree": e.degree,
        "parity": e.parity,
        "form": None if e.form is None else str(e.form),
        "trivialization": e.tag,
        "branch": e.branch,
    }


def cmd_gm_det(args):
    fam = load_family(_read_json(args.family))
    summary = derham(fam)
    form = gm_det_class(fam, summary)
    return summary.euler_poincare["ok"], {
        "h0": summary.h0,
        "h1": summary.h1,
        "pole_bound": summary.bound,
        "euler_poincare": summary.euler_poincare,
        "form": str(form),
    }


def cmd_product_check(args):
    fam = load_family(_read_json(args.family))
    phi = parse_family_form(args.nu, fam.punctures).to_ufun()
    rep = product_formula_check(fam, phi)
    local = {p: {"degree": e.degree, "form": str(e.form), "branch": e.branch}
             for p, e in rep.local.items()}
    return rep.passed, {
        "status": "PASS" if rep.passed else "FAIL",
        "local": local,
        "local_sum": str(rep.lhs),
        "gauss_manin": str(rep.rhs),
        "difference": str(rep.difference),
        "is_dlog": rep.is_dlog,
        "witness": None if rep.witness is None else str(rep.witness),
        "degree_sum": rep.degree_sum,
        "h0": rep.h0,
        "h1": rep.h1,
        "degrees_ok": rep.degrees_ok,
        "euler_poincare_ok": rep.euler_poincare_ok,
    }


def _suite_worker(job):
    from .suites import safe_run
    name, seed, prec = job
    with working_precision(prec):
        r = safe_run(name, seed)
    return {"name": r.name, "passed": r.passed, "cases": r.cases,
            "counterexample": r.counterexample, "seconds": round(r.seconds, 2), "line": r.line()}


def cmd_verify(args):
    from .suites import SUITES
    names = list(SUITES) if args.suite == "all" else [args.suite]
    jobs = [(n, args.seed, default_precision()) for n in names]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_suite_worker, jobs))
    else:
        results = [_suite_worker(j) for j in jobs]
    return all(r["passed"] for r in results), {"suites": results}


COMMANDS = {
    "symbol": cmd_symbol,
    "reciprocity": cmd_reciprocity,
    "irregularity": cmd_irregularity,
    "eps-degree": cmd_eps_degree,
    "eps-class": cmd_eps_class,
    "gm-det": cmd_gm_det,
    "product-check": cmd_product_check,
    "verify": cmd_verify,
}


def _common(p, default):
    p.add_argument("--format", choices=["json", "text"],
                   default="json" if default is None else default)
    p.add_argument("--precision", type=int, default=default,
                   help="series precision (default: EPSDR_PRECISION or 32)")
    p.add_argument("--seed", type=int, default=0 if default is None else default)


def build_parser():
    from .suites import SUITES
    p = argparse.ArgumentParser(prog="epsdr", description="Epsilon-factor data for formal connections.")
    _common(p, None)
    # the same options after the subcommand; SUPPRESS keeps the top-level value otherwise
    common = argparse.ArgumentParser(add_help=False)
    _common(common, argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)

    for name in ("symbol", "reciprocity"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--f", required=True)
        s.add_argument("--g", required=True)
        s.add_argument("--nil-order", type=int, default=2, help="N in Q[eps]/(eps^N)")
    s = sub.add_parser("irregularity", parents=[common])
    s.add_argument("connection")
    for name in ("eps-degree", "eps-class"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("connection")
        s.add_argument("--nu", default="dt")
    s = sub.add_parser("gm-det", parents=[common])
    s.add_argument("family")
    s = sub.add_parser("product-check", parents=[common])
    s.add_argument("family")
    s.add_argument("--nu", default="dt")
    s = sub.add_parser("verify", parents=[common])
    s.add_argument("--suite", choices=["all"] + list(SUITES), default="all")
    s.add_argument("--jobs", type=int, default=1)
    return p


def _emit(report, fmt, out):
    if fmt == "json":
        out.write(json.dumps(report, indent=2, default=str) + "\n")
        return
    if report.get("command") == "verify" and "suites" in report:
        for r in report["suites"]:
            out.write(r["line"] + "\n")
    for key, value in report.items():
        if key == "suites":
            continue
        if isinstance(value, (dict, list)):
            value = json.dumps(value, default=str)
        out.write(f"{key}: {value}\n")


def _precision_of(args, data_path=None):
    if args.precision is not None:
        return args.precision
    if data_path:
        try:
            data = _read_json(data_path)
            if isinstance(data, dict) and "precision" in data:
                return int(data["precision"])
        except (InputError, ValueError, TypeError):
            pass
    return default_precision()


def run(argv=None, out=None):
    """Parse argv, run one subcommand, print its report and return the exit code."""
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    prec = _precision_of(args, getattr(args, "connection", None) or getattr(args, "family", None))
    report = {"schema": SCHEMA, "command": args.command, "precision": prec, "seed": args.seed}
    try:
        with working_precision(prec):
            ok, body = COMMANDS[args.command](args)
        report.update(body)
        report["passed"] = bool(ok)
        code = EXIT_OK if ok else EXIT_FAIL
    except (ParseError, InputError) as exc:
        report.update(passed=False, error={"code": exc.code, "message": str(exc),
                                           **getattr(exc, "info", {})})
        code = EXIT_INPUT
    except EpsdrError as exc:
        report.update(passed=False, error={"code": exc.code, "message": str(exc), **exc.info})
        code = EXIT_ERROR
    _emit(report, args.format, out)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
