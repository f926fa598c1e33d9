"""Command-line front end.

Every command prints one canonical JSON report (sorted keys) to stdout or
to ``--out``.  Exit codes: 0 on success, 1 when an input is rejected
(parse errors, failed preconditions, unsupported groups), 2 when a check
produces a falsification event (the two sides of the criterion disagree,
or a corollary fails on some case).

Arguments starting with ``@`` are read from the named file.
"""
import argparse
import json
import re
import sys

from tensorquot import __version__, _kernels
from tensorquot.criterion import (
    additivity_suite,
    chart_independence_suite,
    check_main_theorem,
    principal_stratum_check,
    roundtrip_suite,
    skew_pushforward_check,
    skew_pushforward_suite,
    solomon_check,
    solomon_suite,
    theorem_suite,
    verify_lift,
)
from tensorquot.errors import ParseError, TensorQuotError, UnsupportedQuotientError
from tensorquot.grouprep import (
    find_pseudo_reflections,
    group_from_spec,
    is_reflection_group,
    molien_series,
    reflection_components,
    x_names,
)
from tensorquot.parsing import format_poly, format_scalar, parse_poly, parse_tensor
from tensorquot.polyalg import MPoly
from tensorquot.quotient import builtin_chart, chart_from_spec
from tensorquot.tensor import b_divisor, divisor_of_tensor, is_regular, pullback, pushforward

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_FALSIFIED = 2

SUITES = {
    "theorem": theorem_suite,
    "roundtrip": roundtrip_suite,
    "additivity": additivity_suite,
    "charts": chart_independence_suite,
    "solomon": solomon_suite,
    "skewpush": skew_pushforward_suite,
}


class UsageError(TensorQuotError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which is reserved for falsification
    def error(self, message):
        raise UsageError(message)


# -- input helpers -------------------------------------------------------------------

def _read(arg):
    if isinstance(arg, str) and arg.startswith("@"):
        with open(arg[1:], encoding="utf-8") as fh:
            return fh.read()
    return arg


def _spec_object(text):
    s = text.strip()
    if not s.startswith("{"):
        return None
    try:
        return json.loads(s)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", s, exc.pos) from exc


def load_group(spec):
    return group_from_spec(_read(spec).strip())


def load_chart(group_spec, chart_spec=None):
    """Quotient chart from a built-in id, a JSON group/chart spec, or --chart."""
    text = _read(group_spec).strip()
    obj = _spec_object(text)
    if chart_spec is not None:
        ctext = _read(chart_spec).strip()
        cobj = _spec_object(ctext)
        if cobj is not None and "invariants" in cobj:
            group = load_group(group_spec)
            chart = chart_from_spec(cobj, group=group)
            chart.label = chart.label or "custom"
            return chart
        return chart_from_spec(ctext)
    if obj is None:
        return builtin_chart(text)
    if "builtin" in obj:
        return builtin_chart(obj["builtin"])
    if "invariants" in obj:
        chart = chart_from_spec(obj) if "group" in obj else chart_from_spec(obj, group=group_from_spec(obj))
        chart.label = chart.label or "custom"
        return chart
    raise UnsupportedQuotientError("no quotient chart: give a built-in family or invariants")


def _poly_list(text, names, conductor):
    text = _read(text)
    parts = [t for t in re.split(r"[;,]", text) if t.strip()]
    return [parse_poly(t, names, conductor) for t in parts]


_B_ENTRY = re.compile(r"^\s*(\d+)\s*\[(.+)\]\s*$")


def parse_b(text, names, conductor):
    """B-divisor literal such as ``3[v]`` or ``2[f1^2 - 4*f2]; 3[f2]``."""
    text = _read(text).strip()
    if text in ("", "0", "none"):
        return []
    out = []
    for part in text.split(";"):
        m = _B_ENTRY.match(part)
        if not m:
            raise ParseError("expected entries of the form b[polynomial]", text, text.find(part))
        out.append((parse_poly(m.group(2), names, conductor), int(m.group(1))))
    return out


# -- report helpers -------------------------------------------------------------------

def _poly_str(p, names):
    return format_poly(p, names)


def _divisor_dict(div, names):
    return {
        "entries": [{"component": _poly_str(d, names), "multiplicity": m}
                    for d, m in div.multiplicities.items()],
        "residual_regular": div.residual_regular,
        "effective": div.is_effective(),
    }


def _chart_dict(chart):
    xn, fn = chart.x_names, chart.f_names
    return {
        "label": chart.label,
        "x_names": list(xn),
        "f_names": list(fn),
        "invariants": [_poly_str(f, xn) for f in chart.invariants],
        "degrees": list(chart.degrees),
        "jacobian_determinant": _poly_str(chart.jac_det, xn),
        "reflection_divisor": [
            {"delta": _poly_str(c.delta, fn), "multiplicity": c.multiplicity,
             "witness": _poly_str(c.witness, xn)}
            for c in chart.divisor.components
        ],
    }


# -- commands -------------------------------------------------------------------------

def cmd_analyze(args):
    G = load_group(args.group)
    names = x_names(G.dim)
    refl = find_pseudo_reflections(G)
    comps = reflection_components(G)
    report = {
        "command": "analyze",
        "dim": G.dim,
        "order": G.order,
        "conductor": G.conductor,
        "pseudo_reflections": [
            {"hyperplane": _poly_str(MPoly.linear_form(list(r.form)), names),
             "eigenvalue": format_scalar(r.eigenvalue), "order": r.order}
            for r in refl
        ],
        "components": [
            {"hyperplanes": [_poly_str(MPoly.linear_form(list(f)), names) for f in c.forms],
             "order": c.order}
            for c in comps
        ],
        "is_reflection_group": is_reflection_group(G),
        "molien": molien_series(G, args.degree_cap),
    }
    if report["is_reflection_group"]:
        try:
            report["chart"] = _chart_dict(load_chart(args.group, args.chart))
        except UnsupportedQuotientError:
            report["chart"] = None
    return report, EXIT_OK


def _f_tensor(chart, text):
    return parse_tensor(_read(text), chart.f_names, chart.group.conductor)


def _x_tensor(chart, text):
    return parse_tensor(_read(text), chart.x_names, chart.group.conductor)


def cmd_check(args):
    if args.side == "x":
        G = load_group(args.group)
        phi = parse_tensor(_read(args.tensor), x_names(G.dim), G.conductor)
        rep = principal_stratum_check(G, phi)
        out = rep.to_dict()
        out.update(command="check", side="x", tensor=phi.to_str())
        return out, EXIT_OK if rep.agree else EXIT_FALSIFIED
    chart = load_chart(args.group, args.chart)
    tau = _f_tensor(chart, args.tensor)
    extra = _poly_list(args.component, chart.f_names, chart.group.conductor) if args.component else []
    rep = check_main_theorem(chart, tau, extra)
    out = rep.to_dict()
    out.update(command="check", side="f", tensor=tau.to_str(), falsification=not rep.agree)
    return out, EXIT_OK if rep.agree else EXIT_FALSIFIED


def cmd_pullback(args):
    chart = load_chart(args.group, args.chart)
    tau = _f_tensor(chart, args.tensor)
    pb = pullback(chart, tau)
    return {"command": "pullback", "tensor": tau.to_str(), "pullback": pb.to_str(),
            "regular": is_regular(pb)}, EXIT_OK


def cmd_pushforward(args):
    chart = load_chart(args.group, args.chart)
    phi = _x_tensor(chart, args.tensor)
    pf = pushforward(chart, phi)
    return {"command": "pushforward", "tensor": phi.to_str(), "pushforward": pf.to_str(),
            "regular": is_regular(pf)}, EXIT_OK


def cmd_divisor(args):
    chart = load_chart(args.group, args.chart)
    cond = chart.group.conductor
    if args.side == "x":
        names = chart.x_names
        tau = _x_tensor(chart, args.tensor)
        comps = list(chart.alphas)
    else:
        names = chart.f_names
        tau = _f_tensor(chart, args.tensor)
        comps = list(chart.deltas)
    if args.component:
        comps += [c for c in _poly_list(args.component, names, cond) if c not in comps]
    div = divisor_of_tensor(tau, comps)
    out = {"command": "divisor", "side": args.side, "tensor": tau.to_str()}
    out.update(_divisor_dict(div, names))
    return out, EXIT_OK


def cmd_bdivisor(args):
    chart = load_chart(args.group, args.chart)
    names, cond = chart.f_names, chart.group.conductor
    tau = _f_tensor(chart, args.tensor)
    B = chart.divisor.as_pairs() if args.B is None else parse_b(args.B, names, cond)
    extra = _poly_list(args.component, names, cond) if args.component else []
    div = b_divisor(tau, B, extra, args.adapted_index, chart.deltas)
    out = {"command": "bdivisor", "tensor": tau.to_str(),
           "B": [{"component": _poly_str(d, names), "b": b} for d, b in B]}
    out.update(_divisor_dict(div, names))
    return out, EXIT_OK


def cmd_solomon(args):
    chart = load_chart(args.group, args.chart)
    if args.side == "x":
        phi = _x_tensor(chart, args.tensor)
        ok = skew_pushforward_check(chart, phi)
        return {"command": "solomon", "side": "x", "tensor": phi.to_str(),
                "pushforward_regular": ok, "falsification": not ok}, \
            EXIT_OK if ok else EXIT_FALSIFIED
    omega = _f_tensor(chart, args.tensor)
    rep = solomon_check(chart, omega)
    out = {"command": "solomon", "side": "f", "tensor": omega.to_str(),
           "regular": rep.divisor_criterion_holds,
           "pullback_regular": rep.direct_regularity_holds,
           "agree": rep.agree, "falsification": not rep.agree}
    return out, EXIT_OK if rep.agree else EXIT_FALSIFIED


def cmd_lift_verify(args):
    chart = load_chart(args.group, args.chart)
    cond = chart.group.conductor
    xn, fn = chart.x_names, chart.f_names
    phi = _poly_list(args.phi, xn, cond)
    phi_inv = _poly_list(args.phi_inverse, xn, cond)
    psi = _poly_list(args.psi, fn, cond)
    psi_inv = _poly_list(args.psi_inverse, fn, cond)
    ok = verify_lift(chart, phi, phi_inv, psi, psi_inv)
    return {"command": "lift-verify",
            "phi": [_poly_str(p, xn) for p in phi],
            "psi": [_poly_str(p, fn) for p in psi],
            "commutes": ok}, EXIT_OK


def cmd_fuzz(args):
    chart = load_chart(args.group, args.chart)
    kinds = list(SUITES) if args.kind == "all" else [args.kind]
    results = {}
    falsified = False
    for k in kinds:
        res = SUITES[k](chart, args.cases, seed=args.seed)
        results[k] = res.to_dict()
        falsified = falsified or not res.passed
    return {"command": "fuzz", "group": chart.label, "cases": args.cases,
            "suites": results, "falsification": falsified}, \
        EXIT_FALSIFIED if falsified else EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "check": cmd_check,
    "pullback": cmd_pullback,
    "pushforward": cmd_pushforward,
    "divisor": cmd_divisor,
    "bdivisor": cmd_bdivisor,
    "solomon": cmd_solomon,
    "lift-verify": cmd_lift_verify,
    "fuzz": cmd_fuzz,
}


# -- argument parsing ----------------------------------------------------------------

def build_parser():
    p = _Parser(prog="tensorquot", description="Exact tensor fields on quotients by finite linear groups.")
    p.add_argument("--version", action="version", version=f"tensorquot {__version__} ({_kernels.BACKEND})")
    p.add_argument("--suite", help="JSON file with a list of jobs to run in order")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--out", help="write the JSON report to this file")
    p.add_argument("--summary", action="store_true", help="also print a one-line summary to stderr")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(name, help, tensor=True):
        s = sub.add_parser(name, help=help)
        s.add_argument("group", help="built-in family, JSON spec, or @file")
        if tensor:
            s.add_argument("tensor", help="tensor expression or @file")
        s.add_argument("--chart", help="chart spec: built-in id or JSON with invariants")
        s.add_argument("--seed", type=int, default=argparse.SUPPRESS)
        s.add_argument("--out", default=argparse.SUPPRESS)
        s.add_argument("--summary", action="store_true", default=argparse.SUPPRESS)
        return s

    s = common("analyze", "group report", tensor=False)
    s.add_argument("--degree-cap", type=int, default=5)
    s = common("check", "regularity criterion vs direct pull-back")
    s.add_argument("--side", choices=("f", "x"), default="f",
                   help="x: invariant field of a group without pseudo-reflections")
    s.add_argument("--component", help="extra irreducible components, separated by ';'")
    common("pullback", "pull an f-side field back to the x-side")
    common("pushforward", "push an invariant x-side field to the f-side")
    s = common("divisor", "divisor relative to the declared components")
    s.add_argument("--side", choices=("f", "x"), default="f")
    s.add_argument("--component", help="extra irreducible components, separated by ';'")
    s = common("bdivisor", "B-divisor of an f-side field")
    s.add_argument("--B", dest="B", help="entries b[delta] separated by ';' (default: the reflection divisor)")
    s.add_argument("--component", help="extra irreducible components, separated by ';'")
    s.add_argument("--adapted-index", type=int, help="coordinate replaced in the adapted chart")
    s = common("solomon", "skew-field regularity checks")
    s.add_argument("--side", choices=("f", "x"), default="f",
                   help="f: regular iff pull-back regular; x: push-forward of a regular skew field")
    s = common("lift-verify", "check that a lift commutes with the quotient map", tensor=False)
    s.add_argument("--phi", required=True)
    s.add_argument("--phi-inverse", required=True)
    s.add_argument("--psi", required=True)
    s.add_argument("--psi-inverse", required=True)
    s = common("fuzz", "randomized suites", tensor=False)
    s.add_argument("--kind", choices=("all",) + tuple(SUITES), default="theorem")
    s.add_argument("--cases", type=int, default=20)
    return p


def _error_report(exc):
    err = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ParseError):
        err["line"], err["column"] = exc.line, exc.column
    return {"error": err}


def run(argv):
    """Parse argv and run one job; returns (report, exit code)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.suite:
            return run_suite(args.suite)
        if not args.command:
            raise UsageError("a command is required")
        report, code = COMMANDS[args.command](args)
        report["seed"] = args.seed
        return report, code
    except (TensorQuotError, OSError) as exc:
        return _error_report(exc), EXIT_REJECTED


def _job_argv(job):
    if isinstance(job, list):
        return [str(a) for a in job]
    job = dict(job)
    argv = [job.pop("command")]
    for key in ("group", "tensor"):
        if key in job:
            argv.append(str(job.pop(key)))
    for key, val in sorted(job.items()):
        flag = "--" + key.replace("_", "-") if key != "B" else "--B"
        if val is True:
            argv.append(flag)
        else:
            argv += [flag, str(val)]
    return argv


def run_suite(path):
    with open(path, encoding="utf-8") as fh:
        jobs = json.load(fh)
    reports = []
    code = EXIT_OK
    for i, job in enumerate(jobs):
        try:
            argv = _job_argv(job)
        except (KeyError, TypeError, AttributeError):
            rep, c = {"error": {"type": "UsageError", "message": "malformed job"}}, EXIT_REJECTED
        else:
            rep, c = run(argv)
        rep["job"] = i
        reports.append(rep)
        code = max(code, c)
    return {"jobs": reports}, code


def dumps(report):
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _summary(report, code):
    if "error" in report:
        return f"rejected: {report['error']['message']}"
    cmd = report.get("command", "suite")
    status = {EXIT_OK: "ok", EXIT_FALSIFIED: "FALSIFICATION"}.get(code, "rejected")
    return f"{cmd}: {status}"


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    report, code = run(argv)
    text = dumps(report)
    out = None
    try:
        ns, _ = build_parser().parse_known_args(argv)
        out = ns.out
        want_summary = ns.summary
    except TensorQuotError:
        want_summary = False
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if want_summary or "error" in report:
        print(_summary(report, code), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
