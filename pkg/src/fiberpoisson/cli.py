"""
Command-line front end: problem-file ingestion, command dispatch, and
report emission.

A problem file is a single JSON document.  Every coefficient entry is an
expression string in the input grammar (see ``parse``).  Exit codes:
0 all requested checks pass, 1 a check failed, 2 input or parse error,
3 internal invariant violation.
"""

import argparse
import json
import sys
from fractions import Fraction

from .series import ChartSpec, FiberSeries
from .parse import parse_series, ParseError
from .multivector import Multivector, HForm, jacobiator
from .connection import Connection
from .coupling import GeometricData, assemble, decompose, verify_coupling_conditions
from .algebroid import (AlgebroidData, ConnectionChange, check_admissible,
                        build_coupling, change_connection,
                        verify_connection_equivalence, relative_cocycle,
                        cocycle_hform, coisotropy_check)
from .moser import (PhiForm, build_family, verify_deformation_equation,
                    numeric_pullback_check, DEFAULT_T_SAMPLES)
from .linearize import linearize_data, extract_algebroid
from .holonomy import BasePath, holonomy_compare
from .report import CheckReport, InternalInvariantError
from . import linalg


class InputError(ValueError):
    pass


class Problem:
    def __init__(self, doc, order_override=None):
        if "chart" not in doc:
            raise InputError("problem file has no 'chart' section")
        c = doc["chart"]
        try:
            trunc = int(order_override if order_override is not None
                        else c["trunc_order"])
            self.chart = ChartSpec(int(c["base_dim"]), int(c["fiber_dim"]), trunc)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError("bad chart section: %s" % exc)
        self.doc = doc

    @classmethod
    def load(cls, path, order_override=None):
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise InputError("cannot read problem file: %s" % exc)
        except json.JSONDecodeError as exc:
            raise InputError("problem file is not valid JSON: %s" % exc)
        return cls(doc, order_override)

    # -- entry readers -------------------------------------------------

    def _expr(self, text, where):
        if isinstance(text, (int, float)) and float(text) == int(text):
            text = str(int(text))
        if not isinstance(text, str):
            raise InputError("%s: expected an expression string, got %r" % (where, text))
        try:
            return parse_series(text, self.chart)
        except ParseError as exc:
            raise InputError("%s: %s" % (where, exc))

    def matrix(self, key, rows, cols, doc=None, required=True):
        doc = self.doc if doc is None else doc
        if key not in doc:
            if required:
                raise InputError("problem file needs a %r matrix" % key)
            return None
        M = doc[key]
        if len(M) != rows or any(len(r) != cols for r in M):
            raise InputError("%r must be a %dx%d matrix" % (key, rows, cols))
        return [[self._expr(M[i][j], "%s[%d][%d]" % (key, i, j))
                 for j in range(cols)] for i in range(rows)]

    def cube(self, key, d1, d2, d3, doc):
        if key not in doc:
            raise InputError("algebroid section needs %r" % key)
        C = doc[key]
        if len(C) != d1 or any(len(r) != d2 for r in C) \
                or any(len(c) != d3 for r in C for c in r):
            raise InputError("%r must be %dx%dx%d" % (key, d1, d2, d3))
        return [[[self._expr(C[i][j][k], "%s[%d][%d][%d]" % (key, i, j, k))
                  for k in range(d3)] for j in range(d2)] for i in range(d1)]

    def geometric_data(self):
        b, r = self.chart.base_dim, self.chart.fiber_dim
        gamma = self.matrix("connection", b, r)
        vmat = self.matrix("vertical", r, r)
        vcomps = {}
        for s in range(r):
            if not vmat[s][s].is_zero():
                raise InputError("vertical matrix must have zero diagonal")
            for t in range(s + 1, r):
                if not (vmat[s][t] + vmat[t][s]).is_zero():
                    raise InputError("vertical matrix must be antisymmetric")
                if not vmat[s][t].is_zero():
                    vcomps[(b + s, b + t)] = vmat[s][t]
        vertical = Multivector(self.chart, 2, vcomps)
        fmat = self.matrix("fform", b, b)
        fform = HForm.from_matrix(self.chart, fmat)
        seed = self.matrix("fform_inv_seed", b, b, required=False)
        if seed is None:
            seed = self._constant_inverse(fform.matrix(), "fform")
        try:
            return GeometricData(Connection(self.chart, gamma), vertical, fform, seed)
        except ValueError as exc:
            raise InputError(str(exc))

    def _constant_inverse(self, M, what):
        b = self.chart.base_dim
        const = []
        for row in M:
            crow = []
            for s in row:
                s0 = s.fiber_part(0, 0)
                if not all(sum(e[:b]) == 0 for e in s0.terms):
                    raise InputError("%s has a base-dependent constant part; supply "
                                     "fform_inv_seed explicitly" % what)
                crow.append(s0.constant_term())
            const.append(crow)
        try:
            inv = linalg.invert(const)
        except ValueError:
            raise InputError("%s is singular at the zero section" % what)
        return [[FiberSeries.constant(self.chart, v) for v in row] for row in inv]

    def bivector(self):
        n = self.chart.n_vars
        M = self.matrix("pi", n, n)
        comps = {}
        for i in range(n):
            if not M[i][i].is_zero():
                raise InputError("pi must have zero diagonal")
            for j in range(i + 1, n):
                if not (M[i][j] + M[j][i]).is_zero():
                    raise InputError("pi must be antisymmetric")
                if not M[i][j].is_zero():
                    comps[(i, j)] = M[i][j]
        return Multivector(self.chart, 2, comps)

    def algebroid(self, key="algebroid"):
        if key not in self.doc:
            raise InputError("problem file has no %r section" % key)
        sec = self.doc[key]
        b, r = self.chart.base_dim, self.chart.fiber_dim
        lam = self.cube("lambda", r, r, r, sec)
        theta = self.cube("theta", b, r, r, sec)
        R = self.cube("R", b, b, r, sec)
        omega = self.matrix("omega", b, b, doc=sec, required=False) \
            or self.matrix("omega", b, b)
        omega_inv = self.matrix("omega_inv", b, b, doc=sec, required=False) \
            or self.matrix("omega_inv", b, b)
        try:
            return AlgebroidData(self.chart, lam, theta, R, omega, omega_inv)
        except ValueError as exc:
            raise InputError(str(exc))

    def phi(self):
        if "phi" not in self.doc:
            raise InputError("problem file has no 'phi' section")
        comps = [self._expr(t, "phi[%d]" % i) for i, t in enumerate(self.doc["phi"])]
        try:
            return PhiForm(self.chart, comps)
        except ValueError as exc:
            raise InputError(str(exc))

    def mu(self):
        b, r = self.chart.base_dim, self.chart.fiber_dim
        mu = self.matrix("mu", b, r)
        try:
            return ConnectionChange(self.chart, mu)
        except ValueError as exc:
            raise InputError(str(exc))

    def path(self):
        if "path" not in self.doc:
            raise InputError("problem file has no 'path' section")
        sec = self.doc["path"]
        try:
            pts = [[Fraction(str(v)) for v in p] for p in sec["points"]]
            return BasePath(pts, bool(sec.get("closed", False)))
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError("bad path section: %s" % exc)

    def float_points(self, override_file=None):
        if override_file is not None:
            try:
                with open(override_file) as fh:
                    pts = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise InputError("cannot read points file: %s" % exc)
        else:
            pts = self.doc.get("points")
        if not pts:
            raise InputError("no sample points given (problem 'points' or --points)")
        return [[float(v) for v in p] for p in pts]


# -- commands -----------------------------------------------------------


def summarize_series_obj(obj):
    text = obj.render()
    return text if len(text) <= 100 else text[:100] + " ..."


def cmd_check_jacobi(problem, args):
    pi = problem.bivector()
    jac = jacobiator(pi)
    report = CheckReport("jacobi")
    report.add("jacobiator-vanishes", "jacobi", jac.valid_order, jac.is_zero(),
               "0" if jac.is_zero() else summarize_series_obj(jac))
    return report, []


def cmd_verify_data(problem, args):
    return verify_coupling_conditions(problem.geometric_data()), []


def cmd_assemble(problem, args):
    tensor = assemble(problem.geometric_data())
    report = CheckReport("assemble")
    report.add("assembled", "assemble", tensor.certified_order, True, "0")
    return report, ["coupling tensor: %s" % tensor.pi.render()]


def cmd_decompose(problem, args):
    pi = problem.bivector()
    b = problem.chart.base_dim
    fz = problem.matrix("fform0", b, b, required=False)
    try:
        data = decompose(pi, fz)
    except ValueError as exc:
        raise InputError(str(exc))
    lines = ["connection:"]
    for i, row in enumerate(data.connection.gamma):
        for s, g in enumerate(row):
            lines.append("  gamma[%d][%d] = %s" % (i + 1, s + 1, g.render()))
    lines.append("vertical: %s" % data.vertical.render())
    lines.append("fform: %s" % data.fform.render())
    report = CheckReport("decompose")
    report.add("decomposed", "decompose", data.valid_order(), True, "0")
    return report, lines


def cmd_algebroid_check(problem, args):
    a = problem.algebroid()
    report = check_admissible(a)
    if "points" in problem.doc:
        pts = [[Fraction(str(v)) for v in p] for p in problem.doc["points"]]
        report.extend(coisotropy_check(a, pts))
    return report, []


def cmd_algebroid_build(problem, args):
    a = problem.algebroid()
    adm = check_admissible(a)
    report = CheckReport("algebroid-build")
    report.extend(adm)
    lines = []
    if adm.passed:
        tensor = build_coupling(a)
        jac = jacobiator(tensor.pi)
        report.add("built-tensor-jacobiator", "jacobi", jac.valid_order,
                   jac.is_zero(), "0" if jac.is_zero() else summarize_series_obj(jac))
        lines.append("coupling tensor: %s" % tensor.pi.render())
    return report, lines


def cmd_connection_change(problem, args):
    a = problem.algebroid()
    m = problem.mu()
    a2 = change_connection(a, m)
    lines = []
    for i in range(problem.chart.base_dim):
        for s in range(problem.chart.fiber_dim):
            for t in range(problem.chart.fiber_dim):
                v = a2.theta[i][s][t]
                if not v.is_zero():
                    lines.append("theta'[%d][%d][%d] = %s" % (i + 1, s + 1, t + 1, v.render()))
    for i in range(problem.chart.base_dim):
        for j in range(i + 1, problem.chart.base_dim):
            for s in range(problem.chart.fiber_dim):
                v = a2.R[i][j][s]
                if not v.is_zero():
                    lines.append("R'[%d][%d][%d] = %s" % (i + 1, j + 1, s + 1, v.render()))
    return verify_connection_equivalence(a, m), lines


def cmd_cocycle(problem, args):
    a = problem.algebroid()
    a2 = problem.algebroid("algebroid2")
    m = problem.mu()
    try:
        C, report = relative_cocycle(a, a2, m)
    except ValueError as exc:
        raise InputError(str(exc))
    lines = ["cocycle (fiber pairing): %s" % cocycle_hform(a, C).render()]
    return report, lines


def _t_samples(args):
    if args.t_samples is None:
        return DEFAULT_T_SAMPLES
    try:
        return tuple(Fraction(tok) for tok in args.t_samples.split(","))
    except ValueError as exc:
        raise InputError("bad --t-samples: %s" % exc)


def cmd_moser_verify(problem, args):
    data = problem.geometric_data()
    phi = problem.phi()
    samples = _t_samples(args)
    try:
        fam = build_family(data, phi, samples)
    except ValueError as exc:
        raise InputError(str(exc))
    report = verify_deformation_equation(fam, samples)
    lines = ["degenerate samples: %s" % (", ".join(str(t) for t in fam.degenerate_samples)
                                         or "none")]
    return report, lines


def cmd_moser_flow(problem, args):
    data = problem.geometric_data()
    phi = problem.phi()
    try:
        fam = build_family(data, phi, _t_samples(args))
    except ValueError as exc:
        raise InputError(str(exc))
    points = problem.float_points(args.points)
    report = numeric_pullback_check(fam, points, args.steps, tol=args.tol)
    return report, []


def cmd_linearize(problem, args):
    try:
        out = linearize_data(problem.geometric_data())
    except ValueError as exc:
        raise InputError(str(exc))
    lines = ["vertical: %s" % out.vertical.render(),
             "fform: %s" % out.fform.render()]
    for i, row in enumerate(out.connection.gamma):
        for s, g in enumerate(row):
            if not g.is_zero():
                lines.append("gamma[%d][%d] = %s" % (i + 1, s + 1, g.render()))
    report = verify_coupling_conditions(out)
    return report, lines


def cmd_extract_algebroid(problem, args):
    try:
        a = extract_algebroid(problem.geometric_data())
    except ValueError as exc:
        raise InputError(str(exc))
    lines = []
    r, b = problem.chart.fiber_dim, problem.chart.base_dim
    for s in range(r):
        for t in range(s + 1, r):
            for n in range(r):
                v = a.lam[s][t][n]
                if not v.is_zero():
                    lines.append("lambda[%d][%d][%d] = %s" % (s + 1, t + 1, n + 1, v.render()))
    for i in range(b):
        for j in range(i + 1, b):
            lines.append("omega[%d][%d] = %s" % (i + 1, j + 1, a.omega[i][j].render()))
    return check_admissible(a), lines


def cmd_holonomy(problem, args):
    a = problem.algebroid()
    m = problem.mu()
    path = problem.path()
    report = holonomy_compare(a, m, path, args.steps)
    if args.tol is not None:
        for entry in report.entries:
            if entry.detail is not None:
                entry.passed = entry.detail < args.tol
    return report, []


COMMANDS = {
    "check-jacobi": cmd_check_jacobi,
    "verify-data": cmd_verify_data,
    "assemble": cmd_assemble,
    "decompose": cmd_decompose,
    "algebroid-check": cmd_algebroid_check,
    "algebroid-build": cmd_algebroid_build,
    "connection-change": cmd_connection_change,
    "cocycle": cmd_cocycle,
    "moser-verify": cmd_moser_verify,
    "moser-flow": cmd_moser_flow,
    "linearize": cmd_linearize,
    "extract-algebroid": cmd_extract_algebroid,
    "holonomy": cmd_holonomy,
}

_NUMERIC_DEFAULT_TOL = {"moser-flow": 1e-6, "holonomy": 1e-8}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fiberpoisson",
        description="exact verification pipelines for coupling Poisson tensors")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("problem", help="JSON problem file")
        p.add_argument("--order", type=int, default=None,
                       help="override the chart truncation order")
        p.add_argument("--t-samples", default=None,
                       help="comma-separated rational homotopy samples")
        p.add_argument("--steps", type=int, default=1000,
                       help="integrator step budget for numeric commands")
        p.add_argument("--points", default=None,
                       help="JSON file with float sample points (moser-flow)")
        p.add_argument("--report", default=None,
                       help="write the structured report to this JSON file")
        p.add_argument("--tol", type=float, default=None,
                       help="pass/fail tolerance for numeric commands")
        p.add_argument("--quiet", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.tol is None:
        args.tol = _NUMERIC_DEFAULT_TOL.get(args.command)
    try:
        problem = Problem.load(args.problem, args.order)
        report, lines = COMMANDS[args.command](problem, args)
    except InternalInvariantError as exc:
        print("internal invariant violation: %s" % exc, file=sys.stderr)
        return 3
    except ValueError as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return 2
    if not args.quiet:
        for line in lines:
            print(line)
        print(report.render())
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
