"""
The correspondence between geometric data and horizontally nondegenerate
bivector fields, and the four-condition Poisson verifier.

Geometric data is a triple (connection, vertical bivector, base 2-form
with function values) together with a certified inverse of the
fiber-constant part of the 2-form matrix.  ``assemble`` produces the
coupling bivector

    Pi = 1/2 sum_ij H^{ij} hor(d_i) ^ hor(d_j)  +  V,
    sum_s H^{is} F_{sj} = -delta^i_j,

``decompose`` inverts the construction, and ``verify_coupling_conditions`` checks
the four conditions equivalent to [[Pi, Pi]] = 0:

  1. the vertical part is Poisson,
  2. every horizontal lift preserves the vertical part,
  3. the 2-form is covariantly closed,
  4. the connection curvature is the vertical Hamiltonian field of the
     corresponding 2-form value (the curvature identity).

Sign conventions are pinned once here: H is minus the Neumann inverse of
the 2-form matrix, and the vertical sharp map contracts the differential
into the first slot, (V# dg)^t = sum_n V^{nt} d_n g.  The Lie-algebroid
fixtures exercise every sign.
"""

from .series import (FiberSeries, matrix_invert, mat_mul, mat_is_identity,
                     mat_fiber_zero_part, mat_neg, mat_valid_order)
from .multivector import Multivector, HForm, wedge, interior, schouten, jacobiator
from .connection import Connection
from .report import CheckReport, summarize_residual
from . import linalg


class GeometricData:
    """
    The triple (connection, vertical, fform) plus the inverse seed for
    the fiber-constant part of the 2-form matrix.

    Invariants checked at construction: the vertical bivector has no
    base-direction components; the seed is an exact two-sided inverse of
    the fiber-degree-0 part of the 2-form matrix.
    """

    def __init__(self, connection, vertical, fform, fform_inv_seed):
        chart = connection.chart
        if vertical.chart != chart or fform.chart != chart:
            raise ValueError("geometric data parts live on different charts")
        if vertical.degree != 2:
            raise ValueError("vertical part must be a bivector")
        if not vertical.is_vertical():
            raise ValueError("vertical part has base-direction components")
        if fform.degree != 2:
            raise ValueError("fform must be a 2-form")
        if chart.base_dim < 2:
            raise ValueError("a declared 2-form needs base_dim >= 2")
        F0 = mat_fiber_zero_part(fform.matrix())
        if not (mat_is_identity(mat_mul(fform_inv_seed, F0))
                and mat_is_identity(mat_mul(F0, fform_inv_seed))):
            raise ValueError("fform_inv_seed is not an exact inverse of the "
                             "fiber-constant part of the 2-form")
        self.chart = chart
        self.connection = connection
        self.vertical = vertical
        self.fform = fform
        self.fform_inv_seed = [list(row) for row in fform_inv_seed]

    def valid_order(self):
        return min(self.connection.valid_order(), self.vertical.valid_order,
                   self.fform.valid_order)


class CouplingTensor:
    def __init__(self, pi, data, certified_order):
        self.pi = pi
        self.data = data
        self.certified_order = certified_order

    def bracket(self, a, b):
        """Poisson bracket of the coordinate functions with indices a, b (0-based)."""
        return self.pi.component((a, b))


def assemble(data):
    """Coupling bivector of geometric data.  Raises ValueError when the
    2-form matrix is singular at fiber degree 0."""
    chart = data.chart
    F = data.fform.matrix()
    G = matrix_invert(F, data.fform_inv_seed)
    H = mat_neg(G)
    lifts = [data.connection.hor_lift(i) for i in range(chart.base_dim)]
    vo = min(mat_valid_order(H), data.vertical.valid_order,
             min(l.valid_order for l in lifts) if lifts else chart.trunc_order)
    pi = Multivector.zero(chart, 2, vo)
    for i in range(chart.base_dim):
        for j in range(i + 1, chart.base_dim):
            if H[i][j].is_zero():
                continue
            pi = pi + wedge(lifts[i], lifts[j]).mul_series(H[i][j])
    pi = pi + data.vertical
    return CouplingTensor(pi, data, pi.valid_order)


def decompose(pi, fform0=None):
    """
    Split a horizontally nondegenerate bivector into geometric data.

    ``fform0`` certifies the inversion of the base block at fiber degree
    0: it is the fiber-constant part of the 2-form being recovered, and
    its negative must be an exact inverse of the degree-0 base block.
    It may be omitted when the degree-0 base block is constant in the
    base variables (the inverse is then computed by exact elimination).
    """
    chart = pi.chart
    if pi.degree != 2:
        raise ValueError("decompose expects a bivector")
    b = chart.base_dim
    Q = [[pi.component((i, j)) for j in range(b)] for i in range(b)]
    Q0 = mat_fiber_zero_part(Q)
    if fform0 is not None:
        seed = mat_neg([list(row) for row in fform0])
    else:
        const = []
        for row in Q0:
            crow = []
            for s in row:
                if not all(sum(e[:b]) == 0 for e in s.terms):
                    raise ValueError("degree-0 base block depends on the base "
                                     "variables; supply fform0 to certify the inverse")
                crow.append(s.constant_term())
            const.append(crow)
        try:
            inv = linalg.invert(const)
        except ValueError:
            raise ValueError("bivector is not horizontally nondegenerate "
                             "(base block singular at fiber degree 0)")
        seed = [[FiberSeries.constant(chart, c, pi.valid_order) for c in row] for row in inv]
    if not (mat_is_identity(mat_mul(seed, Q0)) and mat_is_identity(mat_mul(Q0, seed))):
        raise ValueError("bivector is not horizontally nondegenerate "
                         "(certified inverse of the base block failed)")
    C = matrix_invert(Q, seed)
    gamma = []
    for j in range(b):
        row = []
        for s in range(chart.fiber_dim):
            acc = FiberSeries.zero(chart, pi.valid_order)
            for i in range(b):
                acc = acc + C[j][i] * pi.component((i, b + s))
            row.append(-acc)
        gamma.append(row)
    connection = Connection(chart, gamma)
    fmat = mat_neg(C)
    fform = HForm.from_matrix(chart, fmat, mat_valid_order(fmat))
    lifts = [connection.hor_lift(i) for i in range(b)]
    hor_part = Multivector.zero(chart, 2, pi.valid_order)
    for i in range(b):
        for j in range(i + 1, b):
            if Q[i][j].is_zero():
                continue
            hor_part = hor_part + wedge(lifts[i], lifts[j]).mul_series(Q[i][j])
    vertical = pi.truncate(hor_part.valid_order) - hor_part
    if not vertical.is_vertical():
        raise ValueError("bivector is not horizontally nondegenerate "
                         "(remainder after removing the horizontal part is not vertical)")
    seed0 = mat_neg(Q0)
    return GeometricData(connection, vertical, fform, seed0)


def v_sharp(vertical, f):
    """Vertical Hamiltonian field of a function: (V# df)^t = sum_n V^{nt} d_n f."""
    chart = vertical.chart
    df = [f.diff(a) for a in range(chart.n_vars)]
    return interior(df, vertical)


def verify_coupling_conditions(data):
    """
    Verify the four coupling conditions on geometric data.

    Failures are report entries, not errors.  A fifth, informational
    entry reports whether the closedness defect of the 2-form is
    Casimir-valued for the vertical structure (a strictly weaker
    property implied by the curvature identity alone).
    """
    chart = data.chart
    report = CheckReport("coupling-conditions")
    V = data.vertical
    conn = data.connection

    jac = jacobiator(V)
    report.add("vertical-jacobi", "cond-1", jac.valid_order, jac.is_zero(),
               summarize_residual(jac))

    lifts = [conn.hor_lift(i) for i in range(chart.base_dim)]
    worst = None
    ok = True
    order = None
    for lift in lifts:
        r = schouten(lift, V)
        order = r.valid_order if order is None else min(order, r.valid_order)
        if not r.is_zero():
            ok = False
            if worst is None:
                worst = r
    report.add("horizontal-lifts-preserve-vertical", "cond-2",
               order if order is not None else V.valid_order - 1, ok,
               summarize_residual(worst))

    dF = conn.cov_ext_deriv(data.fform)
    report.add("covariant-closedness", "cond-3", dF.valid_order, dF.is_zero(),
               summarize_residual(dF))

    curv = conn.curvature()
    worst = None
    ok = True
    order = None
    for (i, j), c in curv.items():
        rhs = v_sharp(V, data.fform.component((i, j)))
        r = c - rhs
        order = r.valid_order if order is None else min(order, r.valid_order)
        if not r.is_zero():
            ok = False
            if worst is None:
                worst = r
    report.add("curvature-identity", "cond-4",
               order if order is not None else data.valid_order() - 1, ok,
               summarize_residual(worst))

    casimir_ok = True
    worst = None
    corder = None
    for idx, s in dF.comps.items():
        h = v_sharp(V, s)
        corder = h.valid_order if corder is None else min(corder, h.valid_order)
        if not h.is_zero():
            casimir_ok = False
            if worst is None:
                worst = h
    report.add("closedness-defect-casimir-valued", "cond-3-weak",
               corder if corder is not None else dF.valid_order - 1,
               casimir_ok, summarize_residual(worst), required=False)
    return report


def coupling_criterion_test(data):
    """Both sides of the coupling criterion: the four conditions hold iff
    the assembled bivector has vanishing Jacobiator (at certified order)."""
    conditions = verify_coupling_conditions(data)
    tensor = assemble(data)
    jac = jacobiator(tensor.pi)
    report = CheckReport("coupling-criterion-biconditional")
    report.add("conditions", "cond-all", conditions.certified_order(),
               conditions.passed,
               "; ".join(e.residual for e in conditions.entries if not e.passed) or "0")
    report.add("jacobiator", "jacobi", jac.valid_order, jac.is_zero(),
               summarize_residual(jac))
    agree = conditions.passed == jac.is_zero()
    report.add("biconditional", "iff", min(conditions.certified_order(), jac.valid_order),
               agree, "0" if agree else "sides disagree")
    return report
