"""
First approximations at the zero section: fiber-degree filtering of
geometric data, extraction of the underlying algebroid data, and the
second-order agreement check.

Linearization here is a pure degree filter: the connection and the
vertical bivector keep their fiber-linear parts, the 2-form keeps its
fiber-affine part.  For data compatible with the zero section this
reproduces the transitive-algebroid model of the leaf, and extraction
inverts the algebroid-to-data construction exactly.
"""

from .multivector import HForm
from .connection import Connection
from .coupling import GeometricData, assemble, verify_coupling_conditions
from .algebroid import AlgebroidData, check_admissible
from .report import CheckReport, InternalInvariantError, summarize_residual


def _check_section_compatible(data):
    if not data.connection.is_zero_on_section():
        raise ValueError("connection does not vanish on the zero section "
                         "(horizontal spaces not tangent to the leaf)")
    if not data.vertical.fiber_part(0, 0).is_zero():
        raise ValueError("vertical part has nonzero rank on the zero section")


def linearize_data(data):
    """
    Fiber-linear truncation of zero-section-compatible geometric data.

    The output keeps the fiber-linear parts of the connection and the
    vertical bivector and the fiber-affine part of the 2-form; for a
    chart order >= 2 it is verified to satisfy the coupling conditions.
    """
    _check_section_compatible(data)
    chart = data.chart
    gamma = [[g.fiber_part(1, 1) for g in row] for row in data.connection.gamma]
    vertical = data.vertical.fiber_part(1, 1)
    fform = HForm(chart, 2,
                  {idx: s.fiber_part(0, 1) for idx, s in data.fform.comps.items()},
                  data.fform.valid_order)
    out = GeometricData(Connection(chart, gamma), vertical, fform,
                        data.fform_inv_seed)
    if chart.trunc_order >= 2:
        rep = verify_coupling_conditions(out)
        if not rep.passed:
            raise InternalInvariantError(
                "linearized data fails the coupling conditions:\n" + rep.render())
    return out


def extract_algebroid(data):
    """
    Read the algebroid data off the fiber-linear parts of geometric data.

    Inverse of the build convention: structure functions from the
    vertical part, linear-connection coefficients from the connection,
    curvature from minus the fiber-linear part of the 2-form, base form
    from its fiber-constant part.  The result is validated admissible,
    which for compatible verified data is forced.
    """
    _check_section_compatible(data)
    chart = data.chart
    b, r = chart.base_dim, chart.fiber_dim

    def unit(s):
        e = [0] * r
        e[s] = 1
        return tuple(e)

    lam = [[[data.vertical.component((b + s, b + s2)).xi_coefficient(unit(n))
             for n in range(r)] for s2 in range(r)] for s in range(r)]
    theta = [[[data.connection.gamma[i][s].xi_coefficient(unit(t))
               for t in range(r)] for s in range(r)] for i in range(b)]
    omega = [[data.fform.component((i, j)).xi_coefficient((0,) * r)
              for j in range(b)] for i in range(b)]
    R = [[[-data.fform.component((i, j)).xi_coefficient(unit(s))
           for s in range(r)] for j in range(b)] for i in range(b)]
    out = AlgebroidData(chart, lam, theta, R, omega, data.fform_inv_seed)
    adm = check_admissible(out)
    if not adm.passed:
        raise InternalInvariantError(
            "extracted algebroid data is not admissible (the input cannot have "
            "satisfied the coupling conditions at order >= 1):\n" + adm.render())
    return out


def first_approx_check(full, approx):
    """
    Assert that two data sets assemble to tensors agreeing up to terms of
    fiber degree >= 2 (the first-approximation contract).
    """
    if full.chart != approx.chart:
        raise ValueError("first_approx_check needs a shared chart")
    delta = assemble(full).pi - assemble(approx).pi
    low = delta.fiber_part(0, 1)
    report = CheckReport("first-approximation")
    report.add("agreement-to-second-order", "first-approx", delta.valid_order,
               low.is_zero(), summarize_residual(low))
    return report
