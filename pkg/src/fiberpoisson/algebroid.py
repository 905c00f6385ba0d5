"""
Transitive Lie-algebroid data over a symplectic chart and the induced
coupling structures.

The data is carried in a fixed frame: structure functions
``lam[s][s'][n]`` for the fiberwise bracket, linear-connection
coefficients ``theta[i][s][t]`` (the covariant derivative of the s-th
coframe element along the i-th base direction is ``-theta[i][s][t]``
times the t-th coframe element), curvature coefficients ``R[i][j][s]``
antisymmetric in (i, j), and the base symplectic matrix with its exact
polynomial inverse.  All entries are base polynomials; the admissibility
checks are decidable polynomial identities.

The induced geometric data uses the dual homogeneous connection, whose
coefficient of the s-th fiber direction along the i-th base direction is
``sum_t theta[i][s][t] * x_t`` — the sign is pinned by requiring the
induced data to pass the coupling conditions, which the test suite
enforces on randomized admissible inputs.
"""

from fractions import Fraction

from .series import FiberSeries, mat_mul, mat_is_identity
from .multivector import Multivector, HForm
from .connection import Connection
from .coupling import GeometricData, assemble, v_sharp
from .report import CheckReport, InternalInvariantError, summarize_residual
from . import linalg


def _require_xi_polynomial(entries, what):
    for s in entries:
        if not s.is_fiber_independent():
            raise ValueError("%s entries must be independent of the fiber variables" % what)


class AlgebroidData:
    def __init__(self, chart, lam, theta, R, omega, omega_inv):
        b, r = chart.base_dim, chart.fiber_dim
        if b < 2:
            raise ValueError("a symplectic base needs base_dim >= 2")
        if len(lam) != r or any(len(row) != r for row in lam) \
                or any(len(cell) != r for row in lam for cell in row):
            raise ValueError("lambda must be r x r x r")
        if len(theta) != b or any(len(row) != r for row in theta) \
                or any(len(cell) != r for row in theta for cell in row):
            raise ValueError("theta must be base_dim x r x r")
        if len(R) != b or any(len(row) != b for row in R) \
                or any(len(cell) != r for row in R for cell in row):
            raise ValueError("R must be base_dim x base_dim x r")
        if len(omega) != b or len(omega_inv) != b:
            raise ValueError("omega and omega_inv must be base_dim square")
        flat = ([x for rr in lam for c in rr for x in c]
                + [x for rr in theta for c in rr for x in c]
                + [x for rr in R for c in rr for x in c]
                + [x for rr in omega for x in rr] + [x for rr in omega_inv for x in rr])
        for s in flat:
            if s.chart != chart:
                raise ValueError("algebroid entries live on different charts")
        _require_xi_polynomial(flat, "algebroid")
        for s1 in range(r):
            for s2 in range(r):
                for n in range(r):
                    if not (lam[s1][s2][n] + lam[s2][s1][n]).is_zero():
                        raise ValueError("lambda must be antisymmetric in its upper pair")
        for i in range(b):
            for j in range(b):
                for s in range(r):
                    if not (R[i][j][s] + R[j][i][s]).is_zero():
                        raise ValueError("R must be antisymmetric in (i, j)")
                if not (omega[i][j] + omega[j][i]).is_zero():
                    raise ValueError("omega must be antisymmetric")
        if not (mat_is_identity(mat_mul(omega, omega_inv))
                and mat_is_identity(mat_mul(omega_inv, omega))):
            raise ValueError("omega_inv is not an exact inverse of omega")
        for i in range(b):
            for j in range(i + 1, b):
                for k in range(j + 1, b):
                    d = omega[j][k].diff(i) - omega[i][k].diff(j) + omega[i][j].diff(k)
                    if not d.is_zero():
                        raise ValueError("omega must be closed")
        self._check_fiber_jacobi(chart, lam, r)
        self.chart = chart
        self.lam = lam
        self.theta = theta
        self.R = R
        self.omega = omega
        self.omega_inv = omega_inv

    @staticmethod
    def _check_fiber_jacobi(chart, lam, r):
        for a in range(r):
            for b_ in range(a + 1, r):
                for c in range(b_ + 1, r):
                    for t in range(r):
                        acc = FiberSeries.zero(chart)
                        for m in range(r):
                            acc = acc + lam[a][b_][m] * lam[m][c][t] \
                                      + lam[b_][c][m] * lam[m][a][t] \
                                      + lam[c][a][m] * lam[m][b_][t]
                        if not acc.is_zero():
                            raise ValueError("fiberwise structure functions violate "
                                             "the Jacobi identity")


def check_admissible(a):
    """
    Three exact polynomial identities: the connection preserves the
    fiberwise bracket, its curvature is the adjoint action of R, and R
    satisfies the covariant Bianchi identity.
    """
    chart = a.chart
    b, r = chart.base_dim, chart.fiber_dim
    report = CheckReport("algebroid-admissibility")

    worst, ok = None, True
    for i in range(b):
        for s1 in range(r):
            for s2 in range(r):
                for t in range(r):
                    res = a.lam[s1][s2][t].diff(i)
                    for n in range(r):
                        res = res - a.lam[s1][s2][n] * a.theta[i][n][t] \
                                  + a.theta[i][s1][n] * a.lam[n][s2][t] \
                                  + a.theta[i][s2][n] * a.lam[s1][n][t]
                    if not res.is_zero():
                        ok = False
                        worst = worst or res
    report.add("connection-preserves-bracket", "adm-1", chart.trunc_order, ok,
               summarize_residual(worst))

    worst, ok = None, True
    for i in range(b):
        for j in range(i + 1, b):
            for s in range(r):
                for t in range(r):
                    res = -a.theta[j][s][t].diff(i) + a.theta[i][s][t].diff(j)
                    for n in range(r):
                        res = res + a.theta[j][s][n] * a.theta[i][n][t] \
                                  - a.theta[i][s][n] * a.theta[j][n][t] \
                                  - a.R[i][j][n] * a.lam[n][s][t]
                    if not res.is_zero():
                        ok = False
                        worst = worst or res
    report.add("curvature-is-adjoint-of-R", "adm-2", chart.trunc_order, ok,
               summarize_residual(worst))

    worst, ok = None, True
    for i in range(b):
        for j in range(i + 1, b):
            for k in range(j + 1, b):
                for t in range(r):
                    res = FiberSeries.zero(chart)
                    for (u, v, w) in ((i, j, k), (j, k, i), (k, i, j)):
                        res = res + a.R[v][w][t].diff(u)
                        for n in range(r):
                            res = res - a.R[v][w][n] * a.theta[u][n][t]
                    if not res.is_zero():
                        ok = False
                        worst = worst or res
    report.add("bianchi", "adm-3", chart.trunc_order, ok, summarize_residual(worst))
    return report


def build_geometric_data(a):
    """Geometric data induced by algebroid data: homogeneous connection,
    fiberwise linear vertical bivector, fiber-affine base 2-form."""
    adm = check_admissible(a)
    if not adm.passed:
        raise ValueError("algebroid data is not admissible:\n" + adm.render())
    chart = a.chart
    b, r = chart.base_dim, chart.fiber_dim
    x = [FiberSeries.variable(chart, b + s) for s in range(r)]
    gamma = []
    for i in range(b):
        row = []
        for s in range(r):
            acc = FiberSeries.zero(chart)
            for t in range(r):
                acc = acc + a.theta[i][s][t] * x[t]
            row.append(acc)
        gamma.append(row)
    vcomps = {}
    for s in range(r):
        for s2 in range(s + 1, r):
            acc = FiberSeries.zero(chart)
            for n in range(r):
                acc = acc + a.lam[s][s2][n] * x[n]
            if not acc.is_zero():
                vcomps[(b + s, b + s2)] = acc
    vertical = Multivector(chart, 2, vcomps)
    fcomps = {}
    for i in range(b):
        for j in range(i + 1, b):
            acc = a.omega[i][j]
            for s in range(r):
                acc = acc - a.R[i][j][s] * x[s]
            if not acc.is_zero():
                fcomps[(i, j)] = acc
    fform = HForm(chart, 2, fcomps)
    return GeometricData(Connection(chart, gamma), vertical, fform,
                         [list(row) for row in a.omega_inv])


def build_coupling(a):
    """Coupling tensor of algebroid data (assemble of the induced data)."""
    return assemble(build_geometric_data(a))


def coisotropy_check(a, points):
    """
    At each exact rational base point: compute the kernel of the
    curvature 2-form as a subspace of the base tangent space, then check
    that its symplectic orthogonal is contained in it.
    """
    chart = a.chart
    b, r = chart.base_dim, chart.fiber_dim
    report = CheckReport("curvature-kernel-coisotropy")
    fiber_zeros = [Fraction(0)] * r
    for pt in points:
        pt = [Fraction(v) for v in pt]
        if len(pt) != b:
            raise ValueError("points must have base dimension %d" % b)
        full = pt + fiber_zeros
        rows = []
        for j in range(b):
            for s in range(r):
                rows.append([a.R[i][j][s].evaluate(full) for i in range(b)])
        kernel = linalg.nullspace(rows) if rows else [
            [Fraction(1 if t == i else 0) for t in range(b)] for i in range(b)]
        om = [[a.omega[i][j].evaluate(full) for j in range(b)] for i in range(b)]
        if kernel:
            orth_rows = [[sum(u[i] * om[i][j] for i in range(b)) for j in range(b)]
                         for u in kernel]
            orth = linalg.nullspace(orth_rows)
        else:
            orth = [[Fraction(1 if t == i else 0) for t in range(b)] for i in range(b)]
        ok = all(linalg.in_span(kernel, w) for w in orth)
        report.add("point-%s" % ",".join(str(v) for v in pt), "coiso",
                   None, ok,
                   "kernel dim %d, orthogonal dim %d" % (len(kernel), len(orth)))
    return report


class ConnectionChange:
    """A fiber-frame-valued base 1-form mu[i][s] of base polynomials."""

    def __init__(self, chart, mu):
        if len(mu) != chart.base_dim or any(len(row) != chart.fiber_dim for row in mu):
            raise ValueError("mu must be base_dim x fiber_dim")
        _require_xi_polynomial([m for row in mu for m in row], "mu")
        self.chart = chart
        self.mu = [list(row) for row in mu]


def _nabla_mu(a, m):
    """Covariant exterior derivative of mu as a frame-valued 2-form."""
    chart = a.chart
    b, r = chart.base_dim, chart.fiber_dim
    out = [[[None] * r for _ in range(b)] for _ in range(b)]
    for i in range(b):
        for j in range(b):
            for t in range(r):
                res = m.mu[j][t].diff(i) - m.mu[i][t].diff(j)
                for s in range(r):
                    res = res - m.mu[j][s] * a.theta[i][s][t] \
                              + m.mu[i][s] * a.theta[j][s][t]
                out[i][j][t] = res
    return out


def _mu_mu_half(a, m):
    """Half the square bracket of mu: [mu_i, mu_j] componentwise."""
    chart = a.chart
    b, r = chart.base_dim, chart.fiber_dim
    out = [[[None] * r for _ in range(b)] for _ in range(b)]
    for i in range(b):
        for j in range(b):
            for t in range(r):
                res = FiberSeries.zero(chart)
                for n in range(r):
                    for n2 in range(r):
                        res = res + m.mu[i][n] * m.mu[j][n2] * a.lam[n][n2][t]
                out[i][j][t] = res
    return out


def change_connection(a, m):
    """
    Transform admissible data under a change of splitting by mu.

    The output must be admissible again; a failure here is an internal
    sign fault, not a data error.
    """
    chart = a.chart
    b, r = chart.base_dim, chart.fiber_dim
    adm = check_admissible(a)
    if not adm.passed:
        raise ValueError("change_connection requires admissible input")
    theta2 = [[[None] * r for _ in range(r)] for _ in range(b)]
    for i in range(b):
        for s in range(r):
            for t in range(r):
                res = a.theta[i][s][t]
                for n in range(r):
                    res = res - m.mu[i][n] * a.lam[n][s][t]
                theta2[i][s][t] = res
    dmu = _nabla_mu(a, m)
    sq = _mu_mu_half(a, m)
    R2 = [[[a.R[i][j][t] + dmu[i][j][t] + sq[i][j][t] for t in range(r)]
           for j in range(b)] for i in range(b)]
    out = AlgebroidData(chart, a.lam, theta2, R2, a.omega, a.omega_inv)
    adm2 = check_admissible(out)
    if not adm2.passed:
        raise InternalInvariantError(
            "transformed connection data failed admissibility:\n" + adm2.render())
    return out


def verify_connection_equivalence(a, m):
    """
    The induced geometric data of ``a`` and of ``change_connection(a, m)``
    are equivalent over the zero section with the identity fiber map and
    the fiber-linear 1-form built from mu; both relations are checked as
    exact residuals.
    """
    from .moser import PhiForm, phi_bracket

    chart = a.chart
    b, r = chart.base_dim, chart.fiber_dim
    d1 = build_geometric_data(a)
    d2 = build_geometric_data(change_connection(a, m))
    x = [FiberSeries.variable(chart, b + s) for s in range(r)]
    phi_comps = []
    for i in range(b):
        acc = FiberSeries.zero(chart)
        for s in range(r):
            acc = acc + m.mu[i][s] * x[s]
        phi_comps.append(acc)
    phi = PhiForm(chart, phi_comps)

    report = CheckReport("connection-change-equivalence")
    worst, ok, order = None, True, None
    for i in range(b):
        for s in range(r):
            corr = v_sharp(d1.vertical, phi.phi[i]).component((b + s,))
            res = d2.connection.gamma[i][s] - (d1.connection.gamma[i][s] - corr)
            order = res.valid_order if order is None else min(order, res.valid_order)
            if not res.is_zero():
                ok = False
                worst = worst or res
    report.add("connection-relation", "equiv-conn", order, ok, summarize_residual(worst))

    dphi = d1.connection.cov_ext_deriv(HForm(chart, 1, {(i,): phi.phi[i]
                                                        for i in range(b)
                                                        if not phi.phi[i].is_zero()}))
    quad = phi_bracket(phi, phi, d1.vertical)
    target = d1.fform - dphi - quad.scale(Fraction(1, 2))
    res = d2.fform - target
    report.add("two-form-relation", "equiv-form", res.valid_order, res.is_zero(),
               summarize_residual(res))
    return report


def relative_cocycle(a, a2, m):
    """
    The center-valued 2-form measuring the failure of (a2 minus a) to be
    a pure change of splitting by mu.

    Preconditions: shared structure functions and base form, and the two
    linear connections differ exactly by the adjoint action of mu.
    Returns the frame-component array C[i][j][t] together with a report
    asserting that C is center-valued and covariantly closed.
    """
    chart = a.chart
    b, r = chart.base_dim, chart.fiber_dim
    for s1 in range(r):
        for s2 in range(r):
            for n in range(r):
                if not (a.lam[s1][s2][n] - a2.lam[s1][s2][n]).is_zero():
                    raise ValueError("relative cocycle requires shared structure functions")
    for i in range(b):
        for j in range(b):
            if not (a.omega[i][j] - a2.omega[i][j]).is_zero():
                raise ValueError("relative cocycle requires a shared base form")
    for i in range(b):
        for s in range(r):
            for t in range(r):
                res = a2.theta[i][s][t] - a.theta[i][s][t]
                for n in range(r):
                    res = res + m.mu[i][n] * a.lam[n][s][t]
                if not res.is_zero():
                    raise ValueError("the two connections do not differ by the "
                                     "adjoint action of mu")
    dmu = _nabla_mu(a, m)
    sq = _mu_mu_half(a, m)
    C = [[[a2.R[i][j][t] - a.R[i][j][t] - dmu[i][j][t] - sq[i][j][t]
           for t in range(r)] for j in range(b)] for i in range(b)]

    report = CheckReport("relative-cocycle")
    worst, ok = None, True
    for i in range(b):
        for j in range(i + 1, b):
            # center-valuedness: the bracket of C_{ij} with every frame element vanishes
            for s in range(r):
                for n in range(r):
                    acc = FiberSeries.zero(chart)
                    for t in range(r):
                        acc = acc + C[i][j][t] * a.lam[t][s][n]
                    if not acc.is_zero():
                        ok = False
                        worst = worst or acc
    report.add("center-valued", "cocycle-center", chart.trunc_order, ok,
               summarize_residual(worst))

    worst, ok = None, True
    for i in range(b):
        for j in range(i + 1, b):
            for k in range(j + 1, b):
                for t in range(r):
                    res = FiberSeries.zero(chart)
                    for (u, v, w) in ((i, j, k), (j, k, i), (k, i, j)):
                        res = res + C[v][w][t].diff(u)
                        for n in range(r):
                            res = res - C[v][w][n] * a.theta[u][n][t]
                    if not res.is_zero():
                        ok = False
                        worst = worst or res
    report.add("covariantly-closed", "cocycle-closed", chart.trunc_order, ok,
               summarize_residual(worst))
    return C, report


def cocycle_hform(a, C):
    """The fiber-linear 2-form with values pairing C against the fiber variables."""
    chart = a.chart
    b, r = chart.base_dim, chart.fiber_dim
    x = [FiberSeries.variable(chart, b + s) for s in range(r)]
    comps = {}
    for i in range(b):
        for j in range(i + 1, b):
            acc = FiberSeries.zero(chart)
            for t in range(r):
                acc = acc + C[i][j][t] * x[t]
            if not acc.is_zero():
                comps[(i, j)] = acc
    return HForm(chart, 2, comps)
