"""
Neighborhood-equivalence machinery: homotopy families of geometric data,
the homological equation, exact verification of the deformation
identity, and a numeric pullback check along the time-1 flow.

The family built from data (Gamma, V, F) and a base 1-form phi vanishing
on the zero section is

    Gamma_t = Gamma - t (V# dphi)^h,
    F_t     = F - t dGamma(phi) - (t^2/2) {phi ^ phi}_V,

polynomial in the homotopy parameter t.  The deformation field X_t
solves X_t | F_t = phi; its horizontal lift drags the assembled tensor
along the family.  Part 1 of the verification is the reduction of that
statement to the exact identity

    dGamma_t(phi) = dGamma(phi) + t {phi ^ phi}_V,

checked identically in t; Part 2 checks the full deformation equation
at sampled rational times.
"""

from fractions import Fraction

import numpy as np

from .series import FiberSeries, matrix_invert, mat_fiber_zero_part, mat_neg, mat_mul
from .multivector import Multivector, HForm, wedge, schouten
from .connection import Connection
from .coupling import GeometricData, assemble, verify_coupling_conditions, v_sharp
from .report import CheckReport, InternalInvariantError, summarize_residual
from . import linalg

DEFAULT_T_SAMPLES = (Fraction(0), Fraction(1, 4), Fraction(1, 2),
                     Fraction(3, 4), Fraction(1))


class PhiForm:
    """A base 1-form with function values vanishing on the zero section."""

    def __init__(self, chart, phi):
        if len(phi) != chart.base_dim:
            raise ValueError("phi needs one component per base direction")
        for p in phi:
            if p.chart != chart:
                raise ValueError("phi component on a different chart")
            if not p.fiber_part(0, 0).is_zero():
                raise ValueError("phi must vanish on the zero section "
                                 "(no fiber-constant terms)")
        self.chart = chart
        self.phi = list(phi)

    def hform(self):
        return HForm(self.chart, 1, {(i,): p for i, p in enumerate(self.phi)
                                     if not p.is_zero()})


def phi_bracket(phi1, phi2, V):
    """
    The quadratic form bracket {phi1 ^ phi2}_V as a base 2-form:

        {phi1 ^ phi2}_V(u_i, u_j) = V(d phi1(u_i), d phi2(u_j))
                                  - V(d phi1(u_j), d phi2(u_i)).

    Formulas in this package use half of this object, which for
    phi1 = phi2 = l(mu) equals the fiberwise pairing of [mu_i, mu_j].
    """
    chart = V.chart
    if not V.is_vertical():
        raise ValueError("phi_bracket needs a vertical bivector")
    if phi1.chart != chart or phi2.chart != chart:
        raise ValueError("phi lives on a different chart")
    b = chart.base_dim

    def pair(f, g):
        acc = FiberSeries.zero(chart, min(V.valid_order, f.valid_order - 1,
                                          g.valid_order - 1))
        for (s, t), v in V.comps.items():
            acc = acc + v * (f.diff(s) * g.diff(t) - f.diff(t) * g.diff(s))
        return acc

    comps = {}
    for i in range(b):
        for j in range(i + 1, b):
            val = pair(phi1.phi[i], phi2.phi[j]) - pair(phi1.phi[j], phi2.phi[i])
            if not val.is_zero():
                comps[(i, j)] = val
    vo = min([c.valid_order for c in comps.values()]
             + [min(V.valid_order, min(p.valid_order for p in phi1.phi + phi2.phi) - 1)])
    return HForm(chart, 2, comps, vo)


class TPoly:
    """Polynomial in the homotopy parameter with series coefficients."""

    __slots__ = ("chart", "coeffs")

    def __init__(self, chart, coeffs):
        while coeffs and coeffs[-1].is_zero():
            coeffs = coeffs[:-1]
        self.chart = chart
        self.coeffs = list(coeffs)

    @classmethod
    def const(cls, s):
        return cls(s.chart, [s])

    def is_zero(self):
        return not self.coeffs

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        out = []
        for k in range(n):
            a = self.coeffs[k] if k < len(self.coeffs) else FiberSeries.zero(self.chart)
            b = other.coeffs[k] if k < len(other.coeffs) else FiberSeries.zero(self.chart)
            out.append(a + b)
        return TPoly(self.chart, out)

    def __neg__(self):
        return TPoly(self.chart, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def mul_series(self, s):
        return TPoly(self.chart, [c * s for c in self.coeffs])

    def __mul__(self, other):
        out = [FiberSeries.zero(self.chart)
               for _ in range(len(self.coeffs) + len(other.coeffs))]
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return TPoly(self.chart, out)

    def dt(self):
        return TPoly(self.chart, [c.scale(k) for k, c in enumerate(self.coeffs)][1:])

    def eval(self, t):
        t = Fraction(t)
        acc = FiberSeries.zero(self.chart)
        power = Fraction(1)
        for c in self.coeffs:
            acc = acc + c.scale(power)
            power *= t
        return acc

    def eval_float(self, t, point):
        acc = 0.0
        power = 1.0
        for c in self.coeffs:
            acc += power * c.evaluate_float(point)
            power *= t
        return acc


class HomotopyFamily:
    """
    Precomputed family: the connection coefficients and 2-form matrix as
    t-polynomials, plus the vertical correction fields.
    """

    def __init__(self, data, phi, gamma_t, fform_t, corrections, dphi, quad,
                 degenerate_samples):
        self.data = data
        self.phi = phi
        self.chart = data.chart
        self.gamma_t = gamma_t          # [i][s] TPoly, degree <= 1
        self.fform_t = fform_t          # [i][j] TPoly, degree <= 2, antisymmetric
        self.corrections = corrections  # [i][s]: the t-coefficient of -gamma_t
        self.dphi = dphi
        self.quad = quad
        self.degenerate_samples = degenerate_samples

    def connection_at(self, t):
        return Connection(self.chart, [[g.eval(t) for g in row] for row in self.gamma_t])

    def fform_matrix_at(self, t):
        return [[f.eval(t) for f in row] for row in self.fform_t]

    def seed_at(self, t):
        """Certified inverse of the fiber-constant block at this sample, or None."""
        F = self.fform_matrix_at(t)
        F0 = mat_fiber_zero_part(F)
        base0 = mat_fiber_zero_part(self.data.fform.matrix())
        if all((a - b).is_zero() for ra, rb in zip(F0, base0) for a, b in zip(ra, rb)):
            return self.data.fform_inv_seed
        b = self.chart.base_dim
        const = []
        for row in F0:
            crow = []
            for s in row:
                if any(sum(e[:b]) > 0 for e in s.terms):
                    return None
                crow.append(s.constant_term())
            const.append(crow)
        try:
            inv = linalg.invert(const)
        except ValueError:
            return None
        return [[FiberSeries.constant(self.chart, c) for c in row] for row in inv]

    def data_at(self, t):
        seed = self.seed_at(t)
        if seed is None:
            raise ValueError("family 2-form is degenerate (or uncertifiable) at t=%s" % t)
        F = self.fform_matrix_at(t)
        return GeometricData(self.connection_at(t), self.data.vertical,
                             HForm.from_matrix(self.chart, F), seed)


def build_family(data, phi, t_samples=DEFAULT_T_SAMPLES):
    """
    Build the homotopy family from verified data and a vanishing 1-form.

    Preconditions: the data passes the coupling conditions.  At every
    requested rational sample the triple is verified again; failures of
    nondegeneracy are recorded (not fatal), while a genuine condition
    failure at a sample is an internal error.
    """
    chart = data.chart
    if phi.chart != chart:
        raise ValueError("phi lives on a different chart")
    base_report = verify_coupling_conditions(data)
    if not base_report.passed:
        raise ValueError("base data fails the coupling conditions:\n"
                         + base_report.render())
    b, r = chart.base_dim, chart.fiber_dim
    corrections = []
    for i in range(b):
        w = v_sharp(data.vertical, phi.phi[i])
        corrections.append([w.component((b + s,)) for s in range(r)])
    gamma_t = [[TPoly(chart, [data.connection.gamma[i][s], -corrections[i][s]])
                for s in range(r)] for i in range(b)]
    dphi = data.connection.cov_ext_deriv(phi.hform())
    quad = phi_bracket(phi, phi, data.vertical)
    F = data.fform.matrix()
    fform_t = [[TPoly(chart, [F[i][j], -dphi.component((i, j)),
                              quad.component((i, j)).scale(Fraction(-1, 2))])
                for j in range(b)] for i in range(b)]
    family = HomotopyFamily(data, phi, gamma_t, fform_t, corrections, dphi, quad,
                            degenerate_samples=[])
    for t in t_samples:
        t = Fraction(t)
        seed = family.seed_at(t)
        if seed is None:
            family.degenerate_samples.append(t)
            continue
        rep = verify_coupling_conditions(family.data_at(t))
        if not rep.passed:
            raise InternalInvariantError(
                "family member at t=%s fails the coupling conditions:\n" % t
                + rep.render())
    return family


def solve_homological(fam, t):
    """
    The unique coefficient field X with X | F_t = phi, as a list of base
    components.  The defining residual is re-checked exactly, and the
    solution vanishes on the zero section.
    """
    t = Fraction(t)
    chart = fam.chart
    b = chart.base_dim
    seed = fam.seed_at(t)
    if seed is None:
        raise ValueError("family 2-form is singular at fiber degree 0 for t=%s" % t)
    F = fam.fform_matrix_at(t)
    G = matrix_invert(F, seed)
    X = []
    for s in range(b):
        acc = FiberSeries.zero(chart, G[0][0].valid_order)
        for j in range(b):
            acc = acc + fam.phi.phi[j] * G[j][s]
        X.append(acc)
    for j in range(b):
        res = -fam.phi.phi[j].truncate(X[0].valid_order)
        for s in range(b):
            res = res + X[s] * F[s][j]
        if not res.is_zero():
            raise InternalInvariantError("homological solve residual is nonzero")
    for s in range(b):
        if not X[s].fiber_part(0, 0).is_zero():
            raise InternalInvariantError("deformation field does not vanish "
                                         "on the zero section")
    return X


def horizontal_field(fam, t, X):
    """The horizontal lift of a base coefficient field along the family
    connection at time t."""
    chart = fam.chart
    b, r = chart.base_dim, chart.fiber_dim
    conn = fam.connection_at(t)
    comps = {}
    vo = min(x.valid_order for x in X) if X else chart.trunc_order
    for i in range(b):
        if not X[i].is_zero():
            comps[(i,)] = X[i]
    for s in range(r):
        acc = FiberSeries.zero(chart, vo)
        for i in range(b):
            acc = acc - X[i] * conn.gamma[i][s]
        if not acc.is_zero():
            comps[(b + s,)] = acc
    vo2 = min([c.valid_order for c in comps.values()] + [vo])
    return Multivector(chart, 1, comps, vo2)


def verify_deformation_equation(fam, t_samples=DEFAULT_T_SAMPLES):
    """
    Two-part verification of the deformation equation.

    Part 1 (identically in t): the reduced identity
    dGamma_t(phi) - dGamma(phi) - t {phi^phi}_V = 0 as a polynomial in t
    with exact series coefficients.  Part 2 (per rational sample):
    [[X_t^h, Pi_t]] + dPi_t/dt = 0 at certified order, with the
    t-derivative computed exactly from the inverse-derivative identity.
    """
    chart = fam.chart
    b, r = chart.base_dim, chart.fiber_dim
    report = CheckReport("deformation-equation")

    worst, ok, order = None, True, None
    for i in range(b):
        for j in range(i + 1, b):
            acc = TPoly.const(fam.phi.phi[j].diff(i) - fam.phi.phi[i].diff(j))
            for s in range(r):
                acc = acc - fam.gamma_t[i][s].mul_series(fam.phi.phi[j].diff(chart.base_dim + s))
                acc = acc + fam.gamma_t[j][s].mul_series(fam.phi.phi[i].diff(chart.base_dim + s))
            acc = acc - TPoly.const(fam.dphi.component((i, j)))
            acc = acc - TPoly(chart, [FiberSeries.zero(chart), fam.quad.component((i, j))])
            for c in acc.coeffs:
                order = c.valid_order if order is None else min(order, c.valid_order)
                if not c.is_zero():
                    ok = False
                    worst = worst or c
    report.add("reduced-identity-in-t", "part-1",
               order if order is not None else chart.trunc_order - 1, ok,
               summarize_residual(worst))

    for t in t_samples:
        t = Fraction(t)
        seed = fam.seed_at(t)
        if seed is None:
            report.add("deformation-at-t=%s" % t, "part-2", None, False,
                       "2-form degenerate at this sample")
            continue
        F = fam.fform_matrix_at(t)
        G = matrix_invert(F, seed)
        H = mat_neg(G)
        dF = [[fam.fform_t[i][j].dt().eval(t) for j in range(b)] for i in range(b)]
        dH = mat_mul(mat_mul(H, dF), H)
        conn = fam.connection_at(t)
        lifts = [conn.hor_lift(i) for i in range(b)]
        W = [Multivector(chart, 1,
                         {(b + s,): fam.corrections[i][s] for s in range(r)
                          if not fam.corrections[i][s].is_zero()})
             for i in range(b)]
        vo = min([x.valid_order for row in H for x in row]
                 + [fam.data.vertical.valid_order])
        dpi = Multivector.zero(chart, 2, vo)
        for i in range(b):
            for j in range(i + 1, b):
                if not dH[i][j].is_zero():
                    dpi = dpi + wedge(lifts[i], lifts[j]).mul_series(dH[i][j])
        for i in range(b):
            for j in range(b):
                if H[i][j].is_zero() or W[i].is_zero():
                    continue
                dpi = dpi + wedge(W[i], lifts[j]).mul_series(H[i][j])
        pi_t = assemble(fam.data_at(t)).pi
        X = solve_homological(fam, t)
        Xh = horizontal_field(fam, t, X)
        res = schouten(Xh, pi_t) + dpi
        report.add("deformation-at-t=%s" % t, "part-2", res.valid_order,
                   res.is_zero(), summarize_residual(res))
    return report


# -- numerics ----------------------------------------------------------


def _family_rhs(fam, t, z):
    """Float evaluation of the horizontal deformation field at (t, z)."""
    chart = fam.chart
    b, r = chart.base_dim, chart.fiber_dim
    F = np.array([[fam.fform_t[i][j].eval_float(t, z) for j in range(b)]
                  for i in range(b)])
    phi = np.array([p.evaluate_float(z) for p in fam.phi.phi])
    X = np.linalg.solve(F.T, phi)
    dz = np.zeros(b + r)
    dz[:b] = X
    for s in range(r):
        for i in range(b):
            dz[b + s] -= X[i] * fam.gamma_t[i][s].eval_float(t, z)
    return dz


def _flow(fam, z0, steps, chart_bound):
    z = np.array(z0, dtype=float)
    h = 1.0 / steps
    for k in range(steps):
        t = k * h
        k1 = _family_rhs(fam, t, z)
        k2 = _family_rhs(fam, t + h / 2, z + h / 2 * k1)
        k3 = _family_rhs(fam, t + h / 2, z + h / 2 * k2)
        k4 = _family_rhs(fam, t + h, z + h * k3)
        z = z + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(z)) or np.max(np.abs(z)) > chart_bound:
            raise FloatingPointError("flow escaped the chart at step %d" % k)
    return z


def _pi_matrix(fam, t, z):
    """Float components of the family tensor at (t, z), full antisymmetric."""
    chart = fam.chart
    b, r = chart.base_dim, chart.fiber_dim
    n = b + r
    F = np.array([[fam.fform_t[i][j].eval_float(t, z) for j in range(b)]
                  for i in range(b)])
    H = -np.linalg.inv(F)
    gam = np.array([[fam.gamma_t[i][s].eval_float(t, z) for s in range(r)]
                    for i in range(b)])
    out = np.zeros((n, n))
    out[:b, :b] = H
    mixed = -H @ gam
    out[:b, b:] = mixed
    out[b:, :b] = -mixed.T
    vert = np.zeros((r, r))
    for (u, v), s in fam.data.vertical.comps.items():
        val = s.evaluate_float(z)
        vert[u - b, v - b] = val
        vert[v - b, u - b] = -val
    out[b:, b:] = vert + gam.T @ H @ gam
    return out


def numeric_pullback_check(fam, sample_points, steps, fd_delta=1e-5,
                           chart_bound=1e6, tol=None):
    """
    Integrate the time-dependent horizontal field from t=0 to 1 with
    classical fixed-step RK4, transform the endpoint tensor by the
    finite-difference Jacobian of the flow, and report the maximal
    componentwise deviation from the initial tensor at each point.
    """
    chart = fam.chart
    n = chart.n_vars
    report = CheckReport("numeric-pullback")
    for z0 in sample_points:
        z0 = [float(v) for v in z0]
        if len(z0) != n:
            raise ValueError("sample points must have dimension %d" % n)
        try:
            z1 = _flow(fam, z0, steps, chart_bound)
            J = np.zeros((n, n))
            for a in range(n):
                zp = list(z0)
                zm = list(z0)
                zp[a] += fd_delta
                zm[a] -= fd_delta
                J[:, a] = (_flow(fam, zp, steps, chart_bound)
                           - _flow(fam, zm, steps, chart_bound)) / (2 * fd_delta)
        except FloatingPointError as exc:
            report.add("point-%s" % _fmt_point(z0), "flow", None, False, str(exc))
            continue
        pi0 = _pi_matrix(fam, 0.0, z0)
        pi1 = _pi_matrix(fam, 1.0, list(z1))
        K = np.linalg.inv(J)
        pulled = K @ pi1 @ K.T
        dev = float(np.max(np.abs(pulled - pi0)))
        entry_ok = True if tol is None else dev < tol
        report.add("point-%s" % _fmt_point(z0), "flow", None, entry_ok,
                   "%.3e" % dev, detail=dev)
    return report


def _fmt_point(z):
    return "(" + ",".join("%.4g" % v for v in z) + ")"


def data_equivalence_check(d1, d2, phi, g=None, g_inv=None):
    """
    Check the three equivalence relations between two geometric data sets
    under a fiber-linear map g (identity when omitted) and the 1-form phi.
    """
    chart = d1.chart
    if d2.chart != chart or phi.chart != chart:
        raise ValueError("equivalence check needs a shared chart")
    b, r = chart.base_dim, chart.fiber_dim
    if (g is None) != (g_inv is None):
        raise ValueError("g and g_inv must be supplied together")
    if g is None:
        one = FiberSeries.constant(chart, 1)
        zero = FiberSeries.zero(chart)
        g = [[one if i == j else zero for j in range(r)] for i in range(r)]
        g_inv = [[one if i == j else zero for j in range(r)] for i in range(r)]
    gg = mat_mul(g, g_inv)
    if not all((gg[i][j] - (1 if i == j else 0)).is_zero()
               for i in range(r) for j in range(r)):
        raise ValueError("g_inv is not an exact inverse of g")

    report = CheckReport("data-equivalence")

    def subst(s):
        return s.substitute_fiber(g)

    worst, ok, order = None, True, None
    for u in range(r):
        for v in range(u + 1, r):
            acc = FiberSeries.zero(chart)
            for al in range(r):
                for be in range(r):
                    w = d2.vertical.component((b + al, b + be))
                    if w.is_zero():
                        continue
                    acc = acc + g_inv[u][al] * g_inv[v][be] * subst(w)
            res = acc - d1.vertical.component((b + u, b + v))
            order = res.valid_order if order is None else min(order, res.valid_order)
            if not res.is_zero():
                ok = False
                worst = worst or res
    report.add("vertical-relation", "equiv-vert",
               order if order is not None else d1.vertical.valid_order, ok,
               summarize_residual(worst))

    x = [FiberSeries.variable(chart, b + s) for s in range(r)]
    worst, ok, order = None, True, None
    for i in range(b):
        for u in range(r):
            acc = FiberSeries.zero(chart)
            for t in range(r):
                inner = subst(d2.connection.gamma[i][t])
                for v in range(r):
                    inner = inner + g[t][v].diff(i) * x[v]
                acc = acc + g_inv[u][t] * inner
            corr = v_sharp(d1.vertical, phi.phi[i]).component((b + u,))
            res = acc - (d1.connection.gamma[i][u] - corr)
            order = res.valid_order if order is None else min(order, res.valid_order)
            if not res.is_zero():
                ok = False
                worst = worst or res
    report.add("connection-relation", "equiv-conn",
               order if order is not None else d1.valid_order(), ok,
               summarize_residual(worst))

    dphi = d1.connection.cov_ext_deriv(phi.hform())
    quad = phi_bracket(phi, phi, d1.vertical)
    worst, ok, order = None, True, None
    for i in range(b):
        for j in range(i + 1, b):
            res = subst(d2.fform.component((i, j))) - (
                d1.fform.component((i, j)) - dphi.component((i, j))
                - quad.component((i, j)).scale(Fraction(1, 2)))
            order = res.valid_order if order is None else min(order, res.valid_order)
            if not res.is_zero():
                ok = False
                worst = worst or res
    report.add("two-form-relation", "equiv-form",
               order if order is not None else d1.fform.valid_order, ok,
               summarize_residual(worst))
    return report
