"""
Ehresmann connections in chart coordinates: horizontal lifts, the
covariant exterior derivative on base forms with function values, and
the curvature form.

The connection stores coefficients gamma[i][s] so that the horizontal
lift of the i-th base field is  d_i - sum_s gamma[i][s] d_(x s).
Coordinate base fields commute, so the covariant exterior derivative
reduces to the alternating sum of horizontal-lift derivatives.
"""

from .series import FiberSeries, ChartMismatchError
from .multivector import Multivector, HForm, schouten
from .report import InternalInvariantError


class Connection:
    def __init__(self, chart, gamma):
        if len(gamma) != chart.base_dim or any(len(row) != chart.fiber_dim for row in gamma):
            raise ValueError("gamma must be base_dim x fiber_dim")
        for row in gamma:
            for g in row:
                if g.chart != chart:
                    raise ChartMismatchError("connection coefficient on a different chart")
        self.chart = chart
        self.gamma = [list(row) for row in gamma]

    @classmethod
    def flat(cls, chart):
        z = FiberSeries.zero(chart)
        return cls(chart, [[z for _ in range(chart.fiber_dim)] for _ in range(chart.base_dim)])

    def valid_order(self):
        orders = [g.valid_order for row in self.gamma for g in row]
        return min(orders) if orders else self.chart.trunc_order

    def is_homogeneous(self):
        """True iff every coefficient is fiber-linear with base-polynomial factors."""
        return all(g.fiber_degrees() <= {1} for row in self.gamma for g in row)

    def is_zero_on_section(self):
        """True iff every coefficient vanishes at x = 0."""
        return all(g.fiber_part(0, 0).is_zero() for row in self.gamma for g in row)

    def hor_lift(self, i):
        """The vector field d_i - sum_s gamma[i][s] d_(x s)."""
        chart = self.chart
        if not 0 <= i < chart.base_dim:
            raise IndexError("base index out of range")
        comps = {(i,): FiberSeries.constant(chart, 1)}
        for s, g in enumerate(self.gamma[i]):
            if not g.is_zero():
                comps[(chart.base_dim + s,)] = -g
        return Multivector(chart, 1, comps, self.valid_order())

    def hor_apply(self, i, f):
        """Apply the horizontal lift of d_i to a function, as a derivation."""
        chart = self.chart
        out = f.diff(i)
        for s, g in enumerate(self.gamma[i]):
            if not g.is_zero():
                out = out - g * f.diff(chart.base_dim + s)
        return out

    def cov_ext_deriv(self, F):
        """
        Covariant exterior derivative of a base form with function values.

        (dF)_{i0..ik} = sum_j (-1)^j hor(i_j) F_{i0..^j..ik}; for a
        fiber-independent form with a flat connection this is the
        ordinary differential of the base form.
        """
        chart = self.chart
        if F.chart != chart:
            raise ChartMismatchError("form lives on a different chart")
        k = F.degree + 1
        if k > chart.base_dim:
            return HForm.zero(chart, k, F.valid_order)
        out = {}
        from itertools import combinations
        for idx in combinations(range(chart.base_dim), k):
            acc = None
            for j, ij in enumerate(idx):
                rest = idx[:j] + idx[j + 1:]
                term = self.hor_apply(ij, F.component(rest))
                if j % 2:
                    term = -term
                acc = term if acc is None else acc + term
            if acc is not None and not acc.is_zero():
                out[idx] = acc
        vo = min((s.valid_order for s in out.values()), default=F.valid_order - 1)
        return HForm(chart, k, out, vo)

    def curvature(self):
        """
        Curvature as a map (i, j) -> vertical vector field, i < j:
        Curv_{ij} = -[hor(i), hor(j)].  Verticality is asserted.
        """
        chart = self.chart
        lifts = [self.hor_lift(i) for i in range(chart.base_dim)]
        out = {}
        for i in range(chart.base_dim):
            for j in range(i + 1, chart.base_dim):
                c = -schouten(lifts[i], lifts[j])
                if not c.is_vertical():
                    raise InternalInvariantError("curvature of a connection must be vertical")
                out[(i, j)] = c
        return out
