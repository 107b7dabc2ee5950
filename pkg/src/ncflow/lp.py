"""Exact rational two-phase simplex.

The tableau is kept as sparse rows of ``gmpy2.mpq``; results are returned as
``fractions.Fraction``.  Pivoting follows Bland's rule (lowest eligible column
index, ties in the ratio test broken by lowest basic column index), so runs
are deterministic and terminate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from gmpy2 import mpq

LE, GE, EQ = "<=", ">=", "="
MIN, MAX = "min", "max"

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"


class LpError(ValueError):
    pass


@dataclass
class LpProblem:
    """Variables with lower bound 0 or None (free), rows ``coeffs rel rhs``."""

    lower: list = field(default_factory=list)
    names: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    objective: dict = field(default_factory=dict)
    sense: str = MIN

    @property
    def n_vars(self) -> int:
        return len(self.lower)

    def add_var(self, name=None, lower=0) -> int:
        if lower is not None and lower != 0:
            raise LpError("lower bound must be 0 or None")
        self.lower.append(lower)
        self.names.append(name)
        return len(self.lower) - 1

    def add_row(self, coeffs: Mapping, rel: str, rhs) -> int:
        if rel not in (LE, GE, EQ):
            raise LpError(f"bad relation {rel!r}")
        row = {j: Fraction(a) for j, a in coeffs.items() if a != 0}
        self.rows.append((row, rel, Fraction(rhs)))
        return len(self.rows) - 1

    def set_objective(self, coeffs: Mapping, sense: str = MIN) -> None:
        if sense not in (MIN, MAX):
            raise LpError(f"bad sense {sense!r}")
        self.objective = {j: Fraction(a) for j, a in coeffs.items() if a != 0}
        self.sense = sense


@dataclass
class LpResult:
    status: str
    x: list | None = None
    y: list | None = None
    value: Fraction | None = None
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _frac(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def _check_dims(p: LpProblem) -> None:
    n = p.n_vars
    for row, _, _ in p.rows:
        for j in row:
            if not 0 <= j < n:
                raise LpError(f"row references variable {j}, problem has {n}")
    for j in p.objective:
        if not 0 <= j < n:
            raise LpError(f"objective references variable {j}, problem has {n}")


class _Tableau:
    def __init__(self, rows, rhs, basis, ncols):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.ncols = ncols
        self.obj: dict = {}
        self.obj_val = mpq(0)
        self.pivots = 0

    def set_costs(self, cost: dict) -> None:
        # Reduced costs d_j = c_j - c_B B^-1 A_j for the current basis.
        obj = dict(cost)
        val = mpq(0)
        for i, b in enumerate(self.basis):
            cb = cost.get(b)
            if not cb:
                continue
            for k, a in self.rows[i].items():
                nv = obj.get(k, 0) - cb * a
                if nv:
                    obj[k] = nv
                else:
                    obj.pop(k, None)
            val -= cb * self.rhs[i]
        self.obj = obj
        self.obj_val = val  # equals minus the objective value

    def pivot(self, r: int, c: int) -> None:
        self.pivots += 1
        prow = self.rows[r]
        piv = prow[c]
        if piv != 1:
            inv = 1 / piv
            for k in prow:
                prow[k] *= inv
            self.rhs[r] *= inv
        prow[c] = mpq(1)
        prhs = self.rhs[r]
        items = list(prow.items())
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row.get(c)
            if not f:
                continue
            for k, a in items:
                nv = row.get(k, 0) - f * a
                if nv:
                    row[k] = nv
                else:
                    del row[k]
            self.rhs[i] -= f * prhs
        f = self.obj.get(c)
        if f:
            obj = self.obj
            for k, a in items:
                nv = obj.get(k, 0) - f * a
                if nv:
                    obj[k] = nv
                else:
                    del obj[k]
            self.obj_val -= f * prhs
        self.basis[r] = c

    def run(self, allowed) -> str:
        """Minimise the current cost row; ``allowed(j)`` filters entering columns."""
        while True:
            enter = None
            for j, d in self.obj.items():
                if d < 0 and allowed(j) and (enter is None or j < enter):
                    enter = j
            if enter is None:
                return OPTIMAL
            best = None
            best_ratio = None
            for i, row in enumerate(self.rows):
                a = row.get(enter)
                if a is None or a <= 0:
                    continue
                ratio = self.rhs[i] / a
                if (
                    best is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and self.basis[i] < self.basis[best])
                ):
                    best, best_ratio = i, ratio
            if best is None:
                return UNBOUNDED
            self.pivot(best, enter)


def solve_lp(p: LpProblem) -> LpResult:
    """Solve ``p`` exactly.

    On optimality ``x`` holds a basic optimal solution and ``y`` row duals
    with the sign convention of :func:`check_certificate`; both are
    re-verified before returning.
    """
    _check_dims(p)
    n = p.n_vars
    # Structural columns: x_j = x_j^+ - x_j^- for free variables.
    pos_col = list(range(n))
    neg_col: dict = {}
    ncols = n
    for j in range(n):
        if p.lower[j] is None:
            neg_col[j] = ncols
            ncols += 1

    sign = 1 if p.sense == MIN else -1
    cost = {}
    for j, a in p.objective.items():
        cost[pos_col[j]] = mpq(sign * a)
        if j in neg_col:
            cost[neg_col[j]] = mpq(-sign * a)

    rows, rhs, basis = [], [], []
    row_map = []  # original row -> (tableau row | None, flipped)
    ident = []  # tableau row -> column of its identity (slack or artificial)
    artificial = set()
    pending = []
    for idx, (coeffs, rel, b) in enumerate(p.rows):
        if not coeffs:
            ok = (rel == LE and 0 <= b) or (rel == GE and 0 >= b) or (rel == EQ and b == 0)
            if not ok:
                return LpResult(INFEASIBLE)
            row_map.append((None, False))
            continue
        flip = b < 0
        if flip:
            b = -b
            rel = {LE: GE, GE: LE, EQ: EQ}[rel]
        row = {}
        for j, a in coeffs.items():
            a = -a if flip else a
            row[pos_col[j]] = mpq(a)
            if j in neg_col:
                row[neg_col[j]] = mpq(-a)
        pending.append((row, rel, mpq(b)))
        row_map.append((len(pending) - 1, flip))

    for row, rel, b in pending:
        if rel == LE:
            row[ncols] = mpq(1)
            basis.append(ncols)
            ident.append(ncols)
            ncols += 1
        else:
            if rel == GE:
                row[ncols] = mpq(-1)
                ncols += 1
            row[ncols] = mpq(1)
            basis.append(ncols)
            ident.append(ncols)
            artificial.add(ncols)
            ncols += 1
        rows.append(row)
        rhs.append(b)

    tab = _Tableau(rows, rhs, basis, ncols)
    if artificial:
        tab.set_costs({c: mpq(1) for c in artificial})
        tab.run(lambda j: True)
        if tab.obj_val != 0:
            return LpResult(INFEASIBLE, pivots=tab.pivots)
        # Drive zero-level artificials out of the basis.
        for i in range(len(tab.rows)):
            if tab.basis[i] in artificial:
                for k in sorted(tab.rows[i]):
                    if k not in artificial and tab.rows[i][k] != 0:
                        tab.pivot(i, k)
                        break
    tab.set_costs(cost)
    status = tab.run(lambda j: j not in artificial)
    if status == UNBOUNDED:
        return LpResult(UNBOUNDED, pivots=tab.pivots)

    values = [mpq(0)] * ncols
    for i, b in enumerate(tab.basis):
        values[b] = tab.rhs[i]
    x = []
    for j in range(n):
        v = values[pos_col[j]]
        if j in neg_col:
            v -= values[neg_col[j]]
        x.append(_frac(v))

    # Row duals from reduced costs of identity columns: y_i = c_col - d_col = -d_col.
    y = []
    for tr, flip in row_map:
        if tr is None:
            y.append(Fraction(0))
            continue
        yi = -tab.obj.get(ident[tr], mpq(0))
        yi = _frac(yi) * sign
        y.append(-yi if flip else yi)
    value = sum((a * x[j] for j, a in p.objective.items()), Fraction(0))
    res = LpResult(OPTIMAL, x, y, value, tab.pivots)
    problems = check_certificate(p, res)
    if problems:
        raise LpError("internal certificate failure: " + "; ".join(problems[:5]))
    return res


def check_certificate(p: LpProblem, res: LpResult) -> list:
    """Verify primal feasibility, dual feasibility and equal objectives.

    Duals follow the Lagrangian convention ``c - y A`` = reduced costs: for a
    minimisation, ``y_i <= 0`` on ``<=`` rows and ``y_i >= 0`` on ``>=`` rows;
    for a maximisation the signs are reversed.
    """
    errs = []
    x, y = res.x, res.y
    for j, lb in enumerate(p.lower):
        if lb is not None and x[j] < 0:
            errs.append(f"x[{j}] < 0")
    for i, (coeffs, rel, b) in enumerate(p.rows):
        lhs = sum((a * x[j] for j, a in coeffs.items()), Fraction(0))
        if (rel == LE and lhs > b) or (rel == GE and lhs < b) or (rel == EQ and lhs != b):
            errs.append(f"row {i} violated")
    s = 1 if p.sense == MIN else -1
    for i, (_, rel, _) in enumerate(p.rows):
        yi = s * y[i]
        if (rel == LE and yi > 0) or (rel == GE and yi < 0):
            errs.append(f"dual sign of row {i}")
    red = {j: p.objective.get(j, Fraction(0)) for j in range(p.n_vars)}
    for i, (coeffs, _, _) in enumerate(p.rows):
        if y[i]:
            for j, a in coeffs.items():
                red[j] -= y[i] * a
    for j, d in red.items():
        d = s * d
        if p.lower[j] is None and d != 0:
            errs.append(f"reduced cost of free x[{j}] nonzero")
        elif p.lower[j] is not None and d < 0:
            errs.append(f"reduced cost of x[{j}] negative")
    dual_val = sum((y[i] * b for i, (_, _, b) in enumerate(p.rows)), Fraction(0))
    if dual_val != res.value:
        errs.append(f"objectives differ: primal {res.value}, dual {dual_val}")
    return errs
