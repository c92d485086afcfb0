"""Exact rational linear feasibility, and the order oracles built on top of it.

The solver is a dense phase-1 simplex over ``fractions.Fraction`` with Bland's
rule, so it terminates and certifies infeasibility by optimality of the
artificial objective.  Every returned witness is re-checked by substitution
before it leaves this module.

The three oracles at the bottom decide the stochastic order between finitely
supported valuations and membership in upward/downward convex hulls.  At depth
one (valuations over a bare poset) the stochastic order can also be decided by
enumerating the open sets; the coupling formulation is what extends the oracle
to valuations over arbitrary spaces with a decidable order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .poset import enumerate_upsets
from .rational import rat

Rational = Fraction


class LPDimensionError(ValueError):
    pass


class MethodError(ValueError):
    """Raised when the enumeration method is requested above a base poset."""


class FlavorMismatchError(ValueError):
    """Raised when probability-flavored inputs do not all have mass one."""


@dataclass(frozen=True)
class LinearFeasibilityProblem:
    """A x = b, C x <= d, with optional per-variable nonnegativity."""

    num_vars: int
    eqs: tuple[tuple[tuple[Fraction, ...], Fraction], ...] = ()
    ineqs: tuple[tuple[tuple[Fraction, ...], Fraction], ...] = ()
    nonneg: tuple[bool, ...] = ()

    def __post_init__(self):
        nn = self.nonneg if self.nonneg else (True,) * self.num_vars
        object.__setattr__(self, "nonneg", nn)
        if len(nn) != self.num_vars:
            raise LPDimensionError("nonneg flags do not match variable count")
        for coeffs, _ in self.eqs + self.ineqs:
            if len(coeffs) != self.num_vars:
                raise LPDimensionError("constraint width does not match variable count")


def dump_problem(prob: LinearFeasibilityProblem) -> str:
    lines = [f"vars: {prob.num_vars}  nonneg: {''.join('1' if b else '0' for b in prob.nonneg)}"]
    for coeffs, b in prob.eqs:
        lines.append("  " + " + ".join(f"{c}*x{i}" for i, c in enumerate(coeffs) if c) + f" = {b}")
    for coeffs, b in prob.ineqs:
        lines.append("  " + " + ".join(f"{c}*x{i}" for i, c in enumerate(coeffs) if c) + f" <= {b}")
    return "\n".join(lines)


def _verify(prob: LinearFeasibilityProblem, x: Sequence[Fraction]) -> None:
    for coeffs, b in prob.eqs:
        if sum(c * v for c, v in zip(coeffs, x)) != b:
            raise AssertionError("witness violates an equality constraint")
    for coeffs, b in prob.ineqs:
        if sum(c * v for c, v in zip(coeffs, x)) > b:
            raise AssertionError("witness violates an inequality constraint")
    for flag, v in zip(prob.nonneg, x):
        if flag and v < 0:
            raise AssertionError("witness violates nonnegativity")


def feasible(prob: LinearFeasibilityProblem) -> Optional[tuple[Fraction, ...]]:
    """Return an exact witness, or None when the system is infeasible."""
    zero, one = Fraction(0), Fraction(1)

    # Map each original variable to its column(s); free variables are split.
    cols: list[tuple[int, int]] = []  # (plus column, minus column or -1)
    ncols = 0
    for flag in prob.nonneg:
        if flag:
            cols.append((ncols, -1))
            ncols += 1
        else:
            cols.append((ncols, ncols + 1))
            ncols += 2

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    is_eq: list[bool] = []
    for coeffs, b in prob.eqs:
        rows.append(list(coeffs))
        rhs.append(b)
        is_eq.append(True)
    for coeffs, b in prob.ineqs:
        rows.append(list(coeffs))
        rhs.append(b)
        is_eq.append(False)

    m = len(rows)
    slack_start = ncols
    nslack = sum(1 for e in is_eq if not e)
    art_start = slack_start + nslack
    width = art_start + m  # one artificial per row is enough

    table = [[zero] * width for _ in range(m)]
    b_col = [zero] * m
    basis = [-1] * m
    si = 0
    for r in range(m):
        sign = one if rhs[r] >= 0 else -one
        for v, c in enumerate(rows[r]):
            plus, minus = cols[v]
            table[r][plus] += sign * c
            if minus >= 0:
                table[r][minus] -= sign * c
        b_col[r] = sign * rhs[r]
        if not is_eq[r]:
            table[r][slack_start + si] = sign * one
            if sign == one:
                basis[r] = slack_start + si
            si += 1
        if basis[r] < 0:
            table[r][art_start + r] = one
            basis[r] = art_start + r

    # Phase-1 objective: minimize the sum of artificial variables.
    cost = [zero] * width
    for j in range(art_start, width):
        cost[j] = one

    def reduced_costs():
        d = list(cost)
        z = zero
        for r in range(m):
            cb = cost[basis[r]]
            if cb:
                z += cb * b_col[r]
                for j in range(width):
                    d[j] -= cb * table[r][j]
        return d, z

    while True:
        d, z = reduced_costs()
        enter = -1
        for j in range(width):
            if d[j] < 0:
                enter = j
                break  # Bland: lowest index
        if enter < 0:
            if z != 0:
                return None
            break
        leave, best = -1, None
        for r in range(m):
            a = table[r][enter]
            if a > 0:
                ratio = b_col[r] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    best, leave = ratio, r
        if leave < 0:
            # Unbounded phase-1 objective cannot happen (it is bounded below by 0).
            raise AssertionError("phase-1 simplex lost boundedness")
        piv = table[leave][enter]
        table[leave] = [c / piv for c in table[leave]]
        b_col[leave] /= piv
        for r in range(m):
            if r != leave and table[r][enter]:
                f = table[r][enter]
                table[r] = [c - f * p for c, p in zip(table[r], table[leave])]
                b_col[r] -= f * b_col[leave]
        basis[leave] = enter

    values = [zero] * width
    for r in range(m):
        values[basis[r]] = b_col[r]
    witness = []
    for plus, minus in cols:
        witness.append(values[plus] - (values[minus] if minus >= 0 else zero))
    out = tuple(witness)
    _verify(prob, out)
    return out


# ---------------------------------------------------------------------------
# Order oracles over finitely supported valuations.
# ---------------------------------------------------------------------------


def _support(space, v):
    """Canonical (child, weight) pairs of a valuation element."""
    from . import spaces

    vc = spaces.canonicalize(space, v)
    return list(vc.entries)


def _coupling_feasible(rows, cols, leq) -> bool:
    """Partial-transport feasibility: row masses moved upward into column masses.

    rows: list of (point, mass); cols: likewise; leq(u, v) decides comparability.
    Feasible iff there is gamma >= 0 on comparable pairs with all row sums equal
    to the row masses and all column sums at most the column masses.
    """
    pairs = [
        (ri, ci)
        for ri, (u, _) in enumerate(rows)
        for ci, (v, _) in enumerate(cols)
        if leq(u, v)
    ]
    nv = len(pairs)
    eqs = []
    for ri, (_, mass) in enumerate(rows):
        coeffs = [rat(1) if p[0] == ri else rat(0) for p in pairs]
        eqs.append((tuple(coeffs), mass))
    ineqs = []
    for ci, (_, mass) in enumerate(cols):
        coeffs = [rat(1) if p[1] == ci else rat(0) for p in pairs]
        ineqs.append((tuple(coeffs), mass))
    prob = LinearFeasibilityProblem(nv, tuple(eqs), tuple(ineqs))
    return feasible(prob) is not None


def stochastic_leq(space, v1, v2, method: str = "auto") -> bool:
    """Decide v1 <= v2 in the stochastic order of a valuation space.

    method 'enumerate' compares v1(U) <= v2(U) over every up-set of a base
    poset; 'coupling' (and 'auto') solves the partial-transport problem over
    the child space's order oracle.
    """
    from . import spaces

    if method == "enumerate":
        child = space.child
        if not isinstance(child, spaces.BaseSpace):
            raise MethodError("enumerate method only applies over a base poset")
        p = child.poset
        e1 = _support(space, v1)
        e2 = _support(space, v2)
        for upset in enumerate_upsets(p):
            m1 = sum((w for w, x in e1 if x.index in upset), rat(0))
            m2 = sum((w for w, x in e2 if x.index in upset), rat(0))
            if m1 > m2:
                return False
        return True
    if method not in ("auto", "coupling"):
        raise MethodError(f"unknown stochastic order method {method!r}")

    child = space.child
    rows = [(x, w) for w, x in _support(space, v1)]
    cols = [(x, w) for w, x in _support(space, v2)]
    return _coupling_feasible(
        rows, cols, lambda u, v: spaces.leq_elements(child, u, v)
    )


def _check_flavor(space, nu, gens):
    from . import spaces

    if space.flavor != "one":
        return
    masses = {spaces.mass(nu)} | {spaces.mass(g) for g in gens}
    if masses != {rat(1)}:
        raise FlavorMismatchError("flavor 'one' requires all masses equal to 1")


def convex_up_membership(space, nu, gens) -> bool:
    """Is nu above some convex combination of the generators?

    Decides: exists lambda >= 0 with sum lambda = 1 and sum_j lambda_j gen_j
    <= nu in the stochastic order, via a joint mixture+transport system.
    """
    from . import spaces

    gens = tuple(gens)
    if not gens:
        raise ValueError("membership needs at least one generator")
    _check_flavor(space, nu, gens)
    child = space.child
    supports = [_support(space, g) for g in gens]
    points: list = []
    for sup in supports:
        for _, x in sup:
            if x not in points:
                points.append(x)
    target = _support(space, nu)
    k, m, p = len(gens), len(points), len(target)
    pairs = [
        (ui, vi)
        for ui in range(m)
        for vi in range(p)
        if spaces.leq_elements(child, points[ui], target[vi][1])
    ]
    nv = k + len(pairs)
    zero = rat(0)

    eqs = [((rat(1),) * k + (zero,) * len(pairs), rat(1))]
    for ui in range(m):
        coeffs = [zero] * nv
        for j, sup in enumerate(supports):
            for w, x in sup:
                if x == points[ui]:
                    coeffs[j] -= w
        for pi, (u, _) in enumerate(pairs):
            if u == ui:
                coeffs[k + pi] = rat(1)
        eqs.append((tuple(coeffs), zero))
    ineqs = []
    for vi in range(p):
        coeffs = [zero] * nv
        for pi, (_, v) in enumerate(pairs):
            if v == vi:
                coeffs[k + pi] = rat(1)
        ineqs.append((tuple(coeffs), target[vi][0]))
    prob = LinearFeasibilityProblem(nv, tuple(eqs), tuple(ineqs))
    return feasible(prob) is not None


def convex_down_membership(space, nu, gens) -> bool:
    """Is nu below some convex combination of the generators?"""
    from . import spaces

    gens = tuple(gens)
    if not gens:
        raise ValueError("membership needs at least one generator")
    _check_flavor(space, nu, gens)
    child = space.child
    supports = [_support(space, g) for g in gens]
    points: list = []
    for sup in supports:
        for _, x in sup:
            if x not in points:
                points.append(x)
    source = _support(space, nu)
    k, m, p = len(gens), len(points), len(source)
    pairs = [
        (ui, vi)
        for ui in range(p)
        for vi in range(m)
        if spaces.leq_elements(child, source[ui][1], points[vi])
    ]
    nv = k + len(pairs)
    zero = rat(0)

    eqs = [((rat(1),) * k + (zero,) * len(pairs), rat(1))]
    for ui in range(p):
        coeffs = [zero] * nv
        for pi, (u, _) in enumerate(pairs):
            if u == ui:
                coeffs[k + pi] = rat(1)
        eqs.append((tuple(coeffs), source[ui][0]))
    ineqs = []
    for vi in range(m):
        coeffs = [zero] * nv
        for j, sup in enumerate(supports):
            for w, x in sup:
                if x == points[vi]:
                    coeffs[j] -= w
        for pi, (_, v) in enumerate(pairs):
            if v == vi:
                coeffs[k + pi] = rat(1)
        ineqs.append((tuple(coeffs), zero))
    prob = LinearFeasibilityProblem(nv, tuple(eqs), tuple(ineqs))
    return feasible(prob) is not None
