"""Independent reference computations used to check the library.

Nothing here imports the code under test.  The cone oracles work by brute
force over generator subsets (Caratheodory), the linear algebra ones go
through sympy, and signs of irrational expressions through mpmath.
"""

from fractions import Fraction
from itertools import combinations
from math import gcd

import mpmath
import sympy


# -- linear algebra ---------------------------------------------------------

def rank(rows):
    if not rows or not rows[0]:
        return 0
    return sympy.Matrix(rows).rank()


def nullspace(rows, ncols):
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    out = []
    for v in sympy.Matrix(rows).nullspace():
        out.append([Fraction(int(x.p), int(x.q)) for x in v])
    return out


def solve_nonneg(basis, x):
    """Coefficients of x in a linearly independent family, or None if x is outside its span."""
    n = len(basis)
    if n == 0:
        return [] if not any(x) else None
    A = sympy.Matrix([[b[i] for b in basis] for i in range(len(x))])
    rhs = sympy.Matrix(list(x))
    aug = A.row_join(rhs)
    if A.rank() != aug.rank():
        return None
    sol = (A.T * A).LUsolve(A.T * rhs)
    return [Fraction(int(sympy.Rational(s).p), int(sympy.Rational(s).q)) for s in sol]


def det(rows):
    return int(sympy.Matrix(rows).det()) if rows else 1


# -- cones by brute force ---------------------------------------------------

def in_cone(x, gens):
    """Caratheodory: x is a nonnegative combination of an independent subfamily."""
    if not any(x):
        return True
    nz = [g for g in gens if any(g)]
    r = rank(nz) if nz else 0
    for k in range(1, r + 1):
        for sub in combinations(nz, k):
            if rank(list(sub)) != k:
                continue
            coeffs = solve_nonneg(list(sub), x)
            if coeffs is not None and all(c >= 0 for c in coeffs):
                return True
    return False


def is_pointed(gens):
    nz = [g for g in gens if any(g)]
    return not any(in_cone([-x for x in g], nz) for g in nz)


def supporting_sets(gens):
    """Zero sets of all facet-supporting hyperplanes of a pointed cone."""
    d = len(gens[0])
    nz = [g for g in gens if any(g)]
    k = rank(nz) if nz else 0
    if k == 0:
        return []
    perp = nullspace(nz, d)          # equations of the span
    out = set()
    for sub in combinations(range(len(gens)), k - 1):
        rows = [gens[i] for i in sub]
        if k > 1 and rank(rows) != k - 1:
            continue
        ns = nullspace(rows + perp, d) if rows + perp else nullspace([], d)
        if len(ns) != 1:
            continue
        n = ns[0]
        vals = [sum(a * b for a, b in zip(n, g)) for g in gens]
        if all(v >= 0 for v in vals) or all(v <= 0 for v in vals):
            out.add(frozenset(i for i, v in enumerate(vals) if v == 0))
    return sorted(out, key=sorted)


def faces(gens):
    """Face index sets (generators lying in the face) of a pointed cone."""
    full = frozenset(range(len(gens)))
    found = {full}
    frontier = [full]
    facets = supporting_sets(gens)
    while frontier:
        nxt = []
        for f in frontier:
            for s in facets:
                g = f & s
                if g not in found:
                    found.add(g)
                    nxt.append(g)
        frontier = nxt
    zero = frozenset(i for i, g in enumerate(gens) if not any(g))
    found.add(zero)
    return found


def extreme_rays(gens):
    """Lowest-index representative of every extreme ray."""
    out = []
    for i, g in enumerate(gens):
        if not any(g):
            continue
        parallel = [j for j, h in enumerate(gens) if any(h) and rank([g, h]) == 1
                    and sum(a * b for a, b in zip(g, h)) > 0]
        if min(parallel) != i:
            continue
        others = [h for j, h in enumerate(gens) if j not in parallel]
        if not in_cone(g, others):
            out.append(i)
    return out


# -- integer normal forms ---------------------------------------------------

def determinantal_divisors(m):
    """Invariant factors from gcds of k x k minors."""
    rows, cols = len(m), len(m[0]) if m else 0
    divisors = [1]
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for rs in combinations(range(rows), k):
            for cs in combinations(range(cols), k):
                g = gcd(g, det([[m[r][c] for c in cs] for r in rs]))
        if g == 0:
            break
        divisors.append(g)
    return [divisors[i] // divisors[i - 1] for i in range(1, len(divisors))]


def sympy_snf_diagonal(m):
    from sympy.matrices.normalforms import smith_normal_form
    D = smith_normal_form(sympy.Matrix(m), domain=sympy.ZZ)
    return [abs(int(D[i, i])) for i in range(min(D.shape)) if D[i, i] != 0]


def is_unimodular(u):
    return abs(det(u)) == 1


# -- irrational signs -------------------------------------------------------

def mp_sign(expr_fn, values, dps=80):
    """Sign of expr_fn(*values) at high precision; values are mpmath-callables."""
    with mpmath.workdps(dps):
        v = expr_fn(*[f() for f in values])
        if abs(v) < mpmath.mpf(10) ** (-dps // 2):
            return 0
        return 1 if v > 0 else -1
