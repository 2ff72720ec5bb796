"""Rational-case recovery and the GIT-side comparison data.

Hilbert bases, binomial relations and class groups only make sense for
integer calibrations; Gale transforms, stabilizer tags and the global GIT
presentation work for any calibration through the per-monomial integer
systems of :mod:`qtoric.linalg`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Dict, List, Optional, Sequence, Tuple

from .calibration import CalibrationRec
from .chart import ChartPresentation, greedy_basis, minimal_permutation
from .cone import Cone, dual_cone
from .errors import DiagramFailure, NoCompletion, ScaleExceeded
from .fan import QuantumFan
from .linalg import Matrix, int_kernel, kernel_basis, rank, snf

MAX_DIM = 4
MAX_ENTRY = 8
MAX_POINTS = 2_000_000
MAX_MONOMIALS = 200_000
DEFAULT_DEGREE_BOUND = 6


def primitive_int(v: Sequence) -> Tuple[int, ...]:
    """Smallest positive integer multiple of a rational vector."""
    fr = [x.as_fraction() if hasattr(x, "as_fraction") else Fraction(x) for x in v]
    den = lcm(*(f.denominator for f in fr)) if fr else 1
    ints = [int(f * den) for f in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return tuple(x // g for x in ints) if g else tuple(ints)


class ClassicalContext:
    """An integer calibration with no virtual generators.

    The columns need not be a basis: ker(h) may be nonzero (for instance
    e1, e2, e3, e1 - e2 + e3), and the rational constructions only use the
    columns as lattice vectors of Z^d.
    """

    def __init__(self, cal: CalibrationRec):
        if cal.virtual:
            raise ValueError("classical context needs an empty virtual set")
        if not cal.matrix.is_integer():
            raise ValueError("classical context needs integer columns")
        self.cal = cal

    def int_columns(self) -> List[Tuple[int, ...]]:
        return [tuple(int(x.as_fraction()) for x in c) for c in self.cal.columns]


# --------------------------------------------------------------------------
# Hilbert bases
# --------------------------------------------------------------------------

def _int_normals(c: Cone) -> Tuple[List[tuple], List[tuple]]:
    ineq = [primitive_int(n) for n in c.facet_normals()]
    eq = [primitive_int(e) for e in c.span_equalities()]
    return ineq, eq


def _member(x, ineq, eq) -> bool:
    for n in eq:
        if sum(a * b for a, b in zip(n, x)):
            return False
    for n in ineq:
        if sum(a * b for a, b in zip(n, x)) < 0:
            return False
    return True


def hilbert_basis(c: Cone) -> List[Tuple[int, ...]]:
    """Minimal generators of the semigroup c n Z^d, sorted.

    Every Hilbert basis element lies in the zonotope spanned by the
    primitive extreme rays, so the lattice points of its bounding box are
    enumerated and the reducible ones discarded.
    """
    if not all(x.is_rational() for g in c.generators for x in g):
        raise ValueError("Hilbert bases need a rational cone")
    c._require_strongly_convex()
    d = c.ambient_dim
    if d > MAX_DIM:
        raise ScaleExceeded(f"dimension {d} exceeds {MAX_DIM}")
    rays = [primitive_int(c.generators[i]) for i in c.extreme_rays()]
    if any(abs(x) > MAX_ENTRY for r in rays for x in r):
        raise ScaleExceeded(f"ray entries exceed {MAX_ENTRY}")
    if not rays:
        return []
    lo = [sum(min(0, r[j]) for r in rays) for j in range(d)]
    hi = [sum(max(0, r[j]) for r in rays) for j in range(d)]
    count = 1
    for a, b in zip(lo, hi):
        count *= b - a + 1
    if count > MAX_POINTS:
        raise ScaleExceeded(f"{count} lattice points to enumerate")
    ineq, eq = _int_normals(c)
    points = [p for p in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi)))
              if any(p) and _member(p, ineq, eq)]
    basis = []
    for x in points:
        reducible = False
        for y in points:
            if y == x:
                continue
            z = tuple(a - b for a, b in zip(x, y))
            if any(z) and _member(z, ineq, eq):
                reducible = True
                break
        if not reducible:
            basis.append(x)
    return sorted(basis)


# --------------------------------------------------------------------------
# binomial relations
# --------------------------------------------------------------------------

def _grading(gens: Sequence[Sequence[int]]) -> Optional[Tuple[int, ...]]:
    """An integer w with w . g > 0 for every generator, if the cone is pointed."""
    d = len(gens[0])
    c = Cone([g for g in gens], d)
    if not c.is_strongly_convex():
        return None
    w = [Fraction(0)] * d
    for n in c.facet_normals():
        nn = primitive_int(n)
        w = [a + b for a, b in zip(w, nn)]
    wi = primitive_int([Fraction(x) for x in w]) if any(w) else None
    if wi is None or any(sum(a * b for a, b in zip(wi, g)) <= 0 for g in gens):
        # fall back to a positive combination of rays in the span
        s = [sum(g[j] for g in gens) for j in range(d)]
        if all(sum(a * b for a, b in zip(s, g)) > 0 for g in gens):
            return tuple(s)
        return None
    return wi


def _monomials(weights: Sequence[int], bound: int):
    n = len(weights)
    out = []

    def rec(i, prefix, used):
        if i == n:
            out.append(tuple(prefix))
            if len(out) > MAX_MONOMIALS:
                raise ScaleExceeded("too many monomials below the degree bound")
            return
        e = 0
        while used + e * weights[i] <= bound:
            rec(i + 1, prefix + [e], used + e * weights[i])
            e += 1

    rec(0, [], 0)
    return out


def toric_relations(gens: Sequence[Sequence[int]], degree_bound: int = DEFAULT_DEGREE_BOUND) -> List[Tuple[tuple, tuple]]:
    """Binomials a -> b with sum a_i g_i = sum b_i g_i generating all moves up to the bound.

    Monomials are grouped into fibers of equal image.  Fibers are processed
    by increasing weight, and whenever the moves found so far leave a fiber
    disconnected a binomial joining the components is added.
    """
    gens = [tuple(int(x) for x in g) for g in gens]
    n = len(gens)
    if n == 0:
        return []
    w = _grading(gens)
    if w is not None:
        weights = [sum(a * b for a, b in zip(w, g)) for g in gens]
        bound = degree_bound * min(weights)
    else:
        weights = [1] * n
        bound = degree_bound
    fibers: Dict[tuple, list] = {}
    for a in _monomials(weights, bound):
        if not any(a):
            continue
        img = tuple(sum(a[i] * gens[i][j] for i in range(n)) for j in range(len(gens[0])))
        fibers.setdefault(img, []).append(a)
    order = sorted(fibers, key=lambda img: (sum(x * y for x, y in zip(fibers[img][0], weights)), img))
    moves: List[Tuple[tuple, tuple]] = []
    for img in order:
        mons = sorted(fibers[img])
        if len(mons) < 2:
            continue
        index = {m: i for i, m in enumerate(mons)}
        parent = list(range(len(mons)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for m in mons:
            for u, v in moves:
                for a, b in ((u, v), (v, u)):
                    if all(x >= y for x, y in zip(m, a)):
                        t = tuple(x - y + z for x, y, z in zip(m, a, b))
                        j = index.get(t)
                        if j is not None:
                            parent[find(index[m])] = find(j)
        roots = sorted({find(i) for i in range(len(mons))})
        if len(roots) > 1:
            reps = [min(mons[i] for i in range(len(mons)) if find(i) == r) for r in roots]
            reps.sort()
            for r in reps[1:]:
                moves.append((reps[0], r))
    return [(tuple(a), tuple(b)) for a, b in moves]


# --------------------------------------------------------------------------
# class groups and Gale transforms
# --------------------------------------------------------------------------

@dataclass
class ClassGroup:
    free_rank: int
    torsion: Tuple[int, ...]

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}


def class_group(ctx: ClassicalContext, indices: Sequence[int]) -> ClassGroup:
    """coker(M: Z^d -> Z^I), M having rows v_i, read off its Smith form."""
    cols = ctx.int_columns()
    M = [list(cols[i]) for i in sorted(indices)]
    d = ctx.cal.d
    if not M:
        return ClassGroup(0, ())
    D, _, _ = snf(M, d)
    diag = [D[i][i] for i in range(min(len(M), d))]
    r = sum(1 for x in diag if x)
    return ClassGroup(len(M) - r, tuple(x for x in diag if x > 1))


@dataclass
class GaleRec:
    k: list                 # N x r integer matrix, columns a basis of ker(h)
    kernel_rank: int
    expected_rank: int
    certified_exact: bool

    def to_json(self) -> dict:
        return {"k": self.k, "kernel_rank": self.kernel_rank, "expected_rank": self.expected_rank,
                "certified_exact": self.certified_exact,
                "flag": None if self.certified_exact else "integer kernel rank differs from N - d"}


def gale_transform(cal: CalibrationRec) -> GaleRec:
    basis = [list(b) for b in cal.xi_lattice().basis]
    N, d = cal.N, cal.d
    k = [[b[i] for b in basis] for i in range(N)]
    for b in basis:
        if any(cal.matrix @ b):
            raise DiagramFailure("h k = 0", "Gale vector outside ker(h)")
    r = rank(Matrix(basis)) if basis else 0
    return GaleRec(k, r, N - d, r == N - d)


# --------------------------------------------------------------------------
# stabilizers
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class StructureTag:
    connected_dim: int
    free_rank: int
    torus_rank: int

    def to_json(self) -> dict:
        return {"connected_dim": self.connected_dim, "free_rank": self.free_rank,
                "torus_rank": self.torus_rank}


@dataclass
class StabilizerReport:
    calibrated: StructureTag
    gale: Dict[Tuple[int, ...], StructureTag]
    deepest: Tuple[int, ...]
    gale_exact: bool

    @property
    def verdict(self) -> str:
        if self.calibrated == self.gale[self.deepest]:
            return "indistinguishable at this invariant"
        return "distinct"

    def to_json(self) -> dict:
        return {
            "calibrated": self.calibrated.to_json(),
            "gale": [{"K": list(k), **t.to_json()} for k, t in sorted(self.gale.items())],
            "deepest": list(self.deepest),
            "gale_exact": self.gale_exact,
            "verdict": self.verdict,
        }


def _supported_rank(xi_basis: Sequence[Sequence[int]], support) -> int:
    """Rank of the sublattice of Xi supported on the given coordinates."""
    if not xi_basis:
        return 0
    outside = [j for j in range(len(xi_basis[0])) if j not in support]
    if not outside:
        return len(xi_basis)
    # integer combinations c of the basis vanishing outside the support
    rows = [[b[j] for b in xi_basis] for j in outside]
    return len(int_kernel(rows, len(xi_basis)))


def stabilizer_report(chart: ChartPresentation) -> StabilizerReport:
    """Structure tags of point stabilizers in the calibrated and Gale-side models.

    Calibrated side, at the point where every cone coordinate vanishes: the
    group E(ker hbar) x ker(h).  Its connected part has dimension
    dim ker hbar and is a torus of rank rank(ker hbar n Z^{I u J}); its
    discrete part is free of rank rk ker(h).
    Gale side, for the stratum where the coordinates in K vanish:
    k^{-1}((ker hbar n C^K) + ker(h)), a vector group of dimension
    dim(ker hbar n C^K) times the free group ker(h) / (ker(h) n C^K).
    """
    cal = chart.cal
    xi = cal.xi_lattice()
    xi_basis = [list(b) for b in xi.basis]
    ker = chart.ker_basis
    calibrated = StructureTag(len(ker), xi.rank, _supported_rank(xi_basis, set(chart.rows)))

    strata = {}
    I = list(chart.I)
    for size in range(1, len(I) + 1):
        for K in itertools.combinations(I, size):
            outside = [p for p, lab in enumerate(chart.rows) if lab not in K]
            if not ker:
                dim = 0
            elif not outside:
                dim = len(ker)
            else:
                # kernel vectors vanishing off K
                dim = len(kernel_basis(Matrix.from_columns(ker).submatrix(outside, None)))
            strata[tuple(K)] = StructureTag(dim, xi.rank - _supported_rank(xi_basis, set(K)), 0)
    deepest = tuple(I)
    if not I:
        strata[()] = StructureTag(0, xi.rank, 0)
    return StabilizerReport(calibrated, strata, deepest, gale_transform(cal).certified_exact)


# --------------------------------------------------------------------------
# global GIT-type presentation
# --------------------------------------------------------------------------

@dataclass
class GitPresentationRec:
    A: Tuple[int, ...]
    A_tilde: Tuple[int, ...]
    B: Tuple[int, ...]
    chi: Tuple[int, ...]
    coordinates: Tuple[int, ...]
    fan: List[Tuple[int, ...]]
    phi: Matrix
    ker_basis: list

    def to_json(self, fmt) -> dict:
        return {
            "A": list(self.A), "A_tilde": list(self.A_tilde), "basis": list(self.B),
            "chi": list(self.chi), "coordinates": list(self.coordinates),
            "fan": [list(c) for c in self.fan],
            "phi": [[fmt(x) for x in r] for r in self.phi.rows],
            "ker_basis": [[fmt(x) for x in v] for v in self.ker_basis],
        }


def git_presentation(fan: QuantumFan) -> GitPresentationRec:
    cal = fan.cal
    A = sorted(frozenset().union(*fan.cones)) if fan.cones else []
    B_A = greedy_basis(cal, A)
    candidates = [j for j in cal.non_virtual if j not in A]
    A_tilde = greedy_basis(cal, candidates, B_A)
    if len(B_A) + len(A_tilde) < cal.d:
        raise NoCompletion("columns outside A do not complete span(v_A)")
    chi = minimal_permutation(cal.N, B_A, A_tilde)
    coords = tuple(sorted(set(A) | set(A_tilde)))
    pos = {lab: p for p, lab in enumerate(coords)}
    psi = cal.submatrix(chi[:cal.d])
    raw = psi.inverse() @ (cal.matrix @ Matrix.permutation(chi))
    rows = [[0] * cal.N for _ in coords]
    for p in range(cal.d):
        rows[pos[chi[p]]] = list(raw.row(p))
    phi = Matrix(rows, cal.N)
    ker = cal.submatrix(coords).kernel_basis()
    cones = set()
    for c in fan.cones:
        idx = sorted(c)
        for r in range(len(idx) + 1):
            for sub in itertools.combinations(idx, r):
                cones.add(sub)
    fan_list = sorted(cones, key=lambda s: (len(s), s))
    return GitPresentationRec(tuple(A), tuple(A_tilde), tuple(B_A), chi, coords, fan_list, phi, ker)
