"""Polyhedral cones over Q(alpha): double description, faces and intersections.

A :class:`Cone` is given by generators.  Facet normals are computed by the
double description method inside the linear span of the generators, using
span coordinates so that the dual cone is pointed.  Every inequality test
goes through the exact sign oracle.
"""

from __future__ import annotations

from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .errors import NotStronglyConvex
from .linalg import (Matrix, Vector, dot, is_zero_vec, kernel_basis, rank, solve,
                     span_basis_indices, vec, vec_scale, vec_sub)
from .scalar import Scalar, sign


def _dd(constraints: Sequence[Vector], dim: int) -> List[Tuple[Vector, FrozenSet[int]]]:
    """Extreme rays of the pointed cone {y in R^dim : c . y >= 0 for all c}.

    ``constraints`` must have rank ``dim``.  Constraints are inserted in
    index order after an initial lexicographically first basis; adjacency of
    two rays is decided by the rank of their common active constraints.
    Returns (ray, set of active constraint indices) pairs.
    """
    if dim == 0:
        return []
    basis = span_basis_indices(constraints)
    if len(basis) != dim:
        raise ValueError("constraint system does not have full column rank")
    binv = Matrix([constraints[i] for i in basis]).inverse()
    processed = list(basis)
    rays = []
    for j in range(dim):
        r = binv.col(j)
        active = frozenset(basis[i] for i in range(dim) if i != j)
        rays.append((r, active))
    for idx, c in enumerate(constraints):
        if idx in basis:
            continue
        vals = [(ray, act, sign(dot(c, ray))) for ray, act in rays]
        pos = [(r, a, dot(c, r)) for r, a, s in vals if s > 0]
        neg = [(r, a, dot(c, r)) for r, a, s in vals if s < 0]
        new = [(r, a | {idx}) for r, a, s in vals if s == 0]
        new += [(r, a) for r, a, _ in pos]
        for p, ap, cp in pos:
            for n, an, cn in neg:
                common = ap & an
                if len(common) < dim - 2:
                    continue
                if dim > 2 and rank(Matrix([constraints[i] for i in sorted(common)])) != dim - 2:
                    continue
                if dim == 1:
                    continue
                ray = vec_sub(vec_scale(cp, n), vec_scale(cn, p))
                if is_zero_vec(ray):
                    continue
                new.append((ray, common | {idx}))
        processed.append(idx)
        rays = new
    # recompute active sets against every constraint for downstream use
    out = []
    for ray, _ in rays:
        active = frozenset(i for i, c in enumerate(constraints) if not dot(c, ray))
        out.append((ray, active))
    return out


def _lift(normal: Vector, basis_mat: Matrix, rows: List[int], ambient: int) -> Vector:
    """A vector n in R^ambient with n . b_j = normal_j for the span basis b_j."""
    sub = basis_mat.submatrix(rows, None)  # k x k, invertible
    part = solve(sub.T, normal)
    out = [Scalar(0)] * ambient
    for r, x in zip(rows, part):
        out[r] = x
    return tuple(out)


class Cone:
    """The cone generated by finitely many nonzero vectors of R^d."""

    def __init__(self, generators: Sequence[Sequence], ambient_dim: Optional[int] = None):
        gens = [vec(g) for g in generators]
        if ambient_dim is None:
            if not gens:
                raise ValueError("ambient_dim is required for a cone without generators")
            ambient_dim = len(gens[0])
        for g in gens:
            if len(g) != ambient_dim:
                raise ValueError("generator of wrong length")
            if is_zero_vec(g):
                raise ValueError("generators must be nonzero")
        self.ambient_dim = ambient_dim
        self.generators = tuple(gens)
        self._cache: Dict[str, object] = {}

    def __repr__(self):
        gens = ", ".join("(" + ", ".join(str(x) for x in g) + ")" for g in self.generators)
        return f"Cone[{gens}]"

    # -- span ---------------------------------------------------------------

    def _span(self):
        hit = self._cache.get("span")
        if hit is None:
            idx = span_basis_indices(self.generators)
            basis = [self.generators[i] for i in idx]
            k = len(basis)
            if k:
                bmat = Matrix.from_columns(basis)
                rows = span_basis_indices(bmat.rows)
                sub = bmat.submatrix(rows, None)
                inv = sub.inverse()
                coords = [inv @ [g[r] for r in rows] for g in self.generators]
                equalities = kernel_basis(bmat.T)
            else:
                bmat, rows, coords = None, [], [() for _ in self.generators]
                equalities = [tuple(Scalar(1 if i == j else 0) for i in range(self.ambient_dim))
                              for j in range(self.ambient_dim)]
            hit = {"basis_idx": idx, "bmat": bmat, "rows": rows, "coords": coords,
                   "equalities": equalities}
            self._cache["span"] = hit
        return hit

    @property
    def dim(self) -> int:
        return len(self._span()["basis_idx"])

    def span_equalities(self) -> List[Vector]:
        """Basis of the annihilator of the linear span."""
        return list(self._span()["equalities"])

    # -- dual description ---------------------------------------------------

    def _facets(self):
        hit = self._cache.get("facets")
        if hit is None:
            sp = self._span()
            k = self.dim
            coords = sp["coords"]
            raw = _dd(coords, k) if k else []
            normals_span = [r for r, _ in raw]
            lifted = [_lift(n, sp["bmat"], sp["rows"], self.ambient_dim) for n in normals_span]
            hit = {"span_normals": normals_span, "normals": lifted,
                   "active": [a for _, a in raw]}
            self._cache["facets"] = hit
        return hit

    def facet_normals(self) -> List[Vector]:
        """Inequality normals n (irredundant) with <n, x> >= 0 on the cone."""
        return list(self._facets()["normals"])

    def dual_description(self) -> List[Vector]:
        """Facet normals followed by opposite pairs for each span equality."""
        out = self.facet_normals()
        for e in self.span_equalities():
            out.append(e)
            out.append(tuple(-x for x in e))
        return out

    def facet_generator_sets(self) -> List[FrozenSet[int]]:
        return list(self._facets()["active"])

    def contains(self, x: Sequence) -> bool:
        x = vec(x)
        if any(dot(e, x) for e in self.span_equalities()):
            return False
        return all(sign(dot(n, x)) >= 0 for n in self.facet_normals())

    def contains_cone(self, other: "Cone") -> bool:
        return all(self.contains(g) for g in other.generators)

    def __eq__(self, other):
        if not isinstance(other, Cone):
            return NotImplemented
        return (self.ambient_dim == other.ambient_dim and self.contains_cone(other)
                and other.contains_cone(self))

    def __hash__(self):
        return hash((self.ambient_dim, self.dim))

    # -- convexity ----------------------------------------------------------

    def is_strongly_convex(self) -> bool:
        """True iff the cone contains no line."""
        k = self.dim
        if k == 0:
            return True
        normals = self._facets()["span_normals"]
        return bool(normals) and rank(Matrix(normals)) == k

    def _require_strongly_convex(self):
        if not self.is_strongly_convex():
            raise NotStronglyConvex(f"{self!r} contains a line")

    def extreme_rays(self) -> List[int]:
        """Indices of generators spanning extreme rays, lowest index per ray."""
        hit = self._cache.get("extreme")
        if hit is None:
            self._require_strongly_convex()
            k = self.dim
            normals = self._facets()["span_normals"]
            coords = self._span()["coords"]
            seen: Dict[FrozenSet[int], int] = {}
            for i, g in enumerate(coords):
                active = frozenset(j for j, n in enumerate(normals) if not dot(n, g))
                if active in seen:
                    continue
                if k == 1 or (active and rank(Matrix([normals[j] for j in sorted(active)])) == k - 1):
                    seen[active] = i
            hit = sorted(seen.values())
            self._cache["extreme"] = hit
        return list(hit)

    def is_simplicial(self) -> bool:
        rays = self.extreme_rays()
        return len(rays) == self.dim

    def faces(self) -> List[Tuple[FrozenSet[int], int]]:
        """Every face as (generator indices on it, dimension), {0} included."""
        hit = self._cache.get("faces")
        if hit is None:
            self._require_strongly_convex()
            everything = frozenset(range(len(self.generators)))
            found = {everything}
            frontier = [everything]
            facets = self.facet_generator_sets()
            while frontier:
                nxt = []
                for f in frontier:
                    for s in facets:
                        g = f & s
                        if g not in found:
                            found.add(g)
                            nxt.append(g)
                frontier = nxt
            out = []
            for f in found:
                d = rank(Matrix([self.generators[i] for i in sorted(f)])) if f else 0
                out.append((f, d))
            out.sort(key=lambda t: (t[1], sorted(t[0])))
            hit = out
            self._cache["faces"] = hit
        return list(hit)

    def face_cone(self, indices) -> "Cone":
        return Cone([self.generators[i] for i in sorted(indices)], self.ambient_dim)

    def minimal_face_containing(self, other: "Cone") -> FrozenSet[int]:
        """Generator indices of the smallest face of self containing other."""
        normals = self.facet_normals()
        tight = [n for n in normals if all(not dot(n, g) for g in other.generators)]
        return frozenset(i for i, g in enumerate(self.generators)
                         if all(not dot(n, g) for n in tight))

    def is_face_of(self, sigma: "Cone") -> bool:
        """True iff self is a face of sigma."""
        return is_face_of(self, sigma)

    def relative_interior_point(self) -> Vector:
        total = tuple(Scalar(0) for _ in range(self.ambient_dim))
        for g in self.generators:
            total = tuple(a + b for a, b in zip(total, g))
        return total


def is_face_of(tau: Cone, sigma: Cone) -> bool:
    if tau.ambient_dim != sigma.ambient_dim:
        raise ValueError("cones live in different ambient spaces")
    if not sigma.contains_cone(tau):
        return False
    face = sigma.minimal_face_containing(tau)
    return all(tau.contains(sigma.generators[i]) for i in face)


def polyhedral_cone(normals: Sequence[Sequence], ambient_dim: int) -> Cone:
    """The cone {x : <n, x> >= 0 for every n} as a generated cone."""
    rows = [vec(n) for n in normals if not is_zero_vec(vec(n))]
    if not rows:
        return Cone([tuple(Scalar(1 if i == j else 0) for i in range(ambient_dim)) for j in range(ambient_dim)]
                    + [tuple(Scalar(-1 if i == j else 0) for i in range(ambient_dim)) for j in range(ambient_dim)],
                    ambient_dim)
    nmat = Matrix(rows)
    lineality = kernel_basis(nmat)
    ridx = span_basis_indices(rows)
    nr = Matrix([rows[i] for i in ridx])
    r = len(ridx)
    # write every constraint in coordinates y = nr x
    nr_t = nr.T
    cons = [solve(nr_t, n) for n in rows]
    gens = []
    for ray, _ in _dd(cons, r):
        gens.append(solve(nr, ray))
    for v in lineality:
        gens.append(v)
        gens.append(tuple(-x for x in v))
    return Cone(gens, ambient_dim)


def intersect(a: Cone, b: Cone) -> Cone:
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("cones live in different ambient spaces")
    return polyhedral_cone(a.dual_description() + b.dual_description(), a.ambient_dim)


def dual_cone(c: Cone) -> Cone:
    """The dual cone {y : <y, x> >= 0 on c}, generated by the dual description."""
    gens = c.dual_description()
    return Cone(gens, c.ambient_dim)
