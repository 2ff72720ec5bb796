"""Calibrated quantum fans: cones indexed by calibration columns.

Every cone of a :class:`QuantumFan` is stored as the index set I of the
calibration columns generating it, so the fan is purely combinatorial data on
top of a :class:`CalibrationRec`.  Geometry is delegated to :mod:`qtoric.cone`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence

from .calibration import CalibrationRec
from .cone import Cone, intersect, is_face_of
from .scalar import Scalar


@dataclass
class AxiomResult:
    axiom: str
    passed: bool
    witnesses: list = field(default_factory=list)

    def to_json(self):
        return {"axiom": self.axiom, "passed": self.passed, "witnesses": self.witnesses}


@dataclass
class ValidationReport:
    results: List[AxiomResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, axiom: str) -> AxiomResult:
        for r in self.results:
            if r.axiom == axiom:
                return r
        raise KeyError(axiom)

    def to_json(self):
        return {"passed": self.passed, "axioms": [r.to_json() for r in self.results]}


def _fmt(indices: Iterable[int]) -> list:
    return sorted(indices)


class QuantumFan:
    """A fan whose cones are Cone(h(e_i), i in I) for index sets I.

    ``A`` is the generator index set; when omitted it is the union of the
    cone index sets.
    """

    def __init__(self, cal: CalibrationRec, cones: Sequence[Iterable[int]],
                 A: Optional[Iterable[int]] = None):
        self.cal = cal
        self.cones: List[FrozenSet[int]] = [frozenset(c) for c in cones]
        for c in self.cones:
            if any(not 0 <= i < cal.N for i in c):
                raise ValueError(f"cone index out of range: {sorted(c)}")
        self.A = frozenset(A) if A is not None else frozenset().union(*self.cones) if self.cones else frozenset()
        self._geo: Dict[FrozenSet[int], Cone] = {}

    @property
    def d(self) -> int:
        return self.cal.d

    def __repr__(self):
        return f"QuantumFan(d={self.d}, cones={[sorted(c) for c in self.cones]})"

    def indices(self, cone_id: int) -> FrozenSet[int]:
        return self.cones[cone_id]

    def cone_of(self, indices: Iterable[int]) -> Cone:
        key = frozenset(indices)
        c = self._geo.get(key)
        if c is None:
            c = Cone([self.cal.column(i) for i in sorted(key)], self.d)
            self._geo[key] = c
        return c

    def cone(self, cone_id: int) -> Cone:
        return self.cone_of(self.cones[cone_id])

    def find(self, indices: Iterable[int]) -> Optional[int]:
        """Id of the cone with exactly these indices, else of an equal cone."""
        key = frozenset(indices)
        for i, c in enumerate(self.cones):
            if c == key:
                return i
        geo = self.cone_of(key)
        for i, c in enumerate(self.cones):
            if self.cone_of(c) == geo:
                return i
        return None

    def find_cone(self, geo: Cone) -> Optional[int]:
        for i, c in enumerate(self.cones):
            if self.cone_of(c) == geo:
                return i
        return None

    def face_index_sets(self, cone_id: int) -> List[FrozenSet[int]]:
        """Faces of a cone, written as subsets of its index set."""
        idx = sorted(self.cones[cone_id])
        return [frozenset(idx[j] for j in f) for f, _ in self.cone(cone_id).faces()]

    def dim(self, cone_id: int) -> int:
        return self.cone(cone_id).dim

    # -- validation ---------------------------------------------------------

    def validate(self) -> ValidationReport:
        """Check every fan axiom and report a witness for each failure."""
        results = []
        zero = AxiomResult("zero_cone", any(not c for c in self.cones))
        if not zero.passed:
            zero.witnesses.append({"missing": []})
        results.append(zero)

        convex = AxiomResult("strongly_convex", True)
        for i, c in enumerate(self.cones):
            if not self.cone(i).is_strongly_convex():
                convex.passed = False
                convex.witnesses.append({"cone": i, "indices": _fmt(c)})
        results.append(convex)

        faces = AxiomResult("face_closure", True)
        if convex.passed:
            for i in range(len(self.cones)):
                for f in self.face_index_sets(i):
                    if self.find(f) is None:
                        faces.passed = False
                        faces.witnesses.append({"cone": i, "missing_face": _fmt(f),
                                                "rays": [[str(x) for x in self.cal.column(j)] for j in sorted(f)]})
        results.append(faces)

        inter = AxiomResult("intersection", True)
        if convex.passed:
            for i, j in combinations(range(len(self.cones)), 2):
                a, b = self.cone(i), self.cone(j)
                meet = intersect(a, b)
                k = self.find_cone(meet)
                if k is None:
                    inter.passed = False
                    inter.witnesses.append({"pair": [i, j], "problem": "intersection is not a cone of the fan"})
                elif not (is_face_of(meet, a) and is_face_of(meet, b)):
                    inter.passed = False
                    inter.witnesses.append({"pair": [i, j], "problem": "intersection is not a face of both cones"})
        results.append(inter)
        return ValidationReport(results)

    def validate_calibrated(self) -> ValidationReport:
        """Fan axioms plus the calibration and generator-set conditions."""
        report = self.validate()
        std = AxiomResult("standard_calibration", self.cal.is_standard())
        span = AxiomResult("virtual_span", self.cal.validate_virtual_span())
        gens = AxiomResult("generator_set", self.validate_generator_set() if report.passed else False)
        if not gens.passed and report.passed:
            gens.witnesses.append({"A": _fmt(self.A)})
        report.results.extend([std, span, gens])
        return report

    def rays(self) -> List[int]:
        """Ids of the one-dimensional cones."""
        return [i for i in range(len(self.cones)) if self.cones[i] and self.dim(i) == 1]

    def validate_generator_set(self) -> bool:
        """The rays Cone(h(e_i)), i in A, are exactly the 1-cones of the fan."""
        if self.A & self.cal.virtual:
            return False
        ray_ids = self.rays()
        hit = {r: [] for r in ray_ids}
        for i in sorted(self.A):
            geo = Cone([self.cal.column(i)], self.d)
            found = [r for r in ray_ids if self.cone(r) == geo]
            if len(found) != 1:
                return False
            hit[found[0]].append(i)
        return all(len(v) == 1 for v in hit.values())

    def maximal_cones(self) -> List[int]:
        out = []
        for i in range(len(self.cones)):
            ci = self.cone(i)
            dominated = False
            for j in range(len(self.cones)):
                if i == j:
                    continue
                cj = self.cone(j)
                if cj.contains_cone(ci) and not ci.contains_cone(cj):
                    dominated = True
                    break
                if cj == ci and j < i:
                    dominated = True
                    break
            if not dominated:
                out.append(i)
        return out

    def associated_fan(self) -> List[FrozenSet[int]]:
        """Index sets I with Cone(e_i, i in I) in the associated fan in R^N."""
        out = []
        for c in self.cones:
            if c not in out:
                out.append(c)
        return sorted(out, key=lambda s: (len(s), sorted(s)))

    def smallest_containing_cone(self, geo: Cone) -> Optional[int]:
        """Lexicographically least (by index set) cone containing geo."""
        best = None
        for i, c in enumerate(self.cones):
            if self.cone(i).contains_cone(geo):
                key = (sorted(c),)
                if best is None or key < best[0]:
                    best = (key, i)
        return None if best is None else best[1]

    def containing_cones(self, geo: Cone) -> List[int]:
        hits = [i for i in range(len(self.cones)) if self.cone(i).contains_cone(geo)]
        return sorted(hits, key=lambda i: sorted(self.cones[i]))


def close_fan(fan: QuantumFan) -> QuantumFan:
    """Add every missing face (and {0}); original cones keep their ids."""
    cones = list(fan.cones)
    seen = set(cones)
    extra = []
    for i in range(len(fan.cones)):
        if not fan.cone(i).is_strongly_convex():
            continue
        for f in fan.face_index_sets(i):
            if f not in seen and fan.find(f) is None:
                seen.add(f)
                extra.append(f)
    if frozenset() not in seen:
        extra.append(frozenset())
    extra.sort(key=lambda s: (len(s), sorted(s)))
    return QuantumFan(fan.cal, cones + extra, fan.A)
