"""Morphisms of calibrated quantum fans and the chart data they induce.

A morphism is a pair (L, H) with L a d' x d Scalar matrix and H an integer
N' x N matrix, plus a map s between the virtual index sets.  For every cone
it induces linear data between chart presentations:

    L~ = H (x - E x) + psi'^{-1} L hbar x,   E = psi^{-1} hbar (embedded),
    H_chichi' = P_chi'^{-1} H P_chi.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from .chart import ChartPresentation, gluing, int_permutation, _inverse_perm
from .cone import Cone
from .errors import BlockFormViolation, KernelNotPreserved, Mismatch
from .fan import AxiomResult, QuantumFan, ValidationReport
from .linalg import Matrix, int_matmul, rank


class FanMorphismRec:
    """(L, H, s) between two calibrated quantum fans."""

    def __init__(self, source: QuantumFan, target: QuantumFan, L, H: Sequence[Sequence[int]],
                 s: Optional[Dict[int, int]] = None):
        self.source = source
        self.target = target
        self.L = L if isinstance(L, Matrix) else Matrix(L, source.d)
        self.H = [list(map(int, r)) for r in H]
        self.s = dict(s or {})
        d, N = source.d, source.cal.N
        d2, N2 = target.d, target.cal.N
        if self.L.shape != (d2, d):
            raise Mismatch(f"L has shape {self.L.shape}, expected {(d2, d)}")
        if len(self.H) != N2 or any(len(r) != N for r in self.H):
            raise Mismatch(f"H must be {N2} x {N}")

    def __repr__(self):
        return f"FanMorphismRec(L={self.L!r}, H={self.H}, s={self.s})"

    @property
    def H_matrix(self) -> Matrix:
        return Matrix(self.H, self.source.cal.N)

    def H_col(self, i: int) -> List[int]:
        return [r[i] for r in self.H]

    def target_cone(self, cone_id: int) -> Optional[int]:
        """Lexicographically least target cone containing L(sigma)."""
        return self.target.smallest_containing_cone(self.image_cone(cone_id))

    def image_cone(self, cone_id: int) -> Cone:
        gens = [self.L @ self.source.cal.column(i) for i in sorted(self.source.indices(cone_id))]
        gens = [g for g in gens if any(g)]
        return Cone(gens, self.target.d)

    def lifted_target(self, cone_id: int) -> Optional[int]:
        """A target cone sigma' with L(sigma) in sigma' and H(e_I) in N^{I'}."""
        I = sorted(self.source.indices(cone_id))
        for t in self.target.containing_cones(self.image_cone(cone_id)):
            Ip = self.target.indices(t)
            ok = True
            for i in I:
                col = self.H_col(i)
                if any(x < 0 or (x and j not in Ip) for j, x in enumerate(col)):
                    ok = False
                    break
            if ok:
                return t
        return None


def validate_morphism(m: FanMorphismRec) -> ValidationReport:
    src, tgt = m.source, m.target
    cal, cal2 = src.cal, tgt.cal
    results = []

    diagram = AxiomResult("diagram", cal2.matrix @ m.H_matrix == m.L @ cal.matrix)
    if not diagram.passed:
        bad = [i for i in range(cal.N)
               if cal2.matrix @ m.H_matrix.col(i) != m.L @ cal.column(i)]
        diagram.witnesses.append({"columns": bad})
    results.append(diagram)

    gamma = AxiomResult("gamma_image", True)
    for i in range(cal.N):
        if not cal2.gamma_contains(m.L @ cal.column(i)):
            gamma.passed = False
            gamma.witnesses.append({"generator": i})
    results.append(gamma)

    cones = AxiomResult("cone_mapping", True)
    lifted = AxiomResult("lifted_cone_mapping", True)
    for c in range(len(src.cones)):
        if m.target_cone(c) is None:
            cones.passed = False
            cones.witnesses.append({"cone": c, "indices": sorted(src.indices(c))})
        elif m.lifted_target(c) is None:
            lifted.passed = False
            lifted.witnesses.append({"cone": c, "indices": sorted(src.indices(c))})
    results.append(cones)
    results.append(lifted)

    vcone = AxiomResult("virtual_cone", True)
    virt = frozenset(cal.virtual)
    if virt and virt in set(src.associated_fan()):
        for i in range(cal.N):
            col = m.H_col(i)
            in_cone = all(x >= 0 for x in col) and all(not x or j in virt for j, x in enumerate(col))
            if in_cone and any(x and j not in cal2.virtual for j, x in enumerate(col)):
                vcone.passed = False
                vcone.witnesses.append({"column": i})
    results.append(vcone)

    nonvirt = AxiomResult("non_virtual_support", True)
    for i in range(cal.N):
        if i in cal.virtual:
            continue
        if any(m.H[j][i] for j in cal2.virtual):
            nonvirt.passed = False
            nonvirt.witnesses.append({"column": i})
    results.append(nonvirt)

    smap = AxiomResult("virtual_map", True)
    if set(m.s) != set(cal.virtual):
        smap.passed = False
        smap.witnesses.append({"problem": "s is not defined exactly on the virtual set"})
    for i, j in sorted(m.s.items()):
        if j not in cal2.virtual or m.H_col(i) != [int(r == j) for r in range(cal2.N)]:
            smap.passed = False
            smap.witnesses.append({"column": i, "s": j})
    results.append(smap)
    return ValidationReport(results)


def identity_morphism(fan: QuantumFan) -> FanMorphismRec:
    N = fan.cal.N
    return FanMorphismRec(fan, fan, Matrix.identity(fan.d), [[int(i == j) for j in range(N)] for i in range(N)],
                          {i: i for i in fan.cal.virtual})


def compose(g: FanMorphismRec, f: FanMorphismRec) -> FanMorphismRec:
    """g o f."""
    if f.target is not g.source:
        same = (f.target.cal.matrix == g.source.cal.matrix and f.target.cones == g.source.cones
                and f.target.cal.virtual == g.source.cal.virtual)
        if not same:
            raise Mismatch("target of f is not the source of g")
    s = {i: g.s[j] for i, j in f.s.items()}
    return FanMorphismRec(f.source, g.target, g.L @ f.L, int_matmul(g.H, f.H), s)


# --------------------------------------------------------------------------
# induced chart data
# --------------------------------------------------------------------------

@dataclass
class ChartMorphismRec:
    source: ChartPresentation
    target: ChartPresentation
    L_tilde: Matrix
    H_chichi: list
    block_M: list
    J_tilde: Tuple[int, ...]

    def to_json(self, fmt) -> dict:
        return {
            "source_cone": self.source.cone_id, "target_cone": self.target.cone_id,
            "L_tilde": [[fmt(x) for x in r] for r in self.L_tilde.rows],
            "H_chichi": self.H_chichi, "M": self.block_M, "J_tilde": list(self.J_tilde),
        }

    def extract(self) -> Tuple[Matrix, list]:
        """Recover (L, H) from the chart data."""
        src, tgt = self.source, self.target
        H = int_matmul(int_matmul(tgt.P_int, self.H_chichi), int_permutation(_inverse_perm(src.chi)))
        L = tgt.hbar @ self.L_tilde @ src.embed_matrix(src.psi_inv)
        return L, H


def _projection(chart: ChartPresentation) -> Matrix:
    """E = embed(psi^{-1} hbar): projection of C^{I u J} onto the C^{I~ + J} part."""
    return chart.embed_matrix(chart.psi_inv @ chart.hbar)


def induced_chart_morphism(m: FanMorphismRec, cone_id: int, target_cone: Optional[int] = None,
                           chart: Optional[ChartPresentation] = None,
                           target_chart: Optional[ChartPresentation] = None) -> ChartMorphismRec:
    src = chart or ChartPresentation(m.source, cone_id)
    if target_cone is None:
        target_cone = target_chart.cone_id if target_chart is not None else m.lifted_target(cone_id)
        if target_cone is None:
            target_cone = m.target_cone(cone_id)
    if target_cone is None:
        raise Mismatch(f"no target cone contains the image of cone {cone_id}")
    tgt = target_chart or ChartPresentation(m.target, target_cone)

    # J~: completion indices whose images stay independent of L(span sigma)
    base = [m.L @ m.source.cal.column(i) for i in src.I_tilde]
    current = rank(Matrix(base)) if base else 0
    J_tilde = []
    for j in src.J:
        trial = base + [m.L @ m.source.cal.column(j)]
        r = rank(Matrix(trial))
        if r > current:
            J_tilde.append(j)
            base, current = trial, r

    # H restricted to C^{I u J} -> C^{I' u J'}, which must preserve kernels
    E = _projection(src)
    n = len(src.rows)
    ker_proj = Matrix.identity(n) - E
    H_rows = []
    for lab2 in range(m.target.cal.N):
        H_rows.append([m.H[lab2][lab] for lab in src.rows])
    H_full = Matrix(H_rows, n)
    image = H_full @ ker_proj
    outside = [lab2 for lab2 in range(m.target.cal.N) if lab2 not in tgt._row_pos]
    if any(image[r, c] for r in outside for c in range(n)):
        raise KernelNotPreserved(f"H moves ker(hbar) of cone {cone_id} outside the chart of cone {target_cone}")
    H_restricted = H_full.submatrix(tgt.rows, None)
    part = H_restricted @ ker_proj
    if tgt.hbar @ part != Matrix.zeros(m.target.d, n):
        raise KernelNotPreserved(f"H does not map ker(hbar) of cone {cone_id} into the target kernel")
    L_tilde = part + tgt.embed_matrix(tgt.psi_inv @ (m.L @ src.hbar))

    H_cc = int_matmul(int_matmul(int_permutation(_inverse_perm(tgt.chi)), m.H), src.P_int)
    k = src.dim
    top = {p for p in range(m.target.cal.N) if tgt.chi[p] in set(tgt.I)}
    bottom = [p for p in range(m.target.cal.N) if p not in top]
    for i in range(k):
        if any(H_cc[p][i] for p in bottom):
            raise BlockFormViolation(f"column {i} of H_chichi leaves the cone block")
    M = [[H_cc[p][c] for c in range(k, m.source.cal.N)] for p in bottom]
    return ChartMorphismRec(src, tgt, L_tilde, H_cc, M, tuple(J_tilde))


def verify_chart_morphism(cm: ChartMorphismRec, m: FanMorphismRec) -> bool:
    """Both squares of the extended chart diagram commute exactly."""
    src, tgt = cm.source, cm.target
    if tgt.hbar @ cm.L_tilde != m.L @ src.hbar:
        return False
    return cm.L_tilde @ src.phi == tgt.phi @ Matrix(cm.H_chichi, m.source.cal.N)


def compose_chart_morphisms(g: ChartMorphismRec, f: ChartMorphismRec) -> Tuple[Matrix, list]:
    return g.L_tilde @ f.L_tilde, int_matmul(g.H_chichi, f.H_chichi)


def chart_family(m: FanMorphismRec, cones: Optional[Sequence[int]] = None,
                 targets: Optional[Dict[int, int]] = None) -> Dict[int, ChartMorphismRec]:
    """Induced chart morphisms on the given (default: maximal) source cones."""
    cones = m.source.maximal_cones() if cones is None else cones
    targets = targets or {}
    return {c: induced_chart_morphism(m, c, targets.get(c)) for c in cones}


def glue_compatibility(m: FanMorphismRec, family: Optional[Dict[int, ChartMorphismRec]] = None):
    """Check g' H_sigma = H_tau g and k' L_sigma = L_tau k on every pair of charts.

    Returns (ok, failing pairs).
    """
    family = family if family is not None else chart_family(m)
    failures = []
    for s, t in combinations(sorted(family), 2):
        fs, ft = family[s], family[t]
        g, _ = gluing(fs.source, ft.source)
        g2, _ = gluing(fs.target, ft.target)
        if int_matmul(g2.map_int, fs.H_chichi) != int_matmul(ft.H_chichi, g.map_int):
            failures.append({"pair": [s, t], "identity": "g' H_sigma = H_tau g"})
            continue
        if g2.map_linear @ fs.L_tilde != ft.L_tilde @ g.map_linear:
            failures.append({"pair": [s, t], "identity": "k' L_sigma = L_tau k"})
    return not failures, failures


def extract_morphism(family: Dict[int, ChartMorphismRec]) -> Tuple[Matrix, list]:
    """(L, H) read back from a chart family; all members must agree."""
    out = None
    for c in sorted(family):
        got = family[c].extract()
        if out is None:
            out = got
        elif got[0] != out[0] or got[1] != out[1]:
            raise Mismatch(f"chart {c} disagrees with the others on (L, H)")
    return out
