"""Affine chart presentations of a calibrated quantum fan, and their gluing.

For a cone sigma = Cone(v_i, i in I) the chart records the choices (I~, J,
chi) and the linear data

    phi = psi^{-1} h P_chi : C^N -> C^{I u J},

where psi is the isomorphism C^d -> C^d given by the columns v_chi(0..d-1)
and the image is written in the coordinates of C^{I u J} (rows of I \\ I~
are zero).  All coordinate labels are column indices of the calibration;
vectors in C^{I u J} are ordered by sorted label.  Exponential maps are never
evaluated: coordinates are only tagged additive (C) or multiplicative (T).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .calibration import CalibrationRec, XiLattice
from .cone import intersect, is_face_of
from .errors import DiagramFailure, Inconsistent, NoCompletion, NotAFace
from .fan import QuantumFan
from .linalg import (Matrix, Vector, int_det, int_matmul, is_zero_vec, rank, snf,
                     solve, vec_sub)
from .scalar import Scalar


# --------------------------------------------------------------------------
# choices
# --------------------------------------------------------------------------

def greedy_basis(cal: CalibrationRec, candidates: Sequence[int], start: Sequence[int] = ()) -> List[int]:
    """Lexicographically least extension of ``start`` by independent candidates."""
    chosen: List[int] = []
    cols = [cal.column(i) for i in start]
    current = rank(Matrix(cols)) if cols else 0
    for i in sorted(candidates):
        trial = cols + [cal.column(i)]
        r = rank(Matrix(trial))
        if r > current:
            chosen.append(i)
            cols = trial
            current = r
    return chosen


def choose_basis_subfamily(fan: QuantumFan, cone_id: int) -> List[int]:
    """Lexicographically least subset of I whose columns are a basis of span(sigma)."""
    return greedy_basis(fan.cal, sorted(fan.indices(cone_id)))


def choose_completion(fan: QuantumFan, cone_id: int, I_tilde: Optional[Sequence[int]] = None) -> List[int]:
    """Lexicographically least J outside I and the virtual set with C^d = span(sigma) + span(v_J)."""
    cal = fan.cal
    I = fan.indices(cone_id)
    if I_tilde is None:
        I_tilde = choose_basis_subfamily(fan, cone_id)
    k = len(I_tilde)
    if k == cal.d:
        return []
    candidates = [j for j in cal.non_virtual if j not in I]
    J = greedy_basis(cal, candidates, I_tilde)
    if k + len(J) < cal.d:
        raise NoCompletion(f"columns outside cone {cone_id} do not complete span(sigma) to R^{cal.d}")
    return J


def minimal_permutation(N: int, I_tilde: Sequence[int], J: Sequence[int]) -> Tuple[int, ...]:
    """The permutation chi with chi({0..k-1}) = I~, chi({k..d-1}) = J moving fewest points.

    Points already in their block stay fixed; the other block positions take
    the remaining block values in increasing order, and the displaced values
    fill the vacated positions >= d in increasing order.
    """
    k, d = len(I_tilde), len(I_tilde) + len(J)
    chi = [None] * N
    blocks = [(range(0, k), sorted(I_tilde)), (range(k, d), sorted(J))]
    used = set()
    for positions, values in blocks:
        vals = set(values)
        free_pos = []
        for p in positions:
            if p in vals:
                chi[p] = p
                used.add(p)
            else:
                free_pos.append(p)
        rest = [v for v in values if v not in used]
        for p, v in zip(free_pos, rest):
            chi[p] = v
            used.add(v)
    tail_free = []
    for p in range(d, N):
        if p not in used:
            chi[p] = p
            used.add(p)
        else:
            tail_free.append(p)
    leftovers = sorted(v for v in range(N) if v not in used)
    for p, v in zip(tail_free, leftovers):
        chi[p] = v
    return tuple(chi)


def permutation_matrix(chi: Sequence[int]) -> Matrix:
    """P_chi with P_chi e_i = e_chi(i)."""
    return Matrix.permutation(chi)


def int_permutation(chi: Sequence[int]) -> list:
    n = len(chi)
    rows = [[0] * n for _ in range(n)]
    for i, j in enumerate(chi):
        rows[j][i] = 1
    return rows


def _inverse_perm(chi: Sequence[int]) -> Tuple[int, ...]:
    inv = [0] * len(chi)
    for i, j in enumerate(chi):
        inv[j] = i
    return tuple(inv)


def _compose_perm(a: Sequence[int], b: Sequence[int]) -> Tuple[int, ...]:
    """a o b."""
    return tuple(a[b[i]] for i in range(len(b)))


# --------------------------------------------------------------------------
# chart presentation
# --------------------------------------------------------------------------

class ChartPresentation:
    """Linear/lattice data presenting the chart of one cone."""

    def __init__(self, fan: QuantumFan, cone_id: int, I_tilde: Optional[Sequence[int]] = None,
                 J: Optional[Sequence[int]] = None):
        cal = fan.cal
        self.fan = fan
        self.cal = cal
        self.cone_id = cone_id
        self.I = tuple(sorted(fan.indices(cone_id)))
        self.dim = fan.dim(cone_id)
        if I_tilde is None:
            I_tilde = choose_basis_subfamily(fan, cone_id)
        I_tilde = sorted(I_tilde)
        if not set(I_tilde) <= set(self.I) or len(I_tilde) != self.dim or \
                rank(cal.submatrix(I_tilde)) != self.dim:
            raise ValueError(f"{I_tilde} is not a basis subfamily of cone {cone_id}")
        if J is None:
            J = choose_completion(fan, cone_id, I_tilde)
        J = sorted(J)
        if set(J) & set(self.I) or set(J) & cal.virtual or len(J) != cal.d - self.dim or \
                rank(cal.submatrix(I_tilde + J)) != cal.d:
            raise NoCompletion(f"{J} does not complete cone {cone_id}")
        self.I_tilde = tuple(I_tilde)
        self.J = tuple(J)
        self.chi = minimal_permutation(cal.N, I_tilde, J)
        self.rows = tuple(sorted(set(self.I) | set(self.J)))
        self._row_pos = {r: p for p, r in enumerate(self.rows)}
        d = cal.d
        self.psi = cal.submatrix(self.chi[:d])
        self.psi_inv = self.psi.inverse()
        self.P = permutation_matrix(self.chi)
        self.P_int = int_permutation(self.chi)
        self.hbar = cal.submatrix(self.rows)
        self.phi = self.embed_matrix(self.psi_inv @ (cal.matrix @ self.P))
        self.ker_basis = self.hbar.kernel_basis()
        self.multiplicative = tuple(self.J)

    def __repr__(self):
        return (f"ChartPresentation(cone={self.cone_id}, I={list(self.I)}, I~={list(self.I_tilde)}, "
                f"J={list(self.J)})")

    @property
    def xi(self) -> XiLattice:
        return self.cal.xi_lattice()

    @property
    def additive(self) -> Tuple[int, ...]:
        return self.I

    def embed(self, y: Sequence) -> Vector:
        """Place a vector of psi-coordinates into C^{I u J}."""
        out = [Scalar(0)] * len(self.rows)
        for p in range(self.cal.d):
            out[self._row_pos[self.chi[p]]] = y[p]
        return tuple(out)

    def embed_matrix(self, m: Matrix) -> Matrix:
        return Matrix.from_columns([self.embed(c) for c in m.columns()], len(self.rows))

    def psi_coordinates(self, v: Sequence) -> Vector:
        """psi^{-1}(v) for v in C^d."""
        return self.psi_inv @ v

    def check_identity(self) -> bool:
        """hbar . phi == h . P_chi exactly."""
        return self.hbar @ self.phi == self.cal.matrix @ self.P

    def in_kernel_span(self, x: Sequence) -> bool:
        if is_zero_vec(x):
            return True
        if not self.ker_basis:
            return False
        try:
            solve(Matrix.from_columns(self.ker_basis), x)
            return True
        except Inconsistent:
            return False

    def to_json(self, fmt) -> dict:
        return {
            "cone": self.cone_id,
            "I": list(self.I),
            "I_tilde": list(self.I_tilde),
            "J": list(self.J),
            "chi": list(self.chi),
            "coordinates": list(self.rows),
            "multiplicative": list(self.multiplicative),
            "phi": [[fmt(x) for x in r] for r in self.phi.rows],
            "ker_basis": [[fmt(x) for x in v] for v in self.ker_basis],
            "xi": {"rank": self.xi.rank, "basis": [list(b) for b in self.xi.basis]},
        }


def build_chart(fan: QuantumFan, cone_id: int, I_tilde=None, J=None) -> ChartPresentation:
    return ChartPresentation(fan, cone_id, I_tilde, J)


def all_basis_subfamilies(fan: QuantumFan, cone_id: int) -> List[Tuple[int, ...]]:
    I = sorted(fan.indices(cone_id))
    k = fan.dim(cone_id)
    return [s for s in combinations(I, k) if rank(fan.cal.submatrix(list(s))) == k] if k else [()]


def verify_choice_independence(c1: ChartPresentation, c2: ChartPresentation) -> bool:
    """phi(e) - phi'(P_chi'^{-1} P_chi e) lies in span(ker) for every basis vector e."""
    if c1.fan is not c2.fan or c1.cone_id != c2.cone_id:
        raise ValueError("charts present different cones")
    if c1.J != c2.J:
        raise ValueError("charts use different completions; compare with completion_change")
    transfer = _compose_perm(_inverse_perm(c2.chi), c1.chi)
    for e in range(c1.cal.N):
        diff = vec_sub(c1.phi.col(e), c2.phi.col(transfer[e]))
        if not c1.in_kernel_span(diff):
            return False
        if any(c1.hbar @ diff):
            return False
    return True


# --------------------------------------------------------------------------
# presented tori
# --------------------------------------------------------------------------

@dataclass
class PresentedTorusRec:
    base: CalibrationRec
    phi_cal: Matrix
    virtual_image: FrozenSet[int]
    L: Matrix
    H: list
    s: Dict[int, int]

    def to_json(self, fmt) -> dict:
        return {
            "L": [[fmt(x) for x in r] for r in self.L.rows],
            "H": self.H,
            "virtual_image": sorted(self.virtual_image),
            "s": {str(k): v for k, v in sorted(self.s.items())},
        }


def check_presented_torus(rec: PresentedTorusRec) -> None:
    """Raise DiagramFailure naming the first identity that does not hold."""
    cal = rec.base
    N = cal.N
    if abs(int_det(rec.H)) != 1:
        raise DiagramFailure("H unimodular", "det(H) is not +-1")
    if rank(rec.L) != cal.d:
        raise DiagramFailure("L epimorphism", "L does not have rank d")
    H = Matrix(rec.H)
    if rec.L @ rec.phi_cal != cal.matrix @ H:
        raise DiagramFailure("L.phi = h.H", "the square does not commute")
    if set(rec.s) != set(rec.virtual_image) or set(rec.s.values()) != set(cal.virtual):
        raise DiagramFailure("s bijection", "s is not a bijection between the virtual sets")
    for i in range(N):
        col = [rec.H[r][i] for r in range(N)]
        if i in rec.virtual_image:
            if col != [1 if r == rec.s[i] else 0 for r in range(N)]:
                raise DiagramFailure("H(e_i) = e_s(i)", f"column {i}")
        elif any(col[r] for r in cal.virtual):
            raise DiagramFailure("H non-virtual", f"column {i} meets a virtual index")


def torus_presentation(chart: ChartPresentation) -> PresentedTorusRec:
    """The presented torus (h, phi, I', hbar, P_chi, s) of a chart, verified."""
    cal = chart.cal
    inv = _inverse_perm(chart.chi)
    virtual_image = frozenset(inv[i] for i in cal.virtual)
    s = {i: chart.chi[i] for i in sorted(virtual_image)}
    rec = PresentedTorusRec(cal, chart.phi, virtual_image, chart.hbar, [list(r) for r in chart.P_int], s)
    check_presented_torus(rec)
    return rec


# --------------------------------------------------------------------------
# face restriction
# --------------------------------------------------------------------------

@dataclass
class FaceRestriction:
    sigma: int
    tau: int
    additive: Tuple[int, ...]
    multiplicative: Tuple[int, ...]
    F: Matrix  # C^{I' u J_tau} -> C^{I u J_sigma}
    source_coords: Tuple[int, ...]
    target_coords: Tuple[int, ...]

    def to_json(self, fmt) -> dict:
        return {
            "sigma": self.sigma, "tau": self.tau,
            "additive": list(self.additive), "multiplicative": list(self.multiplicative),
            "source_coordinates": list(self.source_coords),
            "target_coordinates": list(self.target_coords),
            "F": [[fmt(x) for x in r] for r in self.F.rows],
        }


def face_restriction(chart_sigma: ChartPresentation, chart_tau: ChartPresentation) -> FaceRestriction:
    """The tau chart as the region C^{I'} x T^{I - I'} x T^J of the sigma chart."""
    fan = chart_sigma.fan
    Ip = set(chart_tau.I)
    sigma_geo = fan.cone(chart_sigma.cone_id)
    tau_geo = fan.cone(chart_tau.cone_id)
    if not Ip <= set(chart_sigma.I) or not is_face_of(tau_geo, sigma_geo):
        raise NotAFace(f"cone {chart_tau.cone_id} is not a face of cone {chart_sigma.cone_id}")
    cols = []
    for lab in chart_tau.rows:
        if lab in Ip:
            cols.append(tuple(Scalar(1 if r == lab else 0) for r in chart_sigma.rows))
        else:
            cols.append(chart_sigma.embed(chart_sigma.psi_coordinates(fan.cal.column(lab))))
    F = Matrix.from_columns(cols, len(chart_sigma.rows))
    if chart_sigma.hbar @ F != chart_tau.hbar:
        raise DiagramFailure("hbar_sigma F = hbar_tau")
    additive = tuple(sorted(Ip))
    multiplicative = tuple(sorted((set(chart_sigma.I) - Ip) | set(chart_sigma.J)))
    return FaceRestriction(chart_sigma.cone_id, chart_tau.cone_id, additive, multiplicative, F,
                           chart_tau.rows, chart_sigma.rows)


# --------------------------------------------------------------------------
# gluing
# --------------------------------------------------------------------------

@dataclass
class TransitionRec:
    source: int
    target: int
    open_source: dict
    open_target: dict
    map_linear: Matrix   # C^{I u J_src} -> C^{I u J_tgt}
    map_reduced: Matrix  # psi_tgt^{-1} psi_src on C^d
    map_int: list        # P_tgt^{-1} P_src on Z^N

    def to_json(self, fmt) -> dict:
        return {
            "from": self.source, "to": self.target,
            "open_from": self.open_source, "open_to": self.open_target,
            "map_linear": [[fmt(x) for x in r] for r in self.map_linear.rows],
            "map_reduced": [[fmt(x) for x in r] for r in self.map_reduced.rows],
            "map_int": self.map_int,
        }


def _transition(a: ChartPresentation, b: ChartPresentation, common: FrozenSet[int]) -> TransitionRec:
    lin = b.embed_matrix(b.psi_inv @ a.hbar)
    red = b.psi_inv @ a.psi
    pint = int_matmul(int_permutation(_inverse_perm(b.chi)), a.P_int)
    open_a = {"additive": sorted(common),
              "multiplicative": sorted((set(a.I) - common) | set(a.J))}
    open_b = {"additive": sorted(common),
              "multiplicative": sorted((set(b.I) - common) | set(b.J))}
    return TransitionRec(a.cone_id, b.cone_id, open_a, open_b, lin, red, pint)


def common_face(fan: QuantumFan, sigma: int, tau: int) -> FrozenSet[int]:
    """Indices of I_sigma n I_tau lying on the intersection of the two cones."""
    meet = intersect(fan.cone(sigma), fan.cone(tau))
    shared = fan.indices(sigma) & fan.indices(tau)
    return frozenset(i for i in shared if meet.contains(fan.cal.column(i)))


def gluing(chart_sigma: ChartPresentation, chart_tau: ChartPresentation):
    """Forward and backward transition records between two charts of one fan.

    The intersection of two cones of a fan always contains {0}, so the
    overlap region is never empty; with only {0} in common every coordinate
    of both charts is multiplicative.
    """
    if chart_sigma.fan is not chart_tau.fan:
        raise ValueError("charts belong to different fans")
    fan = chart_sigma.fan
    common = common_face(fan, chart_sigma.cone_id, chart_tau.cone_id)
    fwd = _transition(chart_sigma, chart_tau, common)
    bwd = _transition(chart_tau, chart_sigma, common)
    fwd.k_sets = _k_sets(chart_sigma, chart_tau)
    bwd.k_sets = _k_sets(chart_tau, chart_sigma)
    return fwd, bwd


def _k_sets(a: ChartPresentation, b: ChartPresentation) -> dict:
    union = set(a.I) | set(b.I)
    return {"K_I": sorted(union - set(a.I)), "K_J": sorted(union - set(b.I))}


def verify_round_trip(chart_sigma: ChartPresentation, chart_tau: ChartPresentation) -> bool:
    """Backward after forward is the identity (exactly on C^d and Z^N, mod ker on C^{I u J})."""
    fwd, bwd = gluing(chart_sigma, chart_tau)
    d, N = chart_sigma.cal.d, chart_sigma.cal.N
    if bwd.map_reduced @ fwd.map_reduced != Matrix.identity(d):
        return False
    if int_matmul(bwd.map_int, fwd.map_int) != [[int(i == j) for j in range(N)] for i in range(N)]:
        return False
    back = bwd.map_linear @ fwd.map_linear
    n = len(chart_sigma.rows)
    for e in range(n):
        x = tuple(Scalar(1 if r == e else 0) for r in range(n))
        if not chart_sigma.in_kernel_span(vec_sub(back @ x, x)):
            return False
    # the lattice parts intertwine the two calibrations
    if fwd.map_linear @ chart_sigma.phi != chart_tau.phi @ Matrix(fwd.map_int):
        return False
    return True


def verify_cocycle(charts: Sequence[ChartPresentation]) -> bool:
    """g_{tau rho} g_{sigma tau} = g_{sigma rho} for a triple of charts, exactly."""
    a, b, c = charts
    ab, _ = gluing(a, b)
    bc, _ = gluing(b, c)
    ac, _ = gluing(a, c)
    if bc.map_linear @ ab.map_linear != ac.map_linear:
        return False
    if bc.map_reduced @ ab.map_reduced != ac.map_reduced:
        return False
    return int_matmul(bc.map_int, ab.map_int) == ac.map_int


def completion_change(chart: ChartPresentation, other: ChartPresentation) -> Matrix:
    """id + P_chi' P_chi^{-1}: C^{I u J} -> C^{I u J'} for two completions of one cone."""
    if chart.fan is not other.fan or chart.cone_id != other.cone_id or chart.I_tilde != other.I_tilde:
        raise ValueError("completion change needs the same cone and basis subfamily")
    relabel = _compose_perm(other.chi, _inverse_perm(chart.chi))
    I = set(chart.I)
    cols = []
    for lab in chart.rows:
        target = lab if lab in I else relabel[lab]
        cols.append(tuple(Scalar(1 if r == target else 0) for r in other.rows))
    m = Matrix.from_columns(cols, len(other.rows))
    for v in chart.ker_basis:
        if not other.in_kernel_span(m @ v):
            raise DiagramFailure("completion change preserves the kernel")
    return m


def verify_completion_cocycle(c1: ChartPresentation, c2: ChartPresentation, c3: ChartPresentation) -> bool:
    return completion_change(c2, c3) @ completion_change(c1, c2) == completion_change(c1, c3)


# --------------------------------------------------------------------------
# atlas-level data
# --------------------------------------------------------------------------

@dataclass
class BundleTransition:
    pair: Tuple[int, int]
    K: Tuple[int, ...]          # positions p >= d with chi_tau(p) in I u J_sigma
    exponents: list             # (N - d) x |I u J_sigma| selection matrix
    verified: bool

    def to_json(self) -> dict:
        return {"pair": list(self.pair), "K": list(self.K), "exponents": self.exponents,
                "verified": self.verified}


def bundle_transition(sig: ChartPresentation, tau: ChartPresentation) -> BundleTransition:
    cal = sig.cal
    d, N = cal.d, cal.N
    src = set(sig.rows)
    K = tuple(p for p in range(d, N) if tau.chi[p] in src)
    T = [[0] * len(sig.rows) for _ in range(N - d)]
    for p in K:
        T[p - d][sig.rows.index(tau.chi[p])] = 1
    # restriction onto labels of sigma that are basis labels of tau
    basis_tau = set(tau.chi[:d])
    R = [[0] * len(sig.rows) for _ in tau.rows]
    for j, lab in enumerate(sig.rows):
        if lab in basis_tau:
            R[tau.rows.index(lab)][j] = 1
    phi_tail = tau.phi.submatrix(None, range(d, N)) if N > d else Matrix([[] for _ in tau.rows], 0)
    lhs = Matrix(R) + (phi_tail @ Matrix(T, len(sig.rows)) if N > d else Matrix.zeros(len(tau.rows), len(sig.rows)))
    verified = tau.hbar @ lhs == sig.hbar
    return BundleTransition((sig.cone_id, tau.cone_id), K, T, verified)


def bundle_transitions(fan: QuantumFan, charts: Optional[Dict[int, ChartPresentation]] = None) -> List[BundleTransition]:
    """Transition exponent data for every pair of maximal cones."""
    maxi = fan.maximal_cones()
    charts = charts or {}
    get = lambda i: charts.get(i) or ChartPresentation(fan, i)
    out = []
    for s, t in combinations(maxi, 2):
        out.append(bundle_transition(get(s), get(t)))
    return out


@dataclass
class NonCalChartRec:
    cone: int
    lattice_generators: list   # phi(c) for c in a complement of ker(phi) in Z^N
    kernel_part: list
    band_rank: int

    def to_json(self, fmt) -> dict:
        return {
            "cone": self.cone, "band_rank": self.band_rank,
            "lattice_generators": [[fmt(x) for x in v] for v in self.lattice_generators],
            "kernel_part": [[fmt(x) for x in v] for v in self.kernel_part],
        }


def forget_calibration(chart: ChartPresentation) -> NonCalChartRec:
    """Generators of hbar^{-1}(Gamma) modulo the ineffective lattice ker(phi)."""
    N = chart.cal.N
    xi = chart.xi
    inv = _inverse_perm(chart.chi)
    # ker(phi) = P_chi^{-1} Xi
    xi_chi = [[b[chart.chi[p]] for p in range(N)] for b in xi.basis]
    if xi_chi:
        _, _, v = snf(xi_chi, N)
        # rows of v^{-1} form a basis of Z^N whose first rk(Xi) rows span ker(phi)
        vinv = Matrix(v).inverse().to_int()
        complement = vinv[len(xi_chi):]
    else:
        complement = [[int(i == j) for j in range(N)] for i in range(N)]
    gens = [chart.phi @ c for c in complement]
    return NonCalChartRec(chart.cone_id, gens, list(chart.ker_basis), xi.rank)
