"""Calibrations h: Z^N -> Gamma in R^d and the ineffectivity lattice ker(h)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Optional, Sequence

from .errors import Inconsistent
from .linalg import Matrix, Vector, rank, scalar_int_kernel, scalar_int_solve, vec
from .scalar import IrrationalBasis


@dataclass(frozen=True)
class XiLattice:
    """Integer relations among the generators, as an HNF basis."""

    basis: tuple
    rank: int


class CalibrationRec:
    """The map h: Z^N -> R^d given by its columns, plus the virtual index set.

    Indices are 0-based throughout.  The group Gamma is the Z-span of the
    columns.  Construction does not enforce the spanning condition on the
    non-virtual columns; call :meth:`validate_virtual_span`.
    """

    def __init__(self, columns: Sequence[Sequence], virtual: Iterable[int] = (),
                 basis: Optional[IrrationalBasis] = None, d: Optional[int] = None):
        cols = [vec(c) for c in columns]
        if d is None:
            if not cols:
                raise ValueError("a calibration without columns needs d")
            d = len(cols[0])
        if any(len(c) != d for c in cols):
            raise ValueError("every column must have length d")
        self.d = d
        self.N = len(cols)
        self.columns = tuple(cols)
        self.matrix = Matrix.from_columns(cols) if cols else Matrix([[]] * d if d else [], 0)
        self.virtual = frozenset(virtual)
        if any(not 0 <= i < self.N for i in self.virtual):
            raise ValueError("virtual index out of range")
        self.basis = basis
        self._xi = None

    def __repr__(self):
        return f"CalibrationRec(d={self.d}, N={self.N}, virtual={sorted(self.virtual)})"

    def column(self, i: int) -> Vector:
        return self.columns[i]

    def submatrix(self, indices: Sequence[int]) -> Matrix:
        """d x |indices| matrix of the chosen columns, in the given order."""
        return Matrix.from_columns([self.columns[i] for i in indices], self.d) if indices \
            else Matrix([[] for _ in range(self.d)], 0)

    @property
    def non_virtual(self) -> List[int]:
        return [i for i in range(self.N) if i not in self.virtual]

    def is_standard(self) -> bool:
        """First d columns are e_1..e_d and the virtual set is a terminal segment."""
        if self.N < self.d:
            return False
        for i in range(self.d):
            for r in range(self.d):
                if self.columns[i][r] != (1 if r == i else 0):
                    return False
        k = len(self.virtual)
        return self.virtual == frozenset(range(self.N - k, self.N))

    def validate_virtual_span(self) -> bool:
        """The non-virtual columns span R^d."""
        nv = self.non_virtual
        if not nv:
            return self.d == 0
        return rank(self.submatrix(nv)) == self.d

    def xi_lattice(self) -> XiLattice:
        if self._xi is None:
            if self.N == 0:
                basis = ()
            else:
                basis = tuple(tuple(r) for r in scalar_int_kernel(self.matrix))
            self._xi = XiLattice(basis, len(basis))
        return self._xi

    def gamma_preimage(self, v: Sequence) -> Optional[list]:
        """Integer m with h(m) = v, or None when v is not in Gamma."""
        try:
            return scalar_int_solve(self.matrix, v)
        except Inconsistent:
            return None

    def gamma_contains(self, v: Sequence) -> bool:
        return self.gamma_preimage(v) is not None
