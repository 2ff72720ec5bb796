"""Dense exact linear algebra over Scalar and integer lattice normal forms.

Scalar matrices are immutable :class:`Matrix` values.  Integer matrices are
plain lists of lists of Python ints; the lattice routines (:func:`hnf`,
:func:`snf`, :func:`int_kernel`, :func:`int_solve`) work on those.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, List, Optional, Sequence

from .errors import DivisionByZero, Inconsistent
from .scalar import Scalar, as_scalar, poly_divexact, poly_mul

Vector = tuple


def vec(values: Iterable) -> Vector:
    return tuple(as_scalar(v) for v in values)


def dot(u: Sequence, v: Sequence) -> Scalar:
    total = Scalar(0)
    for a, b in zip(u, v):
        if a and b:
            total = total + a * b
    return total


def vec_add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(c, v):
    c = as_scalar(c)
    return tuple(c * x for x in v)


def is_zero_vec(v) -> bool:
    return all(not x for x in v)


class Matrix:
    """An immutable rows x cols matrix of Scalars."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: Optional[int] = None):
        data = tuple(tuple(as_scalar(x) for x in r) for r in rows)
        self.rows = data
        self.nrows = len(data)
        if data:
            widths = {len(r) for r in data}
            if len(widths) != 1:
                raise ValueError("ragged matrix")
            self.ncols = widths.pop()
        else:
            self.ncols = ncols or 0

    # -- construction ------------------------------------------------------

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: Optional[int] = None) -> "Matrix":
        columns = list(columns)
        if not columns:
            return cls([() for _ in range(nrows or 0)], 0) if nrows else cls([], 0)
        n = len(columns[0])
        return cls([[c[i] for c in columns] for i in range(n)])

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, r: int, c: int) -> "Matrix":
        return cls([[0] * c for _ in range(r)], c)

    @classmethod
    def permutation(cls, images: Sequence[int]) -> "Matrix":
        """P with P e_i = e_{images[i]}."""
        n = len(images)
        rows = [[0] * n for _ in range(n)]
        for i, j in enumerate(images):
            rows[j][i] = 1
        return cls(rows, n)

    # -- access ------------------------------------------------------------

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def row(self, i) -> Vector:
        return self.rows[i]

    def col(self, j) -> Vector:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> List[Vector]:
        return [self.col(j) for j in range(self.ncols)]

    @property
    def T(self) -> "Matrix":
        return Matrix([self.col(j) for j in range(self.ncols)], self.nrows)

    def submatrix(self, rows: Optional[Sequence[int]] = None, cols: Optional[Sequence[int]] = None) -> "Matrix":
        rows = range(self.nrows) if rows is None else rows
        cols = range(self.ncols) if cols is None else list(cols)
        return Matrix([[self.rows[i][j] for j in cols] for i in rows], len(cols))

    def hstack(self, other: "Matrix") -> "Matrix":
        return Matrix([a + b for a, b in zip(self.rows, other.rows)], self.ncols + other.ncols)

    def vstack(self, other: "Matrix") -> "Matrix":
        return Matrix(self.rows + other.rows, self.ncols)

    def to_lists(self) -> list:
        return [list(r) for r in self.rows]

    def is_integer(self) -> bool:
        return all(x.is_integer() for r in self.rows for x in r)

    def is_rational(self) -> bool:
        return all(x.is_rational() for r in self.rows for x in r)

    def to_int(self) -> list:
        if not self.is_integer():
            raise ValueError("matrix has non-integer entries")
        return [[int(x.as_fraction()) for x in r] for r in self.rows]

    # -- arithmetic --------------------------------------------------------

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = other.columns()
            return Matrix([[dot(r, c) for c in cols] for r in self.rows], other.ncols)
        v = tuple(as_scalar(x) for x in other)
        if len(v) != self.ncols:
            raise ValueError(f"shape mismatch {self.shape} @ vector of length {len(v)}")
        return tuple(dot(r, v) for r in self.rows)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch in addition")
        return Matrix([vec_add(a, b) for a, b in zip(self.rows, other.rows)], self.ncols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch in subtraction")
        return Matrix([vec_sub(a, b) for a, b in zip(self.rows, other.rows)], self.ncols)

    def __neg__(self):
        return Matrix([[-x for x in r] for r in self.rows], self.ncols)

    def scale(self, c) -> "Matrix":
        return Matrix([vec_scale(c, r) for r in self.rows], self.ncols)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb))

    def __hash__(self):
        return hash((self.shape, self.rows))

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in r) for r in self.rows)
        return f"Matrix[{body}]"

    # -- linear algebra ----------------------------------------------------

    def rref(self):
        """Reduced row echelon form and the pivot columns."""
        return rref(self)

    def rank(self) -> int:
        return rank(self)

    def kernel_basis(self) -> List[Vector]:
        return kernel_basis(self)

    def solve(self, b) -> Vector:
        return solve(self, b)

    def inverse(self) -> "Matrix":
        return inverse(self)

    def is_zero(self) -> bool:
        return all(not x for r in self.rows for x in r)


# --------------------------------------------------------------------------
# Elimination over Q(alpha)
# --------------------------------------------------------------------------

def _bareiss(rows: List[list], ncols: int):
    """Fraction-free forward elimination in place; returns pivot columns."""
    nrows = len(rows)
    pivots = []
    prev = Scalar(1)
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c]), None)
        if p is None:
            continue
        if p != r:
            rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        for i in range(r + 1, nrows):
            f = rows[i][c]
            row_i = rows[i]
            row_r = rows[r]
            for j in range(c + 1, ncols):
                val = piv * row_i[j] - f * row_r[j] if f else piv * row_i[j]
                row_i[j] = val / prev if prev != 1 else val
            row_i[c] = Scalar(0)
        prev = piv
        pivots.append(c)
        r += 1
    return pivots


def rref(m: Matrix):
    rows = [list(r) for r in m.rows]
    pivots = _bareiss(rows, m.ncols)
    k = len(pivots)
    rows = rows[:k]
    # normalize pivots to 1 and clear upward, last pivot first
    for r in range(k - 1, -1, -1):
        c = pivots[r]
        p = rows[r][c]
        if p != 1:
            rows[r] = [x / p if x else x for x in rows[r]]
        for i in range(r):
            f = rows[i][c]
            if f:
                rows[i] = [a - f * b if b else a for a, b in zip(rows[i], rows[r])]
    return Matrix(rows, m.ncols) if rows else Matrix([], m.ncols), pivots


def rank(m: Matrix) -> int:
    rows = [list(r) for r in m.rows]
    return len(_bareiss(rows, m.ncols))


def kernel_basis(m: Matrix) -> List[Vector]:
    """Right null space; one vector per free column, equal to 1 there."""
    red, pivots = rref(m)
    free = [j for j in range(m.ncols) if j not in pivots]
    basis = []
    zero, one = Scalar(0), Scalar(1)
    for f in free:
        x = [zero] * m.ncols
        x[f] = one
        for r, c in enumerate(pivots):
            x[c] = -red[r, f]
        basis.append(tuple(x))
    return basis


def left_kernel_basis(m: Matrix) -> List[Vector]:
    return kernel_basis(m.T)


def solve(m: Matrix, b: Sequence) -> Vector:
    """Some x with m x = b; the unique one when m has full column rank."""
    b = vec(b)
    if len(b) != m.nrows:
        raise ValueError("right-hand side has the wrong length")
    aug = m.hstack(Matrix([[x] for x in b], 1)) if m.nrows else Matrix([], m.ncols + 1)
    red, pivots = rref(aug)
    if pivots and pivots[-1] == m.ncols:
        raise Inconsistent("right-hand side is not in the column span")
    x = [Scalar(0)] * m.ncols
    for r, c in enumerate(pivots):
        x[c] = red[r, m.ncols]
    return tuple(x)


def inverse(m: Matrix) -> Matrix:
    if m.nrows != m.ncols:
        raise ValueError("only square matrices are invertible")
    n = m.nrows
    red, pivots = rref(m.hstack(Matrix.identity(n)))
    if pivots[:n] != list(range(n)) or len(pivots) < n or any(p >= n for p in pivots[:n]):
        raise DivisionByZero("matrix is singular")
    return red.submatrix(range(n), range(n, 2 * n))


def span_basis_indices(vectors: Sequence[Sequence]) -> List[int]:
    """Indices of the lexicographically first maximal independent subfamily."""
    chosen: List[int] = []
    current = 0
    for i, v in enumerate(vectors):
        trial = [vectors[j] for j in chosen] + [v]
        r = rank(Matrix(trial))
        if r > current:
            chosen.append(i)
            current = r
    return chosen


# --------------------------------------------------------------------------
# Integer matrices
# --------------------------------------------------------------------------

def _ident(n: int) -> list:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _shape(m: Sequence[Sequence[int]], ncols: Optional[int] = None):
    r = len(m)
    c = len(m[0]) if r else (ncols or 0)
    return r, c


def int_matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> list:
    bt = list(zip(*b)) if b else []
    if not bt:
        return [[] for _ in a]
    return [[sum(x * y for x, y in zip(r, c)) for c in bt] for r in a]


def int_matvec(a: Sequence[Sequence[int]], v: Sequence[int]) -> list:
    return [sum(x * y for x, y in zip(r, v)) for r in a]


def int_det(m: Sequence[Sequence[int]]) -> int:
    """Determinant by fraction-free elimination."""
    n = len(m)
    a = [list(r) for r in m]
    sign, prev = 1, 1
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k]), None)
        if p is None:
            return 0
        if p != k:
            a[k], a[p] = a[p], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * (a[n - 1][n - 1] if n else 1)


def hnf(m: Sequence[Sequence[int]], ncols: Optional[int] = None):
    """Row-style Hermite normal form.

    Returns ``(h, u)`` with ``u`` unimodular and ``u m = h``.  Nonzero rows of
    ``h`` come first, pivots are positive and strictly move right, and the
    entries above each pivot lie in ``[0, pivot)``.
    """
    nrows, nc = _shape(m, ncols)
    h = [list(r) for r in m]
    u = _ident(nrows)
    r = 0
    for c in range(nc):
        if r == nrows:
            break
        # gather the gcd of column c (rows r..) into row r
        for i in range(r + 1, nrows):
            if h[i][c] == 0:
                continue
            a, b = h[r][c], h[i][c]
            g, x, y = _xgcd(a, b)
            p, q = a // g, b // g
            # [[x, y], [-q, p]] has determinant 1
            h[r], h[i] = ([x * s + y * t for s, t in zip(h[r], h[i])],
                          [-q * s + p * t for s, t in zip(h[r], h[i])])
            u[r], u[i] = ([x * s + y * t for s, t in zip(u[r], u[i])],
                          [-q * s + p * t for s, t in zip(u[r], u[i])])
        piv = h[r][c]
        if piv == 0:
            continue
        if piv < 0:
            h[r] = [-x for x in h[r]]
            u[r] = [-x for x in u[r]]
            piv = -piv
        for i in range(r):
            f = h[i][c] // piv
            if f:
                h[i] = [s - f * t for s, t in zip(h[i], h[r])]
                u[i] = [s - f * t for s, t in zip(u[i], u[r])]
        r += 1
    return h, u


def _xgcd(a: int, b: int):
    """(g, x, y) with g = gcd(a, b) > 0 and a x + b y = g."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a - (a // b) * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def snf(m: Sequence[Sequence[int]], ncols: Optional[int] = None):
    """Smith normal form ``(d, u, v)`` with ``u m v = d``.

    The diagonal of ``d`` is nonnegative and forms a divisibility chain.
    """
    nrows, nc = _shape(m, ncols)
    a = [list(r) for r in m]
    u = _ident(nrows)
    v = _ident(nc)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(nrows, nc):
        nz = [(abs(a[i][j]), i, j) for i in range(t, nrows) for j in range(t, nc) if a[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            changed = False
            for i in range(t + 1, nrows):
                if a[i][t] and a[i][t] % a[t][t] == 0:
                    f = a[i][t] // a[t][t]
                    a[i] = [w - f * s for s, w in zip(a[t], a[i])]
                    u[i] = [w - f * s for s, w in zip(u[t], u[i])]
                elif a[i][t]:
                    g, x, y = _xgcd(a[t][t], a[i][t])
                    p, q = a[t][t] // g, a[i][t] // g
                    a[t], a[i] = ([x * s + y * w for s, w in zip(a[t], a[i])],
                                  [-q * s + p * w for s, w in zip(a[t], a[i])])
                    u[t], u[i] = ([x * s + y * w for s, w in zip(u[t], u[i])],
                                  [-q * s + p * w for s, w in zip(u[t], u[i])])
                    changed = True
            for j in range(t + 1, nc):
                if a[t][j] and a[t][j] % a[t][t] == 0:
                    f = a[t][j] // a[t][t]
                    for M in (a, v):
                        for row in M:
                            row[j] -= f * row[t]
                elif a[t][j]:
                    g, x, y = _xgcd(a[t][t], a[t][j])
                    p, q = a[t][t] // g, a[t][j] // g
                    for M in (a, v):
                        for row in M:
                            s, w = row[t], row[j]
                            row[t], row[j] = x * s + y * w, -q * s + p * w
                    changed = True
            if not changed:
                break
        # divisibility: fold any entry not divisible by the pivot into row t
        piv = a[t][t]
        bad = next(((i, j) for i in range(t + 1, nrows) for j in range(t + 1, nc)
                    if a[i][j] % piv), None)
        if bad is not None:
            i = bad[0]
            a[t] = [s + w for s, w in zip(a[t], a[i])]
            u[t] = [s + w for s, w in zip(u[t], u[i])]
            continue
        if piv < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return a, u, v


def invariant_factors(m: Sequence[Sequence[int]], ncols: Optional[int] = None) -> List[int]:
    d, _, _ = snf(m, ncols)
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0)) if d[i][i]]


def int_kernel(m: Sequence[Sequence[int]], ncols: Optional[int] = None) -> List[list]:
    """Z-basis of {x in Z^cols : m x = 0}, in Hermite normal form."""
    nrows, nc = _shape(m, ncols)
    if nc == 0:
        return []
    mt = [[m[i][j] for i in range(nrows)] for j in range(nc)]
    h, u = hnf(mt, nrows)
    basis = [u[i] for i in range(nc) if not any(h[i])]
    if not basis:
        return []
    red, _ = hnf(basis, nc)
    return [r for r in red if any(r)]


def int_solve(m: Sequence[Sequence[int]], b: Sequence[int], ncols: Optional[int] = None) -> list:
    """Some integer x with m x = b; raises Inconsistent if none exists."""
    nrows, nc = _shape(m, ncols)
    if nrows == 0:
        return [0] * nc
    d, u, v = snf(m, nc)
    ub = int_matvec(u, b)
    y = [0] * nc
    for i in range(nrows):
        di = d[i][i] if i < nc else 0
        if di == 0:
            if ub[i]:
                raise Inconsistent("no solution, even over the rationals")
            continue
        if ub[i] % di:
            raise Inconsistent("no integer solution")
        y[i] = ub[i] // di
    return int_matvec(v, y)


# --------------------------------------------------------------------------
# Splitting Scalar systems into rational ones
# --------------------------------------------------------------------------

def _clear_row(row: Sequence[Scalar]) -> List[dict]:
    """Polynomials p_j with row_j = p_j / D for one common denominator D."""
    dens = []
    for x in row:
        if x and x.den not in dens:
            dens.append(x.den)
    common = {(): Fraction(1)}
    for d in dens:
        common = poly_mul(common, d)
    out = []
    for x in row:
        if not x:
            out.append({})
            continue
        out.append(poly_mul(x.num, poly_divexact(common, x.den)))
    return out


def monomial_split(m: Matrix) -> List[list]:
    """Rational matrix R with (m x = 0 iff R x = 0) for rational vectors x.

    Each row of m is brought to a common denominator and then split into
    one rational row per monomial in the symbols; independence of the
    symbols makes the split exact.
    """
    out = []
    for row in m.rows:
        polys = _clear_row(row)
        monos = sorted({mono for p in polys for mono in p})
        for mono in monos:
            out.append([p.get(mono, Fraction(0)) for p in polys])
    return out


def integerize_rows(rows: Sequence[Sequence[Fraction]]) -> List[list]:
    """Scale each rational row to a primitive-content integer row."""
    out = []
    for r in rows:
        den = lcm(*(Fraction(x).denominator for x in r)) if r else 1
        ints = [int(Fraction(x) * den) for x in r]
        g = 0
        for x in ints:
            g = gcd(g, x)
        if g:
            out.append([x // g for x in ints])
    return out


def scalar_int_kernel(m: Matrix) -> List[list]:
    """Integer kernel of a Scalar matrix, in Hermite normal form."""
    rows = integerize_rows(monomial_split(m))
    if not rows:
        return [list(r) for r in _ident(m.ncols)]
    return int_kernel(rows, m.ncols)


def scalar_int_solve(m: Matrix, b: Sequence) -> list:
    """Some integer x with m x = b over Q(alpha); raises Inconsistent."""
    aug = m.hstack(Matrix([[x] for x in vec(b)], 1))
    rows = integerize_rows(monomial_split(aug))
    if not rows:
        return [0] * m.ncols
    a = [r[:-1] for r in rows]
    rhs = [r[-1] for r in rows]
    return int_solve(a, rhs, m.ncols)
