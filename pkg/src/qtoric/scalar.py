"""Exact arithmetic in Q(a_1, ..., a_m) for declared-independent real symbols.

A :class:`Scalar` is a quotient of two polynomials with rational
coefficients.  Fractions are never reduced by a polynomial gcd; equality is
decided by cross-multiplication, which is exact because the symbols are
declared algebraically independent.  The order of the field is recovered by
an interval oracle (:func:`sign`) that evaluates numerator and denominator on
rational enclosures of the symbols and refines them until zero is excluded.
"""

from __future__ import annotations

import contextlib
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from .errors import AmbiguousSign, DivisionByZero, Mismatch

START_BITS = 64
DEFAULT_MAX_BITS = 4096

Monomial = tuple  # exponent tuple, trailing zeros stripped
Poly = dict  # Monomial -> Fraction, no zero coefficients

Refiner = Callable[[int], tuple]

_config = {"max_bits": DEFAULT_MAX_BITS}


def get_max_bits() -> int:
    """Current default precision budget for :func:`sign`."""
    return _config["max_bits"]


def set_max_bits(bits: int) -> None:
    if bits < START_BITS:
        raise ValueError(f"max_bits must be at least {START_BITS}")
    _config["max_bits"] = int(bits)


@contextlib.contextmanager
def precision(bits: int):
    """Temporarily change the default precision budget."""
    old = get_max_bits()
    set_max_bits(bits)
    try:
        yield
    finally:
        _config["max_bits"] = old


# --------------------------------------------------------------------------
# Polynomials (plain dicts, treated as immutable once built)
# --------------------------------------------------------------------------

def _mono(exps: Iterable[int]) -> Monomial:
    exps = list(exps)
    while exps and exps[-1] == 0:
        exps.pop()
    return tuple(exps)


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, e in enumerate(b):
        out[i] += e
    return tuple(out)


def _mono_div(a: Monomial, b: Monomial) -> Optional[Monomial]:
    if len(b) > len(a):
        return None
    out = list(a)
    for i, e in enumerate(b):
        out[i] -= e
        if out[i] < 0:
            return None
    return _mono(out)


def _mono_key(m: Monomial):
    # graded lex; stripped tuples compare like zero-padded ones
    return (sum(m), m)


def poly_add(p: Poly, q: Poly, sign: int = 1) -> Poly:
    out = dict(p)
    for m, c in q.items():
        v = out.get(m, 0) + sign * c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def poly_mul(p: Poly, q: Poly) -> Poly:
    if len(p) == 1 and () in p:
        c = p[()]
        return {m: c * v for m, v in q.items()} if c else {}
    if len(q) == 1 and () in q:
        return poly_mul(q, p)
    out: Poly = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = _mono_mul(m1, m2)
            v = out.get(m, 0) + c1 * c2
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def poly_scale(p: Poly, c) -> Poly:
    if not c:
        return {}
    return {m: v * c for m, v in p.items()}


def leading(p: Poly) -> Monomial:
    return max(p, key=_mono_key)


def poly_divexact(p: Poly, q: Poly) -> Optional[Poly]:
    """Return p / q when q divides p exactly, else None."""
    if not q:
        raise DivisionByZero("polynomial division by zero")
    lq = leading(q)
    cq = q[lq]
    rem = dict(p)
    quot: Poly = {}
    while rem:
        lr = leading(rem)
        m = _mono_div(lr, lq)
        if m is None:
            return None
        c = rem[lr] / cq
        quot[m] = quot.get(m, 0) + c
        rem = poly_add(rem, poly_mul({m: c}, q), -1)
    return quot


def _common_monomial(p: Poly, q: Poly) -> Monomial:
    monos = list(p) + list(q)
    width = min(len(m) for m in monos)
    return _mono(min(m[i] for m in monos) for i in range(width))


def poly_degree(p: Poly) -> int:
    return max((sum(m) for m in p), default=0)


# --------------------------------------------------------------------------
# Symbols and enclosures
# --------------------------------------------------------------------------

def _round_down(x: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction(math.floor(x * scale), scale)


def _round_up(x: Fraction, bits: int) -> Fraction:
    scale = 1 << bits
    return Fraction(math.ceil(x * scale), scale)


def parse_rational(text: Union[str, int, Fraction]) -> Fraction:
    """Parse "p/q", an integer, or a finite decimal string exactly."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    return Fraction(str(text).strip())


def digits_refiner(digits: str) -> Refiner:
    """Refiner backed by a decimal expansion such as ``"1.41421356..."``.

    The expansion is taken to be correct in every printed digit, so with n
    fractional digits the value lies within 10**-n of the truncation.  Once
    the digits run out the best available interval is returned again.
    """
    text = digits.strip().rstrip(".").replace("...", "")
    negative = text.startswith("-")
    text = text.lstrip("+-")
    whole, _, frac = text.partition(".")
    if not (whole or frac) or not (whole + frac).isdigit():
        raise ValueError(f"bad digit string {digits!r}")

    def refine(bits: int) -> tuple:
        need = math.ceil(bits * math.log10(2)) + 1
        n = min(need, len(frac))
        mid = Fraction(int(whole or "0") * 10**n + int(frac[:n] or "0"), 10**n)
        eps = Fraction(1, 10**n)
        if negative:
            mid = -mid
        return (mid - eps, mid + eps)

    return refine


def sqrt_refiner(q: Union[int, Fraction, str]) -> Refiner:
    """Exact dyadic enclosures of sqrt(q) from integer square roots."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("negative radicand")

    def refine(bits: int) -> tuple:
        scale = 1 << bits
        # floor(sqrt(q) * 2**bits) = isqrt(floor(q * 4**bits)) up to one unit
        lo = math.isqrt(math.floor(q * scale * scale))
        return (Fraction(lo, scale), Fraction(lo + 2, scale))

    return refine


class Symbol:
    """A named real number known through a rational enclosure.

    ``refiner(bits)`` (optional) returns a rational interval containing the
    value, of width about 2**-bits.  Refinements are intersected with
    everything seen so far, so enclosures only ever shrink.
    """

    def __init__(self, name: str, enclosure: Sequence, refiner: Optional[Refiner] = None,
                 digits: Optional[str] = None):
        lo, hi = (parse_rational(e) for e in enclosure)
        if not lo < hi:
            raise ValueError(f"enclosure of {name} must satisfy lower < upper")
        if refiner is None and digits is not None:
            refiner = digits_refiner(digits)
        self.name = name
        self.enclosure = (lo, hi)
        self.refiner = refiner
        self.digits = digits
        self._cache: dict = {}
        self._best = (lo, hi)
        self._lock = threading.Lock()

    def __repr__(self):
        return f"Symbol({self.name!r}, {self.enclosure[0]}..{self.enclosure[1]})"

    def enclosure_at(self, bits: int) -> tuple:
        hit = self._cache.get(bits)
        if hit is not None:
            return hit
        lo, hi = self._best
        if self.refiner is not None and hi - lo > Fraction(1, 1 << bits):
            rlo, rhi = (Fraction(x) for x in self.refiner(bits))
            nlo, nhi = max(lo, rlo), min(hi, rhi)
            if nlo > nhi:
                raise AmbiguousSign(f"refiner of {self.name} left its enclosure")
            lo, hi = nlo, nhi
        # outward dyadic rounding keeps endpoint sizes bounded
        out = (_round_down(lo, bits + 8), _round_up(hi, bits + 8))
        with self._lock:
            self._best = (lo, hi)
            self._cache = {**self._cache, bits: out}
        return out

    def midpoint(self) -> float:
        lo, hi = self.enclosure_at(START_BITS)
        return float((lo + hi) / 2)


class IrrationalBasis:
    """An ordered tuple of symbols declared algebraically independent over Q.

    Independence is a precondition, never checked.  If it is violated the
    sign oracle can only fail with :class:`AmbiguousSign`; it never returns
    a wrong sign.
    """

    independence_declared = True

    def __init__(self, symbols: Sequence[Symbol]):
        names = [s.name for s in symbols]
        if len(set(names)) != len(names):
            raise ValueError("symbol names must be unique")
        self.symbols = tuple(symbols)

    def __len__(self):
        return len(self.symbols)

    def __repr__(self):
        return f"IrrationalBasis({', '.join(s.name for s in self.symbols)})"

    @property
    def names(self) -> list:
        return [s.name for s in self.symbols]

    def gen(self, i: int) -> "Scalar":
        exps = [0] * (i + 1)
        exps[i] = 1
        return Scalar._make({_mono(exps): Fraction(1)}, {(): Fraction(1)}, self)

    def gens(self) -> tuple:
        return tuple(self.gen(i) for i in range(len(self.symbols)))

    def __getitem__(self, name: str) -> "Scalar":
        return self.gen(self.names.index(name))


# --------------------------------------------------------------------------
# Interval evaluation
# --------------------------------------------------------------------------

def _ipow(iv: tuple, e: int) -> tuple:
    lo, hi = iv
    if e == 1:
        return iv
    a, b = lo**e, hi**e
    if e % 2 == 0:
        if lo <= 0 <= hi:
            return (Fraction(0), max(a, b))
        return (min(a, b), max(a, b))
    return (a, b)


def _imul(x: tuple, y: tuple) -> tuple:
    ps = (x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1])
    return (min(ps), max(ps))


def _eval_interval(p: Poly, boxes: Sequence[tuple], bits: int) -> tuple:
    lo = hi = Fraction(0)
    for m, c in p.items():
        term = (c, c)
        for i, e in enumerate(m):
            if e:
                term = _imul(term, _ipow(boxes[i], e))
        lo += term[0]
        hi += term[1]
    return (_round_down(lo, 2 * bits), _round_up(hi, 2 * bits))


# --------------------------------------------------------------------------
# Scalars
# --------------------------------------------------------------------------

_ONE: Poly = {(): Fraction(1)}
# a fixed generic point for hashing; a/b = c/d implies equal values here
_HASH_POINT = tuple(Fraction(7919 + 104729 * i, 1009 + 13 * i) for i in range(64))


class Scalar:
    """An element of Q(a_1..a_m), stored as an unreduced fraction num/den.

    Canonical form: the denominator's leading coefficient (graded-lex) is 1,
    common monomial factors are removed, and the fraction is collapsed to a
    polynomial whenever the denominator divides the numerator exactly.
    """

    __slots__ = ("num", "den", "basis", "_q")

    def __init__(self, value: Union[int, Fraction, str] = 0, basis: Optional[IrrationalBasis] = None):
        q = parse_rational(value)
        self.num = {(): q} if q else {}
        self.den = _ONE
        self.basis = basis
        self._q = q

    @classmethod
    def _make(cls, num: Poly, den: Poly, basis) -> "Scalar":
        self = object.__new__(cls)
        self.num, self.den, self.basis = num, den, basis
        self._q = None
        if not num:
            self.num, self.den, self._q = {}, _ONE, Fraction(0)
        elif den is _ONE and len(num) == 1 and () in num:
            self._q = num[()]
        return self

    @classmethod
    def _rational(cls, q: Fraction, basis=None) -> "Scalar":
        self = object.__new__(cls)
        self.num = {(): q} if q else {}
        self.den = _ONE
        self.basis = basis
        self._q = q
        return self

    @classmethod
    def fraction(cls, num: Poly, den: Poly = None, basis=None) -> "Scalar":
        """Build num/den from coefficient dicts and bring it to canonical form."""
        num = {_mono(m): Fraction(c) for m, c in num.items() if c}
        den = _ONE if den is None else {_mono(m): Fraction(c) for m, c in den.items() if c}
        return cls._normalize(num, den, basis)

    @classmethod
    def _normalize(cls, num: Poly, den: Poly, basis) -> "Scalar":
        if not den:
            raise DivisionByZero("zero denominator")
        if not num:
            return cls._rational(Fraction(0), basis)
        if len(den) == 1:
            (dm, dc), = den.items()
            if dm == ():
                if dc == 1:
                    return cls._make(num, _ONE, basis)
                return cls._make(poly_scale(num, 1 / dc), _ONE, basis)
        g = _common_monomial(num, den)
        if g:
            num = {_mono_div(m, g): c for m, c in num.items()}
            den = {_mono_div(m, g): c for m, c in den.items()}
        if len(den) == 1 and () in den:
            return cls._make(poly_scale(num, 1 / den[()]), _ONE, basis)
        quot = poly_divexact(num, den)
        if quot is not None:
            return cls._make(quot, _ONE, basis)
        inv = poly_divexact(den, num)
        if inv is not None:
            # num/den = 1/inv; inv is a nonconstant polynomial here
            num, den = _ONE, inv
        lc = den[leading(den)]
        if lc != 1:
            num = poly_scale(num, 1 / lc)
            den = poly_scale(den, 1 / lc)
        return cls._make(num, den, basis)

    # -- properties --------------------------------------------------------

    def is_rational(self) -> bool:
        return self._q is not None

    def as_fraction(self) -> Fraction:
        if self._q is None:
            raise ValueError(f"{self} is not rational")
        return self._q

    def is_zero(self) -> bool:
        return not self.num

    def is_integer(self) -> bool:
        return self._q is not None and self._q.denominator == 1

    def symbols_used(self) -> set:
        used = set()
        for p in (self.num, self.den):
            for m in p:
                used.update(i for i, e in enumerate(m) if e)
        return used

    # -- arithmetic --------------------------------------------------------

    def _join(self, other: "Scalar"):
        a, b = self.basis, other.basis
        if a is None or b is None or a is b:
            return a or b
        raise Mismatch("scalars from different irrational bases")

    def __add__(self, other):
        other = as_scalar(other)
        basis = self._join(other)
        if self._q is not None and other._q is not None:
            return Scalar._rational(self._q + other._q, basis)
        if self.den is other.den or self.den == other.den:
            return Scalar._normalize(poly_add(self.num, other.num), self.den, basis)
        num = poly_add(poly_mul(self.num, other.den), poly_mul(other.num, self.den))
        return Scalar._normalize(num, poly_mul(self.den, other.den), basis)

    __radd__ = __add__

    def __neg__(self):
        if self._q is not None:
            return Scalar._rational(-self._q, self.basis)
        return Scalar._make(poly_scale(self.num, -1), self.den, self.basis)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-as_scalar(other))

    def __rsub__(self, other):
        return as_scalar(other) + (-self)

    def __mul__(self, other):
        other = as_scalar(other)
        basis = self._join(other)
        if self._q is not None and other._q is not None:
            return Scalar._rational(self._q * other._q, basis)
        if self._q is not None:
            return Scalar._make(poly_scale(other.num, self._q), other.den, basis) if self._q else Scalar._rational(Fraction(0), basis)
        if other._q is not None:
            return Scalar._make(poly_scale(self.num, other._q), self.den, basis) if other._q else Scalar._rational(Fraction(0), basis)
        return Scalar._normalize(poly_mul(self.num, other.num), poly_mul(self.den, other.den), basis)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_scalar(other)
        if other.is_zero():
            raise DivisionByZero("division by the zero scalar")
        basis = self._join(other)
        if self._q is not None and other._q is not None:
            return Scalar._rational(self._q / other._q, basis)
        if other._q is not None:
            return Scalar._make(poly_scale(self.num, 1 / other._q), self.den, basis)
        return Scalar._normalize(poly_mul(self.num, other.den), poly_mul(self.den, other.num), basis)

    def __rtruediv__(self, other):
        return as_scalar(other) / self

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return (1 / self) ** (-e)
        out = Scalar._rational(Fraction(1), self.basis)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def inverse(self) -> "Scalar":
        return 1 / self

    # -- comparison --------------------------------------------------------

    def __eq__(self, other):
        try:
            other = as_scalar(other)
        except TypeError:
            return NotImplemented
        if self._q is not None and other._q is not None:
            return self._q == other._q
        if self.den == other.den:
            return self.num == other.num
        return not poly_add(poly_mul(self.num, other.den), poly_mul(other.num, self.den), -1)

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        if self._q is not None:
            return hash(self._q)
        d = _eval_exact(self.den, _HASH_POINT)
        if not d:
            return hash(("scalar", len(self.symbols_used())))
        return hash(_eval_exact(self.num, _HASH_POINT) / d)

    def __bool__(self):
        return bool(self.num)

    def sign(self, max_bits: int = None) -> int:
        return sign(self, max_bits)

    def __lt__(self, other):
        return sign(self - other) < 0

    def __le__(self, other):
        return sign(self - other) <= 0

    def __gt__(self, other):
        return sign(self - other) > 0

    def __ge__(self, other):
        return sign(self - other) >= 0

    def __abs__(self):
        return -self if sign(self) < 0 else self

    # -- display -----------------------------------------------------------

    def _names(self) -> list:
        if self.basis is not None:
            return self.basis.names
        width = max((len(m) for p in (self.num, self.den) for m in p), default=0)
        return [f"x{i}" for i in range(width)]

    def __str__(self):
        if self._q is not None:
            return str(self._q)
        names = self._names()
        num = format_poly(self.num, names)
        if self.den is _ONE or self.den == _ONE:
            return num
        return f"({num})/({format_poly(self.den, names)})"

    def __repr__(self):
        return f"Scalar({str(self)!r})"

    def __float__(self):
        return self.approx()

    def approx(self, bits: int = START_BITS) -> float:
        """Interval midpoint as a float; for display only."""
        if self._q is not None:
            return float(self._q)
        boxes = [s.enclosure_at(bits) for s in self.basis.symbols]
        n = _eval_interval(self.num, boxes, bits)
        d = _eval_interval(self.den, boxes, bits)
        mid_d = (d[0] + d[1]) / 2
        return float((n[0] + n[1]) / 2 / mid_d)


def _eval_exact(p: Poly, point: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for m, c in p.items():
        term = c
        for i, e in enumerate(m):
            if e:
                term *= point[i] ** e
        total += term
    return total


def format_poly(p: Poly, names: Sequence[str]) -> str:
    """Deterministic text for a polynomial, highest graded-lex monomial first."""
    if not p:
        return "0"
    parts = []
    for m in sorted(p, key=_mono_key, reverse=True):
        c = p[m]
        factors = []
        for i, e in enumerate(m):
            if e == 1:
                factors.append(names[i])
            elif e:
                factors.append(f"{names[i]}^{e}")
        mono = "*".join(factors)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)


def as_scalar(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return Scalar._rational(Fraction(x))
    if isinstance(x, str):
        return Scalar(x)
    raise TypeError(f"cannot interpret {x!r} as a Scalar")


ZERO = Scalar(0)
ONE = Scalar(1)


def sign(x, max_bits: int = None) -> int:
    """Return -1, 0 or +1.

    Zero is decided exactly (numerator is the zero polynomial).  Otherwise
    numerator and denominator are evaluated on enclosures of the symbols,
    starting at 64 fractional bits and doubling, until both intervals exclude
    zero.  Raises AmbiguousSign once ``max_bits`` is exhausted.
    """
    x = as_scalar(x)
    if x.is_zero():
        return 0
    if x._q is not None:
        return 1 if x._q > 0 else -1
    if max_bits is None:
        max_bits = get_max_bits()
    if x.basis is None:
        raise AmbiguousSign("symbolic scalar has no basis to evaluate against")
    symbols = x.basis.symbols
    bits = min(START_BITS, max_bits)
    while True:
        boxes = [s.enclosure_at(bits) for s in symbols]
        n = _eval_interval(x.num, boxes, bits)
        d = _eval_interval(x.den, boxes, bits)
        if (n[0] > 0 or n[1] < 0) and (d[0] > 0 or d[1] < 0):
            return (1 if n[0] > 0 else -1) * (1 if d[0] > 0 else -1)
        if bits >= max_bits:
            raise AmbiguousSign(f"sign of {x} unresolved at {max_bits} bits")
        bits = min(2 * bits, max_bits)
