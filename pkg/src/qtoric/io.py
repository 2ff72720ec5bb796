"""Fan and morphism documents: JSON parsing, validation and canonical printing.

A document is validated against the bundled JSON schema before anything
else happens; semantic problems found afterwards (indices out of range,
ragged columns) are reported the same way, as a :class:`SchemaError`
carrying a JSON pointer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Dict, List, Optional, Sequence

import jsonschema

from .calibration import CalibrationRec
from .errors import SchemaError
from .fan import QuantumFan, close_fan
from .linalg import Matrix
from .scalar import IrrationalBasis, Scalar, Symbol, _mono_key, parse_rational, sqrt_refiner

SCHEMA_VERSION = 1


@lru_cache(maxsize=None)
def load_schema() -> dict:
    text = resources.files("qtoric").joinpath("schema/document.schema.json").read_text("utf-8")
    return json.loads(text)


def _pointer(parts) -> str:
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in parts)


def _check(obj, schema: dict) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(obj), key=lambda e: (len(e.path), list(map(str, e.path))))
    if not errors:
        return
    err = errors[0]
    path = list(err.path)
    if err.validator == "required":
        missing = [k for k in err.validator_value if k not in err.instance]
        if missing:
            path.append(missing[0])
    raise SchemaError(_pointer(path), err.message)


def validate_document(obj) -> None:
    _check(obj, load_schema())


def validate_morphism_document(obj) -> None:
    schema = dict(load_schema())
    schema = {**schema["$defs"]["morphism"], "$defs": schema["$defs"]}
    _check(obj, schema)


# --------------------------------------------------------------------------
# scalars
# --------------------------------------------------------------------------

def format_rational(q: Fraction) -> str:
    return str(Fraction(q))


def _parse_monomials(items, nsym: int, path: str) -> dict:
    out: Dict[tuple, Fraction] = {}
    for k, (coeff, exps) in enumerate(items):
        if len(exps) > nsym and any(exps[nsym:]):
            raise SchemaError(f"{path}/{k}/1", f"exponent vector refers to {len(exps)} symbols, {nsym} declared")
        key = tuple(exps[:nsym])
        out[key] = out.get(key, Fraction(0)) + parse_rational(coeff)
    return out


def parse_scalar(lit, basis: Optional[IrrationalBasis] = None, path: str = "") -> Scalar:
    """Scalar from a literal: integer, "p/q" or decimal string, or a poly object."""
    if isinstance(lit, bool):
        raise SchemaError(path, "booleans are not scalars")
    if isinstance(lit, (int, str)):
        try:
            return Scalar(lit, basis)
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(path, str(exc)) from None
    if isinstance(lit, dict) and "poly" in lit:
        nsym = len(basis) if basis is not None else 0
        poly = lit["poly"]
        num = _parse_monomials(poly.get("num", []), nsym, f"{path}/poly/num")
        den = _parse_monomials(poly["den"], nsym, f"{path}/poly/den") if "den" in poly else None
        if den is not None and not any(den.values()):
            raise SchemaError(f"{path}/poly/den", "zero denominator")
        return Scalar.fraction(num, den, basis if nsym else None)
    raise SchemaError(path, f"not a scalar literal: {lit!r}")


def _print_poly(p: dict) -> list:
    return [[format_rational(p[m]), list(m)] for m in sorted(p, key=_mono_key, reverse=True)]


def print_scalar(x: Scalar):
    """Canonical literal: "p/q" for rationals, a poly object otherwise."""
    if x.is_rational():
        return format_rational(x.as_fraction())
    out = {"num": _print_poly(x.num)}
    if len(x.den) != 1 or () not in x.den:
        out["den"] = _print_poly(x.den)
    return {"poly": out}


def print_matrix(m: Matrix) -> list:
    return [[print_scalar(x) for x in row] for row in m.rows]


# --------------------------------------------------------------------------
# symbols
# --------------------------------------------------------------------------

@dataclass
class SymbolDecl:
    name: str
    enclosure: tuple
    digits: Optional[str] = None
    sqrt: Optional[Fraction] = None

    def build(self) -> Symbol:
        refiner = sqrt_refiner(self.sqrt) if self.sqrt is not None else None
        return Symbol(self.name, self.enclosure, refiner=refiner, digits=self.digits)

    def to_json(self) -> dict:
        out = {"name": self.name, "enclosure": [format_rational(q) for q in self.enclosure]}
        if self.digits is not None:
            out["digits"] = self.digits
        if self.sqrt is not None:
            out["sqrt"] = format_rational(self.sqrt)
        return out


def _parse_symbols(items, base: str = "/symbols") -> List[SymbolDecl]:
    out = []
    for k, s in enumerate(items):
        lo, hi = (parse_rational(e) for e in s["enclosure"])
        if not lo < hi:
            raise SchemaError(f"{base}/{k}/enclosure", "lower endpoint must be below the upper one")
        sq = parse_rational(s["sqrt"]) if "sqrt" in s else None
        if sq is not None and (sq < 0 or hi <= 0 or not max(lo, 0) ** 2 <= sq <= hi ** 2):
            raise SchemaError(f"{base}/{k}/sqrt", "square root is outside the enclosure")
        out.append(SymbolDecl(s["name"], (lo, hi), s.get("digits"), sq))
    names = [s.name for s in out]
    if len(set(names)) != len(names):
        raise SchemaError(base, "symbol names must be unique")
    return out


# --------------------------------------------------------------------------
# documents
# --------------------------------------------------------------------------

@dataclass
class FanDocument:
    symbols: List[SymbolDecl]
    basis: Optional[IrrationalBasis]
    calibration: CalibrationRec
    cones: List[List[int]]
    A: Optional[List[int]] = None
    labels: Dict[int, str] = field(default_factory=dict)
    morphisms: list = field(default_factory=list)
    schema_version: int = SCHEMA_VERSION

    def fan(self, close: bool = False) -> QuantumFan:
        f = QuantumFan(self.calibration, self.cones, self.A)
        return close_fan(f) if close else f

    def to_json(self) -> dict:
        cal = self.calibration
        out = {
            "schema_version": self.schema_version,
            "calibration": {
                "d": cal.d,
                "N": cal.N,
                "columns": [[print_scalar(x) for x in c] for c in cal.columns],
                "virtual": sorted(cal.virtual),
            },
            "cones": [],
        }
        for k, c in enumerate(self.cones):
            entry = {"rays": sorted(c)}
            if k in self.labels:
                entry["label"] = self.labels[k]
            out["cones"].append(entry)
        if self.symbols:
            out["symbols"] = [s.to_json() for s in self.symbols]
        if self.A is not None:
            out["A"] = sorted(self.A)
        if self.morphisms:
            out["morphisms"] = self.morphisms
        return out


def dumps(obj) -> str:
    """Byte-stable JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _same_symbols(a: Sequence[SymbolDecl], b: Sequence[SymbolDecl]) -> bool:
    return [(s.name, s.enclosure) for s in a] == [(s.name, s.enclosure) for s in b]


def parse_obj(obj, basis: Optional[IrrationalBasis] = None,
              symbols: Optional[Sequence[SymbolDecl]] = None) -> FanDocument:
    """Validated document from decoded JSON.

    ``basis``/``symbols`` let a second document reuse the symbols of a first
    one, so that scalars of both can be combined; the declarations must agree.
    """
    validate_document(obj)
    decls = _parse_symbols(obj.get("symbols", []))
    if basis is not None and decls:
        if not _same_symbols(decls, symbols or []):
            raise SchemaError("/symbols", "symbol declarations differ from the first document")
        decls = list(symbols)
    elif basis is None and decls:
        basis = IrrationalBasis([s.build() for s in decls])
    elif basis is not None:
        decls = list(symbols or [])
    cal_obj = obj["calibration"]
    d = cal_obj["d"]
    columns = []
    for j, col in enumerate(cal_obj["columns"]):
        if len(col) != d:
            raise SchemaError(f"/calibration/columns/{j}", f"expected {d} entries, found {len(col)}")
        columns.append([parse_scalar(x, basis, f"/calibration/columns/{j}/{i}") for i, x in enumerate(col)])
    N = len(columns)
    if "N" in cal_obj and cal_obj["N"] != N:
        raise SchemaError("/calibration/N", f"N = {cal_obj['N']} but {N} columns given")
    for k, v in enumerate(cal_obj.get("virtual", [])):
        if v >= N:
            raise SchemaError(f"/calibration/virtual/{k}", f"index {v} out of range")
    cal = CalibrationRec(columns, cal_obj.get("virtual", []), basis=basis, d=d)
    cones, labels = [], {}
    for k, c in enumerate(obj.get("cones", [])):
        for r, i in enumerate(c["rays"]):
            if i >= N:
                raise SchemaError(f"/cones/{k}/rays/{r}", f"index {i} out of range")
        cones.append(sorted(c["rays"]))
        if "label" in c:
            labels[k] = c["label"]
    A = None
    if "A" in obj:
        for k, i in enumerate(obj["A"]):
            if i >= N:
                raise SchemaError(f"/A/{k}", f"index {i} out of range")
        A = sorted(obj["A"])
    return FanDocument(decls, basis, cal, cones, A, labels, list(obj.get("morphisms", [])),
                       obj["schema_version"])


def _decode(text) -> object:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SchemaError("", f"not UTF-8: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"invalid JSON: {exc}") from None


def parse(text, basis: Optional[IrrationalBasis] = None,
          symbols: Optional[Sequence[SymbolDecl]] = None) -> FanDocument:
    return parse_obj(_decode(text), basis, symbols)


def load(path, basis=None, symbols=None) -> FanDocument:
    with open(path, "rb") as fh:
        return parse(fh.read(), basis, symbols)


def print_document(doc: FanDocument) -> str:
    return dumps(doc.to_json())


def canonicalize(text) -> str:
    return print_document(parse(text))


# --------------------------------------------------------------------------
# morphisms
# --------------------------------------------------------------------------

def parse_morphism_obj(obj, source: FanDocument, target: FanDocument, base: str = "",
                       close: bool = False):
    from .morphism import FanMorphismRec

    validate_morphism_document(obj)
    if obj.get("symbols"):
        decls = _parse_symbols(obj["symbols"], base + "/symbols")
        if not _same_symbols(decls, source.symbols):
            raise SchemaError(base + "/symbols", "symbol declarations differ from the source document")
    basis = source.basis or target.basis
    L = [[parse_scalar(x, basis, f"{base}/L/{i}/{j}") for j, x in enumerate(row)]
         for i, row in enumerate(obj["L"])]
    d, d2 = source.calibration.d, target.calibration.d
    if len(L) != d2 or any(len(r) != d for r in L):
        raise SchemaError(base + "/L", f"L must be {d2} x {d}")
    H = obj["H"]
    N, N2 = source.calibration.N, target.calibration.N
    if len(H) != N2 or any(len(r) != N for r in H):
        raise SchemaError(base + "/H", f"H must be {N2} x {N}")
    s = {}
    for key, val in obj.get("s", {}).items():
        i = int(key)
        if i >= N2 or val >= N:
            raise SchemaError(f"{base}/s/{key}", "index out of range")
        s[i] = val
    return FanMorphismRec(source.fan(close), target.fan(close), Matrix(L, d), H, s)


def parse_morphism(text, source: FanDocument, target: FanDocument, close: bool = False):
    return parse_morphism_obj(_decode(text), source, target, close=close)


def morphism_to_json(m) -> dict:
    return {"L": print_matrix(m.L), "H": [list(r) for r in m.H],
            "s": {str(k): v for k, v in sorted(m.s.items())}}
