"""The ``.hobo`` problem language and the JSON term-list format.

A ``.hobo`` file declares variable grids and adds terms to ``H``::

    # comment
    var q[4,2] as "q{}_{}"
    H += 10*((2*q[0,0]+q[0,1])*(2*q[1,0]+q[1,1]) - 6)**2

Statements need no separators.  ``*`` and ``**`` are the only products,
``**`` takes a non-negative integer literal, and unary minus may precede
any factor.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from typing import Any, NamedTuple

from .errors import DeclarationError, ParseError, SourceLocation
from .expr import Polynomial, Registry, VarArray, combine

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<string>"[^"\n]*")
  | (?P<op>\*\*|\+=|[-+*()\[\],])
""", re.VERBOSE)


class Token(NamedTuple):
    kind: str     # number | ident | string | op | eof
    text: str
    loc: SourceLocation


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        loc = SourceLocation(line, pos - line_start + 1)
        if m is None:
            if text[pos] == '"':
                raise ParseError("unterminated string", loc)
            raise ParseError(f"unexpected character {text[pos]!r}", loc)
        kind, chunk = m.lastgroup, m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, chunk, loc))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", SourceLocation(line, pos - line_start + 1)))
    return tokens


@dataclass(frozen=True)
class Declaration:
    name: str
    pattern: str
    shape: tuple[int, ...]


@dataclass
class ProblemSpec:
    declarations: list[Declaration]
    objective: Polynomial
    registry: Registry
    metadata: dict[str, str] = field(default_factory=dict)
    arrays: dict[str, VarArray] = field(default_factory=dict, repr=False)


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.registry = Registry()
        self.arrays: dict[str, VarArray] = {}
        self.decls: list[Declaration] = []
        self.objective = Polynomial()

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def _advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def _is(self, kind: str, text: str | None = None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def _expect(self, kind: str, text: str | None = None, what: str | None = None) -> Token:
        if not self._is(kind, text):
            t = self.tok
            found = "end of input" if t.kind == "eof" else repr(t.text)
            wanted = what or (repr(text) if text else kind)
            raise ParseError(f"expected {wanted}, found {found}", t.loc)
        return self._advance()

    def _uint(self, what: str) -> int:
        t = self.tok
        if t.kind != "number" or not t.text.isdigit():
            raise ParseError(f"{what} must be a non-negative integer", t.loc)
        self._advance()
        return int(t.text)

    def _int_list(self, what: str) -> tuple[list[int], list[SourceLocation]]:
        self._expect("op", "[")
        locs = [self.tok.loc]
        vals = [self._uint(what)]
        while self._is("op", ","):
            self._advance()
            locs.append(self.tok.loc)
            vals.append(self._uint(what))
        self._expect("op", "]")
        return vals, locs

    # grammar
    def problem(self) -> None:
        while not self._is("eof"):
            if self._is("ident", "var"):
                self.decl()
            elif self._is("ident", "H"):
                self._advance()
                self._expect("op", "+=")
                self.objective = combine(self.objective, "add", self.expr())
            else:
                t = self.tok
                raise ParseError(f"expected 'var' or 'H +=', found {t.text!r}", t.loc)

    def decl(self) -> None:
        start = self._advance().loc
        name_tok = self._expect("ident", what="array name")
        if name_tok.text in self.arrays:
            raise ParseError(f"array {name_tok.text!r} declared twice", name_tok.loc)
        shape, _ = self._int_list("array extent")
        if any(s < 1 for s in shape):
            raise ParseError("array extents must be positive", name_tok.loc)
        self._expect("ident", "as")
        pattern = self._expect("string", what="name pattern").text[1:-1]
        try:
            arr = self.registry.var_array(shape, pattern)
        except DeclarationError as exc:
            raise ParseError(str(exc), start) from None
        self.arrays[name_tok.text] = arr
        self.decls.append(Declaration(name_tok.text, pattern, tuple(shape)))

    def expr(self) -> Polynomial:
        out = self.term()
        while self._is("op", "+") or self._is("op", "-"):
            op = "add" if self._advance().text == "+" else "sub"
            out = combine(out, op, self.term())
        return out

    def term(self) -> Polynomial:
        out = self.factor()
        while self._is("op", "*"):
            self._advance()
            out = combine(out, "mul", self.factor())
        return out

    def factor(self) -> Polynomial:
        if self._is("op", "-"):
            self._advance()
            return combine(Polynomial(), "sub", self.factor())
        base = self.base()
        if self._is("op", "**"):
            self._advance()
            base = combine(base, "pow", self._uint("exponent"))
        return base

    def base(self) -> Polynomial:
        t = self.tok
        if t.kind == "number":
            self._advance()
            value = float(t.text)
            if not math.isfinite(value):
                raise ParseError(f"number {t.text} is out of range", t.loc)
            return Polynomial.constant(value)
        if self._is("op", "("):
            self._advance()
            inner = self.expr()
            self._expect("op", ")")
            return inner
        if t.kind == "ident":
            self._advance()
            arr = self.arrays.get(t.text)
            if arr is None:
                raise ParseError(f"undeclared variable {t.text!r}", t.loc)
            idx, locs = self._int_list("index")
            if len(idx) != len(arr.shape):
                raise ParseError(f"{t.text} has {len(arr.shape)} axes, got {len(idx)} indices", t.loc)
            for k, (i, n) in enumerate(zip(idx, arr.shape)):
                if i >= n:
                    raise ParseError(f"index {i} out of bounds for axis {k} of {t.text} "
                                     f"(extent {n})", locs[k])
            return arr[tuple(idx)].to_polynomial()
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"expected a number, variable or '(', found {found}", t.loc)


def _leading_comment(text: str) -> str | None:
    for line in text.splitlines():
        s = line.strip()
        if not s:
            continue
        return s[1:].strip() if s.startswith("#") else None
    return None


def parse_problem(text: str, name: str | None = None) -> ProblemSpec:
    """Parse ``.hobo`` source into declarations and a reduced objective."""
    p = _Parser(text)
    p.problem()
    meta = {}
    if name:
        meta["name"] = name
    desc = _leading_comment(text)
    if desc:
        meta["description"] = desc
    return ProblemSpec(p.decls, p.objective, p.registry, meta, p.arrays)


# -- term lists -------------------------------------------------------------

def _fail(msg: str):
    raise ParseError(f"term list: {msg}")


def _is_int(x: Any) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_num(x: Any) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def parse_term_list(doc) -> ProblemSpec:
    """Build a problem from ``{"num_vars": n, "terms": [{"vars": [...], "coeff": c}], "constant": c0}``.

    ``doc`` may be JSON text or an already decoded mapping.  Variables are
    named ``x0, x1, ...`` unless an optional ``names`` list is given.
    """
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ParseError(f"term list is not valid JSON: {exc.msg}",
                             SourceLocation(exc.lineno, exc.colno)) from None
    if not isinstance(doc, dict):
        _fail("document must be an object")
    n = doc.get("num_vars")
    if not _is_int(n) or n < 0:
        _fail("num_vars must be a non-negative integer")
    terms = doc.get("terms")
    if not isinstance(terms, list):
        _fail("terms must be a list")
    constant = doc.get("constant", 0)
    if not _is_num(constant):
        _fail("constant must be a finite number")
    names = doc.get("names")
    if names is None:
        names = [f"x{i}" for i in range(n)]
    elif (not isinstance(names, list) or len(names) != n
          or not all(isinstance(s, str) for s in names) or len(set(names)) != n):
        _fail("names must list num_vars distinct strings")
    reg = Registry()
    vs = [reg.var(s) for s in names]
    acc: dict[tuple, float] = {}
    for k, t in enumerate(terms):
        if not isinstance(t, dict) or set(t) - {"vars", "coeff"} or "vars" not in t or "coeff" not in t:
            _fail(f"term {k} must be an object with exactly 'vars' and 'coeff'")
        mono, coeff = t["vars"], t["coeff"]
        if not isinstance(mono, list) or not all(_is_int(v) for v in mono):
            _fail(f"term {k}: vars must be a list of integers")
        if not _is_num(coeff):
            _fail(f"term {k}: coeff must be a finite number")
        if any(a >= b for a, b in zip(mono, mono[1:])):
            _fail(f"term {k}: vars must be strictly increasing (no duplicates), got {mono}")
        if mono and (mono[0] < 0 or mono[-1] >= n):
            _fail(f"term {k}: variable id out of range 0..{n - 1}")
        key = tuple(mono)
        acc[key] = acc.get(key, 0.0) + float(coeff)
    acc[()] = acc.get((), 0.0) + float(constant)
    objective = Polynomial(acc, {v.id: v.name for v in vs})
    decls = [Declaration("x", "x{}", (n,))] if names == [f"x{i}" for i in range(n)] and n else []
    return ProblemSpec(decls, objective, reg, {})


def to_term_list(spec_or_poly, num_vars: int | None = None) -> dict:
    """Serialize a ProblemSpec or Polynomial to the term-list document."""
    if isinstance(spec_or_poly, ProblemSpec):
        poly = spec_or_poly.objective
        reg = spec_or_poly.registry
        n = len(reg)
        names = [v.name for v in reg.variables]
    else:
        poly = spec_or_poly
        n = num_vars if num_vars is not None else max(poly.variables(), default=-1) + 1
        names = [poly.names.get(i, f"x{i}") for i in range(n)]
    if any(v >= n for v in poly.variables()):
        raise ValueError("polynomial uses ids beyond num_vars")
    terms = [{"vars": list(m), "coeff": c}
             for m, c in sorted(poly.terms.items(), key=lambda mc: (len(mc[0]), mc[0])) if m]
    return {"num_vars": n, "names": names, "terms": terms, "constant": poly.constant_term}


def dump_term_list(spec_or_poly, **kw) -> str:
    return json.dumps(to_term_list(spec_or_poly, **kw), indent=1)


def load_problem(path: str) -> ProblemSpec:
    """Read a ``.hobo`` or ``.json`` problem file."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".json"):
        return parse_term_list(text)
    return parse_problem(text, name=path)
