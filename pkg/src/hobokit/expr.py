"""Multilinear polynomials over binary variables.

Every product is reduced on the spot with ``x * x == x``, so a stored
monomial is a strictly increasing tuple of variable ids and ``degree`` is
always the true order of the cost function.
"""

from __future__ import annotations

import itertools
import numbers
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DeclarationError, DimensionError, UnsupportedOperationError

Monomial = tuple  # strictly ascending tuple of variable ids


class BinaryVar:
    __slots__ = ("id", "name")

    def __init__(self, id: int, name: str):
        self.id = id
        self.name = name

    def __repr__(self) -> str:
        return f"BinaryVar({self.id}, {self.name!r})"

    def __hash__(self) -> int:
        return hash(self.id)

    def __eq__(self, other) -> bool:
        return isinstance(other, BinaryVar) and other.id == self.id and other.name == self.name

    def to_polynomial(self) -> Polynomial:
        return Polynomial._raw({(self.id,): 1.0}, {self.id: self.name})

    # arithmetic simply lifts to Polynomial
    def __add__(self, other):
        return self.to_polynomial() + other

    __radd__ = __add__

    def __sub__(self, other):
        return self.to_polynomial() - other

    def __rsub__(self, other):
        return other - self.to_polynomial()

    def __mul__(self, other):
        return self.to_polynomial() * other

    __rmul__ = __mul__

    def __neg__(self):
        return -self.to_polynomial()

    def __pow__(self, exponent):
        return self.to_polynomial() ** exponent


class Polynomial:
    """Immutable multilinear pseudo-Boolean polynomial.

    ``terms`` maps monomials (ascending id tuples) to nonzero float
    coefficients; the empty tuple holds the constant.  ``names`` maps every
    id that was ever involved to its variable name, which is what lets
    results be decoded after compilation renumbers variables.
    """

    __slots__ = ("_terms", "_names")

    def __init__(self, terms: Mapping[Iterable[int], float] | None = None,
                 names: Mapping[int, str] | None = None):
        acc: dict[tuple, float] = {}
        for mono, coeff in (terms or {}).items():
            key = tuple(sorted(set(mono)))
            acc[key] = acc.get(key, 0.0) + float(coeff)
        self._terms = {k: v for k, v in acc.items() if v != 0.0}
        self._names = dict(names or {})

    @classmethod
    def _raw(cls, terms: dict, names: Mapping[int, str]) -> Polynomial:
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._names = names
        return obj

    @classmethod
    def constant(cls, value: float) -> Polynomial:
        value = float(value)
        return cls._raw({(): value} if value != 0.0 else {}, {})

    @property
    def terms(self) -> Mapping[tuple, float]:
        return self._terms

    @property
    def names(self) -> Mapping[int, str]:
        return self._names

    @property
    def constant_term(self) -> float:
        return self._terms.get((), 0.0)

    def variables(self) -> list[int]:
        """Sorted ids of the variables that occur in some term."""
        return sorted({v for mono in self._terms for v in mono})

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def __repr__(self) -> str:
        if not self._terms:
            return "Polynomial(0)"
        parts = []
        for mono, c in sorted(self._terms.items(), key=lambda kv: (len(kv[0]), kv[0])):
            label = "*".join(self._names.get(v, f"x{v}") for v in mono)
            parts.append(f"{c:g}" + (f"*{label}" if label else ""))
        return "Polynomial(" + " + ".join(parts) + ")"

    def __eq__(self, other) -> bool:
        if isinstance(other, (BinaryVar, numbers.Real)):
            other = _lift(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._terms == other._terms

    __hash__ = None

    def __add__(self, other):
        return combine(self, "add", other)

    def __radd__(self, other):
        return combine(_lift(other), "add", self)

    def __sub__(self, other):
        return combine(self, "sub", other)

    def __rsub__(self, other):
        return combine(_lift(other), "sub", self)

    def __mul__(self, other):
        return combine(self, "mul", other)

    def __rmul__(self, other):
        return combine(_lift(other), "mul", self)

    def __neg__(self):
        return Polynomial._raw({k: -v for k, v in self._terms.items()}, self._names)

    def __pos__(self):
        return self

    def __pow__(self, exponent):
        return combine(self, "pow", exponent)


def _lift(value) -> Polynomial:
    if isinstance(value, Polynomial):
        return value
    if isinstance(value, BinaryVar):
        return value.to_polynomial()
    if isinstance(value, numbers.Real) and not isinstance(value, bool):
        return Polynomial.constant(value)
    if isinstance(value, (bool, np.bool_)):
        return Polynomial.constant(float(value))
    raise TypeError(f"cannot use {type(value).__name__} as a polynomial")


def _merge_names(a: Mapping[int, str], b: Mapping[int, str]) -> Mapping[int, str]:
    if a is b or not b:
        return a
    if not a:
        return b
    merged = dict(a)
    merged.update(b)
    return merged


def _mul_monomial(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b or a == b:
        return a
    return tuple(sorted(set(a).union(b)))


def _add(lhs: Polynomial, rhs: Polynomial, sign: float) -> Polynomial:
    terms = dict(lhs._terms)
    for mono, c in rhs._terms.items():
        v = terms.get(mono, 0.0) + sign * c
        if v == 0.0:
            terms.pop(mono, None)
        else:
            terms[mono] = v
    return Polynomial._raw(terms, _merge_names(lhs._names, rhs._names))


def _mul(lhs: Polynomial, rhs: Polynomial) -> Polynomial:
    acc: dict[tuple, float] = {}
    for ma, ca in lhs._terms.items():
        for mb, cb in rhs._terms.items():
            key = _mul_monomial(ma, mb)
            acc[key] = acc.get(key, 0.0) + ca * cb
    terms = {k: v for k, v in acc.items() if v != 0.0}
    return Polynomial._raw(terms, _merge_names(lhs._names, rhs._names))


def _pow(base: Polynomial, exponent) -> Polynomial:
    if isinstance(exponent, Polynomial):
        if exponent.variables():
            raise UnsupportedOperationError("exponent must be a constant")
        exponent = exponent.constant_term
    if isinstance(exponent, float) and exponent.is_integer():
        exponent = int(exponent)
    if not isinstance(exponent, numbers.Integral) or isinstance(exponent, bool):
        raise UnsupportedOperationError(f"exponent must be an integer, got {exponent!r}")
    exponent = int(exponent)
    if exponent < 0:
        raise UnsupportedOperationError("negative powers are not polynomials")
    result = Polynomial._raw({(): 1.0}, base._names)
    square = base
    while exponent:
        if exponent & 1:
            result = _mul(result, square)
        exponent >>= 1
        if exponent:
            square = _mul(square, square)
    return result


def combine(lhs, op: str, rhs) -> Polynomial:
    """Apply ``op`` (``add``, ``sub``, ``mul`` or ``pow``) and reduce."""
    lhs = _lift(lhs)
    if op == "pow":
        return _pow(lhs, rhs)
    rhs = _lift(rhs)
    if op == "add":
        return _add(lhs, rhs, 1.0)
    if op == "sub":
        return _add(lhs, rhs, -1.0)
    if op == "mul":
        return _mul(lhs, rhs)
    raise UnsupportedOperationError(f"unknown operation {op!r}")


def degree(p) -> int:
    p = _lift(p)
    return max((len(m) for m in p.terms), default=0)


def evaluate(p, assignment: Sequence[int]) -> float:
    """Value of ``p`` at a 0/1 assignment indexed by variable id."""
    p = _lift(p)
    x = np.asarray(assignment)
    needed = max((m[-1] for m in p.terms if m), default=-1) + 1
    if x.ndim != 1 or x.shape[0] < needed:
        raise DimensionError(f"assignment covers {x.shape[0] if x.ndim == 1 else x.shape} "
                             f"ids but the polynomial uses ids up to {needed - 1}")
    total = 0.0
    for mono, c in p.terms.items():
        if all(x[v] for v in mono):
            total += c
    return total


class VarArray:
    """Row-major grid of binary variables sharing a name pattern."""

    def __init__(self, shape: Sequence[int], pattern: str, elements: np.ndarray):
        self.shape = tuple(shape)
        self.pattern = pattern
        self.elements = elements

    def __getitem__(self, idx):
        return self.elements[idx]

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return self.shape[0]

    def flat(self) -> list[BinaryVar]:
        return list(self.elements.ravel())

    def __repr__(self) -> str:
        return f"VarArray(shape={self.shape}, pattern={self.pattern!r})"


class Registry:
    """Hands out dense variable ids in declaration order."""

    def __init__(self):
        self.variables: list[BinaryVar] = []
        self._by_name: dict[str, BinaryVar] = {}

    def __len__(self) -> int:
        return len(self.variables)

    def lookup(self, name: str) -> BinaryVar:
        return self._by_name[name]

    def var(self, name: str) -> BinaryVar:
        if name in self._by_name:
            raise DeclarationError(f"variable {name!r} declared twice")
        v = BinaryVar(len(self.variables), name)
        self.variables.append(v)
        self._by_name[name] = v
        return v

    def var_array(self, shape: Sequence[int], pattern: str) -> VarArray:
        shape = tuple(int(s) for s in shape)
        if not shape or any(s < 1 for s in shape):
            raise DeclarationError(f"shape must be a non-empty list of positive ints, got {shape}")
        if pattern.count("{}") != len(shape):
            raise DeclarationError(
                f"pattern {pattern!r} needs {len(shape)} '{{}}' placeholders")
        names = [pattern.format(*idx) for idx in itertools.product(*map(range, shape))]
        clash = [n for n in names if n in self._by_name]
        if clash or len(set(names)) != len(names):
            raise DeclarationError(f"duplicate variable name {(clash or names)[0]!r}")
        grid = np.empty(len(names), dtype=object)
        for i, name in enumerate(names):
            grid[i] = self.var(name)
        return VarArray(shape, pattern, grid.reshape(shape))


def var_array(shape: Sequence[int], pattern: str, registry: Registry | None = None) -> VarArray:
    """Declare a grid of variables; pass a shared ``registry`` to continue ids."""
    return (registry if registry is not None else Registry()).var_array(shape, pattern)
