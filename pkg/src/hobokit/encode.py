"""Binary integer encodings and decoding of sampled assignments."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ContractViolation, DecodeError
from .expr import BinaryVar, Polynomial, _lift


def integer_expr(bits: Sequence[BinaryVar]) -> Polynomial:
    """``sum_k 2**k * bits[k]``; ``bits[0]`` is the least significant bit."""
    bits = list(bits)
    if not bits:
        raise ContractViolation("an integer needs at least one bit")
    out = Polynomial()
    for k, b in enumerate(bits):
        out = out + (2 ** k) * b
    return out


@dataclass(frozen=True)
class ResultView:
    """A sampled assignment together with the name of every bit."""

    assignment: tuple[int, ...]
    name_table: Mapping[str, int]

    def __post_init__(self):
        n = len(self.assignment)
        for name, idx in self.name_table.items():
            if not 0 <= idx < n:
                raise ContractViolation(f"{name!r} maps to bit {idx}, outside 0..{n - 1}")

    @classmethod
    def of(cls, h, sample) -> ResultView:
        """View of a sample (or raw bit vector) taken from compiled problem ``h``."""
        bits = getattr(sample, "assignment", sample)
        return cls(tuple(int(b) for b in bits), h.name_table)

    def bit(self, name: str) -> int:
        try:
            return self.assignment[self.name_table[name]]
        except KeyError:
            raise DecodeError(f"variable {name!r} is not part of this result") from None


def decode_value(view: ResultView, expr) -> float:
    """Evaluate ``expr`` on the view's bits, constant term included."""
    p = _lift(expr)
    total = 0.0
    for mono, coeff in p.terms.items():
        prod = 1
        for v in mono:
            name = p.names.get(v)
            if name is None:
                raise DecodeError(f"variable id {v} has no name to look up")
            prod &= view.bit(name)
        if prod:
            total += coeff
    return total


def _pattern_regex(pattern: str) -> re.Pattern:
    pieces = pattern.split("{}")
    if len(pieces) < 2:
        raise DecodeError(f"pattern {pattern!r} has no '{{}}' placeholder")
    return re.compile(r"(\d+)".join(re.escape(p) for p in pieces) + r"\Z")


def decode_ndarray(view: ResultView, pattern: str) -> np.ndarray:
    """0/1 array of the bits whose names match ``pattern`` (e.g. ``"q{}_{}"``)."""
    rx = _pattern_regex(pattern)
    cells = {}
    for name, idx in view.name_table.items():
        m = rx.match(name)
        if m:
            cells[tuple(int(g) for g in m.groups())] = view.assignment[idx]
    if not cells:
        raise DecodeError(f"no variable matches pattern {pattern!r}")
    shape = tuple(max(k[a] for k in cells) + 1 for a in range(len(next(iter(cells)))))
    out = np.zeros(shape, dtype=np.int64)
    for index in np.ndindex(*shape):
        if index not in cells:
            raise DecodeError(f"pattern {pattern!r}: cell {index} is missing from the result")
        out[index] = cells[index]
    return out


def format_value(x: float) -> str:
    """Paper-style rendering: ``8.0``."""
    return repr(float(x))


def format_grid(grid: np.ndarray) -> str:
    grid = np.atleast_2d(grid)
    return "\n".join(" ".join(str(int(b)) for b in row) for row in grid.reshape(grid.shape[0], -1))
