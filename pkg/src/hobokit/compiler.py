"""Compile reduced polynomials into HOBO coefficient tensors."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import ContractViolation, ResourceError
from .expr import Polynomial

DEFAULT_DENSE_BUDGET = 2 ** 28


def canonical_index(mono: Sequence[int], d: int) -> tuple[int, ...]:
    """Cell of an order-``d`` tensor that stores the coefficient of ``mono``.

    The smallest id is repeated until the index has ``d`` entries, so
    ``x1*x3`` in an order-4 tensor lands on ``(1, 1, 1, 3)``.
    """
    k = len(mono)
    if k == 0:
        raise ContractViolation("the constant monomial has no tensor cell")
    if k > d:
        raise ContractViolation(f"monomial of length {k} does not fit an order-{d} tensor")
    return (mono[0],) * (d - k + 1) + tuple(mono[1:])


@dataclass(frozen=True)
class TermArrays:
    """Flat (CSR-like) view of a term list, as consumed by the kernels."""

    term_ptr: np.ndarray    # int64, len T+1
    term_vars: np.ndarray   # int64, concatenated monomials
    coeffs: np.ndarray      # float64, len T
    var_ptr: np.ndarray     # int64, len n+1
    var_terms: np.ndarray   # int64, ids of terms containing each variable


@dataclass(frozen=True, eq=False)
class HoboTensor:
    """Coefficient tensor of a compiled problem.

    ``terms`` uses tensor axes (0..n-1), not problem ids; ``axis_ids`` and
    ``axis_names`` record which problem variable each axis stands for.
    """

    n: int
    d: int
    terms: tuple[tuple[tuple[int, ...], float], ...]
    offset: float
    axis_ids: tuple[int, ...]
    axis_names: tuple[str, ...]
    dense_budget: int = field(default=DEFAULT_DENSE_BUDGET, repr=False)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @cached_property
    def name_table(self) -> dict[str, int]:
        return {name: axis for axis, name in enumerate(self.axis_names)}

    @cached_property
    def axis_of(self) -> dict[int, int]:
        return {pid: axis for axis, pid in enumerate(self.axis_ids)}

    @cached_property
    def arrays(self) -> TermArrays:
        lengths = np.array([len(m) for m, _ in self.terms], dtype=np.int64)
        term_ptr = np.zeros(len(self.terms) + 1, dtype=np.int64)
        np.cumsum(lengths, out=term_ptr[1:])
        term_vars = np.array([v for m, _ in self.terms for v in m], dtype=np.int64)
        coeffs = np.array([c for _, c in self.terms], dtype=np.float64)
        buckets: list[list[int]] = [[] for _ in range(self.n)]
        for t, (m, _) in enumerate(self.terms):
            for v in m:
                buckets[v].append(t)
        var_ptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum([len(b) for b in buckets], out=var_ptr[1:])
        var_terms = np.array([t for b in buckets for t in b], dtype=np.int64)
        return TermArrays(term_ptr, term_vars, coeffs, var_ptr, var_terms)

    @cached_property
    def dense(self) -> np.ndarray:
        return materialize_dense(self, self.dense_budget)

    def max_abs_coeff(self) -> float:
        return max((abs(c) for _, c in self.terms), default=0.0)

    def scaled(self, alpha: float) -> HoboTensor:
        terms = tuple((m, c * alpha) for m, c in self.terms if c * alpha != 0.0)
        return HoboTensor(self.n, self.d, terms, self.offset * alpha,
                          self.axis_ids, self.axis_names, self.dense_budget)

    def to_term_list(self) -> dict:
        """JSON-ready document in the term-list interchange format."""
        return {
            "num_vars": self.n,
            "names": list(self.axis_names),
            "terms": [{"vars": list(m), "coeff": c} for m, c in self.terms],
            "constant": self.offset,
            "offset": self.offset,
        }


def compile_hobo(p: Polynomial, declared: Sequence | int | None = None,
                 dense_budget: int = DEFAULT_DENSE_BUDGET) -> tuple[HoboTensor, float]:
    """Split ``p`` into a HOBO tensor and its constant offset.

    Only variables that occur in ``p`` get an axis, numbered in ascending
    id order.  ``declared`` (a variable list, a Registry, or a count) only
    matters when ``p`` is constant: the zero tensor then spans every
    declared variable.
    """
    offset = p.constant_term
    used = p.variables()
    names = dict(p.names)
    if used:
        axis_ids = tuple(used)
    else:
        if declared is None:
            raise ContractViolation("constant polynomial needs the declared variables to size it")
        if isinstance(declared, int):
            axis_ids = tuple(range(declared))
        else:
            decl = list(getattr(declared, "variables", declared))
            axis_ids = tuple(v.id for v in decl)
            names.update({v.id: v.name for v in decl})
        if not axis_ids:
            raise ContractViolation("cannot compile a problem with no variables")
    axis_names = tuple(names.get(pid, f"x{pid}") for pid in axis_ids)
    remap = {pid: axis for axis, pid in enumerate(axis_ids)}
    terms = tuple(
        (tuple(remap[v] for v in mono), coeff)
        for mono, coeff in sorted(((m, c) for m, c in p.terms.items() if m),
                                  key=lambda mc: (len(mc[0]), mc[0]))
    )
    d = max(1, max((len(m) for m, _ in terms), default=0))
    h = HoboTensor(len(axis_ids), d, terms, offset, axis_ids, axis_names, dense_budget)
    return h, offset


def materialize_dense(h: HoboTensor, budget: int = DEFAULT_DENSE_BUDGET) -> np.ndarray:
    cells = h.n ** h.d
    if cells > budget:
        raise ResourceError(
            f"dense HOBO tensor with n={h.n}, d={h.d} needs {cells} cells; budget is {budget}")
    dense = np.zeros(h.shape, dtype=np.float64)
    for mono, coeff in h.terms:
        dense[canonical_index(mono, h.d)] = coeff
    return dense

