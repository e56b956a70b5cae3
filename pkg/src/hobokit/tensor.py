"""Einsum-style contraction engine and batched HOBO energies."""

from __future__ import annotations

import math
import string
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import _backend
from .errors import DimensionError, PathError, ResourceError, SpecError

LABELS = string.ascii_letters + string.digits
DEFAULT_CONTRACT_BUDGET = 2 ** 28


@dataclass(frozen=True)
class EinsumSpec:
    inputs: tuple[str, ...]
    output: str
    dims: Mapping[str, int]

    def __post_init__(self):
        for term in (*self.inputs, self.output):
            bad = [c for c in term if c not in LABELS]
            if bad:
                raise SpecError(f"label {bad[0]!r} is outside the 62-symbol alphabet")
        seen = set("".join(self.inputs))
        for c in self.output:
            if c not in seen:
                raise SpecError(f"output label {c!r} does not appear in any input")
        if len(set(self.output)) != len(self.output):
            raise SpecError("output labels must be distinct")
        missing = seen - set(self.dims)
        if missing:
            raise SpecError(f"no extent given for labels {sorted(missing)}")

    @classmethod
    def parse(cls, subscripts: str, shapes: Sequence[Sequence[int]] | None = None,
              dims: Mapping[str, int] | None = None) -> EinsumSpec:
        """Build a spec from ``"ij,jk->ik"`` plus operand shapes or a dims table."""
        text = subscripts.replace(" ", "")
        if "->" in text:
            lhs, output = text.split("->")
        else:
            lhs = text
            counts = {c: lhs.count(c) for c in set(lhs.replace(",", ""))}
            output = "".join(sorted(c for c, k in counts.items() if k == 1))
        inputs = tuple(lhs.split(","))
        table = dict(dims or {})
        if shapes is not None:
            if len(shapes) != len(inputs):
                raise SpecError(f"{len(inputs)} operands in subscripts, {len(shapes)} shapes given")
            for term, shape in zip(inputs, shapes):
                if len(term) != len(shape):
                    raise SpecError(f"operand {term!r} has {len(shape)} axes")
                for c, ext in zip(term, shape):
                    if table.setdefault(c, int(ext)) != int(ext):
                        raise SpecError(f"label {c!r} has inconsistent extents")
        return cls(inputs, output, table)

    @property
    def labels(self) -> list[str]:
        """Distinct labels in order of first appearance."""
        return list(dict.fromkeys("".join(self.inputs) + self.output))

    def shape_of(self, term: str) -> tuple[int, ...]:
        return tuple(self.dims[c] for c in term)

    def __str__(self) -> str:
        return ",".join(self.inputs) + "->" + self.output


def _check_operands(spec: EinsumSpec, operands: Sequence[np.ndarray]) -> list[np.ndarray]:
    if len(operands) != len(spec.inputs):
        raise SpecError(f"spec has {len(spec.inputs)} inputs, got {len(operands)} operands")
    arrays = []
    for term, op in zip(spec.inputs, operands):
        a = np.asarray(op, dtype=np.float64)
        if a.shape != spec.shape_of(term):
            raise SpecError(f"operand for {term!r} has shape {a.shape}, "
                            f"expected {spec.shape_of(term)}")
        arrays.append(a)
    return arrays


def _take_diagonals(term: str, a: np.ndarray) -> tuple[str, np.ndarray]:
    """Collapse repeated labels within one operand (``ii`` -> ``i``)."""
    while len(set(term)) != len(term):
        c = next(c for c in term if term.count(c) > 1)
        i = term.index(c)
        j = term.index(c, i + 1)
        a = np.diagonal(a, axis1=i, axis2=j)
        term = term[:i] + term[i + 1:j] + term[j + 1:] + c
    return term, a


def _align(term: str, a: np.ndarray, order: str) -> np.ndarray:
    """View ``a`` broadcast against the axis order ``order``."""
    perm = sorted(range(len(term)), key=lambda k: order.index(term[k]))
    a = a.transpose(perm)
    placed = "".join(term[k] for k in perm)
    shape = [1] * len(order)
    for c, ext in zip(placed, a.shape):
        shape[order.index(c)] = ext
    return a.reshape(shape)


def _naive(spec: EinsumSpec, arrays: list[np.ndarray], budget: int) -> np.ndarray:
    order = "".join(spec.labels)
    cells = math.prod(spec.dims[c] for c in order)
    if cells > budget:
        raise ResourceError(f"one-pass contraction needs {cells} cells; budget is {budget}")
    acc = np.ones((1,) * len(order))
    for term, a in zip(spec.inputs, arrays):
        term, a = _take_diagonals(term, a)
        acc = acc * _align(term, a, order)
    acc = np.broadcast_to(acc, tuple(spec.dims[c] for c in order))
    summed = tuple(k for k, c in enumerate(order) if c not in spec.output)
    out = acc.sum(axis=summed) if summed else np.array(acc)
    kept = "".join(c for c in order if c in spec.output)
    return out.transpose([kept.index(c) for c in spec.output])


def _reduce_single(term: str, a: np.ndarray, keep: str) -> tuple[str, np.ndarray]:
    term, a = _take_diagonals(term, a)
    drop = tuple(k for k, c in enumerate(term) if c not in keep)
    if drop:
        a = a.sum(axis=drop)
        term = "".join(c for c in term if c in keep)
    return term, a


def contract_pair(ta: str, a: np.ndarray, tb: str, b: np.ndarray,
                  keep: str) -> tuple[str, np.ndarray]:
    """Contract two labelled operands, keeping the labels listed in ``keep``.

    Shared labels are either batch axes (kept) or summed through a matmul.
    """
    ta, a = _reduce_single(ta, a, keep + tb)
    tb, b = _reduce_single(tb, b, keep + ta)
    batch = [c for c in ta if c in tb and c in keep]
    inner = [c for c in ta if c in tb and c not in keep]
    free_a = [c for c in ta if c not in tb]
    free_b = [c for c in tb if c not in ta]
    ext = dict(zip(ta, a.shape)) | dict(zip(tb, b.shape))

    def size(cs):
        return math.prod(ext[c] for c in cs)

    a2 = a.transpose([ta.index(c) for c in batch + free_a + inner]).reshape(
        size(batch), size(free_a), size(inner))
    b2 = b.transpose([tb.index(c) for c in batch + inner + free_b]).reshape(
        size(batch), size(inner), size(free_b))
    out = np.matmul(a2, b2).reshape([ext[c] for c in batch + free_a + free_b])
    return "".join(batch + free_a + free_b), out


def contract(spec: EinsumSpec, operands: Sequence[np.ndarray], path=None,
             budget: int = DEFAULT_CONTRACT_BUDGET) -> np.ndarray:
    """Evaluate ``spec`` on ``operands``.

    Without a path everything is multiplied out over the union of labels in
    one pass; with a path (a ``ContractionPath`` or a list of index pairs)
    the pairwise steps are performed in order.
    """
    arrays = _check_operands(spec, operands)
    if path is None:
        return _naive(spec, arrays, budget)
    steps = list(getattr(path, "steps", path))
    live = list(zip(spec.inputs, arrays))
    for step in steps:
        if len(step) != 2:
            raise PathError(f"step {step!r} must name two operands")
        i, j = sorted(int(s) for s in step)
        if i == j or i < 0 or j >= len(live):
            raise PathError(f"step {step!r} references a missing operand "
                            f"({len(live)} operands live)")
        (tb, b) = live.pop(j)
        (ta, a) = live.pop(i)
        others = "".join(t for t, _ in live) + spec.output
        keep = "".join(c for c in dict.fromkeys(ta + tb) if c in others)
        live.append(contract_pair(ta, a, tb, b, keep))
    if len(live) != 1:
        raise PathError(f"path leaves {len(live)} operands instead of one")
    term, a = _reduce_single(*live[0], spec.output)
    return a.transpose([term.index(c) for c in spec.output])


def hobo_spec(n: int, d: int) -> EinsumSpec:
    """``i,j,...,ij...->``: contract every axis of the HOBO tensor with x."""
    if d > len(LABELS):
        raise SpecError(f"order {d} exceeds the label alphabet")
    labels = LABELS[8:8 + d] if d <= 18 else LABELS[:d]
    return EinsumSpec(tuple(labels) + (labels,), "", {c: n for c in labels})


def energy_batch(h, X) -> np.ndarray:
    """Energies (offset excluded) of every row of the 0/1 matrix ``X``."""
    X = np.asarray(X)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != h.n:
        raise DimensionError(f"expected shots x {h.n} bit matrix, got shape {X.shape}")
    X = np.ascontiguousarray(X != 0, dtype=np.uint8)
    arr = h.arrays
    return _backend.kernels.energy_batch(arr.term_ptr, arr.term_vars, arr.coeffs, X)
