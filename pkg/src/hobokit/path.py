"""Contraction-path planning under an element-count FLOP model.

A step contracting two operands costs ``size(union of their labels) * f``
with ``f = max(1, num_terms - 1) + (1 if a label is summed away)``, which
is the bookkeeping ``numpy.einsum_path`` prints.  Planners:

* ``greedy``: repeatedly take the cheapest pair that shares a label;
* ``optimal``: dynamic programming over operand subsets.

Both only contract pairs that share a label; outer products are used only
to join disconnected parts of the network, unless ``search_outer=True``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

from .errors import CapabilityError, SpecError
from .tensor import EinsumSpec

MAX_OPTIMAL_OPERANDS = 16


def flop_cost(union_labels: Iterable[str], dims: Mapping[str, int], num_terms: int,
              has_summed_label: bool) -> float:
    factor = max(1, num_terms - 1) + (1 if has_summed_label else 0)
    return float(math.prod(dims[c] for c in union_labels) * factor)


@dataclass(frozen=True)
class ContractionPath:
    """Pairwise steps; each contracts two live operands and appends the result."""

    steps: tuple[tuple[int, int], ...]

    def __iter__(self):
        return iter(self.steps)

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class StepInfo:
    operands: tuple[int, int]
    contraction: str        # e.g. "ijklmn,i->jklmn"
    scaling: int
    flops: float
    remaining: str


@dataclass(frozen=True)
class CostReport:
    subscripts: str
    naive_scaling: int
    optimized_scaling: int
    naive_flops: float
    optimized_flops: float
    theoretical_speedup: float
    largest_intermediate: float
    steps: tuple[StepInfo, ...] = field(default=(), repr=False)

    def format(self, with_steps: bool = False) -> str:
        lines = [
            f"  Complete contraction:  {self.subscripts}",
            f"         Naive scaling:  {self.naive_scaling}",
            f"     Optimized scaling:  {self.optimized_scaling}",
            f"      Naive FLOP count:  {self.naive_flops:.3e}",
            f"  Optimized FLOP count:  {self.optimized_flops:.3e}",
            f"   Theoretical speedup:  {self.theoretical_speedup:3.3f}",
            f"  Largest intermediate:  {self.largest_intermediate:.3e} elements",
        ]
        if with_steps and self.steps:
            rule = "-" * 74
            lines += [rule, f"{'scaling':>7}{'current':>25}{'remaining':>42}", rule]
            lines += [f"{s.scaling:>4}    {s.contraction:>24}    {s.remaining:>36}"
                      for s in self.steps]
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "complete_contraction": self.subscripts,
            "naive_scaling": self.naive_scaling,
            "optimized_scaling": self.optimized_scaling,
            "naive_flops": self.naive_flops,
            "optimized_flops": self.optimized_flops,
            "theoretical_speedup": self.theoretical_speedup,
            "largest_intermediate": self.largest_intermediate,
        }


class NaiveCost(NamedTuple):
    scaling: int
    flops: float


def naive_report(spec: EinsumSpec) -> NaiveCost:
    labels = spec.labels
    summed = any(c not in spec.output for c in labels)
    return NaiveCost(len(labels), flop_cost(labels, spec.dims, len(spec.inputs), summed))


# -- planning ---------------------------------------------------------------

class _Net:
    """Label bookkeeping shared by the planners."""

    def __init__(self, spec: EinsumSpec):
        self.spec = spec
        self.dims = spec.dims
        self.order = {c: k for k, c in enumerate(spec.labels)}
        self.sets = [frozenset(t) for t in spec.inputs]
        self.out = frozenset(spec.output)
        self.owners: dict[str, int] = {}
        for i, s in enumerate(self.sets):
            for c in s:
                self.owners[c] = self.owners.get(c, 0) | (1 << i)

    def size(self, labels) -> int:
        return math.prod(self.dims[c] for c in labels)

    def text(self, labels) -> str:
        return "".join(sorted(labels, key=self.order.__getitem__))

    def kept(self, labels, mask: int) -> frozenset:
        """Labels of a merged group still needed outside ``mask``."""
        return frozenset(c for c in labels if c in self.out or self.owners[c] & ~mask)

    def step(self, a: frozenset, b: frozenset, result: frozenset):
        union = a | b
        return flop_cost(union, self.dims, 2, bool(union - result)), len(union)


def _greedy(net: _Net) -> list[tuple[int, int]]:
    live = [(s, 1 << i) for i, s in enumerate(net.sets)]
    steps = []
    while len(live) > 1:
        pairs = [(i, j) for i, j in itertools.combinations(range(len(live)), 2)
                 if live[i][0] & live[j][0]]
        if not pairs:
            pairs = list(itertools.combinations(range(len(live)), 2))
        best = None
        for i, j in pairs:
            (a, ma), (b, mb) = live[i], live[j]
            res = net.kept(a | b, ma | mb)
            cost, _ = net.step(a, b, res)
            key = (cost, net.size(res), i, j)
            if best is None or key < best[0]:
                best = (key, i, j, res, ma | mb)
        _, i, j, res, mask = best
        steps.append((i, j))
        live.pop(j)
        live.pop(i)
        live.append((res, mask))
    return steps


class _Node(NamedTuple):
    cost: float
    largest: int
    scaling: int
    labels: frozenset
    left: int
    right: int


def _optimal(net: _Net, search_outer: bool) -> list[tuple[int, int]]:
    n = len(net.sets)
    if n > MAX_OPTIMAL_OPERANDS:
        raise CapabilityError(
            f"optimal search is limited to {MAX_OPTIMAL_OPERANDS} operands (got {n}); "
            "use method='greedy'")
    best: dict[int, _Node] = {}
    by_size: list[list[int]] = [[] for _ in range(n + 1)]
    for i, s in enumerate(net.sets):
        best[1 << i] = _Node(0.0, 0, 0, s, -1, -1)
        by_size[1].append(1 << i)
    for m in range(2, n + 1):
        found: dict[int, _Node] = {}
        for k in range(1, m // 2 + 1):
            for a in by_size[k]:
                na = best[a]
                for b in by_size[m - k]:
                    if a & b or (k == m - k and b <= a):
                        continue
                    nb = best[b]
                    if not search_outer and not (na.labels & nb.labels):
                        continue
                    mask = a | b
                    res = net.kept(na.labels | nb.labels, mask)
                    cost, scale = net.step(na.labels, nb.labels, res)
                    node = _Node(na.cost + nb.cost + cost,
                                 max(na.largest, nb.largest, net.size(res)),
                                 max(na.scaling, nb.scaling, scale),
                                 res, min(a, b), max(a, b))
                    old = found.get(mask)
                    if old is None or node[:3] < old[:3]:
                        found[mask] = node
        best.update(found)
        by_size[m] = sorted(found)
    roots = _components(net) if (1 << n) - 1 not in best else [(1 << n) - 1]
    steps: list[tuple[int, int]] = []
    live = [1 << i for i in range(n)]

    def emit(mask: int):
        node = best[mask]
        if node.left < 0:
            return
        emit(node.left)
        emit(node.right)
        i, j = sorted((live.index(node.left), live.index(node.right)))
        steps.append((i, j))
        live.pop(j)
        live.pop(i)
        live.append(mask)

    for root in roots:
        emit(root)
    # join disconnected components exactly as the greedy planner would
    while len(live) > 1:
        choice = None
        for i, j in itertools.combinations(range(len(live)), 2):
            a, b = best[live[i]].labels, best[live[j]].labels
            mask = live[i] | live[j]
            res = net.kept(a | b, mask)
            cost, _ = net.step(a, b, res)
            key = (cost, net.size(res), i, j)
            if choice is None or key < choice[0]:
                choice = (key, i, j, res, mask)
        _, i, j, res, mask = choice
        steps.append((i, j))
        best[mask] = _Node(0.0, 0, 0, res, -1, -1)
        live.pop(j)
        live.pop(i)
        live.append(mask)
    return steps


def _components(net: _Net) -> list[int]:
    n = len(net.sets)
    seen = 0
    comps = []
    for i in range(n):
        if seen >> i & 1:
            continue
        comp = 1 << i
        frontier = [i]
        while frontier:
            k = frontier.pop()
            for c in net.sets[k]:
                new = net.owners[c] & ~comp
                if new:
                    comp |= new
                    frontier += [j for j in range(n) if new >> j & 1]
        seen |= comp
        comps.append(comp)
    return comps


def evaluate_path(spec: EinsumSpec, path) -> CostReport:
    """Cost report for executing ``path`` on ``spec``."""
    net = _Net(spec)
    naive = naive_report(spec)
    live = [(s, 1 << i, t) for i, (s, t) in enumerate(zip(net.sets, spec.inputs))]
    total = 0.0
    scaling = 0
    largest = 0
    infos = []
    steps = [tuple(sorted(int(x) for x in st)) for st in getattr(path, "steps", path)]
    for i, j in steps:
        if i == j or i < 0 or j >= len(live):
            raise SpecError(f"step {(i, j)} references a missing operand")
        (a, ma, ta), (b, mb, tb) = live[i], live[j]
        res = net.kept(a | b, ma | mb)
        cost, scale = net.step(a, b, res)
        total += cost
        scaling = max(scaling, scale)
        largest = max(largest, net.size(res))
        live.pop(j)
        live.pop(i)
        tr = net.text(res) if len(live) else spec.output
        live.append((res, ma | mb, tr))
        infos.append(StepInfo((i, j), f"{ta},{tb}->{tr}", scale, cost,
                              ",".join(t for _, _, t in live) + "->" + spec.output))
    if len(live) != 1:
        raise SpecError(f"path leaves {len(live)} operands")
    if not steps:
        total, scaling, largest = naive.flops, naive.scaling, net.size(spec.output)
    return CostReport(str(spec), naive.scaling, scaling, naive.flops, total,
                      naive.flops / total if total else math.inf, float(largest),
                      tuple(infos))


def optimize_path(spec: EinsumSpec, method: str = "greedy",
                  search_outer: bool = False) -> tuple[ContractionPath, CostReport]:
    if not spec.inputs:
        raise SpecError("spec has no operands")
    net = _Net(spec)
    if method == "greedy":
        steps = _greedy(net)
    elif method == "optimal":
        steps = _optimal(net, search_outer)
    else:
        raise SpecError(f"unknown method {method!r}; use 'greedy' or 'optimal'")
    path = ContractionPath(tuple(steps))
    return path, evaluate_path(spec, path)
