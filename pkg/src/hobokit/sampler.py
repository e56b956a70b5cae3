"""Multi-chain stochastic solvers over compiled HOBO problems."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import _backend
from .compiler import HoboTensor
from .errors import ContractViolation, DomainError, NumericError
from .tensor import energy_batch

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class Schedule:
    """Geometric cooling from ``t_start`` down to ``t_end`` over ``sweeps`` sweeps."""

    t_start: float
    t_end: float
    sweeps: int = 1000

    def __post_init__(self):
        if not (self.t_start > 0 and self.t_end > 0):
            raise ContractViolation("temperatures must be positive")
        if self.t_end > self.t_start:
            raise ContractViolation("t_end must not exceed t_start")
        if self.sweeps < 1:
            raise ContractViolation("need at least one sweep")

    @classmethod
    def default_for(cls, h: HoboTensor, sweeps: int = 1000) -> Schedule:
        t_end = 0.01
        return cls(max(10.0 * h.max_abs_coeff(), t_end), t_end, sweeps)

    def temperatures(self) -> np.ndarray:
        return np.geomspace(self.t_start, self.t_end, self.sweeps)


class Sample(NamedTuple):
    assignment: tuple[int, ...]
    energy: float
    occurrence: int


class SampleSet:
    """Distinct assignments ranked by energy, then occurrence, then bits."""

    def __init__(self, entries: Sequence[Sample] = ()):
        self.entries = list(entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, idx):
        return self.entries[idx]

    def __eq__(self, other) -> bool:
        return isinstance(other, SampleSet) and self.entries == other.entries

    def __repr__(self) -> str:
        head = ", ".join(f"({s.energy:g} x{s.occurrence})" for s in self.entries[:3])
        return f"SampleSet({len(self)} distinct, shots={self.shots}: {head}{', ...' if len(self) > 3 else ''})"

    @property
    def shots(self) -> int:
        return sum(s.occurrence for s in self.entries)

    @property
    def lowest_energy(self) -> float:
        return self.entries[0].energy if self.entries else math.inf

    def ground(self) -> list[Sample]:
        """Entries sharing the lowest energy."""
        return [s for s in self.entries if s.energy == self.lowest_energy]

    def states(self) -> np.ndarray:
        return np.array([s.assignment for s in self.entries], dtype=np.uint8)


def aggregate(raw: Iterable[tuple[Sequence[int], float]]) -> SampleSet:
    raw = list(raw)
    if not raw:
        return SampleSet()
    states = np.array([np.asarray(a, dtype=np.uint8) for a, _ in raw])
    energies = np.array([e for _, e in raw], dtype=np.float64)
    return _aggregate_arrays(states, energies)


def _aggregate_arrays(states: np.ndarray, energies: np.ndarray) -> SampleSet:
    if states.shape[0] == 0:
        return SampleSet()
    uniq, first, counts = np.unique(states, axis=0, return_index=True, return_counts=True)
    e = energies[first]
    # np.unique already sorted rows lexicographically; lexsort is stable
    order = np.lexsort((-counts, e))
    return SampleSet([Sample(tuple(int(b) for b in uniq[i]), float(e[i]), int(counts[i]))
                      for i in order])


def chain_bits(seed: int, chain: int) -> np.random.PCG64:
    """Independent bit stream for one chain, keyed by (seed, chain index)."""
    return np.random.PCG64(np.random.SeedSequence(int(seed) & _MASK64, spawn_key=(int(chain),)))


def chain_rng(seed: int, chain: int) -> np.random.Generator:
    return np.random.Generator(chain_bits(seed, chain))


def _blocks(shots: int, block: int) -> list[tuple[int, int]]:
    return [(s, min(s + block, shots)) for s in range(0, shots, block)]


def _run_blocks(fn, shots: int, block: int, workers: int):
    spans = _blocks(shots, block)
    if workers <= 1 or len(spans) == 1:
        return [fn(*span) for span in spans]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda span: fn(*span), spans))


def _check_inputs(h: HoboTensor, shots: int):
    if shots < 1:
        raise ContractViolation("shots must be a positive integer")
    if h.n < 1:
        raise ContractViolation("problem has no variables")


def sa_run(h: HoboTensor, shots: int = 10000, schedule: Schedule | None = None,
           seed: int = 42, workers: int = 1, debug: bool = False,
           block: int = 128) -> SampleSet:
    """Simulated annealing with ``shots`` independent Metropolis chains.

    Each sweep proposes a flip of every variable in index order.  Reported
    energies exclude the offset and are re-evaluated from the final states.
    ``debug`` cross-checks the incrementally tracked energy every 64
    accepted moves.
    """
    _check_inputs(h, shots)
    schedule = schedule or Schedule.default_for(h)
    temps = np.ascontiguousarray(schedule.temperatures(), dtype=np.float64)
    arr = h.arrays
    n = h.n

    def run(start: int, stop: int):
        streams = [chain_bits(seed, chain) for chain in range(start, stop)]
        states = np.zeros((stop - start, n), dtype=np.uint8)
        _, failed = _backend.kernels.sa_chains(
            arr.term_ptr, arr.term_vars, arr.coeffs, arr.var_ptr, arr.var_terms,
            temps, streams, states, 64 if debug else 0)
        if failed >= 0:
            raise NumericError(f"tracked energy of chain {start + failed} drifted")
        return states

    states = np.concatenate(_run_blocks(run, shots, block, workers))
    return _aggregate_arrays(states, energy_batch(h, states))


def _padded_terms(h: HoboTensor):
    d = max(h.d, 1)
    idx = np.full((len(h.terms), d), h.n, dtype=np.int64)
    for t, (mono, _) in enumerate(h.terms):
        idx[t, :len(mono)] = mono
    return idx


def multilinear_grad(h: HoboTensor, p) -> np.ndarray:
    """Gradient of the multilinear extension at ``p`` (one point or a batch)."""
    p = np.asarray(p, dtype=np.float64)
    single = p.ndim == 1
    P = np.atleast_2d(p)
    if P.shape[1] != h.n:
        raise DomainError(f"expected {h.n} coordinates, got {P.shape[1]}")
    if not np.all((P >= 0.0) & (P <= 1.0)):
        raise DomainError("points must lie in the unit cube")
    grad = np.zeros_like(P)
    if h.terms:
        idx = _padded_terms(h)
        coeffs = h.arrays.coeffs
        ext = np.concatenate([P, np.ones((P.shape[0], 1))], axis=1)
        vals = ext[:, idx]                                   # (S, T, d)
        ones = np.ones(vals.shape[:2] + (1,))
        before = np.cumprod(np.concatenate([ones, vals[:, :, :-1]], axis=2), axis=2)
        after = np.cumprod(np.concatenate([ones, vals[:, :, :0:-1]], axis=2), axis=2)[:, :, ::-1]
        others = before * after * coeffs[None, :, None]
        full = np.zeros((P.shape[0], h.n + 1))
        for k in range(idx.shape[1]):
            np.add.at(full.T, idx[:, k], others[:, :, k].T)
        grad = full[:, :h.n]
    return grad[0] if single else grad


def grad_run(h: HoboTensor, shots: int = 1000, steps: int = 200,
             step_size: float | None = None, seed: int = 42, workers: int = 1,
             block: int = 256) -> SampleSet:
    """Restarted gradient descent on the multilinear relaxation.

    Each restart starts from a uniform random point of the open cube,
    descends in logit coordinates (``p = sigmoid(theta)``), rounds at 0.5
    and finishes with steepest single-flip descent.  The default step size
    is ``2 / max|coeff|``.
    """
    _check_inputs(h, shots)
    if step_size is None:
        step_size = 2.0 / max(h.max_abs_coeff(), 1e-300)
    if not step_size > 0:
        raise ContractViolation("step_size must be positive")
    if steps < 1:
        raise ContractViolation("steps must be positive")
    arr = h.arrays
    n = h.n

    def run(start: int, stop: int):
        p0 = np.stack([chain_rng(seed, c).random(n) for c in range(start, stop)])
        theta = np.log(np.clip(p0, 1e-12, 1 - 1e-12)) - np.log1p(-np.clip(p0, 1e-12, 1 - 1e-12))
        for _ in range(steps):
            p = 0.5 * (1.0 + np.tanh(0.5 * theta))
            theta -= step_size * multilinear_grad(h, p) * p * (1.0 - p)
        p = 0.5 * (1.0 + np.tanh(0.5 * theta))
        states = np.ascontiguousarray(p >= 0.5, dtype=np.uint8)
        _backend.kernels.greedy_descent(arr.term_ptr, arr.term_vars, arr.coeffs,
                                        arr.var_ptr, arr.var_terms, states, 100 * n + 100)
        return states

    states = np.concatenate(_run_blocks(run, shots, block, workers))
    return _aggregate_arrays(states, energy_batch(h, states))
