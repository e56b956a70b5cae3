"""Singular value and tensor-train decompositions of dense tensors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ContractViolation, NumericError, SpecError, StructureError
from .tensor import EinsumSpec

DEFAULT_REL_TOL = 1e-12
_EPS = np.finfo(np.float64).eps
_MAX_SWEEPS = 60

PHYSICAL_LABELS = "ijklmnopqrstuvwxyzabcdefgh"
BOND_LABELS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


@dataclass(frozen=True, eq=False)
class SvdResult:
    """``A ~ U @ diag(S) @ V.T`` with S non-increasing."""

    U: np.ndarray
    S: np.ndarray
    V: np.ndarray

    @property
    def rank(self) -> int:
        return self.S.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.S) @ self.V.T


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    # n-1 rounds of n/2 disjoint pairs covering every pair once (circle method)
    m = n + (n % 2)
    ring = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(ring[i], ring[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p < n and q < n]
        if pairs:
            rounds.append((np.array([p for p, _ in pairs]), np.array([q for _, q in pairs])))
        ring = [ring[0], ring[-1]] + ring[1:-1]
    return rounds


def _jacobi(W: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One-sided Jacobi on a tall matrix: returns (W @ V, V) with orthogonal columns."""
    n = W.shape[1]
    V = np.eye(n)
    rounds = _round_robin(n)
    for _ in range(_MAX_SWEEPS):
        rotated = False
        for P, Q in rounds:
            wp, wq = W[:, P], W[:, Q]
            alpha = np.einsum("ij,ij->j", wp, wp)
            beta = np.einsum("ij,ij->j", wq, wq)
            gamma = np.einsum("ij,ij->j", wp, wq)
            act = np.abs(gamma) > _EPS * np.sqrt(alpha * beta)
            if not act.any():
                continue
            rotated = True
            P, Q = P[act], Q[act]
            alpha, beta, gamma = alpha[act], beta[act], gamma[act]
            # tan of the rotation angle, written so that nothing overflows
            diff = beta - alpha
            t = np.where(diff >= 0, 2.0, -2.0) * gamma / (np.abs(diff) + np.hypot(diff, 2.0 * gamma))
            c = 1.0 / np.hypot(1.0, t)
            s = c * t
            for M in (W, V):
                mp, mq = M[:, P], M[:, Q]
                M[:, P] = c * mp - s * mq
                M[:, Q] = s * mp + c * mq
        if not rotated:
            break
    return W, V


def svd(A, rel_tol: float = DEFAULT_REL_TOL) -> SvdResult:
    """Thin SVD by one-sided Jacobi rotations, truncated at ``rel_tol * sigma_max``.

    Singular values strictly above the cutoff are kept.  A zero matrix comes
    back as rank 1 with zero factor columns.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise ContractViolation(f"svd needs a matrix, got order {A.ndim}")
    if not 0.0 <= rel_tol < 1.0:
        raise ContractViolation("rel_tol must lie in [0, 1)")
    if not np.all(np.isfinite(A)):
        raise NumericError("matrix has non-finite entries")
    m, n = A.shape
    if m < n:
        res = svd(A.T, rel_tol)
        return SvdResult(res.V, res.S, res.U)
    # work at unit scale so squared column norms cannot overflow
    scale = np.abs(A).max() if A.size else 0.0
    W, V = _jacobi(A / scale if scale > 0 else A.copy())
    sigma = np.sqrt(np.einsum("ij,ij->j", W, W))
    order = np.argsort(-sigma, kind="stable")
    sigma, W, V = sigma[order], W[:, order], V[:, order]
    smax = sigma[0] if n else 0.0
    if smax == 0.0:
        return SvdResult(np.zeros((m, 1)), np.zeros(1), np.zeros((n, 1)))
    keep = int(np.count_nonzero(sigma > rel_tol * smax))
    S = sigma[:keep]
    return SvdResult(W[:, :keep] / S, S * scale, np.ascontiguousarray(V[:, :keep]))


def _as_core(core, first: bool, last: bool) -> np.ndarray:
    core = np.asarray(core, dtype=np.float64)
    if core.ndim == 3:
        return core
    if core.ndim == 1 and first and last:
        return core.reshape(1, -1, 1)
    if core.ndim == 2 and first and not last:
        return core[None, :, :]
    if core.ndim == 2 and last and not first:
        return core[:, :, None]
    raise StructureError(f"core of order {core.ndim} is not valid at this position")


class TTTrain:
    """Order-3 cores ``G_k`` of shape ``(r_{k-1}, n_k, r_k)`` with ``r_0 = r_d = 1``.

    Boundary cores may be passed squeezed, as ``(n_1, r_1)`` and ``(r_{d-1}, n_d)``.
    """

    def __init__(self, cores: Sequence):
        cores = list(cores)
        if not cores:
            raise StructureError("a train needs at least one core")
        last = len(cores) - 1
        self.cores = [_as_core(c, k == 0, k == last) for k, c in enumerate(cores)]

    def __len__(self) -> int:
        return len(self.cores)

    def __iter__(self):
        return iter(self.cores)

    def __repr__(self) -> str:
        return f"TTTrain({self.shapes()})"

    @property
    def ranks(self) -> list[int]:
        return [c.shape[0] for c in self.cores] + [self.cores[-1].shape[2]]

    @property
    def extents(self) -> list[int]:
        return [c.shape[1] for c in self.cores]

    def validate(self) -> None:
        if self.cores[0].shape[0] != 1 or self.cores[-1].shape[2] != 1:
            raise StructureError("boundary ranks must be 1")
        for k in range(len(self.cores) - 1):
            a, b = self.cores[k].shape[2], self.cores[k + 1].shape[0]
            if a != b:
                raise StructureError(f"bond {k}: core {k} has {a} columns, core {k + 1} has {b} rows")

    def squeezed(self) -> list[np.ndarray]:
        """Cores with the unit boundary axes dropped."""
        if len(self.cores) == 1:
            return [self.cores[0][0, :, 0]]
        return ([self.cores[0][0]] + self.cores[1:-1] + [self.cores[-1][:, :, 0]])

    def shapes(self) -> list[tuple[int, ...]]:
        return [tuple(c.shape) for c in self.squeezed()]


def tt_decompose(t, rel_tol: float = DEFAULT_REL_TOL) -> TTTrain:
    """Left-to-right TT-SVD sweep.

    Unfold, factor with :func:`svd`, keep ``U`` as the core and carry
    ``diag(S) @ V.T`` into the next unfolding.
    """
    t = np.asarray(t, dtype=np.float64)
    if t.ndim < 2:
        raise ContractViolation("tensor-train decomposition needs order >= 2")
    shape = t.shape
    cores = []
    carry = t
    r = 1
    for k in range(t.ndim - 1):
        res = svd(carry.reshape(r * shape[k], -1), rel_tol)
        cores.append(res.U.reshape(r, shape[k], res.rank))
        carry = res.S[:, None] * res.V.T
        r = res.rank
    cores.append(carry.reshape(r, shape[-1], 1))
    return TTTrain(cores)


def tt_reconstruct(train: TTTrain) -> np.ndarray:
    train.validate()
    out = train.cores[0]
    for core in train.cores[1:]:
        out = np.tensordot(out, core, axes=([out.ndim - 1], [0]))
    return out[0, ..., 0]


def tt_contraction_spec(train: TTTrain, with_vector_labels: bool = True) -> EinsumSpec:
    """Spec contracting the train, e.g. ``i,j,k,l,m,n,iA,AjB,BkC,ClD,DmE,En->``.

    Operands follow :meth:`TTTrain.squeezed`.  Without vector labels the
    physical axes stay open and the spec reconstructs the tensor.
    """
    train.validate()
    d = len(train)
    if d > len(PHYSICAL_LABELS) or d - 1 > len(BOND_LABELS):
        raise SpecError(f"a train of {d} cores exceeds the label alphabet")
    phys = PHYSICAL_LABELS[:d]
    terms = [(BOND_LABELS[k - 1] if k else "") + phys[k] + (BOND_LABELS[k] if k < d - 1 else "")
             for k in range(d)]
    dims = {phys[k]: n for k, n in enumerate(train.extents)}
    dims.update({BOND_LABELS[k]: r for k, r in enumerate(train.ranks[1:-1])})
    if with_vector_labels:
        return EinsumSpec(tuple(phys) + tuple(terms), "", dims)
    return EinsumSpec(tuple(terms), phys, dims)


def tt_operands(train: TTTrain, x) -> list[np.ndarray]:
    """Operands for ``tt_contraction_spec(train)`` with the same vector on every axis."""
    x = np.asarray(x, dtype=np.float64)
    return [x] * len(train) + train.squeezed()
