"""Pure numpy versions of the compiled kernels.

Chains are vectorised instead of looped, but every per-chain floating
point sum is accumulated in the same order as the compiled code, so both
backends produce the same bits.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def energy_batch(term_ptr, term_vars, coeffs, X):
    out = np.zeros(X.shape[0], dtype=np.float64)
    for t in range(coeffs.shape[0]):
        on = X[:, term_vars[term_ptr[t]:term_ptr[t + 1]]].all(axis=1)
        out[on] += coeffs[t]
    return out


def _count_zeros(states, term_ptr, term_vars):
    nterms = term_ptr.shape[0] - 1
    zeros = np.empty((states.shape[0], nterms), dtype=np.int32)
    for t in range(nterms):
        zeros[:, t] = (states[:, term_vars[term_ptr[t]:term_ptr[t + 1]]] == 0).sum(axis=1)
    return zeros


def _fresh(zeros, coeffs):
    e = np.zeros(zeros.shape[0])
    for t in range(coeffs.shape[0]):
        e[zeros[:, t] == 0] += coeffs[t]
    return e


def _delta(v, states, zeros, var_ptr, var_terms, coeffs):
    xv = states[:, v]
    need = 1 - xv.astype(np.int32)
    field = np.zeros(states.shape[0])
    for t in var_terms[var_ptr[v]:var_ptr[v + 1]]:
        hit = zeros[:, t] == need
        field[hit] += coeffs[t]
    return np.where(xv == 1, -field, field)


def _flip(rows, v, states, zeros, var_ptr, var_terms):
    ts = var_terms[var_ptr[v]:var_ptr[v + 1]]
    step = np.where(states[rows, v] == 1, 1, -1).astype(np.int32)
    zeros[np.ix_(rows, ts)] += step[:, None]
    states[rows, v] = 1 - states[rows, v]


def sa_chains(term_ptr, term_vars, coeffs, var_ptr, var_terms, temps, bit_generators,
              states, check_every=0):
    chains, n = states.shape
    draws = n * (len(temps) + 1)
    uniforms = np.stack([np.random.Generator(bg).random(draws) for bg in bit_generators])
    states[:] = uniforms[:, :n] < 0.5
    zeros = _count_zeros(states, term_ptr, term_vars)
    energy = _fresh(zeros, coeffs)
    accepted = np.zeros(chains, dtype=np.int64)
    failed = -1
    k = n
    with np.errstate(over="ignore", under="ignore"):
        for T in temps:
            for v in range(n):
                u = uniforms[:, k]
                k += 1
                de = _delta(v, states, zeros, var_ptr, var_terms, coeffs)
                ok = (de <= 0.0) | (u < np.exp(-de / T))
                rows = np.flatnonzero(ok)
                if rows.size == 0:
                    continue
                _flip(rows, v, states, zeros, var_ptr, var_terms)
                energy[rows] += de[rows]
                accepted[rows] += 1
                if check_every > 0:
                    due = rows[accepted[rows] % check_every == 0]
                    if due.size:
                        fresh = _fresh(zeros[due], coeffs)
                        bad = np.abs(fresh - energy[due]) > 1e-9 * (1.0 + np.abs(fresh))
                        if bad.any():
                            first = int(due[bad].min())
                            failed = first if failed < 0 else min(failed, first)
    return energy, failed


def greedy_descent(term_ptr, term_vars, coeffs, var_ptr, var_terms, states, max_moves):
    chains, n = states.shape
    zeros = _count_zeros(states, term_ptr, term_vars)
    active = np.arange(chains)
    for _ in range(max_moves):
        if active.size == 0:
            break
        sub_states = states[active]
        sub_zeros = zeros[active]
        de = np.stack([_delta(v, sub_states, sub_zeros, var_ptr, var_terms, coeffs)
                       for v in range(n)], axis=1)
        best = np.argmin(de, axis=1)
        improving = de[np.arange(active.size), best] < 0.0
        active = active[improving]
        for v in np.unique(best[improving]):
            rows = active[best[improving] == v]
            _flip(rows, v, states, zeros, var_ptr, var_terms)
