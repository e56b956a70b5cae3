# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops for energy evaluation, annealing and local descent.

Signatures and results mirror ``hobokit._fallback`` exactly, including the
order in which floating point sums are accumulated.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, fabs
from libc.stdlib cimport malloc, free
from cpython.pycapsule cimport PyCapsule_GetPointer
from numpy.random cimport bitgen_t

cnp.import_array()

ctypedef cnp.int64_t i64
ctypedef cnp.uint8_t u8

BACKEND = "compiled"


def energy_batch(const i64[::1] term_ptr, const i64[::1] term_vars,
                 const double[::1] coeffs, const u8[:, ::1] X):
    cdef Py_ssize_t shots = X.shape[0], nterms = coeffs.shape[0]
    cdef Py_ssize_t s, t, p
    cdef double e
    cdef bint on
    out = np.zeros(shots, dtype=np.float64)
    cdef double[::1] res = out
    with nogil:
        for s in range(shots):
            e = 0.0
            for t in range(nterms):
                on = True
                for p in range(term_ptr[t], term_ptr[t + 1]):
                    if X[s, term_vars[p]] == 0:
                        on = False
                        break
                if on:
                    e = e + coeffs[t]
            res[s] = e
    return out


cdef struct Terms:
    # borrowed pointers into the CSR arrays of a HoboTensor
    const i64* term_ptr
    const i64* term_vars
    const double* coeffs
    const i64* var_ptr
    const i64* var_terms
    double* var_coeffs
    Py_ssize_t nterms


cdef inline double _field(const Terms* T, Py_ssize_t v, u8 xv,
                          const int* zeros) noexcept nogil:
    # sum of coefficients of terms through v whose other variables are all 1
    # branch-free: adding +0.0 never changes a sum of nonzero coefficients
    cdef double f = 0.0
    cdef Py_ssize_t p
    cdef int need = 1 - xv
    for p in range(T.var_ptr[v], T.var_ptr[v + 1]):
        f = f + T.var_coeffs[p] * <double>(zeros[T.var_terms[p]] == need)
    return f


cdef inline void _count_zeros(const Terms* T, const u8* x, int* zeros) noexcept nogil:
    cdef Py_ssize_t t, p
    cdef int z
    for t in range(T.nterms):
        z = 0
        for p in range(T.term_ptr[t], T.term_ptr[t + 1]):
            if x[T.term_vars[p]] == 0:
                z += 1
        zeros[t] = z


cdef inline void _flip(const Terms* T, u8* x, Py_ssize_t v, int* zeros) noexcept nogil:
    cdef Py_ssize_t p
    cdef int delta = 1 if x[v] == 1 else -1
    for p in range(T.var_ptr[v], T.var_ptr[v + 1]):
        zeros[T.var_terms[p]] += delta
    x[v] = 1 - x[v]


cdef inline double _fresh(const Terms* T, const int* zeros) noexcept nogil:
    cdef double e = 0.0
    cdef Py_ssize_t t
    for t in range(T.nterms):
        if zeros[t] == 0:
            e = e + T.coeffs[t]
    return e


cdef Terms _terms(const i64[::1] term_ptr, const i64[::1] term_vars,
                  const double[::1] coeffs, const i64[::1] var_ptr,
                  const i64[::1] var_terms) except *:
    # caller owns T.var_coeffs
    cdef Terms T
    T.nterms = coeffs.shape[0]
    T.term_ptr = &term_ptr[0]
    T.term_vars = &term_vars[0] if term_vars.shape[0] else NULL
    T.coeffs = &coeffs[0] if coeffs.shape[0] else NULL
    T.var_ptr = &var_ptr[0]
    T.var_terms = &var_terms[0] if var_terms.shape[0] else NULL
    T.var_coeffs = <double*> malloc(max(var_terms.shape[0], 1) * sizeof(double))
    if T.var_coeffs == NULL:
        raise MemoryError()
    cdef Py_ssize_t p
    for p in range(var_terms.shape[0]):
        T.var_coeffs[p] = coeffs[var_terms[p]]
    return T


def sa_chains(const i64[::1] term_ptr, const i64[::1] term_vars,
              const double[::1] coeffs, const i64[::1] var_ptr,
              const i64[::1] var_terms, const double[::1] temps,
              list bit_generators, u8[:, ::1] states, int check_every=0):
    """Run one Metropolis chain per numpy bit generator.

    Each chain draws n uniforms for its initial state, then one per
    proposal.  Final states are written to ``states``; returns the tracked
    energies and the index of the first chain whose tracked energy drifted
    from a fresh evaluation (-1 if none).  The comparison only runs when
    ``check_every > 0``, after every ``check_every`` accepted moves.
    """
    cdef Py_ssize_t chains = len(bit_generators), n = states.shape[1]
    cdef Py_ssize_t sweeps = temps.shape[0]
    cdef Py_ssize_t c, v, s
    cdef double e, de, temp, u, x, fresh
    cdef long accepted
    cdef Py_ssize_t failed = -1
    cdef bitgen_t* rng
    cdef u8* row
    if states.shape[0] != chains:
        raise ValueError("one state row per bit generator required")
    cdef Terms T = _terms(term_ptr, term_vars, coeffs, var_ptr, var_terms)
    tracked_arr = np.zeros(chains, dtype=np.float64)
    cdef double[::1] tracked = tracked_arr
    cdef bitgen_t** rngs = <bitgen_t**> malloc(max(chains, 1) * sizeof(bitgen_t*))
    cdef int* zeros = <int*> malloc(max(T.nterms, 1) * sizeof(int))
    if zeros == NULL or rngs == NULL:
        free(zeros)
        free(rngs)
        free(T.var_coeffs)
        raise MemoryError()
    for c in range(chains):
        rngs[c] = <bitgen_t*> PyCapsule_GetPointer(bit_generators[c].capsule, "BitGenerator")
    try:
        with nogil:
            for c in range(chains):
                rng = rngs[c]
                row = &states[c, 0]
                for v in range(n):
                    row[v] = 1 if rng.next_double(rng.state) < 0.5 else 0
                _count_zeros(&T, row, zeros)
                e = _fresh(&T, zeros)
                accepted = 0
                for s in range(sweeps):
                    temp = temps[s]
                    for v in range(n):
                        u = rng.next_double(rng.state)
                        de = _field(&T, v, row[v], zeros)
                        if row[v] == 1:
                            de = -de
                        x = -de / temp
                        # below -40, exp(x) < 2**-53, the smallest nonzero draw
                        if de <= 0.0 or (u < exp(x) if x > -40.0 else u == 0.0):
                            _flip(&T, row, v, zeros)
                            e = e + de
                            accepted += 1
                            if check_every > 0 and accepted % check_every == 0:
                                fresh = _fresh(&T, zeros)
                                if fabs(fresh - e) > 1e-9 * (1.0 + fabs(fresh)):
                                    if failed < 0:
                                        failed = c
                tracked[c] = e
    finally:
        free(zeros)
        free(rngs)
        free(T.var_coeffs)
    return tracked_arr, failed


def greedy_descent(const i64[::1] term_ptr, const i64[::1] term_vars,
                   const double[::1] coeffs, const i64[::1] var_ptr,
                   const i64[::1] var_terms, u8[:, ::1] states,
                   Py_ssize_t max_moves):
    """Steepest single-flip descent, in place; ties go to the lowest index."""
    cdef Py_ssize_t chains = states.shape[0], n = states.shape[1]
    cdef Py_ssize_t c, v, best, moves
    cdef double de, best_de
    cdef u8* row
    cdef Terms T = _terms(term_ptr, term_vars, coeffs, var_ptr, var_terms)
    cdef int* zeros = <int*> malloc(max(T.nterms, 1) * sizeof(int))
    if zeros == NULL:
        free(T.var_coeffs)
        raise MemoryError()
    try:
        with nogil:
            for c in range(chains):
                row = &states[c, 0]
                _count_zeros(&T, row, zeros)
                for moves in range(max_moves):
                    best = -1
                    best_de = 0.0
                    for v in range(n):
                        de = _field(&T, v, row[v], zeros)
                        if row[v] == 1:
                            de = -de
                        if de < best_de:
                            best_de = de
                            best = v
                    if best < 0:
                        break
                    _flip(&T, row, best, zeros)
    finally:
        free(zeros)
        free(T.var_coeffs)
