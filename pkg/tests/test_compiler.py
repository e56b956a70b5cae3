import numpy as np
import pytest

from hobokit import (ContractViolation, Polynomial, Registry, ResourceError, canonical_index,
                     compile_hobo, contract, energy_batch, hobo_spec, materialize_dense,
                     optimize_path)
from hobokit.problems import EXAMPLES, build_pythagoras, build_seating, build_tsp

from _props import all_assignments, check_compile_consistency, poly_values, random_poly
from conftest import SEATING_GRID


@pytest.mark.parametrize("mono,d,want", [((1, 3), 4, (1, 1, 1, 3)), ((2,), 3, (2, 2, 2)),
                                         ((0, 1, 2), 3, (0, 1, 2))])
def test_canonical_index(mono, d, want):
    assert canonical_index(mono, d) == want


@pytest.mark.parametrize("mono,d", [((), 3), ((0, 1, 2), 2)])
def test_canonical_index_errors(mono, d):
    with pytest.raises(ContractViolation):
        canonical_index(mono, d)


def test_offsets():
    offsets = {}
    for name, ex in EXAMPLES.items():
        b = ex.build()
        offsets[name] = compile_hobo(b.hamiltonian, b.registry)[1]
    assert offsets == {"seating": 0.0, "pythagoras": 30.0, "tsp": 360.0}


def test_tsp_shape_and_renumbering():
    b = build_tsp()
    h, _ = compile_hobo(b.hamiltonian, b.registry)
    assert h.shape == (6,) * 6
    assert h.axis_names == ("q0_0", "q0_1", "q1_0", "q1_1", "q2_0", "q2_1")


def test_single_term_dense():
    q = Registry().var_array([3], "q{}")
    h, off = compile_hobo(3 * q[0] * q[1] * q[2])
    dense = materialize_dense(h)
    assert off == 0 and dense.shape == (3, 3, 3)
    assert dense[0, 1, 2] == 3.0 and np.count_nonzero(dense) == 1


def test_constant_polynomial_uses_declared():
    reg = Registry()
    reg.var_array([4], "q{}")
    h, off = compile_hobo(Polynomial.constant(2.5), reg)
    assert off == 2.5
    assert np.array_equal(h.dense, np.zeros(4))
    with pytest.raises(ContractViolation):
        compile_hobo(Polynomial.constant(1.0))


def test_seating_dense_contraction():
    b = build_seating()
    h, _ = compile_hobo(b.hamiltonian, b.registry)
    assert h.shape == (25, 25, 25)
    spec = hobo_spec(h.n, h.d)
    x = SEATING_GRID.ravel().astype(float)
    path, _ = optimize_path(spec, "greedy")
    assert contract(spec, [x] * 3 + [h.dense], path) == -17


def test_one_cell_property(rng):
    for _ in range(40):
        reg, p = random_poly(rng, int(rng.integers(1, 8)), 4, int(rng.integers(1, 15)))
        h, _ = compile_hobo(p, reg)
        dense = h.dense
        assert np.count_nonzero(dense) == len(h.terms)
        cells = {canonical_index(m, h.d) for m, _ in h.terms}
        assert len(cells) == len(h.terms)
        for m, c in h.terms:
            assert dense[canonical_index(m, h.d)] == c


def test_evaluation_consistency():
    check_compile_consistency()


def test_pythagoras_exhaustive_consistency():
    b = build_pythagoras()
    h, off = compile_hobo(b.hamiltonian, b.registry)
    X = all_assignments(12)
    assert np.array_equal(energy_batch(h, X) + off, poly_values(b.hamiltonian, X))


def test_dense_budget():
    q = Registry().var_array([40], "q{}")
    p = q[0] * q[1] * q[2] * q[3] * q[4] * q[5] + q[39]
    h, _ = compile_hobo(p, dense_budget=1000)
    with pytest.raises(ResourceError, match="n=7, d=6"):
        h.dense


def test_term_list_and_scaling(rng):
    reg, p = random_poly(rng, 5, 3, 8)
    h, off = compile_hobo(p, reg)
    doc = h.to_term_list()
    assert doc["num_vars"] == h.n and doc["constant"] == off
    h2 = h.scaled(-2.0)
    assert [c for _, c in h2.terms] == [-2.0 * c for _, c in h.terms]
