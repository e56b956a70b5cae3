import numpy as np
import pytest

from hobokit import (ContractViolation, DomainError, Polynomial, Registry, Sample, SampleSet,
                     Schedule, aggregate, compile_hobo, energy_batch, grad_run, multilinear_grad,
                     sa_run)
from hobokit.problems import build_seating, build_tsp

from _props import brute_force_min, check_gradient, check_sampler_determinism, random_poly
from conftest import tsp_bits

TSP_GROUND = {tuple(tsp_bits(*p)) for p in
              [(1, 2, 3), (1, 3, 2), (2, 1, 3), (2, 3, 1), (3, 1, 2), (3, 2, 1)]}


@pytest.mark.parametrize("args", [(0.0, 0.01, 10), (1.0, 2.0, 10), (1.0, 0.5, 0), (1.0, -1.0, 5)])
def test_schedule_validation(args):
    with pytest.raises(ContractViolation):
        Schedule(*args)


def test_schedule_geometric():
    t = Schedule(100.0, 0.01, 5).temperatures()
    assert t[0] == 100.0 and np.isclose(t[-1], 0.01)
    assert np.allclose(t[1:] / t[:-1], t[1] / t[0])
    q = Registry().var_array([2], "q{}")
    h, _ = compile_hobo(3 * q[0] - 7 * q[0] * q[1])
    assert Schedule.default_for(h).t_start == 70.0


def test_aggregate_examples():
    s = aggregate([((0, 1), -1.0), ((0, 1), -1.0), ((1, 0), 0.0)])
    assert s.entries == [Sample((0, 1), -1.0, 2), Sample((1, 0), 0.0, 1)]
    assert aggregate([]) == SampleSet() and len(aggregate([])) == 0
    tie = aggregate([((1, 1), 0.0), ((0, 0), 0.0), ((0, 0), 0.0), ((1, 0), 0.0)])
    assert [s.assignment for s in tie] == [(0, 0), (1, 0), (1, 1)]


def test_single_variable_minimum():
    q = Registry().var_array([1], "q{}")
    h, _ = compile_hobo(q[0] + 0)
    for seed in (0, 1, 99):
        s = sa_run(h, 100, Schedule.default_for(h, 50), seed=seed)
        assert s[0].assignment == (0,) and s[0].energy == 0.0
        assert s.shots == 100


def test_shots_must_be_positive():
    q = Registry().var_array([1], "q{}")
    h, _ = compile_hobo(q[0] + 0)
    with pytest.raises(ContractViolation):
        sa_run(h, 0)
    with pytest.raises(ContractViolation):
        grad_run(h, 0)
    with pytest.raises(ContractViolation):
        grad_run(h, 10, step_size=0.0)


def test_tsp_sa_ground_states():
    b = build_tsp()
    h, _ = compile_hobo(b.hamiltonian, b.registry)
    best, states = brute_force_min(h)
    assert best == -360.0 and {tuple(s) for s in states} == TSP_GROUND
    s = sa_run(h, 500, Schedule.default_for(h, 200), seed=3)
    assert s.lowest_energy == -360.0
    assert {smp.assignment for smp in s.ground()} <= TSP_GROUND


def test_energy_honesty_and_invariants():
    b = build_seating(4)
    h, _ = compile_hobo(b.hamiltonian, b.registry)
    s = sa_run(h, 400, Schedule.default_for(h, 60), seed=11, debug=True)
    assert s.shots == 400
    assert np.array_equal(energy_batch(h, s.states()), [e.energy for e in s])
    assert len({e.assignment for e in s}) == len(s)
    keys = [(e.energy, -e.occurrence, e.assignment) for e in s]
    assert keys == sorted(keys)
    assert s.lowest_energy >= brute_force_min(h)[0]


def test_minimum_never_below_brute_force(rng):
    for _ in range(8):
        reg, p = random_poly(rng, int(rng.integers(2, 10)), 4, 12)
        h, _ = compile_hobo(p, reg)
        best, _ = brute_force_min(h)
        s = sa_run(h, 64, Schedule.default_for(h, 40), seed=int(rng.integers(1 << 31)))
        assert s.lowest_energy >= best
        assert grad_run(h, 32, steps=20, seed=1).lowest_energy >= best


def test_gradient_examples():
    q = Registry().var_array([2], "q{}")
    h, _ = compile_hobo(q[0] * q[1])
    assert np.allclose(multilinear_grad(h, [0.5, 0.5]), [0.5, 0.5])
    reg = Registry()
    reg.var_array([3], "q{}")
    hc, _ = compile_hobo(Polynomial.constant(4.0), reg)
    assert np.array_equal(multilinear_grad(hc, [0.2, 0.7, 0.1]), np.zeros(3))
    with pytest.raises(DomainError):
        multilinear_grad(h, [0.5, 1.5])
    with pytest.raises(DomainError):
        multilinear_grad(h, [0.5])


def test_gradient_finite_differences():
    check_gradient()


def test_grad_run_examples():
    q = Registry().var_array([2], "q{}")
    h, _ = compile_hobo(-1 * q[0])
    s = grad_run(h, 20, steps=10)
    assert s[0].assignment == (1,) and s[0].energy == -1.0

    h, off = compile_hobo((q[0] + q[1] - 1) ** 2)
    best, states = brute_force_min(h)
    s = grad_run(h, 50, steps=50, seed=5)
    assert s.lowest_energy == best == -1.0 and off == 1.0
    assert {smp.assignment for smp in s.ground()} == {tuple(x) for x in states}


def test_grad_run_tsp():
    b = build_tsp()
    h, _ = compile_hobo(b.hamiltonian, b.registry)
    s = grad_run(h, 1000, steps=200)
    assert s.lowest_energy == -360.0
    assert {smp.assignment for smp in s.ground()} <= TSP_GROUND


def test_determinism():
    check_sampler_determinism()
    b = build_tsp()
    h, _ = compile_hobo(b.hamiltonian, b.registry)
    sched = Schedule.default_for(h, 30)
    assert sa_run(h, 100, sched, seed=1) == sa_run(h, 100, sched, seed=1)
    assert sa_run(h, 100, sched, seed=1) != sa_run(h, 100, sched, seed=2)
