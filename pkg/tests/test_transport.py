from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

from uavcover import (Position, ProblemInstance, Target, TimeWindow, Uav, UavState,
                      build_lp_model, build_transportation, cluster_targets, ready_uavs,
                      solve_lp_simplex, solve_transportation_bruteforce,
                      solve_transportation_simplex)
from uavcover.transport import (ResourceCapError, Sink, Source, TransportationProblem, UnbalancedError,
                                big_cost, can_serve, format_transportation, make_problem)

GOLDEN = Path(__file__).parent / "golden"
SOLVERS = {
    "modi": solve_transportation_simplex,
    "brute": solve_transportation_bruteforce,
    "lp": lambda tp: solve_lp_simplex(build_lp_model(tp), tp),
}


def random_balanced(rng, max_m=4, max_n=4, max_q=3, max_c=50):
    """Rejection-sample marginals until they balance."""
    while True:
        m, n = int(rng.integers(1, max_m + 1)), int(rng.integers(1, max_n + 1))
        supplies = rng.integers(1, max_q + 1, size=m)
        demands = rng.integers(1, max_q + 1, size=n)
        if supplies.sum() == demands.sum():
            break
    cost = rng.integers(0, max_c + 1, size=(m, n))
    return make_problem(supplies, demands, cost)


def _check_marginals(tp, flow):
    assert (flow.x >= 0).all()
    assert (flow.x.sum(axis=1) == tp.supplies).all()
    assert (flow.x.sum(axis=0) == tp.demands).all()
    assert flow.objective == pytest.approx(float((flow.x * tp.cost).sum()), abs=1e-9)


@pytest.mark.parametrize("name", SOLVERS)
def test_one_by_one(name):
    tp = make_problem([3], [3], [[4]])
    flow = SOLVERS[name](tp)
    assert flow.x.tolist() == [[3]] and flow.objective == 12


@pytest.mark.parametrize("name", SOLVERS)
def test_two_by_two_example(name):
    tp = make_problem([2, 1], [1, 2], [[1, 3], [2, 1]])
    flow = SOLVERS[name](tp)
    assert flow.objective == 5
    assert flow.x.tolist() == [[1, 1], [0, 1]]


@pytest.mark.parametrize("name", SOLVERS)
def test_unbalanced_rejected(name):
    tp = TransportationProblem([Source(None, 2)], [Sink(0, 1)], np.array([[1.0]]))
    with pytest.raises(UnbalancedError):
        SOLVERS[name](tp)


def test_three_way_agreement_sample():
    rng = np.random.default_rng(11)
    for _ in range(200):
        tp = random_balanced(rng)
        flows = [f(tp) for f in SOLVERS.values()]
        for flow in flows:
            _check_marginals(tp, flow)
        assert flows[0].objective == flows[1].objective == flows[2].objective
        assert (flows[0].x == flows[1].x).all() and (flows[0].x == flows[2].x).all()


@given(st.integers(0, 2**32 - 1), st.sampled_from([0.5, 2.0, 3.0, 10.0]))
def test_cost_scaling(seed, lam):
    tp = random_balanced(np.random.default_rng(seed))
    scaled = make_problem(tp.supplies, tp.demands, tp.cost * lam)
    for solve in SOLVERS.values():
        a, b = solve(tp), solve(scaled)
        assert b.objective == pytest.approx(lam * a.objective, abs=1e-9)
        assert (a.x == b.x).all()


@given(st.lists(st.integers(1, 3), min_size=1, max_size=4),
       st.lists(st.integers(1, 3), min_size=1, max_size=4), st.integers(0, 2**32 - 1))
def test_dummy_flows(supplies, demands, seed):
    rng = np.random.default_rng(seed)
    cost = rng.integers(0, 20, size=(len(supplies), len(demands)))
    tp = make_problem(supplies, demands, cost)
    assert tp.is_balanced()
    s, d = sum(supplies), sum(demands)
    for solve in SOLVERS.values():
        flow = solve(tp)
        _check_marginals(tp, flow)
        assert flow.shipped_from_dummy(tp) == max(0, d - s)
        assert flow.shipped_to_dummy(tp) == max(0, s - d)


def test_big_edges_used_only_when_forced():
    tp = make_problem([1, 1], [1, 1], [[1, 1], [1, 1]], feasible=[[True, True], [True, False]])
    assert tp.big == big_cost(np.ones((2, 2)), np.array([[1, 1], [1, 0]], bool), 2) == 7
    for solve in SOLVERS.values():
        assert solve(tp).x.tolist() == [[0, 1], [1, 0]]


def test_modi_pivot_cap():
    rng = np.random.default_rng(3)
    for _ in range(50):
        tp = random_balanced(rng)
        if solve_transportation_simplex(tp).pivots > 0:
            with pytest.raises(ResourceCapError):
                solve_transportation_simplex(tp, max_pivots=0)
            return
    pytest.fail("no problem needed a pivot")


def test_bruteforce_node_cap():
    tp = make_problem([3] * 4, [3] * 4, np.arange(16).reshape(4, 4))
    with pytest.raises(ResourceCapError, match="node cap"):
        solve_transportation_bruteforce(tp, node_cap=10)


def test_lp_shape():
    tp = make_problem([2, 1], [1, 2], [[1, 3], [2, 1]])
    model = build_lp_model(tp)
    assert model.a_eq.shape == (4, 4)
    assert (model.lower == 0).all() and np.isinf(model.upper).all()
    one = build_lp_model(make_problem([3], [3], [[2]]))
    assert one.a_eq.tolist() == [[1.0], [1.0]] and one.b_eq.tolist() == [3.0, 3.0]


def _rank(rows):
    """Exact rank by Gaussian elimination over the rationals."""
    a = [[Fraction(int(v)) for v in row] for row in rows]
    rank, cols = 0, len(a[0]) if a else 0
    for col in range(cols):
        pivot = next((r for r in range(rank, len(a)) if a[r][col] != 0), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        for r in range(len(a)):
            if r != rank and a[r][col] != 0:
                f = a[r][col] / a[rank][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


def test_lp_rank():
    rng = np.random.default_rng(5)
    for _ in range(50):
        tp = random_balanced(rng)
        m, n = tp.shape
        assert _rank(build_lp_model(tp).a_eq) == m + n - 1


def _fleet_instance():
    return ProblemInstance(Position(10, 10),
                           (Target(0, Position(12, 12), TimeWindow(10, 20), 2),),
                           tuple(Uav(k, 160.0) for k in range(3)), 20)


def test_readiness_examples():
    inst = _fleet_instance()
    state = UavState(0, Position(10, 10), 0, 160.0)
    t = inst.targets[0]
    assert can_serve(state, t, inst)
    assert not can_serve(state, Target(1, t.position, TimeWindow(3, 20)), inst)
    assert not can_serve(UavState(0, Position(10, 10), 0, 3.0), t, inst.with_depot_return(False))


def test_conversion_three_at_depot():
    inst = _fleet_instance()
    states = inst.initial_states()
    cluster = cluster_targets(inst.targets)[0]
    ready = ready_uavs(states, cluster, inst.targets, inst)
    tp = build_transportation(ready, cluster, inst.targets, inst)
    assert [s.supply for s in tp.sources] == [3]
    assert [s.uav_ids for s in tp.sources] == [(0, 1, 2)]
    assert [d.demand for d in tp.sinks] == [2, 1] and tp.dummy_sink == 1


def test_conversion_shortfall():
    inst = ProblemInstance(Position(0, 0), (Target(0, Position(1, 1), TimeWindow(5, 9), 3),),
                           (Uav(0, 50.0),), 5)
    cluster = cluster_targets(inst.targets)[0]
    tp = build_transportation(inst.initial_states(), cluster, inst.targets, inst)
    assert tp.dummy_source == 1 and tp.sources[1].supply == 2
    assert solve_transportation_simplex(tp).shipped_from_dummy(tp) == 2


def test_conversion_distinct_positions():
    inst = ProblemInstance(Position(0, 0),
                           (Target(0, Position(1, 1), TimeWindow(20, 29)),
                            Target(1, Position(4, 4), TimeWindow(20, 30))),
                           (Uav(0, 80.0), Uav(1, 80.0)), 5)
    states = inst.initial_states()
    states[1].position = Position(5, 5)
    cluster = cluster_targets(inst.targets)[0]
    tp = build_transportation(states, cluster, inst.targets, inst)
    assert tp.shape == (2, 2) and tp.dummy_source is None and tp.dummy_sink is None
    assert tp.cost.tolist() == [[2, 8], [8, 2]]


def test_groups_split_by_fuel():
    inst = ProblemInstance(Position(0, 0),
                           (Target(0, Position(1, 0), TimeWindow(20, 29)),
                            Target(1, Position(5, 5), TimeWindow(20, 30))),
                           (Uav(0, 80.0), Uav(1, 80.0)), 5)
    states = inst.initial_states()
    states[1].fuel_remaining = 5.0     # can reach the near target only
    cluster = cluster_targets(inst.targets)[0]
    tp = build_transportation(states, cluster, inst.targets, inst)
    assert [s.uav_ids for s in tp.sources] == [(0,), (1,)]
    assert tp.feasible.tolist() == [[True, True], [True, False]]


def test_golden_dump():
    tp = make_problem([3, 2], [2, 1, 1], [[5, 2, 7], [1, 4, 3]],
                      feasible=[[True, True, False], [True, True, True]])
    text = format_transportation(tp, solve_transportation_simplex(tp))
    assert text == (GOLDEN / "transport_dump.txt").read_text()
