import dataclasses

import pytest
from hypothesis import given, strategies as st

from uavcover import (Assignment, Position, ProblemInstance, Schedule, Target, TimeWindow, Uav,
                      manhattan_distance, total_fuel, validate_schedule)
from uavcover.model import (BAD_ACCOUNTING, DEMAND_UNMET, DOUBLE_BOOKED, FUEL_EXCEEDED,
                            LATE_ARRIVAL, OUT_OF_BOUNDS, default_fuel_capacity, make_schedule)

from conftest import single_target_instance

positions = st.builds(Position, st.integers(0, 50), st.integers(0, 50))


@pytest.mark.parametrize("a, b, d", [((0, 0), (0, 0), 0), ((0, 0), (3, 4), 7), ((2, 5), (5, 1), 7)])
def test_manhattan_examples(a, b, d):
    assert manhattan_distance(Position(*a), Position(*b)) == d


@given(positions, positions, positions)
def test_manhattan_metric(a, b, c):
    assert manhattan_distance(a, b) == manhattan_distance(b, a)
    assert manhattan_distance(a, c) <= manhattan_distance(a, b) + manhattan_distance(b, c)
    assert (manhattan_distance(a, b) == 0) == (a == b)


def test_time_window_rejects_empty():
    with pytest.raises(ValueError):
        TimeWindow(5, 5)
    with pytest.raises(ValueError):
        TimeWindow(-1, 4)


def test_instance_invariants():
    t = Target(0, Position(1, 1), TimeWindow(0, 5))
    with pytest.raises(ValueError):
        ProblemInstance(Position(0, 0), (), (Uav(0, 10.0),), 5)
    with pytest.raises(ValueError):
        ProblemInstance(Position(0, 0), (t,), (), 5)
    with pytest.raises(ValueError):
        ProblemInstance(Position(9, 0), (t,), (Uav(0, 10.0),), 5)
    with pytest.raises(ValueError):
        Target(0, Position(1, 1), TimeWindow(0, 5), demand=0)


def test_default_fuel_capacity():
    assert default_fuel_capacity(20) == 160.0


def _leg(uav, target, depart, arrive, window, travel, loiter=1.0):
    return Assignment(uav, target, depart, arrive, TimeWindow(*window), float(travel), loiter)


def test_total_fuel_examples():
    assert total_fuel(Schedule(())) == 0
    one = Schedule((_leg(0, 0, 0, 7, (9, 12), 7),))
    assert total_fuel(one) == 8
    two = Schedule((_leg(0, 0, 0, 7, (9, 12), 7), _leg(1, 1, 0, 3, (9, 12), 3)), {0: 4.0, 1: 2.0})
    assert total_fuel(two) == 18


@given(st.permutations(range(4)))
def test_total_fuel_order_invariant(perm):
    legs = [_leg(k, k, 0, k, (10, 12), k, 0.5) for k in range(4)]
    base = total_fuel(Schedule(tuple(legs), {0: 1.0}))
    assert total_fuel(Schedule(tuple(legs[i] for i in perm), {0: 1.0})) == base


def test_empty_schedule_is_unmet():
    inst = single_target_instance()
    report = validate_schedule(inst, Schedule(()))
    assert not report.ok and report.codes == {DEMAND_UNMET}


def test_declared_shortfall_is_not_a_violation():
    inst = single_target_instance()
    assert validate_schedule(inst, make_schedule(inst, [], [(0, 1)])).ok


def test_single_leg_feasible():
    inst = single_target_instance()
    sched = make_schedule(inst, [_leg(0, 0, 0, 4, (5, 8), 4)])
    assert sched.total_fuel == 4 + 1 + 4
    assert validate_schedule(inst, sched).ok


def test_late_arrival():
    inst = single_target_instance(window=(3, 8))
    sched = make_schedule(inst, [_leg(0, 0, 0, 4, (3, 8), 4)])
    assert validate_schedule(inst, sched).codes == {LATE_ARRIVAL}


def test_fuel_exceeded():
    inst = single_target_instance(fuel=8.0)
    sched = make_schedule(inst, [_leg(0, 0, 0, 4, (5, 8), 4)])
    assert validate_schedule(inst, sched).codes == {FUEL_EXCEEDED}


def test_unknown_ids_reported_not_raised():
    inst = single_target_instance()
    sched = make_schedule(inst, [_leg(0, 0, 0, 4, (5, 8), 4)])
    bad = dataclasses.replace(sched, assignments=sched.assignments + (_leg(7, 0, 0, 4, (5, 8), 4),))
    assert OUT_OF_BOUNDS in validate_schedule(inst, bad).codes


def test_chained_route_and_double_booking():
    inst = ProblemInstance(Position(0, 0),
                           (Target(0, Position(2, 0), TimeWindow(2, 6)),
                            Target(1, Position(4, 0), TimeWindow(8, 10))),
                           (Uav(0, 100.0),), 10)
    ok = make_schedule(inst, [_leg(0, 0, 0, 2, (2, 6), 2), _leg(0, 1, 6, 8, (8, 10), 2)])
    assert validate_schedule(inst, ok).ok
    early = make_schedule(inst, [_leg(0, 0, 0, 2, (2, 6), 2), _leg(0, 1, 5, 7, (8, 10), 2)])
    assert DOUBLE_BOOKED in validate_schedule(inst, early).codes
    # second leg claims to start from the depot
    wrong_origin = make_schedule(inst, [_leg(0, 0, 0, 2, (2, 6), 2), _leg(0, 1, 6, 10, (8, 10), 4)])
    assert DOUBLE_BOOKED in validate_schedule(inst, wrong_origin).codes


def test_bad_total():
    inst = single_target_instance()
    sched = make_schedule(inst, [_leg(0, 0, 0, 4, (5, 8), 4)])
    wrong = dataclasses.replace(sched, total_fuel=sched.total_fuel + 1)
    assert validate_schedule(inst, wrong).codes == {BAD_ACCOUNTING}


def test_no_return_leg_when_not_required():
    inst = single_target_instance(depot_return=False)
    sched = make_schedule(inst, [_leg(0, 0, 0, 4, (5, 8), 4)])
    assert sched.return_legs == {} and sched.total_fuel == 5
    assert validate_schedule(inst, sched).ok


def test_routes_are_ordered():
    sched = Schedule((_leg(0, 1, 6, 8, (8, 10), 2), _leg(0, 0, 0, 2, (2, 6), 2)))
    assert [a.target_id for a in sched.per_uav_routes[0]] == [0, 1]
