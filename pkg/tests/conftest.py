import pytest
from hypothesis import HealthCheck, settings

from uavcover import (GeneratorParams, Position, ProblemInstance, Target, TimeWindow, Uav,
                      generate_random)

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

REGIMES = ((0.0, 0.3), (0.3, 0.7), (0.7, 1.0))


def random_instance(n_targets, n_uavs, regime, seed, width=20, coord=20, demand=1):
    return generate_random(GeneratorParams(n_targets, n_uavs, width, regime, coord, demand), seed)


def single_target_instance(depot=(0, 0), target=(2, 2), window=(5, 8), fuel=100.0,
                           n_uavs=1, demand=1, depot_return=True, coord=10):
    return ProblemInstance(Position(*depot),
                           (Target(0, Position(*target), TimeWindow(*window), demand),),
                           tuple(Uav(k, fuel) for k in range(n_uavs)), coord, 1.0, depot_return)


def trap_instance():
    """GA sends the nearest UAVs to the first two targets and strands the third."""
    return ProblemInstance(
        Position(5, 5),
        (Target(0, Position(6, 5), TimeWindow(16, 24)),
         Target(1, Position(1, 10), TimeWindow(16, 25)),
         Target(2, Position(4, 3), TimeWindow(3, 7))),
        (Uav(0, 80.0), Uav(1, 80.0)), 10)


@pytest.fixture
def trap():
    return trap_instance()


_CRITERIA: list[str] = []


@pytest.fixture
def criterion():
    """Record and print one acceptance line, then assert on it."""
    def record(number, passed, detail):
        line = f"CRITERION {number}: {'PASS' if passed else 'FAIL'} - {detail}"
        print(line)
        _CRITERIA.append(line)
        assert passed, line
    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
