"""Problem and solution data types, fuel accounting and the schedule validator."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

FUEL_TOL = 1e-9

LATE_ARRIVAL = "LATE_ARRIVAL"
DOUBLE_BOOKED = "DOUBLE_BOOKED"
FUEL_EXCEEDED = "FUEL_EXCEEDED"
DEMAND_UNMET = "DEMAND_UNMET"
OUT_OF_BOUNDS = "OUT_OF_BOUNDS"
BAD_ACCOUNTING = "BAD_ACCOUNTING"


@dataclass(frozen=True, order=True)
class Position:
    x: int
    y: int


@dataclass(frozen=True)
class TimeWindow:
    start: int
    end: int

    def __post_init__(self):
        if self.start < 0:
            raise ValueError(f"window start must be >= 0, got {self.start}")
        if self.end <= self.start:
            raise ValueError(f"window end {self.end} must be after start {self.start}")

    @property
    def length(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class Target:
    id: int
    position: Position
    window: TimeWindow
    demand: int = 1

    def __post_init__(self):
        if self.demand < 1:
            raise ValueError(f"target {self.id}: demand must be >= 1")


@dataclass(frozen=True)
class Uav:
    id: int
    fuel_capacity: float

    def __post_init__(self):
        if self.fuel_capacity < 0:
            raise ValueError(f"uav {self.id}: negative fuel capacity")


@dataclass
class UavState:
    """Mutable position/clock/fuel of one UAV during a single planner run."""

    uav_id: int
    position: Position
    available_at: int
    fuel_remaining: float


def default_fuel_capacity(largest_coordinate: int) -> float:
    return 4.0 * (2 * largest_coordinate)


@dataclass(frozen=True)
class ProblemInstance:
    depot: Position
    targets: tuple[Target, ...]
    uavs: tuple[Uav, ...]
    largest_coordinate: int
    loiter_fuel: float = 1.0
    require_depot_return: bool = True

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "uavs", tuple(self.uavs))
        if not self.targets:
            raise ValueError("instance needs at least one target")
        if not self.uavs:
            raise ValueError("instance needs at least one UAV")
        if self.loiter_fuel < 0:
            raise ValueError("loiter_fuel must be >= 0")
        if len({t.id for t in self.targets}) != len(self.targets):
            raise ValueError("target ids must be unique")
        if len({u.id for u in self.uavs}) != len(self.uavs):
            raise ValueError("uav ids must be unique")
        if len({u.fuel_capacity for u in self.uavs}) > 1:
            raise ValueError("all UAVs must share the same fuel capacity")
        for p in [self.depot] + [t.position for t in self.targets]:
            if not self.in_bounds(p):
                raise ValueError(f"position {p} outside grid [0, {self.largest_coordinate}]")

    def in_bounds(self, p: Position) -> bool:
        return 0 <= p.x <= self.largest_coordinate and 0 <= p.y <= self.largest_coordinate

    def target(self, target_id: int) -> Target:
        for t in self.targets:
            if t.id == target_id:
                return t
        raise KeyError(target_id)

    @property
    def total_demand(self) -> int:
        return sum(t.demand for t in self.targets)

    def initial_states(self) -> list[UavState]:
        return [UavState(u.id, self.depot, 0, u.fuel_capacity)
                for u in sorted(self.uavs, key=lambda u: u.id)]

    def with_depot_return(self, flag: bool) -> ProblemInstance:
        return ProblemInstance(self.depot, self.targets, self.uavs, self.largest_coordinate,
                               self.loiter_fuel, flag)


@dataclass(frozen=True)
class Assignment:
    uav_id: int
    target_id: int
    depart_time: int
    arrive_time: int
    service_window: TimeWindow
    travel_fuel: float
    loiter_fuel: float


@dataclass(frozen=True)
class Schedule:
    assignments: tuple[Assignment, ...]
    return_legs: dict[int, float] = field(default_factory=dict)
    total_fuel: float = 0.0
    unmet: tuple[tuple[int, int], ...] = ()

    @property
    def complete(self) -> bool:
        return not self.unmet

    @property
    def per_uav_routes(self) -> dict[int, list[Assignment]]:
        routes: dict[int, list[Assignment]] = defaultdict(list)
        for a in self.assignments:
            routes[a.uav_id].append(a)
        return {u: sorted(r, key=_route_key) for u, r in sorted(routes.items())}

    @property
    def served(self) -> int:
        return len(self.assignments)


@dataclass
class FeasibilityReport:
    violations: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def codes(self) -> set[str]:
        return {code for code, _ in self.violations}

    def add(self, code: str, message: str) -> None:
        self.violations.append((code, message))


def _route_key(a: Assignment):
    return (a.depart_time, a.service_window.start, a.target_id)


def manhattan_distance(a: Position, b: Position) -> int:
    return abs(a.x - b.x) + abs(a.y - b.y)


def total_fuel(schedule: Schedule) -> float:
    """Travel plus loiter fuel over all assignments, plus any depot-return legs."""
    legs = sum(a.travel_fuel + a.loiter_fuel for a in schedule.assignments)
    return legs + sum(schedule.return_legs.values())


def make_schedule(instance: ProblemInstance, assignments, unmet=()) -> Schedule:
    """Assemble a Schedule, adding return legs from each used UAV's last target."""
    assignments = tuple(assignments)
    returns: dict[int, float] = {}
    if instance.require_depot_return:
        positions = {t.id: t.position for t in instance.targets}
        last: dict[int, Assignment] = {}
        for a in assignments:
            if a.uav_id not in last or _route_key(a) > _route_key(last[a.uav_id]):
                last[a.uav_id] = a
        for uid in sorted(last):
            returns[uid] = float(manhattan_distance(positions[last[uid].target_id], instance.depot))
    unmet = tuple(sorted((int(t), int(s)) for t, s in unmet if s > 0))
    sched = Schedule(assignments, returns, 0.0, unmet)
    return Schedule(assignments, returns, total_fuel(sched), unmet)


def validate_schedule(instance: ProblemInstance, schedule: Schedule) -> FeasibilityReport:
    """Check a schedule against time windows, routing, fuel, demand and accounting."""
    report = FeasibilityReport()
    targets = {t.id: t for t in instance.targets}
    uavs = {u.id: u for u in instance.uavs}

    for p in [instance.depot] + [t.position for t in instance.targets]:
        if not instance.in_bounds(p):
            report.add(OUT_OF_BOUNDS, f"position ({p.x},{p.y}) outside grid")

    routes: dict[int, list[Assignment]] = defaultdict(list)
    counts: dict[int, int] = defaultdict(int)
    for a in schedule.assignments:
        if a.target_id not in targets:
            report.add(OUT_OF_BOUNDS, f"assignment references unknown target {a.target_id}")
            continue
        if a.uav_id not in uavs:
            report.add(OUT_OF_BOUNDS, f"assignment references unknown uav {a.uav_id}")
            continue
        t = targets[a.target_id]
        if a.service_window != t.window:
            report.add(LATE_ARRIVAL, f"uav {a.uav_id} at target {t.id}: service window "
                                     f"{a.service_window} differs from target window {t.window}")
        if a.arrive_time > t.window.start:
            report.add(LATE_ARRIVAL, f"uav {a.uav_id} reaches target {t.id} at {a.arrive_time}, "
                                     f"window starts at {t.window.start}")
        if abs(a.loiter_fuel - instance.loiter_fuel) > FUEL_TOL:
            report.add(BAD_ACCOUNTING, f"uav {a.uav_id} at target {t.id}: loiter fuel "
                                       f"{a.loiter_fuel} != {instance.loiter_fuel}")
        routes[a.uav_id].append(a)
        counts[a.target_id] += 1

    recomputed = 0.0
    for uid, route in sorted(routes.items()):
        route.sort(key=_route_key)
        pos, free_at, used = instance.depot, 0, 0.0
        for a in route:
            t = targets[a.target_id]
            d = manhattan_distance(pos, t.position)
            if a.depart_time < free_at:
                report.add(DOUBLE_BOOKED, f"uav {uid} departs for target {t.id} at {a.depart_time} "
                                          f"while busy until {free_at}")
            if a.arrive_time - a.depart_time != d:
                report.add(DOUBLE_BOOKED, f"uav {uid}: leg to target {t.id} takes "
                                          f"{a.arrive_time - a.depart_time} steps, route gives {d}")
            if abs(a.travel_fuel - d) > FUEL_TOL:
                report.add(BAD_ACCOUNTING, f"uav {uid}: travel fuel {a.travel_fuel} to target "
                                           f"{t.id}, route gives {d}")
            used += max(a.travel_fuel, d) + max(a.loiter_fuel, instance.loiter_fuel)
            recomputed += d + instance.loiter_fuel
            pos, free_at = t.position, t.window.end
        ret = manhattan_distance(pos, instance.depot) if instance.require_depot_return else 0
        stated = schedule.return_legs.get(uid, 0.0)
        if abs(stated - ret) > FUEL_TOL:
            report.add(BAD_ACCOUNTING, f"uav {uid}: return leg {stated}, route gives {ret}")
        used += max(stated, ret)
        recomputed += ret
        if used > uavs[uid].fuel_capacity + FUEL_TOL:
            report.add(FUEL_EXCEEDED, f"uav {uid} uses {used} fuel, capacity "
                                      f"{uavs[uid].fuel_capacity}")
    for uid in schedule.return_legs:
        if uid not in routes and schedule.return_legs[uid] != 0:
            report.add(BAD_ACCOUNTING, f"return leg charged to unused uav {uid}")

    unmet: dict[int, int] = {}
    for tid, short in schedule.unmet:
        if tid not in targets:
            report.add(OUT_OF_BOUNDS, f"unmet list references unknown target {tid}")
        else:
            unmet[tid] = unmet.get(tid, 0) + short
    for t in instance.targets:
        expected = t.demand - unmet.get(t.id, 0)
        if counts[t.id] != expected or unmet.get(t.id, 0) < 0:
            report.add(DEMAND_UNMET, f"target {t.id} has {counts[t.id]} UAVs, demand {t.demand}, "
                                     f"declared shortfall {unmet.get(t.id, 0)}")

    if abs(recomputed - schedule.total_fuel) > FUEL_TOL:
        report.add(BAD_ACCOUNTING, f"total fuel {schedule.total_fuel} != recomputed {recomputed}")
    return report
