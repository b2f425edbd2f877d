"""Random and hand-crafted instances, plus the JSON file formats."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .model import (Assignment, Position, ProblemInstance, Schedule, Target, TimeWindow, Uav,
                    default_fuel_capacity)

FORMAT_VERSION = 1


class InstanceFormatError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorParams:
    n_targets: int
    n_uavs: int
    window_width: int
    intersection_ratio_range: tuple[float, float]
    largest_coordinate: int
    demand_per_target: int = 1
    first_start: int | None = None      # defaults to largest_coordinate
    loiter_fuel: float = 1.0
    fuel_capacity: float | None = None
    require_depot_return: bool = True

    def overlap_bounds(self) -> tuple[int, int]:
        """Integer overlap lengths allowed between consecutive windows."""
        low, high = self.intersection_ratio_range
        lo = math.ceil(low * self.window_width - 1e-9)
        hi = math.floor(high * self.window_width + 1e-9)
        return lo, hi

    def validate(self) -> None:
        for name in ("n_targets", "n_uavs", "window_width", "largest_coordinate",
                     "demand_per_target"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        low, high = self.intersection_ratio_range
        if not 0 <= low <= high <= 1:
            raise ValueError(f"intersection ratio range must satisfy 0 <= low <= high <= 1, "
                             f"got {self.intersection_ratio_range}")
        if self.first_start is not None and self.first_start < 0:
            raise ValueError("first_start must be >= 0")
        lo, hi = self.overlap_bounds()
        # a full overlap would make consecutive windows identical; still fine
        if lo > hi:
            raise ValueError(f"no integer overlap in [{low}, {high}] x {self.window_width}: "
                             "windows cannot be placed")


def generate_random(params: GeneratorParams, seed: int) -> ProblemInstance:
    """Targets at uniform grid points, windows chained left to right.

    Each window starts where the previous one started, shifted so that the two
    overlap by ``round(r * width)`` steps, ``r`` drawn uniformly from the
    intersection ratio range (clamped so the integer overlap stays in range).
    """
    params.validate()
    rng = np.random.default_rng(np.uint64(seed))
    top = params.largest_coordinate
    w = params.window_width
    lo, hi = params.overlap_bounds()
    low, high = params.intersection_ratio_range

    xy = rng.integers(0, top + 1, size=(params.n_targets, 2))
    ratios = rng.uniform(low, high, size=max(params.n_targets - 1, 0))
    start = top if params.first_start is None else params.first_start
    targets = []
    for k in range(params.n_targets):
        if k > 0:
            overlap = min(max(int(round(ratios[k - 1] * w)), lo), hi)
            start += w - overlap
        targets.append(Target(k, Position(int(xy[k, 0]), int(xy[k, 1])),
                              TimeWindow(start, start + w), params.demand_per_target))
    cap = default_fuel_capacity(top) if params.fuel_capacity is None else params.fuel_capacity
    uavs = [Uav(k, cap) for k in range(params.n_uavs)]
    return ProblemInstance(Position(top // 2, top // 2), tuple(targets), tuple(uavs), top,
                           params.loiter_fuel, params.require_depot_return)


# -- hand-crafted suite ------------------------------------------------------------

SUITE_SIZES = ((3, 3), (5, 3), (7, 5), (10, 5), (25, 5))
SUITE_WIDTH = 10
SUITE_COORD = 20


def _suite_coordinates(n: int) -> list[Position]:
    rng = np.random.default_rng(1000 + n)
    xy = rng.integers(0, SUITE_COORD + 1, size=(n, 2))
    return [Position(int(a), int(b)) for a, b in xy]


def _suite_windows(n: int, variant: str) -> list[TimeWindow]:
    w, s0 = SUITE_WIDTH, SUITE_COORD
    if variant == "identical":
        starts = [s0] * n
    elif variant == "disjoint":
        starts = [s0 + k * (w + 2) for k in range(n)]
    elif variant == "mixed":
        # pairs of 80%-overlapping windows, pairs separated by a gap
        starts = [s0 + (k // 2) * (w + 3) + (k % 2) * 2 for k in range(n)]
    elif variant == "staggered":
        # every window overlaps its predecessor by 40%: one cluster per target
        starts = [s0 + k * 6 for k in range(n)]
    elif variant == "tight":
        # windows open two steps apart, all overlapping at least 70% of the first
        starts = [s0 + 2 * (k % 3) for k in range(n)]
    else:
        raise ValueError(variant)
    return [TimeWindow(s, s + w) for s in starts]


SUITE_VARIANTS = ("identical", "disjoint", "mixed", "staggered", "tight")


def handcrafted_suite() -> list[ProblemInstance]:
    """Five window variants per size; coordinates fixed within a size."""
    suite = []
    for n_targets, n_uavs in SUITE_SIZES:
        coords = _suite_coordinates(n_targets)
        for variant in SUITE_VARIANTS:
            windows = _suite_windows(n_targets, variant)
            targets = tuple(Target(k, coords[k], windows[k], 1) for k in range(n_targets))
            uavs = tuple(Uav(k, default_fuel_capacity(SUITE_COORD)) for k in range(n_uavs))
            suite.append(ProblemInstance(Position(SUITE_COORD // 2, SUITE_COORD // 2),
                                         targets, uavs, SUITE_COORD))
    return suite


def suite_names() -> list[str]:
    return [f"{n}_{v}" for n, _ in SUITE_SIZES for v in SUITE_VARIANTS]


# -- serialization -----------------------------------------------------------------

def instance_to_dict(instance: ProblemInstance) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "instance",
        "grid": {"largest_coordinate": instance.largest_coordinate},
        "depot": {"x": instance.depot.x, "y": instance.depot.y},
        "fuel": {"loiter": instance.loiter_fuel},
        "require_depot_return": instance.require_depot_return,
        "targets": [{"id": t.id, "x": t.position.x, "y": t.position.y,
                     "start": t.window.start, "end": t.window.end, "demand": t.demand}
                    for t in instance.targets],
        "uavs": [{"id": u.id, "fuel_capacity": u.fuel_capacity} for u in instance.uavs],
    }


def save_instance(instance: ProblemInstance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2) + "\n"


def _field(obj, name, where, kind=None):
    if not isinstance(obj, dict) or name not in obj:
        raise InstanceFormatError(f"{where}: missing field '{name}'")
    value = obj[name]
    if kind is None:
        return value
    # bool is an int subclass; reject it where a number is expected
    if not isinstance(value, kind) or (isinstance(value, bool) and kind is not bool):
        expected = "number" if kind == _NUM else kind.__name__
        raise InstanceFormatError(f"{where}.{name}: expected {expected}, got {type(value).__name__}")
    return value


def _parse(text: str, kind: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise InstanceFormatError("document root must be an object")
    version = _field(doc, "format_version", "document", int)
    if version != FORMAT_VERSION:
        raise InstanceFormatError(f"unsupported format_version {version}")
    if doc.get("kind", kind) != kind:
        raise InstanceFormatError(f"expected a {kind} document, got {doc.get('kind')!r}")
    return doc


_NUM = (int, float)


def instance_from_dict(doc: dict) -> ProblemInstance:
    grid = _field(doc, "grid", "document", dict)
    depot = _field(doc, "depot", "document", dict)
    fuel = doc.get("fuel", {})
    targets = []
    for k, t in enumerate(_field(doc, "targets", "document", list)):
        where = f"targets[{k}]"
        try:
            window = TimeWindow(_field(t, "start", where, int), _field(t, "end", where, int))
            targets.append(Target(_field(t, "id", where, int),
                                  Position(_field(t, "x", where, int), _field(t, "y", where, int)),
                                  window, _field(t, "demand", where, int)))
        except ValueError as exc:
            if isinstance(exc, InstanceFormatError):
                raise
            raise InstanceFormatError(f"{where}: {exc}") from None
    uavs = []
    for k, u in enumerate(_field(doc, "uavs", "document", list)):
        where = f"uavs[{k}]"
        try:
            uavs.append(Uav(_field(u, "id", where, int), float(_field(u, "fuel_capacity", where, _NUM))))
        except ValueError as exc:
            if isinstance(exc, InstanceFormatError):
                raise
            raise InstanceFormatError(f"{where}: {exc}") from None
    try:
        return ProblemInstance(
            Position(_field(depot, "x", "depot", int), _field(depot, "y", "depot", int)),
            tuple(targets), tuple(uavs),
            _field(grid, "largest_coordinate", "grid", int),
            float(fuel.get("loiter", 1.0)),
            bool(doc.get("require_depot_return", True)))
    except InstanceFormatError:
        raise
    except ValueError as exc:
        raise InstanceFormatError(f"document: {exc}") from None


def load_instance(text: str) -> ProblemInstance:
    return instance_from_dict(_parse(text, "instance"))


def schedule_to_dict(schedule: Schedule, algorithm: str | None = None) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "schedule",
        "total_fuel": schedule.total_fuel,
        "complete": schedule.complete,
        "unmet": [{"target_id": t, "shortfall": s} for t, s in schedule.unmet],
        "assignments": [{"uav_id": a.uav_id, "target_id": a.target_id,
                         "depart_time": a.depart_time, "arrive_time": a.arrive_time,
                         "service_start": a.service_window.start,
                         "service_end": a.service_window.end,
                         "travel_fuel": a.travel_fuel, "loiter_fuel": a.loiter_fuel}
                        for a in schedule.assignments],
        "return_legs": [{"uav_id": u, "fuel": f} for u, f in sorted(schedule.return_legs.items())],
    }
    if algorithm is not None:
        doc["algorithm"] = algorithm
    return doc


def save_schedule(schedule: Schedule, algorithm: str | None = None) -> str:
    return json.dumps(schedule_to_dict(schedule, algorithm), indent=2) + "\n"


def load_schedule(text: str) -> Schedule:
    doc = _parse(text, "schedule")
    assignments = []
    for k, a in enumerate(_field(doc, "assignments", "document", list)):
        where = f"assignments[{k}]"
        try:
            window = TimeWindow(_field(a, "service_start", where, int),
                                _field(a, "service_end", where, int))
        except ValueError as exc:
            raise InstanceFormatError(f"{where}: {exc}") from None
        assignments.append(Assignment(
            _field(a, "uav_id", where, int), _field(a, "target_id", where, int),
            _field(a, "depart_time", where, int), _field(a, "arrive_time", where, int),
            window, float(_field(a, "travel_fuel", where, _NUM)),
            float(_field(a, "loiter_fuel", where, _NUM))))
    unmet = tuple((_field(u, "target_id", f"unmet[{k}]", int), _field(u, "shortfall", f"unmet[{k}]", int))
                  for k, u in enumerate(doc.get("unmet", [])))
    returns = {_field(r, "uav_id", f"return_legs[{k}]", int): float(_field(r, "fuel", f"return_legs[{k}]", _NUM))
               for k, r in enumerate(doc.get("return_legs", []))}
    total = float(_field(doc, "total_fuel", "document", _NUM))
    schedule = Schedule(tuple(assignments), returns, total, unmet)
    if "complete" in doc and bool(doc["complete"]) != schedule.complete:
        raise InstanceFormatError("document: 'complete' disagrees with the unmet list")
    return schedule
