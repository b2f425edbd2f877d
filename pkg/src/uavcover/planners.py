"""End-to-end planners: SVA, GA, HGA, IH and BFA.

SVA, HGA and IH share one pipeline (cluster, build a transportation problem
from the ready UAVs, solve it, dispatch) and differ only in the transportation
solver. GA dispatches target by target; BFA is an exact branch and bound.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Callable

from .clustering import DEFAULT_THRESHOLD, cluster_targets, sort_targets
from .model import (Assignment, ProblemInstance, Schedule, Target, UavState, make_schedule,
                    manhattan_distance)
from .transport import (Flow, ResourceCapError, TransportationProblem, build_lp_model,
                        build_transportation, can_serve, ready_uavs,
                        solve_lp_simplex, solve_transportation_bruteforce,
                        solve_transportation_simplex)

ALGORITHMS = ("SVA", "GA", "HGA", "IH", "BFA")


@dataclass(frozen=True)
class PlannerConfig:
    cluster_threshold: float = DEFAULT_THRESHOLD
    overlap_denominator: str = "min"
    bfa_node_cap: int = 1_000_000
    hga_node_cap: int = 5_000_000
    bfa_prune: bool = True
    greedy_time_advance: str = "start"   # "start" or "end" of the finished target's window
    tie_break: str = "lexicographic"

    def __post_init__(self):
        if not 0 <= self.cluster_threshold <= 1:
            raise ValueError("cluster_threshold must lie in [0, 1]")
        if self.greedy_time_advance not in ("start", "end"):
            raise ValueError("greedy_time_advance must be 'start' or 'end'")
        if self.tie_break != "lexicographic":
            raise ValueError("only the lexicographic tie-break is implemented")


@dataclass
class PlannerResult:
    schedule: Schedule
    elapsed: float
    algorithm: str
    clusters_solved: int = 0
    nodes_explored: int = 0


def _dispatch(state: UavState, target: Target, instance: ProblemInstance,
              depart: int | None = None) -> Assignment:
    """Send ``state`` to ``target`` and advance it to the end of the window."""
    d = manhattan_distance(state.position, target.position)
    depart = state.available_at if depart is None else depart
    a = Assignment(state.uav_id, target.id, depart, depart + d, target.window,
                   float(d), instance.loiter_fuel)
    state.position = target.position
    state.available_at = target.window.end
    state.fuel_remaining -= d + instance.loiter_fuel
    return a


def expand_flow(tp: TransportationProblem, flow: Flow, states: dict[int, UavState],
                targets: dict[int, Target], instance: ProblemInstance):
    """Turn a cluster's flow into assignments; BIG or dummy-source flow is shortfall."""
    assignments, unmet = [], []
    for i, src in enumerate(tp.sources):
        pool = sorted(src.uav_ids)
        for j, sink in enumerate(tp.sinks):
            units = int(flow.x[i, j])
            if units == 0 or j == tp.dummy_sink:
                continue
            if i == tp.dummy_source or not tp.feasible[i, j]:
                unmet.append((sink.target_id, units))
                continue
            for uid in pool[:units]:
                assignments.append(_dispatch(states[uid], targets[sink.target_id], instance))
            pool = pool[units:]
    return assignments, unmet


def _merge_unmet(unmet):
    total: dict[int, int] = {}
    for tid, short in unmet:
        total[tid] = total.get(tid, 0) + short
    return sorted(total.items())


def _plan_clustered(instance: ProblemInstance, config: PlannerConfig, algorithm: str,
                    solve: Callable[[TransportationProblem, int], Flow]) -> PlannerResult:
    t0 = time.perf_counter()
    states = {s.uav_id: s for s in instance.initial_states()}
    targets = {t.id: t for t in instance.targets}
    assignments, unmet = [], []
    solved = nodes = 0
    for cluster in cluster_targets(instance.targets, config.cluster_threshold,
                                   config.overlap_denominator):
        members = [targets[i] for i in cluster.target_ids]
        ready = ready_uavs(list(states.values()), cluster, members, instance)
        if not ready:
            unmet.extend((t.id, t.demand) for t in members)
            continue
        tp = build_transportation(ready, cluster, members, instance)
        try:
            flow = solve(tp, cluster.cluster_index)
        except ResourceCapError as exc:
            raise ResourceCapError(f"{algorithm}: cluster {cluster.cluster_index} "
                                   f"(targets {list(cluster.target_ids)}): {exc}") from None
        solved += 1
        nodes += flow.nodes
        got, short = expand_flow(tp, flow, states, targets, instance)
        assignments.extend(got)
        unmet.extend(short)
    schedule = make_schedule(instance, assignments, _merge_unmet(unmet))
    return PlannerResult(schedule, time.perf_counter() - t0, algorithm, solved, nodes)


def plan_sva(instance: ProblemInstance, config: PlannerConfig = PlannerConfig()) -> PlannerResult:
    return _plan_clustered(instance, config, "SVA",
                           lambda tp, _: solve_transportation_simplex(tp))


def plan_hga(instance: ProblemInstance, config: PlannerConfig = PlannerConfig()) -> PlannerResult:
    return _plan_clustered(instance, config, "HGA",
                           lambda tp, _: solve_transportation_bruteforce(tp, config.hga_node_cap))


def plan_ih(instance: ProblemInstance, config: PlannerConfig = PlannerConfig()) -> PlannerResult:
    return _plan_clustered(instance, config, "IH",
                           lambda tp, _: solve_lp_simplex(build_lp_model(tp), tp))


def plan_greedy(instance: ProblemInstance, config: PlannerConfig = PlannerConfig()) -> PlannerResult:
    """Targets by window start; each demand unit goes to the cheapest ready UAV.

    A UAV is ready when it is off mission at the planning clock and can still
    reach the target by its window start. The clock advances to the start (or
    end, per config) of each finished target's window.
    """
    t0 = time.perf_counter()
    states = instance.initial_states()
    assignments, unmet = [], []
    now = 0
    for t in sort_targets(instance.targets):
        need = t.demand
        while need:
            best = None
            for s in states:
                if s.available_at <= now and can_serve(s, t, instance):
                    key = (manhattan_distance(s.position, t.position), s.uav_id)
                    if best is None or key < best[0]:
                        best = (key, s)
            if best is None:
                unmet.append((t.id, need))
                break
            assignments.append(_dispatch(best[1], t, instance))
            need -= 1
        now = t.window.start if config.greedy_time_advance == "start" else t.window.end
    schedule = make_schedule(instance, assignments, unmet)
    return PlannerResult(schedule, time.perf_counter() - t0, "GA")


def plan_bfa(instance: ProblemInstance, config: PlannerConfig = PlannerConfig()) -> PlannerResult:
    """Exact branch and bound over UAV subsets per target, in window-start order.

    Maximises served demand, then minimises total fuel (return legs included
    when the instance requires them).
    """
    t0 = time.perf_counter()
    order = sort_targets(instance.targets)
    k = len(order)
    states = instance.initial_states()
    loiter = instance.loiter_fuel

    # admissible per-target bound: a UAV reaches t from the depot or an earlier target
    unit_lb = []
    for p, t in enumerate(order):
        origins = [instance.depot] + [q.position for q in order[:p]]
        unit_lb.append(min(manhattan_distance(o, t.position) for o in origins) + loiter)
    demand_left = [0] * (k + 1)
    fuel_lb = [0.0] * (k + 1)
    for p in range(k - 1, -1, -1):
        demand_left[p] = demand_left[p + 1] + order[p].demand
        fuel_lb[p] = fuel_lb[p + 1] + order[p].demand * unit_lb[p]

    best = {"served": -1, "fuel": float("inf"), "plan": None}
    chosen: list[Assignment] = []
    nodes = 0

    def leaf_fuel(partial: float) -> float:
        if not instance.require_depot_return:
            return partial
        # idle UAVs sit at the depot and add nothing
        return partial + sum(manhattan_distance(s.position, instance.depot) for s in states)

    def search(p: int, served: int, partial: float) -> None:
        nonlocal nodes
        nodes += 1
        if nodes > config.bfa_node_cap:
            raise ResourceCapError(f"BFA exceeded node cap {config.bfa_node_cap}")
        if p == k:
            fuel = leaf_fuel(partial)
            if served > best["served"] or (served == best["served"] and fuel < best["fuel"] - 1e-9):
                best.update(served=served, fuel=fuel, plan=list(chosen))
            return
        if config.bfa_prune:
            reachable = served + demand_left[p]
            if reachable < best["served"]:
                return
            if reachable == best["served"] and partial + fuel_lb[p] >= best["fuel"] - 1e-9:
                return
        t = order[p]
        feasible = [s for s in states if can_serve(s, t, instance)]
        for size in range(min(t.demand, len(feasible)), -1, -1):
            for combo in itertools.combinations(feasible, size):
                saved = [(s.position, s.available_at, s.fuel_remaining) for s in combo]
                step = 0.0
                for s in combo:
                    a = _dispatch(s, t, instance)
                    chosen.append(a)
                    step += a.travel_fuel + a.loiter_fuel
                search(p + 1, served + size, partial + step)
                for s, (pos, avail, fuel) in zip(combo, saved):
                    s.position, s.available_at, s.fuel_remaining = pos, avail, fuel
                del chosen[len(chosen) - size:]

    search(0, 0, 0.0)
    plan = best["plan"]
    counts: dict[int, int] = {}
    for a in plan:
        counts[a.target_id] = counts.get(a.target_id, 0) + 1
    unmet = [(t.id, t.demand - counts.get(t.id, 0)) for t in order]
    schedule = make_schedule(instance, plan, unmet)
    return PlannerResult(schedule, time.perf_counter() - t0, "BFA", 0, nodes)


PLANNERS = {
    "SVA": plan_sva,
    "GA": plan_greedy,
    "HGA": plan_hga,
    "IH": plan_ih,
    "BFA": plan_bfa,
}


def run_planner(algorithm: str, instance: ProblemInstance,
                config: PlannerConfig = PlannerConfig()) -> PlannerResult:
    try:
        planner = PLANNERS[algorithm.upper()]
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}") from None
    return planner(instance, config)

