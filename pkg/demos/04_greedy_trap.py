"""Where greedy dispatch goes wrong.

The early target at (4,3) is served first. Greedy then hands the two later,
simultaneous targets to whichever UAV is closest and free at the planning
clock, which leaves the far target at (1,10) without anyone able to reach it
in time. Solving the later cluster as a transportation problem sends the
UAV that just finished at (4,3) on to (6,5) and the idle one to (1,10).
"""

from pathlib import Path

from uavcover import load_instance, plan_bfa, plan_greedy, plan_sva

inst = load_instance((Path(__file__).parent.parent / "docs/samples/greedy_trap.json").read_text())

for planner in (plan_greedy, plan_sva, plan_bfa):
    result = planner(inst)
    sched = result.schedule
    print(f"{result.algorithm}: fuel {sched.total_fuel:g}, complete {sched.complete}, "
          f"unmet {list(sched.unmet)}")
    for uid, route in sched.per_uav_routes.items():
        stops = " -> ".join(f"t{a.target_id}@{a.arrive_time}" for a in route)
        print(f"    uav {uid}: depot -> {stops} -> depot")
