"""All five planners on the hand-crafted 3- and 5-target instances."""

from uavcover import ALGORITHMS, handcrafted_suite, run_planner, validate_schedule
from uavcover.instances import suite_names

print(f"{'instance':<14}" + "".join(f"{a:>12}" for a in ALGORITHMS))
for name, inst in zip(suite_names(), handcrafted_suite()):
    if len(inst.targets) > 5:
        continue
    cells = []
    for algorithm in ALGORITHMS:
        sched = run_planner(algorithm, inst).schedule
        assert validate_schedule(inst, sched).ok
        mark = "" if sched.complete else f" ({sched.served}/{inst.total_demand})"
        cells.append(f"{sched.total_fuel:g}{mark}")
    print(f"{name:<14}" + "".join(f"{c:>12}" for c in cells))
print("\nfuel includes the trip home; partial coverage shown as served/demand")
