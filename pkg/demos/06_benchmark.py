"""A small experiment matrix: runtime, fuel and completion by regime.

Use a single worker when the timings matter; parallel workers share the CPU.
"""

from uavcover.bench import ExperimentConfig, run_experiment

config = ExperimentConfig(sizes=[(10, 5), (25, 5)], regimes=[(0.0, 0.3), (0.7, 1.0)],
                          seeds_per_cell=10, algorithms=["SVA", "GA", "HGA", "IH"])
report = run_experiment(config)

print(f"{'size':>6} {'regime':>10} {'alg':>4} {'ms':>9} {'fuel':>8} {'complete':>9}")
for row in report.rows:
    fuel = "-" if row.mean_fuel is None else f"{row.mean_fuel:.1f}"
    print(f"{row.n_targets:>3}/{row.n_uavs:<2} {row.regime_low:>4}-{row.regime_high:<4} "
          f"{row.algorithm:>4} {1e3 * row.mean_elapsed:>9.2f} {fuel:>8} {row.completion_ratio:>9.0%}")
