"""Multi-UAV area coverage with time windows: clustering + transportation planners."""

from .clustering import Cluster, cluster_targets, overlap_ratio
from .instances import (GeneratorParams, generate_random, handcrafted_suite, load_instance,
                        load_schedule, save_instance, save_schedule)
from .model import (Assignment, FeasibilityReport, Position, ProblemInstance, Schedule, Target,
                    TimeWindow, Uav, UavState, manhattan_distance, total_fuel, validate_schedule)
from .planners import (ALGORITHMS, PlannerConfig, PlannerResult, plan_bfa, plan_greedy, plan_hga,
                       plan_ih, plan_sva, run_planner)
from .transport import (Flow, LpModel, ResourceCapError, TransportationProblem, build_lp_model,
                        build_transportation, ready_uavs, solve_lp_simplex,
                        solve_transportation_bruteforce, solve_transportation_simplex)

__version__ = "0.1.0"
