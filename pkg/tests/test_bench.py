import pytest

from uavcover import PlannerConfig
from uavcover.bench import (ConfigError, ExperimentConfig, figure_csvs, instance_seed,
                            load_config, read_runs, results_csv, run_experiment, summary_csv,
                            timings_csv, write_outputs)


def _small(**kw):
    base = dict(sizes=[(3, 3), (5, 3)], regimes=[(0.0, 0.3), (0.7, 1.0)], seeds_per_cell=4,
                algorithms=["SVA", "GA", "HGA", "IH"], master_seed=3)
    base.update(kw)
    return ExperimentConfig(**base)


def test_sva_ih_rows_agree():
    report = run_experiment(ExperimentConfig(sizes=[(3, 3)], regimes=[(0.7, 1.0)],
                                             seeds_per_cell=10, algorithms=["SVA", "IH"]))
    assert [r.algorithm for r in report.rows] == ["SVA", "IH"]
    sva, ih = report.rows
    assert sva.mean_fuel == ih.mean_fuel and sva.completion_ratio == ih.completion_ratio


@pytest.mark.parametrize("kw", [dict(algorithms=[]), dict(sizes=[]), dict(seeds_per_cell=0),
                                dict(regimes=[(0.5, 0.2)]), dict(algorithms=["SVA", "LP"]),
                                dict(handcrafted_fraction=2.0)])
def test_config_validation(kw):
    with pytest.raises(ConfigError):
        _small(**kw)


def test_load_config_errors():
    with pytest.raises(ConfigError, match="line 1"):
        load_config("{oops")
    with pytest.raises(ConfigError, match="unknown config keys"):
        load_config('{"sizes": [[3, 3]], "regimes": [[0, 1]], "colour": 1}')
    with pytest.raises(ConfigError, match="'regimes'"):
        load_config('{"sizes": [[3, 3]]}')
    with pytest.raises(ConfigError):
        load_config('{"sizes": [[3, 3]], "regimes": [[0, 1]], "planner": {"bogus": 1}}')
    cfg = load_config('{"sizes": [[3, 3]], "regimes": [[0, 1]], "planner": {"hga_node_cap": 7}}')
    assert cfg.planner == PlannerConfig(hga_node_cap=7) and cfg.sizes == [(3, 3)]


def test_seeds_are_independent_per_cell():
    seeds = {instance_seed(0, s, r, k) for s in range(3) for r in range(3) for k in range(10)}
    assert len(seeds) == 90
    assert instance_seed(0, 1, 2, 3) == instance_seed(0, 1, 2, 3) != instance_seed(1, 1, 2, 3)


def test_deterministic_and_worker_independent():
    a = run_experiment(_small())
    b = run_experiment(_small(workers=2))
    assert results_csv(a) == results_csv(b)
    assert summary_csv(a).splitlines()[0] == summary_csv(b).splitlines()[0]


def test_figure_csvs_recompute_from_results(tmp_path):
    config = _small(handcrafted_fraction=0.5)
    report = run_experiment(config)
    write_outputs(report, config, tmp_path)
    runs = read_runs((tmp_path / "results.csv").read_text(), (tmp_path / "timings.csv").read_text())
    assert results_csv(report) == (tmp_path / "results.csv").read_text()
    for name, text in figure_csvs(runs, config.algorithms).items():
        assert (tmp_path / name).read_text() == text, name
    assert {r.source for r in runs} == {"handcrafted", "random"}


def test_summary_arithmetic():
    report = run_experiment(_small())
    for row in report.rows:
        runs = [r for r in report.runs if (r.n_targets, r.regime_low, r.algorithm) ==
                (row.n_targets, row.regime_low, row.algorithm)]
        complete = [r for r in runs if r.complete]
        assert row.runs == len(runs) == 4
        assert row.completion_ratio == len(complete) / len(runs)
        if complete:
            assert row.mean_fuel == pytest.approx(sum(r.fuel for r in complete) / len(complete))
        else:
            assert row.mean_fuel is None
        assert sum(row.failures.values()) == len(runs) - len(complete)


def test_cap_errors_are_recorded():
    config = _small(sizes=[(10, 5)], regimes=[(0.9, 1.0)], seeds_per_cell=2,
                    algorithms=["SVA", "BFA"], planner=PlannerConfig(bfa_node_cap=50))
    report = run_experiment(config)
    assert {r.status for r in report.runs if r.algorithm == "BFA"} == {"cap_exceeded"}
    assert report.rows[1].failures["cap_exceeded"] == 2


def test_csv_headers_fixed():
    report = run_experiment(_small(seeds_per_cell=1))
    assert results_csv(report).splitlines()[0] == (
        "n_targets,n_uavs,regime_low,regime_high,seed_index,instance_seed,source,algorithm,"
        "status,complete,fuel,served,demand,clusters,nodes")
    assert timings_csv(report).splitlines()[0] == (
        "n_targets,n_uavs,regime_low,regime_high,seed_index,algorithm,elapsed")
    assert summary_csv(report).splitlines()[0] == (
        "n_targets,n_uavs,regime_low,regime_high,algorithm,runs,mean_elapsed,mean_fuel,"
        "completion_ratio,incomplete,cap_exceeded,invalid")
