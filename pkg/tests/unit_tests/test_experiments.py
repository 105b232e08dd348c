import json

import numpy as np
import pytest
from pydantic import ValidationError

from connectors.results import dumps
from experiments import (
    SUP_POINT,
    Calibration,
    ExperimentFactory,
    ExperimentKind,
    ExperimentSpec,
    FixedK,
    PowerK,
)
from experiments.base_experiment import aggregate_key
from experiments.rate_sweep import log_log_slope
from orchestration.orchestrator import Orchestrator, _batches, calibrate_K, run_clt, run_experiment
from util.errors import DegenerateFunctionalError, InvalidSpecError, NumericError


def make_spec(kind, **fields):
    values = dict(kind=kind, model="M1", n_grid=[100, 200], k_rule={"rule": "fixed", "k": 8},
                  replications=6, seed=3, x_grid_size=11)
    values.update(fields)
    return ExperimentSpec.model_validate(values)


class TestExperimentSpec:

    def test_defaults(self):
        spec = ExperimentSpec(kind="clt", n_grid=[100], replications=10)
        assert spec.k_rule == PowerK(a=0.6)
        assert spec.functionals == ["identity"]
        assert spec.K_grid[0] == 1.0 and spec.K_grid[-1] == 20.0

    @pytest.mark.parametrize("fields", [
        {"n_grid": [200, 100]},
        {"n_grid": [100, 100]},
        {"replications": 0},
        {"k_rule": {"rule": "fixed", "k": 500}},
        {"k_rule": {"rule": "power", "a": 1.5}},
        {"k_rule": {"rule": "nearest"}},
        {"query_points": [[0.5, 0.5]]},
        {"K": 0.5},
        {"colour": "blue"},
    ])
    def test_rejects_invalid_fields(self, fields):
        with pytest.raises(ValidationError):
            make_spec("ci_coverage", **fields)

    def test_echo_drops_run_local_fields(self):
        spec = make_spec("ci_coverage", workers=4, output="somewhere")
        echo = spec.echo()
        assert "workers" not in echo and "output" not in echo
        assert echo["k_rule"] == {"rule": "fixed", "k": 8}
        assert ExperimentSpec.model_validate(echo).kind is ExperimentKind.CI_COVERAGE


class TestExperimentFactory:

    @pytest.mark.parametrize("kind", list(ExperimentKind))
    def test_every_kind_has_an_experiment(self, kind):
        model = "M2" if kind is ExperimentKind.NW_CONTRAST else "M1"
        experiment = ExperimentFactory.get_experiment(make_spec(kind, model=model))
        assert experiment.kind is kind

    def test_zero_variance_functional_is_refused_for_clt(self):
        with pytest.raises(DegenerateFunctionalError):
            ExperimentFactory.get_experiment(make_spec("clt", functionals=["const:2"]))

    def test_cdf_class_alone_is_refused_where_functionals_are_needed(self):
        with pytest.raises(InvalidSpecError):
            ExperimentFactory.get_experiment(make_spec("ci_coverage", functionals=["cdf"]))

    def test_nw_contrast_needs_two_points(self):
        with pytest.raises(InvalidSpecError):
            ExperimentFactory.get_experiment(make_spec("nw_contrast", model="M2", query_points=[[0.3]]))

    def test_k_schedules(self):
        assert ExperimentFactory.get_experiment(make_spec("clt")).k_values() == [8, 8]
        power = make_spec("clt", k_rule={"rule": "power", "a": 0.5}, n_grid=[100, 400])
        assert ExperimentFactory.get_experiment(power).k_values() == [10, 20]


class TestHelpers:

    def test_aggregate_key(self):
        assert aggregate_key("K") == "K"
        assert aggregate_key("coverage", n=100, point=0, functional="identity") == \
            "coverage[n=100,point=0,functional=identity]"

    def test_log_log_slope(self):
        n = np.array([10.0, 100.0, 1000.0])
        fit = log_log_slope(n, 3.0 * n ** -0.5)
        assert fit["slope"] == pytest.approx(-0.5, abs=1e-12)
        assert fit["slope_stderr"] == pytest.approx(0.0, abs=1e-12)
        assert log_log_slope([10, 100], [1.0, 0.0])["slope"] is None

    @pytest.mark.parametrize("replications, workers", [(1, 4), (7, 1), (10, 2), (100, 3)])
    def test_batches_cover_replications_in_order(self, replications, workers):
        batches = _batches(replications, workers)
        assert [r for batch in batches for r in batch] == list(range(replications))


class TestOrchestrator:

    def test_ci_coverage_run(self, tmp_path):
        result = run_experiment(make_spec("ci_coverage"), out_dir=tmp_path)
        assert result.status == "ok"
        assert len(result.records) == 6 * 2 * 2
        assert [r.replication for r in result.records] == sorted(r.replication for r in result.records)
        coverage = result.aggregates["coverage[n=100,point=0,functional=identity]"]
        assert 0.0 <= coverage <= 1.0 and coverage * 6 == pytest.approx(round(coverage * 6))
        assert result.aggregates["mean_half_width[n=200,point=0,functional=identity]"] > 0
        assert sorted(p.name for p in tmp_path.iterdir()) == ["report.md", "reps.csv", "result.json"]

    def test_worker_count_does_not_change_outputs(self, tmp_path):
        spec = make_spec("ci_coverage", replications=8, functionals=["identity", "cdf:0"])
        Orchestrator.create(spec, workers=1, out_dir=tmp_path / "one").run()
        Orchestrator.create(spec, workers=2, out_dir=tmp_path / "two").run()
        for name in ("result.json", "reps.csv", "report.md"):
            assert (tmp_path / "one" / name).read_bytes() == (tmp_path / "two" / name).read_bytes()

    def test_seed_changes_outputs(self):
        first = run_experiment(make_spec("clt", replications=3))
        second = run_experiment(make_spec("clt", replications=3, seed=4))
        assert first.records != second.records

    def test_load_rechecks_aggregates(self, tmp_path):
        run_experiment(make_spec("radius_concentration"), out_dir=tmp_path)
        loaded = Orchestrator.load(tmp_path)
        assert loaded.aggregates["radius_bound_violation_frequency[n=100]"] is not None

        payload = json.loads((tmp_path / "result.json").read_text())
        key = "median_radius_ratio[n=100,point=0]"
        payload["aggregates"][key] += 0.01
        (tmp_path / "result.json").write_text(dumps(payload))
        with pytest.raises(NumericError):
            Orchestrator.load(tmp_path)

    def test_empty_window_is_skipped(self, tmp_path):
        result = run_experiment(make_spec("ci_coverage", k_rule={"rule": "theorem_window"}), out_dir=tmp_path)
        assert result.status == "skipped"
        assert result.records == [] and result.aggregates == {}
        assert "admissible k window is empty" in result.notes[0]
        assert Orchestrator.load(tmp_path).status == "skipped"

    def test_runner_sets_the_kind(self):
        result = run_clt(make_spec("ci_coverage", replications=2))
        assert result.kind is ExperimentKind.CLT
        assert {r.metric for r in result.records} == {"z"}


class TestExperiments:

    def test_radius_concentration_records(self):
        result = run_experiment(make_spec("radius_concentration", replications=3))
        metrics = {(r.point, r.metric) for r in result.records}
        assert (0, "radius_ratio") in metrics and (SUP_POINT, "sup_radius") in metrics
        assert result.aggregates["median_radius_ratio[n=200,point=0]"] > 0

    def test_rate_sweep_notes_the_k_rule(self):
        result = run_experiment(make_spec("rate_sweep", replications=3))
        assert any("k rule" in note for note in result.notes)
        assert result.aggregates["mean_sup_error[n=100]"] > 0
        assert result.aggregates["slope_stderr"] is None

    def test_bias_bound_modulus_grows_with_eta(self):
        result = run_experiment(make_spec("bias_bound", replications=2, eta_grid=[0.1, 0.5, 2.0]))
        omegas = [r.value for r in result.records
                  if r.metric == "omega" and r.replication == 0 and r.n == 100]
        assert len(omegas) == 3
        assert omegas == sorted(omegas)
        assert "violation_frequency[eta=0.5,n=200,point=0,functional=identity]" in result.aggregates

    def test_bias_bound_violations_fall_with_eta(self):
        result = run_experiment(make_spec("bias_bound", replications=6, eta_grid=[0.1, 0.5, 2.0]))
        for n in (100, 200):
            frequencies = [result.aggregates[f"violation_frequency[eta={eta},n={n},point=0,functional=identity]"]
                           for eta in (0.1, 0.5, 2.0)]
            assert frequencies == sorted(frequencies, reverse=True)

    def test_bias_bound_is_zero_on_a_flat_model(self):
        result = run_experiment(make_spec("bias_bound", model="M0", replications=3, eta_grid=[0.1, 0.5],
                                          functionals=["identity", "square", "cdf:0.2"]))
        assert {r.value for r in result.records if r.metric == "bias"} == {0.0}
        for key, value in result.aggregates.items():
            if key.startswith(("mean_abs_bias", "violation_frequency")):
                assert value == 0.0

    def test_constant_functional_is_always_covered(self):
        result = run_experiment(make_spec("ci_coverage", functionals=["const:2"]))
        for n in (100, 200):
            assert result.aggregates[f"coverage[n={n},point=0,functional=const:2]"] == 1.0
            assert result.aggregates[f"mean_half_width[n={n},point=0,functional=const:2]"] == 0.0

    def test_clt_correlation_of_two_functionals(self):
        result = run_experiment(make_spec("clt", n_grid=[2000], k_rule={"rule": "fixed", "k": 50},
                                          functionals=["identity", "square"], query_points=[[0.125]],
                                          replications=200))
        m = np.sin(np.pi / 4.0)
        expected = 2.0 * m / np.sqrt(4.0 * m ** 2 + 0.5)
        labels = "n=2000,point=0,pair=identity|square"
        assert result.aggregates[f"expected_corr[{labels}]"] == pytest.approx(expected, rel=1e-10)
        assert result.aggregates[f"corr_z[{labels}]"] == pytest.approx(expected, abs=0.1)

    def test_nw_contrast_variances(self):
        result = run_experiment(make_spec("nw_contrast", model="M2", n_grid=[400], k_rule={"rule": "fixed", "k": 20}))
        assert result.aggregates["density_ratio[n=400]"] == pytest.approx(7.0)
        assert result.aggregates["knn_variance[n=400,point=0,functional=identity]"] > 0

    def test_local_linear_variance(self):
        result = run_experiment(make_spec("local_linear_variance", replications=4, k_rule={"rule": "fixed", "k": 20}))
        assert 0.0 <= result.aggregates["coverage[n=100,point=0]"] <= 1.0
        assert result.aggregates["rank_deficient_frequency[n=200,point=0]"] == 0.0

    def test_concentration_frequencies(self):
        result = run_experiment(make_spec("concentration", ball_count=30, dimension=2))
        for key in ("chernoff_lower_violation_frequency[n=100]", "chernoff_upper_violation_frequency[n=200]",
                    "ball_violation_frequency[n=100]"):
            assert 0.0 <= result.aggregates[key] <= 1.0


class TestBoundValidity:

    def spec(self, **fields):
        return make_spec("bound_validity", n_grid=[200], k_grid=[5, 10], replications=5,
                         functionals=["identity", "cdf"], K_grid=[1.0, 2.0, 4.0], **fields)

    def test_run(self):
        result = run_experiment(self.spec())
        assert result.aggregates["K"] == 1.0
        assert 0.0 <= result.aggregates["violation_frequency"] <= 1.0
        assert "k_sweep_slope[n=200]" in result.aggregates
        assert {r.k for r in result.records} == {5, 10}

    def test_calibration(self, tmp_path):
        calibration = calibrate_K(self.spec(), out_dir=tmp_path)
        assert isinstance(calibration, Calibration)
        assert calibration.grid == [1.0, 2.0, 4.0]
        assert calibration.frequencies == sorted(calibration.frequencies, reverse=True)
        if calibration.chosen_K is not None:
            assert calibration.violation_frequency <= calibration.target
        assert (tmp_path / "calibration.json").exists()

    def test_window_rule_keeps_k_inside_the_window(self):
        spec = make_spec("bound_validity", n_grid=[10_000], k_rule={"rule": "theorem_window"},
                         functionals=["cdf"], vc_v=2.0)
        experiment = ExperimentFactory.get_experiment(spec)
        assert experiment.k_values() == [465]
        assert not any("admissible window" in note for note in experiment.regime_notes())

    def test_power_rule_below_the_window_is_noted(self):
        spec = make_spec("bound_validity", n_grid=[2000], k_rule={"rule": "power", "a": 0.6},
                         functionals=["cdf"], vc_v=2.0)
        experiment = ExperimentFactory.get_experiment(spec)
        assert experiment.k_values() == [96]
        assert any("admissible window" in note for note in experiment.regime_notes())

    def test_calibration_needs_bound_validity(self):
        with pytest.raises(InvalidSpecError):
            Orchestrator.create(make_spec("clt")).calibrate()
