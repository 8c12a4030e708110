"""Smoke tests for the python bindings and the CLI binary."""

import json
import math
import os
import subprocess
import sys

import pytest

import mrepp


def test_map_operations():
    doubling = mrepp.MapSpec.mod1(2)
    assert mrepp.map_apply(doubling, 0.6) == pytest.approx(0.2)
    assert mrepp.map_derivative(doubling, 0.1) == 2.0

    lsv = mrepp.MapSpec.lsv(0.5)
    assert mrepp.map_apply(lsv, 0.25) == pytest.approx(0.4267766952966369)
    assert mrepp.map_apply(lsv, 0.75) == pytest.approx(0.5)

    orbit = mrepp.iterate(doubling, 0.6, 4)
    assert orbit.states == pytest.approx([0.6, 0.2, 0.4, 0.8])

    check = mrepp.verify_periodic(doubling, 1.0 / 3.0, 2)
    assert check.is_periodic
    assert check.deriv_product == pytest.approx(4.0)

    series = mrepp.induce(doubling, (0.5, 1.0), 0.6, 2)
    assert series.return_times[0] == 3


def test_observables_and_thresholds():
    obs = mrepp.ObservableSpec.pareto(1.0, 0.0)
    assert mrepp.evaluate(obs, 0.25) == pytest.approx(4.0)
    assert mrepp.g_inverse(obs, 4.0) == pytest.approx(0.25)
    level = mrepp.threshold_analytic(obs, 1_000_000, 2.0)
    assert level.u == pytest.approx(1e6)
    assert level.v_u * level.tail_prob == pytest.approx(1.0)

    with pytest.raises(ValueError):
        mrepp.threshold_analytic(obs, 10, 20.0)


def test_point_process_pipeline():
    values = [1.0, 5.0, 6.0, 1.0, 1.0, 7.0, 1.0, 1.0]
    level = mrepp.threshold_empirical(
        mrepp.ObservableSpec.pareto(1.0, 0.0), 8, 3.0, values
    )
    assert level.u == 1.0 and level.tail_prob == pytest.approx(3.0 / 8.0)
    ex = mrepp.extract_exceedances(values, 4.0)
    assert [e.time for e in ex.events] == [1, 2, 5]
    clusters = mrepp.identify_clusters(ex, 1)
    assert [c.times for c in clusters] == [[1, 2], [5]]
    assert mrepp.compute_mark(clusters[0], mrepp.MarkKind.AOT) == pytest.approx(3.0)

    mn, none_above = mrepp.max_statistic(values, 10.0)
    assert mn == 7.0 and none_above


def test_theory_closed_forms():
    geo = mrepp.MultiplicityDist.geometric(0.5)
    assert mrepp.multiplicity_cdf(geo, 1.5) == 0.5
    assert mrepp.laplace_multiplicity(mrepp.MultiplicityDist.gpd_exp(), 1.0) == 0.5

    aot = mrepp.MultiplicityDist.aot_log(3.0)
    assert mrepp.kappa_of_x(aot, 1.2 * math.log(3.0)) == 1
    assert mrepp.multiplicity_cdf(aot, 0.9 * math.log(3.0)) == pytest.approx(
        1.0 - 3.0**-0.9
    )

    assert mrepp.ei_periodic(mrepp.MapSpec.mod1(3), 0.0, 1) == pytest.approx(2.0 / 3.0)

    round_trip = mrepp.MultiplicityDist.from_json(aot.to_json())
    assert round_trip.to_json() == aot.to_json()


def test_sampler_determinism():
    spec = mrepp.CompoundPoissonSpec(0.5, mrepp.MultiplicityDist.gpd_exp())
    times1, marks1 = mrepp.sample_compound_poisson(spec, 50.0, seed=7)
    times2, marks2 = mrepp.sample_compound_poisson(spec, 50.0, seed=7)
    assert times1 == times2 and marks1 == marks2
    assert len(times1) > 0
    assert all(m > 0 for m in marks1)

    psi = mrepp.laplace_process(spec, [(0.0, 2.0)], [1.0])
    assert 0.0 < psi < 1.0


def test_stats():
    ecdf = mrepp.empirical_cdf([0.25, 0.75])
    ks = mrepp.ks_distance(ecdf, lambda x: min(max(x, 0.0), 1.0))
    assert ks.statistic == pytest.approx(0.25)

    assert mrepp.two_sample_ks([1.0, 2.0], [1.0, 2.0]).statistic == 0.0


def test_convergence_run():
    config = mrepp.ExperimentConfig.from_json(
        json.dumps(
            {
                "map": "mod1:2",
                "observable": {"type": "log", "zeta": 0.0},
                "p": 1,
                "kind": "repp",
                "tau": 5.0,
                "n_levels": [5000, 20000],
                "replicas": 20,
                "master_seed": 7,
                "threshold_mode": {"mode": "analytic", "density": 1.0},
            }
        )
    )
    report = mrepp.run_convergence(config)
    assert [row.n for row in report.rows] == [5000, 20000]
    for row in report.rows:
        assert 0.0 <= row.theta_hat <= 1.0
        assert 0.0 <= row.evl_prob <= 1.0
    # deterministic
    again = mrepp.run_convergence(config)
    assert report.to_csv() == again.to_csv()


@pytest.mark.skipif("MREPP_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_simulate(tmp_path):
    out = tmp_path / "orbit.csv"
    subprocess.run(
        [
            os.environ["MREPP_CLI"],
            "simulate",
            "--map", "mod1:2",
            "--x0", "0.6",
            "--n", "4",
            "--burn-in", "0",
            "--out", str(out),
        ],
        check=True,
    )
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "t,x"
    assert len(lines) == 5
    assert float(lines[2].split(",")[1]) == pytest.approx(0.2)


@pytest.mark.skipif("MREPP_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_converge_deterministic(tmp_path):
    config = {
        "map": "mod1:2",
        "observable": {"type": "pareto", "alpha": 1.0, "zeta": 0.0},
        "p": 1,
        "kind": "pot",
        "tau": 5.0,
        "n_levels": [5000],
        "replicas": 10,
        "master_seed": 11,
        "threshold_mode": {"mode": "analytic", "density": 1.0},
    }
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(config))
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    cli = os.environ["MREPP_CLI"]
    for out in (out_a, out_b):
        subprocess.run(
            [cli, "converge", "--config", str(config_path), "--out", str(out)],
            check=True,
        )
    assert out_a.read_bytes() == out_b.read_bytes()
    header = out_a.read_text().splitlines()[0]
    assert header.startswith("n,u_n,a_n,v_n,theta_hat,cluster_count,")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
