import dataclasses
import json
import math
import os

import numpy as np
import pytest

from proxlab.core import Point2, WeightPair
from proxlab.experiments import (
    MISMATCH_FLOOR_DB,
    RECORD_COLUMNS,
    ScenarioConfig,
    TrialRecord,
    firm_rule,
    fixed_design_matrix,
    generate_model,
    mean_mismatch,
    scenario_a,
    scenario_b,
    scenario_c,
    system_mismatch,
    write_records_csv,
)
from proxlab.scalar_ops import FirmParams
from proxlab.solver import SpectralBounds, spectral_bounds


def test_fixed_design_matrix_and_its_spectrum():
    a = fixed_design_matrix()
    assert np.allclose(a, [[0.5405, 0.405], [0.405, 0.455]], atol=1e-12)
    b = spectral_bounds(a)
    assert b.rho == pytest.approx(0.00819025, abs=1e-10)
    assert b.kappa == pytest.approx(0.819025, abs=1e-10)


def test_system_mismatch_values():
    assert system_mismatch((0.0, 1.0), (0.0, 1.0)) == MISMATCH_FLOOR_DB
    assert system_mismatch((0.0, 0.99), (0.0, 1.0)) == pytest.approx(-40.0, abs=1e-12)
    assert system_mismatch((0.0, 0.0), (0.0, 1.0)) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        system_mismatch((1.0, 1.0), (0.0, 0.0))


def test_config_validation():
    with pytest.raises(ValueError):
        ScenarioConfig.scenario_b_defaults(trials=0)
    with pytest.raises(ValueError):
        ScenarioConfig.scenario_b_defaults(matrix_kind="fixed", m_rows=4)
    with pytest.raises(ValueError):
        ScenarioConfig.scenario_b_defaults(threads=0)
    with pytest.raises(ValueError):
        ScenarioConfig.scenario_b_defaults(snr_list_db=())
    with pytest.raises(ValueError):
        ScenarioConfig.scenario_b_defaults(matrix_kind="dense")


def test_generate_model_is_deterministic_per_key():
    cfg = ScenarioConfig.scenario_c_defaults(seed=99, trials=2)
    m1 = generate_model(cfg, 1, 20.0)
    m2 = generate_model(cfg, 1, 20.0)
    assert np.array_equal(m1.a_matrix, m2.a_matrix)
    assert np.array_equal(m1.y, m2.y)
    assert m1.a_matrix.shape == (cfg.m_rows, 2)

    other = generate_model(cfg, 2, 20.0)
    assert not np.array_equal(m1.a_matrix, other.a_matrix)


def test_generate_model_noiseless_and_noise_power():
    cfg = ScenarioConfig.scenario_b_defaults(seed=5, trials=1, snr_list_db=(math.inf,))
    model = generate_model(cfg, 0, math.inf)
    clean = model.a_matrix @ np.array([cfg.x_true.x1, cfg.x_true.x2])
    assert np.array_equal(model.y, clean)

    # empirical noise power tracks the SNR rule sigma^2 = ||Ax||^2 10^(-snr/10) / M
    snr_db = 20.0
    target = float(clean @ clean) * 10.0 ** (-snr_db / 10.0)
    powers = []
    for trial in range(300):
        m = generate_model(cfg, trial, snr_db)
        noise = m.y - clean
        powers.append(float(noise @ noise))
    assert np.mean(powers) == pytest.approx(target, rel=0.2)


def test_firm_rule_values():
    fp, mu_f = firm_rule(SpectralBounds(1.0, 4.0), 3.0, 0.5)
    assert fp == FirmParams(0.6, 3.0)
    assert mu_f == pytest.approx(0.325, abs=1e-15)


def test_scenario_a_endpoints_and_outputs(tmp_path):
    cfg = ScenarioConfig.scenario_a_defaults(out_path=str(tmp_path))
    result = scenario_a(cfg)

    by_method = {r.method: r for r in result.records}
    rowl, erowl = by_method["ROWL"], by_method["eROWL"]
    assert rowl.x_hat.x1 == pytest.approx(0.8838408887922491, abs=1e-10)
    assert rowl.x_hat.x2 == pytest.approx(0.0, abs=1e-10)
    assert rowl.iterations == 197
    assert erowl.x_hat.x1 == pytest.approx(0.0, abs=1e-10)
    assert erowl.x_hat.x2 == pytest.approx(1.0, abs=1e-6)
    assert erowl.iterations == 76
    assert all(r.converged for r in result.records)

    assert len(result.trajectories["ROWL"]) == 2 * rowl.iterations + 1
    assert len(result.trajectories["eROWL"]) == 2 * erowl.iterations + 1
    assert result.trajectories["ROWL"][0] == Point2(0.0, 0.0)

    for name in ("trajectory_rowl.csv", "trajectory_erowl.csv", "summary.csv", "meta.json"):
        assert os.path.exists(tmp_path / name)
    lines = (tmp_path / "trajectory_rowl.csv").read_text().splitlines()
    assert lines[0] == "step,x1,x2"
    assert lines[1] == "0,0,0"
    assert len(lines) == 1 + 2 * rowl.iterations + 1

    meta = json.loads((tmp_path / "meta.json").read_text())
    assert meta["scenario"] == "A"
    assert meta["derived"]["mu"] == 2
    assert meta["config"]["snr_list_db"] == ["inf"]


def test_scenario_b_small_run_structure_and_replay(tmp_path):
    cfg = ScenarioConfig.scenario_b_defaults(seed=7, trials=6, out_path=str(tmp_path / "one"))
    records = scenario_b(cfg)
    assert len(records) == 6 * 3
    assert [r.method for r in records] == ["LS"] * 6 + ["ROWL"] * 6 + ["eROWL"] * 6
    assert [r.trial for r in records[:6]] == list(range(6))
    assert all(r.converged for r in records)
    assert all(r.iterations == 0 for r in records if r.method == "LS")

    again = scenario_b(
        dataclasses.replace(cfg, out_path=str(tmp_path / "two"))
    )
    assert records == again
    bytes_one = (tmp_path / "one" / "records.csv").read_bytes()
    bytes_two = (tmp_path / "two" / "records.csv").read_bytes()
    assert bytes_one == bytes_two

    means_lines = (tmp_path / "one" / "means.csv").read_text().splitlines()
    assert means_lines[0] == "scenario,method,snr_db,xtrue1,mean_mismatch_db,trials"
    assert len(means_lines) == 1 + 3


def test_scenario_b_threads_do_not_change_results():
    cfg = ScenarioConfig.scenario_b_defaults(seed=11, trials=4)
    seq = scenario_b(cfg)
    par = scenario_b(dataclasses.replace(cfg, threads=2))
    assert seq == par


def test_scenario_b_noiseless_least_squares_is_exact():
    cfg = ScenarioConfig.scenario_b_defaults(seed=3, trials=2, snr_list_db=(math.inf,))
    records = scenario_b(cfg)
    for r in records:
        if r.method == "LS":
            assert r.mismatch_db <= -200.0


def test_scenario_c_includes_firm_and_sweeps_truth():
    cfg = ScenarioConfig.scenario_c_defaults(
        seed=2, trials=3, snr_list_db=(20.0,), x1_sweep=(1.5,)
    )
    records = scenario_c(cfg)
    assert len(records) == 3 * 4
    assert {r.method for r in records} == {"LS", "ROWL", "eROWL", "firm"}
    assert all(r.x_true.x1 == 1.5 for r in records)
    means = mean_mismatch(records)
    assert ("firm", 20.0, 1.5) in means
    assert all(math.isfinite(v) for v in means.values())


def test_mean_mismatch_groups_and_averages():
    def rec(method, snr, x1, db):
        return TrialRecord(
            scenario="B", method=method, trial=0, snr_db=snr,
            x_true=Point2(x1, 1.0), x_hat=Point2(0.0, 0.0),
            mismatch_db=db, iterations=1, converged=True,
        )

    means = mean_mismatch(
        [rec("LS", 20.0, 0.01, -10.0), rec("LS", 20.0, 0.01, -20.0),
         rec("LS", 10.0, 0.01, -7.0)]
    )
    assert means[("LS", 20.0, 0.01)] == pytest.approx(-15.0)
    assert means[("LS", 10.0, 0.01)] == pytest.approx(-7.0)


def test_records_csv_round_trips_floats(tmp_path):
    r = TrialRecord(
        scenario="B", method="eROWL", trial=3, snr_db=20.0,
        x_true=Point2(0.01, 1.0), x_hat=Point2(1.0 / 3.0, -2.0 / 7.0),
        mismatch_db=-12.345678901234567, iterations=42, converged=True,
    )
    path = tmp_path / "records.csv"
    write_records_csv(str(path), [r])
    header, line = path.read_text().splitlines()
    assert header == ",".join(RECORD_COLUMNS)
    fields = line.split(",")
    assert fields[0] == "B" and fields[1] == "eROWL"
    assert int(fields[2]) == 3
    assert float(fields[6]) == 1.0 / 3.0  # 17 significant digits survive
    assert float(fields[7]) == -2.0 / 7.0
    assert fields[10] == "true"
