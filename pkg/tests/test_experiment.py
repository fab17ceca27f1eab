import math
from io import StringIO

import numpy as np
import pytest

from matcert import experiment as ex
from matcert import interp, linalg
from oracles import brute_hull_vertices, multiset_close


def test_paper_nodes_list():
    nodes = ex.paper_nodes()
    assert nodes.m == 16
    assert max(z.real for z in nodes) == 0.0
    pi = math.pi
    assert nodes.values[0] == 0
    assert nodes.values[1] == pi * 1j and nodes.values[2] == -pi * 1j
    assert nodes.values[-2:] == (-0.5 + pi * 1j, -0.5 - pi * 1j)
    assert brute_hull_vertices(nodes.values) == {
        pi * 1j, -pi * 1j, -1 + pi * 1j, -1 - pi * 1j}


def test_config_validation():
    with pytest.raises(ValueError):
        ex.ExperimentConfig(dim=1)
    with pytest.raises(ValueError):
        ex.ExperimentConfig(trials=0)
    with pytest.raises(ValueError):
        ex.ExperimentConfig(rect=(0.0, -1.0, -1.0, 1.0))
    # a rectangle degenerated to a point is allowed
    ex.ExperimentConfig(rect=(-0.5, -0.5, 0.0, 0.0))


def test_random_trial_matrix_spectrum():
    rng = np.random.default_rng(51)
    rect = (-1.0, 0.0, -math.pi, math.pi)
    t, d, a = ex.random_trial_matrix(12, rect, rng)
    dvals = np.diag(d)
    assert all(rect[0] <= z.real <= rect[1] and rect[2] <= z.imag <= rect[3]
               for z in dvals)
    assert np.isfinite(a).all() and np.iscomplexobj(a)
    assert np.max(np.abs(t.imag)) == 0.0  # similarity factor is real-valued
    kappa = np.linalg.cond(t, 2)
    assert multiset_close(linalg.eigenvalues(a), dvals, 1e-6 * kappa)


def test_sharp_exp_identity_at_zero():
    rng = np.random.default_rng(52)
    t, d, _ = ex.random_trial_matrix(8, (-1.0, 0.0, -1.0, 1.0), rng)
    kappa = np.linalg.cond(t, 2)
    got = ex.sharp_exp(t, d, 0.0)
    assert linalg.spectral_norm(got - np.eye(8)) <= 1e-10 * kappa


def test_sharp_exp_diagonal_similarity():
    d = np.diag([-0.5 + 1j, -0.1 - 2j])
    got = ex.sharp_exp(np.eye(2), d, 0.5)
    assert np.allclose(got, np.diag(np.exp(0.5 * np.diag(d))), rtol=1e-14)


def test_sharp_exp_matches_matrix_exp():
    rng = np.random.default_rng(53)
    t, d, a = ex.random_trial_matrix(10, (-1.0, 0.0, -math.pi, math.pi), rng)
    kappa = np.linalg.cond(t, 2)
    diff = linalg.spectral_norm(ex.sharp_exp(t, d, 1.0) - linalg.matrix_exp(a))
    assert diff <= 1e-7 * kappa


def test_sharp_exp_range_check():
    with pytest.raises(ValueError):
        ex.sharp_exp(np.eye(2), np.eye(2), 1.5)


def test_run_trial_record():
    cfg = ex.ExperimentConfig(dim=16, trials=1, seed=7)
    rec = ex.run_trial(cfg, 0)
    assert rec.trial == 0
    assert rec.e1 >= rec.e0 > 0
    assert rec.ratio == rec.e1 / rec.e0
    assert rec.excluded == (rec.kappa > cfg.kappa_cutoff)
    assert math.factorial(16) == 20922789888000


def test_degenerate_rectangle_trial():
    cfg = ex.ExperimentConfig(dim=2, trials=1, rect=(-0.5, -0.5, 0.0, 0.0), seed=3)
    records, _ = ex.run_experiment(cfg)
    rec = records[0]
    # D is exactly -I/2, so both the error and the certificate are tiny
    assert rec.e0 < 1e-6 and rec.e1 < 1e-6
    assert rec.e1 >= rec.e0


def test_run_experiment_reproducible():
    cfg = ex.ExperimentConfig(dim=12, trials=4, seed=123)
    rec1, stats1 = ex.run_experiment(cfg)
    rec2, stats2 = ex.run_experiment(cfg)
    assert rec1 == rec2
    assert stats1 == stats2
    assert ex.records_csv_text(rec1) == ex.records_csv_text(rec2)


def test_run_experiment_threads_match_serial():
    cfg = ex.ExperimentConfig(dim=10, trials=4, seed=5)
    serial, _ = ex.run_experiment(cfg, threads=1)
    threaded, _ = ex.run_experiment(cfg, threads=3)
    assert serial == threaded


def test_stats_aggregation():
    recs = [
        ex.TrialRecord(0, 1.0, 2.0, 2.0, 10.0, False, 0),
        ex.TrialRecord(1, 2.0, 8.0, 4.0, 20.0, False, 1),
        ex.TrialRecord(2, 1.0, 3.0, 3.0, 2e5, True, 2),
    ]
    stats = ex.compute_stats(recs)
    assert stats.kept_count == 2
    assert stats.excluded_count == 1
    assert stats.e0_mean == pytest.approx(1.5)
    assert stats.ratio_median == pytest.approx(3.0)
    # sample standard deviation, n - 1 divisor
    assert stats.ratio_std == pytest.approx(math.sqrt(2.0))
    assert stats.kappa_mean_kept == pytest.approx(15.0)
    assert stats.kappa_mean_all == pytest.approx((10.0 + 20.0 + 2e5) / 3.0)


def test_stats_all_excluded_raises():
    recs = [ex.TrialRecord(0, 1.0, 2.0, 2.0, 1e9, True, 0)]
    with pytest.raises(ex.ExperimentError):
        ex.compute_stats(recs)


def test_run_experiment_aborts_on_majority_failures(monkeypatch):
    def always_fails(cfg, index, config=None):
        raise ex.ExperimentError("forced failure")

    monkeypatch.setattr(ex, "run_trial", always_fails)
    with pytest.raises(ex.ExperimentError, match="aborting"):
        ex.run_experiment(ex.ExperimentConfig(dim=4, trials=3, seed=0))


def test_run_trial_logs_expm_cross_check(caplog):
    import logging
    cfg = ex.ExperimentConfig(dim=8, trials=1, seed=13)
    with caplog.at_level(logging.DEBUG, logger="matcert.experiment"):
        ex.run_trial(cfg, 0)
    assert any("drift" in rec.message for rec in caplog.records)


def test_norms_curve_consistency_with_trial():
    cfg = ex.ExperimentConfig(dim=10, trials=1, seed=77, t_count=41)
    rec = ex.run_trial(cfg, 0)
    rng = np.random.default_rng(cfg.seed + rec.seed_offset)
    t, d, _ = ex.random_trial_matrix(cfg.dim, cfg.rect, rng)
    curve = ex.norms_curve(ex.paper_nodes(), t_count=cfg.t_count, factors=(t, d))
    assert len(curve) == cfg.t_count
    a = (t * np.diag(d)[None, :]) @ np.linalg.inv(t)
    om_norm = linalg.spectral_norm(interp.omega_at_matrix(ex.paper_nodes(), a))
    assert curve[0][0] == 0.0
    assert curve[0][1] == pytest.approx(om_norm, rel=1e-9)
    assert max(v for _, v in curve) / math.factorial(16) == pytest.approx(rec.e1, rel=1e-12)


def test_norms_curve_argument_check():
    with pytest.raises(ValueError):
        ex.norms_curve(ex.paper_nodes(), matrix=np.eye(2), factors=(np.eye(2), np.eye(2)))
    with pytest.raises(ValueError):
        ex.norms_curve(ex.paper_nodes())


def test_csv_and_json_emission(tmp_path):
    cfg = ex.ExperimentConfig(dim=8, trials=2, seed=9)
    csv_path = tmp_path / "records.csv"
    json_path = tmp_path / "stats.json"
    records, stats = ex.run_experiment(cfg, out_csv=csv_path, out_json=json_path)
    text = csv_path.read_text()
    assert text.splitlines()[0] == "trial,e0,e1,ratio,kappa,excluded"
    assert len(text.splitlines()) == 3
    assert text == ex.records_csv_text(records)
    import json as json_mod
    payload = json_mod.loads(json_path.read_text())
    assert payload["kept_count"] + payload["excluded_count"] == 2
    assert payload == stats.to_json_dict()
    buf = StringIO()
    ex.write_curve_csv(buf, [(0.0, 1.0), (1.0, 0.5)])
    assert buf.getvalue() == "t,norm\n0.0,1.0\n1.0,0.5\n"
