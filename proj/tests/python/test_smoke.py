import math

import numpy as np
import pytest

import adcons


def test_benchmark_spectrum():
    t = adcons.benchmark_topology()
    assert t.n_agents == 8 and t.n_edges == 10
    eigs, l2 = adcons.spectrum(t)
    assert eigs.shape == (8,)
    assert abs(eigs[0]) < 1e-12
    assert l2 == pytest.approx(eigs[1])
    assert adcons.static_coupling_bound(t) == pytest.approx(1.0 / l2)
    lap = adcons.laplacian(t)
    assert np.allclose(lap @ np.ones(8), 0.0)


def test_ring_fiedler_closed_form():
    _, l2 = adcons.spectrum(adcons.ring_topology(8))
    assert l2 == pytest.approx(2.0 - 2.0 * math.cos(2.0 * math.pi / 8), abs=1e-12)


def test_topology_errors():
    with pytest.raises(adcons.TopologyError, match="self-loop"):
        adcons.Topology(3, [(1, 1)])
    with pytest.raises(adcons.TopologyError, match="duplicate"):
        adcons.Topology(3, [(0, 1), (1, 0)])


def test_linear_gain_double_integrator():
    model = adcons.LinearModel(np.array([[0.0, 1.0], [0.0, 0.0]]), np.array([[0.0], [1.0]]))
    gain = adcons.solve_linear_gain(model)
    margins = adcons.verify_consensus_gain(model, gain)
    assert margins["lmi_max_eig"] < -1e-8
    assert margins["p_min_eig"] > 0.0
    assert adcons.gamma_consistency(gain.F, gain.Gamma) <= 1e-15
    w, residual = adcons.solve_care(model.A, model.B)
    assert residual <= 1e-8
    assert np.allclose(np.linalg.inv(w), gain.P)


def test_unstabilizable_pair_raises():
    model = adcons.LinearModel(np.eye(1), np.zeros((1, 1)))
    ok, modes = adcons.check_stabilizable(model.A, model.B)
    assert not ok and len(modes) == 1
    with pytest.raises(adcons.SynthesisError, match="stabilizable"):
        adcons.solve_linear_gain(model)


def test_adaptive_linear_consensus():
    model = adcons.LinearModel(np.array([[0.0, 1.0], [-1.0, 0.5]]), np.array([[0.0], [1.0]]))
    gain = adcons.solve_linear_gain(model)
    cfg = adcons.SimConfig()
    cfg.t_final = 30.0
    cfg.seed = 3
    cfg.record_stride = 100
    traj = adcons.simulate_adaptive(model, gain, adcons.ring_topology(6), cfg)
    assert traj.states.shape == (len(traj), 6, 2)
    assert traj.couplings.shape == (len(traj), 6)
    assert np.all(np.diff(traj.couplings, axis=0) >= -1e-12)
    assert np.all(np.diff(traj.lyapunov) <= 1e-9)
    assert adcons.consensus_error(traj.states[-1]) == pytest.approx(traj.consensus_error[-1])
    assert adcons.verdict(traj, 1e-3).achieved


def test_manipulator_matches_builtin_demo():
    model = adcons.manipulator_model()
    ok, ratio = adcons.check_lipschitz(model, 20000, 10.0, 1)
    assert ok and ratio <= model.gamma
    gain = adcons.solve_lipschitz_gain(model)
    assert adcons.verify_lipschitz_gain(model, gain)["block_max_eig"] <= -1e-8
    cfg = adcons.SimConfig()
    cfg.record_stride = 100
    traj = adcons.simulate_adaptive(model, gain, adcons.benchmark_topology(), cfg)
    v = adcons.verdict(traj, 1e-3)
    assert v.achieved and v.final_error <= 1e-3


def test_python_nonlinearity():
    a = np.array([[0.0, 1.0], [-2.0, 0.0]])
    b = np.array([[0.0], [1.0]])
    model = adcons.NonlinearModel(a, b, np.eye(2), lambda x: 0.1 * np.sin(x), 0.1)
    assert np.allclose(model.f(np.array([0.5, 1.0])), 0.1 * np.sin([0.5, 1.0]))
    gain = adcons.solve_lipschitz_gain(model)
    cfg = adcons.SimConfig()
    cfg.t_final = 10.0
    cfg.record_stride = 100
    traj = adcons.simulate_adaptive(model, gain, adcons.complete_topology(4), cfg)
    assert np.all(np.isfinite(traj.states))
    assert traj.consensus_error[-1] < traj.consensus_error[0]


def test_leader_tracking():
    model = adcons.manipulator_model().linear
    gain = adcons.solve_linear_gain(model)
    cfg = adcons.SimConfig()
    cfg.t_final = 10.0
    cfg.record_stride = 100
    d = np.zeros(5)
    d[0] = 1.0
    traj = adcons.simulate_leader(model, gain, adcons.path_topology(5), d, cfg,
                                  kappa_leader=np.full(5, 10.0))
    assert traj.has_leader
    assert traj.tracking_errors.shape == (len(traj), 5)
    assert traj.leader_states.shape == (len(traj), 4)
    with pytest.raises(adcons.ConfigError):
        adcons.simulate_leader(model, gain, adcons.path_topology(5), np.zeros(5), cfg)


def test_static_divergence_raises():
    model = adcons.LinearModel(np.array([[1.0]]), np.array([[1.0]]))
    cfg = adcons.SimConfig()
    cfg.dt = 0.1
    cfg.t_final = 2000.0
    with pytest.raises(adcons.DivergenceError) as info:
        adcons.simulate_static(model, np.array([[-1.0]]), 0.0, adcons.ring_topology(4), cfg)
    assert info.value.time > 0.0


def test_run_cli(tmp_path, capsys):
    assert adcons.run_cli(["demo", "manipulator", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "states.csv").exists()
    assert (tmp_path / "weights.csv").exists()
    assert "consensus reached" in capsys.readouterr().out
    assert adcons.run_cli(["demo", "nonexistent"]) == 1
