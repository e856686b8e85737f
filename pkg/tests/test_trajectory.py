import math

import numpy as np
import pytest

from rkkynav import drive as drv
from rkkynav import trajectory as tr
from rkkynav.drive import ExchangeDrive
from rkkynav.errors import DomainError, InsufficientSamples
from rkkynav.states import SystemConfig


@pytest.fixture(scope="module")
def w1_period():
    return tr.find_tstar("W1", 0.01, "mixed")


def test_find_tstar_w1(w1_period):
    assert w1_period.Tstar == pytest.approx(0.6285, abs=2e-3)
    assert w1_period.I_star < 0
    rho, op = tr._state_and_operator("W1", 0.01, "mixed", SystemConfig(), "qubit")
    assert abs(tr.eti_curve(rho, op, [w1_period.I_star])[0]) < 1e-8


def test_find_tstar_none_without_boundary():
    assert tr.find_tstar("W6", 0.01, "mixed") is None
    assert tr.find_tstar("W1", 0.01, "pure") is None


def test_tstar_scales_with_amplitude(w1_period):
    # the boundary ETI is fixed, so T* goes as 1/|J0|
    p2 = tr.find_tstar("W1", 0.01, "mixed", J0=-2.0)
    assert p2.Tstar == pytest.approx(w1_period.Tstar / 2, rel=1e-7)
    # C_E is even in the ETI, so the sign of J0 does not matter
    pp = tr.find_tstar("W1", 0.01, "mixed", J0=1.0)
    assert pp.Tstar == pytest.approx(w1_period.Tstar, rel=1e-7)


def test_boundary_eti_is_waveform_independent(w1_period):
    rho, op = tr._state_and_operator("W1", 0.01, "mixed", SystemConfig(), "qubit")
    const = ExchangeDrive.constant(-1.0)
    sine = ExchangeDrive.sinusoidal(-1.0, period=3.0)
    t_c = tr.find_boundary_time(rho, op, const, 1.0)
    t_s = tr.find_boundary_time(rho, op, sine, 0.75)
    assert drv.eti(const, t_c) == pytest.approx(w1_period.I_star, abs=1e-6)
    assert drv.eti(sine, t_s) == pytest.approx(w1_period.I_star, abs=1e-6)


def test_analytic_estimates():
    assert tr.analytic_tstar("W2", 0.01) == pytest.approx(2 * math.sqrt(2))
    assert tr.analytic_tstar("W1", 0.01) == pytest.approx(math.sqrt(0.16 / 1.01))
    assert tr.analytic_tstar("W10", -0.01) > 0
    with pytest.raises(DomainError):
        tr.analytic_tstar("W10", 0.01)
    with pytest.raises(DomainError):
        tr.analytic_tstar("W6", 0.01)
    # under a constant drive the boundary is met at T/4, i.e. T = 4 |I*|
    for label in ("W1", "W7", "W13"):
        i_star = tr.find_tstar(label, 0.01, "mixed").I_star
        assert tr.analytic_tstar(label, 0.01) == pytest.approx(4 * abs(i_star), rel=0.02)


def test_eti_at_quarter_ratio():
    s = tr.eti_at_quarter("W2", waveform="sinusoidal", tstar=2.6185)
    c = tr.eti_at_quarter("W2", waveform="constant", tstar=2.6185)
    assert s == pytest.approx(c * 2 / math.pi)
    assert c == pytest.approx(0.655, abs=1e-3)
    with pytest.raises(ValueError):
        tr.eti_at_quarter("W2", waveform="square", tstar=1.0)


def _traj(c, t=None):
    c = np.asarray(c, dtype=float)
    return tr.Trajectory(np.arange(len(c), dtype=float) if t is None else t, c)


def test_classifier_synthetic_cases():
    assert tr.classify_near_zero(_traj([0.1, 0.05, -0.02, -0.1])) == "ESD"
    assert tr.classify_near_zero(_traj([-0.1, -0.05, 0.02])) == "ESB"
    assert tr.classify_near_zero(_traj([0.1, 0.0, 0.1])) == "TZD"
    assert tr.classify_near_zero(_traj([0.0, 0.1, 0.2])) == "TZD"
    assert tr.classify_near_zero(_traj([0.1, 0.0, -0.1])) == "ESD"
    assert tr.classify_near_zero(_traj([0.1, 0.2, 0.3])) == "none"
    assert tr.classify_near_zero(_traj([0.0, 0.0, 0.0])) == "none"
    with pytest.raises(InsufficientSamples):
        tr.classify_near_zero(_traj([0.1, 0.2]))


def test_trajectory_validation():
    with pytest.raises(ValueError):
        tr.Trajectory([0.0, 0.0, 1.0], [0.1, 0.1, 0.1])
    with pytest.raises(ValueError):
        tr.Trajectory([0.0, 1.0], [0.1, 1.5])


def test_frozen_time_trivial_cases():
    t = np.linspace(0, 100, 1001)
    assert tr.frozen_time(tr.Trajectory(t, np.zeros_like(t)), window=10.0) == 0.0
    assert tr.frozen_time(tr.Trajectory(t, 0.1 * np.sin(t)), window=10.0) is None
    settle = 0.1 * np.sin(t) * np.exp(-t / 5)
    tf = tr.frozen_time(tr.Trajectory(t, settle), window=10.0, tol=1e-3)
    # envelope 0.1 e^{-t/5} drops below 5e-4 near t = 26.5
    assert 20 < tf < 27
    with pytest.raises(ValueError):
        tr.frozen_time(tr.Trajectory(t, settle))


@pytest.mark.parametrize("label,kind", [("W1", "mixed"), ("W10", "mixed"), ("W13", "pure")])
def test_bounce_touches_boundary_at_quarter(label, kind):
    traj = tr.run_scenario("bounce", label=label, kind=kind,
                           epsilon=tr.characterize_row(label, kind).epsilon)
    T = traj.meta["T"]
    side = np.sign(traj.c_e[0])
    one = traj.t <= T
    k = np.argmin(side * traj.c_e[one])
    assert abs(traj.c_e[one][k]) < 1e-4
    assert traj.t[one][k] == pytest.approx(T / 4, abs=T / 1000)
    assert traj.classification == "TZD"


def test_snake_and_entangling_shapes():
    snake = tr.run_scenario("snake", label="W7")
    assert len(tr.zero_crossings(snake)) >= 4
    ent = tr.run_scenario("entangling", label="W7")
    assert np.all(np.sign(ent.c_e[0]) * ent.c_e > 1e-4)
    assert ent.classification == "none"


def test_boundary_residing_stays_on_boundary():
    traj = tr.run_scenario("boundary_residing", label="W9")
    after = traj.t >= traj.tstar / 4
    assert np.max(np.abs(traj.c_e[after])) < 1e-6


def test_pulse_stops_on_boundary():
    traj = tr.run_scenario("pulse", label="W7", kind="pure", epsilon=-0.01, periods=3)
    T = traj.meta["T"]
    phase = (traj.t / T) % 1
    stop = (phase > 0.25) & (phase < 0.75)
    assert np.max(np.abs(traj.c_e[stop])) < 1e-6
    assert np.min(traj.c_e[~stop]) < -5e-3


def test_phase_shift_translation():
    p = tr.ScenarioParams(label="W1", periods=3)
    plus = tr.run_scenario("phase_shift", p, phi=math.radians(10))
    minus = tr.run_scenario("phase_shift", p, phi=math.radians(-10))
    T = plus.meta["T"]
    a, b = tr.zero_crossings(plus), tr.zero_crossings(minus)
    assert not np.allclose(np.sort(a), np.sort(b))
    # C_{-phi}(t) = C_{+phi}(t + 2 t_m - T) with t_m = (pi/2 - phi)/omega
    shift = (1 - 2 * (0.25 - 10 / 360)) * T
    assert np.allclose(np.sort(((a + shift) / T) % 1), np.sort((b / T) % 1), atol=0.02)
    assert abs(plus.c_e.max()) != pytest.approx(abs(plus.c_e.min()), abs=1e-3)


def test_out_of_phase_uses_stepper():
    traj = tr.run_scenario("out_of_phase", label="W1", delta_phi=math.radians(60), periods=1)
    assert traj.meta["mode"] == "general_stepper"
    assert traj.meta["unitarity_drift"] < 1e-12
    assert traj.c_e[0] == pytest.approx(0.01)


def test_run_scenarios_emits_both_signs():
    runs = tr.run_scenarios("bounce", tr.ScenarioParams(label="W7", periods=1), [0.01, -0.01])
    assert [r.epsilon for r in runs] == [0.01, -0.01]
    assert runs[0].tstar == runs[1].tstar


def test_unknown_preset():
    with pytest.raises(ValueError):
        tr.run_scenario("zigzag")
