import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from rkkynav import drive as drv
from rkkynav.drive import ExchangeDrive
from rkkynav.errors import NegativeTime, ZeroDamping


def quad_eti(d, t):
    """Reference ETI by direct quadrature of the waveform."""
    pts = None
    if d.period:
        pts = np.arange(d.period / 4, t, d.period / 4)[:100]
    val, _ = integrate.quad(lambda s: drv.value(d, s), 0.0, t, points=pts,
                            epsabs=1e-13, epsrel=1e-13, limit=500)
    return val


DRIVES = [
    ExchangeDrive.constant(-1.0),
    ExchangeDrive.sinusoidal(-1.0, period=0.63, phi=0.3),
    ExchangeDrive.sinusoidal(2.0, period=1.7, phi=-1.1),
    ExchangeDrive.step_stop(-1.0, 0.63),
    ExchangeDrive.cos2_pulse(-1.0, 0.8),
    ExchangeDrive.damped(-1.0, period=0.63, phi=math.radians(30), eta=0.05),
    ExchangeDrive.tabulated([0.0, 0.2, 0.5, 1.0], [0.0, -1.0, 0.5, 0.2]),
]


@pytest.mark.parametrize("d", DRIVES, ids=lambda d: d.kind)
def test_eti_matches_quadrature(d):
    ts = np.array([0.0, 0.05, 0.157, 0.3, 0.41, 0.8, 1.3, 2.9])
    got = drv.eti(d, ts)
    want = np.array([quad_eti(d, t) for t in ts])
    assert np.allclose(got, want, atol=1e-9, rtol=0)


@pytest.mark.parametrize("d", DRIVES, ids=lambda d: d.kind)
def test_scalar_and_array_agree(d):
    ts = np.linspace(0, 2, 7)
    assert np.allclose([drv.eti(d, t) for t in ts], drv.eti(d, ts))
    assert isinstance(drv.value(d, 0.3), float)


def test_negative_time_rejected():
    with pytest.raises(NegativeTime):
        drv.eti(DRIVES[1], -0.1)
    with pytest.raises(NegativeTime):
        drv.value(DRIVES[0], [0.0, -1e-3])


def test_sinusoidal_quarter_period_eti():
    T = 0.6285
    d = ExchangeDrive.sinusoidal(-1.0, period=T)
    assert drv.eti(d, T / 4) == pytest.approx(-T / (2 * math.pi))
    # full period returns the clock to zero
    assert drv.eti(d, T) == pytest.approx(0.0, abs=1e-15)


def test_step_stop_freezes_after_quarter():
    T = 0.6275
    d = ExchangeDrive.step_stop(-1.0, T)
    frozen = -T / (2 * math.pi)
    assert np.allclose(drv.eti(d, [T / 4, T / 2, 10.0]), frozen)
    assert drv.value(d, T / 3) == 0.0


def test_cos2_pulse_stops_and_levels():
    T = 0.8
    d = ExchangeDrive.cos2_pulse(-1.0, T)
    # the waveform vanishes on [T/4, 3T/4] and the clock sits at J0 T / 8 there
    ts = np.linspace(T / 4, 3 * T / 4, 11)
    assert np.allclose(drv.value(d, ts), 0.0, atol=1e-15)
    assert np.allclose(drv.eti(d, ts), -T / 8)
    assert drv.eti(d, T) == pytest.approx(0.0, abs=1e-15)
    assert drv.eti(d, 1.25 * T) == pytest.approx(-T / 8)


def test_damped_limits():
    d = ExchangeDrive.damped(-1.0, period=0.63, phi=math.radians(30), eta=7e-3)
    w, eta, phi = d.omega, d.eta, d.phi
    # steady value from integrating J0 cos(wt + phi) e^{-eta t} to infinity
    closed = -1.0 * (eta * math.cos(phi) - w * math.sin(phi)) / (eta ** 2 + w ** 2)
    assert drv.eti_steady(d) == pytest.approx(closed, abs=1e-15)
    assert drv.eti(d, 1e4) == pytest.approx(closed, abs=1e-14)
    with pytest.raises(ZeroDamping):
        drv.eti_steady(ExchangeDrive.damped(-1.0, period=1.0, eta=0.0))


@settings(max_examples=60, deadline=None)
@given(t=st.floats(0, 200), eta=st.floats(1e-3, 1.0), phi=st.floats(-math.pi, math.pi),
       period=st.floats(0.2, 5.0))
def test_damped_eti_within_envelope(t, eta, phi, period):
    d = ExchangeDrive.damped(-1.0, period=period, phi=phi, eta=eta)
    lo, hi = drv.eti_bounds(d, t)
    val = drv.eti(d, t)
    assert lo - 1e-12 <= val <= hi + 1e-12


@settings(max_examples=60, deadline=None)
@given(t=st.floats(0, 50), period=st.floats(0.1, 5.0), J0=st.floats(-3, 3).filter(lambda x: abs(x) > 1e-3))
def test_sinusoid_eti_bounded_and_odd_in_amplitude(t, period, J0):
    d = ExchangeDrive.sinusoidal(J0, period=period)
    val = drv.eti(d, t)
    assert abs(val) <= abs(J0) * period / (2 * math.pi) + 1e-12
    assert drv.eti(d.scaled(-1.0), t) == pytest.approx(-val, abs=1e-12)


def test_proportionality():
    a = ExchangeDrive.sinusoidal(-1.0, period=1.0, phi=0.2)
    assert drv.proportionality(a, a.scaled(0.5)) == pytest.approx(2.0)
    anti = ExchangeDrive.sinusoidal(-1.0, period=1.0, phi=0.2 + math.pi)
    assert drv.proportionality(a, anti) == pytest.approx(-1.0)
    off = ExchangeDrive.sinusoidal(-1.0, period=1.0, phi=0.7)
    assert drv.proportionality(a, off) is None
    assert drv.proportionality(a, ExchangeDrive.sinusoidal(-1.0, period=1.1, phi=0.2)) is None
    assert drv.proportionality(a, ExchangeDrive.constant()) is None


def test_invalid_drives():
    with pytest.raises(ValueError):
        ExchangeDrive("square")
    with pytest.raises(ValueError):
        ExchangeDrive.sinusoidal(-1.0, period=0.0)
    with pytest.raises(ValueError):
        ExchangeDrive.tabulated([0.1, 0.2], [1.0, 1.0])


def test_adaptive_integral_matches_known_value():
    assert drv.adaptive_integral(math.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-12)
    assert drv.adaptive_integral(math.sin, 1.0, 1.0) == 0.0
