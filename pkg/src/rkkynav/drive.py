"""Time-dependent exchange waveforms and their exchange-time integrals (ETI).

Time is measured in hbar/|J0| and energies in |J0|. Every waveform has a
closed-form ETI except ``tabulated``, which falls back to adaptive quadrature.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import NegativeTime, QuadratureNonConvergence, ZeroDamping

KINDS = ("constant", "sinusoidal", "step_stop", "cos2_pulse",
         "damped_sinusoidal", "tabulated")

QUAD_ABS_TOL = 1e-10
QUAD_LIMIT = 400


@dataclass(frozen=True)
class ExchangeDrive:
    """Waveform descriptor for one qubit's exchange ``J(t)``.

    Only the parameters relevant to ``kind`` are read. ``tabulated`` drives
    are linear interpolations through ``(times, values)`` and hold zero
    beyond the last sample.
    """

    kind: str
    J0: float = -1.0
    omega: float = 0.0
    phi: float = 0.0
    eta: float = 0.0
    Tstar: float = 1.0
    times: tuple | None = None
    values: tuple | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown drive kind {self.kind!r}")
        for name in ("J0", "omega", "phi", "eta", "Tstar"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.omega < 0:
            raise ValueError("omega must be >= 0")
        if self.eta < 0:
            raise ValueError("eta must be >= 0")
        if self.eta != 0 and self.kind != "damped_sinusoidal":
            raise ValueError("eta is only meaningful for damped_sinusoidal drives")
        if self.kind == "sinusoidal" and self.omega <= 0:
            raise ValueError("sinusoidal drive needs omega > 0")
        if self.kind in ("step_stop", "cos2_pulse") and self.Tstar <= 0:
            raise ValueError("Tstar must be > 0")
        if self.kind == "tabulated":
            if self.times is None or self.values is None:
                raise ValueError("tabulated drive needs times and values")
            t = np.asarray(self.times, dtype=float)
            if len(t) != len(self.values) or len(t) < 2:
                raise ValueError("times and values must have equal length >= 2")
            if t[0] != 0.0 or np.any(np.diff(t) <= 0):
                raise ValueError("tabulated times must start at 0 and increase strictly")
            object.__setattr__(self, "times", tuple(float(x) for x in t))
            object.__setattr__(self, "values", tuple(float(x) for x in self.values))

    # constructors -------------------------------------------------------

    @classmethod
    def constant(cls, J0=-1.0):
        return cls("constant", J0=J0)

    @classmethod
    def sinusoidal(cls, J0=-1.0, period=None, phi=0.0, omega=None):
        return cls("sinusoidal", J0=J0, omega=_omega(period, omega), phi=phi)

    @classmethod
    def step_stop(cls, J0=-1.0, Tstar=1.0):
        return cls("step_stop", J0=J0, Tstar=Tstar)

    @classmethod
    def cos2_pulse(cls, J0=-1.0, Tstar=1.0):
        return cls("cos2_pulse", J0=J0, Tstar=Tstar)

    @classmethod
    def damped(cls, J0=-1.0, period=None, phi=0.0, eta=0.0, omega=None):
        return cls("damped_sinusoidal", J0=J0, omega=_omega(period, omega), phi=phi, eta=eta)

    @classmethod
    def tabulated(cls, times, values):
        return cls("tabulated", J0=float(np.max(np.abs(values))), times=tuple(times),
                   values=tuple(values))

    # convenience --------------------------------------------------------

    @property
    def period(self) -> float | None:
        if self.kind in ("sinusoidal", "damped_sinusoidal") and self.omega > 0:
            return 2 * math.pi / self.omega
        if self.kind in ("step_stop", "cos2_pulse"):
            return self.Tstar
        return None

    def scaled(self, factor: float) -> "ExchangeDrive":
        """Same waveform with amplitude multiplied by ``factor``."""
        from dataclasses import replace
        if self.kind == "tabulated":
            return replace(self, J0=self.J0 * abs(factor),
                           values=tuple(factor * v for v in self.values))
        return replace(self, J0=self.J0 * factor)

    def __call__(self, t):
        return value(self, t)

    def eti(self, t):
        return eti(self, t)


def _omega(period, omega):
    if omega is not None:
        return float(omega)
    if period is None or period <= 0:
        raise ValueError("give a positive period or omega")
    return 2 * math.pi / period


def _check_time(t):
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise NegativeTime("time must be finite and >= 0")
    return arr


def _out(arr, scalar):
    return float(arr) if scalar else arr


def value(drive: ExchangeDrive, t):
    """Exchange ``J(t)``; accepts scalars or arrays."""
    arr = _check_time(t)
    scalar = arr.ndim == 0
    k = drive.kind
    if k == "constant":
        out = np.full_like(arr, drive.J0)
    elif k == "sinusoidal":
        out = drive.J0 * np.cos(drive.omega * arr + drive.phi)
    elif k == "damped_sinusoidal":
        out = drive.J0 * np.cos(drive.omega * arr + drive.phi) * np.exp(-drive.eta * arr)
    elif k == "step_stop":
        T = drive.Tstar
        # Heaviside(0) = 1: the boundary instant keeps cos(pi/2) = 0 anyway
        out = np.where(arr <= T / 4, drive.J0 * np.cos(2 * np.pi * arr / T), 0.0)
    elif k == "cos2_pulse":
        T = drive.Tstar
        c = np.cos(2 * np.pi * arr / T)
        sign = np.where(np.floor(4 * arr / T) % 2 == 0, 1.0, -1.0)
        out = np.where(c >= 0, drive.J0 * c * c * sign, 0.0)
    else:
        ts = np.asarray(drive.times)
        out = np.interp(arr, ts, np.asarray(drive.values), right=0.0)
        out = np.where(arr > ts[-1], 0.0, out)
    return _out(out, scalar)


def eti(drive: ExchangeDrive, t):
    """Exchange-time integral ``I(t) = int_0^t J(t') dt'``."""
    arr = _check_time(t)
    scalar = arr.ndim == 0
    k = drive.kind
    J0 = drive.J0
    if k == "constant":
        out = J0 * arr
    elif k == "sinusoidal":
        w, p = drive.omega, drive.phi
        out = (J0 / w) * (np.sin(w * arr + p) - math.sin(p))
    elif k == "damped_sinusoidal":
        out = _damped_eti(drive, arr)
    elif k == "step_stop":
        T = drive.Tstar
        out = J0 * T / (2 * np.pi) * np.sin(2 * np.pi * np.minimum(arr, T / 4) / T)
    elif k == "cos2_pulse":
        out = _cos2_eti(drive, arr)
    else:
        out = _tabulated_eti(drive, arr)
    return _out(out, scalar)


def _cos2_eti(drive, t):
    J0, T = drive.J0, drive.Tstar
    rate = 2 * np.pi / T

    def prim(x):  # antiderivative of cos^2(rate x)
        return x / 2 + np.sin(2 * rate * x) / (4 * rate)

    n = np.floor(t / T)
    tau = t - n * T
    quarter = np.minimum(np.floor(4 * tau / T), 3)
    first = prim(np.minimum(tau, T / 4))           # drive on, positive sign
    last = prim(np.maximum(tau, 3 * T / 4)) - prim(3 * T / 4)  # drive on, negative sign
    within = np.where(quarter == 0, first, T / 8 - np.where(quarter == 3, last, 0.0))
    # every full period integrates to zero
    return J0 * within


def _damped_eti(drive, t):
    J0, w, eta, p = drive.J0, drive.omega, drive.eta, drive.phi
    if eta == 0.0:
        if w == 0.0:
            return J0 * math.cos(p) * t
        return (J0 / w) * (np.sin(w * t + p) - math.sin(p))
    r = math.hypot(eta, w)
    gamma = J0 / r
    big_phi = p + math.atan2(w, eta)
    return -gamma * np.cos(w * t + big_phi) * np.exp(-eta * t) + gamma * math.cos(big_phi)


def _tabulated_eti(drive, t):
    ts = np.asarray(drive.times)
    flat = np.atleast_1d(t).ravel()
    res = np.empty_like(flat)
    for i, x in enumerate(flat):
        res[i] = adaptive_integral(lambda s: value(drive, s), 0.0, float(min(x, ts[-1])),
                                   breakpoints=ts)
    return res.reshape(np.shape(t))


def adaptive_integral(f, a: float, b: float, abs_tol: float = QUAD_ABS_TOL,
                      breakpoints=None) -> float:
    """Adaptive Gauss-Kronrod integral of ``f`` over ``[a, b]``.

    Raises :class:`QuadratureNonConvergence` when the error estimate stays
    above ``abs_tol`` after the subdivision budget is spent.
    """
    if b <= a:
        return 0.0
    pts = None
    if breakpoints is not None:
        bp = np.asarray(breakpoints, dtype=float)
        bp = bp[(bp > a) & (bp < b)]
        if bp.size:
            pts = bp[:QUAD_LIMIT // 2]
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(f, a, b, epsabs=abs_tol, epsrel=0.0,
                                      limit=QUAD_LIMIT, points=pts)
        except integrate.IntegrationWarning as exc:
            raise QuadratureNonConvergence(str(exc)) from exc
    if err > abs_tol:
        raise QuadratureNonConvergence(f"error estimate {err:.2e} > {abs_tol:.1e}")
    return float(val)


def _require_damped(drive):
    if drive.kind != "damped_sinusoidal":
        raise ValueError("drive must be damped_sinusoidal")
    if drive.eta <= 0:
        raise ZeroDamping("steady ETI needs eta > 0")


def damped_amplitude(drive: ExchangeDrive) -> float:
    """Rescaled coupling ``J0 / sqrt(eta^2 + omega^2)``."""
    return drive.J0 / math.hypot(drive.eta, drive.omega)


def eti_steady(drive: ExchangeDrive) -> float:
    """Limit of the ETI of a damped drive as ``t -> infinity``."""
    _require_damped(drive)
    return damped_amplitude(drive) * math.cos(drive.phi + math.atan2(drive.omega, drive.eta))


def eti_bounds(drive: ExchangeDrive, t: float) -> tuple[float, float]:
    """Envelope ``I(inf) -/+ |Gamma| exp(-eta t)`` that contains the damped ETI."""
    _require_damped(drive)
    t = float(_check_time(t))
    centre = eti_steady(drive)
    half = abs(damped_amplitude(drive)) * math.exp(-drive.eta * t)
    return centre - half, centre + half


def proportionality(a: ExchangeDrive, b: ExchangeDrive) -> float | None:
    """Constant ratio ``J_a(t) / J_b(t)`` if one exists structurally, else None.

    Two drives are proportional when they share kind and shape parameters
    and their phases agree or differ by pi.
    """
    if a.kind != b.kind or b.J0 == 0:
        return None
    if a.kind == "tabulated":
        if a.times != b.times:
            return None
        va, vb = np.asarray(a.values), np.asarray(b.values)
        nz = np.abs(vb) > 0
        if not nz.any() or np.any((np.abs(va) > 0) & ~nz):
            return None
        r = va[nz] / vb[nz]
        return float(r[0]) if np.allclose(r, r[0], rtol=1e-12, atol=0) else None
    if a.kind in ("step_stop", "cos2_pulse"):
        return a.J0 / b.J0 if math.isclose(a.Tstar, b.Tstar, rel_tol=1e-12) else None
    if a.kind == "constant":
        return a.J0 / b.J0
    if not (math.isclose(a.omega, b.omega, rel_tol=1e-12, abs_tol=0.0)
            and math.isclose(a.eta, b.eta, rel_tol=1e-12, abs_tol=1e-15)):
        return None
    dphi = math.remainder(a.phi - b.phi, 2 * math.pi)
    if abs(dphi) < 1e-12:
        return a.J0 / b.J0
    if abs(abs(dphi) - math.pi) < 1e-12:
        return -a.J0 / b.J0
    return None
