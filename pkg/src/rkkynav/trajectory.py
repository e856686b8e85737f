"""Trajectory-level algorithms.

Characteristic periods are solved in ETI space: for proportional drives the
reduced state depends on time only through ``I(t)``, so one
eigendecomposition serves every waveform. The period follows from the
boundary ETI ``I*`` through ``T* = 2 pi |I*| / |J0|`` (sinusoidal drive,
zero phase, boundary reached at ``T*/4``).
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize

from . import drive as drv
from . import evolve
from .entangle import BOUNDARY_TOL, concurrence_values
from .errors import DomainError, InsufficientSamples
from .states import (DensityMatrix, SystemConfig, bell_count, initial_state,
                     normalize_label)

PRESETS = ("snake", "bounce", "entangling", "boundary_residing", "pulse",
           "phase_shift", "out_of_phase", "damped")
PRESET_RATIO = {"snake": 1.25, "bounce": 1.0, "entangling": 0.5}
FAST_PRESETS = ("snake", "bounce", "entangling", "boundary_residing", "pulse", "phase_shift")

ETI_SCAN_STEP = 1e-3
ETI_SCAN_RANGE = 2 * math.pi
ETI_XTOL = 1e-8


@dataclass
class Trajectory:
    """Sampled extended concurrence ``C_E(t)`` with run metadata."""

    t: np.ndarray
    c_e: np.ndarray
    label: str | None = None
    epsilon: float | None = None
    kind: str | None = None
    preset: str | None = None
    drives: tuple = ()
    classification: str | None = None
    tstar: float | None = None
    frozen_time: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.c_e = np.asarray(self.c_e, dtype=float)
        if self.t.shape != self.c_e.shape or self.t.ndim != 1:
            raise ValueError("t and c_e must be 1-D arrays of equal length")
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("sample times must increase strictly")
        if np.any(np.abs(self.c_e) > 1 + 1e-9):
            raise ValueError("extended concurrence outside [-1, 1]")
        self.c_e = np.clip(self.c_e, -1.0, 1.0)

    def __len__(self):
        return len(self.t)


@dataclass(frozen=True)
class CharacteristicPeriod:
    Tstar: float
    I_star: float
    event: str = "crossing"


def _state_and_operator(label, epsilon, kind, cfg, mixed_policy):
    rho0, cfg_row = initial_state(label, epsilon, kind, mixed_policy, cfg)
    return rho0, evolve.exchange_operator(cfg_row)


def eti_curve(rho0, op: evolve.ExchangeOperator, etis) -> np.ndarray:
    """Extended concurrence of the AB marginal as a function of the ETI."""
    states = evolve.inphase_states(rho0, op, etis)
    return concurrence_values(evolve.ab_marginals(states, op.d))


def _first_boundary(x: np.ndarray, c: np.ndarray, f, tol: float = BOUNDARY_TOL):
    """Locate the first boundary contact of the sampled curve ``c(x)``.

    Returns ``(x*, event)`` with ``event`` in {"crossing", "tangency"} or
    None. Samples already on the boundary at the start are skipped.
    """
    off = np.nonzero(np.abs(c) > tol)[0]
    if off.size == 0:
        return None
    i0 = off[0]
    for i in range(i0, len(c) - 1):
        if abs(c[i + 1]) <= tol:
            return x[i + 1], "crossing" if _sign_after(c, i + 1, tol) != np.sign(c[i]) else "tangency"
        if c[i] * c[i + 1] < 0:
            return optimize.bisect(f, x[i], x[i + 1], xtol=ETI_XTOL * 0.1), "crossing"
        if 0 < i < len(c) - 1 and abs(c[i]) < abs(c[i - 1]) and abs(c[i]) <= abs(c[i + 1]):
            hit = _tangency(x[i - 1:i + 2], c[i - 1:i + 2], tol)
            if hit is not None:
                return hit, "tangency"
    return None


def _sign_after(c, j, tol):
    rest = np.nonzero(np.abs(c[j:]) > tol)[0]
    return np.sign(c[j + rest[0]]) if rest.size else 0.0


def _tangency(x3, c3, tol):
    """Quadratic fit through three samples; the vertex if it sits on the boundary."""
    a, b, c = np.polyfit(x3 - x3[1], c3, 2)
    if a == 0:
        return None
    xv = -b / (2 * a)
    if abs(xv) > abs(x3[2] - x3[0]):
        return None
    val = c - b * b / (4 * a)
    return x3[1] + xv if abs(val) <= tol else None


def find_tstar(label, epsilon: float, kind: str, cfg: SystemConfig | None = None,
               J0: float | None = None, mixed_policy: str = "qubit",
               step: float = ETI_SCAN_STEP, max_eti: float = ETI_SCAN_RANGE):
    """Characteristic period of a weighting row, or None if the boundary is never reached.

    The ETI is scanned in the direction of ``sign(J0)`` up to ``max_eti``;
    the first sign change is refined by bisection and a touching minimum is
    accepted when a quadratic fit puts its vertex within the boundary band.
    """
    cfg = cfg or SystemConfig()
    J0 = cfg.J0 if J0 is None else J0
    if J0 == 0:
        raise ValueError("J0 must be nonzero")
    rho0, op = _state_and_operator(label, epsilon, kind, cfg, mixed_policy)
    direction = math.copysign(1.0, J0)
    grid = direction * np.arange(0.0, max_eti + step / 2, step)
    c = eti_curve(rho0, op, grid)
    hit = _first_boundary(grid, c, lambda x: float(eti_curve(rho0, op, [x])[0]))
    if hit is None:
        return None
    i_star, event = hit
    return CharacteristicPeriod(2 * math.pi * abs(i_star) / abs(J0), float(i_star), event)


@dataclass(frozen=True)
class RowResult:
    """Characterisation of one weighting row at a given ``|epsilon|``."""

    label: str
    kind: str
    epsilon: float
    period: CharacteristicPeriod | None
    dynamics: str

    @property
    def tstar(self) -> float | None:
        return None if self.period is None else self.period.Tstar


def row_epsilons(label, magnitude: float) -> tuple:
    """Signs of epsilon probed for a row.

    Rows built from two Bell states have ``C_E(0) = |epsilon|`` for either
    sign, so only the nonnegative switch parameter is meaningful there.
    """
    m = abs(magnitude)
    return (m,) if bell_count(label) == 2 else (m, -m)


def characterize_row(label, kind: str, magnitude: float = 0.01, cfg: SystemConfig | None = None,
                     J0: float | None = None, mixed_policy: str = "qubit") -> RowResult:
    """Near-``t = 0`` dynamics label and characteristic period of a row.

    Each admissible sign of epsilon is evolved under a constant drive; the
    run whose first boundary event comes earliest fixes both the label (ESD
    or ESB) and the period. Rows without any event at ``+-|epsilon|`` are
    evaluated on the boundary itself (epsilon = 0).
    """
    key = normalize_label(label)
    cfg = cfg or SystemConfig()
    J0 = cfg.J0 if J0 is None else J0
    best = None
    for eps in row_epsilons(key, magnitude):
        per = find_tstar(key, eps, kind, cfg, J0, mixed_policy)
        if per is None:
            continue
        if best is None or abs(per.I_star) < abs(best[1].I_star):
            best = (eps, per)
    if best is not None:
        eps, per = best
        traj = _constant_drive_trajectory(key, eps, kind, cfg, J0, mixed_policy,
                                          1.2 * abs(per.I_star) / abs(J0))
        return RowResult(key, kind, eps, per, classify_near_zero(traj))
    traj = _constant_drive_trajectory(key, 0.0, kind, cfg, J0, mixed_policy,
                                      ETI_SCAN_RANGE / abs(J0))
    return RowResult(key, kind, 0.0, None, classify_near_zero(traj))


def _constant_drive_trajectory(label, eps, kind, cfg, J0, mixed_policy, t_end, n=4001):
    rho0, op = _state_and_operator(label, eps, kind, cfg, mixed_policy)
    d = drv.ExchangeDrive.constant(J0)
    t = np.linspace(0.0, t_end, n)
    return Trajectory(t, eti_curve(rho0, op, drv.eti(d, t)), label, eps, kind, "constant",
                      (d, d))


def find_boundary_time(rho0, op: evolve.ExchangeOperator, drive: drv.ExchangeDrive,
                       t_max: float, n: int = 4001) -> float | None:
    """First time a proportional-drive trajectory meets the boundary."""
    t = np.linspace(0.0, t_max, n)
    c = eti_curve(rho0, op, drv.eti(drive, t))
    hit = _first_boundary(t, c, lambda s: float(eti_curve(rho0, op, [drv.eti(drive, s)])[0]))
    return None if hit is None else float(hit[0])


# analytic short-time estimates ---------------------------------------------

def _sqrt_row(num, den):
    def f(e):
        r = num(e) / den(e)
        if r < 0:
            raise DomainError(f"radicand {r:.3g} < 0 at epsilon={e}")
        return math.sqrt(r)
    return f


def _quartic_row(num, den):
    def f(e):
        r = num(e) / den(e)
        if r < 0:
            raise DomainError(f"radicand {r:.3g} < 0 at epsilon={e}")
        return r ** 0.25
    return f


_ANALYTIC = {}
for _lbl in ("W1", "W3", "W5"):
    _ANALYTIC[_lbl] = _sqrt_row(lambda e: 16 * e, lambda e: 1 + e)
for _lbl in ("W2", "W4"):
    _ANALYTIC[_lbl] = lambda e: 2 * math.sqrt(2)
for _lbl in ("W7", "W8"):
    _ANALYTIC[_lbl] = _sqrt_row(lambda e: 32 * e, lambda e: 1 + 3 * e)
_ANALYTIC["W9"] = _sqrt_row(lambda e: 32 * e, lambda e: 3 + 5 * e)
_ANALYTIC["W10"] = _quartic_row(lambda e: -1024 * e * (1 + e), lambda e: (1 - e) ** 2)
for _lbl in ("W11", "W12"):
    _ANALYTIC[_lbl] = _sqrt_row(lambda e: 24 * e, lambda e: 1 + 2 * e)
_ANALYTIC["W13"] = _sqrt_row(lambda e: 12 * e, lambda e: 1 + 2 * e)
_ANALYTIC["W14"] = _quartic_row(lambda e: -(384 + 768 * e) * e, lambda e: (1 - e) ** 2)

ANALYTIC_GROUPS = (("W1", "W3", "W5"), ("W2", "W4"), ("W7", "W8"), ("W9",), ("W10",),
                   ("W11", "W12"), ("W13",), ("W14",))


def analytic_tstar(label, epsilon: float) -> float:
    """Short-time analytic period estimate for a mixed state under constant exchange.

    The estimate is the period whose quarter equals the constant-drive
    boundary time, so it approximates ``4 |I*| / |J0|``.
    """
    key = normalize_label(label)
    if key not in _ANALYTIC:
        raise DomainError(f"no analytic period for {key}")
    if not -1 < epsilon < 1:
        raise DomainError("epsilon must lie in (-1, 1)")
    return float(_ANALYTIC[key](float(epsilon)))


def eti_at_quarter(label, kind: str = "mixed", waveform: str = "sinusoidal",
                   tstar: float | None = None, J0: float = -1.0,
                   magnitude: float = 0.01) -> float:
    """ETI accumulated by ``T*/4``: ``|J0| T*/(2 pi)`` (sinusoidal) or ``|J0| T*/4`` (constant)."""
    if tstar is None:
        row = characterize_row(label, kind, magnitude, J0=J0)
        if row.tstar is None:
            raise DomainError(f"{normalize_label(label)} ({kind}) has no characteristic period")
        tstar = row.tstar
    if waveform == "sinusoidal":
        return abs(J0) * tstar / (2 * math.pi)
    if waveform == "constant":
        return abs(J0) * tstar / 4
    raise ValueError("waveform must be 'constant' or 'sinusoidal'")


# classification -------------------------------------------------------------

def boundary_event(traj: Trajectory, tol: float = BOUNDARY_TOL):
    """First boundary event of a sampled trajectory.

    Returns ``(time, label)`` with label ESD, ESB or TZD, or None.
    """
    t, c = traj.t, traj.c_e
    if len(c) < 3:
        raise InsufficientSamples("need at least three samples")
    off = np.nonzero(np.abs(c) > tol)[0]
    if off.size == 0:
        return None
    if off[0] > 0:
        # starts on the boundary; C_E is even about t = 0 so leaving it is a touch
        return float(t[0]), "TZD"
    s0 = np.sign(c[0])
    for k in range(1, len(c)):
        if abs(c[k]) <= tol:
            after = _sign_after(c, k, tol)
            if after == 0:
                return None
            if after == s0:
                return float(t[k]), "TZD"
            return float(t[k]), "ESD" if s0 > 0 else "ESB"
        if np.sign(c[k]) != s0:
            return float(t[k]), "ESD" if s0 > 0 else "ESB"
    return None


def classify_near_zero(traj: Trajectory, tol: float = BOUNDARY_TOL) -> str:
    """ESD, ESB or TZD for the first boundary event, or ``"none"``."""
    ev = boundary_event(traj, tol)
    return "none" if ev is None else ev[1]


def frozen_time(traj: Trajectory, window: float | None = None, tol: float = 1e-3) -> float | None:
    """Earliest ``t`` after which ``C_E`` varies by less than ``tol`` over ``window``.

    ``window`` defaults to ``5 / eta`` for damped runs. Only windows that fit
    inside the sampled range are considered.
    """
    if window is None:
        eta = traj.meta.get("eta") or 0.0
        if eta <= 0:
            raise ValueError("window is required for undamped trajectories")
        window = 5.0 / eta
    if window <= 0 or tol <= 0:
        raise ValueError("window and tol must be positive")
    t, c = traj.t, traj.c_e
    n = len(t)
    hi_q, lo_q = deque(), deque()
    j = 0
    for i in range(n):
        end = t[i] + window
        if end > t[-1] + 1e-12 * max(1.0, abs(t[-1])):
            return None
        while j < n and t[j] <= end + 1e-12 * max(1.0, abs(end)):
            while hi_q and c[hi_q[-1]] <= c[j]:
                hi_q.pop()
            hi_q.append(j)
            while lo_q and c[lo_q[-1]] >= c[j]:
                lo_q.pop()
            lo_q.append(j)
            j += 1
        while hi_q[0] < i:
            hi_q.popleft()
        while lo_q[0] < i:
            lo_q.popleft()
        if c[hi_q[0]] - c[lo_q[0]] < tol:
            return float(t[i])
    return None


# scenarios ------------------------------------------------------------------

@dataclass(frozen=True)
class ScenarioParams:
    """Inputs of a scenario run. Angles are in radians, times in hbar/|J0|.

    ``tstar`` overrides the characteristic period solved for the row.
    ``ratio`` is T/T* (defaults per preset). ``samples_per_period`` defaults
    to 2000 for fast-path presets and 32 for stepper presets.
    """

    label: str = "W1"
    epsilon: float = 0.01
    kind: str = "mixed"
    ratio: float | None = None
    phi: float = 0.0
    delta_phi: float | None = None
    eta: float = 0.0
    periods: float | None = None
    samples_per_period: int | None = None
    t_end: float | None = None
    tstar: float | None = None
    cfg: SystemConfig | None = None
    mixed_policy: str = "qubit"
    frozen_window: float | None = None
    frozen_tol: float = 1e-3
    stepper_tol: float = evolve.STEP_TOL


def resolve_tstar(p: ScenarioParams, own_epsilon: bool = False) -> CharacteristicPeriod:
    """Characteristic period used to time a scenario.

    By default this is the row period. With ``own_epsilon`` the boundary is
    solved at ``p.epsilon`` itself, which is what stopping drives need to
    park exactly on the boundary.
    """
    cfg = p.cfg or SystemConfig()
    if p.tstar is not None:
        return CharacteristicPeriod(p.tstar, math.copysign(abs(cfg.J0) * p.tstar / (2 * math.pi),
                                                           cfg.J0), "given")
    if own_epsilon:
        own = find_tstar(p.label, p.epsilon, p.kind, cfg, mixed_policy=p.mixed_policy)
        if own is not None:
            return own
    row = characterize_row(p.label, p.kind, abs(p.epsilon) or 0.01, cfg,
                           mixed_policy=p.mixed_policy)
    if row.period is not None:
        return row.period
    own = find_tstar(p.label, p.epsilon, p.kind, cfg, mixed_policy=p.mixed_policy)
    if own is None:
        raise DomainError(f"{normalize_label(p.label)} ({p.kind}) never reaches the boundary; "
                          "pass tstar explicitly")
    return own


def _grid(t_end: float, period: float, spp: int) -> np.ndarray:
    n = max(2, int(round(spp * t_end / period)))
    return np.linspace(0.0, t_end, n + 1)


def build_drives(preset: str, p: ScenarioParams, period: CharacteristicPeriod):
    """Drive pair and sampling period for a preset."""
    cfg = p.cfg or SystemConfig()
    J0, T0 = cfg.J0, period.Tstar
    if preset in PRESET_RATIO or preset == "phase_shift":
        ratio = p.ratio if p.ratio is not None else PRESET_RATIO.get(preset, 1.0)
        phi = p.phi if (p.phi or preset != "phase_shift") else math.radians(10.0)
        da = drv.ExchangeDrive.sinusoidal(J0, ratio * T0, phi)
        return da, da.scaled(1 / cfg.gamma), ratio * T0
    if preset == "boundary_residing":
        da = drv.ExchangeDrive.step_stop(J0, (p.ratio or 1.0) * T0)
        return da, da.scaled(1 / cfg.gamma), da.Tstar
    if preset == "pulse":
        # the cos^2 waveform accumulates J0 T / 8 by T/4, so the period is re-solved
        T = 8 * abs(period.I_star) / abs(J0) * (p.ratio or 1.0)
        da = drv.ExchangeDrive.cos2_pulse(J0, T)
        return da, da.scaled(1 / cfg.gamma), T
    if preset in ("out_of_phase", "damped"):
        default = 30.0 if preset == "damped" else 90.0
        dphi = p.delta_phi if p.delta_phi is not None else math.radians(default)
        T = (p.ratio or 1.0) * T0
        eta = p.eta if preset == "damped" else 0.0
        if eta > 0:
            da = drv.ExchangeDrive.damped(J0, T, p.phi + dphi, eta)
            db = drv.ExchangeDrive.damped(J0 / cfg.gamma, T, p.phi, eta)
        else:
            da = drv.ExchangeDrive.sinusoidal(J0, T, p.phi + dphi)
            db = drv.ExchangeDrive.sinusoidal(J0 / cfg.gamma, T, p.phi)
        return da, db, T
    raise ValueError(f"unknown preset {preset!r}; choose from {PRESETS}")


def run_scenario(preset: str, params: ScenarioParams | None = None, **overrides) -> Trajectory:
    """Evolve one scenario and return its ``C_E(t)`` trajectory.

    Proportional drive pairs go through the ETI fast path; out-of-phase and
    damped pairs use the time-ordered stepper. Damped runs also carry the
    frozen time.
    """
    p = replace(params or ScenarioParams(), **overrides)
    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}; choose from {PRESETS}")
    cfg = p.cfg or SystemConfig()
    period = resolve_tstar(p, own_epsilon=preset in ("boundary_residing", "pulse"))
    da, db, T = build_drives(preset, p, period)
    stepper = preset in ("out_of_phase", "damped")
    spp = p.samples_per_period or (32 if stepper else 2000)
    if p.t_end is not None:
        t_end = p.t_end
    elif preset == "damped" and p.eta > 0:
        t_end = 10.0 / p.eta
    else:
        t_end = (p.periods or 2.0) * T
    t = _grid(t_end, T, spp)
    rho0, cfg_row = initial_state(p.label, p.epsilon, p.kind, p.mixed_policy, cfg)
    plan = evolve.plan_evolution(da, db, t)
    meta = {"T": T, "mode": plan.mode, "phi": p.phi, "eta": p.eta,
            "delta_phi": (da.phi - db.phi) if stepper else 0.0, "I_star": period.I_star}
    if plan.mode == "inphase_fast":
        op = evolve.fast_operator(cfg_row, da, db)
        c = eti_curve(rho0, op, drv.eti(da, t))
    else:
        op = evolve.exchange_operator(cfg_row)
        res = evolve.evolve_stepper(
            rho0, op, (da, db), t, tol=p.stepper_tol, full_result=True,
            observe=lambda s: concurrence_values(evolve.ab_marginals(s, op.d)))
        c = res.values
        meta.update(dt=res.dt, halvings=res.halvings, unitarity_drift=res.unitarity_drift)
    traj = Trajectory(t, c, normalize_label(p.label), p.epsilon, p.kind, preset, (da, db),
                      tstar=T if preset == "pulse" else period.Tstar, meta=meta)
    traj.classification = classify_near_zero(traj)
    if preset == "damped" and p.eta > 0:
        traj.frozen_time = frozen_time(traj, p.frozen_window, p.frozen_tol)
    return traj


def run_scenarios(preset: str, params: ScenarioParams, epsilons) -> list:
    """Run a preset for several epsilon values.

    Oscillating presets share the row period; stopping presets solve the
    boundary for each epsilon separately.
    """
    if preset in ("boundary_residing", "pulse"):
        return [run_scenario(preset, params, epsilon=e) for e in epsilons]
    period = resolve_tstar(params)
    return [run_scenario(preset, params, epsilon=e, tstar=period.Tstar) for e in epsilons]


def zero_crossings(traj: Trajectory, tol: float = BOUNDARY_TOL) -> np.ndarray:
    """Linearly interpolated times where ``C_E`` changes sign."""
    t, c = traj.t, traj.c_e
    s = np.where(np.abs(c) <= tol, 0.0, np.sign(c))
    idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
    return t[idx] - c[idx] * (t[idx + 1] - t[idx]) / (c[idx + 1] - c[idx])
