"""Command-line front end.

Subcommands::

    rkkynav table1 [--epsilon 0.01] [--j0 -1] [--tolerance 0.002] [--out-dir D] [--plot]
    rkkynav run CONFIG [--out-dir D] [--plot] [--jobs N]
    rkkynav freq J0_MEV TSTAR [--out-dir D] [--plot]

Exit status: 0 success, 1 tolerance failure, 2 configuration or input
error, 3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import configparser
import math
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import reference
from . import trajectory as tr
from .errors import BadInput, ConfigParseError, DomainError, NumericalNonConvergence, RkkyNavError
from .states import LABELS, SystemConfig, normalize_label

HBAR_EV_S = 6.582119569e-16

EXIT_OK, EXIT_TOLERANCE, EXIT_CONFIG, EXIT_NONCONVERGENCE = 0, 1, 2, 3

MIN_SAMPLES_PER_PERIOD = 16


# physical units ---------------------------------------------------------------

def frequency_hz(j0_ev, tstar):
    """Vibration frequency ``|J0| / (hbar T*)`` for ``J0`` in eV and ``T*`` in hbar/|J0|."""
    j0 = np.asarray(j0_ev, dtype=float)
    if np.any(j0 == 0) or not np.all(np.isfinite(j0)):
        raise BadInput("J0 must be finite and nonzero")
    if not (math.isfinite(tstar) and tstar > 0):
        raise BadInput("Tstar must be positive")
    f = np.abs(j0) / (HBAR_EV_S * tstar)
    return float(f) if f.ndim == 0 else f


def frequency_band(f_hz: float) -> str:
    if f_hz < 0.3e9:
        return "radio"
    if f_hz <= 300e9:
        return "microwave"
    if f_hz < 430e12:
        return "infrared"
    if f_hz <= 750e12:
        return "visible"
    return "ultraviolet"


def _si(f_hz: float) -> str:
    for scale, unit in ((1e12, "THz"), (1e9, "GHz"), (1e6, "MHz"), (1e3, "kHz")):
        if f_hz >= scale:
            return f"{f_hz / scale:.4g} {unit}"
    return f"{f_hz:.4g} Hz"


# configuration ------------------------------------------------------------------

@dataclass
class ScenarioConfig:
    """Parsed ``run`` configuration. Angles are stored in radians."""

    preset: str
    labels: list
    epsilons: list
    kind: str = "mixed"
    mixed_policy: str = "qubit"
    samples_per_period: int | None = None
    periods: float | None = None
    t_end: float | None = None
    ratio: float | None = None
    phi_a: float = 0.0
    phi_b: float | None = None
    eta: float = 0.0
    gamma: float = 1.0
    anisotropy: tuple = (1.0, 1.0, 1.0)
    j0: float = -1.0
    tstar: float | None = None
    frozen_window: float | None = None
    frozen_tol: float = 1e-3
    prefix: str | None = None
    plot: bool = False
    lines: dict = field(default_factory=dict, repr=False)

    def params(self, label, epsilon) -> tr.ScenarioParams:
        cfg = SystemConfig(eta=self.anisotropy, gamma=self.gamma, J0=self.j0)
        phi_b = self.phi_a if self.phi_b is None else self.phi_b
        return tr.ScenarioParams(
            label=label, epsilon=epsilon, kind=self.kind, ratio=self.ratio,
            phi=phi_b if self.preset in ("out_of_phase", "damped") else self.phi_a,
            delta_phi=(self.phi_a - phi_b) if self.phi_b is not None else None,
            eta=self.eta, periods=self.periods, samples_per_period=self.samples_per_period,
            t_end=self.t_end, tstar=self.tstar, cfg=cfg, mixed_policy=self.mixed_policy,
            frozen_window=self.frozen_window, frozen_tol=self.frozen_tol)


_KEYS = {
    "scenario": {"preset", "weightings", "epsilons", "kind", "mixed_policy",
                 "samples_per_period", "periods", "t_end"},
    "drive": {"ratio", "phi_a", "phi_b", "eta", "gamma", "anisotropy", "j0", "tstar",
              "frozen_window", "frozen_tol"},
    "output": {"prefix", "plot"},
}
_KEY_LINE = re.compile(r"^\s*([^=:#;\s\[][^=:]*?)\s*[=:]")
_SECTION_LINE = re.compile(r"^\s*\[([^\]]+)\]")


def _line_index(text: str) -> dict:
    """Map ``(section, key)`` to its 1-based line number."""
    out, section = {}, None
    for n, line in enumerate(text.splitlines(), 1):
        m = _SECTION_LINE.match(line)
        if m:
            section = m.group(1).strip().lower()
            out[(section, None)] = n
            continue
        m = _KEY_LINE.match(line)
        if m and section is not None:
            out.setdefault((section, m.group(1).strip().lower()), n)
    return out


def parse_config(text: str) -> ScenarioConfig:
    """Parse an INI scenario description; errors carry line and field."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigParseError("content before the first [section]", exc.lineno) from None
    except configparser.DuplicateOptionError as exc:
        raise ConfigParseError("duplicate key", exc.lineno, exc.option) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigParseError("duplicate section", exc.lineno, exc.section) from None
    except configparser.Error as exc:
        raise ConfigParseError(str(exc).splitlines()[0]) from None
    lines = _line_index(text)

    for sec in parser.sections():
        if sec not in _KEYS:
            raise ConfigParseError(f"unknown section [{sec}]", lines.get((sec, None)))
        for key in parser[sec]:
            if key not in _KEYS[sec]:
                raise ConfigParseError("unknown key", lines.get((sec, key)), key)
    if "scenario" not in parser:
        raise ConfigParseError("missing [scenario] section")

    def get(sec, key, conv=str, default=None):
        if sec not in parser or key not in parser[sec]:
            return default
        raw = parser[sec][key].strip()
        try:
            return conv(raw)
        except KeyError as exc:
            raise ConfigParseError(exc.args[0], lines.get((sec, key)), key) from None
        except (ValueError, RkkyNavError) as exc:
            raise ConfigParseError(str(exc) or "invalid value", lines.get((sec, key)), key) from None

    def floats(raw):
        return [float(x) for x in raw.replace(",", " ").split()]

    def labels(raw):
        return [normalize_label(x) for x in raw.replace(",", " ").split()]

    def optional_float(raw):
        return None if raw == "" else float(raw)

    def where(sec, key):
        return lines.get((sec, key)), key

    preset = get("scenario", "preset")
    if preset is None:
        raise ConfigParseError("preset is required", lines.get(("scenario", None)), "preset")
    if preset not in tr.PRESETS:
        raise ConfigParseError(f"unknown preset {preset!r}", *where("scenario", "preset"))
    names = get("scenario", "weightings", labels, [])
    if not names:
        raise ConfigParseError("weighting list is empty", *where("scenario", "weightings"))
    eps = get("scenario", "epsilons", floats, [0.01])
    if not eps:
        raise ConfigParseError("epsilon list is empty", *where("scenario", "epsilons"))
    if any(not -1 <= e <= 1 for e in eps):
        raise ConfigParseError("epsilon must lie in [-1, 1]", *where("scenario", "epsilons"))
    kind = get("scenario", "kind", default="mixed")
    if kind not in ("mixed", "pure"):
        raise ConfigParseError("kind must be mixed or pure", *where("scenario", "kind"))
    policy = get("scenario", "mixed_policy", default="qubit")
    if policy not in ("qubit", "grouped"):
        raise ConfigParseError("mixed_policy must be qubit or grouped",
                               *where("scenario", "mixed_policy"))
    spp = get("scenario", "samples_per_period", int)
    if spp is not None and spp < MIN_SAMPLES_PER_PERIOD:
        raise ConfigParseError(f"samples_per_period must be >= {MIN_SAMPLES_PER_PERIOD}",
                               *where("scenario", "samples_per_period"))
    anis = get("drive", "anisotropy", floats, [1.0, 1.0, 1.0])
    if len(anis) != 3:
        raise ConfigParseError("anisotropy needs three components", *where("drive", "anisotropy"))
    phi_b = get("drive", "phi_b", optional_float)
    conf = ScenarioConfig(
        preset=preset, labels=names, epsilons=eps, kind=kind, mixed_policy=policy,
        samples_per_period=spp,
        periods=get("scenario", "periods", optional_float),
        t_end=get("scenario", "t_end", optional_float),
        ratio=get("drive", "ratio", optional_float),
        phi_a=math.radians(get("drive", "phi_a", float, 0.0)),
        phi_b=None if phi_b is None else math.radians(phi_b),
        eta=get("drive", "eta", float, 0.0),
        gamma=get("drive", "gamma", float, 1.0),
        anisotropy=tuple(anis),
        j0=get("drive", "j0", float, -1.0),
        tstar=get("drive", "tstar", optional_float),
        frozen_window=get("drive", "frozen_window", optional_float),
        frozen_tol=get("drive", "frozen_tol", float, 1e-3),
        prefix=get("output", "prefix"),
        plot=get("output", "plot", _boolean, False),
        lines=lines,
    )
    checks = [
        ("drive", "eta", conf.eta < 0, "eta must be >= 0"),
        ("drive", "gamma", conf.gamma == 0, "gamma must be nonzero"),
        ("drive", "j0", conf.j0 == 0, "j0 must be nonzero"),
        ("drive", "ratio", conf.ratio is not None and conf.ratio <= 0, "ratio must be > 0"),
        ("drive", "tstar", conf.tstar is not None and conf.tstar <= 0, "tstar must be > 0"),
        ("drive", "eta", conf.preset == "damped" and conf.eta <= 0,
         "damped preset needs eta > 0"),
        ("drive", "phi_b", conf.preset in tr.FAST_PRESETS and conf.phi_b is not None
         and not math.isclose(conf.phi_b, conf.phi_a), "in-phase presets need phi_b = phi_a"),
    ]
    for sec, key, bad, msg in checks:
        if bad:
            raise ConfigParseError(msg, *where(sec, key))
    return conf


def _boolean(raw: str) -> bool:
    val = raw.lower()
    if val in ("1", "yes", "true", "on"):
        return True
    if val in ("0", "no", "false", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def load_config(path) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigParseError(f"cannot read config: {exc.strerror}") from None
    return parse_config(text)


# CSV ------------------------------------------------------------------------------

def _fmt(x) -> str:
    return "none" if x is None else f"{x:.15g}"


def trajectory_csv(traj: tr.Trajectory) -> str:
    head = [
        f"# weighting: {traj.label}",
        f"# epsilon: {_fmt(traj.epsilon)}",
        f"# kind: {traj.kind}",
        f"# preset: {traj.preset}",
        f"# tstar: {_fmt(traj.tstar)}",
        f"# period: {_fmt(traj.meta.get('T'))}",
        f"# classification: {traj.classification}",
        f"# frozen_time: {_fmt(traj.frozen_time)}",
        "t,c_e",
    ]
    body = [f"{t:.15g},{c:.15g}" for t, c in zip(traj.t, traj.c_e)]
    return "\n".join(head + body) + "\n"


def read_trajectory_csv(path) -> tuple:
    """Read back ``(meta, t, c_e)`` from a file written by :func:`trajectory_csv`."""
    meta, rows = {}, []
    with open(path, newline="") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                key, _, val = line[1:].partition(":")
                meta[key.strip()] = val.strip()
            elif line and line != "t,c_e":
                rows.append([float(x) for x in line.split(",")])
    arr = np.array(rows).reshape(-1, 2)
    return meta, arr[:, 0], arr[:, 1]


def _eps_tag(eps: float) -> str:
    return ("p" if eps >= 0 else "m") + f"{abs(eps):g}"


def _write_text(path: Path, text: str):
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


# commands -------------------------------------------------------------------------

def _run_job(job):
    preset, params = job
    return tr.run_scenario(preset, params)


def build_jobs(conf: ScenarioConfig) -> list:
    """Deterministically ordered ``(preset, params)`` jobs for a config.

    Oscillating presets share one row period across epsilon values; stopping
    presets keep their per-epsilon boundary.
    """
    jobs = []
    for label in conf.labels:
        base = conf.params(label, conf.epsilons[0])
        if conf.tstar is None and conf.preset not in ("boundary_residing", "pulse"):
            base = tr.ScenarioParams(**{**base.__dict__, "tstar": tr.resolve_tstar(base).Tstar})
        for eps in conf.epsilons:
            jobs.append((conf.preset, tr.ScenarioParams(**{**base.__dict__, "epsilon": eps})))
    return jobs


def cmd_run(config, out_dir=".", plot=False, jobs=1, stream=None) -> list:
    """Run every (weighting, epsilon) job of a config; returns the written paths."""
    stream = stream or sys.stdout
    conf = config if isinstance(config, ScenarioConfig) else load_config(config)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    work = build_jobs(conf)
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            trajs = list(pool.map(_run_job, work))
    else:
        trajs = [_run_job(j) for j in work]
    prefix = conf.prefix or conf.preset
    paths = []
    for traj in trajs:
        path = out / f"{prefix}_{traj.label}_{traj.kind}_eps{_eps_tag(traj.epsilon)}.csv"
        _write_text(path, trajectory_csv(traj))
        paths.append(path)
        print(f"{traj.label} {traj.kind} eps={traj.epsilon:+g} preset={traj.preset} "
              f"T*={_fmt(traj.tstar)} class={traj.classification} "
              f"frozen_time={_fmt(traj.frozen_time)} -> {path}", file=stream)
    if plot or conf.plot:
        from .plotting import plot_trajectories

        svg = out / f"{prefix}.svg"
        plot_trajectories(trajs, svg, title=f"{conf.preset} ({conf.kind})")
        paths.append(svg)
        print(f"plot -> {svg}", file=stream)
    return paths


@dataclass(frozen=True)
class Table1Row:
    label: str
    kind: str
    tstar: float | None
    dynamics: str
    ref_tstar: float | None
    ref_dynamics: str | None
    ok: bool

    @property
    def delta(self):
        if self.tstar is None or self.ref_tstar is None:
            return None
        return self.tstar - self.ref_tstar


def table1_rows(epsilon=0.01, j0=-1.0, tolerance=reference.TSTAR_TOLERANCE) -> list:
    """Compute all 28 rows and compare with the reference table where it applies.

    Reference periods are scaled by ``1/|J0|``; they are only compared when
    ``|epsilon|`` equals the tabulated 0.01.
    """
    compare = math.isclose(abs(epsilon), 0.01)
    rows = []
    for label in LABELS:
        for kind in ("mixed", "pure"):
            res = tr.characterize_row(label, kind, epsilon, J0=j0)
            ref_t, ref_d = reference.TSTAR_TABLE[(label, kind)] if compare else (None, None)
            if ref_t is not None:
                ref_t = ref_t / abs(j0)
            ok = True
            if compare:
                if (res.tstar is None) != (ref_t is None):
                    ok = False
                elif res.tstar is not None and abs(res.tstar - ref_t) > tolerance:
                    ok = False
                if res.dynamics != ref_d:
                    ok = False
            rows.append(Table1Row(label, kind, res.tstar, res.dynamics, ref_t, ref_d, ok))
    return rows


def cmd_table1(epsilon=0.01, j0=-1.0, tolerance=reference.TSTAR_TOLERANCE, out_dir=None,
               plot=False, stream=None) -> int:
    stream = stream or sys.stdout
    rows = table1_rows(epsilon, j0, tolerance)
    na = "N/A"
    print(f"{'row':<5}{'kind':<7}{'T*':>10}{'ref':>10}{'delta':>10}  {'dyn':<5}{'ref':<5} status",
          file=stream)
    for r in rows:
        t = na if r.tstar is None else f"{r.tstar:.4f}"
        ref = "-" if r.ref_dynamics is None else (na if r.ref_tstar is None else f"{r.ref_tstar:.4f}")
        d = "" if r.delta is None else f"{r.delta:+.4f}"
        print(f"{r.label:<5}{r.kind:<7}{t:>10}{ref:>10}{d:>10}  {r.dynamics:<5}"
              f"{r.ref_dynamics or '-':<5} {'ok' if r.ok else 'FAIL'}", file=stream)
    failed = sum(not r.ok for r in rows)
    print(f"{len(rows) - failed}/{len(rows)} rows within tolerance {tolerance:g}", file=stream)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        lines = ["label,kind,tstar,ref_tstar,delta,dynamics,ref_dynamics,ok"]
        for r in rows:
            lines.append(",".join([r.label, r.kind, _fmt(r.tstar), _fmt(r.ref_tstar),
                                   _fmt(r.delta), r.dynamics, r.ref_dynamics or "none",
                                   str(int(r.ok))]))
        _write_text(out / "table1.csv", "\n".join(lines) + "\n")
        if plot:
            from .plotting import plot_table

            plot_table([(r.label, r.kind, r.tstar, r.ref_tstar) for r in rows],
                       out / "table1.svg")
    return EXIT_OK if failed == 0 else EXIT_TOLERANCE


def cmd_frequency(j0_mev: float, tstar: float, out_dir=None, plot=False,
                  stream=None) -> tuple:
    stream = stream or sys.stdout
    f = frequency_hz(j0_mev * 1e-3, tstar)
    band = frequency_band(f)
    print(f"f = {f:.6e} Hz ({_si(f)}), band: {band}", file=stream)
    if plot:
        from .plotting import plot_frequency

        out = Path(out_dir or ".")
        out.mkdir(parents=True, exist_ok=True)
        plot_frequency(tstar, out / "frequency.svg", marker=(abs(j0_mev) * 1e-3, f))
    return f, band


# entry point ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rkkynav", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    t1 = sub.add_parser("table1", help="characteristic periods of all weighting rows")
    t1.add_argument("--epsilon", type=float, default=0.01)
    t1.add_argument("--j0", type=float, default=-1.0)
    t1.add_argument("--tolerance", type=float, default=reference.TSTAR_TOLERANCE)
    t1.add_argument("--out-dir")
    t1.add_argument("--plot", action="store_true")

    run = sub.add_parser("run", help="evolve the scenarios of a config file")
    run.add_argument("config")
    run.add_argument("--out-dir", default=".")
    run.add_argument("--plot", action="store_true")
    run.add_argument("--jobs", type=int, default=1)

    fq = sub.add_parser("freq", help="physical vibration frequency")
    fq.add_argument("j0_mev", type=float)
    fq.add_argument("tstar", type=float)
    fq.add_argument("--out-dir")
    fq.add_argument("--plot", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "table1":
            return cmd_table1(args.epsilon, args.j0, args.tolerance, args.out_dir, args.plot)
        if args.command == "run":
            if args.jobs < 1:
                raise BadInput("--jobs must be >= 1")
            cmd_run(args.config, args.out_dir, args.plot, args.jobs)
            return EXIT_OK
        cmd_frequency(args.j0_mev, args.tstar, args.out_dir, args.plot)
        return EXIT_OK
    except NumericalNonConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (ConfigParseError, BadInput, DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
