import hashlib

import numpy as np
import pytest

from rkkynav import cli
from rkkynav.errors import BadInput, ConfigParseError

BOUNCE = """\
[scenario]
preset = bounce
weightings = W1, W7
epsilons = 0.01, -0.01
periods = 1
samples_per_period = 400
"""

DAMPED = """\
[scenario]
preset = damped
weightings = W1
epsilons = 0.01
t_end = 120
[drive]
phi_a = 30
phi_b = 0
eta = 0.1
"""


def write(tmp_path, text, name="scenario.ini"):
    p = tmp_path / name
    p.write_text(text)
    return p


def digest(paths):
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in paths}


def test_frequency_values():
    assert cli.frequency_hz(1e-3, 1.0) == pytest.approx(1.52e12, rel=0.01)
    assert cli.frequency_band(cli.frequency_hz(1e-3, 1.0)) == "infrared"
    f_micro = cli.frequency_hz(1e-6, 1.0)
    assert f_micro == pytest.approx(1.52e9, rel=0.01)
    assert cli.frequency_band(f_micro) == "microwave"
    assert cli.frequency_hz(2e-3, 2.0) == pytest.approx(cli.frequency_hz(1e-3, 1.0))
    with pytest.raises(BadInput):
        cli.frequency_hz(0.0, 1.0)
    with pytest.raises(BadInput):
        cli.frequency_hz(1e-3, -1.0)


def test_freq_command_output(capsys):
    assert cli.main(["freq", "1", "1"]) == 0
    out = capsys.readouterr().out
    assert "THz" in out and "infrared" in out
    assert cli.main(["freq", "0", "1"]) == cli.EXIT_CONFIG


def test_parse_config_defaults():
    conf = cli.parse_config(BOUNCE)
    assert conf.labels == ["W1", "W7"]
    assert conf.epsilons == [0.01, -0.01]
    assert conf.kind == "mixed"
    conf = cli.parse_config(DAMPED)
    p = conf.params("W1", 0.01)
    assert p.delta_phi == pytest.approx(np.radians(30))
    assert p.phi == 0.0


@pytest.mark.parametrize("text,line,field", [
    ("[scenario]\npreset = bounce\nweightings =\n", 3, "weightings"),
    ("[scenario]\npreset = bounce\nweightings = W1, W15\n", 3, "weightings"),
    ("[scenario]\npreset = wobble\nweightings = W1\n", 2, "preset"),
    ("[scenario]\npreset = bounce\nweightings = W1\nsamples_per_period = 8\n", 4,
     "samples_per_period"),
    ("[scenario]\npreset = bounce\nweightings = W1\nepsilons = 2\n", 4, "epsilons"),
    ("[scenario]\npreset = bounce\nweightings = W1\ncolour = red\n", 4, "colour"),
    ("[scenario]\npreset = bounce\nweightings = W1\n[drive]\neta = abc\n", 5, "eta"),
    ("[scenario]\npreset = damped\nweightings = W1\n", None, "eta"),
    ("preset = bounce\n", 1, None),
])
def test_config_errors_have_diagnostics(text, line, field):
    with pytest.raises(ConfigParseError) as exc:
        cli.parse_config(text)
    assert exc.value.line == line
    assert exc.value.field == field


def test_run_writes_deterministic_csv(tmp_path, capsys):
    cfg = write(tmp_path, BOUNCE)
    first = cli.cmd_run(cfg, tmp_path / "a")
    second = cli.cmd_run(cfg, tmp_path / "b", jobs=2)
    assert len(first) == 4
    assert digest(first) == digest(second)
    raw = first[0].read_bytes()
    assert b"\r" not in raw
    meta, t, c = cli.read_trajectory_csv(first[0])
    assert meta["weighting"] == "W1" and meta["preset"] == "bounce"
    assert float(meta["tstar"]) == pytest.approx(0.6285, abs=2e-3)
    assert np.all(np.abs(c) <= 1)
    assert len(t) == 401
    lines = raw.decode().splitlines()
    assert lines[lines.index("t,c_e") + 1] == "0,0.01"


def test_run_plot_is_reproducible(tmp_path, capsys):
    cfg = write(tmp_path, BOUNCE)
    a = cli.cmd_run(cfg, tmp_path / "a", plot=True)
    b = cli.cmd_run(cfg, tmp_path / "b", plot=True)
    svg = [p for p in a if p.suffix == ".svg"]
    assert svg and svg[0].read_text().lstrip().startswith("<?xml")
    assert digest(a) == digest(b)


def test_damped_run_reports_frozen_time(tmp_path, capsys):
    paths = cli.cmd_run(write(tmp_path, DAMPED), tmp_path)
    meta, t, c = cli.read_trajectory_csv(paths[0])
    assert meta["frozen_time"] != "none"
    assert 0 < float(meta["frozen_time"]) < 70


def test_main_exit_codes(tmp_path, capsys):
    bad = write(tmp_path, "[scenario]\npreset = bounce\nweightings =\n")
    assert cli.main(["run", str(bad)]) == cli.EXIT_CONFIG
    assert "line 3" in capsys.readouterr().err
    assert cli.main(["run", str(tmp_path / "missing.ini")]) == cli.EXIT_CONFIG
    good = write(tmp_path, BOUNCE, "ok.ini")
    assert cli.main(["run", str(good), "--out-dir", str(tmp_path / "o")]) == 0


def test_table1_command(tmp_path, capsys):
    code = cli.cmd_table1(out_dir=tmp_path, plot=True)
    out = capsys.readouterr().out
    assert "W1   mixed" in out and "N/A" in out
    assert (tmp_path / "table1.csv").exists() and (tmp_path / "table1.svg").exists()
    rows = cli.table1_rows()
    by_key = {(r.label, r.kind): r for r in rows}
    assert by_key[("W1", "mixed")].delta == pytest.approx(0.0, abs=2e-3)
    assert by_key[("W6", "mixed")].tstar is None
    assert by_key[("W14", "pure")].tstar == pytest.approx(0.4406, abs=2e-3)
    # the exit status mirrors the row checks
    assert code == (0 if all(r.ok for r in rows) else cli.EXIT_TOLERANCE)


def test_table1_tight_tolerance_fails(capsys):
    assert cli.cmd_table1(tolerance=1e-6) == cli.EXIT_TOLERANCE


def test_nonconvergence_exit_code(tmp_path, monkeypatch, capsys):
    from rkkynav.errors import NonConvergentStepping

    def boom(*a, **k):
        raise NonConvergentStepping("step too coarse")

    monkeypatch.setattr(cli, "cmd_run", boom)
    assert cli.main(["run", str(write(tmp_path, BOUNCE))]) == cli.EXIT_NONCONVERGENCE
