import csv
import json
import subprocess
import sys

import pytest

from strongpert.cli import SERIES_COLUMNS, main

SMALL = """\
model.type = two_level
two_level.E1 = 0.1
two_level.E2 = 0.2
two_level.V12 = 1
grid.t_max = 10
grid.points = 401
"""


@pytest.fixture
def cfg(tmp_path):
    def write(text=SMALL, name="run.cfg"):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return str(p)

    return write


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_run_writes_outputs(cfg, tmp_path):
    out = tmp_path / "out"
    assert main(["run", cfg(), "--out", str(out)]) == 0
    rows = read_csv(out / "series.csv")
    assert tuple(rows[0]) == SERIES_COLUMNS
    assert len(rows) == 1 + 2 * 401
    assert {r[1] for r in rows[1:]} == {"raw", "resummed"}
    report = json.loads((out / "secularity.json").read_text())
    table = {(f["order"], f["mode"]): f["classification"] for f in report["fits"]}
    assert table[(1, "raw")] == "linear"
    assert table[(1, "resummed")] == "bounded"
    assert table[(2, "resummed")] != "bounded"
    meta = json.loads((out / "run_meta.json").read_text())
    assert meta["config"]["grid"]["points"] == 401
    assert {"versions", "tolerances", "wall_time_s"} <= meta.keys()


def test_deterministic(cfg, tmp_path):
    path = cfg()
    main(["run", path, "--out", str(tmp_path / "a")])
    main(["run", path, "--out", str(tmp_path / "b")])
    for name in ("series.csv", "secularity.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_oracle_off_drops_fidelity_only(cfg, tmp_path):
    main(["run", cfg(), "--out", str(tmp_path / "on")])
    main(["run", cfg(SMALL + "oracle.enabled = false\n", "off.cfg"), "--out", str(tmp_path / "off")])
    on, off = read_csv(tmp_path / "on" / "series.csv"), read_csv(tmp_path / "off" / "series.csv")
    drop = on[0].index("fidelity_partial_sum")
    assert off[0] == [c for c in SERIES_COLUMNS if c != "fidelity_partial_sum"]
    assert off == [r[:drop] + r[drop + 1 :] for r in on]


def test_lower_order_leaves_blank_columns(cfg, tmp_path):
    main(["run", cfg(SMALL + "series.orders = 1\nseries.modes = raw\n", "o1.cfg"), "--out", str(tmp_path)])
    rows = read_csv(tmp_path / "series.csv")
    assert all(r[4] == "" and r[3] != "" for r in rows[1:])


def test_config_error_exit_code(cfg, tmp_path, capsys):
    assert main(["run", cfg(SMALL + "grid.points = 10\n", "bad.cfg"), "--out", str(tmp_path)]) == 2
    assert "grid.points" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.cfg")]) == 2


def test_numerical_error_exit_code(cfg, tmp_path, capsys):
    # a level-tracking failure is numerical, not a configuration problem
    import strongpert.cli as cli
    from strongpert.errors import LevelMatchingError

    def boom(*a, **k):
        raise LevelMatchingError("lost continuity", time=1.5)

    orig = cli.analyze
    cli.analyze = boom
    try:
        assert main(["run", cfg(), "--out", str(tmp_path)]) == 3
    finally:
        cli.analyze = orig
    assert "t=1.5" in capsys.readouterr().err


def test_validate(cfg, capsys):
    assert main(["validate", cfg()]) == 0
    assert "ok" in capsys.readouterr().out
    assert main(["validate", cfg("model.type = nope\n", "x.cfg")]) == 2


def test_multiple_configs_with_jobs(cfg, tmp_path):
    a = cfg(SMALL, "a.cfg")
    b = cfg(SMALL.replace("E1 = 0.1", "E1 = 0.05"), "b.cfg")
    assert main(["run", a, b, "--out", str(tmp_path / "out"), "--jobs", "2"]) == 0
    for stem in ("a", "b"):
        assert (tmp_path / "out" / stem / "series.csv").exists()
    assert main(["run", a, "--jobs", "0"]) == 2


def test_version_subprocess():
    out = subprocess.run([sys.executable, "-m", "strongpert", "version"], capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.startswith("strongpert 0.1.0")
