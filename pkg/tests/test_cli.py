import json
import re
from pathlib import Path

import numpy as np
import pytest

from noneqcp import cli
from noneqcp import config as cfgmod
from noneqcp.errors import ConfigError, ConvergenceError

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
UNIT_SUFFIX = re.compile(r"_(m|J|uK|deg|rad_s|rad_per_m|W|K|1|F_per_m_s)$")


def write(tmp_path, text, name="run.yaml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def read_table(path):
    lines = Path(path).read_text().splitlines()
    meta = [l for l in lines if l.startswith("#")]
    body = [l for l in lines if not l.startswith("#")]
    header = body[0].split(",")
    rows = np.array([[float(v) for v in r.split(",")] for r in body[1:]])
    return meta, header, rows


BLUE = """
atom: {model: rubidium}
beams:
  - {omega_rad_s: 2.46e15, offset_deg: 0.7, power_W: 0.2, waist_m: 180.0e-6}
"""


class TestExitCodes:
    def test_verify_passes(self, tmp_path, capsys):
        out = tmp_path / "v.csv"
        assert cli.main(["verify", "--out", str(out)]) == 0
        err = capsys.readouterr().err
        assert err.count("PASS") == 4 and "FAIL" not in err

    def test_unknown_key(self, tmp_path):
        assert cli.main(["split", "--config", write(tmp_path, "atom: {colour: blue}\n")]) == 2

    def test_bad_yaml(self, tmp_path):
        assert cli.main(["split", "--config", write(tmp_path, "atom: [unclosed\n")]) == 2

    def test_missing_file(self, tmp_path):
        assert cli.main(["split", "--config", str(tmp_path / "nope.yaml")]) == 2

    def test_wrong_atom_model(self, tmp_path):
        assert cli.main(["split", "--config", write(tmp_path, "atom: {model: rubidium}\n")]) == 2

    def test_near_resonance(self, tmp_path):
        text = BLUE.replace("2.46e15", "2.4141903e15") + "scan:\n  axes:\n    - {name: L, start: 1.0e-7, stop: 2.0e-7, count: 3}\n"
        assert cli.main(["laser1", "--config", write(tmp_path, text), "--out", str(tmp_path / "o")]) == 4

    def test_outside_table(self, tmp_path):
        text = BLUE.replace("2.46e15", "3.0e15") + "scan:\n  axes:\n    - {name: L, start: 1.0e-7, stop: 2.0e-7, count: 3}\n"
        assert cli.main(["laser1", "--config", write(tmp_path, text), "--out", str(tmp_path / "o")]) == 4

    def test_tolerance_failure(self, tmp_path, monkeypatch):
        def boom(run, threads):
            raise ConvergenceError("did not converge", {"L": 1e-7})
        monkeypatch.setitem(cli.COMMANDS, "verify", boom)
        assert cli.main(["verify", "--out", str(tmp_path / "o")]) == 3

    def test_bad_threads(self):
        assert cli.main(["verify", "--threads", "0"]) == 2


class TestOutput:
    def test_lattice_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert cli.main(["lattice", "--config", str(CONFIGS / "lattice.yaml"), "--out", str(a)]) == 0
        assert cli.main(["lattice", "--config", str(CONFIGS / "lattice.yaml"), "--out", str(b),
                         "--threads", "2"]) == 0
        assert a.read_bytes() == b.read_bytes()

    @pytest.mark.parametrize("name", sorted(p.stem for p in CONFIGS.glob("*.yaml")))
    def test_headers_carry_units(self, name, tmp_path):
        out = tmp_path / "o.csv"
        assert cli.main([name.split("_")[0], "--config", str(CONFIGS / f"{name}.yaml"), "--out", str(out)]) == 0
        meta, header, rows = read_table(out)
        raw = cfgmod.load_raw(CONFIGS / f"{name}.yaml")
        assert f"# config_sha256: {cfgmod.config_hash(raw)}" in meta
        assert all(UNIT_SUFFIX.search(h) for h in header), header
        assert rows.shape[1] == len(header)

    def test_json(self, tmp_path):
        out = tmp_path / "o.json"
        assert cli.main(["dispersion", "--format", "json", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["columns"][0] == "k_rad_per_m" and len(doc["data"]) == 200

    def test_twelve_digits(self, tmp_path):
        out = tmp_path / "o.csv"
        cli.main(["dispersion", "--config", str(CONFIGS / "dispersion.yaml"), "--out", str(out)])
        first = [l for l in out.read_text().splitlines() if not l.startswith("#")][1]
        assert all(len(re.sub(r"[-.]|e.*", "", v)) <= 12 for v in first.split(","))

    def test_stdout(self, capsys):
        assert cli.main(["dispersion"]) == 0
        assert capsys.readouterr().out.startswith("# noneqcp dispersion")


class TestSubcommands:
    def test_split_topology(self, tmp_path):
        out = tmp_path / "s.csv"
        assert cli.main(["split", "--config", str(CONFIGS / "split.yaml"), "--out", str(out)]) == 0
        _, header, rows = read_table(out)
        uf, ua = rows[:, header.index("U_f_J")], rows[:, header.index("U_a_J")]
        assert np.all(uf[:5] * ua[:5] < 0)
        i0 = header.index("U_over_U0_1")
        assert np.all(rows[:, i0] > 0)

    def test_imbalance_three_curves(self, tmp_path, caplog):
        out = tmp_path / "i.csv"
        text = (CONFIGS / "imbalance.yaml").read_text().replace("count: 40", "count: 8")
        assert cli.main(["imbalance", "--config", write(tmp_path, text), "--out", str(out)]) == 0
        _, header, rows = read_table(out)
        assert [h for h in header if h.endswith("_J")] == [
            "U_oe_Tsp300K_J", "U_oe_Tsp1100K_J", "U_oe_Tsp2000K_J"]
        assert "lossless" in caplog.text
        # only the equilibrium curve is guaranteed monotone
        assert np.all(np.diff(rows[:, 1]) > 0)

    def test_laser1_angle_scan(self, tmp_path):
        out = tmp_path / "l.csv"
        assert cli.main(["laser1", "--config", str(CONFIGS / "laser1_angle.yaml"), "--out", str(out)]) == 0
        _, header, rows = read_table(out)
        i = int(np.argmax(rows[:, 1]))
        assert rows[i, 0] == pytest.approx(0.7, abs=0.05)
        assert rows[i, 1] == pytest.approx(702.6, rel=0.01)

    def test_offsets_convert_to_radians(self):
        run = cfgmod.build(cfgmod.load_raw(CONFIGS / "laser2_angles.yaml"))
        assert run.axes[0].values[0] == pytest.approx(np.radians(0.6))
        assert run.beams[0].omega == 2.46e15

    def test_schema_rejects_both_angles(self):
        raw = {"beams": [{"omega_rad_s": 2.46e15, "theta_deg": 35.0, "offset_deg": 0.7,
                          "power_W": 0.2, "waist_m": 1e-4}]}
        with pytest.raises(ConfigError):
            cfgmod.build(raw)

    def test_data_dir_env(self, tmp_path, monkeypatch):
        (tmp_path / "sapphire_ordinary.txt").write_text("1.0e15 3.1 0\n3.0e15 3.1 0\n")
        monkeypatch.setenv("NONEQCP_DATA_DIR", str(tmp_path))
        run = cfgmod.build({})
        assert run.stack.glass.permittivity(2e15) == pytest.approx(3.1)
