import json

import numpy as np
import pytest

from stablesum.cli import ConfigError, main, parse_config
from stablesum.slowly_varying import coefficient, constant

BASE = """
[process]
ell_kind = constant
ell_c = 1.0
innovation = stable
alpha = 1.5
beta = 0.0
scale = 1.0
truncation = 200

[simulate]
n = 20
t = 1.0

[fdd]
times = 0.5, 1.0
freqs = 1.0, -0.5

[sweep]
n_list = 20, 50
reps = 60
seed = 4242
"""


def write(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestParse:
    def test_round_trip(self, tmp_path):
        cfg = parse_config(write(tmp_path, BASE))
        assert cfg.ell == constant(1.0)
        assert cfg.seed == 4242
        assert cfg.truncation == 200

    def test_unknown_key_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            parse_config(write(tmp_path, BASE + "\n[process]\nbogus = 1\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            parse_config(str(tmp_path / "nope.ini"))

    def test_bad_domain_is_config_error(self, tmp_path):
        bad = BASE.replace("alpha = 1.5", "alpha = 0.5")
        with pytest.raises(ConfigError):
            parse_config(write(tmp_path, bad))


class TestSimulate:
    def test_hook_zero(self, tmp_path):
        text = BASE.replace("innovation = stable", "innovation = hook_zero")
        code = main(["simulate", "--config", write(tmp_path, text),
                     "--out-dir", str(tmp_path / "out")])
        assert code == 0
        lines = (tmp_path / "out" / "simulate.csv").read_text().strip().split("\n")
        assert lines[0] == "n,x"
        assert len(lines) == 21
        assert all(line.endswith(",0.0") for line in lines[1:])

    def test_hook_impulse_reproduces_coefficients(self, tmp_path):
        text = BASE.replace("innovation = stable", "innovation = hook_impulse")
        main(["simulate", "--config", write(tmp_path, text),
              "--out-dir", str(tmp_path / "out")])
        lines = (tmp_path / "out" / "simulate.csv").read_text().strip().split("\n")[1:]
        xs = np.array([float(line.split(",")[1]) for line in lines])
        want = coefficient(constant(1.0), np.arange(1.0, 21.0))
        np.testing.assert_allclose(xs, want, rtol=1e-15)

    def test_deterministic_output(self, tmp_path):
        path = write(tmp_path, BASE)
        main(["simulate", "--config", path, "--out-dir", str(tmp_path / "a")])
        main(["simulate", "--config", path, "--out-dir", str(tmp_path / "b")])
        assert ((tmp_path / "a" / "simulate.csv").read_bytes()
                == (tmp_path / "b" / "simulate.csv").read_bytes())

    def test_missing_seed_is_config_error(self, tmp_path, capsys):
        text = BASE.replace("seed = 4242", "")
        code = main(["simulate", "--config", write(tmp_path, text),
                     "--out-dir", str(tmp_path / "out")])
        assert code == 2

    def test_malformed_config_exit_2(self, tmp_path):
        code = main(["simulate", "--config", write(tmp_path, "][ not ini"),
                     "--out-dir", str(tmp_path / "out")])
        assert code == 2


class TestOracle:
    def test_schema_and_zero_frequencies(self, tmp_path):
        text = BASE.replace("freqs = 1.0, -0.5", "freqs = 0.0, 0.0")
        code = main(["oracle", "--config", write(tmp_path, text),
                     "--out-dir", str(tmp_path / "out")])
        assert code == 0
        lines = (tmp_path / "out" / "oracle.csv").read_text().strip().split("\n")
        assert lines[0] == "N,distance,past_part,wall_ms"
        for line in lines[1:]:
            assert float(line.split(",")[1]) == 0.0
        doc = json.loads((tmp_path / "out" / "oracle.json").read_text())
        assert doc["config"]["process"]["innovation"] == "stable"
        assert [row["n"] for row in doc["rows"]] == [20, 50]

    def test_j_policy_tightening_stable(self, tmp_path):
        out1 = tmp_path / "o1"
        out2 = tmp_path / "o2"
        main(["oracle", "--config", write(tmp_path, BASE), "--out-dir", str(out1)])
        tight = BASE + "\nj_tolerance = 1e-9\n"
        main(["oracle", "--config", write(tmp_path, tight, "tight.ini"),
              "--out-dir", str(out2)])
        a = json.loads((out1 / "oracle.json").read_text())["rows"]
        b = json.loads((out2 / "oracle.json").read_text())["rows"]
        for ra, rb in zip(a, b):
            assert abs(ra["distance"] - rb["distance"]) < 1e-8

    def test_pareto_rejected(self, tmp_path):
        text = BASE.replace("innovation = stable",
                            "innovation = pareto\nsigma1 = 1.0\nsigma2 = 1.0")
        code = main(["oracle", "--config", write(tmp_path, text),
                     "--out-dir", str(tmp_path / "out")])
        assert code == 2


class TestVerify:
    def test_loose_criteria_pass(self, tmp_path):
        text = BASE + "\n[tolerance]\nmax_ks = 1.0\nmax_ecf = 1.0\n"
        code = main(["verify", "--config", write(tmp_path, text),
                     "--out-dir", str(tmp_path / "out"), "--threads", "2"])
        assert code == 0
        report = json.loads((tmp_path / "out" / "report.json").read_text())
        assert report["verdicts"] == {"ks_max": True, "ecf_max": True}
        csv_lines = (tmp_path / "out" / "report.csv").read_text().strip().split("\n")
        assert csv_lines[0] == "N,oracle_distance,past_part,ecf_distance,ks_marginal,wall_time"

    def test_impossible_criteria_fail(self, tmp_path):
        text = BASE + "\n[tolerance]\nmax_ks = 1e-9\n"
        code = main(["verify", "--config", write(tmp_path, text),
                     "--out-dir", str(tmp_path / "out")])
        assert code == 1

    def test_seed_override_changes_samples(self, tmp_path):
        text = BASE + "\n[tolerance]\nmax_ks = 1.0\n"
        path = write(tmp_path, text)
        main(["verify", "--config", path, "--out-dir", str(tmp_path / "a")])
        main(["verify", "--config", path, "--out-dir", str(tmp_path / "b"),
              "--seed-override", "7"])
        a = json.loads((tmp_path / "a" / "report.json").read_text())
        b = json.loads((tmp_path / "b" / "report.json").read_text())
        assert a["metadata"]["seed"] == 4242 and b["metadata"]["seed"] == 7
        assert a["rows"] != b["rows"]

    def test_report_body_deterministic(self, tmp_path):
        text = BASE + "\n[tolerance]\nmax_ks = 1.0\n"
        path = write(tmp_path, text)
        main(["verify", "--config", path, "--out-dir", str(tmp_path / "a")])
        main(["verify", "--config", path, "--out-dir", str(tmp_path / "b")])
        strip = lambda doc: {k: v for k, v in doc.items()} | {
            "rows": [{k: v for k, v in row.items() if k != "wall_time_s"}
                     for row in doc["rows"]]}
        a = strip(json.loads((tmp_path / "a" / "report.json").read_text()))
        b = strip(json.loads((tmp_path / "b" / "report.json").read_text()))
        assert a == b


class TestHalpha:
    def test_constant(self, capsys):
        assert main(["halpha", "--alpha", "1.5", "--kind", "constant",
                     "--c", "1.0", "--n", "1000"]) == 0
        out = capsys.readouterr().out
        assert "h_alpha=1.0" in out
        assert "residual=0.0" in out

    def test_log_power_residual(self, capsys):
        assert main(["halpha", "--alpha", "2.0", "--kind", "log_power",
                     "--c", "1.0", "--p", "1.0", "--n", "100000"]) == 0
        out = capsys.readouterr().out
        residual = float(out.split("residual=")[1].split("\n")[0])
        assert residual < 1e-10

    def test_invalid_alpha_exit_2(self):
        assert main(["halpha", "--alpha", "0.5", "--n", "100"]) == 2

    def test_no_fixed_point_exit_1(self):
        assert main(["halpha", "--alpha", "2.0", "--kind", "constant",
                     "--c", "1.0", "--n", "1"]) == 1
