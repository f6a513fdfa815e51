import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from qgeo import cli
from qgeo.channel import depolarize
from qgeo.hilbert import density_from_bloch, operator_to_json
from qgeo.metric import line_element_bloch, line_element_depolarized
from qgeo.verify import SampleConfig, check_monotonicity


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestChannel:
    def test_bloch(self, capsys):
        code, out, _ = run(capsys, "channel", "--bloch", "0.6,0,0", "--p", "0.3")
        assert code == 0
        obj = json.loads(out)
        assert set(obj) == {"state", "prob", "bloch"}
        np.testing.assert_allclose(obj["bloch"]["p"], [0.36, 0, 0], atol=1e-15)
        expect = operator_to_json(depolarize(density_from_bloch([0.6, 0, 0]), 0.3))
        assert obj["state"] == json.loads(json.dumps(expect))

    def test_bell(self, capsys):
        code, out, _ = run(capsys, "channel", "--bell", "φ+", "--p", "0.75")
        assert code == 0
        obj = json.loads(out)
        assert obj["meta"]["input"] == "phi+"
        assert obj["meta"]["closed_form_max_deviation"] <= 1e-12
        re = np.array(obj["state"]["re"])
        np.testing.assert_allclose(re, np.eye(4) / 4, atol=1e-12)

    def test_state_file(self, capsys, tmp_path):
        path = tmp_path / "rho.json"
        path.write_text(json.dumps(operator_to_json(density_from_bloch([0, 0, 1]))))
        code, out, _ = run(capsys, "channel", "--state", str(path), "--p", "0.75")
        assert code == 0
        np.testing.assert_allclose(json.loads(out)["bloch"]["p"], [0, 0, 0], atol=1e-15)

    def test_bloch_state_file(self, capsys, tmp_path):
        path = tmp_path / "b.json"
        path.write_text('{"p": [0.0, 0.5, 0.0]}')
        code, out, _ = run(capsys, "channel", "--state", str(path), "--p", "0.375")
        assert code == 0
        np.testing.assert_allclose(json.loads(out)["bloch"]["p"], [0, 0.25, 0], atol=1e-15)

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "o.json"
        code, out, _ = run(capsys, "channel", "--bloch", "0,0,1", "--p", "0.1", "--out", str(path))
        assert code == 0 and out == ""
        assert json.loads(path.read_text())["prob"] == 0.1

    def test_inversion_warning(self, capsys):
        code, _, err = run(capsys, "channel", "--bloch", "0,0,1", "--p", "0.9")
        assert code == 0 and "inversion" in err

    @pytest.mark.parametrize(
        "argv,code",
        [
            (["channel", "--bloch", "0,0,1", "--p", "1.5"], 3),
            (["channel", "--bloch", "0.9,0.9,0", "--p", "0.1"], 3),
            (["channel", "--bloch", "0,0", "--p", "0.1"], 2),
            (["channel", "--bloch", "a,b,c", "--p", "0.1"], 2),
            (["channel", "--p", "0.1"], 2),
            (["channel", "--bell", "chi", "--p", "0.1"], 2),
            (["channel", "--state", "/nonexistent.json", "--p", "0.1"], 2),
        ],
    )
    def test_errors(self, capsys, argv, code):
        assert run(capsys, *argv)[0] == code


class TestMetric:
    def test_statistical(self, capsys):
        code, out, _ = run(capsys, "metric", "--at", "0.5,0,0", "--dp", "0.1,0,0", "--p", "0.375")
        obj = json.loads(out)
        assert code == 0
        assert obj["ds2"] == line_element_bloch([0.5, 0, 0], [0.1, 0, 0])
        assert obj["ds2_depolarized"] == line_element_depolarized([0.5, 0, 0], [0.1, 0, 0], 0.375)
        assert obj["ds2"] == pytest.approx(0.013333333333333334, rel=1e-14)

    def test_bures_quarter(self, capsys):
        _, out, _ = run(capsys, "metric", "--at", "0.5,0,0", "--dp", "0.1,0,0", "--kind", "bures")
        assert json.loads(out)["ds2"] == pytest.approx(0.013333333333333334 / 4, rel=1e-14)

    def test_fubini(self, capsys):
        code, out, _ = run(capsys, "metric", "--at", "0,0,1", "--dp", "0.0001,0,0", "--kind", "fubini")
        assert code == 0
        assert json.loads(out)["ds2"] == pytest.approx(0.25e-8, rel=1e-6)

    def test_near_boundary_is_finite(self, capsys):
        code, out, _ = run(capsys, "metric", "--at", "0.9999999,0,0", "--dp", "0.001,0,0")
        assert code == 0 and json.loads(out)["ds2"] > 1.0

    @pytest.mark.parametrize(
        "argv",
        [
            ["metric", "--at", "1,0,0", "--dp", "0.1,0,0"],
            ["metric", "--at", "0,0,1", "--dp", "0.1,0,0", "--kind", "fubini", "--p", "0.1"],
            ["metric", "--at", "0.5,0,0", "--dp", "0.1,0,0", "--kind", "fubini"],
        ],
    )
    def test_domain_errors(self, capsys, argv):
        assert run(capsys, *argv)[0] == 3

    def test_bad_kind(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["metric", "--at", "0,0,0", "--dp", "0,0,0", "--kind", "nope"])
        assert exc.value.code == 2


class TestGeodesic:
    def test_csv(self, capsys):
        code, out, _ = run(capsys, "geodesic", "--frame", "1,0,0,0,0,1,0,0", "--p", "0.3", "--count", "8")
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["s", "P0", "P1", "P2", "P3", "Q0", "Q1", "Q2", "Q3", "physical_flag"]
        assert len(rows) == 9
        data = np.array(rows[1:], dtype=float)
        f = 1 - 0.4
        np.testing.assert_allclose(data[:, 6:9], f * data[:, 2:5], atol=1e-12)
        np.testing.assert_allclose(np.linalg.norm(data[:, 5:9], axis=1), 1, atol=1e-12)
        assert set(data[:, 9]) == {0.0, 1.0}

    def test_degenerate(self, capsys):
        assert run(capsys, "geodesic", "--frame", "1,0,0,0,2,0,0,0")[0] == 3

    def test_bad_count(self, capsys):
        assert run(capsys, "geodesic", "--frame", "1,0,0,0,0,1,0,0", "--count", "1")[0] == 2


class TestVerify:
    def test_matches_library(self, capsys):
        code, out, _ = run(capsys, "verify", "--count", "100", "--check", "monotonicity")
        assert code == 0
        expect = check_monotonicity(SampleConfig(count=100)).to_dict()
        assert json.loads(out) == [json.loads(json.dumps(expect))]

    def test_timing_flag(self, capsys):
        _, out, _ = run(capsys, "verify", "--count", "10", "--check", "monotonicity", "--timing")
        assert "elapsed_ms" in json.loads(out)[0]

    def test_extra_check(self, capsys):
        code, out, _ = run(capsys, "verify", "--count", "20", "--check", "bures_expansion")
        assert code == 0 and json.loads(out)[0]["check_name"] == "bures_expansion"

    @pytest.mark.parametrize(
        "argv",
        [
            ["verify", "--count", "0"],
            ["verify", "--check", "nope"],
            ["verify", "--workers", "0"],
            ["verify", "--p-grid", "0,2"],
            ["verify", "--cap", "1.5"],
        ],
    )
    def test_usage(self, capsys, argv):
        assert run(capsys, *argv)[0] == 2

    def test_logging_env(self):
        proc = subprocess.run(
            [sys.executable, "-m", "qgeo", "verify", "--count", "5", "--check", "monotonicity"],
            capture_output=True,
            text=True,
            env={"QGEO_LOG": "info", "PATH": ""},
        )
        assert proc.returncode == 0
        assert "monotonicity" in proc.stderr
        json.loads(proc.stdout)


def test_no_command(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 2
