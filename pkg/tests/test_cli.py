import json
import math
import os
import subprocess
import sys

import pytest

from vortexscatter.cli import (
    EXIT_CONFIG,
    EXIT_DEGENERATE_SUPPORT,
    EXIT_OK,
    EXIT_QUADRATURE,
    EXIT_THRESHOLD,
    main,
)


def _write_config(tmp_path, name="config.json", **overrides):
    path = tmp_path / name
    path.write_text(json.dumps(overrides))
    return path


def _eval_config(**overrides):
    base = dict(
        m=5, theta=0.2, kappa0=1.0, kappa01=0.9, kappa02=0.7,
        q=0.05, m1_min=6, m1_max=6, m2_min=1, m2_max=1,
    )
    base.update(overrides)
    return base


class TestEval:
    def test_generic_round_trip(self, tmp_path):
        cfg = _write_config(tmp_path, **_eval_config())
        out = tmp_path / "out.json"
        assert main(["eval", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
        payload = json.loads(out.read_text())
        from vortexscatter.amplitudes import reduced_triple_amplitude
        from vortexscatter.kinematics import CollisionGeometry, TwistedState

        geom = CollisionGeometry(0.2, 0.05, TwistedState.massless(1.0, 5, 50.0), 0.9, 0.7)
        amp = reduced_triple_amplitude(geom, 5, 6, 1)
        assert payload["value_re"] == amp.value.real  # bit-exact round trip
        assert payload["value_im"] == amp.value.imag
        assert payload["phase_power"] == 2
        assert payload["in_support"] is True

    def test_out_of_stripe(self, tmp_path):
        cfg = _write_config(tmp_path, **_eval_config(kappa01=0.1, kappa02=3.0))
        out = tmp_path / "out.json"
        assert main(["eval", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload["in_support"] is False
        assert payload["value_re"] == 0.0 and payload["value_im"] == 0.0
        assert payload["area"] is None

    def test_symmetric_zero(self, tmp_path):
        cfg = _write_config(tmp_path, **_eval_config(m=1, q=0.0, m1_min=0, m1_max=0, m2_min=0, m2_max=0))
        out = tmp_path / "out.json"
        assert main(["eval", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload["in_support"] is True
        assert abs(payload["value_re"]) < 1e-12

    def test_q_region_validation_names_inequality(self, tmp_path, capsys):
        cfg = _write_config(tmp_path, **_eval_config(q=0.9))
        out = tmp_path / "out.json"
        assert main(["eval", "--config", str(cfg), "--out", str(out)]) == EXIT_CONFIG
        err = capsys.readouterr().err
        assert "kappa0*sin(theta)" in err

    def test_all_violations_listed(self, tmp_path, capsys):
        cfg = _write_config(
            tmp_path, **_eval_config(theta=-0.1, kappa0=-2.0, m1_min=1, m1_max=3)
        )
        assert main(["eval", "--config", str(cfg), "--out", "x"]) == EXIT_CONFIG
        err = capsys.readouterr().err
        assert "theta" in err and "kappa0" in err and "m1_min" in err

    def test_unknown_key_rejected(self, tmp_path):
        cfg = _write_config(tmp_path, kappa_0=1.0)
        assert main(["eval", "--config", str(cfg), "--out", "x"]) == EXIT_CONFIG

    def test_degenerate_support_exit_code(self, tmp_path):
        # sliver triangle: inside the stripe with area below the degeneracy floor
        cfg = _write_config(
            tmp_path,
            **_eval_config(kappa0=1e8, kappa01=1e8, kappa02=0.1, q=0.0),
        )
        out = tmp_path / "out.json"
        assert main(["eval", "--config", str(cfg), "--out", str(out)]) == EXIT_DEGENERATE_SUPPORT
        assert not out.exists()


class TestOracleCheck:
    def test_single_sample_deterministic(self, tmp_path):
        cfg = _write_config(tmp_path, sample_count=1, seed=42)
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["oracle-check", "--config", str(cfg), "--out", str(out1)]) == EXIT_OK
        assert main(["oracle-check", "--config", str(cfg), "--out", str(out2)]) == EXIT_OK
        assert out1.read_bytes() == out2.read_bytes()

    def test_small_run_passes_default_threshold(self, tmp_path):
        cfg = _write_config(tmp_path, sample_count=8, seed=1)
        out = tmp_path / "report.json"
        assert main(["oracle-check", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
        report = json.loads(out.read_text())
        assert report["passed"] is True
        assert report["dispersion"] < 1e-8
        assert len(report["per_sample_re"]) == 8

    def test_zero_threshold_fails(self, tmp_path):
        cfg = _write_config(tmp_path, sample_count=2, seed=1, threshold=0.0)
        out = tmp_path / "report.json"
        assert main(["oracle-check", "--config", str(cfg), "--out", str(out)]) == EXIT_THRESHOLD
        assert json.loads(out.read_text())["passed"] is False


class TestMap:
    def test_single_cell_self_normalizes(self, tmp_path):
        cfg = _write_config(
            tmp_path,
            m=5, m1_min=5, m1_max=5, m2_min=0, m2_max=0,
            quadrature={"node_count": 12, "rel_tol": 1e-6}, q_nodes=32,
        )
        out = tmp_path / "map.csv"
        assert main(["map", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
        assert out.read_text() == "m1,m2,intensity\n5,0,1\n"

    def test_csv_round_trip_and_plot_script(self, tmp_path):
        cfg = _write_config(
            tmp_path,
            m=5, m1_min=4, m1_max=6, m2_min=-1, m2_max=1,
            quadrature={"node_count": 16, "rel_tol": 1e-6}, q_nodes=48,
            plot_script=True,
        )
        out = tmp_path / "map.csv"
        assert main(["map", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
        lines = out.read_text().splitlines()
        assert lines[0] == "m1,m2,intensity"
        assert len(lines) == 1 + 3 * 3
        for line in lines[1:]:
            m1, m2, v = line.split(",")
            assert f"{float(v):.9g}" == v  # canonical 9-digit form round-trips
        assert (tmp_path / "map.csv.gp").exists()
        assert str(out) in (tmp_path / "map.csv.gp").read_text()

    def test_underresolved_map_aborts_with_partial(self, tmp_path, capsys):
        cfg = _write_config(
            tmp_path,
            m=5, m1_min=4, m1_max=6, m2_min=-1, m2_max=1,
            quadrature={"node_count": 6, "rel_tol": 1e-6}, q_nodes=24,
            map_cell_rtol=1e-4,
        )
        out = tmp_path / "map.csv"
        assert main(["map", "--config", str(cfg), "--out", str(out)]) == EXIT_QUADRATURE
        assert not out.exists()
        assert (tmp_path / "map.csv.partial").exists()


class TestField:
    def test_vortex_core_rows(self, tmp_path):
        cfg = _write_config(tmp_path, m=3, kappa0=1.0, grid_n=4, r_max=2.0)
        out = tmp_path / "field.csv"
        assert main(["field", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
        lines = out.read_text().splitlines()
        assert lines[0] == "r,phi,re,im"
        for line in lines[1:5]:  # the r = 0 rows
            r, phi, re, im = line.split(",")
            assert float(r) == 0.0
            assert float(re) == 0.0 and float(im) == 0.0

    def test_zero_order_core_value(self, tmp_path):
        cfg = _write_config(tmp_path, m=0, kappa0=2.0, grid_n=3, r_max=1.0)
        out = tmp_path / "field.csv"
        assert main(["field", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
        first = out.read_text().splitlines()[1].split(",")
        assert float(first[2]) == pytest.approx(math.sqrt(2.0 / (2.0 * math.pi)), abs=1e-15)

    def test_series_oracle_value(self, tmp_path):
        # grid_n = 4, r_max = 3 puts r = 1 and phi = pi/2 on the grid
        cfg = _write_config(tmp_path, m=1, kappa0=1.0, grid_n=4, r_max=3.0)
        out = tmp_path / "field.csv"
        assert main(["field", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
        from _oracles import bessel_series

        rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
        half_pi = 0.5 * math.pi
        row = next(
            r for r in rows
            if float(r[0]) == 1.0 and abs(float(r[1]) - half_pi) < 1e-8
        )
        expected = bessel_series(1, 1.0) * math.sqrt(1.0 / (2.0 * math.pi))
        assert float(row[3]) == pytest.approx(expected, abs=1e-9)  # imaginary part
        assert abs(float(row[2])) < 1e-12  # real part ~ 0 at phi = pi/2

    def test_grid_validation(self, tmp_path):
        cfg = _write_config(tmp_path, grid_n=1)
        assert main(["field", "--config", str(cfg), "--out", "x"]) == EXIT_CONFIG

    def test_packet_superposition_runs(self, tmp_path):
        cfg = _write_config(tmp_path, m=1, kappa0=1.0, grid_n=3, r_max=2.0, field_packet=True)
        out = tmp_path / "field.csv"
        assert main(["field", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
        assert len(out.read_text().splitlines()) == 1 + 9


class TestSubprocessDeterminism:
    def test_repeated_runs_byte_identical(self, tmp_path):
        env = dict(os.environ)
        src = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src")
        env["PYTHONPATH"] = src + os.pathsep + env.get("PYTHONPATH", "")
        cfg = _write_config(
            tmp_path,
            m=5, m1_min=4, m1_max=5, m2_min=0, m2_max=1,
            quadrature={"node_count": 10, "rel_tol": 1e-6}, q_nodes=24,
            map_cell_rtol=1.0,
        )
        outputs = []
        for name in ("one.csv", "two.csv"):
            out = tmp_path / name
            proc = subprocess.run(
                [sys.executable, "-m", "vortexscatter", "map",
                 "--config", str(cfg), "--out", str(out)],
                capture_output=True, env=env,
            )
            assert proc.returncode == EXIT_OK, proc.stderr
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]
