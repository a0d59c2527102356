import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from satrate import SweepConfig, builtin_case, derive_seed, run_sweep
from satrate.cli import main
from satrate.errors import ConfigurationError, SchemaError
from satrate.plotting import emit_plot_script, read_csv_columns
from satrate.sweep import csv_header, r2_tag

DATA = Path(__file__).parent / "data"

TINY = SweepConfig(
    scenario=builtin_case(1),
    snr_grid_db=(0.0, 5.0, 10.0),
    strategies=("sud", "mud2", "s2"),
    r2_code_rates=(Fraction(3, 5), Fraction(5, 6), Fraction(8, 9)),
    n_samples=10**4,
    master_seed=7,
    phase_count=32,
)


def _csv_text(cfg, path):
    run_sweep(cfg, workers=1, out_csv=path)
    return Path(path).read_bytes()


class TestSweep:
    def test_header_schema(self):
        assert csv_header(TINY) == [
            "snr_db", "sud", "sud_se",
            "mud_r35", "mud_r35_se", "mud_r56", "mud_r56_se", "mud_r89", "mud_r89_se",
            "s2", "s2_se",
            "regime_r35", "regime_r56", "regime_r89",
        ]

    def test_byte_identical_reruns(self, tmp_path):
        a = _csv_text(TINY, tmp_path / "a.csv")
        b = _csv_text(TINY, tmp_path / "b.csv")
        assert a == b

    def test_worker_count_invariance(self, tmp_path):
        serial = _csv_text(TINY, tmp_path / "serial.csv")
        run_sweep(TINY, workers=2, out_csv=tmp_path / "par.csv")
        assert serial == (tmp_path / "par.csv").read_bytes()

    def test_golden_regression(self, tmp_path):
        start = time.monotonic()
        produced = _csv_text(TINY, tmp_path / "tiny.csv")
        elapsed = time.monotonic() - start
        golden = (DATA / "golden_tiny_sweep.csv").read_bytes()
        assert produced == golden
        assert elapsed < 10.0

    def test_rates_bounded_by_alphabet(self, tmp_path):
        pts = run_sweep(TINY, workers=1)
        for pt in pts:
            assert 0.0 <= pt.sud[0] <= 2.0
            for mp in pt.mud.values():
                assert 0.0 <= mp.rate <= 2.0
            assert 0.0 <= pt.s2[0] <= 0.5 * 4.0

    def test_gauss_strategy_columns(self, tmp_path):
        cfg = SweepConfig(
            scenario=builtin_case(1),
            snr_grid_db=(0.0, 10.0),
            strategies=("gauss",),
            r2_code_rates=(Fraction(3, 5),),
            n_samples=10**4,
            master_seed=1,
        )
        run_sweep(cfg, workers=1, out_csv=tmp_path / "g.csv")
        cols = read_csv_columns(tmp_path / "g.csv")
        assert list(cols) == ["snr_db", "gauss_r35"]
        assert all(float(v) >= 0 for v in cols["gauss_r35"])

    def test_config_validation(self):
        with pytest.raises(ConfigurationError, match="strategies"):
            SweepConfig(scenario=builtin_case(1), snr_grid_db=(0.0,), strategies=("warp",))
        with pytest.raises(ConfigurationError, match="ascending"):
            SweepConfig(scenario=builtin_case(1), snr_grid_db=(5.0, 0.0))
        with pytest.raises(ConfigurationError, match="n_samples"):
            SweepConfig(scenario=builtin_case(1), snr_grid_db=(0.0,), n_samples=10)

    def test_interrupt_flushes_partial_results(self, tmp_path, monkeypatch, capsys):
        import satrate.sweep as sweep_mod

        real = sweep_mod.compute_point
        calls = {"n": 0}

        def flaky(cfg, snr_db):
            calls["n"] += 1
            if calls["n"] == 3:
                raise KeyboardInterrupt
            return real(cfg, snr_db)

        monkeypatch.setattr(sweep_mod, "compute_point", flaky)
        out = tmp_path / "partial.csv"
        with pytest.raises(KeyboardInterrupt):
            run_sweep(TINY, workers=1, out_csv=out)
        lines = out.read_text().strip().splitlines()
        assert lines[0] == ",".join(csv_header(TINY))
        assert len(lines) == 3  # header + the two completed points

    def test_out_csv_in_config(self, tmp_path):
        cfg = SweepConfig(
            scenario=builtin_case(1),
            snr_grid_db=(5.0,),
            strategies=("sud",),
            n_samples=10**4,
            out_csv=str(tmp_path / "cfg.csv"),
        )
        run_sweep(cfg, workers=1)
        assert (tmp_path / "cfg.csv").exists()

    def test_derive_seed_stable(self):
        assert derive_seed(1, "sud", 0.0) == derive_seed(1, "sud", 0.0)
        assert derive_seed(1, "sud", 0.0) != derive_seed(1, "mud2", 0.0)
        assert derive_seed(1, "sud", 0.0) != derive_seed(2, "sud", 0.0)

    def test_r2_tags(self):
        assert r2_tag(Fraction(3, 5)) == "r35"
        assert r2_tag(Fraction(8, 9)) == "r89"


class TestCli:
    def test_sweep_end_to_end(self, tmp_path):
        out = tmp_path / "case1.csv"
        code = main([
            "sweep", "--case", "1",
            "--snr-grid", "0,5",
            "--samples", "10000",
            "--seed", "3",
            "--strategies", "sud,mud2",
            "--out", str(out),
        ])
        assert code == 0
        assert out.exists()
        assert (tmp_path / "case1.png").exists()

    def test_sweep_scenario_file_and_dump_draws(self, tmp_path):
        scn = tmp_path / "two.scn"
        scn.write_text("k = 2\nlambdas_db = 0\nmodulations = qpsk, qpsk\n")
        out = tmp_path / "two.csv"
        draws = tmp_path / "draws.csv"
        code = main([
            "sweep", "--scenario", str(scn),
            "--snr-grid", "5",
            "--samples", "10000",
            "--strategies", "sud",
            "--out", str(out), "--no-fig",
            "--dump-draws", str(draws),
        ])
        assert code == 0
        cols = read_csv_columns(draws)
        assert list(cols) == ["draw", "y_re", "y_im", "x1_idx", "x2_idx"]
        assert len(cols["draw"]) == 100

    def test_sweep_plot_script_runs_standalone(self, tmp_path):
        out = tmp_path / "sw.csv"
        script = tmp_path / "plot_sw.py"
        code = main([
            "sweep", "--case", "3", "--snr-grid", "0,8", "--samples", "10000",
            "--strategies", "sud", "--out", str(out), "--no-fig",
            "--plot-script", str(script),
        ])
        assert code == 0
        proc = subprocess.run(
            [sys.executable, str(script)], capture_output=True, text=True, cwd=tmp_path
        )
        assert proc.returncode == 0, proc.stderr
        assert (tmp_path / "plot_sw.png").exists()

    def test_gaussian_subcommand(self, tmp_path, capsys):
        out = tmp_path / "fig4.csv"
        code = main([
            "gaussian", "--gamma-abs", "0.79", "--r2-bits", "0.5",
            "--snr-grid=-5,0,5,10",
            "--mc-samples", "10000", "--seed", "2",
            "--out", str(out),
        ])
        assert code == 0
        captured = capsys.readouterr().out
        assert "boundary into sum-rate-limited regime" in captured
        cols = read_csv_columns(out)
        assert list(cols)[:3] == ["snr_db", "r1_bound", "regime"]
        assert "mc_rate" in cols
        assert (tmp_path / "fig4.png").exists()

    def test_phases_subcommand(self, tmp_path):
        out = tmp_path / "phases.csv"
        code = main([
            "phases", "--case", "1", "--snr-db", "5",
            "--count", "8", "--samples", "10000", "--out", str(out),
        ])
        assert code == 0
        cols = read_csv_columns(out)
        assert list(cols) == ["phase_rad", "ij", "ij_se", "best"]
        assert sum(int(v) for v in cols["best"]) == 1

    def test_cutoff_subcommand(self, tmp_path, capsys):
        scn = tmp_path / "two.scn"
        scn.write_text("k = 2\nlambdas_db = 0\nmodulations = qpsk, qpsk\n")
        out = tmp_path / "cutoff.csv"
        code = main([
            "cutoff", "--scenario", str(scn), "--r2-bits", "1.2",
            "--bracket", "-5", "10", "--samples", "10000", "--out", str(out),
        ])
        assert code == 0
        assert "snr_c" in capsys.readouterr().out
        cols = read_csv_columns(out)
        assert list(cols) == ["r2_bits", "snr_c_db", "residual_bits", "iterations"]

    def test_cutoff_zero_rate_reports_floor(self, tmp_path, capsys):
        scn = tmp_path / "two.scn"
        scn.write_text("k = 2\nlambdas_db = 0\nmodulations = qpsk, qpsk\n")
        code = main([
            "cutoff", "--scenario", str(scn), "--r2-bits", "0",
            "--bracket", "-5", "10", "--samples", "10000",
        ])
        assert code == 0
        assert "no finite cutoff above bracket floor" in capsys.readouterr().out

    def test_cutoff_unreachable_rate_exits_3(self, tmp_path, capsys):
        scn = tmp_path / "two.scn"
        scn.write_text("k = 2\nlambdas_db = 0\nmodulations = qpsk, qpsk\n")
        code = main([
            "cutoff", "--scenario", str(scn), "--r2-bits", "2.0",
            "--bracket", "-5", "10", "--samples", "10000",
        ])
        assert code == 3
        assert "not decodable" in capsys.readouterr().err

    def test_configuration_error_exits_2(self, tmp_path, capsys):
        code = main([
            "sweep", "--scenario", str(tmp_path / "missing.scn"),
            "--snr-grid", "0", "--out", str(tmp_path / "x.csv"),
        ])
        assert code == 2
        assert "configuration error" in capsys.readouterr().err

    def test_dump_scenario(self, capsys):
        code = main(["dump-scenario", "--case", "1"])
        assert code == 0
        out = capsys.readouterr().out
        assert "k = 6" in out
        assert "user 2: modulation=qpsk lambda_db=0" in out
        assert "residual power (mud2)" in out


class TestPlotScripts:
    def test_emit_requires_known_figure(self, tmp_path):
        csv_path = tmp_path / "x.csv"
        csv_path.write_text("snr_db,r1_bound,regime\n0,1,full\n")
        with pytest.raises(SchemaError):
            emit_plot_script(csv_path, "fig99", tmp_path / "s.py")

    def test_empty_csv_rejected_without_output(self, tmp_path):
        csv_path = tmp_path / "empty.csv"
        csv_path.write_text("")
        target = tmp_path / "s.py"
        with pytest.raises(SchemaError):
            emit_plot_script(csv_path, "fig4", target)
        assert not target.exists()

    def test_header_only_csv_rejected(self, tmp_path):
        csv_path = tmp_path / "h.csv"
        csv_path.write_text("snr_db,r1_bound,regime\n")
        with pytest.raises(SchemaError, match="no data rows"):
            emit_plot_script(csv_path, "fig4", tmp_path / "s.py")

    def test_schema_mismatch_rejected(self, tmp_path):
        csv_path = tmp_path / "m.csv"
        csv_path.write_text("a,b\n1,2\n")
        with pytest.raises(SchemaError, match="missing column"):
            emit_plot_script(csv_path, "fig4", tmp_path / "s.py")

    def test_five_curve_sweep_script_runs(self, tmp_path):
        # golden tiny sweep carries SUD, three MUD columns and S2
        script = tmp_path / "plot_five.py"
        emit_plot_script(DATA / "golden_tiny_sweep.csv", "fig5", script)
        proc = subprocess.run(
            [sys.executable, str(script)], capture_output=True, text=True, cwd=tmp_path
        )
        assert proc.returncode == 0, proc.stderr
        assert (tmp_path / "plot_five.png").exists()

    def test_fig4_script_runs(self, tmp_path):
        csv_path = tmp_path / "g.csv"
        code = main([
            "gaussian", "--snr-grid=-5,0,5", "--out", str(csv_path), "--no-fig",
        ])
        assert code == 0
        script = tmp_path / "plot_g.py"
        emit_plot_script(csv_path, "fig4", script)
        proc = subprocess.run(
            [sys.executable, str(script)], capture_output=True, text=True, cwd=tmp_path
        )
        assert proc.returncode == 0, proc.stderr
        assert (tmp_path / "plot_g.png").exists()
