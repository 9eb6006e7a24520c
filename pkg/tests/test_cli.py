"""Tests for the command-line front end."""

import pytest

from onebit_ci import read_csv
from onebit_ci.cli import (
    EXIT_CONFIG,
    EXIT_OK,
    _parse_snr,
    main,
)

RUN_TINY = [
    "run", "--nt", "4", "--k", "2", "--mod", "4", "--snr", "0,10",
    "--trials", "2", "--spc", "2", "--seed", "7", "--schemes", "zf,ci",
    "--no-timing",
]


class TestParseSnr:
    """SNR grid syntax."""

    def test_range_is_inclusive(self):
        assert _parse_snr("0:32:4") == tuple(float(s) for s in range(0, 33, 4))

    def test_comma_list(self):
        assert _parse_snr("0,8,16") == (0.0, 8.0, 16.0)

    def test_single_value(self):
        assert _parse_snr("12") == (12.0,)

    @pytest.mark.parametrize("text", ["0:32", "0:32:4:2", "0:32:0", "0:32:-4", "10:0:4"])
    def test_rejects_malformed(self, text):
        with pytest.raises(ValueError):
            _parse_snr(text)


class TestRun:
    """The sweep subcommand."""

    def test_writes_csv(self, tmp_path, capsys):
        out = tmp_path / "r.csv"
        assert main(RUN_TINY + ["--out", str(out)]) == EXIT_OK
        assert "wrote" in capsys.readouterr().out
        rows = read_csv(out)
        assert len(rows) == 4
        assert {r["scheme"] for r in rows} == {"zf", "ci"}
        assert all(r["sent"] == 8 for r in rows)
        assert all(r["mean_solve_ms"] is None for r in rows)

    def test_config_file(self, tmp_path):
        cfg = tmp_path / "c.yaml"
        cfg.write_text(
            "n_t: 4\nk_users: 2\nmod_order: 4\nsnr_grid_db: [0]\n"
            "trials: 1\nsymbols_per_channel: 1\nschemes: [zf]\nseed: 1\n"
            "measure_time: false\n"
        )
        out = tmp_path / "r.csv"
        assert main(["run", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
        rows = read_csv(out)
        assert len(rows) == 1
        assert rows[0]["n_t"] == 4

    def test_flags_override_config(self, tmp_path):
        cfg = tmp_path / "c.yaml"
        cfg.write_text(
            "n_t: 4\nk_users: 2\nmod_order: 4\nsnr_grid_db: [0]\n"
            "trials: 1\nsymbols_per_channel: 1\nschemes: [zf]\nseed: 1\n"
            "measure_time: false\n"
        )
        out = tmp_path / "r.csv"
        code = main(["run", "--config", str(cfg), "--trials", "3", "--out", str(out)])
        assert code == EXIT_OK
        assert read_csv(out)[0]["sent"] == 6

    def test_unknown_scheme_is_config_error(self, tmp_path):
        out = tmp_path / "r.csv"
        args = list(RUN_TINY)
        args[args.index("zf,ci")] = "zf,mrc"
        assert main(args + ["--out", str(out)]) == EXIT_CONFIG
        assert not out.exists()

    def test_missing_config_is_config_error(self, tmp_path):
        code = main(["run", "--config", str(tmp_path / "none.yaml")])
        assert code == EXIT_CONFIG

    def test_bad_flag_value_exits_with_config_code(self):
        with pytest.raises(SystemExit) as exc:
            main(["run", "--nt", "many"])
        assert exc.value.code == EXIT_CONFIG

    def test_unknown_subcommand_exits_with_config_code(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == EXIT_CONFIG


class TestPropCheck:
    """Saturation bound audit."""

    def test_small_audit_passes(self, capsys):
        assert main(["prop-check", "--instances", "8", "--seed", "3"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "0 saturation-bound violations" in out
        assert "checked 8" in out


class TestOracleCheck:
    """Branch-and-bound vs brute force."""

    def test_small_check_passes(self, capsys):
        code = main([
            "oracle-check", "--pbb-instances", "4", "--fbb-instances", "3",
            "--seed", "11",
        ])
        assert code == EXIT_OK
        assert "0 oracle mismatches" in capsys.readouterr().out


class TestPlot:
    """Figure rendering."""

    def test_svg_from_results(self, tmp_path):
        csv_path = tmp_path / "r.csv"
        fig_path = tmp_path / "ser.svg"
        assert main(RUN_TINY + ["--out", str(csv_path)]) == EXIT_OK
        assert main(["plot", "--csv", str(csv_path), "--out", str(fig_path)]) == EXIT_OK
        head = fig_path.read_text()[:500]
        assert "<svg" in head or "<?xml" in head

    def test_empty_csv_is_config_error(self, tmp_path):
        csv_path = tmp_path / "empty.csv"
        csv_path.write_text("scheme,snr_db,n_t,k,mod,errors,sent,ser,ci_halfwidth,mean_nodes,mean_solve_ms\n")
        code = main(["plot", "--csv", str(csv_path), "--out", str(tmp_path / "x.svg")])
        assert code == EXIT_CONFIG
