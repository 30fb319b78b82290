import json
import math

import numpy as np
import pytest

from klsregion.cli import main


def read_csv(path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    rows = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    return header, rows


def hb(x):
    if x <= 0 or x >= 1:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


class TestRegionCommand:
    def test_hsm_generated_csv(self, tmp_path):
        out = tmp_path / "hsm.csv"
        code = main(
            [
                "region", "--kind", "hsm-generated",
                "--p-e", "0.03", "--p-d", "0.10", "--m-d", "1",
                "-o", str(out),
            ]
        )
        assert code == 0
        header, rows = read_csv(out)
        assert header == ["param", "r_s", "r_l", "r_m"]
        assert rows.shape == (512, 4)
        assert rows[0, 1:] == pytest.approx([0.4592, 0.3464, 0.5408], abs=1e-3)
        assert np.all(np.diff(rows[:, 0]) > 0)
        assert np.isfinite(rows).all()
        manifest = json.loads((tmp_path / "hsm.csv.manifest.json").read_text())
        assert manifest["command"] == "region"
        assert manifest["parameters"]["p_e"] == 0.03
        assert "tool_version" in manifest and "seed" in manifest

    def test_vsm_leakage_equals_storage(self, tmp_path):
        out = tmp_path / "vsm.csv"
        assert main(
            ["region", "--kind", "vsm", "--p-e", "0.03", "--p-d", "0.10",
             "--m-d", "1", "-o", str(out)]
        ) == 0
        _, rows = read_csv(out)
        assert np.array_equal(rows[:, 2], rows[:, 3])

    def test_noiseless_encoder_has_equal_columns(self, tmp_path):
        out = tmp_path / "h0.csv"
        assert main(
            ["region", "--kind", "hsm-generated", "--p-e", "0", "--p-d", "0.10",
             "--m-d", "1", "-o", str(out)]
        ) == 0
        _, rows = read_csv(out)
        assert rows[:, 2] == pytest.approx(rows[:, 3], abs=1e-12)

    def test_rerun_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["region", "--kind", "hsm-chosen", "--p-e", "0.1", "--p-d", "0.1",
                "--m-d", "2", "--grid", "64"]
        assert main(args + ["-o", str(out1)]) == 0
        assert main(args + ["-o", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_missing_inline_params_is_input_error(self, tmp_path, capsys):
        code = main(["region", "--kind", "vsm", "-o", str(tmp_path / "x.csv")])
        assert code == 2
        assert "--p-e" in capsys.readouterr().err

    def test_generic_model_file(self, tmp_path):
        model = {
            "q_x": [0.5, 0.5],
            "enc": [{"type": "bsc", "p": 0.03}],
            "dec": [{"type": "bsc", "p": 0.10}],
            "kind": "hidden",
        }
        path = tmp_path / "model.json"
        path.write_text(json.dumps(model))
        out = tmp_path / "gen.csv"
        assert main(
            ["region", "--kind", "hsm-generated", "--model", str(path), "-o", str(out)]
        ) == 0
        _, rows = read_csv(out)
        assert rows.shape[1] == 4
        # weight indices ascend; the best key rate reaches the closed form
        assert np.all(np.diff(rows[:, 0]) == 1)
        assert rows[:, 1].max() == pytest.approx(1 - hb(0.124), abs=1e-3)

    def test_invalid_model_file_names_field(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"q_x": [0.5, 0.5], "enc": [], "dec": [], "kind": "hidden"}))
        code = main(
            ["region", "--kind", "hsm-generated", "--model", str(path),
             "-o", str(tmp_path / "x.csv")]
        )
        assert code == 2
        assert "enc" in capsys.readouterr().err

    def test_model_with_vsm_kind_rejected(self, tmp_path, capsys):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({
            "q_x": [0.5, 0.5], "enc": [{"type": "bsc", "p": 0.1}],
            "dec": [{"type": "bsc", "p": 0.1}], "kind": "hidden",
        }))
        assert main(
            ["region", "--kind", "vsm", "--model", str(path), "-o", str(tmp_path / "x.csv")]
        ) == 2

    def test_size_guard_exit_code(self, tmp_path, capsys):
        path = tmp_path / "big.json"
        path.write_text(json.dumps({
            "q_x": [0.5, 0.5],
            "enc": [{"type": "bsc", "p": 0.1}] * 13,
            "dec": [{"type": "bsc", "p": 0.1}] * 12,
            "kind": "hidden",
        }))
        code = main(
            ["region", "--kind", "hsm-generated", "--model", str(path),
             "-o", str(tmp_path / "x.csv")]
        )
        assert code == 3


class TestCompareCommand:
    def test_hsm_vsm_single_measurement(self, capsys):
        assert main(
            ["compare", "--hsm-vsm", "--p-e", "0.03", "--p-d", "0.10", "--m-d", "1"]
        ) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["delta_pct"]["r_l"] == pytest.approx(-36, abs=2)
        assert report["delta_pct"]["r_s"] == pytest.approx(0, abs=1e-9)

    def test_hsm_vsm_three_measurements(self, capsys):
        assert main(
            ["compare", "--hsm-vsm", "--p-e", "0.03", "--p-d", "0.10", "--m-d", "3"]
        ) == 0
        report = json.loads(capsys.readouterr().out)
        # the hidden model's key rate sits below the visible estimate
        assert report["delta_pct"]["r_s"] == pytest.approx(-12.1, abs=2)
        assert report["a"]["corner"]["r_m"] > report["b"]["corner"]["r_m"]

    def test_self_comparison_zero(self, capsys):
        assert main(
            ["compare", "--p-e", "0.03", "--p-d", "0.10", "--m-d", "1",
             "--p-e2", "0.03", "--p-d2", "0.10", "--m-d2", "1"]
        ) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["delta_pct"] == {"r_s": 0.0, "r_l": 0.0, "r_m": 0.0}

    def test_two_sets_encoder_noise_sensitivity(self, capsys):
        assert main(
            ["compare", "--p-e", "0.10", "--p-d", "0.10", "--m-d", "1",
             "--p-e2", "0.03", "--p-d2", "0.10", "--m-d2", "1"]
        ) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["delta_pct"]["r_s"] == pytest.approx(-30, abs=2)
        assert report["delta_pct"]["r_l"] == pytest.approx(-39, abs=2)
        assert report["delta_pct"]["r_m"] == pytest.approx(26, abs=2)

    def test_output_file_with_manifest(self, tmp_path):
        out = tmp_path / "cmp.json"
        assert main(
            ["compare", "--hsm-vsm", "--p-e", "0.03", "--p-d", "0.10", "--m-d", "1",
             "-o", str(out)]
        ) == 0
        assert json.loads(out.read_text())["a"]["label"] == "hsm"
        assert (tmp_path / "cmp.json.manifest.json").exists()

    def test_incomplete_second_set_rejected(self, capsys):
        assert main(
            ["compare", "--p-e", "0.03", "--p-d", "0.10", "--m-d", "1",
             "--p-e2", "0.10"]
        ) == 2


class TestCornerCommand:
    def test_matches_region_first_row(self, tmp_path, capsys):
        out = tmp_path / "r.csv"
        assert main(
            ["region", "--kind", "hsm-generated", "--p-e", "0.03", "--p-d", "0.10",
             "--m-d", "1", "-o", str(out)]
        ) == 0
        _, rows = read_csv(out)
        assert main(
            ["corner", "--p-e", "0.03", "--m-e", "1", "--p-d", "0.10", "--m-d", "1"]
        ) == 0
        corner = json.loads(capsys.readouterr().out)["corner"]
        assert [corner["r_s"], corner["r_l"], corner["r_m"]] == pytest.approx(
            rows[0, 1:], abs=1e-9
        )

    def test_multi_encoder_storage_growth(self, capsys):
        assert main(
            ["corner", "--p-e", "0.03", "--m-e", "3", "--p-d", "0.10", "--m-d", "3"]
        ) == 0
        corner = json.loads(capsys.readouterr().out)["corner"]
        assert corner["r_m"] == pytest.approx(0.7171, abs=1e-3)

    def test_size_guard(self, capsys):
        assert main(
            ["corner", "--p-e", "0.03", "--m-e", "13", "--p-d", "0.10", "--m-d", "12"]
        ) == 3


class TestExportFigures:
    def test_default_datasets(self, tmp_path):
        outdir = tmp_path / "figs"
        assert main(["export-figures", "--outdir", str(outdir), "--grid", "32"]) == 0
        names = sorted(p.name for p in outdir.iterdir())
        assert "manifest.json" in names
        # 8 boundary curves per boundary figure, 4 corner files per corner figure
        assert sum(n.startswith("fig3_") for n in names) == 8
        assert sum(n.startswith("fig4_") for n in names) == 8
        assert sum(n.startswith("fig5_") for n in names) == 4
        assert sum(n.startswith("fig6_") for n in names) == 4
        manifest = json.loads((outdir / "manifest.json").read_text())
        assert manifest["parameters"]["p_e"] == [0.03, 0.10]
        assert manifest["parameters"]["m_e"] == [1, 2, 3]

    def test_vsm_files_have_equal_leakage_and_storage(self, tmp_path):
        outdir = tmp_path / "figs"
        assert main(["export-figures", "--outdir", str(outdir), "--grid", "16"]) == 0
        for path in outdir.glob("fig3_vsm_*.csv"):
            _, rows = read_csv(path)
            assert np.array_equal(rows[:, 2], rows[:, 3])

    def test_rerun_byte_identical(self, tmp_path):
        d1, d2 = tmp_path / "one", tmp_path / "two"
        for d in (d1, d2):
            assert main(["export-figures", "--outdir", str(d), "--grid", "16"]) == 0
        for p1 in sorted(d1.iterdir()):
            p2 = d2 / p1.name
            if p1.name == "manifest.json":
                # outdir is recorded, so compare with the path normalized
                m1 = json.loads(p1.read_text())
                m2 = json.loads(p2.read_text())
                m1["parameters"].pop("outdir"), m2["parameters"].pop("outdir")
                assert m1 == m2
            else:
                assert p1.read_bytes() == p2.read_bytes()


class TestThreadCap:
    def test_invalid_cap_rejected(self, monkeypatch, tmp_path, capsys):
        monkeypatch.setenv("KLS_THREADS", "zero")
        code = main(
            ["region", "--kind", "vsm", "--p-e", "0.1", "--p-d", "0.1", "--m-d", "1",
             "-o", str(tmp_path / "x.csv")]
        )
        assert code == 2
        assert "KLS_THREADS" in capsys.readouterr().err

    def test_valid_cap_accepted(self, monkeypatch, tmp_path):
        monkeypatch.setenv("KLS_THREADS", "2")
        assert main(
            ["region", "--kind", "vsm", "--p-e", "0.1", "--p-d", "0.1", "--m-d", "1",
             "--grid", "8", "-o", str(tmp_path / "x.csv")]
        ) == 0
