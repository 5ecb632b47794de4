import json
import os

import numpy as np

from chaoslab.cli import main


def run_cli(args, outdir):
    return main(args + ["--output-dir", str(outdir)])


def read(path):
    with open(path, "rb") as fh:
        return fh.read()


class TestDispatch:
    def test_no_arguments_usage(self, capsys):
        assert main([]) == 2

    def test_unknown_flag_usage(self, tmp_path):
        assert run_cli(["spectrum", "--bogus", "1"], tmp_path) == 2

    def test_precondition_exit_code(self, tmp_path):
        # omega outside the lattice window
        code = run_cli(["nls-sim", "--N", "7", "--omega", "1.0", "--steps", "10"],
                       tmp_path)
        assert code == 4

    def test_numeric_failure_exit_code(self, tmp_path):
        # kick the dashed-line model hard enough to blow up
        code = run_cli(["dashed-line", "--epsilon", "1.0", "--kick", "1e4",
                        "--dt", "0.05", "--steps", "200000"], tmp_path)
        assert code == 3

    def test_spectrum_benchmark_value(self, tmp_path):
        code = run_cli(["spectrum", "--khat", "-3,-2", "--p", "1,1",
                        "--gamma", "2,0", "--trunc", "50", "--refine"], tmp_path)
        assert code == 0
        doc = json.loads(read(tmp_path / "spectrum.json"))
        lam = complex(*doc["refined_normalized"])
        assert abs(lam - (0.2482230180411067 + 0.3517207645854475j)) < 1e-12
        assert (tmp_path / "eigenvalues.csv").exists()
        assert (tmp_path / "manifest.json").exists()

    def test_lax_jacobi_battery(self, tmp_path):
        code = run_cli(["lax-check", "--case", "jacobi", "--resolution", "64"],
                       tmp_path)
        assert code == 0
        doc = json.loads(read(tmp_path / "report.json"))
        assert doc["residuals"]["jacobi_max"] < 1e-10


class TestDeterminism:
    def test_identical_config_byte_identical_outputs(self, tmp_path):
        args = ["euler-sim", "--box", "4", "--steps", "100", "--sample-every",
                "25", "--rng-seed", "7"]
        a, b = tmp_path / "a", tmp_path / "b"
        assert run_cli(list(args), a) == 0
        assert run_cli(list(args), b) == 0
        assert read(a / "energy.csv") == read(b / "energy.csv")
        assert read(a / "final_state.json") == read(b / "final_state.json")
        # the manifest carries wall-clock timings and is excluded from the
        # byte-identical guarantee; its config must still match
        ma = json.loads(read(a / "manifest.json"))
        mb = json.loads(read(b / "manifest.json"))
        assert ma["config"] == mb["config"]

    def test_different_seed_changes_outputs(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run_cli(["euler-sim", "--box", "4", "--steps", "50", "--rng-seed", "1"], a)
        run_cli(["euler-sim", "--box", "4", "--steps", "50", "--rng-seed", "2"], b)
        assert read(a / "energy.csv") != read(b / "energy.csv")


class TestConfigFiles:
    def test_flat_config_supplies_defaults(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("omega = 0.9\nalpha = 1.0\nbeta = 3.0\nepsilon = 0.02\n")
        out = tmp_path / "out"
        code = main(["nls-saddle", "--config", str(cfg),
                     "--output-dir", str(out)])
        assert code == 0
        doc = json.loads(read(out / "manifest.json"))
        assert doc["config"]["omega"] == 0.9
        assert doc["config"]["epsilon"] == 0.02

    def test_explicit_flags_override_config(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("omega = 0.9\n")
        out = tmp_path / "out"
        code = main(["nls-saddle", "--config", str(cfg), "--omega", "0.7",
                     "--output-dir", str(out)])
        assert code == 0
        doc = json.loads(read(out / "manifest.json"))
        assert doc["config"]["omega"] == 0.7

    def test_unknown_keys_rejected(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("not_a_flag = 3\n")
        assert main(["nls-saddle", "--config", str(cfg),
                     "--output-dir", str(tmp_path / "o")]) == 4

    def test_manifest_roundtrip_reproduces_outputs(self, tmp_path):
        a = tmp_path / "a"
        assert run_cli(["euler-sim", "--box", "4", "--steps", "60",
                        "--sample-every", "20", "--rng-seed", "3"], a) == 0
        b = tmp_path / "b"
        code = main(["euler-sim", "--config", str(a / "manifest.json"),
                     "--output-dir", str(b)])
        assert code == 0
        assert read(a / "energy.csv") == read(b / "energy.csv")
        assert read(a / "final_state.json") == read(b / "final_state.json")

    def test_chaotic_demo_config_parses(self, tmp_path):
        # the recorded chaotic regime must stay loadable; run a short prefix
        cfg_path = os.path.join(os.path.dirname(__file__), "..", "configs",
                                "chaotic_demo.cfg")
        out = tmp_path / "out"
        code = main(["nls-sim", "--config", cfg_path, "--steps", "2000",
                     "--sample-every", "100", "--output-dir", str(out)])
        assert code == 0
        doc = json.loads(read(out / "manifest.json"))
        assert doc["config"]["omega"] == 3.35
        assert doc["config"]["encode"] is True
        assert (out / "symbols.txt").exists()


class TestOutputs:
    def test_nls_sim_outputs(self, tmp_path):
        code = run_cli(["nls-sim", "--N", "8", "--omega", "3.5", "--beta", "4.0",
                        "--steps", "500", "--sample-every", "100", "--encode"],
                       tmp_path)
        assert code == 0
        header = read(tmp_path / "trajectory.csv").decode().splitlines()[0]
        assert header.split(",")[:2] == ["t", "re_q0"]
        saddle = json.loads(read(tmp_path / "saddle.json"))
        assert len(saddle["eigenvalues"]) == 10  # 2(M+1) with M = 4

    def test_darboux_report(self, tmp_path):
        assert run_cli(["darboux", "--c", "0.2"], tmp_path) == 0
        doc = json.loads(read(tmp_path / "report.json"))
        assert doc["residuals"]["transformed_kernel"] < 1e-8

    def test_darboux_custom_file(self, tmp_path):
        from chaoslab.darboux import shear_power_construction
        omega, psi, p, f, F = shear_power_construction(0.25, 32)
        spec_file = tmp_path / "fields.json"
        spec_file.write_text(json.dumps({
            "omega": omega.values.tolist(), "psi": psi.values.tolist(),
            "p": p.values.tolist(), "f": f.values.tolist(),
            "F": F.values.tolist()}))
        code = run_cli(["darboux", "--construction", "custom-file",
                        "--custom-file", str(spec_file)], tmp_path)
        assert code == 0
        doc = json.loads(read(tmp_path / "report.json"))
        assert doc["residuals"]["transformed_kernel"] < 1e-8

    def test_output_dir_env_default(self, tmp_path, monkeypatch):
        target = tmp_path / "envout"
        monkeypatch.setenv("CHAOSLAB_OUTDIR", str(target))
        assert main(["nls-saddle", "--omega", "0.8"]) == 0
        assert (target / "saddle.json").exists()

    def test_shadow_report(self, tmp_path):
        assert run_cli(["shadow", "--map", "dashed-line", "--word", "010",
                        "--m", "6"], tmp_path) == 0
        doc = json.loads(read(tmp_path / "report.json"))
        assert "delta" in doc and np.isfinite(doc["delta"])
