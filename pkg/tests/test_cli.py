import contextlib
import io as stdio
import json

import numpy as np
import pytest

from conftest import pvm_x, pvm_z, trine
from povmkit import DensityState, mix
from povmkit import io as pio
from povmkit.cli import main, parse_state


def run_cli(*argv):
    out = stdio.StringIO()
    err = stdio.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def trine_file(tmp_path):
    path = tmp_path / "trine.json"
    pio.save_povm(trine(), path)
    return str(path)


@pytest.fixture
def mixed_file(tmp_path):
    path = tmp_path / "mixed.json"
    pio.save_povm(mix(pvm_z(), pvm_x(), 0.5), path)
    return str(path)


class TestExitCodes:
    def test_validate_ok(self, trine_file):
        code, out, _ = run_cli("validate", trine_file)
        assert code == 0
        assert json.loads(out)["ok"] is True

    def test_assert_failure_is_exit_1(self, mixed_file):
        code, _, err = run_cli("extremal", mixed_file, "--assert", "extremal")
        assert code == 1
        assert "assertion failed" in err

    def test_assert_success(self, mixed_file):
        code, _, _ = run_cli("extremal", mixed_file, "--assert", "non-extremal")
        assert code == 0

    def test_bad_json_is_exit_2_with_location(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"effects": [[[1, 0]')
        code, _, err = run_cli("validate", str(path))
        assert code == 2
        assert "line" in err and "column" in err

    def test_missing_file_is_exit_2(self):
        code, _, err = run_cli("validate", "no-such-file.json")
        assert code == 2

    def test_unknown_command_is_exit_2(self):
        with pytest.raises(SystemExit) as exc:
            run_cli("frobnicate")
        assert exc.value.code == 2

    def test_invalid_povm_file_is_reported_not_crashed(self, tmp_path):
        path = tmp_path / "bad_povm.json"
        eye = pio.encode_matrix(np.eye(2) * 0.6)
        path.write_text(json.dumps({"dim": 2, "effects": [eye, eye]}))
        code, out, _ = run_cli("validate", str(path))
        assert code == 0
        report = json.loads(out)
        assert report["ok"] is False
        assert report["residuals"]["normalization"] == pytest.approx(0.2)
        # but analysis commands require a valid POVM
        code, _, err = run_cli("extremal", str(path))
        assert code == 2


class TestCommands:
    def test_dilate(self, trine_file):
        code, out, _ = run_cli("dilate", trine_file)
        payload = json.loads(out)
        assert code == 0
        assert payload["fiber_dims"] == [1, 1, 1]
        assert payload["total_dim"] == 3
        assert len(payload["coherent_vectors"]) == 3

    def test_decompose_writes_valid_halves(self, mixed_file, tmp_path):
        prefix = str(tmp_path / "split")
        code, out, _ = run_cli("decompose", mixed_file, "--output", prefix)
        assert code == 0
        payload = json.loads(out)
        assert payload["average_residual"] < 1e-10
        assert payload["components_differ_by"] > 1e-6
        for side in ("plus", "minus"):
            sub_code, sub_out, _ = run_cli("validate", payload[side])
            assert sub_code == 0 and json.loads(sub_out)["ok"]

    def test_decompose_refuses_extremal(self, trine_file, tmp_path):
        code, _, err = run_cli("decompose", trine_file, "--output", str(tmp_path / "x"))
        assert code == 2
        assert "extremal" in err

    def test_ic(self, trine_file):
        code, out, _ = run_cli("ic", trine_file, "--assert", "not-ic")
        assert code == 0
        assert json.loads(out)["informationally_complete"] is False

    def test_sample_deterministic(self, trine_file, tmp_path):
        rho_path = tmp_path / "rho.json"
        pio.save_state(DensityState.maximally_mixed(2), rho_path)
        code1, out1, _ = run_cli("sample", trine_file, "--rho", str(rho_path),
                                 "--shots", "500", "--seed", "9")
        code2, out2, _ = run_cli("sample", trine_file, "--rho", str(rho_path),
                                 "--shots", "500", "--seed", "9")
        assert code1 == code2 == 0
        assert out1 == out2
        assert sum(json.loads(out1)["counts"]) == 500

    def test_phase_q_csv(self, tmp_path):
        out_path = tmp_path / "q.csv"
        code, _, _ = run_cli("phase-q", "--state", "h0", "--cutoff", "16",
                             "--extent", "1", "--step", "0.5", "--output", str(out_path))
        assert code == 0
        lines = out_path.read_text().splitlines()
        assert lines[0] == "re_z,im_z,value_re,value_im"
        assert len(lines) == 1 + 5 * 5
        row = dict(zip(lines[0].split(","), lines[13].split(",")))
        assert float(row["re_z"]) == 0.0 and float(row["im_z"]) == 0.0
        assert float(row["value_re"]) == pytest.approx(1.0)

    def test_phase_char_stdout(self):
        code, out, _ = run_cli("phase-char", "--state", "h1", "--cutoff", "16",
                               "--extent", "1", "--step", "1")
        assert code == 0
        assert out.splitlines()[0] == "re_z,im_z,value_re,value_im"

    def test_phase_scan_h1(self):
        code, out, _ = run_cli("phase-scan", "--state", "h1", "--cutoff", "32",
                               "--extent", "4", "--step", "0.05")
        assert code == 0
        verdict = json.loads(out)
        assert verdict["consistent_with_extremal"] is False
        radii = [abs(complex(re, im)) for re, im in verdict["zero_loci"]]
        assert radii and max(abs(r - 1) for r in radii) < 1e-3

    def test_phase_scan_assert(self):
        code, _, _ = run_cli("phase-scan", "--state", "coherent:1,0.5", "--cutoff", "32",
                             "--extent", "2", "--step", "0.1",
                             "--assert", "consistent-with-extremal")
        assert code == 0

    def test_phase_fourier(self):
        code, out, _ = run_cli("phase-fourier", "--state", "h1", "--cutoff", "32",
                               "--extent", "8", "--step", "0.1",
                               "--wextent", "1", "--wstep", "1")
        assert code == 0
        rows = out.splitlines()[1:]
        assert len(rows) == 9
        center = [r for r in rows if r.startswith("0,0,")][0]
        assert float(center.split(",")[2]) == pytest.approx(1.0, abs=1e-6)

    def test_phase_verify_h1(self):
        code, out, _ = run_cli("phase-verify-h1")
        assert code == 0
        report = json.loads(out)
        assert report["max_residual"] < 1e-6
        assert report["ok"] is True

    def test_phase_discretize(self, tmp_path):
        out_path = tmp_path / "m0.json"
        code, out, _ = run_cli("phase-discretize", "--state", "h0", "--cutoff", "12",
                               "--extent", "6", "--step", "0.5", "--output", str(out_path))
        assert code == 0
        summary = json.loads(out)
        assert summary["validation"]["ok"] is True
        sub_code, sub_out, _ = run_cli("validate", str(out_path))
        assert sub_code == 0 and json.loads(sub_out)["ok"]

    def test_covariant_workflow(self, tmp_path):
        seed_path = tmp_path / "seed.json"
        seed_path.write_text(json.dumps(
            {"seed": pio.encode_matrix(np.array([[0.5, 0.5], [0.5, 0.5]]))}
        ))
        cov_path = tmp_path / "cov.json"
        code, out, _ = run_cli("covariant-build", "--group-order", "2", "--labels", "0,1",
                               "--seed", str(seed_path), "--output", str(cov_path))
        assert code == 0
        assert json.loads(out)["covariance_residual"] < 1e-12
        code, out, _ = run_cli("covariant-check", str(cov_path), "--assert", "covariant")
        assert code == 0
        code, out, _ = run_cli("covariant-extremal", str(cov_path), "--assert", "extremal")
        assert code == 0
        assert json.loads(out)["rank"] == 1

    def test_covariant_build_bad_seed(self, tmp_path):
        seed_path = tmp_path / "seed.json"
        seed_path.write_text(json.dumps({"seed": pio.encode_matrix(np.diag([1.0, 0.0]))}))
        code, _, err = run_cli("covariant-build", "--group-order", "2", "--labels", "0,1",
                               "--seed", str(seed_path))
        assert code == 2
        assert "character" in err


def test_every_subcommand_has_help():
    from povmkit.cli import build_parser

    parser = build_parser()
    subparsers = next(
        a for a in parser._actions if isinstance(a, type(parser._subparsers._group_actions[0]))
    )
    names = list(subparsers.choices)
    assert len(names) == 15
    for name in names:
        with pytest.raises(SystemExit) as exc:
            run_cli(name, "--help")
        assert exc.value.code == 0


class TestStateParsing:
    def test_named_states(self):
        assert parse_state("h3", 8).coeffs[3] == 1.0
        eta = parse_state("coherent:1,0.5", 32)
        assert abs(np.linalg.norm(eta.coeffs) - 1) < 1e-12
        sq = parse_state("squeezed:0.5,0,0,0", 32)
        assert abs(sq.coeffs[1]) < 1e-14

    def test_bad_spec_rejected(self):
        code, _, err = run_cli("phase-q", "--state", "wat:1", "--extent", "1", "--step", "1")
        assert code == 2
        assert "state" in err
