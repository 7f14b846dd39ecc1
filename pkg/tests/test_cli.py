"""CLI exit codes, CSV schemas, config handling and determinism."""

import os
from pathlib import Path

from kclab.cli import EXIT_OK, EXIT_USAGE, main


def run(args):
    return main(args)


def read(path: Path) -> str:
    return path.read_text(encoding="utf-8")


def test_membership_pass_and_csv(tmp_path):
    out = tmp_path / "m"
    assert run(["membership", "--alpha", "0.5", "--beta", "1",
                "--out", str(out)]) == EXIT_OK
    csv = read(out / "membership.csv").splitlines()
    assert csv[0] == "alpha,beta,function,domain_alpha,verdict,expected"
    assert len(csv) == 5
    assert all("indeterminate" not in line for line in csv)
    assert (out / "run_summary.txt").exists()


def test_membership_order_violation_exit2(tmp_path):
    assert run(["membership", "--alpha", "1", "--beta", "1",
                "--out", str(tmp_path)]) == EXIT_USAGE


def test_membership_alpha0_beta2(tmp_path):
    assert run(["membership", "--alpha", "0", "--beta", "2",
                "--out", str(tmp_path)]) == EXIT_OK


def test_growth_writes_csv_per_alpha(tmp_path):
    out = tmp_path / "g"
    assert run(["growth", "--alpha", "0,1,2", "--k", "2..64",
                "--out", str(out)]) == EXIT_OK
    for a in ("0", "1", "2"):
        lines = read(out / f"growth_alpha{a}.csv").splitlines()
        assert lines[0] == ("alpha,k,norm_estimate,paper_lower_bound,"
                            "sqrt_variant_bound,fitted_exponent")
        # aggregate fitted exponent only on the last row
        body = [l.split(",") for l in lines[1:]]
        assert all(row[5] == "" for row in body[:-1])
        assert body[-1][5] != ""
    summary = read(out / "run_summary.txt")
    assert "alpha_0_classification = regular" in summary
    assert "alpha_2_classification = singular" in summary


def test_growth_alpha_out_of_range_exit2(tmp_path):
    assert run(["growth", "--alpha", "3", "--out", str(tmp_path)]) == EXIT_USAGE


def test_growth_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run(["growth", "--alpha", "1", "--k", "2..32", "--out", str(a), "--seed", "5"])
    run(["growth", "--alpha", "1", "--k", "2..32", "--out", str(b), "--seed", "5"])
    assert read(a / "growth_alpha1.csv") == read(b / "growth_alpha1.csv")


def test_contour_report(tmp_path):
    out = tmp_path / "c"
    assert run(["contour", "--seeds", "2", "--out", str(out)]) == EXIT_OK
    lines = read(out / "contour_report.csv").splitlines()
    assert lines[0] == "seed,property,measured,tolerance,status"
    assert all(line.endswith("pass") for line in lines[1:])
    heat = read(out / "contour_projection.csv").splitlines()
    assert heat[0] == "i,j,value"
    assert len(heat) == 1 + 8 * 8


def test_sl_outputs(tmp_path):
    out = tmp_path / "s"
    assert run(["sl", "--mesh", "256", "--pairs", "8",
                "--out", str(out)]) == EXIT_OK
    eig = read(out / "eigenvalues.csv").splitlines()
    assert eig[0] == "n,lambda,residual"
    coef = read(out / "coefficients.csv").splitlines()
    assert coef[0] == "n,lambda,c_n"
    traj = read(out / "trajectories.csv").splitlines()
    assert traj[0] == "m,norm_S,norm_S_plus,norm_S_minus"
    assert "np.float64" not in read(out / "trajectories.csv")


def test_verify_named_suite(tmp_path):
    out = tmp_path / "v"
    assert run(["verify", "--suite", "lemma-6.1", "--out", str(out)]) == EXIT_OK
    lines = read(out / "verify_lemma-6_1.csv").splitlines()
    assert lines[0] == "suite,check,measured,tolerance,status"


def test_verify_unknown_suite_exit2(tmp_path):
    assert run(["verify", "--suite", "lemma-9.9",
                "--out", str(tmp_path)]) == EXIT_USAGE


def test_verify_thm21_with_small_params(tmp_path):
    assert run(["verify", "--suite", "thm-2.1", "--n", "8", "--seeds", "2",
                "--out", str(tmp_path)]) == EXIT_OK


def test_config_file_roundtrip(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("weight.epsilon = 1.0\n"
                   "weight.tail_power = 0.0\n"
                   "quadrature.rel_tol = 1e-8\n"
                   "alphas = 0,1\n"
                   "seed = 3\n")
    out = tmp_path / "o"
    assert run(["growth", "--config", str(cfg), "--k", "2..16",
                "--out", str(out)]) == EXIT_OK
    assert (out / "growth_alpha0.csv").exists()
    assert (out / "growth_alpha1.csv").exists()


def test_config_unknown_key_rejected(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("weight.epsilon = 1.0\nmystery.knob = 4\n")
    assert run(["growth", "--config", str(cfg),
                "--out", str(tmp_path)]) == EXIT_USAGE


def test_config_hash_stable(tmp_path):
    out1, out2 = tmp_path / "h1", tmp_path / "h2"
    run(["membership", "--alpha", "0", "--beta", "1", "--out", str(out1)])
    run(["membership", "--alpha", "0", "--beta", "1", "--out", str(out2)])
    h1 = read(out1 / "run_summary.txt").splitlines()[0]
    h2 = read(out2 / "run_summary.txt").splitlines()[0]
    assert h1 == h2 and h1.startswith("config_hash = ")


def test_kcl_threads_env_does_not_change_output(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    old = os.environ.get("KCL_THREADS")
    try:
        os.environ["KCL_THREADS"] = "1"
        run(["growth", "--alpha", "0.5,1", "--k", "2..32", "--out", str(a)])
        os.environ["KCL_THREADS"] = "4"
        run(["growth", "--alpha", "0.5,1", "--k", "2..32", "--out", str(b)])
    finally:
        if old is None:
            os.environ.pop("KCL_THREADS", None)
        else:
            os.environ["KCL_THREADS"] = old
    assert read(a / "growth_alpha1.csv") == read(b / "growth_alpha1.csv")
