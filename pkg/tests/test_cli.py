import subprocess
import sys

CLI = [sys.executable, "-m", "eatkit"]


def run_cli(*args, **kw):
    return subprocess.run(CLI + list(args), capture_output=True, text=True, **kw)


def test_variance_curve(tmp_path):
    out = tmp_path / "v.csv"
    res = run_cli("variance-curve", "--steps", "1000", "--out", str(out))
    assert res.returncode == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "q,v"
    assert len(lines) == 1000  # header + 999 interior grid points
    rows = [line.split(",") for line in lines[1:]]
    qs = [float(q) for q, _ in rows]
    vs = [float(v) for _, v in rows]
    peak = max(range(len(vs)), key=vs.__getitem__)
    assert abs(qs[peak] - 0.083) <= 0.002
    assert abs(vs[peak] - 0.9142) <= 1e-3
    assert vs[qs.index(0.5)] == 0.0
    assert all(abs(a - b) < 1e-9 for a, b in zip(vs, reversed(vs)))  # symmetry
    assert "RESULT peak_q=" in res.stdout


def test_variance_curve_rejects_bad_steps(tmp_path):
    res = run_cli("variance-curve", "--steps", "1", "--out", str(tmp_path / "v.csv"))
    assert res.returncode == 2
    assert "--steps" in res.stderr


def test_rate_curve_two_points(tmp_path):
    out = tmp_path / "r.csv"
    res = run_cli("rate-curve", "--points", "2", "--n-min", "1e6", "--n-max", "1e8",
                  "--out", str(out))
    assert res.returncode == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "n,gamma,rate,alpha_star,p_b"
    assert len(lines) == 3
    assert lines[1].startswith("1000000,")
    assert lines[2].startswith("100000000,")


def test_rate_curve_deterministic(tmp_path):
    args = ("rate-curve", "--points", "3", "--n-min", "1e6", "--n-max", "1e8",
            "--gamma", "0.1")
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli(*args, "--out", str(out1)).returncode == 0
    assert run_cli(*args, "--out", str(out2)).returncode == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_rate_curve_multiple_gammas(tmp_path):
    out = tmp_path / "r.csv"
    res = run_cli("rate-curve", "--points", "2", "--gamma", "1", "--gamma", "0.1",
                  "--n-min", "1e8", "--n-max", "1e9", "--out", str(out))
    assert res.returncode == 0
    lines = out.read_text().splitlines()[1:]
    assert len(lines) == 4
    gammas = [line.split(",")[1] for line in lines]
    assert gammas == ["1", "1", "0.1", "0.1"]


def test_rate_curve_default_grid(tmp_path):
    out = tmp_path / "r.csv"
    res = run_cli("rate-curve", "--out", str(out))
    assert res.returncode == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 21  # header + 20 default grid points
    rates = [float(line.split(",")[2]) for line in lines[1:]]
    assert all(rate < 0.3461 for rate in rates)
    assert rates[-1] > 0.3


def test_csv_formatting_contract(tmp_path):
    out = tmp_path / "r.csv"
    run_cli("rate-curve", "--points", "2", "--n-min", "1e7", "--n-max", "1e8",
            "--out", str(out))
    raw = out.read_bytes()
    assert b"\r" not in raw  # '\n' line endings only
    rate_field = raw.decode().splitlines()[1].split(",")[2]
    digits = sum(ch.isdigit() for ch in rate_field)
    assert digits >= 12  # precision contract
    assert "," not in rate_field and "." in rate_field


def test_rate_curve_rejects_bad_e(tmp_path):
    res = run_cli("rate-curve", "--e", "0.9", "--out", str(tmp_path / "r.csv"))
    assert res.returncode == 2
    assert "--e" in res.stderr


def test_bound_reports_log33():
    res = run_cli("bound", "--n", "1000000", "--h", "0.5", "--d-a", "4", "--classical-a")
    assert res.returncode == 0
    assert "log2(33)" in res.stdout
    results = dict(
        line.split(" ", 1)[1].split("=", 1)
        for line in res.stdout.splitlines()
        if line.startswith("RESULT ")
    )
    assert float(results["optimized_bound"]) >= float(results["theorem_bound"])
    assert results["small_n"] == "false"


def test_bound_fixed_alpha():
    res = run_cli("bound", "--n", "1000000", "--h", "0.5", "--alpha", "1.2")
    assert res.returncode == 0
    assert "RESULT bound_alpha=" in res.stdout
    assert "RESULT optimized_bound=" not in res.stdout


def test_bound_small_n_flag():
    res = run_cli("bound", "--n", "10", "--h", "0.5")
    assert res.returncode == 0
    assert "RESULT small_n=true" in res.stdout


def test_bound_rejects_bad_alpha():
    res = run_cli("bound", "--n", "100", "--h", "0.5", "--alpha", "2.5")
    assert res.returncode == 2
    assert "--alpha" in res.stderr


def test_verify_single_suite():
    res = run_cli("verify", "--suite", "additivity", "--trials", "5")
    assert res.returncode == 0
    assert "suite additivity: passed=5 failed=0" in res.stdout
    assert "RESULT total_failed=0" in res.stdout


def test_verify_deterministic():
    args = ("verify", "--suite", "nussbaum-szkola", "--trials", "5", "--seed", "7")
    a, b = run_cli(*args), run_cli(*args)
    assert a.stdout == b.stdout
    assert a.returncode == b.returncode == 0


def test_verify_unknown_suite():
    res = run_cli("verify", "--suite", "nope")
    assert res.returncode == 2
    assert "--suite" in res.stderr


def test_verify_all_suites_quick():
    res = run_cli("verify", "--trials", "3")
    assert res.returncode == 0
    assert "RESULT suites=16" in res.stdout
