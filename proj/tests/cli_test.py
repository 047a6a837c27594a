"""End-to-end checks of the nmloc command line tool; one case per invocation."""
import argparse
import csv
import json
import pathlib
import subprocess
import sys
import tempfile


def run(cli, *args):
    return subprocess.run([cli, *args], capture_output=True, text=True)


def expect(cond, msg):
    if not cond:
        print("FAILED:", msg)
        sys.exit(1)


def case_zero_coupling(a, tmp):
    p = run(a.cli, "run", "--config", str(a.configs / "maryland.json"), "--override", "hopping.epsilon=0",
            "--out-dir", str(tmp))
    expect(p.returncode == 0, f"exit {p.returncode}: {p.stderr}")
    r = json.loads((tmp / "report.json").read_text())
    expect(r["converged"] is True, "not converged")
    expect(all(e["norm"] == 0.0 for e in r["final_residual_norms"]), "nonzero residual")
    expect(all(e["norm"] == 0.0 for e in r["qplus_norms"]), "Q+ differs from identity")
    expect(r["dplus_norm"] == 0.0, "nonzero D+")
    expect(all(e["eigen_residual"] == 0.0 for e in r["localization"]["eigenreports"]), "nonzero eigen residual")


def case_ledger_rows(a, tmp):
    p = run(a.cli, "run", "--config", str(a.configs / "maryland.json"), "--out-dir", str(tmp))
    expect(p.returncode == 0, f"exit {p.returncode}: {p.stderr}")
    r = json.loads((tmp / "report.json").read_text())
    with open(tmp / "ledger.csv", newline="") as f:
        rows = list(csv.reader(f))
    header = rows[0]
    expect(header[:2] == ["k", "theta_k"], "header prefix")
    cols = [c for c in header[2:] if not c.startswith("margin:")]
    expect(header[2 + len(cols):] == ["margin:" + c for c in cols], "margin columns mirror value columns")
    expect(len(rows) - 1 == r["steps"], f"{len(rows) - 1} rows for {r['steps']} steps")
    expect(r["steps"] == 8, f"Maryland baseline step count changed: {r['steps']}")


def case_reproducible(a, tmp):
    outs = []
    for sub in ("a", "b"):
        d = tmp / sub
        p = run(a.cli, "run", "--config", str(a.configs / "maryland.json"), "--override", "box.radius=48",
                "--out-dir", str(d))
        expect(p.returncode == 0, f"exit {p.returncode}: {p.stderr}")
        outs.append(((d / "ledger.csv").read_bytes(), (d / "report.json").read_bytes()))
    expect(outs[0][0] == outs[1][0], "ledger CSV differs between identical runs")
    expect(outs[0][1] == outs[1][1], "report JSON differs between identical runs")


def case_schema(a, tmp):
    import jsonschema

    schema = json.loads(a.schema.read_text())
    for cfg in ("maryland.json", "sarnak.json"):
        d = tmp / cfg
        p = run(a.cli, "run", "--config", str(a.configs / cfg), "--override", "box.radius=32", "--out-dir", str(d))
        expect(p.returncode == 0, f"{cfg}: exit {p.returncode}: {p.stderr}")
        jsonschema.validate(json.loads((d / "report.json").read_text()), schema)


def case_config_errors(a, tmp):
    bad = tmp / "bad.json"
    bad.write_text('{"box": {"dimension": 1, "radius": 8}, "potential": {"kind": "maryland"}, "colour": 1}')
    p = run(a.cli, "run", "--config", str(bad))
    expect(p.returncode == 2, f"unknown key gave exit {p.returncode}")
    bad.write_text("{ not json")
    p = run(a.cli, "check-theory", "--config", str(bad))
    expect(p.returncode == 2, f"malformed JSON gave exit {p.returncode}")
    p = run(a.cli, "run", "--config", str(tmp / "missing.json"))
    expect(p.returncode == 2, f"missing file gave exit {p.returncode}")
    p = run(a.cli, "run")
    expect(p.returncode == 2, f"missing --config gave exit {p.returncode}")
    p = run(a.cli, "run", "--config", str(a.configs / "maryland.json"), "--override", "params.tau=-1")
    expect(p.returncode == 2, f"invalid override gave exit {p.returncode}")


def case_numerical_failure(a, tmp):
    p = run(a.cli, "run", "--config", str(a.configs / "maryland.json"), "--override", "box.radius=16",
            "--override", "params.max_steps=2", "--out-dir", str(tmp))
    expect(p.returncode == 1, f"unconverged run gave exit {p.returncode}")
    expect("invariant failed: converged" in p.stderr, "failing invariant not named: " + p.stderr)


def case_check_theory(a, tmp):
    p = run(a.cli, "check-theory", "--config", str(a.configs / "maryland.json"))
    expect(p.returncode == 0, f"exit {p.returncode}")
    line = [l for l in p.stdout.splitlines() if l.startswith("Theta requirement")]
    expect(line, "no Theta requirement line")
    expect("binding 8^(2/delta)C0^(4/delta)" in line[0], line[0])
    expect(float(line[0].split(">=")[1].split(",")[0]) > 20, line[0])
    p = run(a.cli, "check-theory", "--config", str(a.configs / "maryland.json"), "--strict")
    expect(p.returncode == 1, "strict mode should fail for the empirical configuration")
    p = run(a.cli, "check-theory", "--config", str(a.configs / "theory_witness.json"), "--strict")
    expect(p.returncode == 0, "witness configuration should pass: " + p.stdout)


def case_verify_distal(a, tmp):
    for cfg in ("limit_periodic_binary.json", "limit_periodic_ternary.json", "maryland.json"):
        p = run(a.cli, "verify-distal", "--config", str(a.configs / cfg))
        expect(p.returncode == 0, f"{cfg}: exit {p.returncode}: {p.stderr}")
        expect("gamma_best" in p.stdout, "no frontier printed")
    p = run(a.cli, "verify-distal", "--config", str(a.configs / "limit_periodic_binary.json"),
            "--override", "params.gamma=1")
    expect(p.returncode == 1, "an unattainable gamma should fail")


def case_sweep(a, tmp):
    p = run(a.cli, "sweep", "--config", str(a.configs / "maryland.json"), "--override", "box.radius=16,24",
            "--override", "hopping.epsilon=0.1,0.03", "--out-dir", str(tmp))
    expect(p.returncode == 0, f"exit {p.returncode}: {p.stderr}")
    with open(tmp / "sweep.csv", newline="") as f:
        rows = list(csv.DictReader(f))
    expect(len(rows) == 4, f"{len(rows)} cells")
    expect(all(r["passed"] == "true" for r in rows), "a cell failed")
    for i in range(4):
        expect((tmp / f"cell_{i:03d}" / "report.json").exists(), f"cell {i} report missing")
        expect(not list((tmp / f"cell_{i:03d}").glob("*.tmp")), "temporary file left behind")


def case_checkpoints(a, tmp):
    p = run(a.cli, "run", "--config", str(a.configs / "maryland.json"), "--override", "box.radius=16",
            "--override", "output.checkpoint_dir=ckpt", "--out-dir", str(tmp))
    expect(p.returncode == 0, f"exit {p.returncode}: {p.stderr}")
    r = json.loads((tmp / "report.json").read_text())
    files = sorted((tmp / "ckpt").glob("step_*_Q.nmls"))
    expect(len(files) == r["steps"], f"{len(files)} checkpoints for {r['steps']} steps")
    expect(files[0].read_bytes()[:4] == b"NMLS", "bad snapshot magic")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("case")
    ap.add_argument("--cli", required=True)
    ap.add_argument("--configs", type=pathlib.Path, required=True)
    ap.add_argument("--schema", type=pathlib.Path, required=True)
    a = ap.parse_args()
    with tempfile.TemporaryDirectory() as t:
        globals()["case_" + a.case](a, pathlib.Path(t))
    print("ok", a.case)


if __name__ == "__main__":
    main()
