"""Drives the massey4 CLI end to end: single commands, batch mode, exit codes, round trips."""

import json
import subprocess
import sys

BIN = sys.argv[1]


def run(args, stdin=None):
    p = subprocess.run([BIN, *args], input=stdin, capture_output=True, text=True, timeout=300)
    return p.returncode, [json.loads(line) for line in p.stdout.splitlines() if line.strip()]


def expect(cond, what):
    if not cond:
        print("FAIL:", what)
        sys.exit(1)
    print("ok:", what)


code, docs = run(["conic", "a=2", "b=7"])
expect(code == 0 and docs[0]["result"]["solvable"], "conic 2 7 solvable")
sol = docs[0]["result"]["solution"]
x, y, z = (int(sol[k]) for k in "xyz")
expect(z * z == 2 * x * x + 7 * y * y, "conic solution substitutes")

code, docs = run(["conic", "a=3", "b=5"])
expect(code == 1 and docs[0]["result"]["obstruction"] == "p=3", "conic 3 5 obstructed at 3")

code, _ = run(["conic", "a=3"])
expect(code == 3, "missing field is invalid input")

code, docs = run(["--trace", "witness", "a=7", "b=2", "c=-7", "d=2"])
expect(code == 0, "witness exits 0")
w = docs[0]["result"]
expect("trace" in w, "trace included on request")
verify = {"command": "verify", "payload": {k: w[k] for k in ("a", "b", "c", "d", "alpha", "delta", "certificate")}}
code, docs = run([], json.dumps(verify) + "\n")
expect(code == 0 and docs[0]["result"]["ok"], "witness verifies")

batch = "\n".join(
    json.dumps(j)
    for j in [
        {"command": "conic", "payload": {"a": "-1", "b": "-1"}},
        {"command": "witness", "payload": {"a": "2", "b": "-1", "c": "2", "d": "-1"}},
        {"command": "defined-check", "payload": {"a": "5", "b": "-1", "c": "5", "d": "-1"}},
        "not an object",
    ]
) + "\n"
code1, out1 = run(["--jobs", "1"], batch)
code4, out4 = run(["--jobs", "4"], batch)
expect(code1 == code4 == 3, "batch exit code is the maximum")
expect(out1 == out4, "batch output independent of thread count")
expect([d.get("status") for d in out1] == ["negative", "ok", "ok", "invalid"], "batch statuses in input order")
expect(all("config" in d for d in out1), "every result echoes its config")
print("cli smoke passed")
