"""Compare the compiled and pure-Python term kernels.

    python benchmarks/bench_kernels.py [--repeat N]

Runs the same polynomial workload against both backends (each in a fresh
interpreter so the backend switch takes effect) plus one full fixture analysis.
"""
import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, time
from singlag.symcore import BACKEND, parse_expr, symbol_table
from singlag.system import load_system
from singlag.report import analyze
from singlag import fixtures

t = symbol_table(4)
a = parse_expr("(q1 + 2*q2 - q3/3 + p1*q4 + 1)^4", t).num
b = parse_expr("(p1 - q2 + 5/7*q3*q4 - p2)^4", t).num
q1 = t["q1"]

def poly_ops():
    c = a * b
    for _ in range(3):
        c = c + a * b - c.diff(q1)
    return c

def full():
    for name in fixtures.names():
        analyze(load_system(fixtures.path(name)))

out = {"backend": BACKEND}
for label, fn in (("poly_ops", poly_ops), ("fixtures", full)):
    best = float("inf")
    for _ in range(REPEAT):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    out[label] = best
print(json.dumps(out))
"""


def run(pure: bool, repeat: int) -> dict:
    env = dict(os.environ)
    if pure:
        env["SINGLAG_PURE"] = "1"
    else:
        env.pop("SINGLAG_PURE", None)
    code = WORKLOAD.replace("REPEAT", str(repeat))
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rows = [run(False, args.repeat), run(True, args.repeat)]
    print(f"{'backend':<8} {'poly_ops [s]':>13} {'fixtures [s]':>13}")
    for r in rows:
        print(f"{r['backend']:<8} {r['poly_ops']:>13.4f} {r['fixtures']:>13.4f}")
    if rows[0]["backend"] == "cython":
        print(f"speedup  {rows[1]['poly_ops'] / rows[0]['poly_ops']:>13.2f} {rows[1]['fixtures'] / rows[0]['fixtures']:>13.2f}")
    else:
        print("compiled kernels not built; both rows use the Python backend")


if __name__ == "__main__":
    main()
