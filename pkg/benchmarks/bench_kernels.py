"""Time the hot kernels on the numba and pure-numpy paths.

Each backend runs in its own interpreter because the switch is read at
import time.  Usage::

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, math, sys, time
import numpy as np
from ringcav import _accel, bloch, rir, trap
from ringcav.physics import RB85
from ringcav.trap import TransverseMode

repeat = int(sys.argv[1])
sweep = bloch.paper_sweep()
probe = rir.paper_probe()
x = np.linspace(-4e-4, 4e-4, 401)
mode = TransverseMode(4, 3, 1.24e-4, 1.29e-4)
cases = {
    "paper_sweep": lambda: bloch.integrate_sweep(sweep),
    "doppler_16_classes": lambda: bloch.inhomogeneous_average(100e-6, probe, RB85, sweep, 16),
    "hermite_gauss_401x401": lambda: trap.hermite_gauss_intensity(mode, x, x, 1.0),
}
out = {"backend": _accel.backend_name()}
for name, fn in cases.items():
    t0 = time.perf_counter(); fn(); first = time.perf_counter() - t0
    runs = []
    for _ in range(repeat):
        t0 = time.perf_counter(); fn(); runs.append(time.perf_counter() - t0)
    out[name] = {"first_s": first, "median_s": float(np.median(runs))}
json.dump(out, sys.stdout)
"""


def run(disable, repeat):
    env = dict(os.environ)
    env.pop("RINGCAV_NO_NUMBA", None)
    if disable:
        env["RINGCAV_NO_NUMBA"] = "1"
    res = subprocess.run([sys.executable, "-c", WORKLOAD, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    fast, slow = run(False, args.repeat), run(True, args.repeat)
    print(f"{'kernel':<24}{fast['backend']:>12}{slow['backend']:>12}{'speed-up':>10}")
    for name in fast:
        if name == "backend":
            continue
        a, b = fast[name]["median_s"], slow[name]["median_s"]
        print(f"{name:<24}{a * 1e3:>10.2f}ms{b * 1e3:>10.2f}ms{b / a:>9.1f}x")
    print(f"first call incl. compile/cache load ({fast['backend']}): "
          + ", ".join(f"{k} {v['first_s']:.2f}s" for k, v in fast.items() if k != "backend"))


if __name__ == "__main__":
    main()
