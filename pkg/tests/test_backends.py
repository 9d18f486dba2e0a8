import json
import os
import subprocess
import sys

import numpy as np
import pytest

from ringcav import _accel, bloch, trap
from ringcav.trap import TransverseMode

SCRIPT = r"""
import json, math, sys
import numpy as np
from ringcav import _accel, bloch, trap
from ringcav.trap import TransverseMode
cfg = bloch.paper_sweep(n_samples=401)
tr = bloch.integrate_sweep(cfg)
x = np.linspace(-3e-4, 3e-4, 31)
g = trap.hermite_gauss_intensity(TransverseMode(3, 2, 1e-4, 1.2e-4), x, x, 1.0)
json.dump({"backend": _accel.backend_name(), "v": tr.v.tolist(), "steps": tr.n_steps,
           "grid": g.ravel().tolist()}, sys.stdout)
"""


def run_backend(disable):
    env = dict(os.environ)
    env.pop("RINGCAV_NO_NUMBA", None)
    if disable:
        env["RINGCAV_NO_NUMBA"] = "1"
    out = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True,
                         text=True, check=True)
    return json.loads(out.stdout)


@pytest.fixture(scope="module")
def both():
    return run_backend(False), run_backend(True)


def test_backend_names(both):
    fast, slow = both
    assert slow["backend"] == "numpy"
    assert fast["backend"] == ("numba" if _accel.numba_available() else "numpy")


def test_backends_agree(both):
    fast, slow = both
    assert fast["steps"] == slow["steps"]
    assert np.max(np.abs(np.array(fast["v"]) - np.array(slow["v"]))) < 1e-12
    assert np.allclose(fast["grid"], slow["grid"], rtol=1e-13, atol=0)


@pytest.mark.parametrize("value,enabled", [("1", False), ("true", False), ("YES", False),
                                           ("on", False), ("0", True), ("", True)])
def test_flag_parsing(value, enabled):
    assert _accel.flag_disables(value) is (not enabled)


def test_in_process_matches_current_backend():
    tr = bloch.integrate_sweep(bloch.paper_sweep(n_samples=11))
    assert tr.backend == _accel.backend_name()
    x = np.linspace(-1, 1, 5) * 1e-4
    assert trap.hermite_gauss_intensity(TransverseMode(0, 0, 1e-4, 1e-4), x, x, 1.0).shape \
        == (5, 5)
