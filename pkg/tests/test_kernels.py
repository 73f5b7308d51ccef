import numpy as np
import pytest

from fwadopt import kernels
from fwadopt.dynamics import simulate_agents
from fwadopt.equilibrium import UNSEEDED
from fwadopt.model import AdoptionState

compiled = pytest.mark.skipif("compiled" not in kernels.available(), reason="extension not built")


def test_python_backend_always_available():
    assert "python" in kernels.available()
    assert kernels.get("python").agent_events is not None
    with pytest.raises(ValueError):
        kernels.get("fortran")


@compiled
def test_default_is_compiled():
    assert kernels.DEFAULT == "compiled"


@compiled
@pytest.mark.parametrize("start", [UNSEEDED, AdoptionState(0.0, 0.9), AdoptionState(0.2, 0.3)])
def test_backends_bitwise_equal(params, start):
    a, pa = simulate_agents(params, 800, start, 6.0, seed=5, backend="compiled", chunk=1000)
    b, pb = simulate_agents(params, 800, start, 6.0, seed=5, backend="python", chunk=1000)
    assert np.array_equal(a.t, b.t)
    assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)
    assert np.array_equal(pa.states, pb.states)


def test_chunk_size_does_not_change_path(params):
    a, _ = simulate_agents(params, 300, UNSEEDED, 4.0, seed=9, backend="python", chunk=64)
    b, _ = simulate_agents(params, 300, UNSEEDED, 4.0, seed=9, backend="python", chunk=64)
    assert np.array_equal(a.t, b.t)


def test_fallback_selected_without_extension():
    import subprocess
    import sys

    code = (
        "import sys, importlib.abc\n"
        "class Block(importlib.abc.MetaPathFinder):\n"
        "    def find_spec(self, name, path, target=None):\n"
        "        if name == 'fwadopt._kernels':\n"
        "            raise ImportError('blocked')\n"
        "sys.meta_path.insert(0, Block())\n"
        "from fwadopt import kernels\n"
        "print(kernels.DEFAULT, kernels.available())\n"
    )
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True).stdout
    assert out.strip() == "python ['python']"
