"""Compare the compiled plant kernel against the pure-Python fallback.

Run from the repo root after an editable install:

    python benchmarks/bench_backends.py [n_steps]

The pure backend is loaded explicitly (same module source the
TETHERSIM_PURE=1 switch uses), so one process times both.
"""

import sys
import time

import numpy as np

from tethersim import plant
from tethersim import _kernels


def time_backend(core, n_steps, dt=0.001):
    params = plant.default_params()
    state = plant.hover_state(params)
    state.cable.beta = 0.3
    state.velocity = np.array([0.1, 0.0, 0.0])
    s = tuple(state.to_flat())
    u = plant.hover_inputs(params).to_tuple()
    p = params.to_tuple()

    start = time.perf_counter()
    for _ in range(n_steps):
        s = core.rk4_step(s, u, p, dt)
    elapsed = time.perf_counter() - start
    return elapsed, s


def main():
    n_steps = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
    pure = _kernels._load_pure()

    backends = [("pure python", pure)]
    if _kernels.COMPILED:
        backends.append(("compiled", _kernels.core))
    else:
        print("compiled backend unavailable; timing pure python only")

    # warm up and check agreement
    finals = {}
    for name, core in backends:
        _, s = time_backend(core, 1000)
        finals[name] = np.array(s)
    if len(finals) == 2:
        drift = np.max(np.abs(finals["pure python"] - finals["compiled"]))
        print(f"cross-backend drift after 1000 steps: {drift:.3e}")

    for name, core in backends:
        elapsed, _ = time_backend(core, n_steps)
        per_step = elapsed / n_steps
        print(f"{name:12s}: {n_steps} steps in {elapsed:.3f} s "
              f"({per_step * 1e6:.2f} us/step, {1.0 / per_step:,.0f} steps/s)")


if __name__ == "__main__":
    main()
