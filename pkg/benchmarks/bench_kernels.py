"""Timing comparison of the compiled and reference kernel backends.

Both backends are bit-identical (the test suite asserts exact equality);
this script only measures speed. Micro-benchmarks call the two
implementations side by side in one process; the end-to-end experiment
is re-run in a subprocess per backend because selection happens at
import time.

Usage: python benchmarks/bench_kernels.py [--repeat 5] [--skip-e2e]
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from orthofield import kernels
from orthofield.kernels import _ref

_E2E_SNIPPET = """
import time
from orthofield import kernels
from orthofield.chaos import InnovationLaw
from orthofield.fields import ExperimentSpec, FieldSpec, StatisticSpec, run_experiment

spec = ExperimentSpec(
    field=FieldSpec("linear", 2, InnovationLaw.rademacher(),
                    {(0, 0): 1.0, (0, 1): 1.0, (1, 0): 1.0, (1, 1): 1.0}),
    n=64, replicas=2000, seed=7,
    statistic=StatisticSpec("endpoint", t=(1.0, 1.0)),
)
start = time.perf_counter()
run_experiment(spec, workers=1)
print(f"{kernels.BACKEND}: {time.perf_counter() - start:.3f} s")
"""


def _best_ms(fn, repeat: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeat)) * 1e3


def bench_micro(repeat: int) -> None:
    if kernels.BACKEND != "compiled":
        print("compiled extension not available; micro-benchmarks skipped")
        return
    fast = kernels._fast
    state = kernels.stream_state(1, kernels.DOMAIN_LATTICE, 0)
    rng = np.random.default_rng(0)

    idx = np.ascontiguousarray(
        np.stack(np.meshgrid(*([np.arange(512)] * 2), indexing="ij"), axis=-1)
        .reshape(-1, 2)
        .astype(np.int64)
    )
    u = kernels.fill_u64(state, idx)

    eps = rng.normal(size=(8, 260, 260))  # (replicas, *block)
    offsets = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=np.int64)
    coeffs = np.ones(4)

    rows = [
        (
            "fill_u64 (512^2 keys)",
            lambda: fast.fill_u64(state, idx),
            lambda: _ref.fill_u64(state, idx),
        ),
        (
            "u64_to_gaussian",
            lambda: fast.u64_to_gaussian(u, 1.0),
            lambda: _ref.u64_to_gaussian(u, 1.0),
        ),
        (
            "u64_to_rademacher",
            lambda: fast.u64_to_rademacher(u, 1.0),
            lambda: _ref.u64_to_rademacher(u, 1.0),
        ),
        (
            "convolve 2x2 kernel (8x256^2 out)",
            lambda: fast.convolve_batch_2d(eps, 1, 1, offsets, coeffs, 256, 256),
            lambda: _ref.convolve_batch(eps, (1, 1), offsets, coeffs, (256, 256)),
        ),
    ]
    print(f"{'kernel':<34} {'compiled':>10} {'fallback':>10} {'speedup':>8}")
    for name, fast_fn, ref_fn in rows:
        assert np.array_equal(fast_fn(), ref_fn())  # identical before timing
        t_fast = _best_ms(fast_fn, repeat)
        t_ref = _best_ms(ref_fn, repeat)
        print(f"{name:<34} {t_fast:>8.3f}ms {t_ref:>8.3f}ms {t_ref / t_fast:>7.1f}x")


def bench_end_to_end() -> None:
    print("\nend-to-end: 2000 replicas of a 64x64 linear-field experiment")
    for backend in ("compiled", "fallback"):
        env = dict(os.environ, ORTHOFIELD_KERNELS=backend)
        try:
            out = subprocess.run(
                [sys.executable, "-c", _E2E_SNIPPET],
                env=env, capture_output=True, text=True, check=True,
            )
            print(" ", out.stdout.strip())
        except subprocess.CalledProcessError as exc:
            print(f"  {backend}: failed ({exc.stderr.strip().splitlines()[-1]})")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5, help="timing repetitions")
    parser.add_argument("--skip-e2e", action="store_true", help="micro-benchmarks only")
    args = parser.parse_args()
    print(f"active backend: {kernels.BACKEND}\n")
    bench_micro(args.repeat)
    if not args.skip_e2e:
        bench_end_to_end()


if __name__ == "__main__":
    main()
