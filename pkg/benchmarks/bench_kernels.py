"""Compare the compiled and pure-numpy kernel backends.

Runs each backend in a subprocess (the backend is chosen once per process
from the SENTINEL_NUMBA environment variable) and reports per-batch wall
time for the forward pass and the fused loss+gradient pass.

Usage: python benchmarks/bench_kernels.py [--batch N] [--repeats R]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def worker(batch: int, repeats: int) -> dict:
    import numpy as np

    from sentinel.nn.autoencoder import (AutoencoderModel,
        batch_loss_and_grad, reconstruct_batch)
    from sentinel.nn.kernels import using_numba
    from sentinel.nn.layout import ModelLayout

    layout = ModelLayout()
    model = AutoencoderModel.initialize(layout, seed=0)
    rng = np.random.default_rng(0)
    windows = rng.normal(size=(batch, layout.in_channels, layout.window))

    reconstruct_batch(windows, model)         # warm-up / JIT compile
    batch_loss_and_grad(windows, model)

    def clock(fn) -> float:
        best = float("inf")
        for _ in range(repeats):
            t0 = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t0)
        return best

    return {
        "backend": "numba" if using_numba() else "numpy",
        "batch": batch,
        "forward_s": clock(lambda: reconstruct_batch(windows, model)),
        "loss_grad_s": clock(lambda: batch_loss_and_grad(windows, model)),
    }


def run_backend(flag: str, batch: int, repeats: int) -> dict:
    env = dict(os.environ, SENTINEL_NUMBA=flag)
    out = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--worker",
         "--batch", str(batch), "--repeats", str(repeats)],
        env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--batch", type=int, default=256)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.worker:
        print(json.dumps(worker(args.batch, args.repeats)))
        return

    results = [run_backend(flag, args.batch, args.repeats) for flag in ("1", "0")]
    print(f"batch of {args.batch} windows, best of {args.repeats} repeats")
    print(f"{'backend':<8} {'forward':>12} {'loss+grad':>12}")
    for r in results:
        print(f"{r['backend']:<8} {r['forward_s'] * 1e3:>10.2f}ms "
              f"{r['loss_grad_s'] * 1e3:>10.2f}ms")
    numba, numpy_ = results
    print(f"speedup  {numpy_['forward_s'] / numba['forward_s']:>10.1f}x "
          f"{numpy_['loss_grad_s'] / numba['loss_grad_s']:>10.1f}x")


if __name__ == "__main__":
    main()
