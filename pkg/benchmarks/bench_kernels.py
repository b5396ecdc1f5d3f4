"""Compare the numba and pure-numpy kernels.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5]

Times the two-mode expansion on evolved amplifier states of growing size and
the Monte Carlo tally on one block of shots, then one end-to-end ``run_nla``
per backend (each in a fresh interpreter, since the backend is fixed at import).
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from wnla import _kernels
from wnla.optics import make_bs50
from wnla.protocol import SHOT_BLOCK, build_w_state, evolve


def expansion_inputs(n):
    """A state with many multi-photon terms: an evolved amplifier state, then a BS on two busy modes."""
    state = evolve(build_w_state(n), 0.3)
    i, j = state.index("c1"), state.index("d1+")
    return state.occ, state.amp, i, j, make_bs50().matrix


def heavy_inputs(photons):
    """Two modes holding every split of ``photons`` photons: large per-term sums."""
    occ = np.array([[k, photons - k] for k in range(photons + 1)], dtype=np.uint8)
    amp = np.full(photons + 1, 1.0 / np.sqrt(photons + 1), dtype=np.complex128)
    return occ, amp, 0, 1, make_bs50().matrix


def best(fn, repeat):
    fn()  # warm-up, includes jit compilation
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_kernels(repeat):
    rows = []
    cases = [(f"expand n={n}", expansion_inputs(n)) for n in (3, 5, 6)]
    cases.append(("expand 40 photons", heavy_inputs(40)))
    for name, (occ, amp, i, j, u) in cases:
        t_np = best(lambda: _kernels.expand_two_mode_numpy(occ, amp, i, j, u), repeat)
        t_nb = best(lambda: _kernels.expand_two_mode_numba(occ, amp, i, j, u), repeat)
        rows.append((name, len(amp), t_np, t_nb))

    rng = np.random.default_rng(0)
    u = rng.random((2, SHOT_BLOCK))
    cdf = np.cumsum(np.full(64, 1 / 64))
    t_np = best(lambda: _kernels.tally_numpy(u[0], u[1], 0.5, cdf, cdf), repeat)
    t_nb = best(lambda: _kernels.tally_numba(u[0], u[1], 0.5, cdf, cdf), repeat)
    rows.append((f"tally {SHOT_BLOCK} shots", SHOT_BLOCK, t_np, t_nb))
    return rows


END_TO_END = (
    "import timeit, wnla;"
    "cfg = wnla.ProtocolConfig(6, 0.3, 0.3); wnla.run_nla(cfg);"
    "print(wnla.BACKEND, min(timeit.repeat(lambda: wnla.run_nla(cfg), number=1, repeat={r})))"
)


def bench_end_to_end(repeat):
    out = {}
    for flag in ("0", "1"):
        env = dict(os.environ, WNLA_DISABLE_NUMBA=flag)
        res = subprocess.run(
            [sys.executable, "-c", END_TO_END.format(r=repeat)], env=env, capture_output=True, text=True, check=True
        )
        backend, seconds = res.stdout.split()
        out[backend] = float(seconds)
    return out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if not _kernels.USE_NUMBA:
        sys.exit("numba is disabled or missing; unset WNLA_DISABLE_NUMBA to compare backends")

    print(f"{'case':<22s} {'terms':>7s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s}")
    for name, size, t_np, t_nb in bench_kernels(args.repeat):
        print(f"{name:<22s} {size:>7d} {1e3 * t_np:>11.3f} {1e3 * t_nb:>11.3f} {t_np / t_nb:>7.1f}x")
    e2e = bench_end_to_end(args.repeat)
    print(f"{'run_nla n=6':<22s} {'':>7s} {1e3 * e2e['numpy']:>11.3f} {1e3 * e2e['numba']:>11.3f} "
          f"{e2e['numpy'] / e2e['numba']:>7.1f}x")


if __name__ == "__main__":
    main()
