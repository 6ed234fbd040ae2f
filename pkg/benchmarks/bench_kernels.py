"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import timeit

import numpy as np

from suinv import _backend
from suinv.invariants import invariant_i2, invariant_i4
from suinv.multiparticle import collective_set
from suinv.su_basis import build_basis, compute_structure_tensors

CASES = [
    ("structure tensors d=4", lambda: compute_structure_tensors(build_basis(4))),
    ("structure tensors d=6", lambda: compute_structure_tensors(build_basis(6))),
    ("structure tensors d=8", lambda: compute_structure_tensors(build_basis(8))),
]


def _site_cases():
    out = []
    for d, n in [(2, 10), (3, 6), (4, 5)]:
        basis = build_basis(d)
        tensors = compute_structure_tensors(basis)
        out.append((f"collective S_j d={d} N={n}", lambda b=basis, n=n: collective_set(b, n)))
        out.append((f"I2 d={d} N={n}", lambda b=basis, n=n: invariant_i2(b, 0, n - 1, n)))
        out.append((f"I4 d={d} N={n}", lambda b=basis, t=tensors, n=n: invariant_i4(t, b, 0, 1, n - 1, n)))
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = _backend.available_backends()
    cases = CASES + _site_cases()
    print("| case | " + " | ".join(f"{b} (ms)" for b in backends) + " | speedup |")
    print("|---" * (len(backends) + 2) + "|")
    previous = _backend.get_backend()
    try:
        for name, fn in cases:
            times, results = [], []
            for b in backends:
                _backend.set_backend(b)
                results.append(fn())
                times.append(min(timeit.repeat(fn, number=1, repeat=args.repeat)) * 1e3)
            _check_same(results)
            ratio = f"{times[-1] / times[0]:.1f}x" if len(times) > 1 else "n/a"
            print(f"| {name} | " + " | ".join(f"{t:.1f}" for t in times) + f" | {ratio} |")
    finally:
        _backend.set_backend(previous)


def _as_array(r):
    if hasattr(r, "f"):
        return np.concatenate([r.f.dense.ravel(), r.d_sym.dense.ravel()])
    if hasattr(r, "operators"):
        return np.stack(r.matrices())
    return r.matrix


def _check_same(results):
    ref = _as_array(results[0])
    for r in results[1:]:
        assert np.abs(_as_array(r) - ref).max() <= 1e-10, "backends disagree"


if __name__ == "__main__":
    main()
