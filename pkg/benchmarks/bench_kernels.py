"""Compare the compiled and numpy statevector backends.

    python3 benchmarks/bench_kernels.py [--qubits 10] [--repeat 20]

Times a single-qubit gate, a CNOT, a Heisenberg expectation value, a full
circuit evaluation and one Rotosolve sweep for every available backend.
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from freezeq import _kernels
from freezeq.ansatz import rotation

CASES = ("apply_1q", "apply_cnot", "expectation", "circuit", "rotosolve_sweep")


def _kernel_cases(backend: str, n: int):
    k = _kernels.load_backend(backend)
    from freezeq.hamiltonians import HeisenbergParams, heisenberg_1d

    rng = np.random.default_rng(0)
    psi = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    psi /= np.linalg.norm(psi)
    gate = rotation(0.3, "X")
    H = heisenberg_1d(HeisenbergParams(n))
    x, z, c = H._compiled
    return {
        "apply_1q": lambda: k.apply_1q(psi, n, n // 2, gate),
        "apply_cnot": lambda: k.apply_cnot(psi, n, 0, n - 1),
        "expectation": lambda: k.pauli_expectation(psi, n, x, z, c),
    }


def _model_cases(n: int):
    # these go through the module-level backend chosen at import time
    from freezeq.harness import RunConfig, init_params, run_optimization
    from freezeq.ansatz import CircuitEvaluator
    from freezeq.hamiltonians import HeisenbergParams, heisenberg_1d

    H = heisenberg_1d(HeisenbergParams(n))
    cfg = RunConfig.from_iterations(1, hamiltonian={"kind": "heisenberg", "n_sites": n, "J": 1.0, "h": 1.0},
                                    family="A", n_qubits=n, n_layers=3, optimizer="rotosolve")
    spec = cfg.spec()
    ev = CircuitEvaluator(spec, H)
    params = init_params(spec, 0)
    return {
        "circuit": lambda: ev.energy(params),
        "rotosolve_sweep": lambda: run_optimization(cfg),
    }


def measure(backend: str, n: int, repeat: int) -> dict:
    cases = _kernel_cases(backend, n)
    out = {}
    for name, fn in cases.items():
        fn()
        out[name] = min(timeit.repeat(fn, number=1, repeat=repeat))
    if _kernels.BACKEND == backend:
        for name, fn in _model_cases(n).items():
            fn()
            out[name] = min(timeit.repeat(fn, number=1, repeat=max(3, repeat // 5)))
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qubits", type=int, default=10)
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--child", help=argparse.SUPPRESS)
    args = ap.parse_args(argv)

    if args.child:
        res = measure(args.child, args.qubits, args.repeat)
        print(json.dumps(res))
        return 0

    results = {}
    for backend in _kernels.available_backends():
        # model-level cases need the backend selected at import, so use a fresh interpreter
        env = dict(os.environ, FREEZEQ_PURE_PYTHON="1" if backend == "python" else "0")
        proc = subprocess.run([sys.executable, __file__, "--child", backend, "--qubits", str(args.qubits),
                               "--repeat", str(args.repeat)], env=env, capture_output=True, text=True,
                              check=True)
        results[backend] = json.loads(proc.stdout.strip().splitlines()[-1])

    names = list(results)
    print(f"n_qubits={args.qubits}  (best of {args.repeat}, milliseconds)")
    print(f"{'case':<18}" + "".join(f"{b:>12}" for b in names) + ("     speedup" if len(names) == 2 else ""))
    for case in CASES:
        row = [results[b].get(case) for b in names]
        line = f"{case:<18}" + "".join(f"{1e3 * t:12.3f}" if t is not None else f"{'-':>12}" for t in row)
        if len(names) == 2 and None not in row:
            line += f"{row[0] / row[1]:11.1f}x"
        print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
