"""Timing comparison of the numba and numpy kernel backends.

Run directly:

    python3 benchmarks/backend_bench.py

The analytic kernel is a deeply nested scalar summation, which is
where the JIT pays off; the Monte Carlo selection kernel is mostly
memory bound, so the two backends land close together there.
"""

from __future__ import annotations

import time

import numpy as np

from tasalamouti._kernels import (
    HAS_NUMBA,
    _psi_terms_impl,
    _snr_components_numpy,
)
from tasalamouti.closedform import _a_table


def _best_of(fn, *args, repeats: int = 5, min_time: float = 0.2) -> float:
    best = float("inf")
    for _ in range(repeats):
        count = 0
        start = time.perf_counter()
        while time.perf_counter() - start < min_time:
            fn(*args)
            count += 1
        best = min(best, (time.perf_counter() - start) / count)
    return best


def bench_psi() -> None:
    cases = [
        (2, 1, 1, 10.0, 3.0, 1.0),
        (4, 3, 2, 10.0, 3.162, 1.0),
        (6, 3, 3, 100.0, 3.162, 2.0),
        (8, 3, 3, 100.0, 3.162, 2.0),
    ]
    print("analytic kernel (one outage evaluation)")
    print(f"{'config':>22} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    for n_a, n_b, n_e, gb, ge, rs in cases:
        tab = _a_table(n_a, n_b)
        t_py = _best_of(_psi_terms_impl, n_a, n_b, n_e, gb, ge, rs, tab)
        if HAS_NUMBA:
            from tasalamouti._kernels import _psi_terms_numba

            _psi_terms_numba(n_a, n_b, n_e, gb, ge, rs, tab)
            t_nb = _best_of(_psi_terms_numba, n_a, n_b, n_e, gb, ge, rs, tab)
            ratio = f"{t_py / t_nb:7.1f}x"
            nb_ms = f"{t_nb * 1e3:10.3f}"
        else:
            ratio, nb_ms = "      n/a", "       n/a"
        label = f"n_a={n_a} n_b={n_b} n_e={n_e}"
        print(f"{label:>22} {t_py * 1e3:10.3f} {nb_ms} {ratio}")


def bench_selection() -> None:
    rng = np.random.default_rng(0)
    trials = 200_000
    print()
    print(f"selection kernel ({trials} trials)")
    print(f"{'config':>22} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    for n_alice in (2, 4, 8):
        bob = rng.gamma(2.0, 1.0, size=(trials, n_alice))
        eve = rng.gamma(2.0, 1.0, size=(trials, n_alice))
        t_py = _best_of(_snr_components_numpy, bob, eve)
        if HAS_NUMBA:
            from tasalamouti._kernels import _snr_components_numba

            _snr_components_numba(bob, eve)
            t_nb = _best_of(_snr_components_numba, bob, eve)
            ratio = f"{t_py / t_nb:7.1f}x"
            nb_ms = f"{t_nb * 1e3:10.3f}"
        else:
            ratio, nb_ms = "      n/a", "       n/a"
        label = f"n_alice={n_alice}"
        print(f"{label:>22} {t_py * 1e3:10.3f} {nb_ms} {ratio}")


if __name__ == "__main__":
    print(f"numba available: {HAS_NUMBA}")
    bench_psi()
    bench_selection()
