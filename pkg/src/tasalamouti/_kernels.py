"""Hot numerical kernels with a numba fast path and a NumPy fallback.

Two kernels live here: the per-trial antenna-selection reduction used by
the Monte Carlo estimators, and the nested alternating sums behind the
closed-form outage expression.  The backend is chosen by the
``TASALAMOUTI_BACKEND`` environment variable (``numba`` or ``numpy``);
unset, numba is used when importable.

The nested-sum kernel is one plain-Python function; the numba path jits
that same function, so both backends execute identical arithmetic and
return bit-identical values.  The Monte Carlo reduction has two
implementations (a vectorized one and a jitted loop); both consume
squared norms computed once by the caller and break ties toward the
lowest antenna index, so they too agree exactly.
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = [
    "HAS_NUMBA",
    "active_backend",
    "psi_terms",
    "snr_components",
]

_ENV_VAR = "TASALAMOUTI_BACKEND"
_BACKENDS = ("numba", "numpy")

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    HAS_NUMBA = False


def active_backend() -> str:
    """Resolve the kernel backend from the environment.

    Returns ``"numba"`` or ``"numpy"``.  An explicit request for numba
    without the package installed is an error rather than a silent
    downgrade; benchmark numbers would otherwise be meaningless.
    """
    choice = os.environ.get(_ENV_VAR, "").strip().lower()
    if not choice:
        return "numba" if HAS_NUMBA else "numpy"
    if choice not in _BACKENDS:
        raise ValueError(
            f"{_ENV_VAR}={choice!r} not understood; expected one of {_BACKENDS}"
        )
    if choice == "numba" and not HAS_NUMBA:
        raise RuntimeError(f"{_ENV_VAR}=numba requested but numba is not importable")
    return choice


# ---------------------------------------------------------------------------
# Monte Carlo reduction: top-two selection by the legitimate link's norms.
# ---------------------------------------------------------------------------


def _snr_components_numpy(bob_norms, eve_norms):
    n = bob_norms.shape[0]
    rows = np.arange(n)
    first = np.argmax(bob_norms, axis=1)
    top1 = bob_norms[rows, first]
    masked = bob_norms.copy()
    masked[rows, first] = -np.inf
    second = np.argmax(masked, axis=1)
    top2 = top1 + bob_norms[rows, second]
    eve_first = eve_norms[rows, first]
    eve_pair = eve_first + eve_norms[rows, second]
    return top2, top1, eve_pair, eve_first


def _snr_components_loop(bob_norms, eve_norms):
    n, n_alice = bob_norms.shape
    top2 = np.empty(n)
    top1 = np.empty(n)
    eve_pair = np.empty(n)
    eve_first = np.empty(n)
    for tr in range(n):
        best = 0
        for a in range(1, n_alice):
            if bob_norms[tr, a] > bob_norms[tr, best]:
                best = a
        second = 0 if best != 0 else 1
        for a in range(n_alice):
            if a == best:
                continue
            if bob_norms[tr, a] > bob_norms[tr, second]:
                second = a
        top1[tr] = bob_norms[tr, best]
        top2[tr] = bob_norms[tr, best] + bob_norms[tr, second]
        eve_first[tr] = eve_norms[tr, best]
        eve_pair[tr] = eve_norms[tr, best] + eve_norms[tr, second]
    return top2, top1, eve_pair, eve_first


if HAS_NUMBA:
    _snr_components_numba = njit(cache=True)(_snr_components_loop)


def snr_components(bob_norms: np.ndarray, eve_norms: np.ndarray):
    """Per-trial selection statistics from squared column norms.

    Parameters
    ----------
    bob_norms, eve_norms : ndarray, shape (n_trials, n_alice)
        Squared column norms of the legitimate and eavesdropper links.

    Returns
    -------
    (top2, top1, eve_pair, eve_first)
        Sum of the two largest legitimate norms, the largest one, and
        the eavesdropper norms gathered at the same antenna indices.
    """
    bob_norms = np.ascontiguousarray(bob_norms, dtype=np.float64)
    eve_norms = np.ascontiguousarray(eve_norms, dtype=np.float64)
    if bob_norms.shape != eve_norms.shape or bob_norms.ndim != 2:
        raise ValueError("norm arrays must share a (n_trials, n_alice) shape")
    if bob_norms.shape[1] < 2:
        raise ValueError("selection of two antennas needs n_alice >= 2")
    if active_backend() == "numba":
        return _snr_components_numba(bob_norms, eve_norms)
    return _snr_components_numpy(bob_norms, eve_norms)


# ---------------------------------------------------------------------------
# Closed-form nested sums.
#
# Layout of the shared tables, all built inside the kernel so the jitted
# and plain paths stay a single function:
#   fact[q]            q! as float
#   binom[n, k]        Pascal triangle as float
#   bracket[l, m, u]   inner signed sum over the eavesdropper expansion
#                      indices (n and q) at exponent u, for phi level l
#   mixed[l, m, w]     binomial mix sum_u C(w,u) rho^u shift^(w-u) * bracket
# Phi levels 0..n_a-2 hold phi1(i) with the halved denominators used by
# the first, third and fourth sums; level n_a-1 holds phi2 with the same
# halved denominators (fourth sum); level n_a holds phi2 with the plain
# denominators (second sum).  Every table entry also carries the largest
# absolute summand that fed it, so the returned magnitude bound is the
# exact maximum |term| over the fully expanded sum.
# ---------------------------------------------------------------------------


def _psi_terms_impl(n_a, n_b, n_e, gamma_b, gamma_e, rate, a_tab):
    two_rs = 2.0 ** rate
    rho = two_rs * gamma_e / gamma_b
    shift = 2.0 * (two_rs - 1.0) / gamma_b

    t_max = (n_a - 2) * (n_b - 1)
    w_max = 2 * n_b - 2 + t_max
    if 2 * n_b - 1 > w_max:
        w_max = 2 * n_b - 1
    u_max = w_max
    size = 2 * n_b + t_max + 2 * n_e + u_max + 4

    fact = np.empty(size)
    fact[0] = 1.0
    for q in range(1, size):
        fact[q] = fact[q - 1] * q
    binom = np.zeros((size, size))
    for nn in range(size):
        binom[nn, 0] = 1.0
        for kk in range(1, nn + 1):
            binom[nn, kk] = binom[nn - 1, kk - 1] + binom[nn - 1, kk]

    n_phi = n_a + 1
    phis = np.empty(n_phi)
    halved = np.empty(n_phi, np.uint8)
    for i in range(n_a - 1):
        phis[i] = 1.0 + rho * (i + 2) / 2.0
        halved[i] = 1
    phis[n_a - 1] = 1.0 + rho
    halved[n_a - 1] = 1
    phis[n_a] = 1.0 + rho
    halved[n_a] = 0

    bracket = np.zeros((n_phi, n_e, u_max + 1))
    bracket_mag = np.zeros((n_phi, n_e, u_max + 1))
    for lvl in range(n_phi):
        phi = phis[lvl]
        log_phi = math.log(phi)
        dbl = halved[lvl] == 1
        for m in range(n_e):
            span = 2 * n_e - m - 2
            for u in range(u_max + 1):
                acc = 0.0
                comp = 0.0
                mag = 0.0
                for n in range(span + 1):
                    lam = 2 * n_e + u - m - n - 3
                    if lam < 0:
                        fval = -1.0 / phi
                    else:
                        w_lam = math.exp(math.lgamma(lam + 1.0) - (lam + 1.0) * log_phi)
                        fval = w_lam * ((span - n) - (lam + 1.0) / phi)
                    coef = fact[n] * binom[span, n] / 2.0 ** (span if dbl else span + 1)
                    term = coef * fval
                    mag = max(mag, abs(term))
                    new = acc + term
                    if abs(acc) >= abs(term):
                        comp += (acc - new) + term
                    else:
                        comp += (term - new) + acc
                    acc = new
                lam = 2 * n_e + u - m - 2
                if lam < 0:
                    fval = -1.0 / phi
                else:
                    w_lam = math.exp(math.lgamma(lam + 1.0) - (lam + 1.0) * log_phi)
                    fval = w_lam * ((2 * n_e - m - 1) - (lam + 1.0) / phi)
                for q in range(n_e - m):
                    sgn = -1.0 if q % 2 == 1 else 1.0
                    coef = binom[n_e - m - 1, q] / (
                        2.0 ** (n_e + q - 1 if dbl else n_e + q) * (n_e + q)
                    )
                    term = sgn * coef * fval
                    mag = max(mag, abs(term))
                    new = acc + term
                    if abs(acc) >= abs(term):
                        comp += (acc - new) + term
                    else:
                        comp += (term - new) + acc
                    acc = new
                bracket[lvl, m, u] = acc + comp
                bracket_mag[lvl, m, u] = mag

    mixed = np.zeros((n_phi, n_e, w_max + 1))
    mixed_mag = np.zeros((n_phi, n_e, w_max + 1))
    for lvl in range(n_phi):
        for m in range(n_e):
            for w in range(w_max + 1):
                acc = 0.0
                comp = 0.0
                mag = 0.0
                for u in range(w + 1):
                    pw = shift ** (w - u) if w - u > 0 else 1.0
                    coef = binom[w, u] * rho ** u * pw
                    term = coef * bracket[lvl, m, u]
                    mag = max(mag, coef * bracket_mag[lvl, m, u])
                    new = acc + term
                    if abs(acc) >= abs(term):
                        comp += (acc - new) + term
                    else:
                        comp += (term - new) + acc
                    acc = new
                mixed[lvl, m, w] = acc + comp
                mixed_mag[lvl, m, w] = mag

    decay = (two_rs - 1.0) / gamma_b

    psi1 = 0.0
    comp1 = 0.0
    mag_all = 0.0
    for i in range(n_a - 1):
        sgn = -1.0 if i % 2 == 0 else 1.0
        efac = math.exp(-decay * (i + 2))
        for j in range(n_b):
            for m in range(n_e):
                gpre = (
                    binom[n_a - 2, i]
                    * fact[j]
                    * binom[n_b - 1, j]
                    * fact[m]
                    * binom[n_e - 1, m]
                )
                for t in range(i * (n_b - 1) + 1):
                    a_val = a_tab[i, t]
                    if a_val == 0.0:
                        continue
                    span = 2 * n_b + t - j - 2
                    for k in range(span + 1):
                        w1 = span - k
                        coef = (
                            fact[k]
                            * binom[span, k]
                            / (2.0 ** w1 * (i + 2.0) ** (k + 1))
                        )
                        outer = gpre * a_val * coef * efac
                        term = sgn * outer * mixed[i, m, w1]
                        mag_all = max(mag_all, outer * mixed_mag[i, m, w1])
                        new = psi1 + term
                        if abs(psi1) >= abs(term):
                            comp1 += (psi1 - new) + term
                        else:
                            comp1 += (term - new) + psi1
                        psi1 = new
    psi1 += comp1

    psi2 = 0.0
    comp2 = 0.0
    efac2 = math.exp(-2.0 * decay)
    for j in range(n_b):
        for m in range(n_e):
            hpre = fact[j] * binom[n_b - 1, j] * fact[m] * binom[n_e - 1, m]
            w = 2 * n_b - j - 1
            for p in range(n_b - j):
                sgn = -1.0 if p % 2 == 1 else 1.0
                coef = binom[n_b - j - 1, p] / (2.0 ** (n_b + p - 1) * (n_b + p))
                outer = hpre * coef * efac2
                term = sgn * outer * mixed[n_a, m, w]
                mag_all = max(mag_all, outer * mixed_mag[n_a, m, w])
                new = psi2 + term
                if abs(psi2) >= abs(term):
                    comp2 += (psi2 - new) + term
                else:
                    comp2 += (term - new) + psi2
                psi2 = new
    psi2 += comp2

    psi3 = 0.0
    comp3 = 0.0
    for i in range(1, n_a - 1):
        sgn = 1.0 if i % 2 == 0 else -1.0
        efac = math.exp(-decay * (i + 2))
        for j in range(n_b):
            for m in range(n_e):
                gpre = (
                    binom[n_a - 2, i]
                    * fact[j]
                    * binom[n_b - 1, j]
                    * fact[m]
                    * binom[n_e - 1, m]
                )
                for t in range(i * (n_b - 1) + 1):
                    a_val = a_tab[i, t]
                    if a_val == 0.0:
                        continue
                    for p in range(n_b - j):
                        psgn = -1.0 if p % 2 == 1 else 1.0
                        pcoef = binom[n_b - j - 1, p]
                        w2 = n_b + p + t - 1
                        for k in range(w2 + 1):
                            coef = (
                                fact[k]
                                * binom[w2, k]
                                / (2.0 ** (w2 - k) * float(i) ** (k + 1))
                            )
                            w1 = 2 * n_b + t - j - k - 2
                            outer = gpre * a_val * pcoef * coef * efac
                            term = sgn * psgn * outer * mixed[i, m, w1]
                            mag_all = max(mag_all, outer * mixed_mag[i, m, w1])
                            new = psi3 + term
                            if abs(psi3) >= abs(term):
                                comp3 += (psi3 - new) + term
                            else:
                                comp3 += (term - new) + psi3
                            psi3 = new
    psi3 += comp3

    psi4 = 0.0
    comp4 = 0.0
    for i in range(1, n_a - 1):
        sgn = 1.0 if i % 2 == 0 else -1.0
        for j in range(n_b):
            for m in range(n_e):
                gpre = (
                    binom[n_a - 2, i]
                    * fact[j]
                    * binom[n_b - 1, j]
                    * fact[m]
                    * binom[n_e - 1, m]
                )
                for t in range(i * (n_b - 1) + 1):
                    a_val = a_tab[i, t]
                    if a_val == 0.0:
                        continue
                    for p in range(n_b - j):
                        psgn = -1.0 if p % 2 == 1 else 1.0
                        coef = (
                            binom[n_b - j - 1, p]
                            * fact[n_b + p + t - 1]
                            / float(i) ** (n_b + p + t)
                        )
                        w3 = n_b - j - p - 1
                        outer = gpre * a_val * coef * efac2
                        term = sgn * psgn * outer * mixed[n_a - 1, m, w3]
                        mag_all = max(mag_all, outer * mixed_mag[n_a - 1, m, w3])
                        new = psi4 + term
                        if abs(psi4) >= abs(term):
                            comp4 += (psi4 - new) + term
                        else:
                            comp4 += (term - new) + psi4
                        psi4 = new
    psi4 += comp4

    return psi1, psi2, psi3, psi4, mag_all


if HAS_NUMBA:
    _psi_terms_numba = njit(cache=True)(_psi_terms_impl)


def psi_terms(
    n_a: int,
    n_b: int,
    n_e: int,
    gamma_b: float,
    gamma_e: float,
    rate: float,
    a_tab: np.ndarray,
) -> tuple[float, float, float, float, float]:
    """Evaluate the four nested sums of the outage expression at once.

    ``a_tab`` is the zero-padded stack of power-expansion coefficient
    rows, shape ``(n_a - 1, (n_a - 2) * (n_b - 1) + 1)``.  Returns the
    four signed sums plus the largest absolute summand encountered
    across all of them (for the cancellation diagnostic).
    """
    a_tab = np.ascontiguousarray(a_tab, dtype=np.float64)
    if active_backend() == "numba":
        return _psi_terms_numba(
            n_a, n_b, n_e, float(gamma_b), float(gamma_e), float(rate), a_tab
        )
    return _psi_terms_impl(
        n_a, n_b, n_e, float(gamma_b), float(gamma_e), float(rate), a_tab
    )
