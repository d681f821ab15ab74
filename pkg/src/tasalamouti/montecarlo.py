"""Monte Carlo estimation of the secrecy metrics.

Trials are partitioned into fixed-size blocks, each bound to its own
deterministic substream derived from (seed, block index), and reduced
by exact event counting.  The same (config, scheme, trials, seed)
therefore reproduces bit-identical estimates regardless of how blocks
would be scheduled.  The per-trial channel statistics are normalized
(unit average branch SNR), so one set of draws serves every SNR point
of a sweep and both schemes share draws for paired comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .channel import secrecy_capacity
from .config import Scheme, SystemConfig

__all__ = [
    "BLOCK_SIZE",
    "EstimatorResult",
    "NormalizedDraws",
    "draw_components",
    "estimate_nonzero_secrecy",
    "estimate_outage",
    "outage_events",
    "secrecy_capacity",
    "snr_pairs",
]

BLOCK_SIZE = 65536

_Z95 = 1.959963984540054


@dataclass(frozen=True)
class EstimatorResult:
    """Bernoulli estimate with its uncertainty.

    ``stderr`` is the plug-in binomial standard error
    sqrt(p*(1-p)/n); the 95% interval uses the normal approximation
    clamped to [0, 1], except at zero (or full) counts where the
    rule-of-three bound replaces the degenerate interval.
    """

    estimate: float
    stderr: float
    n_trials: int
    n_events: int
    ci95_low: float
    ci95_high: float


@dataclass(frozen=True)
class NormalizedDraws:
    """Per-trial selection statistics at unit average branch SNR.

    ``top2``/``top1`` are the sum of the two largest and the single
    largest squared column norms of the legitimate link; ``eve_pair``
    and ``eve_first`` are the eavesdropper norms gathered at the same
    antenna indices.  ``top2``/``eve_pair`` are None when n_alice == 1
    (only the single-antenna scheme is defined there).
    """

    n_alice: int
    n_bob: int
    n_eve: int
    n_trials: int
    seed: int
    top2: np.ndarray | None
    top1: np.ndarray
    eve_pair: np.ndarray | None
    eve_first: np.ndarray


def draw_components(
    n_alice: int, n_bob: int, n_eve: int, n_trials: int, seed: int
) -> NormalizedDraws:
    """Sample the scheme-independent per-trial channel statistics.

    Parameters
    ----------
    n_alice, n_bob, n_eve : int
        Antenna counts (>= 1).
    n_trials : int
        Number of independent channel realizations (>= 1).
    seed : int
        Nonnegative root seed; block b uses the substream seeded by
        (seed, b).

    Returns
    -------
    NormalizedDraws
    """
    for name, value in (("n_alice", n_alice), ("n_bob", n_bob), ("n_eve", n_eve)):
        if value < 1:
            raise ValueError(f"{name} must be >= 1, got {value}")
    if n_trials < 1:
        raise ValueError(f"n_trials must be >= 1, got {n_trials}")
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ValueError(f"seed must be a nonnegative integer, got {seed!r}")

    top1 = np.empty(n_trials)
    eve_first = np.empty(n_trials)
    if n_alice >= 2:
        top2 = np.empty(n_trials)
        eve_pair = np.empty(n_trials)
    else:
        top2 = None
        eve_pair = None

    for block, start in enumerate(range(0, n_trials, BLOCK_SIZE)):
        count = min(BLOCK_SIZE, n_trials - start)
        rng = np.random.default_rng(np.random.SeedSequence([seed, block]))
        f_re = rng.standard_normal((count, n_bob, n_alice))
        f_im = rng.standard_normal((count, n_bob, n_alice))
        g_re = rng.standard_normal((count, n_eve, n_alice))
        g_im = rng.standard_normal((count, n_eve, n_alice))
        # column norms of entries drawn as (re + 1j*im)/sqrt(2)
        bob_norms = (f_re * f_re + f_im * f_im).sum(axis=1) * 0.5
        eve_norms = (g_re * g_re + g_im * g_im).sum(axis=1) * 0.5
        stop = start + count
        if n_alice >= 2:
            b2, b1, e2, e1 = _kernels.snr_components(bob_norms, eve_norms)
            top2[start:stop] = b2
            top1[start:stop] = b1
            eve_pair[start:stop] = e2
            eve_first[start:stop] = e1
        else:
            top1[start:stop] = bob_norms[:, 0]
            eve_first[start:stop] = eve_norms[:, 0]

    return NormalizedDraws(
        n_alice=n_alice,
        n_bob=n_bob,
        n_eve=n_eve,
        n_trials=n_trials,
        seed=seed,
        top2=top2,
        top1=top1,
        eve_pair=eve_pair,
        eve_first=eve_first,
    )


def snr_pairs(
    draws: NormalizedDraws,
    scheme: Scheme,
    gamma_bar_b: float,
    gamma_bar_e: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Scale normalized draws to instantaneous SNR pairs for a scheme."""
    if gamma_bar_b <= 0 or gamma_bar_e <= 0:
        raise ValueError("average SNRs must be > 0")
    if scheme is Scheme.TAS_ALAMOUTI:
        if draws.top2 is None:
            raise ValueError(
                "the Alamouti selection scheme needs n_alice >= 2, "
                f"draws have n_alice={draws.n_alice}"
            )
        return draws.top2 * (gamma_bar_b / 2.0), draws.eve_pair * (gamma_bar_e / 2.0)
    if scheme is Scheme.SINGLE_TAS:
        return draws.top1 * gamma_bar_b, draws.eve_first * gamma_bar_e
    raise ValueError(f"unknown scheme {scheme!r}")


def outage_events(
    draws: NormalizedDraws,
    scheme: Scheme,
    gamma_bar_b: float,
    gamma_bar_e: float,
    rate: float,
) -> np.ndarray:
    """Boolean per-trial secrecy outage indicators.

    At ``rate == 0`` the event is gamma_b <= gamma_e (capacity not
    strictly positive), the exact complement of the non-zero-secrecy
    event; for positive rates it is secrecy capacity below ``rate``.
    """
    rate = float(rate)
    if not math.isfinite(rate) or rate < 0.0:
        raise ValueError(f"rate must be finite and >= 0, got {rate!r}")
    gamma_b, gamma_e = snr_pairs(draws, scheme, gamma_bar_b, gamma_bar_e)
    if rate == 0.0:
        return gamma_b <= gamma_e
    return np.log2((1.0 + gamma_b) / (1.0 + gamma_e)) < rate


def _bernoulli_result(n_events: int, n_trials: int) -> EstimatorResult:
    p = n_events / n_trials
    stderr = math.sqrt(p * (1.0 - p) / n_trials)
    if n_events == 0:
        low, high = 0.0, min(1.0, 3.0 / n_trials)
    elif n_events == n_trials:
        low, high = max(0.0, 1.0 - 3.0 / n_trials), 1.0
    else:
        low = max(0.0, p - _Z95 * stderr)
        high = min(1.0, p + _Z95 * stderr)
    return EstimatorResult(
        estimate=p,
        stderr=stderr,
        n_trials=n_trials,
        n_events=n_events,
        ci95_low=low,
        ci95_high=high,
    )


def estimate_outage(
    config: SystemConfig,
    scheme: Scheme,
    rate: float,
    n_trials: int,
    seed: int = 0,
) -> EstimatorResult:
    """Estimate the secrecy outage probability by simulation.

    Parameters
    ----------
    config : SystemConfig
    scheme : Scheme
        The Alamouti selection scheme requires n_alice >= 2.
    rate : float
        Target secrecy rate in bits per channel use (>= 0).
    n_trials : int
        Number of channel realizations (>= 1).
    seed : int
        Root seed of the reproducible block substreams.

    Returns
    -------
    EstimatorResult
    """
    if scheme is Scheme.TAS_ALAMOUTI:
        config.require_two_transmit_antennas()
    draws = draw_components(config.n_alice, config.n_bob, config.n_eve, n_trials, seed)
    events = outage_events(
        draws, scheme, config.gamma_bar_b, config.gamma_bar_e, rate
    )
    return _bernoulli_result(int(events.sum()), n_trials)


def estimate_nonzero_secrecy(
    config: SystemConfig,
    scheme: Scheme,
    n_trials: int,
    seed: int = 0,
) -> EstimatorResult:
    """Estimate the probability of strictly positive secrecy capacity.

    Complementary to ``estimate_outage`` at rate 0 on the same seed:
    the two estimates sum to 1 exactly.
    """
    if scheme is Scheme.TAS_ALAMOUTI:
        config.require_two_transmit_antennas()
    draws = draw_components(config.n_alice, config.n_bob, config.n_eve, n_trials, seed)
    events = ~outage_events(
        draws, scheme, config.gamma_bar_b, config.gamma_bar_e, 0.0
    )
    return _bernoulli_result(int(events.sum()), n_trials)
