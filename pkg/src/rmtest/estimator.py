"""Seeded Monte Carlo estimation and the exact-oracle dispatcher.

Every trial draws from its own RNG stream derived from (master seed, trial
index) through a 64-bit mixing finalizer, so estimates are bit-identical
no matter how trials are scheduled.  Intervals are Wilson score intervals,
which stay honest near p = 0 where the soundness bounds live.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

DEFAULT_BUDGET = 1 << 24
_WILSON_Z = 1.959963984540054  # two-sided 95%
_MASK = (1 << 64) - 1


def get_budget(override: int | None = None) -> int:
    """Enumeration-count cap: explicit override, else RMTEST_BUDGET, else 2^24."""
    if override is not None:
        return int(override)
    env = os.environ.get("RMTEST_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


def mix64(z: int) -> int:
    """splitmix64 finalizer."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for one trial: counter-mode split of the seed."""
    key = mix64((seed & _MASK) ^ mix64(index & _MASK))
    return np.random.Generator(np.random.Philox(key=key))


def wilson_interval(successes: int, trials: int) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("need at least one trial")
    z2 = _WILSON_Z**2
    phat = successes / trials
    denom = 1 + z2 / trials
    center = (phat + z2 / (2 * trials)) / denom
    half = (
        _WILSON_Z
        * ((phat * (1 - phat) / trials + z2 / (4 * trials**2)) ** 0.5)
        / denom
    )
    # at the extremes the exact endpoints are 0 and 1; keep them there
    low = 0.0 if successes == 0 else max(0.0, center - half)
    high = 1.0 if successes == trials else min(1.0, center + half)
    return (low, high)


@dataclass(frozen=True)
class EstimateResult:
    successes: int
    trials: int
    p_hat: Fraction
    ci_low: float
    ci_high: float
    seed: int


def estimate(
    event: Callable[[np.random.Generator], bool], trials: int, seed: int
) -> EstimateResult:
    """Run the sampler once per trial on its derived stream."""
    if trials < 1:
        raise ValueError("need at least one trial")
    successes = 0
    for i in range(trials):
        if event(trial_rng(seed, i)):
            successes += 1
    low, high = wilson_interval(successes, trials)
    return EstimateResult(successes, trials, Fraction(successes, trials), low, high, seed)


@dataclass(frozen=True)
class ProbeResult:
    """Outcome of the exact-vs-sampled dispatch, tagged with its mode."""

    mode: str  # "exact" | "sampled"
    enumeration_count: int
    exact: Fraction | None = None
    estimate: EstimateResult | None = None

    @property
    def p_hat(self) -> Fraction:
        return self.exact if self.mode == "exact" else self.estimate.p_hat


def exact_or_sample(
    enumeration_count: int,
    exact_fn: Callable[[], Fraction],
    event: Callable[[np.random.Generator], bool],
    trials: int,
    seed: int,
    budget: int | None = None,
) -> ProbeResult:
    """Exact oracle when the enumeration fits the budget, else Monte Carlo."""
    if enumeration_count <= get_budget(budget):
        return ProbeResult("exact", enumeration_count, exact=exact_fn())
    return ProbeResult(
        "sampled", enumeration_count, estimate=estimate(event, trials, seed)
    )
