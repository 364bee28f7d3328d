"""Erlang distribution utilities and the max-over-sum order statistic.

The squared norm of a block of ``k`` independent standard complex
normals is Erlang(k, 1/2) distributed, which is what connects these
routines to random-basis measurement attacks: the ratio
``max_i X_i / sum_i X_i`` over independent Erlang blocks lower-bounds
how much weight a random unit vector places on its best block.  Its
expectation is at least ``c log2(n) / sum_i k_i`` with
``c = (1 - 1/e - 1/2) / (2 log2 e) ~ 0.0457``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NegativeX

__all__ = [
    "ERLANG_MAX_CONSTANT",
    "ErlangParams",
    "erlang_cdf",
    "erlang_pdf",
    "erlang_sample",
    "erlang_sample_from_normals",
    "max_over_sum_estimate",
]

#: explicit constant in the max-over-sum lower bound, (1 - 1/e - 1/2)/(2 log2 e)
ERLANG_MAX_CONSTANT = (1.0 - math.exp(-1.0) - 0.5) / (2.0 * math.log2(math.e))


@dataclass(frozen=True)
class ErlangParams:
    """Shape (positive integer) and rate (positive real) of an Erlang law."""

    shape: int
    rate: float

    def __post_init__(self) -> None:
        if self.shape < 1 or int(self.shape) != self.shape:
            raise ValueError("shape must be a positive integer")
        if self.rate <= 0:
            raise ValueError("rate must be positive")


def erlang_pdf(p: ErlangParams, x: float) -> float:
    """Density ``rate^k x^(k-1) exp(-rate x) / (k-1)!`` at ``x >= 0``."""
    if x < 0:
        raise NegativeX(f"x must be nonnegative, got {x}")
    k, lam = p.shape, p.rate
    if x == 0:
        return lam if k == 1 else 0.0
    return lam**k * x ** (k - 1) * math.exp(-lam * x) / math.factorial(k - 1)


def erlang_cdf(p: ErlangParams, x: float) -> float:
    """``P[X <= x] = 1 - exp(-rate x) sum_{i<k} (rate x)^i / i!``."""
    if x < 0:
        raise NegativeX(f"x must be nonnegative, got {x}")
    k, lam = p.shape, p.rate
    z = lam * x
    term = 1.0
    tail = term
    for i in range(1, k):
        term *= z / i
        tail += term
    return 1.0 - math.exp(-z) * tail


def erlang_sample(p: ErlangParams, rng: np.random.Generator) -> float:
    """One draw as a sum of ``shape`` exponentials ``-ln(U) / rate``."""
    u = rng.random(p.shape)
    return float(-np.log1p(-u).sum() / p.rate)


def erlang_sample_from_normals(p: ErlangParams, rng: np.random.Generator) -> float:
    """One draw as a scaled sum of ``2 shape`` squared standard normals.

    A sum of ``2k`` squared standard normals is Erlang(k, 1/2); rescaling
    by ``1/(2 rate)`` moves it to the requested rate.  Slower than
    :func:`erlang_sample`; kept as an independent sampling route.
    """
    g = rng.standard_normal(2 * p.shape)
    return float((g * g).sum() / (2.0 * p.rate))


def max_over_sum_estimate(
    ks: Sequence[int],
    rate: float,
    trials: int,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """Monte Carlo mean and standard error of ``max_i X_i / sum_i X_i``.

    ``X_i`` are independent Erlang(``ks[i]``, ``rate``) variables drawn
    as sums of exponentials.  The ratio is scale free, so the value does
    not depend on ``rate``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    ks = [int(k) for k in ks]
    if not ks or any(k < 1 for k in ks):
        raise ValueError("all shapes must be positive integers")
    if rate <= 0:
        raise ValueError("rate must be positive")
    n = len(ks)
    if n == 1:
        return 1.0, 0.0
    k_total = sum(ks)
    offsets = np.cumsum([0] + ks)[:-1]
    # chunk trials to keep the exponential sample block under ~32 MB
    chunk = max(1, min(trials, (1 << 22) // k_total))
    acc = 0.0
    acc_sq = 0.0
    done = 0
    while done < trials:
        c = min(chunk, trials - done)
        block = rng.standard_exponential((c, k_total)) / rate
        sums = np.add.reduceat(block, offsets, axis=1)
        ratios = sums.max(axis=1) / sums.sum(axis=1)
        acc += float(ratios.sum())
        acc_sq += float((ratios * ratios).sum())
        done += c
    mean = acc / trials
    if trials == 1:
        return mean, 0.0
    var = max((acc_sq - trials * mean * mean) / (trials - 1), 0.0)
    return mean, math.sqrt(var / trials)
