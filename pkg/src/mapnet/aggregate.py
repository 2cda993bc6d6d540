"""MAP aggregation: alternating closed-form updates for edge rates and prior.

The model treats each layer's weight for a pair as a Poisson draw around a
latent rate, with an exponential prior (rate theta) shared by all pairs.
The log-posterior, up to constants, is

    sum over pairs of [ -k*lam + S*log(lam) + log(theta) - lam*theta ]

and is maximized by alternating the exact coordinate updates
``lam = S / (k + theta)`` and ``theta = P / sum(lam)``.  Both half-steps
are closed-form argmaxes, so the objective never decreases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping

import numpy as np

from .core import (
    AggregatedNetwork,
    AggregationInput,
    MultilayerNetwork,
    Pair,
    observation_summaries,
)
from .errors import BracketingFailure, DegenerateAllZero, DomainError

_THETA_DIVERGED = 1e100


@dataclass(frozen=True)
class EmConfig:
    """Solver settings.

    tol is the relative change in theta between iterations; init is
    "deterministic" (lam = S/k) or "random" (seeded draws for both
    parameters).  unweighted_mode treats every pair as measured in every
    layer with presence/absence weights, so the estimate becomes the rate
    of presence up to a common factor.
    """

    tol: float = 1e-10
    max_iter: int = 10000
    init: str = "deterministic"
    seed: int = 0
    unweighted_mode: bool = False
    track_objective: bool = False

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.init not in ("deterministic", "random"):
            raise ValueError(f"unknown init {self.init!r}")


def _sorted_arrays(inp: AggregationInput) -> tuple[list[Pair], np.ndarray, np.ndarray]:
    pairs = sorted(inp.k)
    k = np.array([inp.k[p] for p in pairs], dtype=float)
    s = np.array([inp.s[p] for p in pairs], dtype=float)
    return pairs, k, s


def _objective(k: np.ndarray, s: np.ndarray, lam: np.ndarray, theta: float, pair_count: int) -> float:
    if np.any((s > 0) & (lam <= 0)):
        raise DomainError("lambda must be positive wherever the weight sum is positive")
    positive = lam > 0
    slog = np.zeros_like(lam)
    slog[positive] = s[positive] * np.log(lam[positive])
    return float(
        -(k * lam).sum() + slog.sum() - theta * lam.sum() + pair_count * math.log(theta)
    )


def log_posterior(inp: AggregationInput, lam: Mapping[Pair, float], theta: float) -> float:
    """Log-posterior (up to constants) of an estimate.

    The sum runs over all ``pair_count`` pairs with the convention
    0*log(0) = 0; pairs never observed contribute log(theta) only.
    """
    if theta <= 0:
        raise DomainError("theta must be positive")
    for pair, value in lam.items():
        if value < 0:
            raise DomainError(f"negative lambda on pair {pair}")
        if value != 0 and pair not in inp.k:
            raise DomainError(f"nonzero lambda on unobserved pair {pair}")
    pairs, k, s = _sorted_arrays(inp)
    lam_arr = np.array([lam.get(p, 0.0) for p in pairs], dtype=float)
    return _objective(k, s, lam_arr, theta, inp.pair_count)


def em_aggregate(inp: AggregationInput, cfg: EmConfig = EmConfig()) -> AggregatedNetwork:
    """Maximize the log-posterior by alternating the closed-form updates.

    Stops when the relative change in theta falls below ``cfg.tol``; the
    returned estimate satisfies theta * sum(lam) = P exactly and
    lam * (k + theta) = S to solver tolerance.  When the total observed
    weight does not exceed the pair count the prior rate diverges; the
    run is then cut off and flagged as not converged.

    Raises DegenerateAllZero when every weight sum is zero.
    """
    pairs, k, s = _sorted_arrays(inp)
    if not np.any(s > 0):
        raise DegenerateAllZero("every pair has zero observed weight")
    pair_count = inp.pair_count

    if cfg.init == "deterministic":
        lam = s / k
        theta = pair_count / float(lam.sum())
    else:
        rng = np.random.default_rng(cfg.seed)
        lam = rng.exponential(1.0, size=len(pairs))
        theta = 10.0 ** rng.uniform(-3.0, 3.0)

    trace: list[float] | None = None
    if cfg.track_objective:
        trace = [_objective(k, s, lam, theta, pair_count)]

    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_iter + 1):
        lam = s / (k + theta)
        theta_new = pair_count / float(lam.sum())
        if trace is not None:
            trace.append(_objective(k, s, lam, theta_new, pair_count))
        if theta_new > _THETA_DIVERGED:
            theta = theta_new
            break
        if abs(theta_new - theta) <= cfg.tol * theta:
            theta = theta_new
            converged = True
            break
        theta = theta_new

    lam_map = {pair: float(value) for pair, value in zip(pairs, lam)}
    return AggregatedNetwork(
        universe=inp.universe,
        lam=lam_map,
        theta=theta,
        iterations=iterations,
        converged=converged,
        final_objective=_objective(k, s, lam, theta, pair_count),
        objective_trace=tuple(trace) if trace is not None else None,
    )


def theta_fixed_point_oracle(inp: AggregationInput) -> float:
    """Solve the scalar fixed-point equation for theta by bisection.

    At the optimum theta satisfies theta * sum(S / (k + theta)) = P, a
    strictly increasing function of theta, so a bracketed root is unique.
    Independent of the alternating solver; used to cross-check it.

    Raises BracketingFailure when no sign change exists (all-zero weights,
    or total weight not exceeding the pair count).
    """
    _, k, s = _sorted_arrays(inp)
    pair_count = inp.pair_count

    def g(theta: float) -> float:
        return theta * float((s / (k + theta)).sum()) - pair_count

    hi = 1.0
    while g(hi) <= 0:
        hi *= 2.0
        if hi > 1e16:
            raise BracketingFailure(
                "no finite prior rate: total observed weight does not exceed the pair count"
            )
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-15 * hi:
            break
    return 0.5 * (lo + hi)


def presence_summaries(
    net: MultilayerNetwork, pair_count_mode: str = "unordered"
) -> AggregationInput:
    """Summaries for undistinguished layers: every pair counts in every layer.

    k is the layer count D for all unordered pairs and S is the number of
    layers where the pair is present (weight > 0), so the aggregate weight
    is the rate of presence scaled by 1 / (D + theta).
    """
    n = net.universe.size
    if n < 2:
        raise DegenerateAllZero("universe has fewer than two nodes")
    depth = net.depth
    presence: dict[Pair, int] = {}
    for layer in net.layers:
        for pair in layer.weights:
            presence[pair] = presence.get(pair, 0) + 1
    k = {}
    s = {}
    for pair in combinations(range(n), 2):
        k[pair] = depth
        s[pair] = float(presence.get(pair, 0))
    pair_count = n * (n - 1) // 2 if pair_count_mode == "unordered" else n * n
    return AggregationInput(net.universe, k, s, pair_count)


def aggregate_network(
    net: MultilayerNetwork,
    cfg: EmConfig = EmConfig(),
    count_mode: str = "measurable",
    pair_count_mode: str = "unordered",
) -> AggregatedNetwork:
    """Summarize a multilayer network and run the solver in one call."""
    if cfg.unweighted_mode:
        inp = presence_summaries(net, pair_count_mode)
    else:
        inp = observation_summaries(net, count_mode, pair_count_mode)
    return em_aggregate(inp, cfg)
