"""Synthetic ground truth under the model's own generative assumptions.

Per-pair rates are drawn i.i.d. from an exponential distribution, each
layer observes a pair with a fixed coverage probability, and observed
weights are Poisson draws around the pair's rate.  Recovering the rates
from the generated layers validates the estimator end to end.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .core import AggregatedNetwork, LayerGraph, MultilayerNetwork, NodeUniverse, Pair
from .errors import DegenerateValues, ParseError, UniverseMismatch

_POISSON_INVERSION_MAX = 30.0


@dataclass(frozen=True)
class SyntheticTruth:
    """Ground-truth rates and the parameters that produced them."""

    universe: NodeUniverse
    lambda_star: dict[Pair, float]
    theta_star: float
    coverage: float
    seed: int


@dataclass(frozen=True)
class RecoveryMetrics:
    pearson_lambda: float
    mean_abs_err: float
    theta_rel_err: float

    def to_dict(self) -> dict:
        return {
            "pearson_lambda": self.pearson_lambda,
            "mean_abs_err": self.mean_abs_err,
            "theta_rel_err": self.theta_rel_err,
        }


def _poisson_from_uniform(lam: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Poisson draws by CDF inversion: smallest k with u < F(k).

    Only valid for moderate rates; callers route large rates to the
    normal approximation.
    """
    counts = np.zeros(lam.shape, dtype=np.int64)
    prob = np.exp(-lam)
    cdf = prob.copy()
    active = cdf <= u
    for _ in range(500):
        if not active.any():
            break
        counts[active] += 1
        prob[active] *= lam[active] / counts[active]
        cdf[active] += prob[active]
        active &= cdf <= u
    return counts


def _poisson(lam: np.ndarray, u: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Inversion below rate 30, rounded normal approximation above."""
    small = lam < _POISSON_INVERSION_MAX
    out = np.zeros(lam.shape, dtype=np.int64)
    out[small] = _poisson_from_uniform(lam[small], u[small])
    large = ~small
    if large.any():
        approx = np.rint(lam[large] + np.sqrt(lam[large]) * z[large])
        out[large] = np.maximum(approx, 0.0).astype(np.int64)
    return out


def generate_synthetic(
    n: int,
    d: int,
    theta_star: float = 1.0,
    coverage: float = 1.0,
    seed: int = 0,
) -> tuple[MultilayerNetwork, SyntheticTruth]:
    """Draw a multilayer network from the generative model.

    Reproducible from the seed: a PCG64 generator supplies, in order,
    one uniform per pair (inverted to the exponential rate), then per
    layer-pair cell one coverage uniform, one Poisson uniform, and one
    standard normal for the large-rate fallback.

    Zero-weight observations are kept in the measurable sets, so the
    derived observation counts see them as evidence.
    """
    if n < 2 or d < 1:
        raise ValueError("need n >= 2 nodes and d >= 1 layers")
    if not (0.0 < coverage <= 1.0):
        raise ValueError("coverage must be in (0, 1]")
    if theta_star <= 0:
        raise ValueError("theta_star must be positive")

    width = len(str(n - 1))
    universe = NodeUniverse(tuple(f"n{i:0{width}d}" for i in range(n)))
    pairs = list(combinations(range(n), 2))
    m = len(pairs)

    rng = np.random.default_rng(seed)
    lam_star = -np.log1p(-rng.random(m)) / theta_star
    measured = rng.random((d, m)) < coverage
    u_pois = rng.random((d, m))
    z_norm = rng.standard_normal((d, m))

    lam_grid = np.broadcast_to(lam_star, (d, m))
    xi = _poisson(np.ascontiguousarray(lam_grid), u_pois, z_norm)

    layers = []
    for alpha in range(d):
        idx = np.nonzero(measured[alpha])[0]
        weights = {pairs[i]: float(xi[alpha, i]) for i in idx if xi[alpha, i] > 0}
        measurable = frozenset(pairs[i] for i in idx)
        layers.append(LayerGraph(universe, weights, measurable))
    name_width = len(str(d))
    names = tuple(f"layer{alpha + 1:0{name_width}d}" for alpha in range(d))
    net = MultilayerNetwork(universe, tuple(layers), names)

    truth = SyntheticTruth(
        universe=universe,
        lambda_star={pair: float(v) for pair, v in zip(pairs, lam_star)},
        theta_star=theta_star,
        coverage=coverage,
        seed=seed,
    )
    return net, truth


def recovery_metrics(est: AggregatedNetwork, truth: SyntheticTruth) -> RecoveryMetrics:
    """Score an estimate against ground truth over the observed pairs."""
    if est.universe != truth.universe:
        raise UniverseMismatch("estimate and truth use different universes")
    pairs = sorted(est.lam)
    if len(pairs) < 2:
        raise DegenerateValues("need at least two observed pairs")
    est_vals = np.array([est.lam[p] for p in pairs])
    true_vals = np.array([truth.lambda_star[p] for p in pairs])
    pearson = float(np.corrcoef(est_vals, true_vals)[0, 1])
    mean_abs_err = float(np.abs(est_vals - true_vals).mean())
    theta_rel_err = abs(est.theta - truth.theta_star) / truth.theta_star
    return RecoveryMetrics(pearson, mean_abs_err, theta_rel_err)


def truth_to_csv(truth: SyntheticTruth) -> str:
    """Rate table as ``node_u,node_v,lambda_star`` rows (all pairs)."""
    labels = truth.universe.labels
    lines = ["node_u,node_v,lambda_star"]
    for i, j in sorted(truth.lambda_star):
        lines.append(f"{labels[i]},{labels[j]},{truth.lambda_star[(i, j)]!r}")
    return "\n".join(lines) + "\n"


def truth_meta(truth: SyntheticTruth) -> dict:
    return {"theta_star": truth.theta_star, "seed": truth.seed, "coverage": truth.coverage}


def truth_from_csv(text: str, meta: dict) -> SyntheticTruth:
    """Inverse of truth_to_csv + truth_meta."""
    rows = list(csv.reader(text.splitlines()))
    rows = [row for row in rows if row and any(cell.strip() for cell in row)]
    if len(rows) < 2:
        raise ParseError("expected a header and at least one rate row")
    by_label: dict[tuple[str, str], float] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, found {len(row)}", line=lineno)
        u, v = row[0].strip(), row[1].strip()
        try:
            value = float(row[2])
        except ValueError:
            raise ParseError(f"malformed rate {row[2]!r}", line=lineno, column=3) from None
        by_label[(u, v) if u < v else (v, u)] = value
    universe = NodeUniverse(tuple(sorted({n for pair in by_label for n in pair})))
    lambda_star = {universe.pair(u, v): w for (u, v), w in by_label.items()}
    return SyntheticTruth(
        universe=universe,
        lambda_star=lambda_star,
        theta_star=float(meta["theta_star"]),
        coverage=float(meta["coverage"]),
        seed=int(meta["seed"]),
    )
