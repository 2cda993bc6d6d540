"""Network evaluation: spectral entropy, summary statistics, CDFs, fit quality.

The Von Neumann entropy of a weighted graph is the Shannon entropy of the
Laplacian spectrum after normalizing the Laplacian by twice the total edge
weight, which makes its trace (and the eigenvalue sum) equal to one.  A
more "mixed" network spreads spectral mass over more directions and scores
higher.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import LayerGraph
from .errors import DegenerateValues, DomainError, EmptyGraph

_EIG_CLIP = 1e-12


def _log_fn(log_base: str):
    if log_base == "natural":
        return np.log
    if log_base == "base2":
        return np.log2
    raise ValueError(f"unknown log_base {log_base!r}")


@dataclass(frozen=True)
class EntropySpectrum:
    """Eigenvalues of the unit-trace Laplacian and their entropy."""

    gammas: tuple[float, ...]
    entropy: float


@dataclass(frozen=True)
class NetworkReport:
    """Per-network metric bundle: strength statistics, clustering,
    eigenvector centrality, and Von Neumann entropy."""

    n_nodes: int
    strength_avg: float
    strength_min: float
    strength_max: float
    clustering_avg: float
    eigencentrality_mean: float
    entropy: float
    log_base: str

    def to_dict(self) -> dict:
        return {
            "n_nodes": self.n_nodes,
            "strength_avg": self.strength_avg,
            "strength_min": self.strength_min,
            "strength_max": self.strength_max,
            "clustering_avg": self.clustering_avg,
            "eigencentrality_mean": self.eigencentrality_mean,
            "entropy": self.entropy,
            "log_base": self.log_base,
        }


def adjacency_matrix(g: LayerGraph) -> np.ndarray:
    """Dense symmetric weighted adjacency over the full universe."""
    n = g.universe.size
    a = np.zeros((n, n))
    for (i, j), w in g.weights.items():
        a[i, j] = w
        a[j, i] = w
    return a


def node_strengths(g: LayerGraph) -> np.ndarray:
    """Sum of incident edge weights per node, in universe order."""
    return adjacency_matrix(g).sum(axis=1)


def measured_weight_values(g: LayerGraph) -> list[float]:
    """Weight of every measured pair, zeros included, in pair order."""
    return [g.weight(pair) for pair in sorted(g.measurable)]


def von_neumann_entropy(g: LayerGraph, log_base: str = "natural") -> EntropySpectrum:
    """Spectrum and entropy of the Laplacian scaled to unit trace.

    Eigenvalues below 1e-12 (numerical negatives included) are clipped to
    zero before the gamma*log(gamma) sum, with 0*log(0) = 0.
    """
    log = _log_fn(log_base)
    a = adjacency_matrix(g)
    total = a.sum() / 2.0
    if total <= 0:
        raise EmptyGraph("graph has no positive edge weight")
    lap = np.diag(a.sum(axis=1)) - a
    gammas = np.linalg.eigvalsh(lap / (2.0 * total))
    gammas = np.where(gammas < _EIG_CLIP, 0.0, gammas)
    positive = gammas > 0
    entropy = float(-(gammas[positive] * log(gammas[positive])).sum())
    return EntropySpectrum(tuple(float(x) for x in gammas), entropy)


def _weighted_clustering_avg(a: np.ndarray) -> float:
    # geometric-mean triangle intensity with weights scaled by the max
    max_w = a.max()
    if max_w <= 0:
        return 0.0
    cbrt = np.cbrt(a / max_w)
    triangles = np.einsum("ij,jk,ki->i", cbrt, cbrt, cbrt)
    degree = (a > 0).sum(axis=1)
    coeff = np.zeros(a.shape[0])
    multi = degree >= 2
    coeff[multi] = triangles[multi] / (degree[multi] * (degree[multi] - 1))
    return float(coeff.mean())


def _principal_eigenvector(a: np.ndarray, tol: float = 1e-10, max_iter: int = 100000) -> np.ndarray:
    """Power iteration for the Perron vector, L2-normalized.

    A positive diagonal shift keeps the dominant eigenvalue unique in
    magnitude (bipartite graphs otherwise oscillate).
    """
    n = a.shape[0]
    shift = 1.0 + a.sum(axis=1).max()
    v = np.full(n, 1.0 / math.sqrt(n))
    for _ in range(max_iter):
        w = a @ v + shift * v
        v = w / np.linalg.norm(w)
        mu = float(v @ a @ v)
        if np.linalg.norm(a @ v - mu * v) <= tol * max(mu, _EIG_CLIP):
            break
    return v


def network_report(g: LayerGraph, log_base: str = "natural") -> NetworkReport:
    """Table of summary statistics for one weighted network.

    Clustering uses the geometric-mean triangle form with weights divided
    by the maximum weight; nodes of degree < 2 count as zero.  Eigenvector
    centrality is summarized by the mean entry of the unit-norm principal
    eigenvector.
    """
    a = adjacency_matrix(g)
    if a.sum() <= 0:
        raise EmptyGraph("graph has no positive edge weight")
    strengths = a.sum(axis=1)
    centrality = _principal_eigenvector(a)
    return NetworkReport(
        n_nodes=g.universe.size,
        strength_avg=float(strengths.mean()),
        strength_min=float(strengths.min()),
        strength_max=float(strengths.max()),
        clustering_avg=_weighted_clustering_avg(a),
        eigencentrality_mean=float(centrality.mean()),
        entropy=von_neumann_entropy(g, log_base).entropy,
        log_base=log_base,
    )


def weight_cdf(values) -> list[tuple[float, float]]:
    """Empirical CDF points (value, fraction of samples <= value),
    one per distinct value, ascending."""
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise ValueError("need at least one value")
    uniq, counts = np.unique(arr, return_counts=True)
    fractions = np.cumsum(counts) / arr.size
    return [(float(v), float(f)) for v, f in zip(uniq, fractions)]


def exponential_fit_r2(values, theta: float) -> float:
    """Coefficient of determination of an exponential CDF against the data.

    Residuals are empirical CDF minus 1 - exp(-theta * v) at the sorted
    distinct values; the total sum of squares is taken about the mean
    empirical CDF.
    """
    if theta <= 0:
        raise DomainError("theta must be positive")
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0 or np.unique(arr).size < 2:
        raise DegenerateValues("need at least two distinct values")
    if arr.min() <= 0:
        raise DomainError("values must be positive")
    points = weight_cdf(arr)
    empirical = np.array([f for _, f in points])
    model = 1.0 - np.exp(-theta * np.array([v for v, _ in points]))
    ss_res = float(((empirical - model) ** 2).sum())
    ss_tot = float(((empirical - empirical.mean()) ** 2).sum())
    return 1.0 - ss_res / ss_tot
