"""Correlation layers from expression data.

Edge weights are pairwise-complete Pearson correlations: for each gene
pair only the conditions where both genes have values enter the formula,
and pairs with too few shared observations stay unmeasured.  Negative
coefficients are clamped to zero and weights are optionally quantized to
integer levels, mirroring how co-expression layers are usually built
before aggregation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import LayerGraph, MultilayerNetwork, NodeUniverse, Pair
from .errors import DegenerateConditionWarning, LengthMismatch, NegativeWeight
from .ingest import ExpressionDataset


@dataclass(frozen=True)
class CorrelationConfig:
    """Knobs for building one correlation layer.

    quantize_levels=None keeps raw clamped coefficients; zscore applies
    per-condition normalization before correlating.
    """

    min_pairs: int = 5
    clamp_negative: bool = True
    quantize_levels: int | None = 10
    zscore: bool = False

    def __post_init__(self):
        if self.min_pairs < 2:
            raise ValueError("min_pairs must be at least 2")
        if self.quantize_levels is not None and self.quantize_levels < 1:
            raise ValueError("quantize_levels must be at least 1 when set")


def _round_half_away(x: float) -> float:
    return math.copysign(math.floor(abs(x) + 0.5), x)


def _pearson_masked(x: np.ndarray, y: np.ndarray, min_pairs: int) -> float | None:
    both = ~(np.isnan(x) | np.isnan(y))
    if int(both.sum()) < min_pairs:
        return None
    xs = x[both]
    ys = y[both]
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        return None
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def pearson_pairwise_complete(x, y, min_pairs: int = 5) -> float | None:
    """Pearson correlation over positions where both series have values.

    Missing entries may be None or NaN.  Returns None (not zero) when
    fewer than ``min_pairs`` positions are shared or when either paired
    sub-vector has zero variance.
    """
    xa = np.asarray([np.nan if v is None else v for v in x], dtype=float)
    ya = np.asarray([np.nan if v is None else v for v in y], dtype=float)
    if xa.shape != ya.shape:
        raise LengthMismatch(f"sequences differ in length: {len(xa)} vs {len(ya)}")
    return _pearson_masked(xa, ya, min_pairs)


def zscore_normalize(ds: ExpressionDataset) -> ExpressionDataset:
    """Z-score each condition over its present values (population sigma).

    Conditions with fewer than 2 present values or zero spread are left
    unchanged and reported through a DegenerateConditionWarning.
    """
    values = np.array(ds.values)
    degenerate = []
    for c in range(ds.n_conditions):
        col = values[:, c]
        present = ~np.isnan(col)
        if int(present.sum()) < 2:
            degenerate.append(ds.conditions[c])
            continue
        mean = col[present].mean()
        sigma = col[present].std()
        if sigma == 0.0:
            degenerate.append(ds.conditions[c])
            continue
        values[present, c] = (col[present] - mean) / sigma
    if degenerate:
        warnings.warn(DegenerateConditionWarning(degenerate), stacklevel=2)
    return ExpressionDataset(ds.genes, ds.conditions, values, name=ds.name)


def build_correlation_layer(
    ds: ExpressionDataset,
    cfg: CorrelationConfig,
    universe: NodeUniverse | None = None,
) -> LayerGraph:
    """Correlation layer over the dataset's gene pairs.

    A pair is measurable when its pairwise-complete correlation exists;
    its weight is the clamped (and optionally quantized) coefficient, so
    anti-correlated pairs are measured zeros rather than absent.  The
    optional ``universe`` places the layer in a larger shared node set.
    """
    if universe is None:
        universe = NodeUniverse(tuple(sorted(ds.genes)))
    data = ds.values if not cfg.zscore else zscore_normalize(ds).values
    gene_index = [universe.index(g) for g in ds.genes]

    weights: dict[Pair, float] = {}
    measurable: set[Pair] = set()
    n = ds.n_genes
    for a in range(n):
        xa = data[a]
        for b in range(a + 1, n):
            r = _pearson_masked(xa, data[b], cfg.min_pairs)
            if r is None:
                continue
            w = max(r, 0.0) if cfg.clamp_negative else r
            if cfg.quantize_levels is not None:
                w = _round_half_away(cfg.quantize_levels * w)
            if w < 0:
                raise NegativeWeight(
                    "negative correlation weight with clamp_negative disabled"
                )
            i, j = gene_index[a], gene_index[b]
            pair = (i, j) if i < j else (j, i)
            measurable.add(pair)
            if w > 0:
                weights[pair] = w
    return LayerGraph(universe, weights, frozenset(measurable))


def build_correlation_network(
    datasets: list[ExpressionDataset], cfg: CorrelationConfig
) -> MultilayerNetwork:
    """One correlation layer per dataset over the shared gene universe."""
    if not datasets:
        raise ValueError("need at least one dataset")
    universe = NodeUniverse(tuple(sorted({g for ds in datasets for g in ds.genes})))
    layers = tuple(build_correlation_layer(ds, cfg, universe=universe) for ds in datasets)
    names = tuple(ds.name or f"ds{i + 1}" for i, ds in enumerate(datasets))
    return MultilayerNetwork(universe, layers, names)


def conflate(datasets: list[ExpressionDataset]) -> ExpressionDataset:
    """Concatenate datasets column-wise over the union of their genes.

    Condition labels are prefixed with the dataset name; a gene absent
    from a dataset gets missing values for all of its conditions.
    """
    if not datasets:
        raise ValueError("need at least one dataset")
    genes = sorted({g for ds in datasets for g in ds.genes})
    gene_row = {g: r for r, g in enumerate(genes)}
    conditions: list[str] = []
    blocks: list[np.ndarray] = []
    for idx, ds in enumerate(datasets):
        prefix = ds.name or f"ds{idx + 1}"
        conditions.extend(f"{prefix}:{c}" for c in ds.conditions)
        block = np.full((len(genes), ds.n_conditions), np.nan)
        rows = [gene_row[g] for g in ds.genes]
        block[rows, :] = ds.values
        blocks.append(block)
    if len(set(conditions)) != len(conditions):
        raise ValueError("conflated condition labels collide; give datasets distinct names")
    return ExpressionDataset(tuple(genes), tuple(conditions), np.hstack(blocks), name="conflated")
