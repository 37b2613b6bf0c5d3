"""Entropic complexity measures of a map.

Three per-map measures, all in bits:

* alphabet entropy: sum of the Shannon entropies of the columns of the
  map's padded code matrix (character-variation complexity);
* row entropy: log2 of the number of valid representations of the source
  code (one stand-alone pick, or one full selection across a scenario's
  choice lists);
* the uncertainty-rate baseline log2(m) used by prior work for comparison.

Plus corpus-level z-score normalization and the optional frequency
adjustment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import DegenerateMeasureError, EmptyMapError
from .gem_io import ALPHABET, PAD_CHAR, CodeMatrix, MapRecord, build_matrix, encode_codes

# Positive per-position weights, one per matrix column.
WeightVector = Sequence[float]


@dataclass(frozen=True)
class MapScores:
    """Raw entropic measures of one map."""

    source: str
    m: int
    m0: int
    v: int
    h_a: float
    h_b: float
    ur: float
    h_a_weighted: float | None = None


@dataclass(frozen=True)
class NormalizedScores:
    """Corpus-normalized z-scores of one map, optionally frequency-adjusted."""

    source: str
    z_alpha: float
    z_beta: float
    z_ur: float
    adjusted_z_alpha: float | None = None
    adjusted_z_beta: float | None = None
    adjusted_z_ur: float | None = None


def column_entropy(column: Sequence[str]) -> float:
    """Shannon entropy (bits) of one column of alphabets.

    Probabilities are empirical frequencies count/m with 0*log(0) = 0.
    """
    chars = list(column)
    if not chars:
        raise ValueError("column is empty")
    valid = set(ALPHABET + PAD_CHAR)
    for c in chars:
        if c not in valid:
            raise ValueError(f"alphabet {c!r} outside [A-Z0-9] and pad")
    codes = encode_codes(chars, 1)
    return float(_kernels.matrix_column_entropies(codes)[0])


def alphabet_entropy(matrix: CodeMatrix) -> float:
    """Sum of column entropies over all n columns of the matrix."""
    return float(np.sum(_kernels.matrix_column_entropies(matrix.codes)))


def _check_weights(weights: WeightVector, n: int) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.shape[0] != n:
        raise ValueError(f"expected {n} weights, got {w.shape}")
    if not np.all(w > 0):
        raise ValueError("weights must all be positive")
    return w


def weighted_alphabet_entropy(matrix: CodeMatrix, weights: WeightVector) -> float:
    """Weighted average of the column entropies: sum(w_j * H_j) / sum(w_j)."""
    w = _check_weights(weights, matrix.n)
    cols = _kernels.matrix_column_entropies(matrix.codes)
    return float(np.dot(w, cols) / np.sum(w))


def count_valid_representations(record: MapRecord) -> int:
    """Number of valid representations of the source code.

    Each stand-alone code counts once; each scenario contributes the product
    of its choice-list sizes. Stand-alone-only maps give v = m0 = m; no-match
    maps give 0.
    """
    if record.m == 0:
        return 0
    v = record.m0
    for scenario in record.scenarios:
        product = 1
        for choice_list in scenario:
            product *= len(choice_list)
        v += product
    return v


def row_entropy(v: int) -> float:
    """log2 of the number of valid representations; undefined for v = 0."""
    if v < 1:
        raise EmptyMapError(message=f"row entropy undefined for v = {v}")
    return math.log2(v)


def ur_measure(m: int) -> float:
    """Prior-work uncertainty-rate baseline log2(m); undefined for m = 0."""
    if m < 1:
        raise EmptyMapError(message=f"UR undefined for m = {m}")
    return math.log2(m)


def score_map(record: MapRecord, weights: WeightVector | None = None) -> MapScores:
    """Compute all raw measures of one map. Raises for no-match maps."""
    if record.m == 0:
        raise EmptyMapError(record.source)
    matrix = build_matrix(record)
    cols = _kernels.matrix_column_entropies(matrix.codes)
    h_a = float(np.sum(cols))
    h_a_weighted = None
    if weights is not None:
        w = _check_weights(weights, matrix.n)
        h_a_weighted = float(np.dot(w, cols) / np.sum(w))
    v = count_valid_representations(record)
    return MapScores(
        source=record.source,
        m=record.m,
        m0=record.m0,
        v=v,
        h_a=h_a,
        h_b=row_entropy(v),
        ur=ur_measure(record.m),
        h_a_weighted=h_a_weighted,
    )


def score_maps(
    records: Sequence[MapRecord], weights: WeightVector | None = None
) -> tuple[list[MapScores], list[MapRecord]]:
    """Score every map of a corpus in one batched kernel pass.

    Returns (scores for maps with m >= 1, excluded no-match records). When
    ``weights`` is given it must cover the widest map; each map uses its
    first n positions.
    """
    included = [r for r in records if r.m > 0]
    excluded = [r for r in records if r.m == 0]
    if not included:
        return [], excluded

    targets_per_map = [[e.target for e in r.entries] for r in included]
    widths = np.array(
        [max(len(t) for t in targets) for targets in targets_per_map],
        dtype=np.int64,
    )
    heights = np.array([len(targets) for targets in targets_per_map], dtype=np.int64)

    if weights is not None:
        wfull = np.asarray(weights, dtype=np.float64)
        if wfull.ndim != 1 or not np.all(wfull > 0):
            raise ValueError("weights must be a flat list of positive numbers")
        widest = int(widths.max())
        if wfull.shape[0] < widest:
            raise ValueError(
                f"{wfull.shape[0]} weights cannot cover the widest map "
                f"({widest} positions)"
            )

    joined = "".join(
        code.ljust(int(n), PAD_CHAR)
        for targets, n in zip(targets_per_map, widths)
        for code in targets
    )
    flat = encode_codes([joined], len(joined)).reshape(-1) if joined else np.zeros(0, np.uint8)

    cols = _kernels.batch_column_entropies(flat, heights, widths)
    starts = np.concatenate(([0], np.cumsum(widths)))[:-1]
    h_a_all = np.add.reduceat(cols, starts)

    h_w_all = None
    if weights is not None:
        flat_w = np.concatenate([wfull[: int(n)] for n in widths])
        h_w_all = np.add.reduceat(cols * flat_w, starts) / np.add.reduceat(
            flat_w, starts
        )

    scores = []
    for i, record in enumerate(included):
        v = count_valid_representations(record)
        scores.append(
            MapScores(
                source=record.source,
                m=record.m,
                m0=record.m0,
                v=v,
                h_a=float(h_a_all[i]),
                h_b=row_entropy(v),
                ur=ur_measure(record.m),
                h_a_weighted=float(h_w_all[i]) if h_w_all is not None else None,
            )
        )
    return scores, excluded


_MEASURES = (("h_a", "z_alpha"), ("h_b", "z_beta"), ("ur", "z_ur"))


def normalize_scores(
    scores: Sequence[MapScores], denominator: str = "std"
) -> list[NormalizedScores]:
    """Center each measure over the corpus and divide by its spread.

    ``denominator`` is ``"std"`` (sample standard deviation, n-1) or
    ``"variance"`` (sample variance). Excluded maps must already be removed;
    a constant measure raises DegenerateMeasureError.
    """
    if denominator not in ("std", "variance"):
        raise ValueError(f"denominator must be 'std' or 'variance', got {denominator!r}")
    if len(scores) < 2:
        raise ValueError("normalization needs at least 2 scored maps")
    z_columns = {}
    for field, _ in _MEASURES:
        values = np.array([getattr(s, field) for s in scores], dtype=np.float64)
        var = float(np.var(values, ddof=1))
        denom = math.sqrt(var) if denominator == "std" else var
        if denom == 0.0:
            raise DegenerateMeasureError(field)
        z_columns[field] = (values - values.mean()) / denom
    return [
        NormalizedScores(
            source=s.source,
            z_alpha=float(z_columns["h_a"][i]),
            z_beta=float(z_columns["h_b"][i]),
            z_ur=float(z_columns["ur"][i]),
        )
        for i, s in enumerate(scores)
    ]


def adjust_by_frequency(z: NormalizedScores, p: float) -> NormalizedScores:
    """Scale the z-scores by the probability of the clinical concept."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    return replace(
        z,
        adjusted_z_alpha=z.z_alpha * p,
        adjusted_z_beta=z.z_beta * p,
        adjusted_z_ur=z.z_ur * p,
    )
