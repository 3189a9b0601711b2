"""Per-sample source recovery from two mixtures and an estimated matrix.

Every active sample defines a direction angle arctan(x2/x1).  The two
estimated columns whose angles lie closest to it form the base pair; solving
the 2x2 system on that pair yields the pair's source values and every other
source is set to zero for that sample.  Recovered column k carries the source
scaled by its true first-row gain a1k, the inherent scaling of the
column-normalized estimation model.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .estimation import EstimatedMatrix

DEGENERATE_TOL = 1e-12


class BasePair(NamedTuple):
    """Indices of the two estimated columns selected for one sample."""

    i: int
    j: int


def column_angles(est: EstimatedMatrix) -> np.ndarray:
    """Direction angle arctan(r) of every estimated column, in (-pi/2, pi/2)."""
    return np.arctan(est.ratios)


def sample_angle(x1: float, x2: float) -> float:
    """Direction angle of one mixture sample; x1 == 0 folds to pi/2."""
    if x1 == 0.0 and x2 == 0.0:
        raise ValueError("inactive sample: both mixture values are zero")
    if x1 == 0.0:
        return float(np.pi / 2)
    return float(np.arctan(x2 / x1))


def select_base_pair(theta_t: float, angles: np.ndarray) -> BasePair:
    """The two column angles nearest theta_t, ties broken by lower index."""
    a = np.asarray(angles, dtype=float)
    if a.ndim != 1 or a.size < 2:
        raise ValueError(f"base pair selection needs at least 2 column angles, got {a.size}")
    order = np.argsort(np.abs(a - theta_t), kind="stable")
    return BasePair(int(order[0]), int(order[1]))


def solve_pair(est: EstimatedMatrix, pair: BasePair, x1: float, x2: float) -> np.ndarray:
    """Solve x = [1 1; a_i a_j] [s_i; s_j] for one sample, zeros elsewhere."""
    a = est.ratios
    a_i, a_j = float(a[pair.i]), float(a[pair.j])
    denom = a_j - a_i
    if abs(denom) < DEGENERATE_TOL:
        raise ValueError(f"degenerate pair: ratios {a_i} and {a_j} nearly coincide")
    out = np.zeros(est.n_sources)
    out[pair.i] = (a_j * x1 - x2) / denom
    out[pair.j] = (x2 - a_i * x1) / denom
    return out


def separate(
    mixtures: np.ndarray,
    est: EstimatedMatrix,
    activity_eps: float,
    return_pairs: bool = False,
):
    """Recover (T, N) source estimates from (T, 2) mixtures.

    Samples with max(|x1|, |x2|) <= activity_eps are left all-zero.  With
    return_pairs=True the (T, 2) array of selected column indices is returned
    as well, -1 marking inactive samples.
    """
    x = np.asarray(mixtures, dtype=float)
    if x.ndim != 2 or x.shape[1] != 2:
        raise ValueError(f"separation needs exactly 2 mixture channels, got shape {x.shape}")
    if not activity_eps > 0.0:
        raise ValueError(f"activity_eps must be positive, got {activity_eps}")
    if est.n_sources < 2:
        raise ValueError("separation needs at least 2 estimated columns")

    x1, x2 = x[:, 0], x[:, 1]
    active = np.maximum(np.abs(x1), np.abs(x2)) > activity_eps
    out = np.zeros((x.shape[0], est.n_sources))
    pairs = np.full((x.shape[0], 2), -1, dtype=np.int64)

    rows = np.flatnonzero(active)
    if rows.size:
        x1a, x2a = x1[rows], x2[rows]
        nonzero = x1a != 0.0
        ratio = np.divide(x2a, x1a, out=np.zeros_like(x2a), where=nonzero)
        theta = np.arctan(ratio)
        theta[~nonzero] = np.pi / 2
        dist = np.abs(theta[:, None] - column_angles(est)[None, :])
        nearest = np.argsort(dist, axis=1, kind="stable")[:, :2]
        i, j = nearest[:, 0], nearest[:, 1]
        a_i, a_j = est.ratios[i], est.ratios[j]
        denom = a_j - a_i
        if np.any(np.abs(denom) < DEGENERATE_TOL):
            raise ValueError("degenerate pair: selected column ratios nearly coincide")
        out[rows, i] = (a_j * x1a - x2a) / denom
        out[rows, j] = (x2a - a_i * x1a) / denom
        pairs[rows, 0] = i
        pairs[rows, 1] = j

    if return_pairs:
        return out, pairs
    return out
