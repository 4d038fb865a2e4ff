"""Cache size as a function of hit ratio under Zipf popularity, and its tangent envelope."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class ConstructionError(RuntimeError):
    pass


@lru_cache(maxsize=16)
def _cumulative(s: float, catalog: int) -> np.ndarray:
    ranks = np.arange(1, catalog + 1, dtype=float)
    return np.concatenate([[0.0], np.cumsum(ranks ** -s)])


def hit_ratio(percent, s: float = 0.8, catalog: int = 10_000):
    """Hit ratio of a cache holding the ``percent``% most popular objects."""
    c = _cumulative(s, catalog)
    n = np.floor(np.asarray(percent, dtype=float) * catalog / 100 + 1e-9).astype(int)
    return c[np.clip(n, 0, catalog)] / c[-1]


def cache_size(delta, s: float = 0.8, catalog: int = 10_000):
    """Cache percent needed for hit ratio ``delta``, interpolating linearly
    between whole objects (continuous inverse of :func:`hit_ratio`)."""
    c = _cumulative(s, catalog)
    t = np.asarray(delta, dtype=float) * c[-1]
    k = np.clip(np.searchsorted(c, t), 1, catalog)
    frac = (t - c[k - 1]) / (c[k] - c[k - 1])
    return (k - 1 + frac) * 100.0 / catalog


@dataclass(frozen=True)
class PiecewiseSegments:
    """Lines ``Z >= a_k * delta + b_k``; the envelope is also floored at 0."""
    slopes: tuple[float, ...]
    intercepts: tuple[float, ...]
    tangent_points: tuple[float, ...] = ()
    max_gap: float = float("nan")

    def __len__(self) -> int:
        return len(self.slopes)

    @property
    def pairs(self) -> list[tuple[float, float]]:
        return list(zip(self.slopes, self.intercepts))

    def envelope(self, delta):
        d = np.asarray(delta, dtype=float)
        lines = np.array(self.slopes)[:, None] * d.ravel()[None, :] + np.array(self.intercepts)[:, None]
        return np.maximum(0.0, lines.max(axis=0)).reshape(d.shape)


def build_piecewise_segments(zipf_exponent: float = 0.8, catalog_size: int = 10_000,
                             k: int = 5) -> PiecewiseSegments:
    """``k`` tangents to the convex size curve at evenly spaced hit ratios
    ``(2i - 1) / 2k`` (0.1, 0.3, ..., 0.9 for ``k = 5``)."""
    if not zipf_exponent > 0 or catalog_size < 100 or k < 2:
        raise ValueError("need s > 0, catalogue >= 100 and at least 2 segments")
    points = [(2 * i - 1) / (2 * k) for i in range(1, k + 1)]
    h = 1e-6
    slopes, intercepts = [], []
    for p in points:
        z = float(cache_size(p, zipf_exponent, catalog_size))
        a = float((cache_size(p + h, zipf_exponent, catalog_size)
                   - cache_size(p - h, zipf_exponent, catalog_size)) / (2 * h))
        slopes.append(a)
        intercepts.append(z - a * p)
    if any(b2 < b1 for b1, b2 in zip(slopes, slopes[1:])) or slopes[0] < 0:
        raise ConstructionError("size curve is not convex and increasing at the tangent points")
    grid = np.linspace(0.0, 1.0, 1001)
    seg = PiecewiseSegments(tuple(slopes), tuple(intercepts), tuple(points))
    gap = float(np.max(cache_size(grid, zipf_exponent, catalog_size) - seg.envelope(grid)))
    return PiecewiseSegments(seg.slopes, seg.intercepts, seg.tangent_points, gap)
