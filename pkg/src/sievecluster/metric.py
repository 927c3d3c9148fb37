"""Finite metric spaces, non-expansive maps, and metric constructions.

Distances live in square numpy matrices. Zero distances between distinct
points are allowed throughout (the axioms checked are those of a
pseudometric plus symmetry). Points are addressed by string labels; every
space stores its labels sorted lexicographically, and the matrix rows are
permuted to match, so equal spaces compare equal regardless of input order.

Numeric policy: axiom checks use a relative tolerance scaled by the largest
matrix entry; after validation the matrix is exactly symmetric with an
exactly zero diagonal. Threshold comparisons elsewhere in the package are
exact and inclusive.
"""

from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np

from .errors import (
    AsymmetricMatrix,
    DuplicateLabel,
    NegativeDistance,
    NonzeroDiagonal,
    TriangleViolation,
)
from .rng import SplitMix64

REL_TOL = 1e-9

# Above this size the cubic triangle scan is replaced by deterministic
# sampling; see validate_metric.
_FULL_TRIANGLE_LIMIT = 600
_TRIANGLE_SAMPLES = 200_000


def _canonical_labels(labels: Iterable[str]) -> tuple[str, ...]:
    out = tuple(str(x) for x in labels)
    if len(set(out)) != len(out):
        seen = set()
        for x in out:
            if x in seen:
                raise DuplicateLabel(f"label {x!r} appears more than once")
            seen.add(x)
    return out


class FiniteMetricSpace:
    """A finite (pseudo)metric space: sorted labels plus a distance matrix.

    The constructor canonicalizes label order but does not re-check the
    metric axioms; use :func:`validate_metric` when the matrix comes from
    outside the library.
    """

    __slots__ = ("labels", "dist", "_index")

    def __init__(self, labels: Iterable[str], dist: np.ndarray):
        labels = _canonical_labels(labels)
        matrix = np.asarray(dist, dtype=np.float64)
        if matrix.shape != (len(labels), len(labels)):
            raise ValueError(
                f"distance matrix shape {matrix.shape} does not match "
                f"{len(labels)} labels"
            )
        if len(labels) == 0:
            raise ValueError("a metric space needs at least one point")
        order = sorted(range(len(labels)), key=lambda i: labels[i])
        if order != list(range(len(labels))):
            labels = tuple(labels[i] for i in order)
            matrix = matrix[np.ix_(order, order)]
        matrix = np.array(matrix, dtype=np.float64)
        matrix.setflags(write=False)
        self.labels = labels
        self.dist = matrix
        self._index = {lab: i for i, lab in enumerate(labels)}

    @property
    def n(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self._index[label]

    def distance(self, a: str, b: str) -> float:
        return float(self.dist[self._index[a], self._index[b]])

    def diameter(self) -> float:
        return float(self.dist.max())

    def pairwise_distances(self) -> list[float]:
        """Sorted distinct off-diagonal distances."""
        n = self.n
        iu = np.triu_indices(n, k=1)
        return sorted(set(float(v) for v in self.dist[iu]))

    def restrict(self, labels: Iterable[str]) -> "FiniteMetricSpace":
        keep = sorted(set(labels))
        missing = [x for x in keep if x not in self._index]
        if missing:
            raise KeyError(f"labels not in space: {missing}")
        idx = [self._index[x] for x in keep]
        return FiniteMetricSpace(keep, self.dist[np.ix_(idx, idx)])

    def to_dict(self) -> dict:
        """JSON form: {"points": [...], "distances": [[...], ...]}."""
        return {
            "points": list(self.labels),
            "distances": [[float(v) for v in row] for row in self.dist],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FiniteMetricSpace":
        if "points" not in data or "distances" not in data:
            raise ValueError("space JSON needs 'points' and 'distances'")
        return validate_metric(data["points"], data["distances"])

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteMetricSpace):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.dist, other.dist)

    def __hash__(self):
        return hash((self.labels, self.dist.tobytes()))

    def __repr__(self) -> str:
        return f"FiniteMetricSpace({self.n} points, diameter {self.diameter():g})"


def _check_triangle(labels: tuple[str, ...], d: np.ndarray, tol: float) -> None:
    n = len(labels)
    if n <= _FULL_TRIANGLE_LIMIT:
        best = d.copy()
        argk = np.zeros((n, n), dtype=np.int64)
        for k in range(n):
            via = np.add.outer(d[:, k], d[k, :])
            better = via < best
            if better.any():
                best = np.where(better, via, best)
                argk[better] = k
        bad = d > best + tol
        if bad.any():
            i, j = map(int, np.argwhere(bad)[0])
            k = int(argk[i, j])
            raise TriangleViolation(
                (labels[i], labels[k], labels[j]), float(d[i, j] - best[i, j])
            )
        return
    # Large matrix: deterministic sample of triples.
    rng = SplitMix64(0xA11CE ^ n)
    m = _TRIANGLE_SAMPLES
    idx = np.empty((3, m), dtype=np.int64)
    for r in range(3):
        for c in range(m):
            idx[r, c] = rng.randint(n)
    i, k, j = idx
    lhs = d[i, j]
    rhs = d[i, k] + d[k, j]
    bad = lhs > rhs + tol
    if bad.any():
        w = int(np.argwhere(bad)[0])
        raise TriangleViolation(
            (labels[int(i[w])], labels[int(k[w])], labels[int(j[w])]),
            float(lhs[w] - rhs[w]),
        )


def validate_metric(
    labels: Iterable[str],
    matrix,
    *,
    rel_tol: float = REL_TOL,
    check_triangle: bool = True,
) -> FiniteMetricSpace:
    """Check the metric axioms and build a canonical space.

    Tolerance is ``rel_tol`` scaled by the largest entry. Asymmetry beyond
    tolerance raises AsymmetricMatrix; within tolerance the matrix is
    symmetrized exactly (averaged with its transpose). Entries below zero
    beyond tolerance raise NegativeDistance; tiny negatives are clamped to
    zero. Diagonal entries away from zero raise NonzeroDiagonal. A triangle
    failure raises TriangleViolation naming an offending triple.
    """
    labels = _canonical_labels(labels)
    d = np.asarray(matrix, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"distance matrix must be square, got shape {d.shape}")
    if d.shape[0] != len(labels):
        raise ValueError(
            f"matrix is {d.shape[0]}x{d.shape[0]} but there are {len(labels)} labels"
        )
    if len(labels) == 0:
        raise ValueError("a metric space needs at least one point")
    if not np.isfinite(d).all():
        raise ValueError("distance matrix contains non-finite entries")
    scale = float(np.abs(d).max()) if d.size else 0.0
    tol = rel_tol * scale
    asym = float(np.abs(d - d.T).max())
    if asym > tol:
        raise AsymmetricMatrix(f"matrix differs from transpose by {asym:.3g}")
    d = (d + d.T) / 2.0
    if float(d.min()) < -tol:
        i, j = map(int, np.argwhere(d < -tol)[0])
        raise NegativeDistance(
            f"d({labels[i]}, {labels[j]}) = {d[i, j]:.6g} is negative"
        )
    d = np.maximum(d, 0.0)
    diag = np.abs(np.diagonal(d))
    if float(diag.max()) > tol:
        i = int(diag.argmax())
        raise NonzeroDiagonal(f"d({labels[i]}, {labels[i]}) = {d[i, i]:.6g} != 0")
    d = d.copy()
    np.fill_diagonal(d, 0.0)
    if check_triangle:
        _check_triangle(labels, d, tol)
    return FiniteMetricSpace(labels, d)


def space_from_points(
    points, metric: str = "euclidean", labels: Iterable[str] | None = None
) -> FiniteMetricSpace:
    """Build a space from coordinate rows under a named norm.

    Supported metrics: euclidean, manhattan, chebyshev. The triangle
    inequality holds by construction, so no cubic re-check is run.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("expected a non-empty 2d array of coordinates")
    diff = pts[:, None, :] - pts[None, :, :]
    if metric == "euclidean":
        d = np.sqrt((diff * diff).sum(axis=2))
    elif metric == "manhattan":
        d = np.abs(diff).sum(axis=2)
    elif metric == "chebyshev":
        d = np.abs(diff).max(axis=2)
    else:
        raise ValueError(f"unknown point metric {metric!r}")
    n = pts.shape[0]
    if labels is None:
        width = len(str(n - 1))
        labels = [f"p{i:0{width}d}" for i in range(n)]
    d = (d + d.T) / 2.0
    np.fill_diagonal(d, 0.0)
    return FiniteMetricSpace(labels, d)


def path_space(k: int, delta: float) -> FiniteMetricSpace:
    """The (k+1)-point path at step delta: d(i, j) = delta * |i - j|."""
    if not isinstance(k, int) or k < 1:
        raise ValueError("path space needs an integer k >= 1")
    if delta < 0:
        raise ValueError("path space step must be nonnegative")
    width = len(str(k))
    labels = [f"{i:0{width}d}" for i in range(k + 1)]
    idx = np.arange(k + 1, dtype=np.float64)
    d = delta * np.abs(idx[:, None] - idx[None, :])
    return FiniteMetricSpace(labels, d)


def metric_closure(
    labels: Iterable[str], matrix, *, rel_tol: float = REL_TOL
) -> FiniteMetricSpace:
    """Shortest-path repair of a symmetric nonnegative dissimilarity matrix.

    Runs Floyd-Warshall, replacing every entry by the cheapest path total,
    which is the largest metric dominated by the input. Symmetry, zero
    diagonal and nonnegativity are required of the input (same errors as
    validate_metric); the triangle inequality is established by the closure
    itself.
    """
    labels = _canonical_labels(labels)
    d = np.asarray(matrix, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] != len(labels):
        raise ValueError("matrix shape does not match labels")
    if not np.isfinite(d).all():
        raise ValueError("distance matrix contains non-finite entries")
    scale = float(np.abs(d).max()) if d.size else 0.0
    tol = rel_tol * scale
    if float(np.abs(d - d.T).max()) > tol:
        raise AsymmetricMatrix("matrix differs from transpose beyond tolerance")
    d = (d + d.T) / 2.0
    if float(d.min()) < -tol:
        raise NegativeDistance("matrix has negative entries")
    d = np.maximum(d, 0.0)
    if float(np.abs(np.diagonal(d)).max()) > tol:
        raise NonzeroDiagonal("matrix has a nonzero diagonal entry")
    d = d.copy()
    np.fill_diagonal(d, 0.0)
    n = d.shape[0]
    for k in range(n):
        via = np.add.outer(d[:, k], d[k, :])
        np.minimum(d, via, out=d)
    d = (d + d.T) / 2.0
    np.fill_diagonal(d, 0.0)
    return FiniteMetricSpace(labels, d)


class MetricMap:
    """A labeled-point assignment between two spaces.

    The assignment must be total on the source labels and land in the
    target labels; nothing else is assumed, so a MetricMap may or may not
    be non-expansive. Predicates below answer that.
    """

    __slots__ = ("source", "target", "assignment")

    def __init__(
        self,
        source: FiniteMetricSpace,
        target: FiniteMetricSpace,
        assignment: Mapping[str, str],
    ):
        missing = [x for x in source.labels if x not in assignment]
        if missing:
            raise ValueError(f"assignment missing source labels: {missing}")
        bad = sorted(
            {v for k, v in assignment.items() if k in source._index}
            - set(target.labels)
        )
        if bad:
            raise ValueError(f"assignment values outside target: {bad}")
        self.source = source
        self.target = target
        self.assignment = {x: assignment[x] for x in source.labels}

    @classmethod
    def identity(cls, space: FiniteMetricSpace) -> "MetricMap":
        return cls(space, space, {x: x for x in space.labels})

    def __call__(self, label: str) -> str:
        return self.assignment[label]

    def image(self) -> set[str]:
        return set(self.assignment.values())

    def compose(self, other: "MetricMap") -> "MetricMap":
        """self after other (other.target must be self.source)."""
        if other.target is not self.source and other.target != self.source:
            raise ValueError("composition endpoints do not match")
        return MetricMap(
            other.source,
            self.target,
            {x: self.assignment[other.assignment[x]] for x in other.source.labels},
        )

    def is_injective(self) -> bool:
        return len(set(self.assignment.values())) == len(self.source.labels)

    def pullback_matrix(self) -> np.ndarray:
        idx = [self.target.index(self.assignment[x]) for x in self.source.labels]
        return self.target.dist[np.ix_(idx, idx)]

    def pullback_metric(self) -> FiniteMetricSpace:
        """Source labels carrying the target's distances between images.

        Always a pseudometric; zero distance between distinct points occurs
        exactly where the map collapses them.
        """
        return FiniteMetricSpace(self.source.labels, self.pullback_matrix())

    def is_nonexpansive(self, rel_tol: float = REL_TOL) -> bool:
        scale = max(float(self.source.dist.max()), float(self.target.dist.max()))
        tol = rel_tol * scale
        return bool((self.pullback_matrix() <= self.source.dist + tol).all())

    def __eq__(self, other) -> bool:
        if not isinstance(other, MetricMap):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.assignment == other.assignment
        )

    def __repr__(self) -> str:
        return f"MetricMap({self.source.n} -> {self.target.n} points)"
