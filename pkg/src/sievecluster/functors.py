"""The clustering families and the two-point scale probe.

Every method maps a finite metric space to a flag cover of its points at a
scale delta (thresholds are inclusive). Families:

* ``sl``   single linkage: connected components of the threshold graph.
* ``ml``   maximal linkage: maximal sets with all pairwise distances <= delta.
* ``l``    step linkage: relate points joined by at most k steps of length
           <= delta each, with optional total length budget K; maximal
           linked sets of that relation. k = 1 recovers ml, k = inf with
           K = inf recovers sl, so both are thin wrappers over this one
           code path.
* ``vl``   vertex-connectivity linkage at level k of the threshold graph.
* ``el``   edge-connectivity linkage at level k (a partition by default).
* ``bk`` / ``bkstar``  maximal cliques after saturating the threshold graph
           under the strict / relaxed k-anchored edge rule.
* ``generated``  relate x, y when some non-expansive probe from a small
           test space lands on both; maximal linked sets of that relation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import _bitops
from .covers import (
    Cover,
    FlagCover,
    Relation,
    co_blocking,
    flagify,
    maximal_linked_sets,
)
from .errors import SearchBudgetExceeded, TrivialFunctor
from .graphs import (
    Graph,
    bk_closure,
    bk_star_closure,
    max_edge_connected_subgraphs,
    max_vertex_connected_subgraphs,
    relation_from_graph,
    threshold_graph,
)
from .metric import REL_TOL, FiniteMetricSpace, path_space

FAMILIES = ("sl", "ml", "l", "vl", "el", "bk", "bkstar", "generated")

_NEEDS_K = {"l", "vl", "el", "bk", "bkstar"}
_GENERATED_POINT_CAP = 6
_GENERATED_LEAF_CAP = 10_000_000


def _check_k(k) -> None:
    if k == math.inf:
        return
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise ValueError(f"k must be a positive integer or inf, got {k!r}")


@dataclass(frozen=True)
class MethodSpec:
    """A clustering method: family plus parameters.

    ``delta`` may be left None when the record parameterizes a scale sweep
    (the sieve builder supplies scales); flat evaluation requires it.
    ``budget`` is the total path length bound for the l family (JSON key
    "K"). ``test_spaces`` parameterizes the generated family.
    """

    family: str
    delta: float | None = None
    k: int | float | None = None
    budget: float | None = None
    test_spaces: tuple[FiniteMetricSpace, ...] = field(default=())
    clique_exception: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.delta is not None and not self.delta >= 0:
            raise ValueError("delta must be nonnegative")
        if self.family in _NEEDS_K:
            if self.k is None:
                raise ValueError(f"family {self.family!r} requires k")
            _check_k(self.k)
        elif self.k is not None:
            raise ValueError(f"family {self.family!r} takes no k")
        if self.family == "l":
            if self.budget is not None and not self.budget >= 0:
                raise ValueError("budget K must be nonnegative")
        elif self.budget is not None:
            raise ValueError(f"family {self.family!r} takes no budget")
        if self.family == "generated":
            if not self.test_spaces:
                raise ValueError("generated family requires at least one test space")
            object.__setattr__(self, "test_spaces", tuple(self.test_spaces))
        elif self.test_spaces:
            raise ValueError(f"family {self.family!r} takes no test spaces")
        if self.clique_exception and self.family != "el":
            raise ValueError("clique_exception applies to the el family only")

    def with_delta(self, delta: float) -> "MethodSpec":
        return MethodSpec(
            family=self.family,
            delta=delta,
            k=self.k,
            budget=self.budget,
            test_spaces=self.test_spaces,
            clique_exception=self.clique_exception,
        )

    def label(self) -> str:
        bits = [self.family]
        if self.k is not None:
            bits.append(f"k={'inf' if self.k == math.inf else self.k}")
        if self.budget is not None:
            bits.append(f"K={'inf' if self.budget == math.inf else format(self.budget, 'g')}")
        if self.clique_exception:
            bits.append("clique-exception")
        head = bits[0] if len(bits) == 1 else f"{bits[0]}[{', '.join(bits[1:])}]"
        if self.delta is not None:
            head += f"@{format(self.delta, 'g')}"
        return head

    def to_dict(self) -> dict:
        out: dict = {"family": self.family}
        if self.delta is not None:
            out["delta"] = self.delta
        if self.k is not None:
            out["k"] = "inf" if self.k == math.inf else self.k
        if self.budget is not None:
            out["K"] = "inf" if self.budget == math.inf else self.budget
        if self.test_spaces:
            out["test_spaces"] = [t.to_dict() for t in self.test_spaces]
        if self.clique_exception:
            out["clique_exception"] = True
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "MethodSpec":
        def num(v, what):
            if v == "inf":
                return math.inf
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ValueError(f"{what} must be a number or 'inf'")
            return v

        k = data.get("k")
        if k is not None:
            k = num(k, "k")
            if k != math.inf:
                if k != int(k):
                    raise ValueError("k must be an integer or 'inf'")
                k = int(k)
        budget = data.get("K")
        if budget is not None:
            budget = float(num(budget, "K"))
        tests = tuple(
            FiniteMetricSpace.from_dict(t) for t in data.get("test_spaces", [])
        )
        return cls(
            family=data["family"],
            delta=data.get("delta"),
            k=k,
            budget=budget,
            test_spaces=tests,
            clique_exception=bool(data.get("clique_exception", False)),
        )


@dataclass(frozen=True)
class ProbeResult:
    """Outcome of the two-point scale probe."""

    delta_f: float
    boundary_merged: bool


def _step_relation(x: FiniteMetricSpace, delta: float, k, budget) -> Relation:
    """Relate points joined by <= k steps of length <= delta, total <= budget.

    Steps may repeat points (a zero-length stay), so "within k steps" and
    "exactly k steps" coincide and the relation grows monotonically in all
    three parameters.
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    _check_k(k)
    if not budget >= 0:
        raise ValueError("budget K must be nonnegative")
    n = x.n
    close = x.dist <= delta
    if budget == math.inf:
        adj = _bitops.adjacency_from_bool(close)
        if k == 1:
            return Relation.from_masks(x.labels, adj)
        if k == math.inf:
            rel = [0] * n
            for comp in _bitops.components(adj, _bitops.full_mask(n)):
                for v in _bitops.bits(comp):
                    rel[v] = comp & ~(1 << v)
            return Relation.from_masks(x.labels, rel)
        rel = []
        for v in range(n):
            reached = 1 << v
            frontier = reached
            for _ in range(k):
                grow = 0
                m = frontier
                while m:
                    u = (m & -m).bit_length() - 1
                    m &= m - 1
                    grow |= adj[u]
                frontier = grow & ~reached
                if not frontier:
                    break
                reached |= frontier
            rel.append(reached & ~(1 << v))
        return Relation.from_masks(x.labels, rel)
    # finite budget: cheapest total length over <= k steps, then threshold
    w = np.where(close, x.dist, np.inf)
    np.fill_diagonal(w, 0.0)
    dist = w.copy()
    steps = n - 1 if k == math.inf else min(k, n - 1) if k != math.inf else k
    remaining = max(steps - 1, 0)
    for _ in range(remaining):
        nxt = dist.copy()
        for m in range(n):
            np.minimum(nxt, np.add.outer(dist[:, m], w[m, :]), out=nxt)
        if np.array_equal(nxt, dist):
            break
        dist = nxt
    related = dist <= budget
    return Relation.from_masks(x.labels, _bitops.adjacency_from_bool(related))


def k_linkage(
    x: FiniteMetricSpace, delta: float, k, budget=math.inf
) -> FlagCover:
    """Maximal linked sets of the k-step relation at scale delta."""
    return maximal_linked_sets(_step_relation(x, delta, k, budget))


def single_linkage(x: FiniteMetricSpace, delta: float) -> FlagCover:
    """Connected components of the threshold graph (k_linkage at k = inf)."""
    out = k_linkage(x, delta, math.inf, math.inf)
    assert out.is_partition(), "single linkage must produce a partition"
    return out


def maximal_linkage(x: FiniteMetricSpace, delta: float) -> FlagCover:
    """Maximal cliques of the threshold graph (k_linkage at k = 1)."""
    return k_linkage(x, delta, 1, math.inf)


def vertex_linkage(x: FiniteMetricSpace, delta: float, k) -> FlagCover:
    """Flag completion of the maximal k-vertex-connected subgraphs of the
    threshold graph.

    For k <= 2 (and k >= |X|) the raw family is already a flag cover and
    the completion is the identity. For intermediate k it need not be:
    three blocks can pairwise overlap without their union containing a
    qualifying set, leaving a pairwise co-blocked triple in no block. The
    minimal flag completion restores the output type while preserving the
    refinement chain in k, both of its endpoints, and consistency under
    injective non-expansive maps.
    """
    c = max_vertex_connected_subgraphs(threshold_graph(x, delta), k)
    return flagify(c)


def edge_linkage(
    x: FiniteMetricSpace, delta: float, k, clique_exception: bool = False
) -> FlagCover:
    """Maximal k-edge-connected subgraphs of the threshold graph.

    The standard convention yields a partition (always flag); the
    clique-exception variant can need the same flag completion as
    vertex_linkage, so both go through it.
    """
    c = max_edge_connected_subgraphs(
        threshold_graph(x, delta), k, clique_exception=clique_exception
    )
    return flagify(c)


def bk_clusters(x: FiniteMetricSpace, delta: float, k) -> FlagCover:
    """Maximal cliques after the strict k-anchored closure of the threshold graph."""
    g = bk_closure(threshold_graph(x, delta), k)
    return maximal_linked_sets(relation_from_graph(g))


def bk_star_clusters(x: FiniteMetricSpace, delta: float, k) -> FlagCover:
    """Maximal cliques after the relaxed k-anchored closure."""
    g = bk_star_closure(threshold_graph(x, delta), k)
    return maximal_linked_sets(relation_from_graph(g))


def probe_relation(
    x: FiniteMetricSpace,
    test_spaces: Iterable[FiniteMetricSpace],
    rel_tol: float = REL_TOL,
) -> Relation:
    """Relate x-points co-covered by the image of some non-expansive probe.

    Probes are enumerated by backtracking with pairwise pruning: a partial
    assignment dies as soon as two placed test points sit farther apart in
    the target than in the test space. Image pairs accumulate into the
    relation, and the search stops early once the relation is complete.
    """
    tests = tuple(test_spaces)
    for t in tests:
        if t.n > _GENERATED_POINT_CAP:
            raise SearchBudgetExceeded(
                f"test space has {t.n} points; the probe search allows at most "
                f"{_GENERATED_POINT_CAP}"
            )
    n = x.n
    for t in tests:
        if n ** t.n > _GENERATED_LEAF_CAP:
            raise SearchBudgetExceeded(
                f"probe search of {t.n}-point test space against {n} points "
                f"exceeds the enumeration budget"
            )
    scale = float(x.dist.max()) if n else 0.0
    rel = [0] * n
    full = _bitops.full_mask(n)

    def complete() -> bool:
        return all(rel[v] == full & ~(1 << v) for v in range(n))

    for t in tests:
        if complete():
            break
        tol = rel_tol * max(scale, float(t.dist.max()))
        td = t.dist
        xd = x.dist
        m = t.n
        assigned = [0] * m

        def place(i: int) -> None:
            if i == m:
                image = sorted(set(assigned))
                for a_pos in range(len(image)):
                    for b_pos in range(a_pos + 1, len(image)):
                        a, b = image[a_pos], image[b_pos]
                        rel[a] |= 1 << b
                        rel[b] |= 1 << a
                return
            for cand in range(n):
                ok = True
                for j in range(i):
                    if xd[cand, assigned[j]] > td[i, j] + tol:
                        ok = False
                        break
                if ok:
                    assigned[i] = cand
                    place(i + 1)

        place(0)
    return Relation.from_masks(x.labels, rel)


def generated_cluster(
    x: FiniteMetricSpace,
    test_spaces: Iterable[FiniteMetricSpace],
    rel_tol: float = REL_TOL,
) -> FlagCover:
    """Maximal linked sets of the probe relation for the given test spaces."""
    return maximal_linked_sets(probe_relation(x, test_spaces, rel_tol))


def evaluate_method(x: FiniteMetricSpace, spec: MethodSpec) -> FlagCover:
    """Run one clustering method on one space."""
    fam = spec.family
    if fam == "generated":
        return generated_cluster(x, spec.test_spaces)
    if spec.delta is None:
        raise ValueError(f"method {spec.label()!r} needs delta for flat evaluation")
    d = spec.delta
    if fam == "sl":
        return single_linkage(x, d)
    if fam == "ml":
        return maximal_linkage(x, d)
    if fam == "l":
        budget = math.inf if spec.budget is None else spec.budget
        return k_linkage(x, d, spec.k, budget)
    if fam == "vl":
        return vertex_linkage(x, d, spec.k)
    if fam == "el":
        return edge_linkage(x, d, spec.k, clique_exception=spec.clique_exception)
    if fam == "bk":
        return bk_clusters(x, d, spec.k)
    if fam == "bkstar":
        return bk_star_clusters(x, d, spec.k)
    raise AssertionError(f"unhandled family {fam!r}")


def cover_metric(cover: Cover, delta: float) -> FiniteMetricSpace:
    """Metrize a cover's co-blocking graph: co-blocked pairs at delta,
    all other pairs at 2 * delta.

    For a flag cover c and delta > 0, maximal linkage at delta on this
    space returns exactly c, which is the standard witness that every flag
    cover arises from maximal linkage.
    """
    if not delta > 0:
        raise ValueError("cover metrization needs delta > 0")
    rel = co_blocking(cover)
    n = len(cover.base)
    d = np.full((n, n), 2.0 * delta)
    for i, m in enumerate(rel.adj):
        for j in _bitops.bits(m):
            d[i, j] = delta
    np.fill_diagonal(d, 0.0)
    return FiniteMetricSpace(cover.base, d)


def _merged_on_two_points(spec: MethodSpec, eps: float) -> bool:
    cover = evaluate_method(path_space(1, eps), spec)
    return len(cover.blocks) == 1


def clustering_parameter(spec: MethodSpec, rel_tol: float = REL_TOL) -> ProbeResult:
    """Largest scale at which the method merges a two-point probe space.

    Evaluates the method on two-point spaces over [0, 2 * delta] (or a
    diameter-derived range for the generated family), bisects the merge
    transition, and snaps the estimate to a declared parameter (delta, the
    budget K, or a test-space distance) when the transition sits within
    tolerance of it. Raises
    TrivialFunctor when the probe never changes over the range: a method
    that never merges (edge connectivity at k >= 2) or never splits has no
    scale parameter to report.
    """
    if spec.family == "generated":
        hi = 2.0 * max((t.diameter() for t in spec.test_spaces), default=0.0)
    else:
        if spec.delta is None:
            raise ValueError("clustering_parameter needs the method's delta")
        hi = 2.0 * spec.delta
    if hi <= 0:
        hi = 1.0
    if not _merged_on_two_points(spec, 0.0):
        raise TrivialFunctor(
            f"{spec.label()}: the two-point probe never merges (checked eps = 0)"
        )
    if _merged_on_two_points(spec, hi):
        raise TrivialFunctor(
            f"{spec.label()}: the two-point probe never splits on [0, {hi:g}]"
        )
    lo = 0.0
    top = hi
    for _ in range(80):
        mid = (lo + top) / 2.0
        if mid == lo or mid == top:
            break
        if _merged_on_two_points(spec, mid):
            lo = mid
        else:
            top = mid
    estimate = lo
    snap_targets = [spec.delta, spec.budget]
    for t in spec.test_spaces:
        snap_targets.extend(t.pairwise_distances())
    for cand in snap_targets:
        if cand is None or not math.isfinite(cand):
            continue
        # the transition may sit at cand * (1 + rel_tol) because distance
        # comparisons carry that slack, so the snap window must exceed it
        if abs(estimate - cand) <= max(4.0 * rel_tol * abs(cand), 1e-12):
            estimate = cand
            break
    return ProbeResult(
        delta_f=estimate, boundary_merged=_merged_on_two_points(spec, estimate)
    )
