"""Minimum-weight perfect matching on the complete pair graph.

The solver runs Edmonds' blossom algorithm (the O(n^3) primal-dual
formulation after Galil's survey) for maximum-weight matching, applied to
reflected weights ``(max_weight + 1) - w``.  On a complete graph with an
even vertex count all reflected weights are positive, so the maximum-weight
matching is perfect and corresponds exactly to the minimum-weight perfect
matching of the original graph.

``brute_force_matching`` enumerates every perfect matching and is the
independent oracle the solver is verified against.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .core import ValidationError

# Vertex counts above this make the (n-1)!! enumeration unreasonable.
BRUTE_FORCE_MAX_VERTICES = 12


@dataclass(frozen=True)
class PairGraph:
    """Complete graph over a scheduling window: one vertex per queued job.

    ``weights[i, j]`` is the best dispatch time for the pair (i, j); the
    matrix is symmetric, finite, nonnegative, and its diagonal is unused.
    ``decisions`` optionally carries the per-edge optimizer payload keyed
    by (i, j) with i < j.
    """

    weights: np.ndarray
    decisions: Optional[dict] = None

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValidationError(f"weights must be square, got shape {w.shape}")
        n = w.shape[0]
        if n < 2 or n % 2 != 0:
            raise ValidationError(f"vertex count must be even and >= 2, got {n}")
        off_diag = ~np.eye(n, dtype=bool)
        if not np.all(np.isfinite(w[off_diag])):
            raise ValidationError("edge weights must be finite")
        if np.any(w[off_diag] < 0):
            raise ValidationError("edge weights must be >= 0")
        if not np.array_equal(w[off_diag], w.T[off_diag]):
            raise ValidationError("weights must be symmetric")
        # The diagonal is unused; zero it so downstream reductions over
        # the matrix never see caller-supplied placeholder values.
        w = np.where(off_diag, w, 0.0)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]


def matching_weight(graph: PairGraph, pairs: list[tuple[int, int]]) -> float:
    """Total weight of a matching, summed in canonical (sorted) edge order."""
    return sum(graph.weights[min(i, j), max(i, j)]
               for i, j in sorted((min(p), max(p)) for p in pairs))


def _check_perfect(n: int, pairs: list[tuple[int, int]]) -> None:
    covered = sorted(v for pair in pairs for v in pair)
    if covered != list(range(n)):
        raise ValidationError("matching does not cover every vertex exactly once")


def min_weight_perfect_matching(graph: PairGraph) -> list[tuple[int, int]]:
    """The perfect matching of minimal total weight, as sorted (i, j) pairs.

    Deterministic for a fixed input.
    """
    n = graph.n
    reflect = float(np.max(graph.weights)) + 1.0
    mate = _max_weight_matching(n, reflect - graph.weights)
    pairs = [(v, mate[v]) for v in range(n) if v < mate[v]]
    _check_perfect(n, pairs)
    return sorted(pairs)


def iter_perfect_matchings(n: int) -> Iterator[list[tuple[int, int]]]:
    """Yield every perfect matching of n vertices ((n-1)!! of them).

    The lowest unmatched vertex is paired with each remaining candidate in
    turn, so the enumeration is deterministic.
    """
    if n % 2 != 0:
        raise ValidationError(f"vertex count must be even, got {n}")

    def rec(free: list[int], acc: list[tuple[int, int]]) -> Iterator[list[tuple[int, int]]]:
        if not free:
            yield list(acc)
            return
        head, rest = free[0], free[1:]
        for k, partner in enumerate(rest):
            acc.append((head, partner))
            yield from rec(rest[:k] + rest[k + 1:], acc)
            acc.pop()

    yield from rec(list(range(n)), [])


def brute_force_matching(graph: PairGraph) -> tuple[list[tuple[int, int]], float]:
    """Exact optimum by enumerating all perfect matchings (oracle path).

    Only feasible for small windows; refuses n > 12 (10,395 matchings).
    """
    n = graph.n
    if n > BRUTE_FORCE_MAX_VERTICES:
        raise ValidationError(
            f"brute force supports at most {BRUTE_FORCE_MAX_VERTICES} vertices, got {n}")
    best_pairs = None
    best_weight = np.inf
    for pairs in iter_perfect_matchings(n):
        total = matching_weight(graph, pairs)
        if total < best_weight:
            best_weight = total
            best_pairs = pairs
    return sorted(best_pairs), best_weight


def graph_to_csv(graph: PairGraph, path) -> None:
    """Debug dump: one row per edge with its weight and co-run flag."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "weight", "corun_flag"])
        for i in range(graph.n):
            for j in range(i + 1, graph.n):
                flag = ""
                if graph.decisions and (i, j) in graph.decisions:
                    flag = int(graph.decisions[(i, j)].corun_chosen)
                writer.writerow([i, j, repr(float(graph.weights[i, j])), flag])


# ---------------------------------------------------------------------------
# Maximum-weight matching (Edmonds' blossom algorithm, primal-dual method).
#
# The implementation follows the classic formulation from Galil's survey:
# labels S/T grow alternating trees from free vertices, tight edges between
# S-vertices either close a blossom or reveal an augmenting path, and dual
# adjustments (the four deltas) create new tight edges when the search
# stalls.  Duals and slacks are kept doubled so the delta-3 halving stays
# exact for integer weights.
# ---------------------------------------------------------------------------


class _Blossom:
    """A non-trivial (odd cycle) blossom."""

    __slots__ = ("children", "edges", "best_edges")

    def __init__(self) -> None:
        # Sub-blossoms in cycle order, starting at the base.
        self.children: list = []
        # edges[k] connects children[k] to children[k+1 mod len].
        self.edges: list = []
        # Least-slack edges to neighboring S-blossoms (delta-3 bookkeeping).
        self.best_edges: Optional[list] = None

    def leaves(self) -> Iterator[int]:
        stack = list(self.children)
        while stack:
            node = stack.pop()
            if isinstance(node, _Blossom):
                stack.extend(node.children)
            else:
                yield node


def _max_weight_matching(n: int, w: np.ndarray) -> dict[int, int]:
    """Maximum-weight matching on the complete graph with weight matrix w.

    Returns the mate dict (v -> partner) for matched vertices.
    """
    if n == 0:
        return {}

    max_weight = float(np.max(w)) if n > 1 else 0.0

    mate: dict[int, int] = {}
    # label: free/unreached = absent, 1 = S, 2 = T (5 marks a breadcrumb).
    label: dict = {}
    label_edge: dict = {}
    in_blossom: dict = {v: v for v in range(n)}
    blossom_parent: dict = {v: None for v in range(n)}
    blossom_base: dict = {v: v for v in range(n)}
    best_edge: dict = {}
    # Doubled dual variables: dual[v] = 2 * u(v); blossom_dual[b] = z(b).
    dual: dict = {v: max_weight for v in range(n)}
    blossom_dual: dict = {}
    allowed: dict = {}
    queue: list[int] = []

    def slack(v: int, u: int) -> float:
        return dual[v] + dual[u] - 2.0 * w[v, u]

    def neighbors(v: int) -> Iterator[int]:
        for u in range(n):
            if u != v:
                yield u

    def assign_label(v: int, t: int, from_vertex: Optional[int]) -> None:
        b = in_blossom[v]
        label[v] = label[b] = t
        if from_vertex is not None:
            label_edge[v] = label_edge[b] = (from_vertex, v)
        else:
            label_edge[v] = label_edge[b] = None
        best_edge[v] = best_edge[b] = None
        if t == 1:
            queue.extend(b.leaves() if isinstance(b, _Blossom) else [b])
        else:
            # T-label: the base's mate becomes the next S-vertex.
            base = blossom_base[b]
            assign_label(mate[base], 1, base)

    def scan_blossom(v, u):
        """Trace ancestries of v and u; return a common base or None."""
        path = []
        base = None
        while v is not None:
            b = in_blossom[v]
            if label[b] & 4:
                base = blossom_base[b]
                break
            path.append(b)
            label[b] = 5
            if label_edge[b] is None:
                v = None  # reached a free root
            else:
                v = label_edge[b][0]
                b = in_blossom[v]
                v = label_edge[b][0]
            if u is not None:
                v, u = u, v
        for b in path:
            label[b] = 1
        return base

    def add_blossom(base: int, v: int, u: int) -> None:
        """Close the odd cycle through S-vertices v, u into a new S-blossom."""
        bb = in_blossom[base]
        bv = in_blossom[v]
        bu = in_blossom[u]
        b = _Blossom()
        blossom_base[b] = base
        blossom_parent[b] = None
        blossom_parent[bb] = b
        path: list = []
        edges: list = [(v, u)]
        while bv != bb:
            blossom_parent[bv] = b
            path.append(bv)
            edges.append(label_edge[bv])
            v = label_edge[bv][0]
            bv = in_blossom[v]
        path.append(bb)
        path.reverse()
        edges.reverse()
        while bu != bb:
            blossom_parent[bu] = b
            path.append(bu)
            edges.append((label_edge[bu][1], label_edge[bu][0]))
            u = label_edge[bu][0]
            bu = in_blossom[u]
        b.children = path
        b.edges = edges
        label[b] = 1
        label_edge[b] = label_edge[bb]
        blossom_dual[b] = 0.0
        for leaf in b.leaves():
            if label[in_blossom[leaf]] == 2:
                queue.append(leaf)
            in_blossom[leaf] = b
        # Merge the children's least-slack edge lists for delta-3.
        best_to: dict = {}
        for child in path:
            if isinstance(child, _Blossom):
                if child.best_edges is not None:
                    edge_list = child.best_edges
                    child.best_edges = None
                else:
                    edge_list = [(x, y) for x in child.leaves() for y in neighbors(x)]
            else:
                edge_list = [(child, y) for y in neighbors(child)]
            for x, y in edge_list:
                if in_blossom[y] == b:
                    x, y = y, x
                by = in_blossom[y]
                if (by != b and label.get(by) == 1
                        and (by not in best_to or slack(x, y) < slack(*best_to[by]))):
                    best_to[by] = (x, y)
            best_edge[child] = None
        b.best_edges = list(best_to.values())
        chosen = None
        chosen_slack = None
        for edge in b.best_edges:
            s = slack(*edge)
            if chosen is None or s < chosen_slack:
                chosen = edge
                chosen_slack = s
        best_edge[b] = chosen

    def expand_blossom(b: _Blossom, end_stage: bool) -> None:
        """Dissolve a blossom; relabel its pieces if expanded mid-stage."""
        for child in b.children:
            blossom_parent[child] = None
            if isinstance(child, _Blossom):
                if end_stage and blossom_dual[child] == 0:
                    expand_blossom(child, end_stage)
                else:
                    for leaf in child.leaves():
                        in_blossom[leaf] = child
            else:
                in_blossom[child] = child
        if not end_stage and label.get(b) == 2:
            # The expanding blossom was a T-blossom: walk from the entry
            # child to the base, alternating T and S labels.
            entry_child = in_blossom[label_edge[b][1]]
            j = b.children.index(entry_child)
            if j & 1:
                j -= len(b.children)
                step = 1
            else:
                step = -1
            v, u = label_edge[b]
            while j != 0:
                if step == 1:
                    p, q = b.edges[j]
                else:
                    q, p = b.edges[j - 1]
                label[u] = None
                label[q] = None
                assign_label(u, 2, v)
                allowed[(p, q)] = allowed[(q, p)] = True
                j += step
                if step == 1:
                    v, u = b.edges[j]
                else:
                    u, v = b.edges[j - 1]
                allowed[(v, u)] = allowed[(u, v)] = True
                j += step
            base_child = b.children[j]
            label[u] = label[base_child] = 2
            label_edge[u] = label_edge[base_child] = (v, u)
            best_edge[base_child] = None
            j += step
            while b.children[j] != entry_child:
                child = b.children[j]
                if label.get(child) == 1:
                    j += step
                    continue
                if isinstance(child, _Blossom):
                    for leaf in child.leaves():
                        if label.get(leaf):
                            break
                else:
                    leaf = child
                if label.get(leaf):
                    label[leaf] = None
                    label[mate[blossom_base[child]]] = None
                    assign_label(leaf, 2, label_edge[leaf][0])
                j += step
        label.pop(b, None)
        label_edge.pop(b, None)
        best_edge.pop(b, None)
        del blossom_parent[b]
        del blossom_base[b]
        del blossom_dual[b]

    def augment_blossom(b: _Blossom, v: int) -> None:
        """Swap matched edges inside b so v becomes its new base."""
        t = v
        while blossom_parent[t] != b:
            t = blossom_parent[t]
        if isinstance(t, _Blossom):
            augment_blossom(t, v)
        i = j = b.children.index(t)
        if i & 1:
            j -= len(b.children)
            step = 1
        else:
            step = -1
        while j != 0:
            j += step
            child = b.children[j]
            if step == 1:
                x, y = b.edges[j]
            else:
                y, x = b.edges[j - 1]
            if isinstance(child, _Blossom):
                augment_blossom(child, x)
            j += step
            child = b.children[j]
            if isinstance(child, _Blossom):
                augment_blossom(child, y)
            mate[x] = y
            mate[y] = x
        b.children = b.children[i:] + b.children[:i]
        b.edges = b.edges[i:] + b.edges[:i]
        blossom_base[b] = blossom_base[b.children[0]]

    def augment_matching(v: int, u: int) -> None:
        """Flip matched/unmatched edges along the path through (v, u)."""
        for s, t in ((v, u), (u, v)):
            while True:
                bs = in_blossom[s]
                if isinstance(bs, _Blossom):
                    augment_blossom(bs, s)
                mate[s] = t
                if label_edge[bs] is None:
                    break  # reached a free tree root
                nxt = label_edge[bs][0]
                bt = in_blossom[nxt]
                s, t = label_edge[bt]
                if isinstance(bt, _Blossom):
                    augment_blossom(bt, t)
                mate[t] = s

    while True:
        # One stage: find an augmenting path and flip it.
        label.clear()
        label_edge.clear()
        best_edge.clear()
        for b in blossom_dual:
            b.best_edges = None
        allowed.clear()
        queue.clear()

        for v in range(n):
            if v not in mate and label.get(in_blossom[v]) is None:
                assign_label(v, 1, None)

        augmented = False
        while True:
            while queue and not augmented:
                v = queue.pop()
                for u in neighbors(v):
                    bv = in_blossom[v]
                    bu = in_blossom[u]
                    if bv == bu:
                        continue
                    if (v, u) not in allowed:
                        edge_slack = slack(v, u)
                        if edge_slack <= 0:
                            allowed[(v, u)] = allowed[(u, v)] = True
                    if (v, u) in allowed:
                        if label.get(bu) is None:
                            assign_label(u, 2, v)
                        elif label.get(bu) == 1:
                            base = scan_blossom(v, u)
                            if base is not None:
                                add_blossom(base, v, u)
                            else:
                                augment_matching(v, u)
                                augmented = True
                                break
                        elif label.get(u) is None:
                            label[u] = 2
                            label_edge[u] = (v, u)
                    elif label.get(bu) == 1:
                        if best_edge.get(bv) is None or edge_slack < slack(*best_edge[bv]):
                            best_edge[bv] = (v, u)
                    elif label.get(u) is None:
                        if best_edge.get(u) is None or edge_slack < slack(*best_edge[u]):
                            best_edge[u] = (v, u)

            if augmented:
                break

            # No tight edge left: pump slack out of the duals.
            delta_type = 1
            delta = min(dual.values())
            delta_edge = None
            delta_blossom = None

            for v in range(n):
                if label.get(in_blossom[v]) is None and best_edge.get(v) is not None:
                    d = slack(*best_edge[v])
                    if d < delta:
                        delta = d
                        delta_type = 2
                        delta_edge = best_edge[v]

            for b in blossom_parent:
                if (blossom_parent[b] is None and label.get(b) == 1
                        and best_edge.get(b) is not None):
                    d = slack(*best_edge[b]) / 2.0
                    if d < delta:
                        delta = d
                        delta_type = 3
                        delta_edge = best_edge[b]

            for b in blossom_dual:
                if (blossom_parent[b] is None and label.get(b) == 2
                        and blossom_dual[b] < delta):
                    delta = blossom_dual[b]
                    delta_type = 4
                    delta_blossom = b

            for v in range(n):
                top = label.get(in_blossom[v])
                if top == 1:
                    dual[v] -= delta
                elif top == 2:
                    dual[v] += delta
            for b in blossom_dual:
                if blossom_parent[b] is None:
                    if label.get(b) == 1:
                        blossom_dual[b] += delta
                    elif label.get(b) == 2:
                        blossom_dual[b] -= delta

            if delta_type == 1:
                break  # optimum reached
            if delta_type in (2, 3):
                v, u = delta_edge
                allowed[(v, u)] = allowed[(u, v)] = True
                queue.append(v)
            else:
                expand_blossom(delta_blossom, False)

        if not augmented:
            break

        for b in list(blossom_dual):
            if b not in blossom_dual:
                continue
            if blossom_parent[b] is None and label.get(b) == 1 and blossom_dual[b] == 0:
                expand_blossom(b, True)

    return mate
