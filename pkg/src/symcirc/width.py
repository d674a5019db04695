"""Exact treewidth, pathwidth, and treedepth with decomposition certificates.

All solvers work on the underlying simple graph over global vertex ids and
return both the exact value and a certificate that `validate_decomposition`
accepts:

  * treewidth  -> TreeDecomposition, via the subset DP over elimination
    prefixes (cost of eliminating v after S = vertices reachable from v
    through S), with the decomposition rebuilt from the optimal order;
  * pathwidth  -> PathDecomposition, via the vertex-separation DP (vertex
    separation number equals pathwidth), bags rebuilt from the layout;
  * treedepth  -> EliminationForest, via recursive root choice with
    memoization on connected vertex sets.

Treedepth counts vertices (a single vertex has treedepth 1) and disconnected
graphs use a forest, so td(F) is the maximum over components.  Labelled
variants constrain all labelled vertices into one bag (treewidth: clique
trick) or an end bag (pathwidth: labels never leave the boundary).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .errors import InvalidDecomposition, InvalidParameter, ParseError, SizeCap
from .pattern import BipartiteMultigraph, LabelledPattern

DEFAULT_VERTEX_CAP = 14


@dataclass
class TreeDecomposition:
    """Rooted tree of bags; parent[i] is None exactly for the root."""

    bags: List[FrozenSet[int]]
    parent: List[Optional[int]]

    def __post_init__(self):
        roots = [i for i, p in enumerate(self.parent) if p is None]
        if len(self.bags) != len(self.parent) or len(roots) != 1:
            raise InvalidDecomposition("tree decompositions need exactly one root")
        self.root = roots[0]

    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def children(self) -> List[List[int]]:
        ch: List[List[int]] = [[] for _ in self.bags]
        for i, p in enumerate(self.parent):
            if p is not None:
                ch[p].append(i)
        return ch

    def to_json(self) -> dict:
        return {
            "kind": "tree",
            "bags": [sorted(v + 1 for v in b) for b in self.bags],
            "parent": [0 if p is None else p + 1 for p in self.parent],
        }

    @staticmethod
    def from_json(data: dict) -> "TreeDecomposition":
        try:
            bags = [frozenset(v - 1 for v in bag) for bag in data["bags"]]
            parent = [None if p == 0 else p - 1 for p in data["parent"]]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed tree decomposition: {exc}") from exc
        return TreeDecomposition(bags, parent)


@dataclass
class PathDecomposition:
    """Ordered list of bags."""

    bags: List[FrozenSet[int]]

    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def as_tree(self) -> TreeDecomposition:
        """The same decomposition as a path-shaped tree rooted at the last bag."""
        n = len(self.bags)
        parent: List[Optional[int]] = [i + 1 for i in range(n - 1)] + [None]
        return TreeDecomposition(list(self.bags), parent)

    def to_json(self) -> dict:
        return {"kind": "path", "bags": [sorted(v + 1 for v in b) for b in self.bags]}

    @staticmethod
    def from_json(data: dict) -> "PathDecomposition":
        try:
            return PathDecomposition([frozenset(v - 1 for v in bag) for bag in data["bags"]])
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed path decomposition: {exc}") from exc


@dataclass
class EliminationForest:
    """Rooted forest on V(F): parent[v] is None for roots.

    Valid for F iff every F-edge joins an ancestor-descendant pair; the
    height (vertices on the longest root-to-leaf path) is the treedepth.
    """

    parent: Dict[int, Optional[int]]

    def roots(self) -> List[int]:
        return sorted(v for v, p in self.parent.items() if p is None)

    def children(self) -> Dict[int, List[int]]:
        ch: Dict[int, List[int]] = {v: [] for v in self.parent}
        for v, p in self.parent.items():
            if p is not None:
                ch[p].append(v)
        return ch

    def depth_of(self, v: int) -> int:
        d = 1
        while self.parent[v] is not None:
            v = self.parent[v]
            d += 1
        return d

    def height(self) -> int:
        return max((self.depth_of(v) for v in self.parent), default=0)

    def path_to_root(self, v: int) -> List[int]:
        """Strict ancestors of v, nearest first."""
        out = []
        while self.parent[v] is not None:
            v = self.parent[v]
            out.append(v)
        return out

    def to_json(self) -> dict:
        return {
            "kind": "elim",
            "parent": {str(v + 1): (0 if p is None else p + 1) for v, p in sorted(self.parent.items())},
        }

    @staticmethod
    def from_json(data: dict) -> "EliminationForest":
        try:
            parent = {int(v) - 1: (None if p == 0 else p - 1) for v, p in data["parent"].items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed elimination forest: {exc}") from exc
        return EliminationForest(parent)


# -- validation ------------------------------------------------------------------


def validate_decomposition(f: BipartiteMultigraph, d) -> Tuple[bool, str]:
    """Check the decomposition axioms; returns (ok, first violation or '')."""
    if isinstance(d, PathDecomposition):
        return _validate_bags(f, d.bags, _path_parent(len(d.bags)))
    if isinstance(d, TreeDecomposition):
        return _validate_bags(f, d.bags, d.parent)
    if isinstance(d, EliminationForest):
        return _validate_elimination(f, d)
    raise InvalidParameter(f"unknown decomposition type {type(d).__name__}")


def _path_parent(n: int) -> List[Optional[int]]:
    return [i + 1 for i in range(n - 1)] + [None] if n else []


def _validate_bags(f: BipartiteMultigraph, bags: Sequence[FrozenSet[int]],
                   parent: Sequence[Optional[int]]) -> Tuple[bool, str]:
    verts = set(f.vertices())
    covered = set().union(*bags) if bags else set()
    if covered != verts:
        return False, f"bags cover {sorted(covered)} instead of V(F)"
    for (i, j) in f.edges:
        u, v = i, f.a_count + j
        if not any(u in b and v in b for b in bags):
            return False, f"edge ({u},{v}) not inside any bag"
    # Occurrence sets must induce connected subtrees.
    neighbours: List[Set[int]] = [set() for _ in bags]
    for i, p in enumerate(parent):
        if p is not None:
            neighbours[i].add(p)
            neighbours[p].add(i)
    for v in verts:
        occ = {i for i, b in enumerate(bags) if v in b}
        start = next(iter(occ))
        seen = {start}
        stack = [start]
        while stack:
            for w in neighbours[stack.pop()]:
                if w in occ and w not in seen:
                    seen.add(w)
                    stack.append(w)
        if seen != occ:
            return False, f"occurrence set of vertex {v} is disconnected"
    return True, ""


def _validate_elimination(f: BipartiteMultigraph, d: EliminationForest) -> Tuple[bool, str]:
    if set(d.parent) != set(f.vertices()):
        return False, "elimination forest must cover exactly V(F)"
    # Detect parent cycles while computing ancestor sets.
    ancestors: Dict[int, Set[int]] = {}
    for v in d.parent:
        seen = set()
        x = v
        while d.parent[x] is not None:
            x = d.parent[x]
            if x in seen or x == v:
                return False, f"parent pointers cycle at vertex {v}"
            seen.add(x)
        ancestors[v] = seen
    for (i, j) in f.edges:
        u, v = i, f.a_count + j
        if u not in ancestors[v] and v not in ancestors[u]:
            return False, f"edge ({u},{v}) joins incomparable vertices"
    return True, ""


def rooted_depth(d: TreeDecomposition) -> int:
    """max over nodes of |union of bags on the root path| (includes the node)."""
    children = d.children()
    best = 0
    stack: List[Tuple[int, FrozenSet[int]]] = [(d.root, d.bags[d.root])]
    while stack:
        node, acc = stack.pop()
        best = max(best, len(acc))
        for ch in children[node]:
            stack.append((ch, acc | d.bags[ch]))
    return best


# -- treewidth --------------------------------------------------------------------


def _reachable_through(adj: List[FrozenSet[int]], v: int, through: int, n: int) -> int:
    """Bitmask of vertices outside `through|{v}` reachable from v via `through`."""
    seen = 1 << v
    stack = [v]
    out = 0
    while stack:
        x = stack.pop()
        for w in adj[x]:
            bit = 1 << w
            if seen & bit:
                continue
            seen |= bit
            if through & bit:
                stack.append(w)
            else:
                out |= bit
    return out


def treewidth_exact(f: BipartiteMultigraph, cap: int = DEFAULT_VERTEX_CAP,
                    labels_in_one_bag: Optional[Sequence[int]] = None) -> Tuple[int, TreeDecomposition]:
    """Exact treewidth with a certificate, by DP over eliminated vertex subsets.

    With labels_in_one_bag set, minimizes over decompositions where some bag
    contains all the listed global vertices.
    """
    if labels_in_one_bag is not None:
        return labelled_treewidth(_with_labels(f, labels_in_one_bag), cap)
    n = f.num_vertices()
    if n > cap:
        raise SizeCap(f"treewidth solver capped at {cap} vertices")
    if n == 0:
        return -1, TreeDecomposition([frozenset()], [None])
    adj = f.adjacency()
    full = (1 << n) - 1
    cost = {0: -1}
    choice: Dict[int, int] = {}
    # Subsets in increasing popcount; cost[S] = best max-elimination-degree over orders of S.
    by_count: List[List[int]] = [[] for _ in range(n + 1)]
    for mask in range(full + 1):
        by_count[mask.bit_count()].append(mask)
    for count in range(n):
        for mask in by_count[count]:
            if mask not in cost:
                continue
            base = cost[mask]
            for v in range(n):
                bit = 1 << v
                if mask & bit:
                    continue
                q = _reachable_through(adj, v, mask, n)
                value = max(base, q.bit_count())
                new = mask | bit
                if new not in cost or value < cost[new]:
                    cost[new] = value
                    choice[new] = v
    width = cost[full]
    # Recover elimination order (first eliminated first).
    order: List[int] = []
    mask = full
    while mask:
        v = choice[mask]
        order.append(v)
        mask ^= 1 << v
    order.reverse()
    decomposition = _decomposition_from_order(f, adj, order)
    return width, decomposition


def _decomposition_from_order(f: BipartiteMultigraph, adj: List[FrozenSet[int]],
                              order: List[int]) -> TreeDecomposition:
    """Tree decomposition from an elimination order (classic fill-in bags)."""
    n = len(order)
    position = {v: i for i, v in enumerate(order)}
    bags: List[FrozenSet[int]] = []
    higher: List[List[int]] = []
    for i, v in enumerate(order):
        before = 0
        for w in order[:i]:
            before |= 1 << w
        q = _reachable_through(adj, v, before, n)
        later = [w for w in range(n) if q & (1 << w)]
        bags.append(frozenset([v] + later))
        higher.append(later)
    parent: List[Optional[int]] = [None] * n
    for i, v in enumerate(order):
        if higher[i]:
            parent[i] = position[min(higher[i], key=lambda w: position[w])]
    # Link any extra roots (disconnected graphs) into a single tree; bags are
    # disjoint across components so the axioms are unaffected.
    roots = [i for i, p in enumerate(parent) if p is None]
    for extra in roots[1:]:
        parent[extra] = roots[0]
    return TreeDecomposition(bags, parent)


# -- pathwidth --------------------------------------------------------------------


def _with_labels(f: BipartiteMultigraph, labels: Sequence[int]) -> LabelledPattern:
    """Wrap global vertex ids as a labelled pattern (sides inferred)."""
    a_labels = tuple(v for v in labels if f.side(v) == "A")
    b_labels = tuple(v - f.a_count for v in labels if f.side(v) == "B")
    return LabelledPattern(f, a_labels, b_labels)


def pathwidth_exact(f: BipartiteMultigraph, cap: int = DEFAULT_VERTEX_CAP,
                    labels_in_one_bag: Optional[Sequence[int]] = None) -> Tuple[int, PathDecomposition]:
    """Exact pathwidth with a certificate, via the vertex-separation DP.

    With labels_in_one_bag set, minimizes over decompositions whose first bag
    contains all the listed global vertices.
    """
    if labels_in_one_bag is not None:
        return labelled_pathwidth(_with_labels(f, labels_in_one_bag), cap)
    width, order = _vertex_separation(f, frozenset(), cap)
    return width, _path_bags_from_layout(f, order, frozenset())


def labelled_pathwidth(p: LabelledPattern, cap: int = DEFAULT_VERTEX_CAP) -> Tuple[int, PathDecomposition]:
    """Exact pathwidth among decompositions whose *first* bag holds all labels."""
    q = p.labelled_vertices_global()
    width, order = _vertex_separation(p.graph, q, cap)
    bags = _path_bags_from_layout(p.graph, order, q)
    bags.bags.reverse()  # the label bag is built last; present it first
    return width, bags


def _vertex_separation(f: BipartiteMultigraph, pinned: FrozenSet[int], cap: int):
    """DP over layout prefixes; `pinned` vertices count as boundary forever.

    The cost of a layout is the maximum boundary over proper non-empty
    prefixes (the full prefix corresponds to no bag of its own), which equals
    the pathwidth of the corresponding bag sequence; with `pinned` non-empty
    it is the minimum width subject to the final bag containing all pins.
    """
    n = f.num_vertices()
    if n > cap:
        raise SizeCap(f"pathwidth solver capped at {cap} vertices")
    if n == 0:
        return -1, []
    adj = f.adjacency()
    adj_mask = [0] * n
    for v in range(n):
        for w in adj[v]:
            adj_mask[v] |= 1 << w
    pinned_mask = 0
    for v in pinned:
        pinned_mask |= 1 << v
    full = (1 << n) - 1

    def boundary(mask: int) -> int:
        count = 0
        rest = ~mask
        for v in range(n):
            bit = 1 << v
            if mask & bit and (bit & pinned_mask or adj_mask[v] & rest & full):
                count += 1
        return count

    cost = {0: 0}
    choice: Dict[int, int] = {}
    by_count: List[List[int]] = [[] for _ in range(n + 1)]
    for mask in range(full + 1):
        by_count[mask.bit_count()].append(mask)
    for count in range(n):
        for mask in by_count[count]:
            if mask not in cost:
                continue
            base = cost[mask]
            for v in range(n):
                bit = 1 << v
                if mask & bit:
                    continue
                new = mask | bit
                value = base if new == full else max(base, boundary(new))
                if new not in cost or value < cost[new]:
                    cost[new] = value
                    choice[new] = v
    order: List[int] = []
    mask = full
    while mask:
        v = choice[mask]
        order.append(v)
        mask ^= 1 << v
    order.reverse()
    return cost[full], order


def _path_bags_from_layout(f: BipartiteMultigraph, order: List[int],
                           pinned: FrozenSet[int]) -> PathDecomposition:
    n = len(order)
    if n == 0:
        return PathDecomposition([frozenset()])
    adj = f.adjacency()
    placed: Set[int] = set()
    bags: List[FrozenSet[int]] = []
    for i, v in enumerate(order):
        rest = set(order[i:])
        bag = {v}
        for u in placed:
            if u in pinned or adj[u] & frozenset(rest):
                bag.add(u)
        bags.append(frozenset(bag))
        placed.add(v)
    return PathDecomposition(bags)


# -- treedepth --------------------------------------------------------------------


def treedepth_exact(f: BipartiteMultigraph, cap: int = DEFAULT_VERTEX_CAP) -> Tuple[int, EliminationForest]:
    """Exact treedepth with an elimination forest, by recursive root choice."""
    n = f.num_vertices()
    if n > cap:
        raise SizeCap(f"treedepth solver capped at {cap} vertices")
    adj = f.adjacency()
    memo: Dict[FrozenSet[int], Tuple[int, Dict[int, Optional[int]]]] = {}

    def components(vs: FrozenSet[int]) -> List[FrozenSet[int]]:
        remaining = set(vs)
        out = []
        while remaining:
            start = min(remaining)
            seen = {start}
            stack = [start]
            while stack:
                for w in adj[stack.pop()]:
                    if w in remaining and w not in seen:
                        seen.add(w)
                        stack.append(w)
            out.append(frozenset(seen))
            remaining -= seen
        return out

    def solve(vs: FrozenSet[int]) -> Tuple[int, Dict[int, Optional[int]]]:
        if not vs:
            return 0, {}
        if vs in memo:
            return memo[vs]
        comps = components(vs)
        if len(comps) > 1:
            height = 0
            forest: Dict[int, Optional[int]] = {}
            for comp in comps:
                h, sub = solve(comp)
                height = max(height, h)
                forest.update(sub)
            memo[vs] = (height, forest)
            return memo[vs]
        best: Optional[Tuple[int, Dict[int, Optional[int]]]] = None
        for v in sorted(vs):
            h, sub = solve(vs - {v})
            if best is None or h + 1 < best[0]:
                tree = dict(sub)
                for u, p in sub.items():
                    if p is None:
                        tree[u] = v
                tree[v] = None
                best = (h + 1, tree)
                if h + 1 == 1:
                    break
        memo[vs] = best
        return best

    height, parent = solve(frozenset(f.vertices()))
    return height, EliminationForest(parent)


# -- labelled treewidth (clique trick) ---------------------------------------------


def labelled_treewidth(p: LabelledPattern, cap: int = DEFAULT_VERTEX_CAP) -> Tuple[int, TreeDecomposition]:
    """Exact treewidth among decompositions with all labels in one bag.

    Equivalent to the treewidth of the graph augmented with a clique on the
    labelled vertices; the DP runs on that auxiliary (general) graph and the
    certificate is returned for the original pattern.
    """
    g = p.graph
    n = g.num_vertices()
    if n > cap:
        raise SizeCap(f"labelled treewidth capped at {cap} vertices")
    labels = sorted(p.labelled_vertices_global())
    adj = [set(s) for s in g.adjacency()]
    for u, v in itertools.combinations(labels, 2):
        adj[u].add(v)
        adj[v].add(u)
    adj_f = [frozenset(s) for s in adj]
    if n == 0:
        return -1, TreeDecomposition([frozenset()], [None])
    full = (1 << n) - 1
    cost = {0: -1}
    choice: Dict[int, int] = {}
    by_count: List[List[int]] = [[] for _ in range(n + 1)]
    for mask in range(full + 1):
        by_count[mask.bit_count()].append(mask)
    for count in range(n):
        for mask in by_count[count]:
            if mask not in cost:
                continue
            for v in range(n):
                bit = 1 << v
                if mask & bit:
                    continue
                q = _reachable_through(adj_f, v, mask, n)
                value = max(cost[mask], q.bit_count())
                new = mask | bit
                if new not in cost or value < cost[new]:
                    cost[new] = value
                    choice[new] = v
    order: List[int] = []
    mask = full
    while mask:
        v = choice[mask]
        order.append(v)
        mask ^= 1 << v
    order.reverse()
    # Bags are built against the augmented adjacency so the clique (= the
    # labels) ends up sharing a bag; the result is a decomposition of the
    # original graph as well.
    decomposition = _decomposition_from_order_aux(adj_f, order)
    return cost[full], decomposition


def _decomposition_from_order_aux(adj: List[FrozenSet[int]], order: List[int]) -> TreeDecomposition:
    n = len(order)
    position = {v: i for i, v in enumerate(order)}
    bags: List[FrozenSet[int]] = []
    higher: List[List[int]] = []
    for i, v in enumerate(order):
        before = 0
        for w in order[:i]:
            before |= 1 << w
        q = _reachable_through(adj, v, before, n)
        later = [w for w in range(n) if q & (1 << w)]
        bags.append(frozenset([v] + later))
        higher.append(later)
    parent: List[Optional[int]] = [None] * n
    for i, v in enumerate(order):
        if higher[i]:
            parent[i] = position[min(higher[i], key=lambda w: position[w])]
    roots = [i for i, p in enumerate(parent) if p is None]
    for extra in roots[1:]:
        parent[extra] = roots[0]
    return TreeDecomposition(bags, parent)


def rooted_certificate(p: LabelledPattern, cap: int = DEFAULT_VERTEX_CAP) -> Tuple[int, int, TreeDecomposition]:
    """(width, depth, certificate) with all labels in the root bag.

    Width is exact (labelled treewidth); the depth is that of the returned
    certificate after re-rooting at a bag containing the labels, topped with a
    labels-only root bag.  Used to witness membership in the rooted
    width/depth classes; the depth is not separately minimized.
    """
    labels = p.labelled_vertices_global()
    width, deco = labelled_treewidth(p, cap)
    host = next(i for i, b in enumerate(deco.bags) if labels <= b)
    reroot = _reroot(deco, host)
    bags = [frozenset(labels)] + reroot.bags
    parent: List[Optional[int]] = [None] + [
        (0 if q is None else q + 1) for q in reroot.parent
    ]
    full = TreeDecomposition(bags, parent)
    return width, rooted_depth(full), full


def _reroot(d: TreeDecomposition, new_root: int) -> TreeDecomposition:
    n = len(d.bags)
    neighbours: List[Set[int]] = [set() for _ in range(n)]
    for i, p in enumerate(d.parent):
        if p is not None:
            neighbours[i].add(p)
            neighbours[p].add(i)
    parent: List[Optional[int]] = [None] * n
    seen = {new_root}
    stack = [new_root]
    while stack:
        x = stack.pop()
        for y in neighbours[x]:
            if y not in seen:
                seen.add(y)
                parent[y] = x
                stack.append(y)
    return TreeDecomposition(list(d.bags), parent)
