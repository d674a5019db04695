"""Bipartite multigraphs, labelled patterns, and the labelled-pattern algebra.

A pattern is a bipartite multigraph with a fixed bipartition: left vertices
A = {0..a_count-1} and right vertices B = {0..b_count-1}, with edges stored as
a map (a_index, b_index) -> multiplicity >= 1.  Isomorphism preserves the
bipartition (no side swap) and all multiplicities.

Where a function ranges over all vertices (quotients, colourings, minors,
decompositions) we use *global* vertex ids: A-vertex i is `i`, B-vertex j is
`a_count + j`.  Serialized forms are 1-based; everything internal is 0-based.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .errors import (
    ArityMismatch,
    IndexOutOfRange,
    InvalidBranchSets,
    InvalidParameter,
    ParseError,
    SizeCap,
)

SIDE_A = "A"
SIDE_B = "B"


class BipartiteMultigraph:
    """Pattern/host graph with fixed bipartition and edge multiplicities."""

    __slots__ = ("a_count", "b_count", "edges")

    def __init__(self, a_count: int, b_count: int, edges: Dict[Tuple[int, int], int] | None = None):
        if a_count < 0 or b_count < 0:
            raise InvalidParameter("vertex counts must be non-negative")
        self.a_count = a_count
        self.b_count = b_count
        self.edges: Dict[Tuple[int, int], int] = {}
        for (i, j), mult in (edges or {}).items():
            if not (0 <= i < a_count and 0 <= j < b_count):
                raise InvalidParameter(f"edge ({i},{j}) out of range")
            if mult < 1:
                raise InvalidParameter("edge multiplicities must be >= 1")
            self.edges[(i, j)] = int(mult)

    # -- basic queries -------------------------------------------------------

    def num_vertices(self) -> int:
        return self.a_count + self.b_count

    def num_edge_slots(self) -> int:
        """Number of edges counted with multiplicity."""
        return sum(self.edges.values())

    def norm(self) -> int:
        """The size measure |V(F)| + |E(F)| with edges counted by multiplicity."""
        return self.num_vertices() + self.num_edge_slots()

    def is_simple(self) -> bool:
        return all(m == 1 for m in self.edges.values())

    def underlying_simple(self) -> "BipartiteMultigraph":
        return BipartiteMultigraph(self.a_count, self.b_count, {e: 1 for e in self.edges})

    # Global-id helpers.  A-vertex i -> i, B-vertex j -> a_count + j.

    def vertices(self) -> range:
        return range(self.num_vertices())

    def side(self, v: int) -> str:
        if not 0 <= v < self.num_vertices():
            raise IndexOutOfRange(f"vertex {v} out of range")
        return SIDE_A if v < self.a_count else SIDE_B

    def global_id(self, side: str, local: int) -> int:
        return local if side == SIDE_A else self.a_count + local

    def local_id(self, v: int) -> Tuple[str, int]:
        return (SIDE_A, v) if v < self.a_count else (SIDE_B, v - self.a_count)

    def edge_list_global(self) -> List[Tuple[int, int, int]]:
        """Edges as (a_global, b_global, multiplicity), sorted."""
        return sorted((i, self.a_count + j, m) for (i, j), m in self.edges.items())

    def adjacency(self) -> List[FrozenSet[int]]:
        """Simple adjacency over global ids."""
        adj: List[set] = [set() for _ in self.vertices()]
        for (i, j) in self.edges:
            u, v = i, self.a_count + j
            adj[u].add(v)
            adj[v].add(u)
        return [frozenset(s) for s in adj]

    def degree_global(self, v: int) -> int:
        """Degree counted with multiplicity."""
        side, local = self.local_id(v)
        if side == SIDE_A:
            return sum(m for (i, _), m in self.edges.items() if i == local)
        return sum(m for (_, j), m in self.edges.items() if j == local)

    def max_degree(self) -> int:
        return max((self.degree_global(v) for v in self.vertices()), default=0)

    def isolated_vertices(self) -> List[int]:
        touched = set()
        for (i, j) in self.edges:
            touched.add(i)
            touched.add(self.a_count + j)
        return [v for v in self.vertices() if v not in touched]

    def is_connected(self) -> bool:
        n = self.num_vertices()
        if n <= 1:
            return True
        adj = self.adjacency()
        seen = {0}
        stack = [0]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == n

    def without_isolated(self) -> Tuple["BipartiteMultigraph", Dict[int, int]]:
        """Drop isolated vertices; returns (graph, old global id -> new global id)."""
        iso = set(self.isolated_vertices())
        keep_a = [i for i in range(self.a_count) if i not in iso]
        keep_b = [j for j in range(self.b_count) if self.a_count + j not in iso]
        amap = {old: new for new, old in enumerate(keep_a)}
        bmap = {old: new for new, old in enumerate(keep_b)}
        edges = {(amap[i], bmap[j]): m for (i, j), m in self.edges.items()}
        g = BipartiteMultigraph(len(keep_a), len(keep_b), edges)
        vmap = {old: amap[old] for old in keep_a}
        vmap.update({self.a_count + old: len(keep_a) + bmap[old] for old in keep_b})
        return g, vmap

    def disjoint_union(self, other: "BipartiteMultigraph") -> "BipartiteMultigraph":
        edges = dict(self.edges)
        for (i, j), m in other.edges.items():
            edges[(self.a_count + i, self.b_count + j)] = m
        return BipartiteMultigraph(self.a_count + other.a_count, self.b_count + other.b_count, edges)

    # -- canonical form, equality, hashing ------------------------------------

    def canonical_key(self, cap: int = 10):
        """Canonical form under independent permutations of A and B.

        Exhaustive minimization over side permutations with degree-profile
        pruning; sufficient at desk scale (sides capped at `cap`).
        """
        if self.a_count > cap or self.b_count > cap:
            raise SizeCap(f"canonical form capped at side size {cap}")
        # Group side vertices by weighted-degree profile to cut the search.
        a_profiles = [tuple(sorted(m for (i, j), m in self.edges.items() if i == ai))
                      for ai in range(self.a_count)]
        b_profiles = [tuple(sorted(m for (i, j), m in self.edges.items() if j == bj))
                      for bj in range(self.b_count)]

        def perms_by_profile(profiles):
            order = sorted(range(len(profiles)), key=lambda v: (profiles[v], v))
            groups: List[List[int]] = []
            for v in order:
                if groups and profiles[groups[-1][0]] == profiles[v]:
                    groups[-1].append(v)
                else:
                    groups.append([v])
            for combo in itertools.product(*(itertools.permutations(g) for g in groups)):
                perm: List[int] = []
                for block in combo:
                    perm.extend(block)
                yield perm  # perm[new_index] = old_index

        best = None
        for pa in perms_by_profile(a_profiles):
            inv_a = {old: new for new, old in enumerate(pa)}
            for pb in perms_by_profile(b_profiles):
                inv_b = {old: new for new, old in enumerate(pb)}
                key = tuple(sorted((inv_a[i], inv_b[j], m) for (i, j), m in self.edges.items()))
                if best is None or key < best:
                    best = key
        return (self.a_count, self.b_count, best)

    def __eq__(self, other):
        if not isinstance(other, BipartiteMultigraph):
            return NotImplemented
        return (self.a_count, self.b_count, self.edges) == (other.a_count, other.b_count, other.edges)

    def __hash__(self):
        return hash((self.a_count, self.b_count, frozenset(self.edges.items())))

    def __repr__(self):
        return f"BipartiteMultigraph(a={self.a_count}, b={self.b_count}, edges={sorted(self.edges.items())})"

    # -- serialization (1-based externally) ------------------------------------

    def to_json(self) -> dict:
        return {
            "a": self.a_count,
            "b": self.b_count,
            "edges": [[i + 1, j + 1, m] for (i, j), m in sorted(self.edges.items())],
        }

    @staticmethod
    def from_json(data: dict) -> "BipartiteMultigraph":
        try:
            edges = {(int(i) - 1, int(j) - 1): int(m) for i, j, m in data.get("edges", [])}
            return BipartiteMultigraph(int(data["a"]), int(data["b"]), edges)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed graph JSON: {exc}") from exc


# -- generators ----------------------------------------------------------------


def make_path(v: int) -> BipartiteMultigraph:
    """Path on v vertices, alternately assigned to A and B starting in A."""
    if v < 1:
        raise InvalidParameter("paths need at least one vertex")
    a_count = (v + 1) // 2
    b_count = v // 2
    edges: Dict[Tuple[int, int], int] = {}
    for k in range(v - 1):
        # Vertex k sits at A-index k//2 when k is even, B-index k//2 otherwise.
        if k % 2 == 0:
            edges[(k // 2, k // 2)] = 1
        else:
            edges[((k + 1) // 2, k // 2)] = 1
    return BipartiteMultigraph(a_count, b_count, edges)


def make_grid(rows: int, cols: int) -> BipartiteMultigraph:
    """rows-by-cols grid; vertex (i,j) is in A iff i+j is even (0-based)."""
    if rows < 1 or cols < 1:
        raise InvalidParameter("grids need positive dimensions")
    a_cells = [(i, j) for i in range(rows) for j in range(cols) if (i + j) % 2 == 0]
    b_cells = [(i, j) for i in range(rows) for j in range(cols) if (i + j) % 2 == 1]
    a_index = {c: k for k, c in enumerate(a_cells)}
    b_index = {c: k for k, c in enumerate(b_cells)}
    edges: Dict[Tuple[int, int], int] = {}
    for i in range(rows):
        for j in range(cols):
            for di, dj in ((0, 1), (1, 0)):
                ni, nj = i + di, j + dj
                if ni < rows and nj < cols:
                    if (i + j) % 2 == 0:
                        edges[(a_index[(i, j)], b_index[(ni, nj)])] = 1
                    else:
                        edges[(a_index[(ni, nj)], b_index[(i, j)])] = 1
    return BipartiteMultigraph(len(a_cells), len(b_cells), edges)


def make_complete_binary_tree(n: int) -> BipartiteMultigraph:
    """Largest perfect binary tree with at most n leaves; root in A."""
    graph, _, _ = complete_binary_tree_structure(n)
    return graph


def complete_binary_tree_structure(n: int):
    """(graph, left_child, right_child) with children maps over global ids."""
    if n < 1:
        raise InvalidParameter("binary trees need n >= 1")
    height = n.bit_length() - 1  # floor(log2 n)
    total = 2 ** (height + 1) - 1
    # Heap indexing: vertex k at depth d has children 2k+1, 2k+2.
    depth = [0] * total
    for k in range(1, total):
        depth[k] = depth[(k - 1) // 2] + 1
    a_nodes = [k for k in range(total) if depth[k] % 2 == 0]
    b_nodes = [k for k in range(total) if depth[k] % 2 == 1]
    a_index = {k: i for i, k in enumerate(a_nodes)}
    b_index = {k: i for i, k in enumerate(b_nodes)}
    edges: Dict[Tuple[int, int], int] = {}
    for k in range(total):
        for child in (2 * k + 1, 2 * k + 2):
            if child < total:
                if depth[k] % 2 == 0:
                    edges[(a_index[k], b_index[child])] = 1
                else:
                    edges[(a_index[child], b_index[k])] = 1
    graph = BipartiteMultigraph(len(a_nodes), len(b_nodes), edges)

    def global_of(k: int) -> int:
        return a_index[k] if depth[k] % 2 == 0 else len(a_nodes) + b_index[k]

    left_child = {global_of(k): global_of(2 * k + 1) for k in range(total) if 2 * k + 1 < total}
    right_child = {global_of(k): global_of(2 * k + 2) for k in range(total) if 2 * k + 2 < total}
    return graph, left_child, right_child


def grid_vertex_ids(rows: int, cols: int) -> Dict[Tuple[int, int], int]:
    """Map a 0-based grid cell (i, j) to its global vertex id in make_grid."""
    a_cells = [(i, j) for i in range(rows) for j in range(cols) if (i + j) % 2 == 0]
    b_cells = [(i, j) for i in range(rows) for j in range(cols) if (i + j) % 2 == 1]
    ids = {c: k for k, c in enumerate(a_cells)}
    ids.update({c: len(a_cells) + k for k, c in enumerate(b_cells)})
    return ids


def path_vertex_ids(v: int) -> List[int]:
    """Global ids of make_path(v) in path order."""
    a_count = (v + 1) // 2
    return [k // 2 if k % 2 == 0 else a_count + k // 2 for k in range(v)]


def make_complete_bipartite(a: int, b: int) -> BipartiteMultigraph:
    """K_{a,b}; stars are K_{1,b} with the centre in A."""
    if a < 1 or b < 1:
        raise InvalidParameter("complete bipartite graphs need positive sides")
    return BipartiteMultigraph(a, b, {(i, j): 1 for i in range(a) for j in range(b)})


def make_cycle(v: int) -> BipartiteMultigraph:
    """Even cycle on v vertices (v >= 4, even); C_4 equals the 2x2 grid."""
    if v < 4 or v % 2 != 0:
        raise InvalidParameter("bipartite cycles need an even length >= 4")
    edges: Dict[Tuple[int, int], int] = {}
    for k in range(v):
        u, w = k, (k + 1) % v
        if u % 2 == 0:
            edges[(u // 2, w // 2)] = edges.get((u // 2, w // 2), 0) + 1
        else:
            edges[(w // 2, u // 2)] = edges.get((w // 2, u // 2), 0) + 1
    return BipartiteMultigraph((v + 1) // 2, v // 2, edges)


# -- isomorphism -----------------------------------------------------------------


def enumerate_bipartite_multigraphs(max_vertices: int, max_slots: int,
                                    max_mult: int = 1,
                                    min_vertices: int = 1) -> List[BipartiteMultigraph]:
    """All bipartite multigraphs up to isomorphism within the given caps.

    Sides are distinguishable (an (a,b) graph is not identified with its
    (b,a) transpose); enumeration is by side sizes, then multiplicity
    assignments, deduplicated through canonical forms.
    """
    seen = set()
    out: List[BipartiteMultigraph] = []
    for a in range(0, max_vertices + 1):
        for b in range(0, max_vertices + 1 - a):
            if not min_vertices <= a + b <= max_vertices:
                continue
            cells = [(i, j) for i in range(a) for j in range(b)]
            current: Dict[Tuple[int, int], int] = {}

            def rec(idx: int, total: int):
                if idx == len(cells):
                    g = BipartiteMultigraph(a, b, dict(current))
                    key = g.canonical_key()
                    if key not in seen:
                        seen.add(key)
                        out.append(g)
                    return
                rec(idx + 1, total)
                for mult in range(1, max_mult + 1):
                    if total + mult > max_slots:
                        break
                    current[cells[idx]] = mult
                    rec(idx + 1, total + mult)
                    del current[cells[idx]]

            rec(0, 0)
    return out


def are_isomorphic(f: BipartiteMultigraph, g: BipartiteMultigraph, cap: int = 10) -> bool:
    """Bipartition- and multiplicity-preserving isomorphism test.

    Exhaustive backtracking over A-side images with degree-profile pruning;
    the B-side matching is then checked directly.
    """
    if max(f.a_count, f.b_count, g.a_count, g.b_count) > cap:
        raise SizeCap(f"isomorphism test capped at side size {cap}")
    if (f.a_count, f.b_count) != (g.a_count, g.b_count):
        return False
    if sorted(f.edges.values()) != sorted(g.edges.values()):
        return False
    return f.canonical_key(cap) == g.canonical_key(cap)


# -- quotients -------------------------------------------------------------------


def quotient(f: BipartiteMultigraph, s: Dict[int, str]) -> BipartiteMultigraph:
    """Contract monochromatic components of the two-colouring s: V(F) -> {A,B}.

    Edges whose endpoints get the same colour form the set L; every connected
    component of (V, L) is contracted to one vertex, surviving edges keep and
    accumulate multiplicities, and the bipartition of the result is given by s.
    """
    for v in f.vertices():
        if s.get(v) not in (SIDE_A, SIDE_B):
            raise InvalidParameter(f"colouring must assign A or B to vertex {v}")
    parent = list(range(f.num_vertices()))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    for (i, j) in f.edges:
        u, v = i, f.a_count + j
        if s[u] == s[v]:
            union(u, v)

    reps = sorted({find(v) for v in f.vertices()})
    a_reps = [r for r in reps if s[r] == SIDE_A]
    b_reps = [r for r in reps if s[r] == SIDE_B]
    a_index = {r: k for k, r in enumerate(a_reps)}
    b_index = {r: k for k, r in enumerate(b_reps)}
    edges: Dict[Tuple[int, int], int] = {}
    for (i, j), m in f.edges.items():
        u, v = find(i), find(f.a_count + j)
        if s[u] == s[v]:
            continue
        if s[u] == SIDE_A:
            key = (a_index[u], b_index[v])
        else:
            key = (a_index[v], b_index[u])
        edges[key] = edges.get(key, 0) + m
    return BipartiteMultigraph(len(a_reps), len(b_reps), edges)


# -- labelled patterns -------------------------------------------------------------


@dataclass(frozen=True)
class LabelledPattern:
    """An (l, r)-labelled bipartite graph: label tuples over A- and B-vertices.

    Labels are local indices (A-index for a_labels, B-index for b_labels);
    repeats are allowed.
    """

    graph: BipartiteMultigraph
    a_labels: Tuple[int, ...] = ()
    b_labels: Tuple[int, ...] = ()

    def __post_init__(self):
        for i in self.a_labels:
            if not 0 <= i < self.graph.a_count:
                raise IndexOutOfRange(f"left label {i} out of range")
        for j in self.b_labels:
            if not 0 <= j < self.graph.b_count:
                raise IndexOutOfRange(f"right label {j} out of range")

    def arity(self) -> Tuple[int, int]:
        return (len(self.a_labels), len(self.b_labels))

    def labelled_vertices_global(self) -> FrozenSet[int]:
        g = self.graph
        return frozenset(list(self.a_labels) + [g.a_count + j for j in self.b_labels])

    def to_json(self) -> dict:
        data = self.graph.to_json()
        data["a_labels"] = [i + 1 for i in self.a_labels]
        data["b_labels"] = [j + 1 for j in self.b_labels]
        return data

    @staticmethod
    def from_json(data: dict) -> "LabelledPattern":
        g = BipartiteMultigraph.from_json(data)
        try:
            a_labels = tuple(int(i) - 1 for i in data.get("a_labels", []))
            b_labels = tuple(int(j) - 1 for j in data.get("b_labels", []))
        except (TypeError, ValueError) as exc:
            raise ParseError(f"malformed labels: {exc}") from exc
        return LabelledPattern(g, a_labels, b_labels)


def tensor_union(f: LabelledPattern, g: LabelledPattern) -> LabelledPattern:
    """Disjoint union with concatenated label tuples."""
    graph = f.graph.disjoint_union(g.graph)
    a_labels = f.a_labels + tuple(f.graph.a_count + i for i in g.a_labels)
    b_labels = f.b_labels + tuple(f.graph.b_count + j for j in g.b_labels)
    return LabelledPattern(graph, a_labels, b_labels)


def glue(f: LabelledPattern, g: LabelledPattern) -> LabelledPattern:
    """Gluing product: identify equally-positioned labelled vertices.

    Edge multiplicities add where identified edges become parallel.
    """
    if f.arity() != g.arity():
        raise ArityMismatch(f"gluing needs equal arities, got {f.arity()} vs {g.arity()}")
    fg = f.graph
    gg = g.graph
    union = fg.disjoint_union(gg)
    # Union-find over the union's global ids; g's vertices are shifted.
    parent = list(range(union.num_vertices()))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def merge(x: int, y: int):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    # Shifted ids in the union: union A = fg.A ++ gg.A, union B = fg.B ++ gg.B.
    def f_a(i: int) -> int:
        return i

    def f_b(j: int) -> int:
        return union.a_count + j

    def g_a(i: int) -> int:
        return fg.a_count + i

    def g_b(j: int) -> int:
        return union.a_count + fg.b_count + j

    for fi, gi in zip(f.a_labels, g.a_labels):
        merge(f_a(fi), g_a(gi))
    for fj, gj in zip(f.b_labels, g.b_labels):
        merge(f_b(fj), g_b(gj))

    reps = sorted({find(v) for v in range(union.num_vertices())})
    a_reps = [r for r in reps if r < union.a_count]
    b_reps = [r for r in reps if r >= union.a_count]
    a_index = {r: k for k, r in enumerate(a_reps)}
    b_index = {r: k for k, r in enumerate(b_reps)}
    edges: Dict[Tuple[int, int], int] = {}
    for (i, j), m in union.edges.items():
        key = (a_index[find(i)], b_index[find(union.a_count + j)])
        edges[key] = edges.get(key, 0) + m
    glued = BipartiteMultigraph(len(a_reps), len(b_reps), edges)
    a_labels = tuple(a_index[find(f_a(i))] for i in f.a_labels)
    b_labels = tuple(b_index[find(f_b(j))] for j in f.b_labels)
    return LabelledPattern(glued, a_labels, b_labels)


def drop_label(p: LabelledPattern, side: str, position: int) -> LabelledPattern:
    """Remove the label at `position` (0-based) on the given side."""
    if side == SIDE_A:
        if not 0 <= position < len(p.a_labels):
            raise IndexOutOfRange(f"no left label at position {position}")
        labels = p.a_labels[:position] + p.a_labels[position + 1:]
        return LabelledPattern(p.graph, labels, p.b_labels)
    if side == SIDE_B:
        if not 0 <= position < len(p.b_labels):
            raise IndexOutOfRange(f"no right label at position {position}")
        labels = p.b_labels[:position] + p.b_labels[position + 1:]
        return LabelledPattern(p.graph, p.a_labels, labels)
    raise InvalidParameter("side must be 'A' or 'B'")


# -- minors -----------------------------------------------------------------------


@dataclass(frozen=True)
class BranchSets:
    """Branch sets witnessing S as a minor of F (global ids on both sides).

    `sets[k]` is the branch set of S-vertex k (global id in S); `b0` is the
    unused remainder.  Each F[sets[k]] is connected and every S-edge has at
    least one F-edge between its branch sets.
    """

    sets: Tuple[FrozenSet[int], ...]
    b0: FrozenSet[int]

    def validate(self, s: BipartiteMultigraph, f: BipartiteMultigraph) -> bool:
        if len(self.sets) != s.num_vertices():
            raise InvalidBranchSets("one branch set per S-vertex required")
        all_vs = set(self.b0)
        for bs in self.sets:
            if not bs:
                raise InvalidBranchSets("branch sets must be non-empty")
            if all_vs & bs:
                raise InvalidBranchSets("branch sets must be disjoint")
            all_vs |= bs
        if all_vs != set(f.vertices()):
            raise InvalidBranchSets("branch sets plus remainder must partition V(F)")
        adj = f.adjacency()
        for bs in self.sets:
            if not _connected_in(adj, bs):
                raise InvalidBranchSets("each branch set must induce a connected subgraph")
        for (i, j) in s.edges:
            u, v = i, s.a_count + j
            if not _has_cross_edge(adj, self.sets[u], self.sets[v]):
                raise InvalidBranchSets(f"no F-edge between branch sets of S-edge ({u},{v})")
        return True


def _connected_in(adj: Sequence[FrozenSet[int]], vs: FrozenSet[int]) -> bool:
    if not vs:
        return False
    start = next(iter(vs))
    seen = {start}
    stack = [start]
    while stack:
        for w in adj[stack.pop()]:
            if w in vs and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == set(vs)


def _has_cross_edge(adj: Sequence[FrozenSet[int]], xs: FrozenSet[int], ys: FrozenSet[int]) -> bool:
    return any(adj[x] & ys for x in xs)


def find_minor(s: BipartiteMultigraph, f: BipartiteMultigraph,
               norm_cap: int = 24) -> Optional[BranchSets]:
    """Exhaustive branch-set search for S as a minor of F's underlying simple graph.

    S must be simple.  Returns a validated BranchSets witness or None.  The
    search assigns branch sets vertex by vertex over precomputed connected
    subsets, pruning on the cross-edge condition against already-placed sets.
    """
    if not s.is_simple():
        raise InvalidParameter("minor pattern S must be simple")
    if f.norm() > norm_cap:
        raise SizeCap(f"minor search capped at norm {norm_cap}")
    nf = f.num_vertices()
    ns = s.num_vertices()
    if ns == 0:
        return BranchSets((), frozenset(f.vertices()))
    if ns > nf:
        return None
    adj = f.adjacency()

    # All connected subsets of V(F), grouped nowhere: just a flat list; nf <= ~12.
    connected_subsets: List[FrozenSet[int]] = []
    for size in range(1, nf - ns + 2):
        for combo in itertools.combinations(range(nf), size):
            cs = frozenset(combo)
            if _connected_in(adj, cs):
                connected_subsets.append(cs)

    s_edges_global = [(i, s.a_count + j) for (i, j) in s.edges]
    order = sorted(range(ns), key=lambda v: -len([e for e in s_edges_global if v in e]))

    assigned: Dict[int, FrozenSet[int]] = {}
    used: set = set()

    def backtrack(pos: int) -> Optional[Dict[int, FrozenSet[int]]]:
        if pos == ns:
            return dict(assigned)
        v = order[pos]
        needed = [(u, w) for (u, w) in s_edges_global if (u == v and w in assigned) or (w == v and u in assigned)]
        for cs in connected_subsets:
            if cs & used:
                continue
            ok = True
            for (u, w) in needed:
                other = assigned[w if u == v else u]
                if not _has_cross_edge(adj, cs, other):
                    ok = False
                    break
            if not ok:
                continue
            assigned[v] = cs
            used.update(cs)
            result = backtrack(pos + 1)
            if result is not None:
                return result
            del assigned[v]
            used.difference_update(cs)
        return None

    solution = backtrack(0)
    if solution is None:
        return None
    sets = tuple(solution[v] for v in range(ns))
    b0 = frozenset(set(f.vertices()) - set().union(*sets))
    witness = BranchSets(sets, b0)
    witness.validate(s, f)
    return witness
