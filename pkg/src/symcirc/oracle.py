"""Exact brute-force reference semantics for homomorphism polynomials.

Everything here enumerates maps directly from the definitions, in row-major
order over the pattern's vertices, and sums exactly over the rationals: these
are the oracles every compiled circuit and every reduction identity is checked
against, so no dynamic programming or clever counting is allowed.

Hosts come in two forms:

  * WeightedHost: an (n, m) matrix of rational weights, the evaluation point
    for hom_{F,n,m} (rows are left images, columns right images);
  * ColouredGraph: a square symmetric weighting over pairs (colour, index),
    the evaluation point for colourful and coloured homomorphism polynomials.
    Class sizes may differ per colour; missing entries mean weight zero.

Weight values are usually Rational but any commutative ring element with
+, *, ** works (polynomials included).
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import (
    BasisNotFound,
    InvalidParameter,
    ParseError,
    SizeCap,
)
from .exactnum import Rational, SparsePolynomial, exact_det
from .circuit import colour_var_name, var_name
from .pattern import BipartiteMultigraph, LabelledPattern, are_isomorphic

BRUTE_FORCE_CAP = 10 ** 7


def _colour_key(text):
    """Colour ids serialize as strings; integer-looking ones parse back to int."""
    if isinstance(text, int):
        return text
    try:
        return int(text)
    except (TypeError, ValueError):
        return text


class WeightedHost:
    """An (n, m) rational weight matrix; entries default to zero."""

    __slots__ = ("n", "m", "weights")

    def __init__(self, n: int, m: int, weights: Mapping[Tuple[int, int], Rational] | None = None):
        if n < 0 or m < 0:
            raise InvalidParameter("host dimensions must be non-negative")
        self.n = n
        self.m = m
        self.weights: Dict[Tuple[int, int], Rational] = {}
        for (i, j), w in (weights or {}).items():
            if not (0 <= i < n and 0 <= j < m):
                raise InvalidParameter(f"host entry ({i},{j}) out of range")
            if w != 0:
                self.weights[(i, j)] = w

    @staticmethod
    def all_ones(n: int, m: int) -> "WeightedHost":
        return WeightedHost(n, m, {(i, j): Fraction(1) for i in range(n) for j in range(m)})

    @staticmethod
    def from_assignment(n: int, m: int, assignment: Mapping[str, Rational]) -> "WeightedHost":
        """Host from an x_<i>_<j> variable assignment (1-based names)."""
        weights = {}
        for i in range(n):
            for j in range(m):
                name = var_name(i + 1, j + 1)
                if name in assignment:
                    weights[(i, j)] = assignment[name]
        return WeightedHost(n, m, weights)

    def to_assignment(self) -> Dict[str, Rational]:
        """Total x_<i>_<j> assignment (zeros included)."""
        return {
            var_name(i + 1, j + 1): self.weights.get((i, j), Fraction(0))
            for i in range(self.n) for j in range(self.m)
        }

    def get(self, i: int, j: int):
        return self.weights.get((i, j), Fraction(0))

    def scale(self, t) -> "WeightedHost":
        return WeightedHost(self.n, self.m, {k: t * w for k, w in self.weights.items()})

    def shift_all(self, c) -> "WeightedHost":
        """Add c to every entry (including stored zeros)."""
        return WeightedHost(self.n, self.m, {
            (i, j): self.get(i, j) + c for i in range(self.n) for j in range(self.m)
        })

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "weights": [
                [i + 1, j + 1, {"num": str(Fraction(w).numerator), "den": str(Fraction(w).denominator)}]
                for (i, j), w in sorted(self.weights.items())
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "WeightedHost":
        try:
            weights = {
                (int(i) - 1, int(j) - 1): Fraction(int(w["num"]), int(w["den"]))
                for i, j, w in data.get("weights", [])
            }
            return WeightedHost(int(data["n"]), int(data["m"]), weights)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed host JSON: {exc}") from exc

    @staticmethod
    def random(n: int, m: int, rng: random.Random, lo: int = -4, hi: int = 4,
               den: int = 3) -> "WeightedHost":
        return WeightedHost(n, m, {
            (i, j): Fraction(rng.randint(lo, hi), rng.randint(1, den))
            for i in range(n) for j in range(m)
        })


class ColouredGraph:
    """Edge-weighted graph whose vertices are (colour, index) pairs.

    Weights are stored symmetrically (both key orders), so the graph is
    undirected; lookups during evaluation put the pattern's A-side endpoint
    first, which is then immaterial.  `sizes[c]` is the number of vertices in
    colour class c; indices are 0-based internally.
    """

    __slots__ = ("colours", "sizes", "weights")

    def __init__(self, sizes: Mapping[Hashable, int]):
        self.colours = sorted(sizes, key=repr)
        self.sizes: Dict[Hashable, int] = dict(sizes)
        for c, s in self.sizes.items():
            if s < 0:
                raise InvalidParameter(f"negative class size for colour {c!r}")
        self.weights: Dict[Tuple[Tuple[Hashable, int], Tuple[Hashable, int]], object] = {}

    def _check(self, key: Tuple[Hashable, int]):
        c, i = key
        if c not in self.sizes or not 0 <= i < self.sizes[c]:
            raise InvalidParameter(f"vertex {key!r} not in the coloured graph")

    def set_weight(self, u: Tuple[Hashable, int], v: Tuple[Hashable, int], w):
        self._check(u)
        self._check(v)
        if w == 0:
            self.weights.pop((u, v), None)
            self.weights.pop((v, u), None)
        else:
            self.weights[(u, v)] = w
            self.weights[(v, u)] = w

    def get(self, u, v):
        return self.weights.get((u, v), Fraction(0))

    def copy(self) -> "ColouredGraph":
        g = ColouredGraph(self.sizes)
        g.weights = dict(self.weights)
        return g

    def scale(self, t) -> "ColouredGraph":
        g = ColouredGraph(self.sizes)
        g.weights = {k: t * w for k, w in self.weights.items()}
        return g

    def pad_to(self, size: int) -> "ColouredGraph":
        """Grow every class to `size` by adding isolated vertices."""
        if any(s > size for s in self.sizes.values()):
            raise InvalidParameter("pad_to cannot shrink classes")
        g = ColouredGraph({c: size for c in self.colours})
        g.weights = dict(self.weights)
        return g

    def vertex_order(self) -> List[Tuple[Hashable, int]]:
        return [(c, i) for c in self.colours for i in range(self.sizes[c])]

    def flatten(self) -> WeightedHost:
        """The square matrix over the flattened vertex order (rows = columns)."""
        order = self.vertex_order()
        index = {v: k for k, v in enumerate(order)}
        n = len(order)
        weights = {}
        for (u, v), w in self.weights.items():
            weights[(index[u], index[v])] = w
        return WeightedHost(n, n, weights)

    def flatten_bipartite(self, a_colours: Sequence[Hashable],
                          b_colours: Sequence[Hashable]) -> WeightedHost:
        """An (n, m) host with rows drawn from the a-colour classes and
        columns from the b-colour classes (0/1 gadgets become bi-adjacency
        matrices)."""
        rows = [(c, i) for c in a_colours for i in range(self.sizes[c])]
        cols = [(c, i) for c in b_colours for i in range(self.sizes[c])]
        row_index = {v: k for k, v in enumerate(rows)}
        col_index = {v: k for k, v in enumerate(cols)}
        weights = {}
        for (u, v), w in self.weights.items():
            if u in row_index and v in col_index:
                weights[(row_index[u], col_index[v])] = w
        return WeightedHost(len(rows), len(cols), weights)

    def to_assignment(self) -> Dict[str, object]:
        """Colourful-variable assignment x_<c>_<i>__<c'>_<j> (A-key order kept
        for both orientations since weights are symmetric)."""
        out = {}
        for (u, v), w in self.weights.items():
            out[colour_var_name(u[0], u[1] + 1, v[0], v[1] + 1)] = w
        return out

    @staticmethod
    def random(sizes: Mapping[Hashable, int], pairs: Iterable[Tuple[Hashable, Hashable]],
               rng: random.Random, lo: int = -4, hi: int = 4, den: int = 3) -> "ColouredGraph":
        """Random rational weights on all member pairs of the given colour pairs."""
        g = ColouredGraph(sizes)
        for (c, c2) in pairs:
            for i in range(g.sizes[c]):
                for j in range(g.sizes[c2]):
                    g.set_weight((c, i), (c2, j), Fraction(rng.randint(lo, hi), rng.randint(1, den)))
        return g

    def to_json(self) -> dict:
        entries = []
        for ((c, i), (c2, j)), w in sorted(self.weights.items(), key=repr):
            if (repr(c), i) <= (repr(c2), j):
                wf = Fraction(w)
                entries.append([c, i + 1, c2, j + 1,
                                {"num": str(wf.numerator), "den": str(wf.denominator)}])
        return {"sizes": {str(c): s for c, s in sorted(self.sizes.items(), key=repr)},
                "weights": entries}

    @staticmethod
    def from_json(data: dict) -> "ColouredGraph":
        try:
            sizes = {_colour_key(c): int(s) for c, s in data["sizes"].items()}
            g = ColouredGraph(sizes)
            for c, i, c2, j, w in data.get("weights", []):
                g.set_weight((_colour_key(c), int(i) - 1), (_colour_key(c2), int(j) - 1),
                             Fraction(int(w["num"]), int(w["den"])))
            return g
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed coloured graph JSON: {exc}") from exc


# -- homomorphism counting ---------------------------------------------------------


def _check_cap(count: int, cap: Optional[int] = None):
    if cap is None:
        cap = BRUTE_FORCE_CAP  # looked up at call time so caps can be overridden
    if count > cap:
        raise SizeCap(f"brute-force enumeration of {count} maps exceeds cap {cap}")


def hom_count(f: BipartiteMultigraph, host: WeightedHost):
    """Sum over all maps h of the product of host weights along F's edges."""
    _check_cap(host.n ** f.a_count * host.m ** f.b_count)
    edges = sorted(f.edges.items())
    total = Fraction(0)
    for a_img in itertools.product(range(host.n), repeat=f.a_count):
        for b_img in itertools.product(range(host.m), repeat=f.b_count):
            term = Fraction(1)
            for (i, j), mult in edges:
                w = host.get(a_img[i], b_img[j])
                if w == 0:
                    term = 0
                    break
                term = term * (w if mult == 1 else w ** mult)
            if term != 0:
                total = total + term
    return total


def hom_poly(f: BipartiteMultigraph, n: int, m: int) -> SparsePolynomial:
    """hom_{F,n,m} expanded as a polynomial in the x_<i>_<j> variables."""
    _check_cap(n ** f.a_count * m ** f.b_count)
    names = [[var_name(i + 1, j + 1) for j in range(m)] for i in range(n)]
    variables = tuple(sorted(name for row in names for name in row))
    pos = {v: k for k, v in enumerate(variables)}
    terms: Dict[Tuple[int, ...], Fraction] = {}
    edges = sorted(f.edges.items())
    zero_exp = [0] * len(variables)
    for a_img in itertools.product(range(n), repeat=f.a_count):
        for b_img in itertools.product(range(m), repeat=f.b_count):
            exp = list(zero_exp)
            for (i, j), mult in edges:
                exp[pos[names[a_img[i]][b_img[j]]]] += mult
            key = tuple(exp)
            terms[key] = terms.get(key, Fraction(0)) + 1
    return SparsePolynomial(variables, terms)


def coloured_hom_eval(f: BipartiteMultigraph, colouring: Mapping[int, Hashable],
                      g: ColouredGraph):
    """Coloured homomorphism value: every vertex maps into its colour's class.

    With `colouring` the identity on V(F) this is the colourful homomorphism
    polynomial evaluated at g.  Class sizes are g's actual sizes.
    """
    sizes = []
    for v in f.vertices():
        c = colouring[v]
        if c not in g.sizes:
            raise InvalidParameter(f"colour {c!r} missing from the host")
        sizes.append(g.sizes[c])
    count = 1
    for s in sizes:
        count *= max(s, 1)
        _check_cap(count)
    edges = [(i, f.a_count + j, mult) for (i, j), mult in sorted(f.edges.items())]
    total = Fraction(0)
    for image in itertools.product(*[range(s) for s in sizes]):
        term = Fraction(1)
        for (u, v, mult) in edges:
            w = g.get((colouring[u], image[u]), (colouring[v], image[v]))
            if w == 0:
                term = 0
                break
            term = term * (w if mult == 1 else w ** mult)
        if term != 0:
            total = total + term
    return total


def identity_colouring(f: BipartiteMultigraph) -> Dict[int, int]:
    """The identity colouring; colours are 1-based vertex ids externally."""
    return {v: v + 1 for v in f.vertices()}


def colhom_eval(f: BipartiteMultigraph, g: ColouredGraph):
    """Colourful homomorphism value (colouring = identity, 1-based colours)."""
    return coloured_hom_eval(f, identity_colouring(f), g)


def colhom_poly(f: BipartiteMultigraph, n: int) -> SparsePolynomial:
    """colhom_{F,n} expanded over colourful variables (colours = global ids,
    1-based in names, A-side endpoint first)."""
    _check_cap(n ** f.num_vertices())
    edges = [(i, f.a_count + j, mult) for (i, j), mult in sorted(f.edges.items())]
    varset = sorted({
        colour_var_name(u + 1, i + 1, v + 1, j + 1)
        for (u, v, _) in edges for i in range(n) for j in range(n)
    })
    pos = {name: k for k, name in enumerate(varset)}
    terms: Dict[Tuple[int, ...], Fraction] = {}
    for image in itertools.product(range(n), repeat=f.num_vertices()):
        exp = [0] * len(varset)
        for (u, v, mult) in edges:
            exp[pos[colour_var_name(u + 1, image[u] + 1, v + 1, image[v] + 1)]] += mult
        key = tuple(exp)
        terms[key] = terms.get(key, Fraction(0)) + 1
    return SparsePolynomial(varset, terms)


def labelled_hom_eval(p: LabelledPattern, v: Sequence[int], w: Sequence[int],
                      host: WeightedHost):
    """Labelled homomorphism polynomial map evaluated at host (0-based images)."""
    f = p.graph
    if len(v) != len(p.a_labels) or len(w) != len(p.b_labels):
        raise InvalidParameter("label images must match the pattern's arity")
    fixed_a: Dict[int, int] = {}
    for label, img in zip(p.a_labels, v):
        if fixed_a.setdefault(label, img) != img:
            return Fraction(0)
    fixed_b: Dict[int, int] = {}
    for label, img in zip(p.b_labels, w):
        if fixed_b.setdefault(label, img) != img:
            return Fraction(0)
    free_a = [i for i in range(f.a_count) if i not in fixed_a]
    free_b = [j for j in range(f.b_count) if j not in fixed_b]
    _check_cap(host.n ** len(free_a) * host.m ** len(free_b))
    edges = sorted(f.edges.items())
    total = Fraction(0)
    for a_img in itertools.product(range(host.n), repeat=len(free_a)):
        amap = dict(fixed_a)
        amap.update(zip(free_a, a_img))
        for b_img in itertools.product(range(host.m), repeat=len(free_b)):
            bmap = dict(fixed_b)
            bmap.update(zip(free_b, b_img))
            term = Fraction(1)
            for (i, j), mult in edges:
                weight = host.get(amap[i], bmap[j])
                if weight == 0:
                    term = 0
                    break
                term = term * (weight if mult == 1 else weight ** mult)
            if term != 0:
                total = total + term
    return total


def emb_eval(f: BipartiteMultigraph, host: WeightedHost):
    """Embedding value: the hom sum restricted to per-side injective maps."""
    if f.a_count > host.n or f.b_count > host.m:
        return Fraction(0)
    count = 1
    for k in range(f.a_count):
        count *= host.n - k
    for k in range(f.b_count):
        count *= host.m - k
    _check_cap(count)
    edges = sorted(f.edges.items())
    total = Fraction(0)
    for a_img in itertools.permutations(range(host.n), f.a_count):
        for b_img in itertools.permutations(range(host.m), f.b_count):
            term = Fraction(1)
            for (i, j), mult in edges:
                w = host.get(a_img[i], b_img[j])
                if w == 0:
                    term = 0
                    break
                term = term * (w if mult == 1 else w ** mult)
            if term != 0:
                total = total + term
    return total


# -- hom-to-emb expansion -------------------------------------------------------------


def _set_partitions(items: Sequence[int]):
    """All set partitions, blocks and block lists sorted for determinism."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in _set_partitions(rest):
        for k in range(len(sub)):
            yield sub[:k] + [sorted([first] + sub[k])] + sub[k + 1:]
        yield [[first]] + sub


def quotient_by_partition(f: BipartiteMultigraph, a_blocks: Sequence[Sequence[int]],
                          b_blocks: Sequence[Sequence[int]]) -> BipartiteMultigraph:
    """Merge each block to one vertex; parallel edges accumulate multiplicity."""
    a_of = {}
    for k, block in enumerate(a_blocks):
        for i in block:
            a_of[i] = k
    b_of = {}
    for k, block in enumerate(b_blocks):
        for j in block:
            b_of[j] = k
    edges: Dict[Tuple[int, int], int] = {}
    for (i, j), m in f.edges.items():
        key = (a_of[i], b_of[j])
        edges[key] = edges.get(key, 0) + m
    return BipartiteMultigraph(len(a_blocks), len(b_blocks), edges)


def hom_to_emb_terms(f: BipartiteMultigraph, cap: int = 6) -> List[BipartiteMultigraph]:
    """The quotients F/(pi, sigma) over all per-side partition pairs.

    hom_{F,n,m} equals the sum of emb over these terms; created parallel edges
    accumulate into multiplicities, which is the reading under which the
    identity holds at weighted hosts.
    """
    if f.a_count > cap or f.b_count > cap:
        raise SizeCap(f"partition enumeration capped at side size {cap}")
    out = []
    for pa in _set_partitions(list(range(f.a_count))):
        for pb in _set_partitions(list(range(f.b_count))):
            out.append(quotient_by_partition(f, sorted(pa), sorted(pb)))
    return out


# -- interpolation bases ---------------------------------------------------------------


class HomBasisCertificate:
    """Evaluation points making (hom_{F_i,N,N}(x_j))_{i,j} invertible."""

    def __init__(self, patterns: Sequence[BipartiteMultigraph], points: Sequence[WeightedHost],
                 matrix: Sequence[Sequence[Rational]]):
        self.patterns = list(patterns)
        self.points = list(points)
        self.matrix = [list(row) for row in matrix]

    def to_json(self) -> dict:
        return {
            "patterns": [p.to_json() for p in self.patterns],
            "points": [x.to_json() for x in self.points],
            "matrix": [[str(c) for c in row] for row in self.matrix],
        }


def find_hom_basis(patterns: Sequence[BipartiteMultigraph], big_n: int, seed: int,
                   attempts: int = 200) -> HomBasisCertificate:
    """Random small-integer points until the hom evaluation matrix inverts.

    Entries are drawn from {0..3} at first and the range widens every 50
    failures; determinants are computed exactly.
    """
    for idx, p in enumerate(patterns):
        if p.isolated_vertices():
            raise InvalidParameter(f"pattern {idx} has isolated vertices")
        if p.a_count > big_n or p.b_count > big_n:
            raise InvalidParameter(f"pattern {idx} larger than ({big_n},{big_n})")
    for i in range(len(patterns)):
        for j in range(i + 1, len(patterns)):
            if are_isomorphic(patterns[i], patterns[j]):
                raise InvalidParameter(f"patterns {i} and {j} are isomorphic")
    rng = random.Random(seed)
    r = len(patterns)
    for attempt in range(attempts):
        hi = 3 + attempt // 50
        points = [
            WeightedHost(big_n, big_n, {
                (i, j): Fraction(rng.randint(0, hi))
                for i in range(big_n) for j in range(big_n)
            })
            for _ in range(r)
        ]
        matrix = [[hom_count(p, x) for x in points] for p in patterns]
        if exact_det(matrix) != 0:
            return HomBasisCertificate(patterns, points, matrix)
    raise BasisNotFound(f"no invertible hom matrix after {attempts} attempts")


# -- indistinguishability ---------------------------------------------------------------


def hom_indistinguishable(g: WeightedHost, h: WeightedHost,
                          patterns: Sequence[BipartiteMultigraph]) -> bool:
    """True iff hom_count(F, g) == hom_count(F, h) for every listed pattern."""
    return all(hom_count(f, g) == hom_count(f, h) for f in patterns)
