"""The Sym_n x Sym_m action on circuits: automorphism extension, symmetry
checking, rigidification, gate orbits, minimal supports, and support depth.

A permutation pair (pi, sigma) acts on matrix variables by
x_{i,j} -> x_{pi(i), sigma(j)}.  A circuit is symmetric when every pair
extends to a gate bijection preserving labels and weighted wires; since
extensions compose, it suffices to check the adjacent-transposition
generators of both factors.  A symmetric circuit is rigid when the only
automorphism fixing all input gates is the identity; extensions are then
unique and the group acts on the gates.

Rigidification merges interchangeable gates.  For formulas it repeatedly
merges equal sibling subtrees (summing wire multiplicities), which keeps the
internal gates a tree and can only introduce multiedges; for general and skew
circuits it merges all gates with equal recursive structure.  Both reach a
rigid fixpoint in one bottom-up pass, never grow the circuit, preserve the
computed polynomial, and preserve skewness.

Supports: sup(g) is the smallest S subseteq [n] disjoint-union [m] whose
pointwise stabiliser fixes the gate g; it is found by exhaustive search in
increasing size, testing a candidate S against the transposition generators
of the complement's symmetric groups.  The canonical (lexicographically
first) minimal-size support is returned even when the smaller-than-half-side
condition guaranteeing uniqueness fails; strict mode raises instead.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from .circuit import (
    Circuit,
    CircuitBuilder,
    FORMULA,
    FORMULA_MULTI,
    GENERAL,
    PLUS,
    SKEW,
    TIMES,
    parse_var_name,
    var_name,
)
from .errors import (
    InvalidParameter,
    NotRigid,
    NotSymmetric,
    SizeCap,
    UniquenessUnavailable,
)

DEFAULT_NODE_BUDGET = 2_000_000


@dataclass(frozen=True)
class PermutationPair:
    """(pi, sigma) with pi a permutation of [n], sigma of [m]; 0-based tuples."""

    pi: Tuple[int, ...]
    sigma: Tuple[int, ...]

    def __post_init__(self):
        for perm in (self.pi, self.sigma):
            if sorted(perm) != list(range(len(perm))):
                raise InvalidParameter(f"{perm} is not a permutation")

    @staticmethod
    def identity(n: int, m: int) -> "PermutationPair":
        return PermutationPair(tuple(range(n)), tuple(range(m)))

    @staticmethod
    def left_transposition(n: int, m: int, a: int, b: int) -> "PermutationPair":
        pi = list(range(n))
        pi[a], pi[b] = pi[b], pi[a]
        return PermutationPair(tuple(pi), tuple(range(m)))

    @staticmethod
    def right_transposition(n: int, m: int, a: int, b: int) -> "PermutationPair":
        sigma = list(range(m))
        sigma[a], sigma[b] = sigma[b], sigma[a]
        return PermutationPair(tuple(range(n)), tuple(sigma))

    def is_identity(self) -> bool:
        return all(p == i for i, p in enumerate(self.pi)) and \
            all(s == j for j, s in enumerate(self.sigma))

    def apply_var(self, name: str) -> str:
        i, j = parse_var_name(name)  # 1-based
        return var_name(self.pi[i - 1] + 1, self.sigma[j - 1] + 1)


def circuit_variable_bounds(c: Circuit) -> Tuple[int, int]:
    """Largest row and column index used by the circuit's variables."""
    n = m = 0
    for name in c.variables():
        i, j = parse_var_name(name)
        n = max(n, i)
        m = max(m, j)
    return n, m


# -- structural signatures ------------------------------------------------------


class _SigInterner:
    """Hash-consing of recursive gate structure into integer ids.

    Two gates get the same id iff their labelled subcircuit expansions agree
    (with same-signature children merged and wire multiplicities summed), so
    signature comparison is O(1) and grouping by signature is cheap even on
    deep formulas.
    """

    def __init__(self):
        self.table: Dict = {}

    def intern(self, key) -> int:
        return self.table.setdefault(key, len(self.table))


def _gate_signatures(c: Circuit, rename=None, interner: Optional[_SigInterner] = None,
                     summed: bool = False) -> List[int]:
    """Interned recursive signature per gate; `rename` permutes variable labels.

    With summed=False the signature records each child's (signature, wire
    multiplicity) pair, which characterises subcircuits up to label- and
    wire-preserving isomorphism (the right notion for automorphisms).  With
    summed=True equal-signature children have their multiplicities added
    first, which characterises the fixpoint of merging interchangeable gates
    (the right notion for rigidification).
    """
    interner = interner or _SigInterner()
    sig: List[Optional[int]] = [None] * c.num_gates()
    for g in c.topo_order():
        lbl = c.labels[g]
        if lbl[0] == "var":
            key = ("var", rename(lbl[1]) if rename else lbl[1])
        elif lbl[0] == "const":
            key = ("const", lbl[1])
        elif summed:
            merged: Dict[int, int] = {}
            for ch, mult in c.children[g].items():
                s = sig[ch]
                merged[s] = merged.get(s, 0) + mult
            key = (lbl[0], tuple(sorted(merged.items())))
        else:
            key = (lbl[0], tuple(sorted((sig[ch], mult)
                                        for ch, mult in c.children[g].items())))
        sig[g] = interner.intern(key)
    return sig  # type: ignore[return-value]


def _is_formula_shaped(c: Circuit) -> bool:
    if getattr(c, "_formula_shaped", None) is None:
        c._formula_shaped = c.validate(FORMULA_MULTI)[0]
    return c._formula_shaped


# -- automorphism extension ----------------------------------------------------


def _extend_formula(c: Circuit, pair: PermutationPair, var_gates: Dict[str, int],
                    count_limit: int) -> List[Dict[int, int]]:
    """Extensions of `pair` for formula-shaped circuits, by top-down matching.

    Internal children are grouped by (signature, wire multiplicity); a
    subtree with permuted variables maps onto a target subtree iff the group
    multisets agree, which the interned root signature equality guarantees
    all the way down, and within a group any pairing works because equal
    signatures mean isomorphic subtrees.  Returns the canonical pairing, plus
    one transposed variant when a second extension is requested and some
    group has at least two members.
    """
    interner = _SigInterner()
    sig = _gate_signatures(c, interner=interner)
    need = _gate_signatures(c, rename=pair.apply_var, interner=interner)
    if need[c.output] != sig[c.output]:
        return []
    base: Dict[int, int] = {}
    for g in range(c.num_gates()):
        lbl = c.labels[g]
        if lbl[0] == "const":
            base[g] = g
        elif lbl[0] == "var":
            base[g] = var_gates[pair.apply_var(lbl[1])]
    swap_site: List[Tuple[int, int, int, int]] = []

    def match(g: int, h: int, out: Dict[int, int], record_swaps: bool):
        out[g] = h
        if c.is_input(g):
            return
        mine: Dict[Tuple[int, int], List[int]] = {}
        for ch, mult in c.children[g].items():
            if not c.is_input(ch):
                mine.setdefault((need[ch], mult), []).append(ch)
        theirs: Dict[Tuple[int, int], List[int]] = {}
        for ch, mult in c.children[h].items():
            if not c.is_input(ch):
                theirs.setdefault((sig[ch], mult), []).append(ch)
        for key, group in sorted(mine.items()):
            group = sorted(group)
            targets = sorted(theirs[key])
            if record_swaps and len(group) >= 2 and not swap_site:
                swap_site.append((group[0], group[1], targets[0], targets[1]))
            for child, target in zip(group, targets):
                match(child, target, out, record_swaps)

    canonical = dict(base)
    match(c.output, c.output, canonical, record_swaps=True)
    solutions = [canonical]
    if count_limit > 1 and swap_site:
        a, b, ta, tb = swap_site[0]
        second = dict(canonical)
        match(a, tb, second, record_swaps=False)
        match(b, ta, second, record_swaps=False)
        solutions.append(second)
    return solutions


def _child_key_index(c: Circuit, sig: List[int]) -> Dict:
    index: Dict = {}
    for g in range(c.num_gates()):
        if c.is_input(g):
            continue
        key = (sig[g], frozenset(c.children[g].items()))
        index.setdefault(key, []).append(g)
    return index


def extend_to_automorphism(c: Circuit, pair: PermutationPair,
                           node_budget: int = DEFAULT_NODE_BUDGET,
                           count_limit: int = 1) -> List[Dict[int, int]]:
    """Gate bijections extending the variable permutation, up to count_limit.

    Input-gate images are forced by the labels.  Formula-shaped circuits use
    the top-down tree matcher; other circuits match internal gates in
    topological order by (signature, image multiset of weighted children),
    with backtracking when several gates share that key.  Returns [] when the
    pair does not extend.
    """
    var_gates = {c.labels[g][1]: g for g in range(c.num_gates())
                 if c.labels[g][0] == "var"}
    for name in var_gates:
        if pair.apply_var(name) not in var_gates:
            return []
    if _is_formula_shaped(c):
        return _extend_formula(c, pair, var_gates, count_limit)
    interner = _SigInterner()
    sig = _gate_signatures(c, interner=interner)
    need = _gate_signatures(c, rename=pair.apply_var, interner=interner)
    phi: Dict[int, int] = {}
    for g in range(c.num_gates()):
        lbl = c.labels[g]
        if lbl[0] == "const":
            phi[g] = g
        elif lbl[0] == "var":
            phi[g] = var_gates[pair.apply_var(lbl[1])]
    internal = [g for g in c.topo_order() if not c.is_input(g)]
    index = _child_key_index(c, sig)
    used: Set[int] = set(phi.values())
    solutions: List[Dict[int, int]] = []
    budget = node_budget

    # Iterative depth-first search over positions in `internal`; the stack
    # holds one candidate iterator per assigned position.
    def candidates_for(pos: int):
        g = internal[pos]
        key = (need[g], frozenset((phi[ch], m) for ch, m in c.children[g].items()))
        return iter(index.get(key, ()))

    if not internal:
        return [dict(phi)]
    stack: List = [candidates_for(0)]
    chosen: List[Optional[int]] = [None]
    while stack:
        pos = len(stack) - 1
        g = internal[pos]
        if chosen[pos] is not None:
            # Returning to this frame: undo the previous choice first.
            used.discard(chosen[pos])
            del phi[g]
            chosen[pos] = None
        advanced = False
        for candidate in stack[pos]:
            budget -= 1
            if budget <= 0:
                raise SizeCap("automorphism search exceeded its node budget")
            if candidate in used:
                continue
            phi[g] = candidate
            used.add(candidate)
            chosen[pos] = candidate
            if pos + 1 == len(internal):
                solutions.append(dict(phi))
                used.discard(candidate)
                del phi[g]
                chosen[pos] = None
                if len(solutions) >= count_limit:
                    return solutions
            else:
                stack.append(candidates_for(pos + 1))
                chosen.append(None)
                advanced = True
                break
        if not advanced:
            stack.pop()
            chosen.pop()
    return solutions


def is_symmetric(c: Circuit, n: int, m: int) -> bool:
    """Every adjacent-transposition generator extends; extensions compose."""
    vn, vm = circuit_variable_bounds(c)
    if vn > n or vm > m:
        raise InvalidParameter(f"circuit variables exceed the ({n},{m}) matrix")
    for a in range(n - 1):
        if not extend_to_automorphism(c, PermutationPair.left_transposition(n, m, a, a + 1)):
            return False
    for a in range(m - 1):
        if not extend_to_automorphism(c, PermutationPair.right_transposition(n, m, a, a + 1)):
            return False
    return True


def is_rigid(c: Circuit, node_budget: int = DEFAULT_NODE_BUDGET) -> bool:
    """No input-fixing automorphism besides the identity.

    For formula-shaped circuits this is a structural criterion: some internal
    gate has two distinct children with equal subtree signature and wire
    multiplicity iff the two subtrees can be swapped.  Other circuits get an
    exhaustive (budgeted) search for a second identity extension.
    """
    if _is_formula_shaped(c):
        sig = _gate_signatures(c)
        for g in range(c.num_gates()):
            if c.is_input(g):
                continue
            seen: Set[Tuple[int, int]] = set()
            for ch, mult in c.children[g].items():
                key = (sig[ch], mult)
                if key in seen:
                    return False
                seen.add(key)
        return True
    vn, vm = circuit_variable_bounds(c)
    solutions = extend_to_automorphism(
        c, PermutationPair.identity(vn, vm), node_budget=node_budget, count_limit=2)
    return len(solutions) <= 1


# -- rigidification --------------------------------------------------------------


def _rigidify_dag(c: Circuit) -> Circuit:
    """Merge all gates with equal signatures, summing wire multiplicities."""
    sig = _gate_signatures(c, summed=True)
    builder = CircuitBuilder()
    rep: Dict = {}
    new_id: Dict[int, int] = {}
    for g in c.topo_order():
        s = sig[g]
        if s in rep:
            new_id[g] = rep[s]
            continue
        lbl = c.labels[g]
        if lbl[0] == "var":
            gid = builder.var(lbl[1])
        elif lbl[0] == "const":
            gid = builder.const(lbl[1])
        else:
            merged: Dict[int, int] = {}
            for ch, mult in c.children[g].items():
                t = new_id[ch]
                merged[t] = merged.get(t, 0) + mult
            gid = (builder.plus if lbl[0] == PLUS else builder.times)(sorted(merged.items()))
        rep[s] = gid
        new_id[g] = gid
    return builder.finish(new_id[c.output])


def _rigidify_formula(c: Circuit) -> Circuit:
    """Merge equal sibling subtrees recursively; the tree shape is kept.

    Merging is restricted to siblings because only those are interchangeable
    by an automorphism of a formula; a global merge would introduce shared
    subtrees and destroy tree-ness.
    """
    sig = _gate_signatures(c, summed=True)
    builder = CircuitBuilder()

    def rebuild(g: int) -> int:
        lbl = c.labels[g]
        if lbl[0] == "var":
            return builder.var(lbl[1])
        if lbl[0] == "const":
            return builder.const(lbl[1])
        groups: Dict = {}
        for ch, mult in sorted(c.children[g].items()):
            key = sig[ch]
            if key in groups:
                groups[key][1] += mult
            else:
                groups[key] = [ch, mult]
        children = []
        for key in sorted(groups, key=repr):
            ch, mult = groups[key]
            children.append((rebuild(ch), mult))
        return (builder.plus if lbl[0] == PLUS else builder.times)(children)

    return builder.finish(rebuild(c.output))


def rigidify(c: Circuit, n: Optional[int] = None, m: Optional[int] = None,
             check_symmetric: bool = True, seed: int = 0) -> Circuit:
    """A rigid circuit computing the same polynomial, never larger.

    Formulas (with or without multiedges) stay trees on their internal gates,
    at worst acquiring multiedges; skew circuits stay skew.  Equality of the
    computed polynomial is spot-checked on seeded random points.
    """
    if n is None or m is None:
        n, m = circuit_variable_bounds(c)
    if check_symmetric and not is_symmetric(c, n, m):
        raise NotSymmetric("rigidify requires a symmetric circuit")
    if c.validate(FORMULA_MULTI)[0]:
        result = _rigidify_formula(c)
    else:
        result = _rigidify_dag(c)
    if result.size() > c.size():
        raise InvalidParameter("rigidification grew the circuit; this is a bug")
    rng = random.Random(seed)
    names = c.variables()
    for _ in range(4):
        point = {v: rng.randrange(0, 2 ** 16) for v in names}
        if c.evaluate(point) != result.evaluate(point):
            raise InvalidParameter("rigidification changed the polynomial; this is a bug")
    return result


# -- orbits ------------------------------------------------------------------------


class SymmetryAnalysis:
    """Cached group action data for one rigid symmetric circuit.

    Extension maps are computed per transposition on demand; orbits come from
    the adjacent-transposition generators, supports from exhaustive
    increasing-size search at one representative per orbit, translated along
    the orbit by the generator maps.
    """

    def __init__(self, c: Circuit, n: int, m: int, node_budget: int = DEFAULT_NODE_BUDGET,
                 assume_rigid: bool = False):
        vn, vm = circuit_variable_bounds(c)
        if vn > n or vm > m:
            raise InvalidParameter(f"circuit variables exceed the ({n},{m}) matrix")
        self.circuit = c
        self.n = n
        self.m = m
        self.node_budget = node_budget
        if not assume_rigid and not is_rigid(c, node_budget):
            raise NotRigid("orbit and support analysis requires a rigid circuit")
        self._maps: Dict[Tuple[str, int, int], List[int]] = {}

    # transposition extension maps, cached ------------------------------------

    def transposition_map(self, side: str, a: int, b: int) -> List[int]:
        if a > b:
            a, b = b, a
        key = (side, a, b)
        if key not in self._maps:
            if side == "L":
                pair = PermutationPair.left_transposition(self.n, self.m, a, b)
            else:
                pair = PermutationPair.right_transposition(self.n, self.m, a, b)
            solutions = extend_to_automorphism(self.circuit, pair, self.node_budget, 1)
            if not solutions:
                raise NotSymmetric(f"generator {key} does not extend")
            phi = solutions[0]
            self._maps[key] = [phi[g] for g in range(self.circuit.num_gates())]
        return self._maps[key]

    def generators(self) -> List[List[int]]:
        gens = []
        for a in range(self.n - 1):
            gens.append(self.transposition_map("L", a, a + 1))
        for a in range(self.m - 1):
            gens.append(self.transposition_map("R", a, a + 1))
        return gens

    # orbits -----------------------------------------------------------------

    def orbits(self) -> List[List[int]]:
        gens = self.generators()
        n_gates = self.circuit.num_gates()
        parent = list(range(n_gates))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for gmap in gens:
            for g in range(n_gates):
                rg, ri = find(g), find(gmap[g])
                if rg != ri:
                    parent[max(rg, ri)] = min(rg, ri)
        groups: Dict[int, List[int]] = {}
        for g in range(n_gates):
            groups.setdefault(find(g), []).append(g)
        return [sorted(v) for _, v in sorted(groups.items())]

    def max_orbit(self) -> int:
        return max(len(o) for o in self.orbits())

    # supports ------------------------------------------------------------------

    def _fixes_gate(self, side: str, a: int, b: int, g: int) -> bool:
        return self.transposition_map(side, a, b)[g] == g

    def _is_support(self, g: int, left: Tuple[int, ...], right: Tuple[int, ...]) -> bool:
        """StabP(S) <= Stab(g), tested on transposition generators of the
        complement's symmetric groups."""
        comp_l = [i for i in range(self.n) if i not in left]
        comp_r = [j for j in range(self.m) if j not in right]
        for x, y in zip(comp_l, comp_l[1:]):
            if not self._fixes_gate("L", x, y, g):
                return False
        for x, y in zip(comp_r, comp_r[1:]):
            if not self._fixes_gate("R", x, y, g):
                return False
        return True

    def minimal_support(self, g: int, strict: bool = False) -> Tuple[FrozenSet, bool]:
        """((elements tagged 'L'/'R'), uniqueness flag) for gate g.

        Searches subsets in increasing size, lexicographically, and returns
        the first support found.  The flag records whether the per-side
        smaller-than-half condition for uniqueness holds; in strict mode a
        failing condition raises UniquenessUnavailable instead.
        """
        ground = [("L", i) for i in range(self.n)] + [("R", j) for j in range(self.m)]
        for size in range(len(ground) + 1):
            for combo in itertools.combinations(ground, size):
                left = tuple(i for s, i in combo if s == "L")
                right = tuple(j for s, j in combo if s == "R")
                if self._is_support(g, left, right):
                    unique = 2 * len(left) < self.n and 2 * len(right) < self.m
                    if strict and not unique:
                        raise UniquenessUnavailable(
                            f"support of gate {g} has a side of at least half the indices")
                    return frozenset(combo), unique
        raise InvalidParameter("the full index set is always a support; this is a bug")

    def all_supports(self, strict: bool = False) -> List[FrozenSet]:
        """Minimal supports for every gate, one search per orbit.

        The support of an orbit-mate is the image of the representative's
        support under the connecting generator word, so only one exhaustive
        search per orbit is needed.
        """
        n_gates = self.circuit.num_gates()
        supports: List[Optional[FrozenSet]] = [None] * n_gates
        gens = self.generators()
        gen_tags: List[Tuple[str, int, int]] = []
        for a in range(self.n - 1):
            gen_tags.append(("L", a, a + 1))
        for a in range(self.m - 1):
            gen_tags.append(("R", a, a + 1))
        for orbit in self.orbits():
            rep = orbit[0]
            sup, _ = self.minimal_support(rep, strict=strict)
            supports[rep] = sup
            queue = [rep]
            while queue:
                g = queue.pop()
                for gmap, (side, a, b) in zip(gens, gen_tags):
                    h = gmap[g]
                    if supports[h] is None:
                        supports[h] = frozenset(_apply_transposition(e, side, a, b)
                                                for e in supports[g])
                        queue.append(h)
        return supports  # type: ignore[return-value]

    def max_support(self, strict: bool = False) -> int:
        return max(len(s) for s in self.all_supports(strict=strict))

    def support_depth(self, strict: bool = False) -> int:
        """Max over root-to-input paths of the number of support-changing
        steps (a gate counted when the path continues into a child whose
        support escapes the gate's)."""
        supports = self.all_supports(strict=strict)
        c = self.circuit
        depth = [0] * c.num_gates()
        for g in c.topo_order():
            if c.is_input(g):
                continue
            best = 0
            for ch in c.children[g]:
                step = 1 if supports[ch] - supports[g] else 0
                best = max(best, depth[ch] + step)
            depth[g] = best
        return depth[c.output]


def _apply_transposition(element: Tuple[str, int], side: str, a: int, b: int) -> Tuple[str, int]:
    s, idx = element
    if s != side:
        return element
    if idx == a:
        return (s, b)
    if idx == b:
        return (s, a)
    return element


@dataclass
class SupportReport:
    """Symmetry analysis summary for one circuit."""

    n: int
    m: int
    max_orbit: int
    max_support: int
    support_depth: int
    per_gate: List[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "maxOrb": self.max_orbit,
            "maxSup": self.max_support,
            "supportDepth": self.support_depth,
            "perGate": self.per_gate,
        }


def analyze(c: Circuit, n: int, m: int, rigidify_first: bool = True,
            include_gates: bool = True) -> SupportReport:
    """Full symmetry report; non-rigid circuits are rigidified first."""
    circuit = c
    if rigidify_first:
        circuit = rigidify(c, n, m)
        analysis = SymmetryAnalysis(circuit, n, m, assume_rigid=True)
    else:
        analysis = SymmetryAnalysis(circuit, n, m)
    supports = analysis.all_supports()
    per_gate = []
    if include_gates:
        for g in range(circuit.num_gates()):
            per_gate.append({
                "gate": g,
                "support": sorted((s, i + 1) for s, i in supports[g]),
            })
    return SupportReport(
        n=n,
        m=m,
        max_orbit=analysis.max_orbit(),
        max_support=max(len(s) for s in supports),
        support_depth=analysis.support_depth(),
        per_gate=per_gate,
    )


# -- random symmetric circuits (test and suite tooling) ------------------------------


def random_symmetric_circuit(n: int, m: int, rng: random.Random, max_gates: int = 40,
                             mode: str = "general") -> Circuit:
    """A random Sym_n x Sym_m-symmetric circuit with at most max_gates gates.

    Built from orbit-closed layers: a random template gate is closed under the
    adjacent-transposition generators, so every permutation maps layer members
    to layer members; the output sums a full orbit and is therefore fixed.
    In "skew" mode times-templates take at most one internal child.
    """
    if mode not in ("general", "skew"):
        raise InvalidParameter("random circuits support modes 'general' and 'skew'")
    labels: List[Tuple] = []
    children: List[Dict[int, int]] = []
    gate_of_var: Dict[str, int] = {}

    def add(label, ch: Dict[int, int]) -> int:
        labels.append(label)
        children.append(ch)
        return len(labels) - 1

    for i in range(1, n + 1):
        for j in range(1, m + 1):
            name = var_name(i, j)
            gate_of_var[name] = add(("var", name), {})
    const_one = add(("const", Fraction(1)), {})

    pairs = [PermutationPair.left_transposition(n, m, a, a + 1) for a in range(n - 1)]
    pairs += [PermutationPair.right_transposition(n, m, a, a + 1) for a in range(m - 1)]
    # gen_images[k][g] = image of gate g under generator k, maintained as we build.
    gen_images: List[List[int]] = [[] for _ in pairs]
    for k, pair in enumerate(pairs):
        for g, lbl in enumerate(labels):
            if lbl[0] == "var":
                gen_images[k].append(gate_of_var[pair.apply_var(lbl[1])])
            else:
                gen_images[k].append(g)

    def image_multiset(k: int, multiset: Tuple[Tuple[int, int], ...]):
        acc: Dict[int, int] = {}
        for ch, mv in multiset:
            img = gen_images[k][ch]
            acc[img] = acc.get(img, 0) + mv
        return tuple(sorted(acc.items()))

    def close_orbit(kind: str, template: Tuple[Tuple[int, int], ...]) -> List[int]:
        """Add the orbit of a children-multiset; returns the new gate ids.

        Template children live in earlier layers, so their generator images
        are already known; the image of a new gate is the gate of its image
        multiset, which the closure guarantees to exist.
        """
        seen: Dict[Tuple[Tuple[int, int], ...], int] = {}
        queue = [template]
        created: List[int] = []
        while queue:
            multiset = queue.pop()
            if multiset in seen:
                continue
            gid = add((kind,), dict(multiset))
            seen[multiset] = gid
            created.append(gid)
            for k in range(len(pairs)):
                image = image_multiset(k, multiset)
                if image not in seen:
                    queue.append(image)
        first = min(created)
        for k in range(len(pairs)):
            extension = [0] * len(created)
            for multiset, gid in seen.items():
                extension[gid - first] = seen[image_multiset(k, multiset)]
            gen_images[k].extend(extension)
        return created

    layers: List[List[int]] = [list(gate_of_var.values())]
    for _ in range(rng.randint(1, 3)):
        if len(labels) >= max_gates - 2:
            break
        kind = rng.choice([PLUS, TIMES])
        pool = [g for layer in layers for g in layer]
        size = rng.randint(1, 2)
        picks = sorted(rng.sample(pool, min(size, len(pool))))
        if kind == TIMES and mode == "skew":
            internal = [g for g in picks if labels[g][0] in (PLUS, TIMES)]
            for extra in internal[1:]:
                picks.remove(extra)
            if rng.random() < 0.7:
                picks.append(const_one)
        template = tuple(sorted({g: rng.randint(1, 2) for g in picks}.items()))
        before = len(labels)
        created = close_orbit(kind, template)
        if len(labels) > max_gates - 1:
            # Over budget: drop the layer.
            del labels[before:]
            del children[before:]
            for k in range(len(pairs)):
                del gen_images[k][before:]
            break
        layers.append(created)
    top_layer = layers[-1] if len(layers) > 1 else layers[0]
    output = add((PLUS,), {g: 1 for g in top_layer})
    builder = CircuitBuilder()
    remap: Dict[int, int] = {}
    for g, lbl in enumerate(labels):
        if lbl[0] == "var":
            remap[g] = builder.var(lbl[1])
        elif lbl[0] == "const":
            remap[g] = builder.const(lbl[1])
        else:
            remap[g] = (builder.plus if lbl[0] == PLUS else builder.times)(
                sorted((remap[ch], mv) for ch, mv in children[g].items()))
    return builder.finish(remap[output])
