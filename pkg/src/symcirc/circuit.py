"""Algebraic-circuit intermediate representation.

A circuit is a gate-labelled DAG with multiplicity wires: gates carry a label
(variable, rational constant, plus, times), wires carry positive integer
multiplicities, and there is a unique output gate.  Input gates are globally
unique per label (builders hash-cons variables and constants), have no
children, and the output has no parents.

Wire multiplicities mean repetition: a Plus gate sums children weighted by
wire multiplicity; a Times gate multiplies children raised to the wire
multiplicity.

Shapes:
  GENERAL       any valid circuit,
  SKEW          every Times gate has at most one internal (non-input) child,
  FORMULA       no multiedges and the internal gates induce a tree,
  FORMULA_MULTI internal gates induce a tree, multiedges allowed.

Variable naming: x_<i>_<j> for the matrix variable x_{i,j} (1-based);
colourful variables are x_<u>_<i>__<v>_<j>.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import InvalidParameter, MissingVariable, ParseError, SizeCap
from .exactnum import Rational, SparsePolynomial

GENERAL = "general"
SKEW = "skew"
FORMULA = "formula"
FORMULA_MULTI = "formula_multi"

SHAPES = (GENERAL, SKEW, FORMULA, FORMULA_MULTI)

PLUS = "plus"
TIMES = "times"


def var_name(i: int, j: int) -> str:
    """Matrix variable x_{i,j}, 1-based."""
    return f"x_{i}_{j}"


def parse_var_name(name: str) -> Tuple[int, int]:
    parts = name.split("_")
    if len(parts) != 3 or parts[0] != "x":
        raise InvalidParameter(f"not a matrix variable name: {name!r}")
    return int(parts[1]), int(parts[2])


def colour_var_name(cu, i: int, cv, j: int) -> str:
    """Colourful variable x_{(u,i),(v,j)}, 1-based member indices."""
    return f"x_{cu}_{i}__{cv}_{j}"


class Circuit:
    """Immutable gate-labelled DAG; construct through CircuitBuilder."""

    __slots__ = ("labels", "children", "output", "_parents", "_topo",
                 "_formula_shaped", "_program")

    def __init__(self, labels: List, children: List[Dict[int, int]], output: int):
        self.labels = labels
        self.children = children
        self.output = output
        self._parents: Optional[List[List[int]]] = None
        self._topo: Optional[List[int]] = None
        self._formula_shaped: Optional[bool] = None
        self._program = None

    # -- structure ------------------------------------------------------------

    def num_gates(self) -> int:
        return len(self.labels)

    def is_input(self, g: int) -> bool:
        return self.labels[g][0] in ("var", "const")

    def gate_kind(self, g: int) -> str:
        return self.labels[g][0]

    def wires(self) -> List[Tuple[int, int, int]]:
        out = []
        for parent, ch in enumerate(self.children):
            for child, mult in sorted(ch.items()):
                out.append((parent, child, mult))
        return out

    def size(self) -> int:
        """Total number of gates plus wires counted with multiplicity."""
        return self.num_gates() + sum(m for ch in self.children for m in ch.values())

    def parents(self) -> List[List[int]]:
        if self._parents is None:
            ps: List[List[int]] = [[] for _ in self.labels]
            for parent, ch in enumerate(self.children):
                for child in ch:
                    ps[child].append(parent)
            self._parents = ps
        return self._parents

    def topo_order(self) -> List[int]:
        """Children before parents; raises if a cycle exists."""
        if self._topo is not None:
            return self._topo
        n = self.num_gates()
        state = [0] * n  # 0 new, 1 active, 2 done
        order: List[int] = []
        for start in range(n):
            if state[start]:
                continue
            stack: List[Tuple[int, Iterable[int]]] = [(start, iter(sorted(self.children[start])))]
            state[start] = 1
            while stack:
                node, it = stack[-1]
                advanced = False
                for child in it:
                    if state[child] == 1:
                        raise InvalidParameter("circuit contains a cycle")
                    if state[child] == 0:
                        state[child] = 1
                        stack.append((child, iter(sorted(self.children[child]))))
                        advanced = True
                        break
                if not advanced:
                    state[node] = 2
                    order.append(node)
                    stack.pop()
        self._topo = order
        return order

    def variables(self) -> List[str]:
        return sorted(lbl[1] for lbl in self.labels if lbl[0] == "var")

    def depth(self) -> int:
        """Internal gates on the longest output-to-leaf path."""
        depth = [0] * self.num_gates()
        for g in self.topo_order():
            if self.is_input(g):
                depth[g] = 0
            else:
                depth[g] = 1 + max((depth[c] for c in self.children[g]), default=0)
        return depth[self.output]

    # -- semantics --------------------------------------------------------------

    def _evaluation_program(self):
        """Per-gate instruction list in topological order, built once.

        Integral constants are stored as plain ints so 0/1 and integer
        evaluations stay in fast integer arithmetic.
        """
        if self._program is None:
            program = []
            for g in self.topo_order():
                lbl = self.labels[g]
                if lbl[0] == "var":
                    program.append((0, g, lbl[1]))
                elif lbl[0] == "const":
                    value = lbl[1]
                    if value.denominator == 1:
                        value = int(value)
                    program.append((1, g, value))
                elif lbl[0] == PLUS:
                    program.append((2, g, sorted(self.children[g].items())))
                else:
                    program.append((3, g, sorted(self.children[g].items())))
            self._program = program
        return self._program

    def evaluate(self, assignment: Mapping[str, Rational]) -> Rational:
        """Exact value at a total assignment of the circuit's variables."""
        values: List = [None] * self.num_gates()
        for code, g, payload in self._evaluation_program():
            if code == 0:
                if payload not in assignment:
                    raise MissingVariable(f"assignment lacks {payload!r}")
                values[g] = assignment[payload]
            elif code == 1:
                values[g] = payload
            elif code == 2:
                total = 0
                for child, mult in payload:
                    total = total + (values[child] if mult == 1 else mult * values[child])
                values[g] = total
            else:
                total = 1
                for child, mult in payload:
                    total = total * (values[child] if mult == 1 else values[child] ** mult)
                values[g] = total
        return values[self.output]

    def expand_symbolic(self, term_cap: int = 10 ** 6) -> SparsePolynomial:
        """The computed polynomial, fully expanded; SizeCap guards blow-up."""
        polys: List[Optional[SparsePolynomial]] = [None] * self.num_gates()
        for g in self.topo_order():
            kind = self.labels[g][0]
            if kind == "var":
                polys[g] = SparsePolynomial.variable(self.labels[g][1])
            elif kind == "const":
                polys[g] = SparsePolynomial.constant(self.labels[g][1])
            elif kind == PLUS:
                acc = SparsePolynomial.zero()
                for child, mult in sorted(self.children[g].items()):
                    acc = acc + polys[child].scale(mult)
                polys[g] = acc
            else:
                acc = SparsePolynomial.constant(1)
                for child, mult in sorted(self.children[g].items()):
                    acc = acc * (polys[child] ** mult)
                    if acc.num_terms() > term_cap:
                        raise SizeCap(f"symbolic expansion exceeds {term_cap} terms")
                polys[g] = acc
            if polys[g].num_terms() > term_cap:
                raise SizeCap(f"symbolic expansion exceeds {term_cap} terms")
        return polys[self.output]

    # -- validation ---------------------------------------------------------------

    def validate(self, shape: str = GENERAL) -> Tuple[bool, str]:
        """Structural invariants for the given shape; (ok, first violation)."""
        if shape not in SHAPES:
            raise InvalidParameter(f"unknown shape {shape!r}")
        try:
            topo = self.topo_order()
        except InvalidParameter as exc:
            return False, str(exc)
        if len(topo) != self.num_gates():
            return False, "topological order missed gates"
        seen_inputs = {}
        for g, lbl in enumerate(self.labels):
            if lbl[0] == "var":
                key = ("var", lbl[1])
            elif lbl[0] == "const":
                key = ("const", lbl[1])
            else:
                key = None
            if key is not None:
                if key in seen_inputs:
                    return False, f"duplicate input gate for {key}"
                seen_inputs[key] = g
                if self.children[g]:
                    return False, f"input gate {g} has children"
            else:
                if lbl[0] not in (PLUS, TIMES):
                    return False, f"unknown gate label {lbl!r}"
                if not self.children[g]:
                    return False, f"internal gate {g} has no children"
        parents = self.parents()
        if parents[self.output]:
            return False, "output gate has parents"
        reachable = {self.output}
        stack = [self.output]
        while stack:
            for child in self.children[stack.pop()]:
                if child not in reachable:
                    reachable.add(child)
                    stack.append(child)
        if len(reachable) != self.num_gates():
            return False, "unreachable gates present"
        if shape == GENERAL:
            return True, ""
        if shape == SKEW:
            for g, lbl in enumerate(self.labels):
                if lbl[0] == TIMES:
                    internal = [c for c in self.children[g] if not self.is_input(c)]
                    if len(internal) > 1:
                        return False, f"times gate {g} has {len(internal)} internal children"
            return True, ""
        # Formula variants: internal gates induce a tree rooted at the output.
        for g, lbl in enumerate(self.labels):
            if lbl[0] in (PLUS, TIMES) and g != self.output:
                if len(parents[g]) != 1:
                    return False, f"internal gate {g} has {len(parents[g])} parents"
        if shape == FORMULA:
            for g, ch in enumerate(self.children):
                for child, mult in ch.items():
                    if mult != 1:
                        return False, f"multiedge ({g},{child}) with multiplicity {mult}"
        return True, ""

    # -- serialization ---------------------------------------------------------------

    def to_json(self) -> dict:
        gates = []
        for g, lbl in enumerate(self.labels):
            if lbl[0] == "var":
                gates.append({"id": g, "label": {"var": lbl[1]}})
            elif lbl[0] == "const":
                c = lbl[1]
                gates.append({"id": g, "label": {"const": {"num": str(c.numerator), "den": str(c.denominator)}}})
            else:
                gates.append({"id": g, "label": lbl[0]})
        return {
            "gates": gates,
            "wires": [[p, c, m] for (p, c, m) in self.wires()],
            "output": self.output,
        }

    def serialize(self) -> bytes:
        return json.dumps(self.to_json(), sort_keys=True).encode("utf-8")

    @staticmethod
    def from_json(data: dict) -> "Circuit":
        try:
            n = len(data["gates"])
            labels: List = [None] * n
            for entry in data["gates"]:
                g = int(entry["id"])
                lbl = entry["label"]
                if isinstance(lbl, str):
                    if lbl not in (PLUS, TIMES):
                        raise ParseError(f"unknown gate label {lbl!r}")
                    labels[g] = (lbl,)
                elif "var" in lbl:
                    labels[g] = ("var", str(lbl["var"]))
                elif "const" in lbl:
                    labels[g] = ("const", Fraction(int(lbl["const"]["num"]), int(lbl["const"]["den"])))
                else:
                    raise ParseError(f"unknown gate label {lbl!r}")
            children: List[Dict[int, int]] = [dict() for _ in range(n)]
            for p, c, m in data["wires"]:
                if not (0 <= p < n and 0 <= c < n) or m < 1:
                    raise ParseError(f"bad wire [{p},{c},{m}]")
                children[int(p)][int(c)] = children[int(p)].get(int(c), 0) + int(m)
            output = int(data["output"])
            if not 0 <= output < n or any(l is None for l in labels):
                raise ParseError("bad output or gate ids")
        except ParseError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed circuit JSON: {exc}") from exc
        circuit = Circuit(labels, children, output)
        ok, reason = circuit.validate(GENERAL)
        if not ok:
            raise ParseError(f"invalid circuit: {reason}")
        return circuit

    @staticmethod
    def deserialize(blob: bytes) -> "Circuit":
        try:
            data = json.loads(blob.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ParseError(f"not valid circuit JSON: {exc}") from exc
        return Circuit.from_json(data)

    def to_dot(self) -> str:
        lines = ["digraph circuit {"]
        for g, lbl in enumerate(self.labels):
            if lbl[0] == "var":
                text = lbl[1]
            elif lbl[0] == "const":
                text = str(lbl[1])
            else:
                text = "+" if lbl[0] == PLUS else "*"
            shape = ' shape=box' if self.is_input(g) else ""
            lines.append(f'  g{g} [label="{text}"{shape}];')
        for p, c, m in self.wires():
            attr = f' [label="{m}"]' if m > 1 else ""
            lines.append(f"  g{p} -> g{c}{attr};")
        lines.append("}")
        return "\n".join(lines)


class CircuitBuilder:
    """Accumulates gates; variables and constants are hash-consed.

    Internal gates are fresh on every call, so formulas keep their parallel
    subtrees; `finish` prunes gates unreachable from the output.
    """

    def __init__(self):
        self.labels: List = []
        self.children: List[Dict[int, int]] = []
        self._inputs: Dict = {}

    def _add(self, label, children: Dict[int, int]) -> int:
        self.labels.append(label)
        self.children.append(children)
        return len(self.labels) - 1

    def var(self, name: str) -> int:
        key = ("var", name)
        if key not in self._inputs:
            self._inputs[key] = self._add(key, {})
        return self._inputs[key]

    def const(self, value) -> int:
        key = ("const", Fraction(value))
        if key not in self._inputs:
            self._inputs[key] = self._add(key, {})
        return self._inputs[key]

    def _gate(self, kind: str, children: Sequence[Tuple[int, int]]) -> int:
        acc: Dict[int, int] = {}
        for child, mult in children:
            if mult < 1:
                raise InvalidParameter("wire multiplicities must be >= 1")
            if not 0 <= child < len(self.labels):
                raise InvalidParameter(f"unknown child gate {child}")
            acc[child] = acc.get(child, 0) + mult
        if not acc:
            raise InvalidParameter(f"{kind} gate needs at least one child")
        return self._add((kind,), acc)

    def plus(self, children: Sequence[Tuple[int, int]]) -> int:
        return self._gate(PLUS, children)

    def times(self, children: Sequence[Tuple[int, int]]) -> int:
        return self._gate(TIMES, children)

    def finish(self, output: int) -> Circuit:
        reachable = {output}
        stack = [output]
        while stack:
            for child in self.children[stack.pop()]:
                if child not in reachable:
                    reachable.add(child)
                    stack.append(child)
        keep = sorted(reachable)
        remap = {old: new for new, old in enumerate(keep)}
        labels = [self.labels[old] for old in keep]
        children = [{remap[c]: m for c, m in self.children[old].items()} for old in keep]
        circuit = Circuit(labels, children, remap[output])
        ok, reason = circuit.validate(GENERAL)
        if not ok:
            raise InvalidParameter(f"built an invalid circuit: {reason}")
        return circuit
