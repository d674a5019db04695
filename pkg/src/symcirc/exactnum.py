"""Exact rational arithmetic, sparse multivariate polynomials, and
polynomial identity testing.

All arithmetic in this package is exact.  Rationals are `fractions.Fraction`
(arbitrary-precision, always reduced, positive denominator), re-exported here
as `Rational`.  A polynomial is stored as

    variables : tuple of variable names, sorted lexicographically
    terms     : dict mapping exponent tuples to non-zero Rational coefficients

Exponent tuples are dense over the declared variable list, so two polynomials
over different variable sets are aligned (union of the variable lists) before
any comparison or arithmetic.  The zero polynomial has an empty term dict.

Identity testing comes in two flavours: `poly_equal_symbolic` compares
normalized term maps, and `poly_equal_randomized` is a seeded Schwartz-Zippel
test over integer points drawn from [0, 2**32).
"""

from __future__ import annotations

import json
import random
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Sequence, Tuple

from .errors import InvalidParameter, MissingVariable

Rational = Fraction

# An assignment maps variable names to Rationals (plain ints also work since
# Fraction arithmetic absorbs them).
Assignment = Dict[str, Rational]

SAMPLE_RANGE = 2 ** 32


def rat(num, den=1) -> Rational:
    """Build a Rational from integers (or parse a string like '3/4')."""
    return Fraction(num, den) if den != 1 else Fraction(num)


class SparsePolynomial:
    """Exact multivariate polynomial with rational coefficients."""

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Sequence[str], terms: Mapping[Tuple[int, ...], Rational] | None = None):
        vs = tuple(sorted(variables))
        if len(set(vs)) != len(vs):
            raise InvalidParameter(f"duplicate variable names in {variables!r}")
        self.variables = vs
        clean: Dict[Tuple[int, ...], Rational] = {}
        for exp, coeff in (terms or {}).items():
            if len(exp) != len(vs):
                raise InvalidParameter(f"exponent vector {exp} has wrong length for {vs}")
            c = Fraction(coeff)
            if c != 0:
                clean[tuple(exp)] = c
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(variables: Sequence[str] = ()) -> "SparsePolynomial":
        return SparsePolynomial(variables, {})

    @staticmethod
    def constant(value, variables: Sequence[str] = ()) -> "SparsePolynomial":
        c = Fraction(value)
        vs = tuple(sorted(variables))
        if c == 0:
            return SparsePolynomial(vs, {})
        return SparsePolynomial(vs, {(0,) * len(vs): c})

    @staticmethod
    def variable(name: str) -> "SparsePolynomial":
        return SparsePolynomial((name,), {(1,): Fraction(1)})

    @staticmethod
    def monomial(powers: Mapping[str, int], coeff=1) -> "SparsePolynomial":
        """Polynomial with a single term, e.g. monomial({'x': 2, 'y': 1}, 3)."""
        vs = tuple(sorted(powers))
        exp = tuple(powers[v] for v in vs)
        return SparsePolynomial(vs, {exp: Fraction(coeff)})

    # -- variable alignment ------------------------------------------------

    def aligned_to(self, variables: Sequence[str]) -> "SparsePolynomial":
        """Re-express this polynomial over a superset of its variables."""
        vs = tuple(sorted(variables))
        if vs == self.variables:
            return self
        missing = set(self.variables) - set(vs)
        if missing:
            raise InvalidParameter(f"target variable set lacks {sorted(missing)}")
        pos = {v: i for i, v in enumerate(vs)}
        idx = [pos[v] for v in self.variables]
        terms: Dict[Tuple[int, ...], Rational] = {}
        for exp, coeff in self.terms.items():
            new = [0] * len(vs)
            for i, e in zip(idx, exp):
                new[i] = e
            terms[tuple(new)] = coeff
        return SparsePolynomial(vs, terms)

    @staticmethod
    def _common(p: "SparsePolynomial", q: "SparsePolynomial"):
        vs = tuple(sorted(set(p.variables) | set(q.variables)))
        return p.aligned_to(vs), q.aligned_to(vs)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other) -> "SparsePolynomial":
        other = _as_poly(other)
        p, q = self._common(self, other)
        terms = dict(p.terms)
        for exp, coeff in q.terms.items():
            s = terms.get(exp, Fraction(0)) + coeff
            if s == 0:
                terms.pop(exp, None)
            else:
                terms[exp] = s
        return SparsePolynomial(p.variables, terms)

    __radd__ = __add__

    def __neg__(self) -> "SparsePolynomial":
        return SparsePolynomial(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "SparsePolynomial":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "SparsePolynomial":
        return _as_poly(other) + (-self)

    def __mul__(self, other) -> "SparsePolynomial":
        other = _as_poly(other)
        p, q = self._common(self, other)
        terms: Dict[Tuple[int, ...], Rational] = {}
        for e1, c1 in p.terms.items():
            for e2, c2 in q.terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(exp, Fraction(0)) + c1 * c2
                if s == 0:
                    terms.pop(exp, None)
                else:
                    terms[exp] = s
        return SparsePolynomial(p.variables, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "SparsePolynomial":
        if not isinstance(k, int) or k < 0:
            raise InvalidParameter("polynomial powers must be non-negative integers")
        result = SparsePolynomial.constant(1, self.variables)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def scale(self, c) -> "SparsePolynomial":
        c = Fraction(c)
        if c == 0:
            return SparsePolynomial(self.variables, {})
        return SparsePolynomial(self.variables, {e: c * v for e, v in self.terms.items()})

    # -- queries -------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1 by convention."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def num_terms(self) -> int:
        return len(self.terms)

    def evaluate(self, assignment: Mapping[str, Rational]) -> Rational:
        return poly_eval(self, assignment)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparsePolynomial):
            return NotImplemented
        return poly_equal_symbolic(self, other)

    def __hash__(self):
        p = self.drop_unused()
        return hash((p.variables, frozenset(p.terms.items())))

    def drop_unused(self) -> "SparsePolynomial":
        """Remove variables that appear in no term (normal form for equality)."""
        used = [i for i in range(len(self.variables)) if any(e[i] for e in self.terms)]
        if len(used) == len(self.variables):
            return self
        vs = tuple(self.variables[i] for i in used)
        terms = {tuple(e[i] for i in used): c for e, c in self.terms.items()}
        return SparsePolynomial(vs, terms)

    def __repr__(self):
        if not self.terms:
            return "SparsePolynomial(0)"
        bits = []
        for exp in sorted(self.terms):
            coeff = self.terms[exp]
            mono = "*".join(
                f"{v}^{e}" if e > 1 else v
                for v, e in zip(self.variables, exp) if e
            )
            bits.append(f"{coeff}" + (f"*{mono}" if mono else ""))
        return "SparsePolynomial(" + " + ".join(bits) + ")"

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "vars": list(self.variables),
            "terms": [
                {"exp": list(exp), "num": str(c.numerator), "den": str(c.denominator)}
                for exp, c in sorted(self.terms.items())
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "SparsePolynomial":
        try:
            vs = list(data["vars"])
            terms = {
                tuple(t["exp"]): Fraction(int(t["num"]), int(t["den"]))
                for t in data["terms"]
            }
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidParameter(f"malformed polynomial JSON: {exc}") from exc
        return SparsePolynomial(vs, terms)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _as_poly(value) -> SparsePolynomial:
    if isinstance(value, SparsePolynomial):
        return value
    return SparsePolynomial.constant(value)


def poly_eval(p: SparsePolynomial, assignment: Mapping[str, Rational]) -> Rational:
    """Exact value of p at a total assignment of its variables."""
    for v in p.variables:
        if v not in assignment:
            raise MissingVariable(f"assignment lacks variable {v!r}")
    values = [Fraction(assignment[v]) for v in p.variables]
    total = Fraction(0)
    for exp, coeff in p.terms.items():
        term = coeff
        for val, e in zip(values, exp):
            if e:
                term *= val ** e
        total += term
    return total


def poly_equal_symbolic(p: SparsePolynomial, q: SparsePolynomial) -> bool:
    """True iff p and q have identical term maps after variable alignment."""
    a, b = SparsePolynomial._common(p.drop_unused(), q.drop_unused())
    return a.terms == b.terms


def poly_equal_randomized(
    f: Callable[[Assignment], Rational],
    g: Callable[[Assignment], Rational],
    variables: Sequence[str],
    degree_bound: int,
    trials: int,
    seed: int,
) -> bool:
    """Schwartz-Zippel identity test of two evaluation oracles.

    Samples `trials` points with coordinates uniform in [0, 2**32) from a
    seeded RNG; per-trial false-acceptance probability is at most
    degree_bound / 2**32.  Deterministic given the seed.
    """
    if trials < 1:
        raise InvalidParameter("trials must be >= 1")
    if degree_bound < 0:
        raise InvalidParameter("degree_bound must be >= 0")
    rng = random.Random(seed)
    names = list(variables)
    for _ in range(trials):
        point = {v: Fraction(rng.randrange(SAMPLE_RANGE)) for v in names}
        if f(point) != g(point):
            return False
    return True


# -- exact linear algebra helpers -------------------------------------------
#
# Small dense systems over the rationals (Vandermonde inversions, basis
# certificates).  Plain Gaussian elimination; exactness matters, speed does
# not at these sizes.


def exact_det(matrix: Sequence[Sequence[Rational]]) -> Rational:
    """Determinant of a square rational matrix by fraction-free-ish elimination."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise InvalidParameter("determinant of a non-square matrix")
    m = [[Fraction(x) for x in row] for row in matrix]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            if m[r][col] != 0:
                factor = m[r][col] * inv
                m[r] = [a - factor * b for a, b in zip(m[r], m[col])]
    return det


def solve_linear(matrix: Sequence[Sequence[Rational]], rhs: Sequence[Rational]) -> List[Rational]:
    """Solve M x = b exactly; raises InvalidParameter if M is singular."""
    n = len(matrix)
    if any(len(row) != n for row in matrix) or len(rhs) != n:
        raise InvalidParameter("solve_linear needs a square system")
    m = [[Fraction(x) for x in row] + [Fraction(rhs[i])] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            raise InvalidParameter("singular matrix in solve_linear")
        m[col], m[pivot] = m[pivot], m[col]
        inv = 1 / m[col][col]
        m[col] = [a * inv for a in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                factor = m[r][col]
                m[r] = [a - factor * b for a, b in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]
