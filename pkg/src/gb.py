#!/usr/bin/env python3
"""
Polynomials over cyclotomic fields, Groebner bases and finite graded quotients.

Variables are listed smallest first: (h, e1, ..., ed) means h < e1 < ... < ed.
Two graded orders are available: 'grevlex' (default) and 'grlex'.

A QuotientPresentation bundles an ideal with its reduced Groebner basis and the
staircase (standard monomial) basis; structure_constants() turns an Artinian
quotient into a GradedAlgebra, the common shape of every ring in this toolkit.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from tokenize import TokenError
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import sympy
from sympy.parsing.sympy_parser import parse_expr

from errors import CalibrationError, GroebnerError, NonArtinianError, ParseError
from exact import (
    CYCLO_LOCALS,
    ONE,
    TRANSFORMATIONS,
    ZERO,
    CycloNumber,
    ExactMatrix,
    cyclo_from_sympy,
)

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]
Vector = Dict[int, CycloNumber]


def _grevlex_key(m: Monomial):
    return (sum(m), tuple(-a for a in m))


def _grlex_key(m: Monomial):
    return (sum(m), tuple(reversed(m)))


ORDERS: Dict[str, Callable[[Monomial], tuple]] = {
    'grevlex': _grevlex_key,
    'grlex': _grlex_key,
}

DEFAULT_ORDER = 'grevlex'


def monomial_key(order: str) -> Callable[[Monomial], tuple]:
    try:
        return ORDERS[order]
    except KeyError:
        raise ParseError(f"Unknown monomial order '{order}'; choose from {', '.join(ORDERS)}") from None


def _divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def _add(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def _sub(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def monomial_label(variables: Sequence[str], m: Monomial) -> str:
    """'1', 'h', 'h^2', 'h*e1', 'e4^2', ..."""
    parts = []
    for name, a in zip(variables, m):
        if a == 1:
            parts.append(name)
        elif a > 1:
            parts.append(f"{name}^{a}")
    return "*".join(parts) if parts else "1"


class Polynomial:
    """Sparse polynomial: exponent tuple -> nonzero CycloNumber coefficient."""

    __slots__ = ('variables', 'terms')

    def __init__(self, variables: Sequence[str], terms: Mapping[Monomial, object] = None):
        self.variables = tuple(variables)
        cleaned = {}
        for m, c in (terms or {}).items():
            m = tuple(m)
            if len(m) != len(self.variables):
                raise ValueError(f"Exponent {m} does not match variables {self.variables}")
            c = CycloNumber.coerce(c)
            if c:
                cleaned[m] = c
        self.terms = cleaned

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "Polynomial":
        return cls(variables)

    @classmethod
    def constant(cls, variables: Sequence[str], c) -> "Polynomial":
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def variable(cls, variables: Sequence[str], name: str) -> "Polynomial":
        variables = tuple(variables)
        if name not in variables:
            raise ValueError(f"Unknown variable '{name}'; expected one of {variables}")
        return cls(variables, {tuple(1 if v == name else 0 for v in variables): ONE})

    @classmethod
    def linear(cls, variables: Sequence[str], coeffs: Sequence) -> "Polynomial":
        """Linear form sum coeffs[k] * variables[k]."""
        n = len(variables)
        return cls(variables, {tuple(1 if j == k else 0 for j in range(n)): c for k, c in enumerate(coeffs)})

    def _check(self, other: "Polynomial"):
        if other.variables != self.variables:
            raise ValueError(f"Variable mismatch: {self.variables} vs {other.variables}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(self.variables, other)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, ZERO) + c
        return Polynomial(self.variables, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.variables, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = CycloNumber.coerce(other)
            return Polynomial(self.variables, {m: a * c for m, a in self.terms.items()})
        self._check(other)
        terms: Dict[Monomial, CycloNumber] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _add(m1, m2)
                terms[m] = terms.get(m, ZERO) + c1 * c2
        return Polynomial(self.variables, terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        result = Polynomial.constant(self.variables, ONE)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.variables == other.variables and self.terms == other.terms
        try:
            return self == Polynomial.constant(self.variables, other)
        except TypeError:
            return NotImplemented

    __hash__ = None

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self.terms}) <= 1

    def leading_monomial(self, order: str = DEFAULT_ORDER) -> Monomial:
        if not self.terms:
            raise ValueError("The zero polynomial has no leading term")
        return max(self.terms, key=monomial_key(order))

    def leading_coefficient(self, order: str = DEFAULT_ORDER) -> CycloNumber:
        return self.terms[self.leading_monomial(order)]

    def monic(self, order: str = DEFAULT_ORDER) -> "Polynomial":
        return self * self.leading_coefficient(order).inverse()

    def __repr__(self):
        return f"Polynomial({self.variables}, '{self}')"

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for m in sorted(self.terms, key=_grevlex_key, reverse=True):
            c = self.terms[m]
            label = monomial_label(self.variables, m)
            if c.is_rational():
                r = c.to_fraction()
                if label == "1":
                    pieces.append(str(r))
                elif r == 1:
                    pieces.append(label)
                elif r == -1:
                    pieces.append(f"-{label}")
                else:
                    pieces.append(f"{r}*{label}")
            else:
                pieces.append(f"({c})" if label == "1" else f"({c})*{label}")
        return " + ".join(pieces).replace("+ -", "- ")


def parse_polynomial(text: str, variables: Sequence[str]) -> Polynomial:
    """
    Parse text such as 'h^2 + 1/4*e^2 - h*e' or '(i/2)*e' over the given variables.

    Coefficients may use the cyclotomic literals i, zeta(N,k), sqrt(2), exp(2*pi*i*r).
    """
    variables = tuple(variables)
    symbols = [sympy.Symbol(v) for v in variables]
    local = dict(CYCLO_LOCALS)
    local.update(zip(variables, symbols))
    source = text.replace('−', '-').strip()
    if not source:
        raise ParseError("Empty polynomial")
    try:
        expr = sympy.expand(parse_expr(source, local_dict=local, transformations=TRANSFORMATIONS))
        poly = sympy.Poly(expr, *symbols)
    except (SyntaxError, TokenError, TypeError, ValueError, sympy.SympifyError, sympy.PolynomialError) as e:
        raise ParseError(f"Cannot parse polynomial {text!r} in {', '.join(variables)}: {e}") from e
    return Polynomial(variables, {m: cyclo_from_sympy(c) for m, c in poly.terms()})


def normal_form(p: Polynomial, basis: Sequence[Polynomial], order: str = DEFAULT_ORDER) -> Polynomial:
    """Fully reduced remainder of p modulo the basis (unique when basis is a Groebner basis)."""
    key = monomial_key(order)
    leads = []
    for g in basis:
        lm = g.leading_monomial(order)
        leads.append((lm, g.terms[lm].inverse(), g))
    work = dict(p.terms)
    remainder: Dict[Monomial, CycloNumber] = {}
    while work:
        m = max(work, key=key)
        c = work.pop(m)
        for lm, inv_lc, g in leads:
            if _divides(lm, m):
                factor = c * inv_lc
                shift = _sub(m, lm)
                for gm, gc in g.terms.items():
                    if gm == lm:
                        continue
                    t = _add(gm, shift)
                    value = work.get(t, ZERO) - factor * gc
                    if value:
                        work[t] = value
                    else:
                        work.pop(t, None)
                break
        else:
            remainder[m] = c
    return Polynomial(p.variables, remainder)


def s_polynomial(f: Polynomial, g: Polynomial, order: str = DEFAULT_ORDER) -> Polynomial:
    lf, lg = f.leading_monomial(order), g.leading_monomial(order)
    top = _lcm(lf, lg)
    left = Polynomial(f.variables, {_sub(top, lf): f.terms[lf].inverse()})
    right = Polynomial(g.variables, {_sub(top, lg): g.terms[lg].inverse()})
    return left * f - right * g


def _reduce_basis(basis: List[Polynomial], order: str) -> List[Polynomial]:
    key = monomial_key(order)
    basis = sorted(basis, key=lambda g: key(g.leading_monomial(order)))
    minimal: List[Polynomial] = []
    for g in basis:
        lm = g.leading_monomial(order)
        if not any(_divides(h.leading_monomial(order), lm) for h in minimal):
            minimal.append(g)
    reduced = []
    for i, g in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1:]
        r = normal_form(g, others, order)
        reduced.append(r.monic(order))
    return sorted(reduced, key=lambda g: key(g.leading_monomial(order)))


def groebner_basis(gens: Sequence[Polynomial], order: str = DEFAULT_ORDER) -> List[Polynomial]:
    """
    Reduced Groebner basis of the ideal generated by gens (Buchberger with both criteria).

    Returns:
        Monic basis sorted by leading monomial; [] for the zero ideal, [1] for the unit ideal.
    """
    key = monomial_key(order)
    basis = [g.monic(order) for g in gens if not g.is_zero()]
    if not basis:
        return []
    pairs = {(i, j) for j in range(len(basis)) for i in range(j)}
    processed = 0

    def lcm_key(pair):
        i, j = pair
        return key(_lcm(basis[i].leading_monomial(order), basis[j].leading_monomial(order))), pair

    while pairs:
        pair = min(pairs, key=lcm_key)
        pairs.discard(pair)
        i, j = pair
        li, lj = basis[i].leading_monomial(order), basis[j].leading_monomial(order)
        # coprime leading monomials
        if all(a == 0 or b == 0 for a, b in zip(li, lj)):
            continue
        top = _lcm(li, lj)
        # chain criterion
        if any(k != i and k != j
               and _divides(basis[k].leading_monomial(order), top)
               and (min(i, k), max(i, k)) not in pairs
               and (min(j, k), max(j, k)) not in pairs
               for k in range(len(basis))):
            continue
        processed += 1
        r = normal_form(s_polynomial(basis[i], basis[j], order), basis, order)
        if not r.is_zero():
            basis.append(r.monic(order))
            new = len(basis) - 1
            pairs.update((k, new) for k in range(new))
    result = _reduce_basis(basis, order)
    logger.debug(f"Buchberger: {processed} S-pairs reduced, basis size {len(result)}")

    for g in gens:
        if not normal_form(g, result, order).is_zero():
            raise GroebnerError(f"Groebner basis does not contain generator {g}")
    return result


def is_groebner(basis: Sequence[Polynomial], order: str = DEFAULT_ORDER) -> bool:
    """True iff every S-polynomial of the basis reduces to zero."""
    return all(normal_form(s_polynomial(f, g, order), basis, order).is_zero()
               for k, f in enumerate(basis) for g in basis[k + 1:])


def staircase(basis: Sequence[Polynomial], nvars: int, order: str = DEFAULT_ORDER) -> List[Monomial]:
    """
    Standard monomials of a Groebner basis, sorted by (degree, order).

    Raises:
        NonArtinianError: If some variable has no pure power among the leading monomials.
    """
    leads = [g.leading_monomial(order) for g in basis]
    for v in range(nvars):
        if not any(lm[v] > 0 and sum(lm) == lm[v] for lm in leads) and not any(sum(lm) == 0 for lm in leads):
            raise NonArtinianError(
                f"Quotient is infinite-dimensional: no leading term is a pure power of variable {v}")
    zero = (0,) * nvars
    if any(_divides(lm, zero) for lm in leads):
        return []
    found = {zero}
    queue = deque([zero])
    while queue:
        m = queue.popleft()
        for v in range(nvars):
            nxt = tuple(a + (1 if k == v else 0) for k, a in enumerate(m))
            if nxt not in found and not any(_divides(lm, nxt) for lm in leads):
                found.add(nxt)
                queue.append(nxt)
    return sorted(found, key=monomial_key(order))


@dataclass
class QuotientPresentation:
    """Ideal generators, Groebner basis and staircase of a quotient k[variables]/I."""
    variables: Tuple[str, ...]
    generators: List[Polynomial]
    order: str
    groebner: List[Polynomial]
    staircase: List[Monomial]
    _index: Dict[Monomial, int] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self._index = {m: k for k, m in enumerate(self.staircase)}

    @property
    def labels(self) -> List[str]:
        return [monomial_label(self.variables, m) for m in self.staircase]

    def normal_form(self, p: Polynomial) -> Polynomial:
        return normal_form(p, self.groebner, self.order)

    def contains(self, p: Polynomial) -> bool:
        return self.normal_form(p).is_zero()

    def coordinates(self, p: Polynomial) -> Vector:
        """Coordinates of p in the staircase basis."""
        return {self._index[m]: c for m, c in self.normal_form(p).terms.items()}

    def graded_dimensions(self) -> Tuple[int, ...]:
        """Number of staircase monomials of each total degree."""
        top = max((sum(m) for m in self.staircase), default=-1)
        dims = [0] * (top + 1)
        for m in self.staircase:
            dims[sum(m)] += 1
        return tuple(dims)

    def polynomial(self, text: str) -> Polynomial:
        return parse_polynomial(text, self.variables)

    def to_json(self) -> dict:
        return {
            "variables": list(self.variables),
            "order": self.order,
            "generators": [str(g) for g in self.generators],
            "groebner": [str(g) for g in self.groebner],
            "staircase": self.labels,
        }


def quotient(gens: Sequence[Polynomial], order: str = DEFAULT_ORDER,
             variables: Sequence[str] = None) -> QuotientPresentation:
    """Groebner basis plus staircase of the ideal generated by gens."""
    gens = list(gens)
    if variables is None:
        if not gens:
            raise ValueError("Cannot infer variables from an empty generator list")
        variables = gens[0].variables
    variables = tuple(variables)
    basis = groebner_basis(gens, order)
    stairs = staircase(basis, len(variables), order)
    logger.debug(f"Quotient over {variables}: {len(basis)} basis elements, {len(stairs)} standard monomials")
    return QuotientPresentation(variables, gens, order, basis, stairs)


def _encode(x: CycloNumber):
    return x.to_json()


class GradedAlgebra:
    """
    Finite-dimensional commutative graded algebra with a fixed basis.

    Args:
        labels: Basis labels; the unit '1' comes first.
        degrees: Cohomological degree of each basis element.
        table: Sparse structure constants {(i, j): {k: c}}; missing pairs multiply to zero.
        functional: Degree functional as {basis index: value} (top degree only).
        generators: Generator name -> coordinate vector.
        name: Short name used in reports ('classical', 'quantum', 'chenruan').
    """

    def __init__(self, labels: Sequence[str], degrees: Sequence[int],
                 table: Dict[Tuple[int, int], Vector],
                 functional: Dict[int, CycloNumber] = None,
                 generators: Dict[str, Vector] = None,
                 name: str = 'algebra'):
        self.labels = tuple(labels)
        self.degrees = tuple(degrees)
        if len(self.labels) != len(self.degrees):
            raise ValueError("labels and degrees differ in length")
        if not self.labels or self.degrees[0] != 0:
            raise ValueError("The unit must be the first basis element, in degree 0")
        self.table = table
        self.functional = {k: CycloNumber.coerce(v) for k, v in (functional or {}).items() if v}
        self.generators = dict(generators or {})
        self.name = name
        self._index = {label: k for k, label in enumerate(self.labels)}
        self._gram: Optional[ExactMatrix] = None
        self._gram_inverse: Optional[ExactMatrix] = None

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def top_degree(self) -> int:
        return max(self.degrees)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"'{label}' is not a basis label of {self.name}; basis: {self.labels}") from None

    def basis_vector(self, k: int) -> Vector:
        return {k: ONE}

    def unit(self) -> Vector:
        return {0: ONE}

    def vector(self, coords: Mapping[str, object]) -> Vector:
        """Build a vector from {label: scalar}; scalars may be ints, Fractions, literals or CycloNumbers."""
        result = {}
        for label, value in coords.items():
            c = value if isinstance(value, CycloNumber) else CycloNumber.from_json(value)
            if c:
                result[self.index(label)] = c
        return result

    def generator(self, name: str) -> Vector:
        try:
            return dict(self.generators[name])
        except KeyError:
            raise KeyError(f"Unknown generator '{name}' of {self.name}; have {sorted(self.generators)}") from None

    def product(self, i: int, j: int) -> Vector:
        return self.table.get((i, j), {})

    def multiply(self, a: Vector, b: Vector) -> Vector:
        result: Vector = {}
        for i, x in a.items():
            for j, y in b.items():
                entry = self.product(i, j)
                if not entry:
                    continue
                xy = x * y
                for k, c in entry.items():
                    value = result.get(k, ZERO) + xy * c
                    if value:
                        result[k] = value
                    else:
                        result.pop(k, None)
        return result

    def power(self, a: Vector, exponent: int) -> Vector:
        result = self.unit()
        for _ in range(exponent):
            result = self.multiply(result, a)
        return result

    def evaluate(self, p: Polynomial) -> Vector:
        """Evaluate a polynomial in the generator names using this algebra's product."""
        result: Vector = {}
        for m, c in p.terms.items():
            term = self.unit()
            for name, a in zip(p.variables, m):
                if a:
                    term = self.multiply(term, self.power(self.generator(name), a))
            result = add_vectors(result, scale_vector(term, c))
        return result

    def integrate(self, v: Vector) -> CycloNumber:
        total = ZERO
        for k, c in v.items():
            value = self.functional.get(k)
            if value:
                total = total + c * value
        return total

    def pairing(self, a: Vector, b: Vector) -> CycloNumber:
        return self.integrate(self.multiply(a, b))

    def gram(self) -> ExactMatrix:
        if self._gram is None:
            n = self.dim
            self._gram = ExactMatrix([[self.pairing({i: ONE}, {j: ONE}) for j in range(n)] for i in range(n)])
        return self._gram

    def gram_inverse(self) -> ExactMatrix:
        """Inverse Gram matrix (SingularMatrixError when Poincare duality fails)."""
        if self._gram_inverse is None:
            self._gram_inverse = self.gram().inverse()
        return self._gram_inverse

    def graded_dims(self) -> Tuple[int, ...]:
        dims = [0] * (self.top_degree // 2 + 1)
        for d in self.degrees:
            dims[d // 2] += 1
        return tuple(dims)

    def degrees_of(self, v: Vector) -> set:
        return {self.degrees[k] for k in v}

    def expand(self, v: Vector) -> Dict[str, str]:
        """Readable {label: value} form, in basis order."""
        return {self.labels[k]: str(v[k]) for k in sorted(v)}

    def with_table(self, table: Dict[Tuple[int, int], Vector], name: str = None) -> "GradedAlgebra":
        return GradedAlgebra(self.labels, self.degrees, table, self.functional,
                             self.generators, name or self.name)

    def with_functional(self, functional: Dict[int, CycloNumber]) -> "GradedAlgebra":
        return GradedAlgebra(self.labels, self.degrees, self.table, functional, self.generators, self.name)

    def to_json(self, encode: Callable[[CycloNumber], object] = _encode) -> dict:
        products = {}
        for i in range(self.dim):
            for j in range(i, self.dim):
                entry = self.product(i, j)
                if entry:
                    key = f"{self.labels[i]} * {self.labels[j]}"
                    products[key] = {self.labels[k]: encode(c) for k, c in sorted(entry.items())}
        return {
            "name": self.name,
            "basis": [{"label": label, "degree": d} for label, d in zip(self.labels, self.degrees)],
            "graded_dims": list(self.graded_dims()),
            "generators": {name: {self.labels[k]: encode(c) for k, c in sorted(v.items())}
                           for name, v in sorted(self.generators.items())},
            "products": products,
            "functional": {self.labels[k]: encode(c) for k, c in sorted(self.functional.items())},
            "gram": [[encode(x) for x in row] for row in self.gram().rows()],
        }


def add_vectors(a: Vector, b: Vector) -> Vector:
    result = dict(a)
    for k, c in b.items():
        value = result.get(k, ZERO) + c
        if value:
            result[k] = value
        else:
            result.pop(k, None)
    return result


def scale_vector(a: Vector, c) -> Vector:
    c = CycloNumber.coerce(c)
    if not c:
        return {}
    return {k: x * c for k, x in a.items()}


def linear_combination(terms: Iterable[Tuple[object, Vector]]) -> Vector:
    result: Vector = {}
    for c, v in terms:
        result = add_vectors(result, scale_vector(v, c))
    return result


def structure_constants(q: QuotientPresentation, degrees: Mapping[str, int] = None,
                        name: str = 'algebra') -> GradedAlgebra:
    """
    GradedAlgebra skeleton (no degree functional) of an Artinian quotient.

    Args:
        q: Quotient presentation with a finite staircase.
        degrees: Cohomological degree per variable (default 2 each).
        name: Algebra name.

    Raises:
        NonArtinianError: If the staircase is empty (unit ideal) or infinite.
    """
    if not q.staircase:
        raise NonArtinianError("The ideal is the unit ideal; the quotient is zero")
    degrees = degrees or {}
    weight = [int(degrees.get(v, 2)) for v in q.variables]
    stairs = q.staircase
    labels = q.labels
    monomial_degrees = [sum(a * w for a, w in zip(m, weight)) for m in stairs]
    table: Dict[Tuple[int, int], Vector] = {}
    for i, mi in enumerate(stairs):
        for j in range(i, len(stairs)):
            product = Polynomial(q.variables, {_add(mi, stairs[j]): ONE})
            coords = q.coordinates(product)
            if coords:
                table[(i, j)] = coords
                table[(j, i)] = coords
    generators = {v: q.coordinates(Polynomial.variable(q.variables, v)) for v in q.variables}
    logger.debug(f"{name}: {len(stairs)} basis elements, {len(table)} nonzero products")
    return GradedAlgebra(labels, monomial_degrees, table, generators=generators, name=name)


def calibrate_top(alg: GradedAlgebra, element: Vector, value) -> Dict[int, CycloNumber]:
    """
    Degree functional on a one-dimensional top degree taking the given value on element.

    Raises:
        CalibrationError: If the top degree is not one-dimensional or element has no top part.
    """
    top = [k for k, d in enumerate(alg.degrees) if d == alg.top_degree]
    if len(top) != 1:
        raise CalibrationError(f"Top degree of {alg.name} has dimension {len(top)}, expected 1")
    coefficient = element.get(top[0], ZERO)
    if not coefficient:
        raise CalibrationError(f"Calibration element has no component on {alg.labels[top[0]]}")
    return {top[0]: CycloNumber.coerce(value) / coefficient}
