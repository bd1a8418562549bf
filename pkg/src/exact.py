#!/usr/bin/env python3
"""
Exact scalar arithmetic: rationals, cyclotomic field elements and dense linear algebra.

A CycloNumber is an element of Q(zeta_N) stored in the power basis
zeta_N^0 ... zeta_N^(phi(N)-1), reduced modulo the N-th cyclotomic polynomial.
Rationals are CycloNumbers of order 1. Mixed-order arithmetic embeds both operands
into Q(zeta_L), L = lcm of the orders.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from tokenize import TokenError
from typing import Iterable, List, Sequence, Tuple, Union

import sympy
from sympy import Poly, QQ, Symbol, cyclotomic_poly, mobius, totient
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)

from errors import DivisionByZeroError, ParseError, SingularMatrixError

logger = logging.getLogger(__name__)

Rational = Fraction
Scalar = Union[int, Fraction, "CycloNumber"]

_X = Symbol('x')

# Symbolic placeholder for zeta(N, k) literals in parsed text
ZETA = sympy.Function('zeta')


@lru_cache(maxsize=None)
def _cyclotomic(order: int) -> Tuple[int, ...]:
    """Coefficients of the order-th cyclotomic polynomial, lowest degree first."""
    poly = Poly(cyclotomic_poly(order, _X), _X)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


def field_degree(order: int) -> int:
    """phi(order): dimension of Q(zeta_order) over Q."""
    return len(_cyclotomic(order)) - 1


@lru_cache(maxsize=None)
def _reduction_table(order: int) -> Tuple[Tuple[int, ...], ...]:
    """Rows x^k mod Phi_N for k = phi, phi+1, ..., 2*phi - 2 (at least one row)."""
    phi = field_degree(order)
    coeffs = _cyclotomic(order)
    row = tuple(-c for c in coeffs[:phi])
    table = [row]
    for _ in range(max(0, phi - 2)):
        prev = table[-1]
        top = prev[-1]
        shifted = (0,) + prev[:-1]
        table.append(tuple(s + top * r for s, r in zip(shifted, row)))
    return tuple(table)


@lru_cache(maxsize=None)
def _powers(order: int) -> Tuple[Tuple[int, ...], ...]:
    """Power-basis vectors of zeta_N^k for k = 0 .. N-1."""
    phi = field_degree(order)
    row = _reduction_table(order)[0]
    current = [0] * phi
    current[0] = 1
    vectors = []
    for _ in range(order):
        vectors.append(tuple(current))
        top = current[-1]
        shifted = [0] + current[:-1]
        current = [s + top * r for s, r in zip(shifted, row)]
    return tuple(vectors)


@lru_cache(maxsize=None)
def _trace_weights(order: int) -> Tuple[Fraction, ...]:
    """Normalized traces Tr(zeta_N^k) / phi(N); independent of the embedding order."""
    weights = []
    for k in range(field_degree(order)):
        m = order // gcd(k, order)
        weights.append(Fraction(int(mobius(m)), int(totient(m))))
    return tuple(weights)


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError as e:
            raise ParseError(f"Not a rational literal: {value!r}") from e
    raise TypeError(f"Cannot interpret {value!r} as a rational")


class CycloNumber:
    """Immutable element of a cyclotomic field Q(zeta_N)."""

    __slots__ = ('_order', '_coeffs', '_hash')

    def __init__(self, order: int, coeffs: Sequence, reduce: bool = True):
        if order < 1:
            raise ValueError(f"Cyclotomic order must be positive, got {order}")
        phi = field_degree(order)
        coeffs = tuple(_to_fraction(c) for c in coeffs)
        if len(coeffs) != phi:
            raise ValueError(f"Q(zeta_{order}) needs {phi} coefficients, got {len(coeffs)}")
        if reduce and order > 1 and not any(coeffs[1:]):
            order, coeffs = 1, coeffs[:1]
        self._order = order
        self._coeffs = coeffs
        self._hash = None

    # construction

    @classmethod
    def rational(cls, value) -> "CycloNumber":
        return cls(1, (_to_fraction(value),))

    @classmethod
    def coerce(cls, value) -> "CycloNumber":
        if isinstance(value, CycloNumber):
            return value
        if isinstance(value, (int, Fraction, str)):
            return cls.rational(value)
        raise TypeError(f"Cannot interpret {value!r} as a cyclotomic number")

    @classmethod
    def from_json(cls, data) -> "CycloNumber":
        """Decode {"order": N, "coeffs": ["p/q", ...]}; bare numbers and literals are accepted too."""
        if isinstance(data, dict):
            try:
                return cls(int(data['order']), [_to_fraction(c) for c in data['coeffs']])
            except (KeyError, TypeError, ValueError) as e:
                raise ParseError(f"Malformed cyclotomic number: {data!r}") from e
        if isinstance(data, (int, Fraction)):
            return cls.rational(data)
        if isinstance(data, str):
            return parse_cyclo(data)
        raise ParseError(f"Malformed cyclotomic number: {data!r}")

    # accessors

    @property
    def order(self) -> int:
        return self._order

    @property
    def coeffs(self) -> Tuple[Fraction, ...]:
        return self._coeffs

    def is_zero(self) -> bool:
        return not any(self._coeffs)

    def is_rational(self) -> bool:
        return not any(self._coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self._coeffs[0]

    def _coeffs_at(self, order: int) -> Tuple[Fraction, ...]:
        if order == self._order:
            return self._coeffs
        if order % self._order:
            raise ValueError(f"Q(zeta_{self._order}) does not embed into Q(zeta_{order})")
        ratio = order // self._order
        powers = _powers(order)
        result = [Fraction(0)] * field_degree(order)
        for k, c in enumerate(self._coeffs):
            if c:
                for t, p in enumerate(powers[k * ratio]):
                    if p:
                        result[t] += c * p
        return tuple(result)

    def embed(self, order: int) -> "CycloNumber":
        """Return the same value represented in Q(zeta_order); order must be a multiple of self.order."""
        return CycloNumber(order, self._coeffs_at(order), reduce=False)

    # arithmetic

    def _common(self, other: "CycloNumber"):
        order = lcm(self._order, other._order)
        return order, self._coeffs_at(order), other._coeffs_at(order)

    def __add__(self, other):
        try:
            other = CycloNumber.coerce(other)
        except TypeError:
            return NotImplemented
        if self._order == other._order == 1:
            return CycloNumber(1, (self._coeffs[0] + other._coeffs[0],))
        order, u, v = self._common(other)
        return CycloNumber(order, [a + b for a, b in zip(u, v)])

    __radd__ = __add__

    def __neg__(self):
        return CycloNumber(self._order, [-c for c in self._coeffs])

    def __sub__(self, other):
        try:
            other = CycloNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = CycloNumber.coerce(other)
        except TypeError:
            return NotImplemented
        if other._order == 1:
            c = other._coeffs[0]
            return CycloNumber(self._order, [a * c for a in self._coeffs])
        if self._order == 1:
            c = self._coeffs[0]
            return CycloNumber(other._order, [c * b for b in other._coeffs])
        order, u, v = self._common(other)
        phi = len(u)
        product = [Fraction(0)] * (2 * phi - 1)
        for i, a in enumerate(u):
            if a:
                for j, b in enumerate(v):
                    if b:
                        product[i + j] += a * b
        result = product[:phi]
        table = _reduction_table(order)
        for k in range(phi, 2 * phi - 1):
            c = product[k]
            if c:
                for t, r in enumerate(table[k - phi]):
                    if r:
                        result[t] += c * r
        return CycloNumber(order, result)

    __rmul__ = __mul__

    def inverse(self) -> "CycloNumber":
        if self.is_zero():
            raise DivisionByZeroError("Cannot invert zero")
        if self._order == 1:
            return CycloNumber(1, (1 / self._coeffs[0],))
        modulus = Poly(list(reversed(_cyclotomic(self._order))), _X, domain=QQ)
        element = Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(self._coeffs)],
                       _X, domain=QQ)
        inverse = element.invert(modulus)
        coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(inverse.all_coeffs())]
        coeffs += [Fraction(0)] * (field_degree(self._order) - len(coeffs))
        return CycloNumber(self._order, coeffs)

    def __truediv__(self, other):
        try:
            other = CycloNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return CycloNumber.coerce(other) * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = CycloNumber.rational(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    # comparison

    def __eq__(self, other):
        try:
            other = CycloNumber.coerce(other)
        except TypeError:
            return NotImplemented
        if self._order == other._order:
            return self._coeffs == other._coeffs
        _, u, v = self._common(other)
        return u == v

    def __hash__(self):
        if self._hash is None:
            weights = _trace_weights(self._order)
            self._hash = hash(sum((c * t for c, t in zip(self._coeffs, weights)), Fraction(0)))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    # formatting

    def __repr__(self):
        return f"CycloNumber({self._order}, {[str(c) for c in self._coeffs]})"

    def __str__(self):
        if self.is_rational():
            return str(self._coeffs[0])
        terms = []
        for k, c in enumerate(self._coeffs):
            if not c:
                continue
            if k == 0:
                terms.append(str(c))
            elif c == 1:
                terms.append(f"zeta({self._order},{k})")
            else:
                terms.append(f"{c}*zeta({self._order},{k})")
        return " + ".join(terms)

    def to_json(self, order: int = None) -> dict:
        """Encode as {"order": N, "coeffs": ["p/q", ...]}; order re-embeds (diagnostics)."""
        coeffs = self._coeffs_at(order) if order else self._coeffs
        return {"order": order or self._order, "coeffs": [str(c) for c in coeffs]}


def root_of_unity(k: int, order: int) -> CycloNumber:
    """Return zeta_order^k in canonical form (its order divides the given order)."""
    if order < 1:
        raise ValueError(f"Root of unity order must be positive, got {order}")
    k %= order
    g = gcd(k, order)
    reduced = order // g
    return CycloNumber(reduced, _powers(reduced)[k // g])


ONE = CycloNumber.rational(1)
ZERO = CycloNumber.rational(0)
I = root_of_unity(1, 4)
# sqrt(2) = zeta_8 + zeta_8^-1, the real positive embedding
SQRT2 = root_of_unity(1, 8) + root_of_unity(7, 8)
SQRT3 = root_of_unity(1, 12) + root_of_unity(11, 12)

SQUARE_ROOTS = {sympy.Integer(2): SQRT2, sympy.Integer(3): SQRT3}


def cyclo_from_sympy(expr) -> CycloNumber:
    """Convert a sympy expression built from rationals, I, sqrt(2), exp(2*pi*I*r) and zeta(N,k)."""
    expr = sympy.sympify(expr)
    if expr.is_Rational:
        return CycloNumber.rational(Fraction(int(expr.p), int(expr.q)))
    if expr == sympy.I:
        return I
    if expr.func == ZETA:
        order, k = expr.args
        if not (order.is_Integer and k.is_Integer) or order < 1:
            raise ParseError(f"zeta(N,k) needs integers N >= 1 and k, got {expr}")
        return root_of_unity(int(k), int(order))
    if expr.is_Add:
        result = ZERO
        for term in expr.args:
            result = result + cyclo_from_sympy(term)
        return result
    if expr.is_Mul:
        result = ONE
        for factor in expr.args:
            result = result * cyclo_from_sympy(factor)
        return result
    if isinstance(expr, sympy.exp):
        turns = sympy.simplify(expr.args[0] / (2 * sympy.pi * sympy.I))
        if not turns.is_Rational:
            raise ParseError(f"exp() argument must be 2*pi*i times a rational: {expr}")
        return root_of_unity(int(turns.p), int(turns.q))
    if expr.is_Pow:
        base, exponent = expr.args
        if exponent.is_Integer:
            return cyclo_from_sympy(base) ** int(exponent)
        if base in SQUARE_ROOTS and exponent == sympy.Rational(1, 2):
            return SQUARE_ROOTS[base]
        if base in SQUARE_ROOTS and exponent == sympy.Rational(-1, 2):
            return SQUARE_ROOTS[base] / int(base)
        if base == -1 and exponent.is_Rational:
            # (-1)^(p/q) = exp(i*pi*p/q)
            return root_of_unity(int(exponent.p), 2 * int(exponent.q))
    raise ParseError(f"Unsupported cyclotomic literal: {expr}")


CYCLO_LOCALS = {
    'i': sympy.I,
    'I': sympy.I,
    'zeta': ZETA,
    'sqrt': sympy.sqrt,
    'exp': sympy.exp,
    'pi': sympy.pi,
}

TRANSFORMATIONS = standard_transformations + (convert_xor,)


def parse_cyclo(text: str) -> CycloNumber:
    """Parse a literal such as '3/2', '-i', '1 - i', 'zeta(24,3)', '-sqrt(2)*i', '3*exp(2*pi*i/3)'."""
    source = text.replace('−', '-').strip()
    if not source:
        raise ParseError("Empty cyclotomic literal")
    try:
        expr = parse_expr(source, local_dict=dict(CYCLO_LOCALS), transformations=TRANSFORMATIONS)
    except (SyntaxError, TokenError, TypeError, ValueError, sympy.SympifyError) as e:
        raise ParseError(f"Cannot parse cyclotomic literal {text!r}: {e}") from e
    return cyclo_from_sympy(expr)


def split_literals(text: str, separator: str = ',') -> List[str]:
    """
    Split text on separator outside parentheses, so 'zeta(3,1),0' gives ['zeta(3,1)', '0'].

    Raises:
        ParseError: Parentheses are unbalanced.
    """
    parts, current, depth = [], [], 0
    for char in text:
        if char == '(':
            depth += 1
        elif char == ')':
            depth -= 1
            if depth < 0:
                raise ParseError(f"Unbalanced ')' in {text!r}")
        if char == separator and depth == 0:
            parts.append(''.join(current))
            current = []
        else:
            current.append(char)
    if depth:
        raise ParseError(f"Unbalanced '(' in {text!r}")
    parts.append(''.join(current))
    return parts


def common_order(values: Iterable[CycloNumber]) -> int:
    """Least common order of the given values (the field all of them live in)."""
    order = 1
    for v in values:
        order = lcm(order, v.order)
    return order


class ExactMatrix:
    """Dense matrix with CycloNumber entries."""

    __slots__ = ('_rows',)

    def __init__(self, rows: Sequence[Sequence]):
        rows = [tuple(CycloNumber.coerce(x) for x in row) for row in rows]
        if not rows or not rows[0]:
            raise ValueError("Matrix must have at least one row and one column")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("Matrix rows must have equal length")
        self._rows = tuple(rows)

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls([[ZERO] * cols for _ in range(rows)])

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence]) -> "ExactMatrix":
        return cls(list(zip(*columns)))

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self._rows), len(self._rows[0])

    @property
    def order(self) -> int:
        return common_order(x for row in self._rows for x in row)

    def __getitem__(self, index):
        i, j = index
        return self._rows[i][j]

    def row(self, i: int) -> Tuple[CycloNumber, ...]:
        return self._rows[i]

    def column(self, j: int) -> Tuple[CycloNumber, ...]:
        return tuple(r[j] for r in self._rows)

    def rows(self) -> List[Tuple[CycloNumber, ...]]:
        return list(self._rows)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(list(zip(*self._rows)))

    def __matmul__(self, other):
        if isinstance(other, ExactMatrix):
            if self.shape[1] != other.shape[0]:
                raise ValueError(f"Shape mismatch: {self.shape} @ {other.shape}")
            cols = [other.column(j) for j in range(other.shape[1])]
            return ExactMatrix([[_dot(row, col) for col in cols] for row in self._rows])
        vector = [CycloNumber.coerce(x) for x in other]
        if self.shape[1] != len(vector):
            raise ValueError(f"Shape mismatch: {self.shape} @ vector of length {len(vector)}")
        return [_dot(row, vector) for row in self._rows]

    def __mul__(self, scalar):
        return ExactMatrix([[x * scalar for x in row] for row in self._rows])

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b for ra, rb in zip(self._rows, other._rows) for a, b in zip(ra, rb))

    __hash__ = None

    def determinant(self) -> CycloNumber:
        rows, cols = self.shape
        if rows != cols:
            raise ValueError("Determinant of a non-square matrix")
        work = [list(r) for r in self._rows]
        det = ONE
        for c in range(cols):
            pivot = next((r for r in range(c, rows) if work[r][c]), None)
            if pivot is None:
                return ZERO
            if pivot != c:
                work[c], work[pivot] = work[pivot], work[c]
                det = -det
            det = det * work[c][c]
            inv = work[c][c].inverse()
            for r in range(c + 1, rows):
                factor = work[r][c] * inv
                if factor:
                    work[r] = [a - factor * b for a, b in zip(work[r], work[c])]
        return det

    def rank(self) -> int:
        work = [list(r) for r in self._rows]
        rows, cols = self.shape
        rank = 0
        for c in range(cols):
            pivot = next((r for r in range(rank, rows) if work[r][c]), None)
            if pivot is None:
                continue
            work[rank], work[pivot] = work[pivot], work[rank]
            inv = work[rank][c].inverse()
            for r in range(rank + 1, rows):
                factor = work[r][c] * inv
                if factor:
                    work[r] = [a - factor * b for a, b in zip(work[r], work[rank])]
            rank += 1
        return rank

    def inverse(self) -> "ExactMatrix":
        n = self.shape[0]
        if self.shape[1] != n:
            raise SingularMatrixError("Only square matrices can be inverted")
        solution = _gauss_jordan(self, [list(r) for r in ExactMatrix.identity(n).rows()])
        return ExactMatrix(solution)

    def to_json(self, order: int = None) -> list:
        return [[x.to_json(order) for x in row] for row in self._rows]

    @classmethod
    def from_json(cls, data) -> "ExactMatrix":
        return cls([[CycloNumber.from_json(x) for x in row] for row in data])


def _dot(u: Sequence[CycloNumber], v: Sequence[CycloNumber]) -> CycloNumber:
    total = ZERO
    for a, b in zip(u, v):
        if a and b:
            total = total + a * b
    return total


def _gauss_jordan(matrix: ExactMatrix, rhs: List[List[CycloNumber]]) -> List[List[CycloNumber]]:
    """Solve matrix * X = rhs (rhs given row-wise); raises SingularMatrixError."""
    n, cols = matrix.shape
    if n != cols:
        raise SingularMatrixError(f"Linear system needs a square matrix, got {n}x{cols}")
    width = len(rhs[0])
    work = [list(matrix.row(i)) + list(rhs[i]) for i in range(n)]
    for c in range(n):
        pivot = next((r for r in range(c, n) if work[r][c]), None)
        if pivot is None:
            raise SingularMatrixError(f"Matrix is singular (no pivot in column {c})")
        work[c], work[pivot] = work[pivot], work[c]
        inv = work[c][c].inverse()
        work[c] = [x * inv for x in work[c]]
        for r in range(n):
            if r != c and work[r][c]:
                factor = work[r][c]
                work[r] = [a - factor * b for a, b in zip(work[r], work[c])]
    return [row[n:n + width] for row in work]


def solve_linear(matrix: ExactMatrix, b: Sequence) -> List[CycloNumber]:
    """Return the unique exact x with matrix @ x == b."""
    rhs = [[CycloNumber.coerce(x)] for x in b]
    if len(rhs) != matrix.shape[0]:
        raise ValueError(f"Right-hand side has length {len(rhs)}, matrix has {matrix.shape[0]} rows")
    return [row[0] for row in _gauss_jordan(matrix, rhs)]
