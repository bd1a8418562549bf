#!/usr/bin/env python3
"""
Cohomology ring of a smooth complete toric resolution Z -> P(w).

The ring is presented over (h, e_1, ..., e_d): the divisor classes b_i of the
original rays are eliminated through the linear relations of the fan together
with h = (sum b_i + sum e_j) / sum(w). Stanley-Reisner monomials over the minimal
non-faces generate the ideal. The degree functional is calibrated so that the
divisors of any maximal cone intersect in one point.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Sequence, Tuple

from errors import CalibrationError, FanError
from exact import ONE, ExactMatrix, CycloNumber
from gb import (
    DEFAULT_ORDER,
    GradedAlgebra,
    Polynomial,
    QuotientPresentation,
    Vector,
    calibrate_top,
    quotient,
    structure_constants,
)
from wps import Fan, Weights, minimal_cone

logger = logging.getLogger(__name__)


def exceptional_names(count: int) -> Tuple[str, ...]:
    """'e' for a single exceptional divisor, else 'e1', ..., 'ed'."""
    if count == 1:
        return ('e',)
    return tuple(f"e{j}" for j in range(1, count + 1))


@dataclass
class DivisorClasses:
    """Every torus-invariant divisor D_rho as a linear form in (h, e_1, ..., e_d)."""
    variables: Tuple[str, ...]
    rays: List[Polynomial]
    original_count: int

    @property
    def b(self) -> List[Polynomial]:
        return self.rays[:self.original_count]

    @property
    def e(self) -> List[Polynomial]:
        return self.rays[self.original_count:]

    def to_json(self) -> dict:
        names = [f"b{i}" for i in range(self.original_count)] + list(self.variables[1:])
        return {name: str(p) for name, p in zip(names, self.rays)}


def divisor_classes(refined: Fan, w: Weights) -> DivisorClasses:
    """
    Solve the linear relations plus sum(b) = sum(w)*h - sum(e) for b_0..b_n.

    The first len(w) rays of the refined fan are the rays of P(w); the rest are
    the exceptional rays in insertion order.
    """
    n = w.dim
    original = len(w)
    if refined.dim != n or len(refined.rays) < original:
        raise FanError(f"Refined fan does not extend the fan of {w}")
    added = refined.rays[original:]
    variables = ('h',) + exceptional_names(len(added))

    # Rows: coordinate k of sum_i g_i b_i, then the sum of all b_i
    matrix = ExactMatrix([[refined.rays[i][k] for i in range(original)] for k in range(n)]
                         + [[1] * original])
    inverse = matrix.inverse()

    # Right-hand sides as linear forms over (h, e_1..e_d)
    width = len(variables)
    rhs = []
    for k in range(n):
        rhs.append([0] + [-ray[k] for ray in added])
    rhs.append([w.total] + [-1] * len(added))
    columns = [[row[c] for row in rhs] for c in range(width)]
    solved = [inverse @ column for column in columns]

    b = [Polynomial.linear(variables, [solved[c][i] for c in range(width)]) for i in range(original)]
    e = [Polynomial.variable(variables, v) for v in variables[1:]]
    return DivisorClasses(variables, b + e, original)


def minimal_non_faces(fan: Fan) -> List[Tuple[int, ...]]:
    """Ray subsets that are not cones while all their proper subsets are."""
    faces = set()
    for cone in fan.max_cones:
        for size in range(len(cone) + 1):
            faces.update(combinations(cone, size))
    result = []
    for size in range(2, fan.dim + 2):
        for subset in combinations(range(len(fan.rays)), size):
            if subset in faces:
                continue
            if all(sub in faces for sub in combinations(subset, size - 1)):
                result.append(subset)
    return result


def presentation(refined: Fan, w: Weights, order: str = DEFAULT_ORDER) -> Tuple[QuotientPresentation, DivisorClasses]:
    """
    Stanley-Reisner presentation of H*(Z) over (h, e_1..e_d).

    Raises:
        FanError: If the refined fan is not smooth and complete.
    """
    if not refined.is_complete():
        raise FanError("Cohomology presentation needs a complete fan")
    if not refined.is_smooth():
        raise FanError("Cohomology presentation needs a smooth fan")
    classes = divisor_classes(refined, w)
    relations = []
    for subset in minimal_non_faces(refined):
        product = Polynomial.constant(classes.variables, ONE)
        for i in subset:
            product = product * classes.rays[i]
        relations.append(product)
    logger.debug(f"{w}: {len(relations)} Stanley-Reisner relations over {classes.variables}")
    return quotient(relations, order, classes.variables), classes


def degree_functional(alg: GradedAlgebra, refined: Fan, ray_vectors: Sequence[Vector]) -> Dict[int, CycloNumber]:
    """
    Functional with value 1 on the product of the divisors of every maximal cone.

    Calibrated on the first cone and checked on all others.

    Raises:
        CalibrationError: If two cones disagree or the top degree is not one-dimensional.
    """
    def cone_product(cone):
        result = alg.unit()
        for i in cone:
            result = alg.multiply(result, ray_vectors[i])
        return result

    functional = calibrate_top(alg, cone_product(refined.max_cones[0]), ONE)
    calibrated = alg.with_functional(functional)
    for cone in refined.max_cones[1:]:
        value = calibrated.integrate(cone_product(cone))
        if value != 1:
            raise CalibrationError(f"Cone {list(cone)} integrates to {value}, expected 1")
    logger.info(f"Degree functional calibrated on {len(refined.max_cones)} cones")
    return functional


@dataclass
class CurveClass:
    """
    Torus-invariant curve V(wall) contracted by the resolution.

    pd_class is the product of the divisors of the wall; exceptional lists the
    1-based numbers of the exceptional divisors in the wall; transversal marks
    curves over a positive-dimensional singular locus of A-type.
    """
    number: int
    wall: Tuple[int, ...]
    pd_class: Vector
    exceptional: Tuple[int, ...]
    transversal: bool

    @property
    def name(self) -> str:
        return f"Gamma{self.number}"

    def to_json(self, alg: GradedAlgebra) -> dict:
        return {
            "name": self.name,
            "wall": list(self.wall),
            "pd_class": alg.expand(self.pd_class),
            "exceptional": list(self.exceptional),
            "transversal": self.transversal,
        }


@dataclass
class ToricCohomology:
    """Everything known about H*(Z) for one resolution."""
    weights: Weights
    original: Fan
    refined: Fan
    presentation: QuotientPresentation
    divisors: DivisorClasses
    algebra: GradedAlgebra
    ray_vectors: List[Vector]

    @property
    def h(self) -> Vector:
        return self.algebra.generator('h')

    @property
    def exceptional(self) -> List[Vector]:
        return [self.algebra.generator(v) for v in self.divisors.variables[1:]]

    def class_of(self, text_or_poly) -> Vector:
        if isinstance(text_or_poly, str):
            text_or_poly = self.presentation.polynomial(text_or_poly)
        return self.presentation.coordinates(text_or_poly)

    def to_json(self, encode=None) -> dict:
        algebra = self.algebra.to_json(encode) if encode else self.algebra.to_json()
        return {
            "weights": list(self.weights.values),
            "presentation": self.presentation.to_json(),
            "divisors": self.divisors.to_json(),
            "algebra": algebra,
        }


def toric_cohomology(w: Weights, original: Fan, refined: Fan, order: str = DEFAULT_ORDER) -> ToricCohomology:
    """Presentation, calibrated GradedAlgebra and divisor vectors of the resolution."""
    q, classes = presentation(refined, w, order)
    skeleton = structure_constants(q, name='classical')
    ray_vectors = [q.coordinates(p) for p in classes.rays]
    functional = degree_functional(skeleton, refined, ray_vectors)
    algebra = skeleton.with_functional(functional)
    return ToricCohomology(w, original, refined, q, classes, algebra, ray_vectors)


def intersect(c: CurveClass, d: Vector, alg: GradedAlgebra) -> Fraction:
    """Intersection number of the curve with a degree-2 class."""
    return alg.integrate(alg.multiply(d, c.pd_class)).to_fraction()


def _is_transversal(original: Fan, ray: Sequence[int]) -> bool:
    # Exceptional curves over a singular curve of A-type (needs n > 2)
    return original.dim > 2 and len(minimal_cone(original, ray)) == 2


def curve_classes_and_mrho(original: Fan, refined: Fan, alg: GradedAlgebra,
                           ray_vectors: Sequence[Vector]) -> List[CurveClass]:
    """
    Generators of the cone of curves contracted by Z -> P(w).

    Walls new to the refined fan whose curve has zero degree against h, deduplicated
    by homology class.
    """
    old_walls = set(original.walls())
    original_count = len(original.rays)
    h = alg.generator('h')
    candidates = []
    for wall in refined.walls():
        if wall in old_walls:
            continue
        pd = alg.unit()
        for i in wall:
            pd = alg.multiply(pd, ray_vectors[i])
        if not pd or alg.pairing(h, pd):
            continue
        candidates.append((sorted(wall, reverse=True), wall, pd))
    candidates.sort(key=lambda item: item[0])

    classes: List[CurveClass] = []
    for _, wall, pd in candidates:
        if any(pd == c.pd_class for c in classes):
            continue
        added = tuple(i for i in wall if i >= original_count)
        exceptional = tuple(i - original_count + 1 for i in added)
        transversal = len(added) == 1 and _is_transversal(original, refined.rays[added[0]])
        classes.append(CurveClass(len(classes) + 1, wall, pd, exceptional, transversal))
    logger.info(f"Contracted cone generated by {len(classes)} class(es)")
    return classes


def intersection_matrix(classes: Sequence[CurveClass], alg: GradedAlgebra,
                        divisors: Sequence[Vector]) -> List[List[Fraction]]:
    """Rows: curve classes; columns: the given divisor classes."""
    return [[intersect(c, d, alg) for d in divisors] for c in classes]
