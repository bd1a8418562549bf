#!/usr/bin/env python3
"""
Chen-Ruan cohomology of weighted projective spaces.

The additive structure (sectors shifted by twice their age) is computed for any
Gorenstein P(w). The ring structure is presentation driven: the built-in families
read their generators and relations from config/families.yaml, and any other
presentation can be supplied through cr_algebra_from_presentation().
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Sequence, Tuple

from errors import ConfigError, NonGorensteinError
from exact import CycloNumber
from gb import DEFAULT_ORDER, GradedAlgebra, Polynomial, Vector, calibrate_top, parse_polynomial, quotient, structure_constants
from wps import Weights, age, builtin_family, is_gorenstein, twisted_sectors

logger = logging.getLogger(__name__)


@dataclass
class CRBettiTable:
    """Per Chen-Ruan degree p: contributing (gamma, local degree) pairs and the total dimension."""
    weights: Weights
    contributions: Dict[int, List[Tuple[Fraction, int]]] = field(default_factory=dict)

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(len(self.contributions.get(2 * k, [])) for k in range(self.weights.dim + 1))

    @property
    def total(self) -> int:
        return sum(self.dims)

    def to_json(self) -> dict:
        return {
            "dims": list(self.dims),
            "total": self.total,
            "degrees": {
                str(p): [{"gamma": str(g), "local_degree": d} for g, d in entries]
                for p, entries in sorted(self.contributions.items())
            },
        }


def cr_betti(w: Weights) -> CRBettiTable:
    """
    Graded dimensions of H*_CR(P(w)).

    Raises:
        NonGorensteinError: If some age is not an integer (the grading would be fractional).
    """
    if not is_gorenstein(w):
        raise NonGorensteinError(f"{w} is not Gorenstein; Chen-Ruan degrees would not be integral")
    table = CRBettiTable(w)
    for sector in twisted_sectors(w):
        if sector.age.denominator != 1:
            raise NonGorensteinError(f"Sector {sector.gamma} of {w} has age {sector.age}")
        shift = 2 * int(sector.age)
        for k in range(sector.dim):
            table.contributions.setdefault(2 * k + shift, []).append((sector.gamma, 2 * k))
    return table


def generator_degrees(w: Weights, generators: Sequence[str], sectors: Mapping[str, object]) -> Dict[str, int]:
    """Degree 2 for untwisted generators, 2*age(gamma) for sector units."""
    degrees = {}
    for name in generators:
        if name in sectors:
            gamma = Fraction(str(sectors[name]))
            a = age(gamma, w)
            if a.denominator != 1:
                raise NonGorensteinError(f"Generator {name} sits in sector {gamma} of fractional age {a}")
            degrees[name] = 2 * int(a)
        else:
            degrees[name] = 2
    return degrees


def cr_algebra_from_presentation(w: Weights, generators: Sequence[str], relations: Sequence[str],
                                 degrees: Mapping[str, int] = None,
                                 order: str = DEFAULT_ORDER) -> GradedAlgebra:
    """
    Chen-Ruan algebra from a user-supplied presentation.

    The first generator is the untwisted hyperplane class H; the degree functional
    takes the value 1/prod(w) on H^n.

    Raises:
        ConfigError: If the graded dimensions disagree with cr_betti(w).
    """
    generators = tuple(generators)
    polys = [parse_polynomial(text, generators) for text in relations]
    q = quotient(polys, order, generators)
    skeleton = structure_constants(q, degrees, name='chenruan')
    betti = cr_betti(w)
    if skeleton.graded_dims() != betti.dims:
        raise ConfigError(
            f"Presentation of {w} has graded dimensions {skeleton.graded_dims()}, "
            f"expected {betti.dims} from the twisted sectors")
    hyperplane = Polynomial.variable(generators, generators[0]) ** w.dim
    functional = calibrate_top(skeleton, q.coordinates(hyperplane), Fraction(1, w.product))
    logger.info(f"Chen-Ruan algebra of {w}: dimension {skeleton.dim}, dims {skeleton.graded_dims()}")
    return skeleton.with_functional(functional)


def cr_algebra(w: Weights) -> GradedAlgebra:
    """
    Chen-Ruan algebra of a built-in family.

    Raises:
        UnsupportedFamilyError: For weights outside the built-in families.
    """
    family = builtin_family(w)
    block = family['chenruan']
    degrees = generator_degrees(w, block['generators'], block.get('sectors') or {})
    return cr_algebra_from_presentation(w, block['generators'], block['relations'], degrees)


def cr_pairing(alg: GradedAlgebra, a: Vector, b: Vector) -> CycloNumber:
    return alg.pairing(a, b)
