#!/usr/bin/env python3
"""
Weighted projective space combinatorics.

Gorenstein and well-formedness checks, enumeration of Gorenstein weights via
Egyptian fractions, ages and twisted sectors, the fan of P(w) and its crepant
subdivisions with smoothness/crepancy validators.

Usage (as a library):
    from wps import Weights, builtin_resolution, validate_resolution

    w = Weights.parse("1,3,4,4")
    original, refined = builtin_resolution(w)
    print(validate_resolution(original, refined, w).to_json())
"""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import ceil, floor, gcd, lcm
from pathlib import Path
from typing import Dict, Iterator, List, Sequence, Tuple

from errors import (
    FanError,
    NonOrbifoldError,
    ParseError,
    RayError,
    RefinementError,
    UnsupportedFamilyError,
    WeightsError,
)
from exact import ExactMatrix, solve_linear

logger = logging.getLogger(__name__)

Vector = Tuple[int, ...]
Cone = Tuple[int, ...]


class Weights:
    """
    Weight vector (w_0, ..., w_n) of a weighted projective space, stored sorted ascending.

    Args:
        values: Positive integers; at least two of them.

    Raises:
        WeightsError: On non-positive entries or fewer than two weights.
        NonOrbifoldError: When gcd(w) != 1.
    """

    __slots__ = ('_values',)

    def __init__(self, values: Sequence[int]):
        values = tuple(int(v) for v in values)
        if len(values) < 2:
            raise WeightsError(f"Need at least two weights, got {list(values)}")
        if any(v <= 0 for v in values):
            raise WeightsError(f"Weights must be positive integers, got {list(values)}")
        if reduce(gcd, values) != 1:
            raise NonOrbifoldError(
                f"gcd{values} = {reduce(gcd, values)}; P(w) is an orbifold only when the gcd is 1")
        self._values = tuple(sorted(values))

    @classmethod
    def parse(cls, text: str) -> "Weights":
        """Parse '1,3,4,4' (also accepts 'P(1,3,4,4)' and whitespace)."""
        body = text.strip()
        if body.upper().startswith('P(') and body.endswith(')'):
            body = body[2:-1]
        parts = body.replace(' ', '').split(',')
        if any(not part for part in parts):
            raise ParseError(f"Cannot parse weights {text!r}: empty field")
        try:
            return cls([int(part) for part in parts])
        except ValueError as e:
            raise ParseError(f"Cannot parse weights {text!r}: expected comma-separated integers") from e

    @property
    def values(self) -> Tuple[int, ...]:
        return self._values

    @property
    def dim(self) -> int:
        return len(self._values) - 1

    @property
    def total(self) -> int:
        return sum(self._values)

    @property
    def product(self) -> int:
        return reduce(lambda a, b: a * b, self._values, 1)

    def __iter__(self):
        return iter(self._values)

    def __len__(self):
        return len(self._values)

    def __getitem__(self, index):
        return self._values[index]

    def __eq__(self, other):
        if isinstance(other, Weights):
            return self._values == other._values
        if isinstance(other, (tuple, list)):
            return self._values == tuple(other)
        return NotImplemented

    def __hash__(self):
        return hash(self._values)

    def __repr__(self):
        return f"Weights({list(self._values)})"

    def __str__(self):
        return "P(" + ",".join(str(v) for v in self._values) + ")"


def is_gorenstein(w: Weights) -> bool:
    """True iff every w_i divides the sum of all weights."""
    total = w.total
    return all(total % wi == 0 for wi in w)


def is_well_formed(w: Weights) -> bool:
    """True iff any n of the n+1 weights are coprime."""
    values = w.values
    return all(reduce(gcd, values[:i] + values[i + 1:]) == 1 for i in range(len(values)))


def _egyptian(remaining: Fraction, terms: int, lower: int) -> Iterator[Tuple[int, ...]]:
    """Non-decreasing tuples (x_1..x_terms), x_1 >= lower, with sum 1/x_i == remaining."""
    if terms == 0:
        if remaining == 0:
            yield ()
        return
    if remaining <= 0:
        return
    start = max(lower, ceil(1 / remaining))
    stop = floor(terms / remaining)
    for x in range(start, stop + 1):
        rest = remaining - Fraction(1, x)
        if rest < 0:
            continue
        for tail in _egyptian(rest, terms - 1, x):
            yield (x,) + tail


def enumerate_gorenstein(dim: int) -> List[Weights]:
    """
    All Gorenstein weights of weighted projective spaces of the given dimension.

    Solutions of 1 = sum 1/x_i (dim+1 terms) are mapped to x_i -> L/x_i with L = lcm(x),
    divided by their gcd and deduplicated.
    """
    if dim < 1:
        raise WeightsError(f"Dimension must be positive, got {dim}")
    found = set()
    for solution in _egyptian(Fraction(1), dim + 1, 1):
        common = reduce(lcm, solution)
        raw = [common // x for x in solution]
        g = reduce(gcd, raw)
        found.add(Weights([v // g for v in raw]))
    result = sorted(found, key=lambda w: w.values)
    logger.debug(f"Dimension {dim}: {len(result)} Gorenstein weight systems")
    return result


def _frac(x: Fraction) -> Fraction:
    return x - floor(x)


def age(gamma: Fraction, w: Weights) -> Fraction:
    """Sum of the fractional parts of gamma * w_j."""
    gamma = Fraction(gamma)
    if not 0 <= gamma < 1:
        raise WeightsError(f"gamma must lie in [0, 1), got {gamma}")
    return sum((_frac(gamma * wj) for wj in w), Fraction(0))


@dataclass(frozen=True)
class Sector:
    """Twisted sector X_(g) = P(w_I) of the inertia stack, g = exp(2*pi*i*gamma)."""
    gamma: Fraction
    fixed_indices: Tuple[int, ...]
    age: Fraction
    weights: Tuple[int, ...]

    @property
    def dim(self) -> int:
        """Dimension of the cohomology of P(w_I)."""
        return len(self.fixed_indices)

    def to_json(self) -> dict:
        return {
            "gamma": str(self.gamma),
            "fixed_indices": list(self.fixed_indices),
            "age": str(self.age),
            "weights": list(self.weights),
        }


def twisted_sectors(w: Weights) -> List[Sector]:
    """All sectors gamma in [0,1) with gamma*w_i integral for some i, sorted by gamma."""
    gammas = sorted({Fraction(k, wi) for wi in w for k in range(wi)})
    sectors = []
    for gamma in gammas:
        fixed = tuple(i for i, wi in enumerate(w) if (gamma * wi).denominator == 1)
        sectors.append(Sector(
            gamma=gamma,
            fixed_indices=fixed,
            age=age(gamma, w),
            weights=tuple(w[i] for i in fixed),
        ))
    return sectors


def _primitive(vector: Sequence[int]) -> bool:
    return reduce(gcd, (abs(v) for v in vector), 0) == 1


@dataclass(frozen=True)
class Fan:
    """
    Complete simplicial fan given by primitive rays and maximal cones (ray index tuples).

    Raises:
        RayError: A ray is not primitive or has the wrong length.
        FanError: A cone is not full-dimensional simplicial or references a missing ray.
    """
    dim: int
    rays: Tuple[Vector, ...]
    max_cones: Tuple[Cone, ...]
    _walls: Dict[Cone, Tuple[int, ...]] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        rays = tuple(tuple(int(x) for x in r) for r in self.rays)
        cones = tuple(tuple(sorted(int(i) for i in c)) for c in self.max_cones)
        object.__setattr__(self, 'rays', rays)
        object.__setattr__(self, 'max_cones', cones)
        for r in rays:
            if len(r) != self.dim:
                raise RayError(f"Ray {list(r)} does not live in Z^{self.dim}")
            if not _primitive(r):
                raise RayError(f"Ray {list(r)} is not primitive")
        for c in cones:
            if len(c) != self.dim or len(set(c)) != self.dim:
                raise FanError(f"Cone {list(c)} is not simplicial of dimension {self.dim}")
            if any(i < 0 or i >= len(rays) for i in c):
                raise FanError(f"Cone {list(c)} references a missing ray")
            if self.determinant(c) == 0:
                raise FanError(f"Cone {list(c)} is not full-dimensional")

    def determinant(self, cone: Cone) -> int:
        matrix = ExactMatrix([self.rays[i] for i in cone])
        return int(matrix.determinant().to_fraction())

    def is_smooth(self) -> bool:
        return all(abs(self.determinant(c)) == 1 for c in self.max_cones)

    def wall_index(self) -> Dict[Cone, Tuple[int, ...]]:
        """Map each (n-1)-cone to the positions of the maximal cones containing it."""
        if self._walls is None:
            walls: Dict[Cone, List[int]] = {}
            for position, cone in enumerate(self.max_cones):
                for face in combinations(cone, self.dim - 1):
                    walls.setdefault(face, []).append(position)
            object.__setattr__(self, '_walls', {k: tuple(v) for k, v in sorted(walls.items())})
        return self._walls

    def walls(self) -> List[Cone]:
        return list(self.wall_index())

    def is_complete(self) -> bool:
        """Every wall lies in exactly two maximal cones (pseudo-manifold test for simplicial fans)."""
        return bool(self.max_cones) and all(len(v) == 2 for v in self.wall_index().values())

    def is_face(self, indices: Sequence[int]) -> bool:
        wanted = set(indices)
        return any(wanted <= set(c) for c in self.max_cones)

    def coordinates(self, cone: Cone, vector: Sequence[int]) -> Tuple[Fraction, ...]:
        """Coefficients a with vector = sum a_k * rays[cone[k]]."""
        columns = ExactMatrix([self.rays[i] for i in cone]).transpose()
        return tuple(x.to_fraction() for x in solve_linear(columns, list(vector)))

    def containing_cones(self, vector: Sequence[int]) -> List[Tuple[int, Tuple[Fraction, ...]]]:
        """Positions (and coordinates) of the maximal cones containing the vector."""
        found = []
        for position, cone in enumerate(self.max_cones):
            coords = self.coordinates(cone, vector)
            if all(a >= 0 for a in coords):
                found.append((position, coords))
        return found

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "rays": [list(r) for r in self.rays],
            "max_cones": [list(c) for c in self.max_cones],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Fan":
        try:
            return cls(int(data['dim']), tuple(map(tuple, data['rays'])), tuple(map(tuple, data['max_cones'])))
        except (KeyError, TypeError) as e:
            raise ParseError(f"Malformed fan JSON: {e}") from e


def _unimodular_reducer(w: Sequence[int]) -> List[List[int]]:
    """Integer matrix U with det +-1 and U @ w = e_0 (Smith normal form of a column vector)."""
    size = len(w)
    u = [[1 if i == j else 0 for j in range(size)] for i in range(size)]
    v = list(w)
    while sum(1 for x in v if x) > 1:
        pivot = min((i for i in range(size) if v[i]), key=lambda i: abs(v[i]))
        for i in range(size):
            if i != pivot and v[i]:
                q = v[i] // v[pivot]
                v[i] -= q * v[pivot]
                u[i] = [a - q * b for a, b in zip(u[i], u[pivot])]
    pivot = next(i for i in range(size) if v[i])
    if pivot:
        v[0], v[pivot] = v[pivot], v[0]
        u[0], u[pivot] = u[pivot], u[0]
    if v[0] < 0:
        u[0] = [-a for a in u[0]]
    return u


def stacky_vectors(w: Weights) -> List[Vector]:
    """Vectors g_0..g_n generating Z^n with sum w_i g_i = 0."""
    n = w.dim
    if w[0] == 1:
        head = tuple(-wi for wi in w.values[1:])
        return [head] + [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    u = _unimodular_reducer(w.values)
    return [tuple(u[row][i] for row in range(1, n + 1)) for i in range(n + 1)]


def build_wps_fan(w: Weights) -> Fan:
    """Fan of P(w): rays g_0..g_n (primitive) and all n-subsets as maximal cones."""
    if reduce(gcd, w.values) != 1:
        raise NonOrbifoldError(f"{w} is not an orbifold")
    vectors = stacky_vectors(w)
    rays = []
    for v in vectors:
        g = reduce(gcd, (abs(x) for x in v), 0)
        if g != 1:
            logger.warning(f"{w} is not well formed: stacky vector {list(v)} divided by {g}")
            v = tuple(x // g for x in v)
        rays.append(v)
    cones = tuple(combinations(range(w.dim + 1), w.dim))
    return Fan(w.dim, tuple(rays), cones)


def stellar_subdivide(fan: Fan, ray: Sequence[int]) -> Fan:
    """
    Stellar subdivision of a fan at a primitive vector in its support.

    Each maximal cone containing the ray is replaced by the cones obtained by swapping
    the new ray for one generator with a positive coefficient.
    """
    ray = tuple(int(x) for x in ray)
    if len(ray) != fan.dim:
        raise RayError(f"Ray {list(ray)} does not live in Z^{fan.dim}")
    if not _primitive(ray):
        raise RayError(f"Ray {list(ray)} is not primitive")
    if ray in fan.rays:
        return fan
    containing = dict(fan.containing_cones(ray))
    if not containing:
        raise RayError(f"Ray {list(ray)} lies outside the support of the fan")

    new_index = len(fan.rays)
    cones: List[Cone] = []
    for position, cone in enumerate(fan.max_cones):
        if position not in containing:
            cones.append(cone)
            continue
        coords = containing[position]
        for k, a in enumerate(coords):
            if a > 0:
                cones.append(tuple(sorted(cone[:k] + (new_index,) + cone[k + 1:])))
    logger.debug(f"Subdivided at {list(ray)}: {len(containing)} cone(s) split, {len(cones)} cones total")
    return Fan(fan.dim, fan.rays + (ray,), tuple(cones))


def minimal_cone(fan: Fan, vector: Sequence[int]) -> Cone:
    """The smallest cone of the fan containing the vector (indices of its rays)."""
    containing = fan.containing_cones(vector)
    if not containing:
        raise RayError(f"Vector {list(vector)} lies outside the support of the fan")
    position, coords = containing[0]
    cone = fan.max_cones[position]
    return tuple(i for i, a in zip(cone, coords) if a > 0)


@dataclass
class ResolutionReport:
    """Outcome of validate_resolution; failures lists offending cones/rays."""
    smooth: bool
    crepant: bool
    cone_count: int
    ray_count: int
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.smooth and self.crepant

    def to_json(self) -> dict:
        return {
            "smooth": self.smooth,
            "crepant": self.crepant,
            "cone_count": self.cone_count,
            "ray_count": self.ray_count,
            "failures": list(self.failures),
        }


def validate_resolution(original: Fan, refined: Fan, w: Weights) -> ResolutionReport:
    """
    Check that refined refines original, and report smoothness and crepancy.

    Raises:
        RefinementError: Dimensions differ, a fan is incomplete, a refined ray lies outside
            the original support, or a refined cone does not lie inside an original cone.
    """
    if original.dim != refined.dim or original.dim != w.dim:
        raise RefinementError(f"Dimension mismatch: {original.dim}, {refined.dim}, {w}")
    if not original.is_complete() or not refined.is_complete():
        raise RefinementError("Both fans must be complete (same support)")

    located = [original.containing_cones(r) for r in refined.rays]
    for ray, cones in zip(refined.rays, located):
        if not cones:
            raise RefinementError(f"Ray {list(ray)} lies outside the support of the original fan")

    # Every ray of a refined cone must share one original cone
    containing = {i: {p for p, _ in cones} for i, cones in enumerate(located)}
    for cone in refined.max_cones:
        common = set.intersection(*(containing[i] for i in cone))
        if not common:
            raise RefinementError(f"Cone {list(cone)} is not contained in any cone of the original fan")

    failures = []
    smooth = True
    for cone in refined.max_cones:
        det = refined.determinant(cone)
        if abs(det) != 1:
            smooth = False
            failures.append(f"cone {list(cone)} has determinant {det}")

    crepant = True
    for ray, cones in zip(refined.rays, located):
        _, coords = cones[0]
        if sum(coords) != 1:
            crepant = False
            failures.append(f"ray {list(ray)} has discrepancy sum {sum(coords)}")

    report = ResolutionReport(smooth, crepant, len(refined.max_cones), len(refined.rays), failures)
    logger.info(f"{w}: smooth={smooth} crepant={crepant} ({report.cone_count} cones)")
    return report


def is_p11n(w: Weights) -> bool:
    n = w.dim
    return n >= 2 and w.values == (1,) * n + (n,)


def builtin_family(w: Weights, families: Dict[str, dict] = None) -> dict:
    """
    Look up the built-in family definition for the weights.

    Args:
        w: Weights to look up.
        families: Families mapping (defaults to settings.load_families()).

    Returns:
        Family dict with 'name', 'weights', 'rays' and 'chenruan' keys.

    Raises:
        UnsupportedFamilyError: When the weights are not a built-in family.
    """
    if is_p11n(w):
        n = w.dim
        return {
            'key': f"p11{n}" if n < 10 else f"p11_{n}",
            'name': str(w),
            'weights': list(w.values),
            'rays': [[0] * (n - 1) + [-1]],
            'chenruan': {
                'generators': ['H', 'E1'],
                'sectors': {'E1': f"1/{n}"},
                'relations': [f"H^{n} - E1^{n}", "H*E1"],
            },
        }
    if families is None:
        from settings import load_families
        families = load_families()
    for key, family in families.items():
        if tuple(sorted(family['weights'])) == w.values:
            return dict(family, key=key)
    raise UnsupportedFamilyError(
        f"{w} is not a built-in family; supported: P(1,1,2,2), P(1,3,4,4), P(1,...,1,n). "
        "Supply subdivision rays explicitly with --rays")


def builtin_rays(w: Weights) -> List[Vector]:
    return [tuple(r) for r in builtin_family(w)['rays']]


def resolve(w: Weights, rays: Sequence[Sequence[int]]) -> Tuple[Fan, Fan]:
    """Fan of P(w) and its iterated stellar subdivision at the given rays (in order)."""
    original = build_wps_fan(w)
    refined = original
    for ray in rays:
        refined = stellar_subdivide(refined, ray)
    return original, refined


def builtin_resolution(w: Weights) -> Tuple[Fan, Fan]:
    """
    (Sigma, Sigma') for a built-in family; Sigma' is certified smooth and crepant.

    Raises:
        UnsupportedFamilyError: For weights outside the built-in families.
        FanError: When the configured rays do not give a crepant resolution.
    """
    original, refined = resolve(w, builtin_rays(w))
    report = validate_resolution(original, refined, w)
    if not report.ok:
        raise FanError(f"Configured rays for {w} do not give a crepant resolution: {report.failures}")
    return original, refined


def load_rays(path: Path) -> List[Vector]:
    """Read a subdivision recipe {"rays": [[...], ...]} from a JSON file."""
    path = Path(path)
    if not path.exists():
        raise ParseError(f"Rays file not found: {path}")
    with open(path, 'r', encoding='utf-8') as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ParseError(f"Invalid JSON in {path}: {e}") from e
    rays = data.get('rays') if isinstance(data, dict) else None
    if not isinstance(rays, list) or not all(isinstance(r, list) for r in rays):
        raise ParseError(f"{path} must contain {{\"rays\": [[int, ...], ...]}}")
    try:
        return [tuple(int(x) for x in r) for r in rays]
    except (TypeError, ValueError) as e:
        raise ParseError(f"Non-integer ray coordinate in {path}") from e

