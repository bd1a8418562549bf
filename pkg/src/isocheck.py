#!/usr/bin/env python3
"""
Isomorphism and isometry verification between finite graded algebras.

Matrices act on coordinate columns: the image of basis element j of the source
is column j (dst = M @ src). Generator maps list one row per source generator,
giving its image over the target generators.
"""

import json
import logging
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

from errors import (
    MapError,
    ParseError,
    PoleError,
    RelationViolationError,
    SingularMatrixError,
    ToolkitError,
    UnsupportedEvaluationError,
)
from exact import ONE, ZERO, CycloNumber, ExactMatrix, root_of_unity
from gb import GradedAlgebra, Vector, add_vectors, linear_combination, scale_vector
from qcorr import ChainConfig, QEvaluation, quantum_algebra
from settings import PROJECT_ROOT
from wps import Weights, builtin_family, is_p11n

logger = logging.getLogger(__name__)

FIXTURES_DIR = PROJECT_ROOT / 'fixtures'
MAX_VIOLATIONS = 10

# Built-in generator maps shipped as fixtures
BUILTIN_MAPS = {
    'p1122': 'p1122.json',
    'p1344': 'ri.json',
}

ALGEBRA_NAMES = ('quantum', 'chenruan')


@dataclass
class GeneratorMap:
    """
    Linear map on generators: row r is the image of generators[r] over target_generators.
    """
    source: str
    target: str
    generators: List[str]
    target_generators: List[str]
    matrix: ExactMatrix

    def __post_init__(self):
        rows, cols = self.matrix.shape
        if rows != len(self.generators) or cols != len(self.target_generators):
            raise MapError(f"Map matrix is {rows}x{cols}, expected "
                           f"{len(self.generators)}x{len(self.target_generators)}")
        for name in (self.source, self.target):
            if name not in ALGEBRA_NAMES:
                raise MapError(f"Unknown algebra '{name}'; expected one of {', '.join(ALGEBRA_NAMES)}")

    def image(self, dst: GradedAlgebra, generator: str) -> Vector:
        row = self.matrix.row(self.generators.index(generator))
        return linear_combination((c, dst.generator(t)) for c, t in zip(row, self.target_generators))

    def to_json(self, encode=None) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "generators": list(self.generators),
            "target_generators": list(self.target_generators),
            "matrix": [[encode(x) if encode else x.to_json() for x in row] for row in self.matrix.rows()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "GeneratorMap":
        try:
            matrix = ExactMatrix.from_json(data['matrix'])
            return cls(
                source=data.get('source', 'quantum'),
                target=data.get('target', 'chenruan'),
                generators=list(data['generators']),
                target_generators=list(data['target_generators']),
                matrix=matrix,
            )
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, ToolkitError):
                raise
            raise ParseError(f"Malformed generator map: {e}") from e

    @classmethod
    def load(cls, path: Path) -> "GeneratorMap":
        path = Path(path)
        if not path.exists():
            raise ParseError(f"Map file not found: {path}")
        with open(path, 'r', encoding='utf-8') as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise ParseError(f"Invalid JSON in {path}: {e}") from e
        return cls.from_json(data)


def builtin_map(w: Weights) -> GeneratorMap:
    """Generator map of a built-in family: fixtures for P(1,1,2,2) and P(1,3,4,4), computed for P(1,...,1,n)."""
    if is_p11n(w):
        n = w.dim
        matrix = ExactMatrix([[1, 0], [0, -root_of_unity(1, 2 * n) / n]])
        return GeneratorMap('chenruan', 'quantum', ['H', 'E1'], ['h', 'e'], matrix)
    key = builtin_family(w)['key']
    return GeneratorMap.load(FIXTURES_DIR / BUILTIN_MAPS[key])


def _vector_to_column(v: Vector, dim: int) -> List[CycloNumber]:
    return [v.get(k, ZERO) for k in range(dim)]


class _Echelon:
    """Incremental row echelon form remembering how each row combines the inserted vectors."""

    def __init__(self):
        self.rows: List[Tuple[int, Vector, Dict[int, CycloNumber]]] = []
        self.count = 0

    def reduce(self, v: Vector) -> Tuple[Vector, Dict[int, CycloNumber]]:
        """Return (residue, combination) with v = residue + sum combination[k] * inserted[k]."""
        residue = dict(v)
        combination: Dict[int, CycloNumber] = {}
        for pivot, row, combo in self.rows:
            c = residue.get(pivot)
            if not c:
                continue
            residue = add_vectors(residue, scale_vector(row, -c))
            combination = add_vectors(combination, scale_vector(combo, c))
        return residue, combination

    def insert(self, residue: Vector, combination: Dict[int, CycloNumber]):
        pivot = min(residue)
        inv = residue[pivot].inverse()
        # row = residue / lead, and residue = inserted[new] - combination
        combo = add_vectors({self.count: ONE}, scale_vector(combination, -1))
        self.rows.append((pivot, scale_vector(residue, inv), scale_vector(combo, inv)))
        self.count += 1


def extend_map(src: GradedAlgebra, dst: GradedAlgebra, g: GeneratorMap) -> ExactMatrix:
    """
    Extend a generator map multiplicatively to a full basis matrix.

    Products of generators are explored breadth first; every linear relation among
    them in src must hold for their images in dst.

    Raises:
        MapError: Dimensions differ or the generators do not span src.
        RelationViolationError: A relation of src does not map to zero.
    """
    if src.dim != dst.dim:
        raise MapError(f"{src.name} has dimension {src.dim}, {dst.name} has {dst.dim}")
    unknown = [v for v in g.generators if v not in src.generators]
    unknown += [v for v in g.target_generators if v not in dst.generators]
    if unknown:
        raise MapError(f"Unknown generator(s) {unknown} for {src.name} -> {dst.name}")
    gens =[(name, src.generator(name), g.image(dst, name)) for name in g.generators]

    words: List[Tuple[str, Vector, Vector]] = []
    echelon = _Echelon()
    queue = deque([("1", src.unit(), dst.unit())])
    while queue:
        word, source, image = queue.popleft()
        residue, combination = echelon.reduce(source)
        if residue:
            echelon.insert(residue, combination)
            words.append((word, source, image))
            for name, gen_src, gen_img in gens:
                label = name if word == "1" else f"{word}*{name}"
                queue.append((label, src.multiply(source, gen_src), dst.multiply(image, gen_img)))
            continue
        expected = linear_combination((c, words[k][2]) for k, c in combination.items())
        if add_vectors(image, scale_vector(expected, -1)):
            relation = word + "".join(f" - ({c})*{words[k][0]}" for k, c in sorted(combination.items()))
            raise RelationViolationError(
                f"Relation {relation} = 0 of {src.name} does not hold for the images in {dst.name}",
                relation=relation)

    if len(words) != src.dim:
        raise MapError(f"Generators {g.generators} span only {len(words)} of {src.dim} dimensions of {src.name}")

    spanning = ExactMatrix.from_columns([_vector_to_column(s, src.dim) for _, s, _ in words])
    images = ExactMatrix.from_columns([_vector_to_column(t, dst.dim) for _, _, t in words])
    matrix = images @ spanning.inverse()
    logger.debug(f"Extended map {src.name} -> {dst.name} over {len(words)} words")
    return matrix


@dataclass
class IsoReport:
    """Result of verify_iso; violations hold the first failing pairs with both sides expanded."""
    passed: bool
    checks: Dict[str, bool]
    violations: List[dict] = field(default_factory=list)
    violation_count: int = 0

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "checks": dict(self.checks),
            "violation_count": self.violation_count,
            "violations": list(self.violations),
        }


@dataclass
class IsometryReport:
    passed: bool
    violations: List[dict] = field(default_factory=list)
    violation_count: int = 0

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "violation_count": self.violation_count,
            "violations": list(self.violations),
        }


def _column(m: ExactMatrix, j: int) -> Vector:
    return {k: c for k, c in enumerate(m.column(j)) if c}


def verify_iso(src: GradedAlgebra, dst: GradedAlgebra, m: ExactMatrix) -> IsoReport:
    """Check multiplicativity on all basis pairs, unit, invertibility and degrees."""
    if m.shape != (dst.dim, src.dim) or src.dim != dst.dim:
        return IsoReport(False, {"shape": False}, [{"reason": f"matrix shape {m.shape} for {src.dim} -> {dst.dim}"}], 1)

    images = [_column(m, j) for j in range(src.dim)]
    violations = []
    count = 0
    for i in range(src.dim):
        for j in range(i, src.dim):
            left = linear_combination((c, images[k]) for k, c in src.product(i, j).items())
            right = dst.multiply(images[i], images[j])
            if add_vectors(left, scale_vector(right, -1)):
                count += 1
                if len(violations) < MAX_VIOLATIONS:
                    violations.append({
                        "pair": [src.labels[i], src.labels[j]],
                        "image_of_product": dst.expand(left),
                        "product_of_images": dst.expand(right),
                    })

    unit = images[0] == dst.unit()
    invertible = m.rank() == src.dim
    degrees = all(dst.degrees_of(images[j]) <= {src.degrees[j]} for j in range(src.dim))
    checks = {
        "multiplicative": count == 0,
        "unit": unit,
        "invertible": invertible,
        "degree_preserving": degrees,
    }
    passed = all(checks.values())
    logger.info(f"verify_iso {src.name} -> {dst.name}: {'pass' if passed else 'fail'} ({count} violating pairs)")
    return IsoReport(passed, checks, violations, count)


def verify_isometry(src: GradedAlgebra, dst: GradedAlgebra, m: ExactMatrix) -> IsometryReport:
    """Check M^T G_dst M == G_src entrywise."""
    if m.shape != (dst.dim, src.dim):
        return IsometryReport(False, [{"reason": f"matrix shape {m.shape} for {src.dim} -> {dst.dim}"}], 1)
    pulled = m.transpose() @ dst.gram() @ m
    expected = src.gram()
    violations = []
    count = 0
    for i in range(src.dim):
        for j in range(i, src.dim):
            if pulled[i, j] != expected[i, j]:
                count += 1
                if len(violations) < MAX_VIOLATIONS:
                    violations.append({
                        "pair": [src.labels[i], src.labels[j]],
                        "source": str(expected[i, j]),
                        "pulled_back": str(pulled[i, j]),
                    })
    return IsometryReport(count == 0, violations, count)


def invert(m: ExactMatrix) -> ExactMatrix:
    """Inverse of a verified basis matrix, for checking the reverse direction."""
    return m.inverse()


@dataclass
class ScanResult:
    candidate: QEvaluation
    status: str
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        return {"q": self.candidate.to_json(), "status": self.status, "reason": self.reason}


def orient(g: GeneratorMap, quantum: GradedAlgebra, cr: GradedAlgebra) -> Tuple[GradedAlgebra, GradedAlgebra]:
    """(src, dst) according to the map's source/target names."""
    algebras = {'quantum': quantum, 'chenruan': cr}
    return algebras[g.source], algebras[g.target]


def scan_evaluations(src_cr: GradedAlgebra, z_data: GradedAlgebra, cfg: ChainConfig,
                     candidates: Sequence[QEvaluation], g: GeneratorMap) -> List[ScanResult]:
    """Run verify_iso at every candidate evaluation; poles and unsupported values are reported."""
    results = []
    for q in candidates:
        try:
            quantum = quantum_algebra(z_data, cfg, q)
        except PoleError as e:
            results.append(ScanResult(q, "pole", str(e)))
            continue
        except UnsupportedEvaluationError as e:
            results.append(ScanResult(q, "unsupported", str(e)))
            continue
        src, dst = orient(g, quantum, src_cr)
        try:
            matrix = extend_map(src, dst, g)
        except (RelationViolationError, SingularMatrixError) as e:
            results.append(ScanResult(q, "fail", str(e)))
            continue
        report = verify_iso(src, dst, matrix)
        if report.passed:
            results.append(ScanResult(q, "pass"))
        else:
            failed = [name for name, ok in report.checks.items() if not ok]
            results.append(ScanResult(q, "fail", f"failed checks: {', '.join(failed)}"))
    logger.info(f"Scanned {len(results)} evaluation(s); {sum(r.passed for r in results)} passed")
    return results


def passing(results: Sequence[ScanResult]) -> List[QEvaluation]:
    return [r.candidate for r in results if r.passed]
