import itertools

import pytest

from errors import MapError, ParseError, RelationViolationError
from exact import I, ZERO, ExactMatrix
from isocheck import (
    GeneratorMap,
    builtin_map,
    extend_map,
    invert,
    orient,
    passing,
    scan_evaluations,
    verify_iso,
    verify_isometry,
)
from qcorr import QEvaluation, quantum_algebra
from wps import Weights

Q_PLUS = QEvaluation((I, I, I, ZERO))
Q_MINUS = QEvaluation((-I, -I, -I, ZERO))


def _identity_map(alg):
    names = list(alg.generators)
    return GeneratorMap('quantum', 'quantum', names, names, ExactMatrix.identity(len(names)))


def test_identity_map_extends_to_identity(p1344):
    alg = p1344.algebra
    matrix = extend_map(alg, alg, _identity_map(alg))
    assert matrix == ExactMatrix.identity(alg.dim)
    assert verify_iso(alg, alg, matrix).passed
    assert verify_isometry(alg, alg, matrix).passed


@pytest.mark.parametrize("fixture, q", [("ri.json", Q_PLUS), ("ri2.json", Q_MINUS)])
def test_p1344_maps(p1344, fixtures_dir, fixture, q):
    g = GeneratorMap.load(fixtures_dir / fixture)
    quantum = quantum_algebra(p1344.algebra, p1344.chain, q)
    src, dst = orient(g, quantum, p1344.cr)
    assert src is quantum
    matrix = extend_map(src, dst, g)

    report = verify_iso(src, dst, matrix)
    assert report.passed, report.violations
    assert report.checks == {"multiplicative": True, "unit": True, "invertible": True, "degree_preserving": True}
    assert verify_isometry(src, dst, matrix).passed

    back = invert(matrix)
    assert verify_iso(dst, src, back).passed
    assert not verify_isometry(src, dst, matrix * 2).passed


@pytest.mark.parametrize("fixture, q", [("ri.json", Q_PLUS), ("ri2.json", Q_MINUS)])
def test_p1344_maps_fail_classically(p1344, fixtures_dir, fixture, q):
    g = GeneratorMap.load(fixtures_dir / fixture)
    with pytest.raises(RelationViolationError) as excinfo:
        extend_map(p1344.algebra, p1344.cr, g)
    assert excinfo.value.relation

    # the matrix that works at q is not a ring map on the classical ring
    quantum = quantum_algebra(p1344.algebra, p1344.chain, q)
    matrix = extend_map(quantum, p1344.cr, g)
    assert verify_iso(quantum, p1344.cr, matrix).passed
    report = verify_iso(p1344.algebra, p1344.cr, matrix)
    assert not report.passed
    assert not report.checks["multiplicative"]
    assert report.checks["degree_preserving"]


def test_p1344_scan(p1344, fixtures_dir):
    candidates = [QEvaluation(signs + (ZERO,)) for signs in itertools.product((I, -I), repeat=3)]
    ri = GeneratorMap.load(fixtures_dir / "ri.json")
    ri2 = GeneratorMap.load(fixtures_dir / "ri2.json")

    results = scan_evaluations(p1344.cr, p1344.algebra, p1344.chain, candidates, ri)
    assert len(results) == len(candidates)
    assert passing(results) == [Q_PLUS]
    # unless all signs agree some q_a*q_(a+1) = 1
    assert [r.status for r in results] == ["pass"] + ["pole"] * 6 + ["fail"]

    results = scan_evaluations(p1344.cr, p1344.algebra, p1344.chain, candidates, ri2)
    assert passing(results) == [Q_MINUS]


def test_p1122_scan(p1122):
    g = builtin_map(Weights([1, 1, 2, 2]))
    candidates = [QEvaluation.parse(t) for t in ("1", "-1", "i")]
    results = scan_evaluations(p1122.cr, p1122.algebra, p1122.chain, candidates, g)
    assert [r.status for r in results] == ["pole", "pass", "fail"]
    assert "does not hold" in results[2].reason
    assert results[1].to_json() == {"q": ["-1"], "status": "pass", "reason": ""}


def test_p1122_relation_violation(p1122):
    g = builtin_map(Weights([1, 1, 2, 2]))
    quantum = quantum_algebra(p1122.algebra, p1122.chain, QEvaluation.parse("i"))
    src, dst = orient(g, quantum, p1122.cr)
    with pytest.raises(RelationViolationError) as excinfo:
        extend_map(src, dst, g)
    assert excinfo.value.relation.startswith("E*E")


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_p11n_maps(resolved, n):
    r = resolved(",".join(["1"] * n + [str(n)]))
    g = builtin_map(r.weights)
    quantum = quantum_algebra(r.algebra, r.chain, QEvaluation.zero(r.chain.parameter_count))
    src, dst = orient(g, quantum, r.cr)
    assert src is r.cr
    matrix = extend_map(src, dst, g)
    assert verify_iso(src, dst, matrix).passed
    assert verify_isometry(src, dst, matrix).passed


def test_p1113_fixture_matches_builtin(fixtures_dir):
    assert GeneratorMap.load(fixtures_dir / "p1113.json") == builtin_map(Weights([1, 1, 1, 3]))


def test_map_shape_and_names():
    with pytest.raises(MapError):
        GeneratorMap('quantum', 'chenruan', ['h'], ['H', 'E'], ExactMatrix([[1]]))
    with pytest.raises(MapError):
        GeneratorMap('classical', 'chenruan', ['h'], ['H'], ExactMatrix([[1]]))


def test_unknown_generators(p1122):
    g = GeneratorMap('quantum', 'chenruan', ['h', 'x'], ['H', 'E'], ExactMatrix.identity(2))
    with pytest.raises(MapError):
        extend_map(p1122.algebra, p1122.cr, g)


def test_dimension_mismatch(p1122, p1344):
    g = GeneratorMap('quantum', 'chenruan', ['h'], ['H'], ExactMatrix([[1]]))
    with pytest.raises(MapError):
        extend_map(p1122.algebra, p1344.cr, g)


def test_generators_must_span(p1122):
    g = GeneratorMap('quantum', 'chenruan', ['h'], ['H'], ExactMatrix([[1]]))
    with pytest.raises(MapError):
        extend_map(p1122.algebra, p1122.cr, g)


def test_malformed_map_file(tmp_path):
    path = tmp_path / "map.json"
    path.write_text('{"generators": ["h"]}', encoding='utf-8')
    with pytest.raises(ParseError):
        GeneratorMap.load(path)
    with pytest.raises(ParseError):
        GeneratorMap.load(tmp_path / "missing.json")


def test_map_json_round_trip(fixtures_dir):
    g = GeneratorMap.load(fixtures_dir / "ri.json")
    assert GeneratorMap.from_json(g.to_json()) == g


def test_verify_iso_rejects_wrong_shape(p1122, p1344):
    report = verify_iso(p1122.algebra, p1344.cr, ExactMatrix.identity(p1122.algebra.dim))
    assert not report.passed
    assert report.checks == {"shape": False}


def test_empty_scan(p1122):
    g = builtin_map(Weights([1, 1, 2, 2]))
    assert scan_evaluations(p1122.cr, p1122.algebra, p1122.chain, [], g) == []
