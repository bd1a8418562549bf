import random
from dataclasses import replace
from fractions import Fraction

import pytest

from errors import ChainPatternError, ParseError, PoleError, UnsupportedEvaluationError
from exact import I, ONE, ZERO, CycloNumber, root_of_unity
from gb import add_vectors, scale_vector
from qcorr import (
    QEvaluation,
    QuantumCoefficient,
    check_evaluation,
    quantum_algebra,
    symbolic_product,
    symbolic_table,
    three_point,
    validate_chain,
)
from settings import get_series_terms

# (classical part, {label: {sub-chain: coefficient}}) of e_a * e_b
P1344_SYMBOLIC = {
    "e1*e1": ({"h^2": -24, "h*e1": 10, "h*e2": 4, "h*e3": 2}, {
        "h*e1": {(1,): 16, (1, 2): 4, (1, 2, 3): 4},
        "h*e2": {(2,): 4, (1, 2): 4, (2, 3): 4, (1, 2, 3): 4},
        "h*e3": {(2, 3): 4, (1, 2, 3): 4},
    }),
    "e1*e2": ({"h^2": 12, "h*e1": -3, "h*e2": -2, "h*e3": -1}, {
        "h*e1": {(1,): -8, (1, 2): 4},
        "h*e2": {(2,): -8, (1, 2): 4, (2, 3): -4},
        "h*e3": {(2, 3): -4},
    }),
    "e1*e3": ({}, {
        "h*e1": {(1, 2): -4, (1, 2, 3): 4},
        "h*e2": {(2,): 4, (1, 2): -4, (2, 3): -4, (1, 2, 3): 4},
        "h*e3": {(2, 3): -4, (1, 2, 3): 4},
    }),
    "e2*e2": ({"h^2": -24, "h*e1": 6, "h*e2": 12, "h*e3": 2}, {
        "h*e1": {(1,): 4, (1, 2): 4},
        "h*e2": {(2,): 16, (1, 2): 4, (2, 3): 4},
        "h*e3": {(3,): 4, (2, 3): 4},
    }),
    "e2*e3": ({"h^2": 12, "h*e1": -3, "h*e2": -6, "h*e3": -1}, {
        "h*e1": {(1, 2): -4},
        "h*e2": {(2,): -8, (1, 2): -4, (2, 3): 4},
        "h*e3": {(3,): -8, (2, 3): 4},
    }),
    "e3*e3": ({"h^2": -24, "h*e1": 6, "h*e2": 12, "h*e3": 14}, {
        "h*e1": {(1, 2): 4, (1, 2, 3): 4},
        "h*e2": {(2,): 4, (1, 2): 4, (2, 3): 4, (1, 2, 3): 4},
        "h*e3": {(3,): 16, (2, 3): 4, (1, 2, 3): 4},
    }),
}

# e_a * e_b at q = (i, i, i, 0)
P1344_AT_I = {
    ("e1", "e1"): {"h^2": -24, "h*e1": -2 + 6 * I, "h*e2": -4, "h*e3": -2 - 2 * I},
    ("e1", "e2"): {"h^2": 12, "h*e1": -1 - 4 * I, "h*e2": 2 - 4 * I, "h*e3": 1},
    ("e1", "e3"): {"h*e1": -2 * I, "h*e3": -2 * I},
    ("e2", "e2"): {"h^2": -24, "h*e1": 2 + 2 * I, "h*e2": 8 * I, "h*e3": -2 + 2 * I},
    ("e2", "e3"): {"h^2": 12, "h*e1": -1, "h*e2": -2 - 4 * I, "h*e3": 1 - 4 * I},
    ("e3", "e3"): {"h^2": -24, "h*e1": 2 - 2 * I, "h*e2": 4, "h*e3": 2 + 6 * I},
}

Q_AT_I = QEvaluation((I, I, I, ZERO))


def test_p1122_chain(p1122):
    assert [c.name for c in p1122.chain.chain] == ["Gamma1"]
    assert p1122.chain.isolated == []
    assert p1122.chain.subchains() == [(1,)]


def test_p1344_chain(p1344):
    cfg = p1344.chain
    assert [c.name for c in cfg.chain] == ["Gamma1", "Gamma2", "Gamma3"]
    assert [c.name for c in cfg.isolated] == ["Gamma4"]
    assert cfg.subchains() == [(1,), (1, 2), (1, 2, 3), (2,), (2, 3), (3,)]
    assert cfg.parameter_count == 4


def test_p11n_chain(resolved):
    r = resolved("1,1,1,3")
    assert r.chain.chain == []
    assert [c.name for c in r.chain.isolated] == ["Gamma1"]


def test_chain_pattern_violation(p1344):
    broken = [replace(c, transversal=True) for c in p1344.classes]
    with pytest.raises(ChainPatternError):
        validate_chain(p1344.algebra, broken)


def test_three_point_p1122(p1122):
    e = p1122.algebra.generator('e')
    h = p1122.algebra.generator('h')
    assert three_point(p1122.algebra, p1122.chain, e, e, e).terms == {(1,): -8}
    assert three_point(p1122.algebra, p1122.chain, h, e, e).terms == {}


def test_three_point_p1344_e1_cubed(p1344):
    e1 = p1344.algebra.generator('e1')
    coefficient = three_point(p1344.algebra, p1344.chain, e1, e1, e1)
    # (Gamma . e1)^3 summed over each sub-chain; Gamma3 . e1 = 0 drops (3,)
    assert coefficient.terms == {(1,): -8, (1, 2): -1, (1, 2, 3): -1, (2,): 1, (2, 3): 1}


def test_three_point_closed_form_matches_series(p1344):
    alg = p1344.algebra
    e1, e2 = alg.generator('e1'), alg.generator('e2')
    coefficient = three_point(alg, p1344.chain, e1, e1, e2)
    q = QEvaluation.parse("1/2,1/2,1/2,0")
    terms = get_series_terms()
    closed = coefficient.evaluate(q)
    partial = coefficient.series(q, terms)
    tail = coefficient.tail(q, terms)
    assert partial + tail == closed
    bound = sum(abs(c.to_fraction()) for c in coefficient.terms.values()) * Fraction(1, 2) ** terms
    assert abs(tail.to_fraction()) <= bound


def test_p1122_symbolic_product(p1122):
    e = p1122.algebra.generator('e')
    table = symbolic_product(p1122.algebra, p1122.chain, e, e)
    assert table["h^2"].classical == -4
    assert table["h^2"].quantum == {}
    assert table["h*e"].classical == 4
    assert table["h*e"].quantum == {(1,): 8}


def test_p1122_quantum_relation(p1122):
    # h^2 + e^2/4 - he - (2q/(1-q)) he vanishes in the corrected ring
    for text in ["-1", "1/3", "i", "zeta(3,1)"]:
        q = QEvaluation.parse(text)
        alg = quantum_algebra(p1122.algebra, p1122.chain, q)
        h, e = alg.generator('h'), alg.generator('e')
        x = q.values[0]
        he = alg.multiply(h, e)
        relation = add_vectors(alg.multiply(h, h), scale_vector(alg.multiply(e, e), Fraction(1, 4)))
        relation = add_vectors(relation, scale_vector(he, -1 - 2 * x / (1 - x)))
        assert relation == {}, text
        assert alg.multiply(alg.multiply(h, h), e) == {}


def test_p1344_symbolic_table(p1344):
    table = symbolic_table(p1344.algebra, p1344.chain)
    assert sorted(table) == sorted(list(P1344_SYMBOLIC) + ["e1*e4", "e2*e4", "e3*e4", "e4*e4"])
    for pair in ("e1*e4", "e2*e4", "e3*e4"):
        assert table[pair] == {}
    assert list(table["e4*e4"]) == ["e4^2"]
    assert table["e4*e4"]["e4^2"].classical == 1
    assert table["e4*e4"]["e4^2"].quantum == {}
    for pair, (classical, quantum) in P1344_SYMBOLIC.items():
        entries = table[pair]
        labels = set(classical) | set(quantum)
        assert set(entries) == labels, pair
        for label, entry in entries.items():
            assert entry.classical == classical.get(label, 0), (pair, label)
            assert entry.quantum == quantum.get(label, {}), (pair, label)


@pytest.mark.parametrize("a, b", sorted(P1344_AT_I))
def test_p1344_products_at_i(p1344, a, b):
    alg = quantum_algebra(p1344.algebra, p1344.chain, Q_AT_I)
    product = alg.multiply(alg.generator(a), alg.generator(b))
    assert product == alg.vector(P1344_AT_I[(a, b)])


def test_zero_evaluation_is_classical(p1344):
    alg = quantum_algebra(p1344.algebra, p1344.chain, QEvaluation.zero(4))
    assert alg.table == p1344.algebra.table


def test_h_product_is_classical(p1344):
    classical = p1344.algebra
    alg = quantum_algebra(classical, p1344.chain, Q_AT_I)
    h = alg.generator('h')
    for k in range(alg.dim):
        assert alg.multiply(h, {k: ONE}) == classical.multiply(h, {k: ONE})


def test_gram_and_unit_unchanged(p1344):
    alg = quantum_algebra(p1344.algebra, p1344.chain, Q_AT_I)
    assert alg.gram() == p1344.algebra.gram()
    for k in range(alg.dim):
        assert alg.multiply(alg.unit(), {k: ONE}) == {k: ONE}


def _random_gaussian(rng: random.Random) -> CycloNumber:
    real = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
    imaginary = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
    return real + imaginary * I


def _random_evaluations(cfg, count, seed=20240601):
    rng = random.Random(seed)
    found = []
    while len(found) < count:
        values = [ZERO] * cfg.parameter_count
        for c in cfg.chain:
            values[c.number - 1] = _random_gaussian(rng)
        q = QEvaluation(tuple(values))
        try:
            check_evaluation(cfg, q)
        except PoleError:
            continue
        found.append(q)
    return found


def test_associativity_commutativity_homogeneity(p1344):
    low = [k for k, d in enumerate(p1344.algebra.degrees) if d <= 2]
    for q in _random_evaluations(p1344.chain, 20):
        alg = quantum_algebra(p1344.algebra, p1344.chain, q)
        for i in low:
            for j in low:
                ij = alg.multiply({i: ONE}, {j: ONE})
                assert ij == alg.multiply({j: ONE}, {i: ONE})
                assert alg.degrees_of(ij) <= {alg.degrees[i] + alg.degrees[j]}
                for k in low:
                    left = alg.multiply(ij, {k: ONE})
                    right = alg.multiply({i: ONE}, alg.multiply({j: ONE}, {k: ONE}))
                    assert left == right, (q, i, j, k)


def test_associativity_on_full_basis(p1344):
    alg = quantum_algebra(p1344.algebra, p1344.chain, Q_AT_I)
    basis = range(alg.dim)
    for i in basis:
        for j in basis:
            ij = alg.product(i, j)
            for k in basis:
                left = alg.multiply(ij, {k: ONE})
                right = alg.multiply({i: ONE}, alg.product(j, k))
                assert left == right


def test_pole_is_rejected(p1122):
    with pytest.raises(PoleError):
        quantum_algebra(p1122.algebra, p1122.chain, QEvaluation.parse("1"))


def test_subchain_pole(p1344):
    # q1*q2 = 1 although neither factor is 1
    with pytest.raises(PoleError):
        check_evaluation(p1344.chain, QEvaluation.parse("2,1/2,0,0"))


def test_isolated_parameter_must_vanish(p1344):
    with pytest.raises(UnsupportedEvaluationError):
        quantum_algebra(p1344.algebra, p1344.chain, QEvaluation.parse("i,i,i,1/2"))


def test_parameter_count(p1344):
    with pytest.raises(ParseError):
        check_evaluation(p1344.chain, QEvaluation.parse("i,i"))
    with pytest.raises(ParseError):
        QEvaluation.parse("i,,i")


def test_quantum_coefficient_tail_is_exact():
    coefficient = QuantumCoefficient({(1,): CycloNumber.rational(3)})
    q = QEvaluation.parse("1/3")
    assert coefficient.evaluate(q) == Fraction(3, 2)
    assert coefficient.series(q, 2) == 1 + Fraction(1, 3)
    assert coefficient.tail(q, 2) == Fraction(3, 2) - 1 - Fraction(1, 3)


def test_parse_keeps_commas_inside_calls():
    q = QEvaluation.parse("zeta(3,1)")
    assert q.values == (root_of_unity(1, 3),)
    q = QEvaluation.parse("zeta(3,1), 0, -i, zeta(8,2)")
    assert q.values == (root_of_unity(1, 3), ZERO, -I, I)


@pytest.mark.parametrize("text", ["zeta(3", "zeta(3,1", "i)", "zeta(3,1),"])
def test_parse_rejects_malformed_literals(text):
    with pytest.raises(ParseError):
        QEvaluation.parse(text)
