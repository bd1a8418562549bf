#!/usr/bin/env python3
"""
Quantum corrected cup product on H*(Z).

Gromov-Witten rule: along a transversal A_k chain Gamma_1..Gamma_k the only
nonzero genus-0 invariants are 1/d^3 for d times a connected sub-chain. After the
divisor axiom the 3-point function sums to a closed form per sub-chain Gamma:

    <a1, a2, a3>(q) = sum_Gamma (prod_i int_Gamma a_i) * q^Gamma / (1 - q^Gamma)

Evaluation at roots of unity uses this closed form (analytic continuation of
the geometric series). Isolated classes are supported only at q = 0.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from errors import ChainPatternError, ParseError, PoleError, UnsupportedEvaluationError
from exact import ONE, ZERO, CycloNumber, parse_cyclo, split_literals
from gb import GradedAlgebra, Vector, add_vectors, scale_vector
from toricring import CurveClass, exceptional_names, intersect

logger = logging.getLogger(__name__)

SubChain = Tuple[int, ...]


@dataclass
class ChainConfig:
    """
    Contracted classes split into one transversal A_k chain and isolated classes.

    generators keeps the original numbering (quantum parameter q_k belongs to
    generators[k-1]); chain is in adjacency order.
    """
    generators: List[CurveClass]
    chain: List[CurveClass]
    isolated: List[CurveClass]

    @property
    def parameter_count(self) -> int:
        return len(self.generators)

    def subchains(self) -> List[SubChain]:
        """Connected sub-chains as tuples of 1-based generator numbers, in chain order."""
        numbers = [c.number for c in self.chain]
        return [tuple(numbers[a:b + 1]) for a in range(len(numbers)) for b in range(a, len(numbers))]

    def subchain_class(self, sub: SubChain) -> Vector:
        result: Vector = {}
        for number in sub:
            result = add_vectors(result, self.generators[number - 1].pd_class)
        return result

    def to_json(self) -> dict:
        return {
            "chain": [c.name for c in self.chain],
            "isolated": [c.name for c in self.isolated],
            "subchains": [list(s) for s in self.subchains()],
        }


def validate_chain(alg: GradedAlgebra, gens: Sequence[CurveClass]) -> ChainConfig:
    """
    Separate the transversal chain from isolated classes and check the A_k pattern.

    The matrix int_{Gamma_a} e_{dual(b)} over chain classes must be the negated
    Cartan matrix of A_k once ordered along the chain.

    Raises:
        ChainPatternError: If the transversal classes do not form a single A_k chain.
    """
    gens = list(gens)
    candidates = [c for c in gens if c.transversal]
    isolated = [c for c in gens if not c.transversal]
    if not candidates:
        return ChainConfig(gens, [], isolated)

    exceptional = exceptional_names(len(alg.generators) - 1)

    def dual(c: CurveClass) -> Vector:
        return alg.generator(exceptional[c.exceptional[0] - 1])

    size = len(candidates)
    matrix = [[intersect(a, dual(b), alg) for b in candidates] for a in candidates]
    for a in range(size):
        if matrix[a][a] != -2:
            raise ChainPatternError(f"{candidates[a].name} meets its exceptional divisor in {matrix[a][a]}, expected -2")

    neighbours = {a: [b for b in range(size) if b != a and matrix[a][b]] for a in range(size)}
    for a in range(size):
        for b in neighbours[a]:
            if matrix[a][b] != 1 or matrix[b][a] != 1:
                raise ChainPatternError(
                    f"{candidates[a].name} and {candidates[b].name} intersect in {matrix[a][b]}, expected 1")
        if len(neighbours[a]) > 2:
            raise ChainPatternError(f"{candidates[a].name} has {len(neighbours[a])} neighbours; not a chain")

    ends = [a for a in range(size) if len(neighbours[a]) <= 1]
    if not ends:
        raise ChainPatternError("Transversal classes form a cycle")
    order = [min(ends)]
    while len(order) < size:
        following = [b for b in neighbours[order[-1]] if b not in order]
        if not following:
            raise ChainPatternError("Transversal classes form more than one chain")
        order.append(following[0])

    chain = [candidates[a] for a in order]
    logger.info(f"A_{len(chain)} chain {[c.name for c in chain]}, isolated {[c.name for c in isolated]}")
    return ChainConfig(gens, chain, isolated)


@dataclass(frozen=True)
class QEvaluation:
    """Values of the quantum parameters q_1..q_m (one per contracted generator)."""
    values: Tuple[CycloNumber, ...]

    @classmethod
    def parse(cls, text: str) -> "QEvaluation":
        """Parse 'i,i,i,0' or '-1' (comma-separated cyclotomic literals)."""
        parts = split_literals(text)
        if not text.strip() or any(not p.strip() for p in parts):
            raise ParseError(f"Cannot parse quantum parameters {text!r}")
        return cls(tuple(parse_cyclo(p) for p in parts))

    @classmethod
    def zero(cls, count: int) -> "QEvaluation":
        return cls((ZERO,) * count)

    def monomial(self, sub: SubChain) -> CycloNumber:
        result = ONE
        for number in sub:
            result = result * self.values[number - 1]
        return result

    def to_json(self) -> List[str]:
        return [str(v) for v in self.values]

    def __str__(self):
        return "(" + ", ".join(str(v) for v in self.values) + ")"


def check_evaluation(cfg: ChainConfig, q: QEvaluation):
    """
    Raises:
        ParseError: Wrong number of parameters.
        UnsupportedEvaluationError: An isolated parameter is nonzero.
        PoleError: q^Gamma = 1 for some sub-chain Gamma.
    """
    if len(q.values) != cfg.parameter_count:
        raise ParseError(f"Expected {cfg.parameter_count} quantum parameter(s), got {len(q.values)}")
    for c in cfg.isolated:
        if q.values[c.number - 1]:
            raise UnsupportedEvaluationError(
                f"q{c.number} belongs to the isolated class {c.name}; only q{c.number} = 0 is supported")
    for sub in cfg.subchains():
        if q.monomial(sub) == 1:
            label = "*".join(f"q{k}" for k in sub)
            raise PoleError(f"{label} = 1 is a pole of the quantum product")


def geometric(x: CycloNumber) -> CycloNumber:
    """x / (1 - x)."""
    denominator = ONE - x
    if not denominator:
        raise PoleError(f"x/(1-x) has a pole at x = {x}")
    return x / denominator


@dataclass
class QuantumCoefficient:
    """Formal sum of c_Gamma * q^Gamma / (1 - q^Gamma) over connected sub-chains."""
    terms: Dict[SubChain, CycloNumber] = field(default_factory=dict)

    def evaluate(self, q: QEvaluation) -> CycloNumber:
        total = ZERO
        for sub, c in self.terms.items():
            total = total + c * geometric(q.monomial(sub))
        return total

    def series(self, q: QEvaluation, terms: int) -> CycloNumber:
        """Partial sum of the multiple-cover series up to degree d = terms."""
        total = ZERO
        for sub, c in self.terms.items():
            x = q.monomial(sub)
            power = ONE
            for _ in range(terms):
                power = power * x
                total = total + c * power
        return total

    def tail(self, q: QEvaluation, terms: int) -> CycloNumber:
        """Exact remainder sum_{d > terms} of the series."""
        total = ZERO
        for sub, c in self.terms.items():
            x = q.monomial(sub)
            total = total + c * x ** (terms + 1) / (ONE - x)
        return total

    def to_json(self) -> Dict[str, str]:
        return {",".join(map(str, sub)): str(c) for sub, c in sorted(self.terms.items())}


def _degree_two(alg: GradedAlgebra, v: Vector) -> bool:
    return bool(v) and alg.degrees_of(v) == {2}


def three_point(alg: GradedAlgebra, cfg: ChainConfig, a1: Vector, a2: Vector, a3: Vector) -> QuantumCoefficient:
    """Quantum part of the 3-point function; zero unless all classes have degree 2."""
    if not all(_degree_two(alg, a) for a in (a1, a2, a3)):
        return QuantumCoefficient()
    terms = {}
    for sub in cfg.subchains():
        pd = cfg.subchain_class(sub)
        c = ONE
        for a in (a1, a2, a3):
            c = c * alg.pairing(a, pd)
        if c:
            terms[sub] = c
    return QuantumCoefficient(terms)


def _correction_classes(alg: GradedAlgebra, cfg: ChainConfig) -> Dict[SubChain, Vector]:
    """Poincare dual of each sub-chain, recovered from its degree-2 intersection numbers."""
    inverse = alg.gram_inverse()
    classes = {}
    for sub in cfg.subchains():
        pd = cfg.subchain_class(sub)
        numbers = [alg.pairing({k: ONE}, pd) for k in range(alg.dim)]
        coords = inverse @ numbers
        classes[sub] = {k: c for k, c in enumerate(coords) if c}
    return classes


def quantum_algebra(alg: GradedAlgebra, cfg: ChainConfig, q: QEvaluation) -> GradedAlgebra:
    """
    H*_rho(Z)(q): classical products plus sub-chain corrections on degree-2 pairs.

    Raises:
        PoleError: q^Gamma = 1 for a sub-chain.
        UnsupportedEvaluationError: An isolated parameter is nonzero.
    """
    check_evaluation(cfg, q)
    factors = {sub: geometric(q.monomial(sub)) for sub in cfg.subchains()}
    factors = {sub: f for sub, f in factors.items() if f}
    if not factors:
        return alg.with_table(alg.table, name='quantum')

    corrections = _correction_classes(alg, cfg)
    degree_two = [k for k, d in enumerate(alg.degrees) if d == 2]
    integrals = {sub: {k: alg.pairing({k: ONE}, cfg.subchain_class(sub)) for k in degree_two}
                 for sub in factors}
    table = dict(alg.table)
    for a, i in enumerate(degree_two):
        for j in degree_two[a:]:
            product = alg.product(i, j)
            for sub, f in factors.items():
                weight = integrals[sub][i] * integrals[sub][j] * f
                if weight:
                    product = add_vectors(product, scale_vector(corrections[sub], weight))
            if product:
                table[(i, j)] = table[(j, i)] = product
            else:
                table.pop((i, j), None)
                table.pop((j, i), None)
    logger.debug(f"Quantum algebra at q = {q}: {len(factors)} active sub-chain(s)")
    return alg.with_table(table, name='quantum')


@dataclass
class SymbolicEntry:
    classical: CycloNumber
    quantum: Dict[SubChain, CycloNumber]

    def to_json(self) -> dict:
        return {
            "classical": str(self.classical),
            "quantum": {",".join(map(str, sub)): str(c) for sub, c in sorted(self.quantum.items())},
        }


def symbolic_product(alg: GradedAlgebra, cfg: ChainConfig, a: Vector, b: Vector) -> Dict[str, SymbolicEntry]:
    """
    a *_rho b as {basis label: classical coefficient + sum_Gamma c_Gamma q^Gamma/(1-q^Gamma)}.

    Only labels with a nonzero classical or quantum part are listed, in basis order.
    """
    classical = alg.multiply(a, b)
    quantum: Dict[int, Dict[SubChain, CycloNumber]] = {}
    if _degree_two(alg, a) and _degree_two(alg, b):
        for sub in cfg.subchains():
            pd = cfg.subchain_class(sub)
            weight = alg.pairing(a, pd) * alg.pairing(b, pd)
            if not weight:
                continue
            for k, c in pd.items():
                quantum.setdefault(k, {})[sub] = weight * c
    table = {}
    for k in sorted(set(classical) | set(quantum)):
        table[alg.labels[k]] = SymbolicEntry(classical.get(k, ZERO), quantum.get(k, {}))
    return table


def symbolic_table(alg: GradedAlgebra, cfg: ChainConfig) -> Dict[str, Dict[str, SymbolicEntry]]:
    """Symbolic products of all pairs of degree-2 generators except h."""
    names = [v for v in alg.generators if v != 'h' and alg.degrees_of(alg.generator(v)) == {2}]
    names.sort(key=lambda v: (len(v), v))
    table = {}
    for a, x in enumerate(names):
        for y in names[a:]:
            table[f"{x}*{y}"] = symbolic_product(alg, cfg, alg.generator(x), alg.generator(y))
    return table

