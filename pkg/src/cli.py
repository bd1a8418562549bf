#!/usr/bin/env python3
"""
Command-line front end: Gorenstein weights, crepant resolutions, toric and
Chen-Ruan cohomology, quantum corrections and isomorphism checks.

Reports are JSON on stdout (sorted keys, stable ordering); logs go to stderr.
Exit codes: 0 success or verification pass, 1 verification fail, 2 usage or
validation error.
"""

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, fields
from itertools import product
from pathlib import Path
from typing import List, Optional, Tuple

import yaml

from chenruan import cr_algebra, cr_betti
from errors import ConfigError, ParseError, RelationViolationError, ToolkitError, UnsupportedFamilyError
from exact import CycloNumber, root_of_unity, split_literals
from isocheck import GeneratorMap, builtin_map, extend_map, orient, scan_evaluations, verify_iso, verify_isometry
from qcorr import ChainConfig, QEvaluation, quantum_algebra, symbolic_table, validate_chain
from settings import get_cyclo_order_override, setup_logging
from toricring import ToricCohomology, curve_classes_and_mrho, intersection_matrix, toric_cohomology
from wps import (
    Weights,
    builtin_resolution,
    enumerate_gorenstein,
    is_gorenstein,
    is_well_formed,
    load_rays,
    resolve,
    twisted_sectors,
    validate_resolution,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_ERROR = 2

COMMANDS = ('gorenstein', 'sectors', 'resolve', 'cohomology', 'chenruan',
            'quantum', 'mrho', 'verify-iso', 'scan')


@dataclass
class RunConfig:
    """One CLI invocation; round-trips through JSON."""
    command: str
    weights: Optional[str] = None
    rays: Optional[str] = None
    q: Optional[str] = None
    map: Optional[str] = None
    format: str = 'json'
    action: Optional[str] = None
    dim: Optional[int] = None
    candidates: Optional[str] = None
    roots: int = 4

    def to_json(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    @classmethod
    def from_json(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"Unknown run config keys: {', '.join(unknown)}")
        if data.get('command') not in COMMANDS:
            raise ConfigError(f"Unknown command {data.get('command')!r}; expected one of {', '.join(COMMANDS)}")
        return cls(**data)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        values = {f.name: getattr(args, f.name, None) for f in fields(cls)}
        values = {k: v for k, v in values.items() if v is not None}
        return cls(**values)


def make_encoder():
    """Encoder for cyclotomic values honouring the WPS_CYCLO_ORDER diagnostic override."""
    override = get_cyclo_order_override()

    def encode(x: CycloNumber):
        if override and override % x.order == 0:
            return x.to_json(override)
        if override:
            logger.warning(f"WPS_CYCLO_ORDER={override} is not a multiple of {x.order}; keeping order {x.order}")
        return str(x)

    return encode


def render(report: dict, fmt: str) -> str:
    if fmt == 'text':
        return yaml.safe_dump(report, sort_keys=True, allow_unicode=True, default_flow_style=False)
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _weights(config: RunConfig) -> Weights:
    if not config.weights:
        raise ParseError(f"'{config.command}' needs --weights")
    return Weights.parse(config.weights)


def _fans(config: RunConfig, w: Weights):
    if config.rays:
        return resolve(w, load_rays(Path(config.rays)))
    return builtin_resolution(w)


def _cohomology(config: RunConfig, w: Weights) -> ToricCohomology:
    original, refined = _fans(config, w)
    return toric_cohomology(w, original, refined)


def _chain(tc: ToricCohomology) -> ChainConfig:
    classes = curve_classes_and_mrho(tc.original, tc.refined, tc.algebra, tc.ray_vectors)
    return validate_chain(tc.algebra, classes)


def _evaluation(text: Optional[str], cfg: ChainConfig) -> QEvaluation:
    if text is None:
        return QEvaluation.zero(cfg.parameter_count)
    return QEvaluation.parse(text)


def _map(config: RunConfig, w: Weights) -> GeneratorMap:
    if config.map:
        return GeneratorMap.load(Path(config.map))
    return builtin_map(w)


def _candidates(config: RunConfig, cfg: ChainConfig) -> List[QEvaluation]:
    """Explicit ';'-separated list, or all roots of unity of order --roots on the chain parameters."""
    if config.candidates is not None:
        return [QEvaluation.parse(part) for part in split_literals(config.candidates, ';') if part.strip()]
    roots = [root_of_unity(k, config.roots) for k in range(config.roots)]
    chain = [c.number for c in cfg.chain]
    result = []
    for choice in product(roots, repeat=len(chain)):
        values = [CycloNumber.rational(0)] * cfg.parameter_count
        for number, value in zip(chain, choice):
            values[number - 1] = value
        result.append(QEvaluation(tuple(values)))
    return result


def cmd_gorenstein(config: RunConfig, encode) -> Tuple[dict, int]:
    if config.action == 'enumerate':
        if config.dim is None:
            raise ParseError("'gorenstein enumerate' needs --dim")
        found = enumerate_gorenstein(config.dim)
        return {"dim": config.dim, "count": len(found), "weights": [list(w.values) for w in found]}, EXIT_OK
    w = _weights(config)
    gorenstein = is_gorenstein(w)
    report = {"weights": list(w.values), "gorenstein": gorenstein, "well_formed": is_well_formed(w)}
    return report, EXIT_OK if gorenstein else EXIT_FAIL


def cmd_sectors(config: RunConfig, encode) -> Tuple[dict, int]:
    w = _weights(config)
    return {"weights": list(w.values), "sectors": [s.to_json() for s in twisted_sectors(w)]}, EXIT_OK


def cmd_resolve(config: RunConfig, encode) -> Tuple[dict, int]:
    w = _weights(config)
    original, refined = _fans(config, w)
    report = validate_resolution(original, refined, w)
    return {
        "weights": list(w.values),
        "original": original.to_json(),
        "refined": refined.to_json(),
        "validation": report.to_json(),
    }, EXIT_OK if report.ok else EXIT_FAIL


def cmd_cohomology(config: RunConfig, encode) -> Tuple[dict, int]:
    w = _weights(config)
    return _cohomology(config, w).to_json(encode), EXIT_OK


def cmd_chenruan(config: RunConfig, encode) -> Tuple[dict, int]:
    w = _weights(config)
    report = {
        "weights": list(w.values),
        "sectors": [s.to_json() for s in twisted_sectors(w)],
        "betti": cr_betti(w).to_json(),
    }
    try:
        report["algebra"] = cr_algebra(w).to_json(encode)
    except UnsupportedFamilyError as e:
        # ring structure needs a presentation; additive data stands alone
        logger.info(f"No Chen-Ruan presentation for {w}: {e}")
    return report, EXIT_OK


def cmd_quantum(config: RunConfig, encode) -> Tuple[dict, int]:
    w = _weights(config)
    tc = _cohomology(config, w)
    cfg = _chain(tc)
    report = {"weights": list(w.values), "chain": cfg.to_json()}
    if config.q is None:
        report["symbolic"] = {
            pair: {label: entry.to_json() for label, entry in entries.items()}
            for pair, entries in symbolic_table(tc.algebra, cfg).items()
        }
    else:
        q = QEvaluation.parse(config.q)
        report["q"] = q.to_json()
        report["algebra"] = quantum_algebra(tc.algebra, cfg, q).to_json(encode)
    return report, EXIT_OK


def cmd_mrho(config: RunConfig, encode) -> Tuple[dict, int]:
    w = _weights(config)
    tc = _cohomology(config, w)
    classes = curve_classes_and_mrho(tc.original, tc.refined, tc.algebra, tc.ray_vectors)
    cfg = validate_chain(tc.algebra, classes)
    matrix = intersection_matrix(classes, tc.algebra, tc.exceptional)
    return {
        "weights": list(w.values),
        "classes": [c.to_json(tc.algebra) for c in classes],
        "intersections": {
            "divisors": list(tc.divisors.variables[1:]),
            "rows": [[str(x) for x in row] for row in matrix],
        },
        "chain": cfg.to_json(),
    }, EXIT_OK


def cmd_verify_iso(config: RunConfig, encode) -> Tuple[dict, int]:
    w = _weights(config)
    tc = _cohomology(config, w)
    cfg = _chain(tc)
    q = _evaluation(config.q, cfg)
    quantum = quantum_algebra(tc.algebra, cfg, q)
    g = _map(config, w)
    src, dst = orient(g, quantum, cr_algebra(w))
    report = {"weights": list(w.values), "q": q.to_json(), "map": g.to_json(encode)}
    try:
        matrix = extend_map(src, dst, g)
    except RelationViolationError as e:
        report["relation_violation"] = {"relation": e.relation, "message": str(e)}
        return report, EXIT_FAIL
    iso = verify_iso(src, dst, matrix)
    isometry = verify_isometry(src, dst, matrix)
    report.update({
        "matrix": [[encode(x) for x in row] for row in matrix.rows()],
        "iso": iso.to_json(),
        "isometry": isometry.to_json(),
    })
    return report, EXIT_OK if iso.passed else EXIT_FAIL


def cmd_scan(config: RunConfig, encode) -> Tuple[dict, int]:
    w = _weights(config)
    tc = _cohomology(config, w)
    cfg = _chain(tc)
    g = _map(config, w)
    results = scan_evaluations(cr_algebra(w), tc.algebra, cfg, _candidates(config, cfg), g)
    passing = [r.candidate.to_json() for r in results if r.passed]
    report = {
        "weights": list(w.values),
        "results": [r.to_json() for r in results],
        "passing": passing,
    }
    return report, EXIT_OK if passing else EXIT_FAIL


HANDLERS = {
    'gorenstein': cmd_gorenstein,
    'sectors': cmd_sectors,
    'resolve': cmd_resolve,
    'cohomology': cmd_cohomology,
    'chenruan': cmd_chenruan,
    'quantum': cmd_quantum,
    'mrho': cmd_mrho,
    'verify-iso': cmd_verify_iso,
    'scan': cmd_scan,
}


def run(config: RunConfig) -> Tuple[dict, int]:
    """Execute one command; ToolkitError propagates to the caller."""
    handler = HANDLERS[config.command]
    report, code = handler(config, make_encoder())
    report["command"] = config.command if not config.action else f"{config.command} {config.action}"
    return report, code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='wps',
        description='Crepant resolutions, Chen-Ruan cohomology and quantum corrections of weighted projective spaces',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Gorenstein weight systems of dimension 3
  python3 src/cli.py gorenstein enumerate --dim 3

  # Cohomology ring of the crepant resolution of P(1,3,4,4)
  python3 src/cli.py cohomology --weights 1,3,4,4

  # Quantum corrected product at q = (i,i,i,0)
  python3 src/cli.py quantum --weights 1,3,4,4 --q i,i,i,0

  # Check the ring isomorphism with the Chen-Ruan cohomology
  python3 src/cli.py verify-iso --weights 1,3,4,4 --q i,i,i,0 --map fixtures/ri.json

  # Scan 4th roots of unity for P(1,1,2,2)
  python3 src/cli.py scan --weights 1,1,2,2 --roots 4
        """
    )
    parser.add_argument('--format', choices=['json', 'text'], default='json',
                        help='Report format (default: json; text renders the same report as YAML)')
    subparsers = parser.add_subparsers(dest='command', required=True)

    def add(name, help_text, weights=True, rays=False, q=False, map_file=False):
        sub = subparsers.add_parser(name, help=help_text)
        if weights:
            sub.add_argument('--weights', required=True, help='Comma-separated weights, e.g. 1,3,4,4')
        if rays:
            sub.add_argument('--rays', help='JSON file {"rays": [[...], ...]} (default: built-in subdivision)')
        if q:
            sub.add_argument('--q', help='Comma-separated quantum parameters, e.g. i,i,i,0')
        if map_file:
            sub.add_argument('--map', help='Generator map JSON file (default: built-in map)')
        return sub

    gorenstein = subparsers.add_parser('gorenstein', help='Check or enumerate Gorenstein weights')
    gorenstein.add_argument('action', choices=['check', 'enumerate'])
    gorenstein.add_argument('--weights', help='Weights to check')
    gorenstein.add_argument('--dim', type=int, help='Dimension to enumerate')

    add('sectors', 'Twisted sectors and their ages')
    add('resolve', 'Build and validate the crepant resolution', rays=True)
    add('cohomology', 'Cohomology ring of the resolution', rays=True)
    add('chenruan', 'Chen-Ruan Betti numbers and ring')
    add('quantum', 'Quantum corrected product (symbolic without --q)', rays=True, q=True)
    add('mrho', 'Contracted curve classes and the chain pattern', rays=True)
    add('verify-iso', 'Verify a ring isomorphism and isometry', rays=True, q=True, map_file=True)
    scan = add('scan', 'Scan candidate evaluations with a generator map', rays=True, map_file=True)
    scan.add_argument('--candidates', help="';'-separated evaluations, e.g. 'i,i,i,0;-i,-i,-i,0'")
    scan.add_argument('--roots', type=int, default=4,
                      help='Without --candidates: try all roots of unity of this order (default: 4)')
    return parser


def main(argv: List[str] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_ERROR

    setup_logging(args.command)
    config = RunConfig.from_args(args)
    try:
        report, code = run(config)
    except ToolkitError as e:
        sys.stdout.write(render({"error": e.to_json()}, config.format))
        print(f"Error [{e.code}]: {e}", file=sys.stderr)
        return EXIT_ERROR
    sys.stdout.write(render(report, config.format))
    return code


if __name__ == '__main__':
    sys.exit(main())
