"""Shared fixtures: src/ on sys.path and the expensive built-in algebras, built once per session."""

import logging
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(ROOT / 'src'))

from chenruan import cr_algebra  # noqa: E402
from qcorr import validate_chain  # noqa: E402
from toricring import curve_classes_and_mrho, toric_cohomology  # noqa: E402
from wps import Weights, builtin_resolution  # noqa: E402

FIXTURES = ROOT / 'fixtures'
GOLDEN = Path(__file__).parent / 'golden'


class Resolved:
    """Toric cohomology, contracted classes and chain of one built-in family."""

    def __init__(self, text: str):
        self.weights = Weights.parse(text)
        original, refined = builtin_resolution(self.weights)
        self.cohomology = toric_cohomology(self.weights, original, refined)
        self.algebra = self.cohomology.algebra
        self.classes = curve_classes_and_mrho(original, refined, self.algebra, self.cohomology.ray_vectors)
        self.chain = validate_chain(self.algebra, self.classes)
        self.cr = cr_algebra(self.weights)


@pytest.fixture(scope='session')
def p1122() -> Resolved:
    return Resolved("1,1,2,2")


@pytest.fixture(scope='session')
def p1344() -> Resolved:
    return Resolved("1,3,4,4")


@pytest.fixture(scope='session')
def resolved():
    cache = {}

    def get(text: str) -> Resolved:
        if text not in cache:
            cache[text] = Resolved(text)
        return cache[text]

    return get


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def golden_dir() -> Path:
    return GOLDEN


@pytest.fixture(autouse=True)
def _clean_environment(monkeypatch):
    for name in ('WPS_CYCLO_ORDER', 'WPS_LOG_DIR', 'WPS_LOG_LEVEL', 'WPS_FAMILIES_FILE', 'WPS_SERIES_TERMS'):
        monkeypatch.delenv(name, raising=False)
    root = logging.getLogger()
    handlers = list(root.handlers)
    level = root.level
    yield
    root.handlers = handlers
    root.setLevel(level)
