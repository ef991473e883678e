import sys
from pathlib import Path

import pytest

# Add the project root directory to Python path
project_root = str(Path(__file__).parent)
sys.path.append(project_root)

from app.algebra import CoefficientDomain, Ideal, RingContext, parse_poly  # noqa: E402
from app.config import get_settings  # noqa: E402
from app.services import build_services  # noqa: E402

CORPUS_DIR = Path(project_root) / "corpus"


def ring(names, p=2, domain=None):
    """ℤ-context by default; pass a domain for 𝔽_p or ℚ"""
    return RingContext(
        tuple(names.split()) if isinstance(names, str) else tuple(names),
        domain or CoefficientDomain.integers(),
        prime=p,
    )


def poly(text, ctx):
    return parse_poly(text, ctx)


def ideal(texts, ctx):
    return Ideal.parse(texts, ctx)


def assert_bases_verified(engine):
    """Every basis the engine produced passes the S-pair (and G-pair) check"""
    bases = engine.cached_bases()
    assert bases
    for G in bases:
        assert engine.verify_basis(G), G.format()


@pytest.fixture
def services():
    return build_services(get_settings())


@pytest.fixture
def ideals(services):
    return services.ideals


@pytest.fixture
def engine(services):
    return services.engine


@pytest.fixture
def zz2():
    return ring("X Y Z W", 2)


@pytest.fixture
def gf2():
    return ring("X Y Z W", 2, CoefficientDomain.prime_field(2))


@pytest.fixture
def corpus_dir():
    return CORPUS_DIR
