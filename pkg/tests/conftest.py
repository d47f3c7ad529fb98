from pathlib import Path

import pytest

from pipeforge.catalog import load_catalog

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"

GO_SERVICE = FIXTURES / "repos" / "go-service"
PYTHON_LIB = FIXTURES / "repos" / "python-lib"
INFRA = FIXTURES / "repos" / "infra"
CATALOG_ROOT = FIXTURES / "catalog"
BROKEN_CATALOGS = FIXTURES / "broken-catalogs"


@pytest.fixture(scope="session")
def catalog():
    return load_catalog(CATALOG_ROOT, "1.0")


@pytest.fixture
def go_service():
    return GO_SERVICE


@pytest.fixture
def python_lib():
    return PYTHON_LIB


@pytest.fixture
def infra():
    return INFRA
