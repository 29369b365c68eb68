import os

import pytest
from hypothesis import HealthCheck, settings

from mixsig.core import Signature, lattice_from_rows
from mixsig.numberfield import build_lattice, load_catalog

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def catalog():
    return {spec.label: spec for spec in load_catalog()}


@pytest.fixture(scope="session")
def field_lattices(catalog):
    return {label: build_lattice(spec) for label, spec in catalog.items()}


@pytest.fixture(scope="session")
def gaussian(field_lattices):
    return field_lattices["Q(i)"].lattice


@pytest.fixture(scope="session")
def eisenstein(field_lattices):
    return field_lattices["Q(sqrt-3)"].lattice


@pytest.fixture(scope="session")
def zsqrt2(field_lattices):
    return field_lattices["Q(sqrt2)"].lattice


def integer_lattice(n, r=None):
    r = n if r is None else r
    sig = Signature(r, (n - r) // 2)
    return lattice_from_rows(sig, [[int(i == j) for j in range(n)] for i in range(n)])
