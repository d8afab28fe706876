# conftest.py
# Shared fixtures: backends, classical functionals and OPS, spec-file writers.

from fractions import Fraction

import pytest
import yaml
from hypothesis import settings

from coherent.functional import hermite_functional, laguerre_functional
from coherent.ops_logic import hermite_ops, laguerre_ops
from coherent.scalars import EXACT, FloatField

settings.register_profile("coherent", max_examples=50, deadline=None)
settings.load_profile("coherent")


@pytest.fixture
def exact():
    return EXACT


@pytest.fixture
def float128():
    return FloatField(128, "1e-15")


@pytest.fixture
def hermite_u():
    return hermite_functional(60)


@pytest.fixture
def hermite_P():
    return hermite_ops(24)


@pytest.fixture
def laguerre0_u():
    return laguerre_functional(Fraction(0), 40)


@pytest.fixture
def laguerre0_P():
    return laguerre_ops(Fraction(0), 16)


@pytest.fixture
def coherent_home(tmp_path, monkeypatch):
    home = tmp_path / "home"
    monkeypatch.setenv("COHERENT_HOME", str(home))
    return home


@pytest.fixture
def spec_file(tmp_path):
    """Writes a functional spec and returns its path."""
    counter = {"n": 0}

    def write(spec: dict) -> str:
        counter["n"] += 1
        path = tmp_path / f"spec_{counter['n']}.yaml"
        path.write_text(yaml.dump(spec, default_flow_style=False))
        return str(path)

    return write
