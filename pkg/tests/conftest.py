import pytest

from piforge.units import UnitRegistry

from support import FIXTURES


@pytest.fixture(scope="session")
def registry() -> UnitRegistry:
    return UnitRegistry.load(FIXTURES / "registry.json")
