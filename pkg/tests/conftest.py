import pytest

from app.schemas.construction import ConstructionSpec
from app.services.average import AverageService
from app.services.construction import ConstructionService
from app.services.diagnostics import DiagnosticsService

BANACH_CONTROL = {
    "p": 1.0,
    "variant": "custom",
    "amplitude": {"kind": "power", "q_exponent": 1.0},
    "weights": {"kind": "geometric", "ratio": 0.5},
}


def build(**kwargs) -> ConstructionService:
    return ConstructionService(ConstructionSpec(**kwargs))


@pytest.fixture
def make_construction():
    return build


@pytest.fixture
def thm13() -> ConstructionService:
    return build(p=0.5, variant="thm13")


@pytest.fixture
def thm14() -> ConstructionService:
    return build(p=0.5, variant="thm14")


@pytest.fixture
def thm15() -> ConstructionService:
    return build(p=0.5, variant="thm15")


@pytest.fixture
def banach() -> ConstructionService:
    return build(**BANACH_CONTROL)


@pytest.fixture(params=["thm13", "thm14", "thm15"])
def variant(request) -> ConstructionService:
    return build(p=0.5, variant=request.param)


@pytest.fixture
def averages():
    return lambda construction: AverageService(construction)


@pytest.fixture
def diagnostics():
    return lambda construction: DiagnosticsService(construction)
