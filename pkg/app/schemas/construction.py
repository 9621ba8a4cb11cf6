# app/schemas/construction.py
from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, TypeAdapter, model_validator
from typing_extensions import Annotated

from app.core.config import settings
from app.exceptions.construction import InadmissibleExponentError, InvalidConstructionError
from .lp_space import PExponent


class Variant(str, Enum):
    THM13 = "thm13"   # bounded, separately but not jointly continuous
    THM14 = "thm14"   # bounded, not separately continuous
    THM15 = "thm15"   # neither bounded nor separately continuous
    CUSTOM = "custom"


class PowerAmplitude(BaseModel):
    """A_q = coefficient * q^(-q_exponent) * C_q^(-modulus_exponent)."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["power"] = "power"
    coefficient: PositiveFloat = 1.0
    q_exponent: float = 0.0
    modulus_exponent: float = 0.0


class TableAmplitude(BaseModel):
    """Explicit A_1..A_N; limits of such sequences are not decidable."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["table"] = "table"
    values: List[PositiveFloat] = Field(..., min_length=1)


class GeometricWeights(BaseModel):
    """beta_q = (1 - ratio) ratio^(q-1) / 2; ratio = 1/2 gives 2^(-q-1)."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["geometric"] = "geometric"
    ratio: float = Field(0.5, gt=0.0, lt=1.0)


class TelescopingWeights(BaseModel):
    """beta_q = (q^(-b) - (q+1)^(-b)) / 2."""
    model_config = ConfigDict(frozen=True)

    kind: Literal["telescoping"] = "telescoping"
    b: PositiveFloat


AmplitudeRule = Annotated[Union[PowerAmplitude, TableAmplitude], Field(discriminator="kind")]
WeightRule = Annotated[Union[GeometricWeights, TelescopingWeights], Field(discriminator="kind")]

_amplitude_adapter = TypeAdapter(AmplitudeRule)
_weight_adapter = TypeAdapter(WeightRule)


def admissibility_bound(p: float) -> float:
    """Lower bound 2(1-p)/p that b must strictly exceed."""
    return 2.0 * (1.0 - p) / p


def default_b(p: float) -> float:
    return admissibility_bound(p) + 1.0


def _derived_rules(variant: Variant, b: Optional[float]) -> Tuple[PowerAmplitude, Union[GeometricWeights, TelescopingWeights]]:
    if variant == Variant.THM13:
        return PowerAmplitude(modulus_exponent=1.0), TelescopingWeights(b=b)
    if variant == Variant.THM14:
        return PowerAmplitude(modulus_exponent=1.0), GeometricWeights(ratio=0.5)
    return PowerAmplitude(modulus_exponent=0.5), GeometricWeights(ratio=0.5)


class ConstructionSpec(BaseModel):
    """Exponent, variant and limits fixing one tent-sum construction."""
    model_config = ConfigDict(frozen=True, use_enum_values=False)

    p: PExponent = settings.DEFAULT_P
    variant: Variant = Variant(settings.DEFAULT_VARIANT)
    b: Optional[PositiveFloat] = None
    q_cap: int = Field(settings.DEFAULT_Q_CAP, ge=1)
    tol: float = Field(settings.DEFAULT_TOL, gt=0.0, lt=1.0)
    amplitude: Optional[AmplitudeRule] = None
    weights: Optional[WeightRule] = None

    @model_validator(mode='before')
    @classmethod
    def resolve_variant(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        variant = Variant(data.get("variant", settings.DEFAULT_VARIANT))
        p = float(data.get("p", settings.DEFAULT_P))
        if not 0.0 < p <= 1.0:
            return data  # the field constraint reports it

        if variant == Variant.CUSTOM:
            if data.get("amplitude") is None or data.get("weights") is None:
                raise InvalidConstructionError("variant 'custom' needs both an amplitude rule and a weights rule.")
            if data.get("b") is not None:
                raise InvalidConstructionError("b only parametrises variant 'thm13'; put it in a telescoping weights rule.")
            return data

        b = data.get("b")
        if variant == Variant.THM13:
            b = default_b(p) if b is None else float(b)
            if b <= admissibility_bound(p):
                raise InadmissibleExponentError(b=b, p=p)
            data["b"] = b
        elif b is not None:
            raise InvalidConstructionError(f"b only parametrises variant 'thm13', not '{variant.value}'.")

        amplitude, weights = _derived_rules(variant, b)
        for key, derived, adapter in (("amplitude", amplitude, _amplitude_adapter), ("weights", weights, _weight_adapter)):
            given = data.get(key)
            if given is not None:
                given = adapter.validate_python(given.model_dump() if isinstance(given, BaseModel) else given)
                if given != derived:
                    raise InvalidConstructionError(f"variant '{variant.value}' fixes its {key} rule; use variant 'custom' to change it.")
            data[key] = derived
        return data

    @model_validator(mode='after')
    def validate_table_length(self) -> "ConstructionSpec":
        if isinstance(self.amplitude, TableAmplitude) and len(self.amplitude.values) < self.q_cap:
            raise InvalidConstructionError(
                f"an amplitude table needs at least q_cap={self.q_cap} values, got {len(self.amplitude.values)}."
            )
        return self

    def to_config(self) -> Dict[str, Any]:
        """JSON-style config {p, variant, b, q_cap, tol} (+ rules for custom)."""
        config: Dict[str, Any] = {
            "p": self.p,
            "variant": self.variant.value,
            "b": self.b,
            "q_cap": self.q_cap,
            "tol": self.tol,
        }
        if self.variant == Variant.CUSTOM:
            config["amplitude"] = self.amplitude.model_dump(mode="json")
            config["weights"] = self.weights.model_dump(mode="json")
        return config


class TentInterval(BaseModel):
    """I_k = [t_{k-1}, t_k) with midpoint c_k and length lambda_k."""
    model_config = ConfigDict(frozen=True)

    k: int = Field(..., ge=1)
    left: float
    right: float
    midpoint: float
    length: PositiveFloat


class ConstructionSummary(BaseModel):
    config: Dict[str, Any]
    admissibility_bound: Optional[float] = None
    beta_sum: float
    lambda_total: float
    amplitude_exponent: Optional[float] = None
    integrability_partial_sum: float
    integrability_tail_bound: Optional[float] = None
