import math
from typing import Any, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

UNLIMITED_TOKENS = {"inf", "infinity", "unlimited", "none", "no horizon"}


def parse_horizon(value: Any) -> Optional[float]:
    """
    Normalise a horizon value; ``None`` stands for Unlimited.

    Accepts numbers, numeric strings and the tokens ``inf``/``unlimited``/``none``.
    """
    if value is None:
        return None
    if isinstance(value, str):
        token = value.strip().lower()
        if token in UNLIMITED_TOKENS:
            return None
        value = float(token)
    value = float(value)
    if math.isinf(value) and value > 0:
        return None
    if math.isnan(value):
        raise ValueError("horizon must be a number")
    return value


def format_horizon(horizon: Optional[float]) -> str:
    return "inf" if horizon is None else f"{horizon:g}"


class AdaptiveParams(BaseModel):
    """Queue-driven horizon controller settings."""

    q_up: float = Field(default=10, ge=0)
    q_down: float = Field(default=2, ge=0)
    step: float = Field(default=0.5, gt=0)
    h_min: float = Field(default=0.5, ge=0)
    h_max: float = Field(default=1.5, ge=0)
    period: float = Field(default=300.0, gt=0)

    @model_validator(mode="after")
    def check_bands(self) -> "AdaptiveParams":
        if self.h_min > self.h_max:
            raise ValueError(f"h_min {self.h_min} exceeds h_max {self.h_max}")
        if not self.q_down < self.q_up:
            raise ValueError(f"q_down {self.q_down} must be below q_up {self.q_up}")
        return self


class ManagementParams(BaseModel):
    """Coefficients and thresholds of the empty-vehicle target function."""

    horizon: Optional[float] = None
    w_standing: float = 1.0
    w_dist: float = 1.0
    w_queue: float = 1.0
    w_inbound: float = 0.5
    w_berth: float = 1.0
    theta_call: int = Field(default=1, ge=1)
    theta_surplus: int = Field(default=4, ge=0)
    theta_deficit: int = Field(default=1, ge=0)
    tick_period: float = Field(default=10.0, gt=0)
    balance_period: float = Field(default=60.0, gt=0)
    adaptive: Optional[AdaptiveParams] = None

    @field_validator("horizon", mode="before")
    @classmethod
    def normalise_horizon(cls, value: Any) -> Optional[float]:
        horizon = parse_horizon(value)
        if horizon is not None and horizon < 0:
            raise ValueError(f"horizon must be nonnegative, got {horizon}")
        return horizon

    @field_validator("w_standing", "w_dist", "w_queue", "w_inbound", "w_berth")
    @classmethod
    def check_finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("weights must be finite")
        return value

    @model_validator(mode="after")
    def check_thresholds(self) -> "ManagementParams":
        if self.theta_deficit > self.theta_surplus:
            raise ValueError(
                f"theta_deficit {self.theta_deficit} exceeds theta_surplus {self.theta_surplus}"
            )
        return self
