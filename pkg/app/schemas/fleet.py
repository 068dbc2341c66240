from typing import Dict, Optional

from pydantic import BaseModel, Field, field_validator


class FleetSection(BaseModel):
    size: Optional[int] = Field(default=None, ge=0, description="None means 3 vehicles per station")
    capacity: int = Field(default=4, ge=1)
    speed: float = Field(default=10.0, gt=0, description="cruise speed, m/s")
    boarding_time: float = Field(default=20.0, ge=0)
    alighting_time: float = Field(default=20.0, ge=0)
    placement: Optional[Dict[str, int]] = None

    @field_validator("placement")
    @classmethod
    def check_placement(cls, value: Optional[Dict[str, int]]) -> Optional[Dict[str, int]]:
        if value is not None and any(count < 0 for count in value.values()):
            raise ValueError("placement counts must be nonnegative")
        return value
