# app/domain/models/report.py
from enum import Enum
from typing import Dict, Optional, Tuple

from pydantic import BaseModel, Field


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


class Witness(BaseModel):
    """
    Replayable counterexample. `start` and the configurations are in the text
    format; `steps` are `i j transition-index` triples (1-based) over
    `protocol` ("source" or "target"), applied in order from `start`.
    """
    description: str
    input: Optional[Tuple[str, ...]] = None
    protocol: str = "target"
    start: Optional[str] = None
    steps: Tuple[str, ...] = ()
    expected: Optional[str] = None
    found: Optional[str] = None

    model_config = {"frozen": True}  # immutable = safe


class VerificationReport(BaseModel):
    check: str
    params: Dict[str, str] = Field(default_factory=dict)
    verdict: Verdict
    checked: int = 0                    # number of configurations / steps / inputs examined
    witness: Optional[Witness] = None
    note: Optional[str] = None

    model_config = {"frozen": True}

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS
