# models/report.py - What a density run reports

from typing import List, Optional

from pydantic import BaseModel, Field

from ffdensity.constants import CHAIN_LABEL


class ChainPointReport(BaseModel):
    """One chain point: the exact hit count over L(D)^d or over the samples drawn"""

    chain_index: int
    divisor: str = Field(..., description="D in divisor text format")
    degree: int = Field(..., ge=0, description="deg D")
    ell: int = Field(..., ge=1, description="l(D) = deg D + 1")
    hits: int = Field(..., ge=0)
    total: int = Field(..., ge=1, description="q^(l(D) d) or the sample count")
    ratio: str = Field(..., description="hits/total as num/den")
    ratio_float: float = Field(..., description="Convenience only")
    std_error: Optional[float] = Field(default=None, description="Binomial standard error, sample mode")
    reference: Optional[str] = None
    gap: Optional[str] = Field(default=None, description="|ratio - reference| as num/den")


class DensityReport(BaseModel):
    predicate: str
    spec: str
    mode: str
    arity: int
    seed: Optional[int] = None
    schedule: str = CHAIN_LABEL
    reference: Optional[str] = None
    points: List[ChainPointReport] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)


class ConvergenceSummary(BaseModel):
    """Gaps to the reference along the chain"""

    reference: Optional[str] = None
    gaps: List[str] = Field(default_factory=list)
    gap_floats: List[float] = Field(default_factory=list)
    final_gap: Optional[str] = None
    eventually_monotone: Optional[bool] = Field(
        default=None, description="Gaps nonincreasing over the last chain points; None for an empty chain"
    )
