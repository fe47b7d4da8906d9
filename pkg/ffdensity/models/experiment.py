# models/experiment.py - What a density experiment asks for

from typing import List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from ffdensity.constants import (
    MODE_EXHAUSTIVE,
    MODE_SAMPLE,
    PREDICATE_CONGRUENCE,
    PREDICATE_NAMES,
    PREDICATE_RAMIFIED,
    PREDICATE_UNIMODULAR,
)


class PredicateSpec(BaseModel):
    """A named predicate on d-tuples of H_S together with its parameters"""

    name: str = Field(..., description="in_U_P_some_place | unimodular | custom_congruence")

    # in_U_P_some_place
    n: Optional[int] = Field(default=None, ge=2, description="Nominal polynomial degree")
    t_scan: Optional[int] = Field(default=None, ge=1, description="Largest place degree scanned")

    # unimodular
    k: Optional[int] = Field(default=None, ge=1, description="Matrix rows")
    m: Optional[int] = Field(default=None, ge=2, description="Matrix columns")

    # custom_congruence
    f: Optional[str] = Field(default=None, description="Expression in the coordinates a0, a1, ...")
    g: Optional[str] = Field(default=None, description="Second expression in the coordinates")
    t: Optional[int] = Field(default=None, ge=0, description="Only places of degree > t count")
    t_max: Optional[int] = Field(default=None, ge=1, description="Only places of degree <= t_max count")
    d: Optional[int] = Field(default=None, ge=1, description="Tuple arity")

    @field_validator("name")
    @classmethod
    def _known_name(cls, value: str) -> str:
        if value not in PREDICATE_NAMES:
            raise ValueError(f"Unknown predicate {value!r}; expected one of {', '.join(PREDICATE_NAMES)}")
        return value

    @model_validator(mode="after")
    def _parameters_present(self) -> "PredicateSpec":
        required = {
            PREDICATE_RAMIFIED: ("n", "t_scan"),
            PREDICATE_UNIMODULAR: ("k", "m"),
            PREDICATE_CONGRUENCE: ("f", "g", "t", "d"),
        }[self.name]
        missing = [key for key in required if getattr(self, key) is None]
        if missing:
            raise ValueError(f"Predicate {self.name} needs {', '.join(missing)}")
        if self.name == PREDICATE_UNIMODULAR and self.k >= self.m:
            raise ValueError(f"Unimodular predicate needs k < m, got k={self.k}, m={self.m}")
        return self

    @property
    def arity(self) -> int:
        if self.name == PREDICATE_RAMIFIED:
            return self.n + 1
        if self.name == PREDICATE_UNIMODULAR:
            return self.k * self.m
        return self.d


class DensityExperiment(BaseModel):
    """A predicate evaluated over L(D)^d along a chain of divisors"""

    predicate: PredicateSpec
    spec: str = Field(default="q=2; excluded=inf", description="Holomorphy ring in spec text format")
    arity: Optional[int] = Field(default=None, ge=1, description="Tuple arity d; derived from the predicate")

    # Chain: explicit divisors, or D_j = j * sum(T) for j = j_min..j_max
    chain: List[str] = Field(default_factory=list, description="Divisors in divisor text format")
    j_min: int = Field(default=0, ge=0)
    j_max: int = Field(default=0, ge=0)

    # Mode
    mode: str = Field(default=MODE_EXHAUSTIVE, description="exhaustive | sample")
    cap: Optional[int] = Field(default=None, gt=0, description="Tuple-space cap for exhaustive mode")
    seed: Optional[int] = Field(default=None, ge=0)
    samples: int = Field(default=10_000, ge=1)

    # Exact comparison value as `num/den`
    reference: Optional[str] = None

    @field_validator("mode")
    @classmethod
    def _known_mode(cls, value: str) -> str:
        value = value.lower()
        if value not in (MODE_EXHAUSTIVE, MODE_SAMPLE):
            raise ValueError(f"Unknown mode {value!r}")
        return value

    @model_validator(mode="after")
    def _arity_matches(self) -> "DensityExperiment":
        expected = self.predicate.arity
        if self.arity is None:
            self.arity = expected
        elif self.arity != expected:
            raise ValueError(f"Arity {self.arity} does not match predicate {self.predicate.name} (needs {expected})")
        if not self.chain and self.j_max < self.j_min:
            raise ValueError(f"j_max={self.j_max} is below j_min={self.j_min}")
        return self
