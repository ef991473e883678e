# app/schemas/certificates.py
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class Verdict(BaseModel):
    """One checked component; failures carry a witness polynomial string"""

    name: str
    passed: bool
    witness: Optional[str] = None
    method: str = "checked"
    detail: Optional[str] = None

    @classmethod
    def ok(cls, name: str, detail: Optional[str] = None, method: str = "checked"):
        return cls(name=name, passed=True, detail=detail, method=method)

    @classmethod
    def fail(
        cls,
        name: str,
        witness: Optional[str] = None,
        detail: Optional[str] = None,
        method: str = "checked",
    ):
        return cls(name=name, passed=False, witness=witness, detail=detail, method=method)


class RootClosureVerdict(str, Enum):
    CERTIFIED_UP_TO = "certified_up_to"
    FAILED_AT = "failed_at"
    PRECONDITION_FAILED = "precondition_failed"


class LevelCheck(BaseModel):
    level: int
    injective: bool
    witness: Optional[str] = None


class RootClosureCertificate(BaseModel):
    levels_checked: int
    per_level: List[LevelCheck] = Field(default_factory=list)
    verdict: RootClosureVerdict
    failed_level: Optional[int] = None
    witness: Optional[str] = None
    precondition: Optional[str] = None
    scope: str = "polynomial-level"

    @property
    def passed(self) -> bool:
        return self.verdict == RootClosureVerdict.CERTIFIED_UP_TO

    def summary(self) -> str:
        if self.verdict == RootClosureVerdict.CERTIFIED_UP_TO:
            return f"certified up to level {self.levels_checked} ({self.scope})"
        if self.verdict == RootClosureVerdict.FAILED_AT:
            return f"failed at level {self.failed_level}, witness {self.witness}"
        return f"precondition failed: {self.precondition}"


class HypothesisCertificate(BaseModel):
    """
    Prism hypotheses; a preprism check fills only delta_stable and orientation.
    `overall` is the conjunction of the components present.
    """

    delta_stable: Verdict
    orientation: Verdict
    distinguished: Optional[Verdict] = None
    p_torsion_free: Optional[Verdict] = None
    d_nzd_mod_p: Optional[Verdict] = None
    root_closed: Optional[RootClosureCertificate] = None
    flavor: str
    levels: int = 0
    overall: bool
    notes: List[str] = Field(default_factory=list)

    def components(self) -> List[Verdict]:
        verdicts = [
            self.delta_stable,
            self.orientation,
            self.distinguished,
            self.p_torsion_free,
            self.d_nzd_mod_p,
        ]
        return [v for v in verdicts if v is not None]

    def first_failure(self) -> Optional[str]:
        for verdict in self.components():
            if not verdict.passed:
                return verdict.name
        if self.root_closed is not None and not self.root_closed.passed:
            return "root_closed"
        return None


class AxiomMethod(str, Enum):
    PROVED = "proved-by-construction"
    CHECKED = "checked"
    OUT_OF_SCOPE = "out-of-desk-scope"


class AxiomVerdict(BaseModel):
    axiom: str
    method: AxiomMethod
    passed: bool
    levels: List[int] = Field(default_factory=list)
    witness: Optional[str] = None
    detail: Optional[str] = None


class AxiomCertificate(BaseModel):
    levels: int
    axioms: List[AxiomVerdict]
    tags: List[str] = Field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(a.passed for a in self.axioms)

    def verdict(self, axiom: str) -> AxiomVerdict:
        for a in self.axioms:
            if a.axiom == axiom:
                return a
        raise KeyError(axiom)


class Report(BaseModel):
    """Serialized result of one command; contains no timing so reruns are identical"""

    command: str
    input_digest: str
    verdicts: Dict[str, Any] = Field(default_factory=dict)
    outputs: Dict[str, Any] = Field(default_factory=dict)
    resource_usage: Dict[str, int] = Field(default_factory=dict)
    exit_code: int = 0
