# app/utils/specfile.py
import hashlib
import json
import logging
import tomllib
from pathlib import Path
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..algebra import CoefficientDomain, Ideal, RingContext, parse_poly
from ..core.errors import SpecFileError
from ..services.delta import FrobeniusLiftSpec
from ..services.prism import PrismFlavor, PrismSpec
from ..services.semigroup import SemigroupSpec

logger = logging.getLogger(__name__)


class RingSpecFile(BaseModel):
    """
    Ring specification as written in a corpus file:

        p = 2
        vars = ["X", "Y", "Z", "W"]
        frobenius = "monomial"          # or a table of images
        ideal = ["X*Y"]
        orientation = "p - Z*W"
        flavor = "zariskian"
        shift = { q = "q + 1" }
        semigroup = [[2], [3]]          # one row per generator
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = ""
    p: int = Field(gt=1)
    vars: List[str] = Field(default_factory=list)
    frobenius: Union[str, Dict[str, str]] = "monomial"
    ideal: List[str] = Field(default_factory=list)
    orientation: Optional[str] = None
    flavor: PrismFlavor = PrismFlavor.ZARISKIAN
    shift: Dict[str, str] = Field(default_factory=dict)
    semigroup: Optional[List[List[int]]] = None

    @field_validator("frobenius")
    @classmethod
    def check_frobenius(cls, value):
        if isinstance(value, str) and value != "monomial":
            raise ValueError("frobenius must be 'monomial' or a table of images")
        return value

    # ring pieces --------------------------------------------------------

    def context(self) -> RingContext:
        return RingContext(tuple(self.vars), CoefficientDomain.integers(), prime=self.p)

    def lift(self, ctx: Optional[RingContext] = None) -> FrobeniusLiftSpec:
        if isinstance(self.frobenius, str):
            return FrobeniusLiftSpec.monomial(self.p)
        ctx = ctx or self.context()
        images = {name: parse_poly(text, ctx) for name, text in self.frobenius.items()}
        return FrobeniusLiftSpec.custom(self.p, images)

    def relations(self, ctx: Optional[RingContext] = None) -> Ideal:
        return Ideal.parse(self.ideal, ctx or self.context())

    def prism_spec(self) -> PrismSpec:
        """
        Raises:
            SpecFileError: no orientation (crystalline files default to p)
        """
        ctx = self.context()
        orientation = self.orientation
        if orientation is None:
            if self.flavor != PrismFlavor.CRYSTALLINE:
                raise SpecFileError("the spec file has no orientation", key="orientation")
            orientation = "p"
        shift = {name: parse_poly(text, ctx) for name, text in self.shift.items()}
        return PrismSpec.build(
            ctx,
            self.relations(ctx),
            parse_poly(orientation, ctx),
            self.lift(ctx),
            self.flavor,
            shift,
            self.name,
        )

    def semigroup_spec(self) -> SemigroupSpec:
        if not self.semigroup:
            raise SpecFileError("the spec file has no semigroup block", key="semigroup")
        return SemigroupSpec.of(self.semigroup)

    def digest(self) -> str:
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True)
        return hashlib.sha256(canonical.encode()).hexdigest()


def parse_spec(data: dict, source: str = "<input>") -> RingSpecFile:
    try:
        return RingSpecFile.model_validate(data)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in err['loc'])}: {err['msg']}"
            for err in e.errors()
        )
        raise SpecFileError(f"{source}: {problems}", source=source)


def load_spec_file(path: Union[str, Path]) -> RingSpecFile:
    """Read and validate a TOML ring-spec file"""
    path = Path(path)
    try:
        with path.open("rb") as handle:
            data = tomllib.load(handle)
    except OSError as e:
        raise SpecFileError(f"cannot read {path}: {e.strerror}", source=str(path))
    except tomllib.TOMLDecodeError as e:
        raise SpecFileError(f"{path}: {e}", source=str(path))
    logger.debug(f"loaded spec file {path}")
    return parse_spec(data, str(path))
