# app/routers/certificates.py
import logging
from typing import List, Optional

from fastapi import APIRouter, Depends, HTTPException
from pydantic import BaseModel, Field

from ..config import get_settings
from ..core.errors import PrismForgeError, handle_prismforge_error
from ..schemas.certificates import Report
from ..services import build_services
from ..services.reports import ReportService
from ..services.tower import RootsKind
from ..utils.specfile import RingSpecFile

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/prism", tags=["prism"])


class SpecRequest(BaseModel):
    spec: RingSpecFile
    levels: Optional[int] = Field(default=None, ge=0)
    max_iter: Optional[int] = Field(default=None, gt=0)


class DeltaRequest(SpecRequest):
    poly: str


class TowerRequest(SpecRequest):
    fractional: bool = False
    tilt: bool = False
    pillars: bool = False
    axioms: bool = False
    force: bool = False


class RootsRequest(SpecRequest):
    kind: RootsKind = RootsKind.ROOTS_OF_P


class ToricRequest(BaseModel):
    semigroup: List[List[int]]
    prime: int = Field(default=2, gt=1)


# One service container per request; the engine cache and its stats stay per report
def get_report_service() -> ReportService:
    return ReportService(build_services())


def _levels(request: SpecRequest) -> int:
    return request.levels if request.levels is not None else get_settings().levels


def _guarded(action):
    try:
        return action()
    except PrismForgeError as e:
        raise handle_prismforge_error(e)
    except HTTPException:
        raise
    except Exception as e:
        raise handle_prismforge_error(e)


@router.post("/delta", response_model=Report)
def delta(request: DeltaRequest, reports: ReportService = Depends(get_report_service)):
    """δ(f), φ(f) and the φ-monomial decomposition when there is one"""
    return _guarded(lambda: reports.delta(request.spec, request.poly))


@router.post("/stabilize", response_model=Report)
def stabilize(
    request: SpecRequest, reports: ReportService = Depends(get_report_service)
):
    return _guarded(lambda: reports.stabilize(request.spec, request.max_iter))


@router.post("/check-prism", response_model=Report)
def check_prism(
    request: SpecRequest, reports: ReportService = Depends(get_report_service)
):
    """Hypothesis certificate; a failing hypothesis is a verdict, not an error"""
    return _guarded(lambda: reports.check_prism(request.spec, _levels(request)))


@router.post("/tower", response_model=Report)
def tower(request: TowerRequest, reports: ReportService = Depends(get_report_service)):
    return _guarded(
        lambda: reports.tower(
            request.spec,
            _levels(request),
            fractional=request.fractional,
            tilt=request.tilt,
            pillars=request.pillars,
            axioms=request.axioms,
            force=request.force,
        )
    )


@router.post("/toric", response_model=Report)
def toric(request: ToricRequest, reports: ReportService = Depends(get_report_service)):
    return _guarded(lambda: reports.toric(request.semigroup, request.prime))


@router.post("/roots", response_model=Report)
def roots(request: RootsRequest, reports: ReportService = Depends(get_report_service)):
    return _guarded(
        lambda: reports.roots(request.spec, request.kind, _levels(request))
    )
