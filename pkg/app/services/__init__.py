from dataclasses import dataclass
from typing import Optional

from ..config import Settings, get_settings
from .charp import CharPService
from .delta import DeltaService
from .groebner import GroebnerEngine
from .ideals import IdealService
from .prism import PrismService
from .semigroup import SemigroupService
from .tower import TowerService


@dataclass
class Services:
    """One engine (and cache) shared by every service of a run"""

    settings: Settings
    engine: GroebnerEngine
    ideals: IdealService
    delta: DeltaService
    charp: CharPService
    semigroups: SemigroupService
    prisms: PrismService
    towers: TowerService


def build_services(settings: Optional[Settings] = None) -> Services:
    settings = settings or get_settings()
    engine = GroebnerEngine(limits=settings.limits)
    ideals = IdealService(engine)
    delta = DeltaService(ideals, max_iter=settings.max_iter)
    charp = CharPService(ideals)
    semigroups = SemigroupService(ideals, delta)
    prisms = PrismService(delta, charp, semigroups)
    towers = TowerService(prisms, spot_checks=settings.spot_checks, seed=settings.seed)
    return Services(settings, engine, ideals, delta, charp, semigroups, prisms, towers)


__all__ = ["Services", "build_services"]
