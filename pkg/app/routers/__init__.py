# Routers package initialization
from .certificates import router

__all__ = ["router"]
