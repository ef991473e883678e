import logging

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.routing import APIRoute

from .config import get_settings
from .core.middleware import logging_middleware
from .routers.certificates import router as certificates_router

logging.basicConfig(
    level=get_settings().log_level,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger(__name__)

app = FastAPI(title="PrismForge certificate service")

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)
app.middleware("http")(logging_middleware)

app.include_router(certificates_router, prefix="/api")

logger.debug(
    "Routes: %s",
    [f"{sorted(r.methods)} {r.path}" for r in app.routes if isinstance(r, APIRoute)],
)


@app.get("/")
async def root():
    return {"message": "PrismForge is running. Endpoints are listed at /api/routes"}


@app.get("/api/routes", response_class=JSONResponse)
async def get_routes():
    """Get all API routes"""
    routes = []
    for route in app.routes:
        if isinstance(route, APIRoute):
            routes.append(
                {"path": route.path, "name": route.name, "methods": list(route.methods)}
            )
    return {"routes": routes}


@app.get("/api/routes-simple", response_class=PlainTextResponse)
async def get_routes_simple_with_prefix():
    """One 'METHODS: path' line per route"""
    routes = []
    for route in app.routes:
        if isinstance(route, APIRoute):
            methods = ", ".join(sorted(route.methods))
            routes.append(f"{methods}: {route.path}")

    return "\n".join(routes)
