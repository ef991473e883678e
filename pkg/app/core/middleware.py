# app/core/middleware.py
import logging
import time

from fastapi import Request
from fastapi.responses import JSONResponse

logger = logging.getLogger(__name__)


async def logging_middleware(request: Request, call_next):
    start_time = time.perf_counter()

    try:
        response = await call_next(request)
    except Exception as e:
        logger.error(f"Request {request.method} {request.url.path} failed: {e}")
        return JSONResponse(
            status_code=500,
            content={"detail": {"error_code": "UNEXPECTED_ERROR", "message": str(e)}},
        )
    process_time = time.perf_counter() - start_time
    response.headers["X-Process-Time"] = f"{process_time:.6f}"
    logger.info(
        f"{request.method} {request.url.path} -> {response.status_code} "
        f"in {process_time:.3f}s"
    )
    return response
