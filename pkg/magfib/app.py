import os

from fastapi import FastAPI
from prometheus_client import make_asgi_app

from .config import configure_logging
from .routers import analysis

configure_logging()

app = FastAPI(title="magfib")

app.include_router(analysis.router, prefix="/api")
app.mount("/metrics", make_asgi_app())


@app.get("/healthz")
def health():
    return {"status": "ok"}


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(app, host=os.getenv("MAGFIB_HOST", "127.0.0.1"), port=int(os.getenv("MAGFIB_PORT", "8000")))
