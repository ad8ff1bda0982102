"""HTTP prediction service: the what-if backend.

Endpoints (JSON bodies with named fields; units fixed by the schema):
  GET  /api/health    liveness + model version
  GET  /api/schema    feature/target names, units, kinds, training bounds
  POST /api/predict   11 named feature values -> 5 named predictions
  POST /api/explain   instance -> per-target attribution values
  POST /api/optimize  box bounds + swarm settings -> non-dominated solutions
  POST /api/reload    atomically swap in the artifacts currently on disk

Requests never mutate the loaded models; handlers read one immutable
snapshot, and reload replaces the snapshot in a single reference swap.
Malformed bodies return 400 with field-level messages; an optimize request
whose evaluation count exceeds the configured budget returns 422.
"""
from __future__ import annotations

import os
import threading

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .bundle import (BundleError, ModelBundle, explain_named, load_bundle,
                     optimize_bundle, predict_named)

DEFAULT_OPTIMIZE_BUDGET = 40_000
BIND_ENV_VAR = "REFORMLAB_BIND"


class PredictBody(BaseModel):
    features: dict[str, float]


class ExplainBody(BaseModel):
    features: dict[str, float]
    seed: int = 0


class OptimizeBody(BaseModel):
    bounds: dict[str, tuple[float, float]] | None = None
    swarm_size: int = Field(default=30, ge=2)
    iterations: int = Field(default=100, ge=1)
    archive_capacity: int = Field(default=60, ge=1)
    seed: int = 0


def optimize_call_count(swarm_size: int, iterations: int, n_targets: int) -> int:
    """Model evaluations an optimize request will spend (init + each iteration)."""
    return swarm_size * (iterations + 1) * n_targets


def create_app(model_dir: str, optimize_budget: int = DEFAULT_OPTIMIZE_BUDGET,
               bundle: ModelBundle | None = None) -> FastAPI:
    app = FastAPI(title="reformlab service")
    app.state.snapshot = bundle if bundle is not None else load_bundle(model_dir)
    app.state.model_dir = model_dir
    app.state.optimize_budget = optimize_budget
    app.state.optimize_lock = threading.Lock()

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        detail = [{"field": ".".join(str(p) for p in err["loc"]), "message": err["msg"]}
                  for err in exc.errors()]
        return JSONResponse(status_code=400, content={"detail": detail})

    def snapshot() -> ModelBundle:
        return app.state.snapshot

    @app.get("/api/health")
    def health():
        return {"status": "ok", "model_version": snapshot().version_tag}

    @app.get("/api/schema")
    def schema():
        b = snapshot()
        def enc(spec):
            return {"name": spec.name, "key": spec.key, "unit": spec.unit,
                    "kind": spec.kind, "min": spec.lo, "max": spec.hi}
        return {"features": [enc(s) for s in b.schema.features],
                "targets": [enc(s) for s in b.schema.targets],
                "model_version": b.version_tag}

    @app.post("/api/predict")
    def predict_endpoint(body: PredictBody):
        try:
            out = predict_named(snapshot(), body.features)
        except BundleError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return {"features": out.features, "predictions": out.predictions,
                "extrapolation": out.extrapolation, "model_version": out.model_version}

    @app.post("/api/explain")
    def explain_endpoint(body: ExplainBody):
        b = snapshot()
        try:
            explanations = explain_named(b, body.features, seed=body.seed)
        except BundleError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        keys = b.schema.feature_keys
        out = []
        for e in explanations:
            absvals = [abs(v) for v in e.values]
            order = sorted(range(len(keys)), key=lambda j: (-absvals[j], j))
            total = sum(absvals)
            groups = None
            if total > 0.0:  # an all-constant model has no attribution to split
                groups = {}
                for kind in ("operating-condition", "catalyst-property"):
                    idx = b.schema.group_indices(kind)
                    groups[kind] = 100.0 * sum(absvals[j] for j in idx) / total
            out.append({"target": e.target,
                        "base_value": e.base_value,
                        "prediction": e.prediction,
                        "values": dict(zip(keys, e.values)),
                        "order": [keys[j] for j in order],
                        "group_percent": groups})
        return {"explanations": out, "model_version": b.version_tag}

    @app.post("/api/optimize")
    def optimize_endpoint(body: OptimizeBody):
        b = snapshot()
        calls = optimize_call_count(body.swarm_size, body.iterations,
                                    len(b.target_keys))
        if calls > app.state.optimize_budget:
            raise HTTPException(
                status_code=422,
                detail=f"optimize request needs {calls} model calls, over the "
                       f"service budget of {app.state.optimize_budget}; reduce "
                       "swarm_size/iterations or run the CLI optimizer")
        try:
            with app.state.optimize_lock:  # one bounded in-flight search
                out = optimize_bundle(b, bounds=body.bounds,
                                      swarm_size=body.swarm_size,
                                      iterations=body.iterations,
                                      archive_capacity=body.archive_capacity,
                                      seed=body.seed)
        except BundleError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        fkeys = b.schema.feature_keys
        tkeys = b.target_keys
        return {"solutions": [
            {"decision": dict(zip(fkeys, s.decision)),
             "objectives": dict(zip(tkeys, s.objectives))}
            for s in out.solutions],
            "decision_ranges": out.decision_ranges,
            "objective_ranges": out.objective_ranges,
            "model_version": out.model_version}

    @app.post("/api/reload")
    def reload_endpoint():
        if not app.state.model_dir:
            raise HTTPException(status_code=400, detail="service was started without "
                                                        "a model directory")
        try:
            fresh = load_bundle(app.state.model_dir)
        except (BundleError, OSError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        app.state.snapshot = fresh  # single reference swap: atomic for readers
        return {"status": "reloaded", "model_version": fresh.version_tag}

    return app


def bind_address(default_host: str = "127.0.0.1", default_port: int = 8000
                 ) -> tuple[str, int]:
    """Resolve host/port, honoring the REFORMLAB_BIND=host:port override."""
    override = os.environ.get(BIND_ENV_VAR)
    if not override:
        return default_host, default_port
    host, _, port = override.rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(f"{BIND_ENV_VAR} must look like host:port, got {override!r}")
    return host, int(port)


def serve(model_dir: str, host: str = "127.0.0.1", port: int = 8000,
          optimize_budget: int = DEFAULT_OPTIMIZE_BUDGET) -> None:
    import uvicorn

    app = create_app(model_dir, optimize_budget=optimize_budget)
    uvicorn.run(app, host=host, port=port)
