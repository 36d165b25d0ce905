"""HTTP/JSON service for the planner UI and scripting.

Endpoints are stateless: every request builds its own simulation state
from the request body plus the currently loaded layout. The one mutable
piece, the layout, is replaced atomically under a single-writer lock by
PUT /api/layout.
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path
from queue import Queue

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import __version__
from .detection import DetectionThreshold, DetectionWeights, NormalizationBounds
from .errors import TwinwatchError, UnknownPresetError
from .experiments import (
    ExperimentPlan,
    report_to_csv,
    report_to_markdown,
    run_experiment,
)
from .geometry import Point2D
from .heatmap import compute_heatmap
from .optimizer import (
    FreeParams,
    ObjectiveConfig,
    OptimizationProblem,
    optimize,
)
from .simulation import TimeOfDay
from .station import Camera, CameraPreset, StationLayout, save_layout

DEFAULT_PORT = 8080
DEFAULT_BIND = "127.0.0.1"


class CameraModel(BaseModel):
    id: str
    x: float
    y: float
    pan_deg: float
    mount_height: float = 2.5
    fov_deg: float = 50.0
    min_range_m: float = 1.0
    max_range_m: float = 18.0

    def to_camera(self) -> Camera:
        return Camera(id=self.id, position=Point2D(self.x, self.y),
                      pan_deg=self.pan_deg, mount_height=self.mount_height,
                      fov_deg=self.fov_deg, min_range_m=self.min_range_m,
                      max_range_m=self.max_range_m)


class WeightsModel(BaseModel):
    w_a: float = 1.0 / 3.0
    w_d: float = 1.0 / 3.0
    w_n: float = 1.0 / 3.0


class SimulateRequest(BaseModel):
    preset: str | None = None
    cameras: list[CameraModel] | None = None
    period: str = "Morning"
    scenarios: list[int] = Field(default_factory=lambda: [1, 2, 3])
    mode: str = "stochastic"
    seed: int = 0
    replications: int = 1
    replication_minutes: float = 60.0
    weights: WeightsModel | None = None
    threshold: float = 0.45


class HeatmapRequest(BaseModel):
    preset: str | None = None
    cameras: list[CameraModel] | None = None
    cell_size: float = 0.5
    weights: WeightsModel | None = None


class FreeParamsModel(BaseModel):
    pan: tuple[float, float] | None = None
    position_mount: str | None = None


class OptimizeObjectiveModel(BaseModel):
    mode: str = "geometric"
    periods: list[str] = Field(default_factory=lambda: ["Morning"])
    scenarios: list[int] = Field(default_factory=lambda: [1, 2, 3])
    replications: int = 2
    seed: int = 0
    duration_minutes: float = 10.0
    suspects_per_hour_mean: float | None = 60.0
    threshold: float = 0.45


class OptimizeRequest(BaseModel):
    preset: str | None = None
    cameras: list[CameraModel] | None = None
    free: dict[str, FreeParamsModel] = Field(default_factory=dict)
    budget: int = 200
    restarts: int = 2
    objective: OptimizeObjectiveModel = Field(default_factory=OptimizeObjectiveModel)


def _field_error(field: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=422,
                        content={"detail": [{"field": field, "msg": message}]})


class _LayoutBox:
    """Holds the served layout; writes are serialized and persisted."""

    def __init__(self, layout: StationLayout, path: Path | None):
        self.layout = layout
        self.path = path
        self.lock = threading.Lock()

    def replace(self, layout: StationLayout) -> None:
        with self.lock:
            self.layout = layout
            if self.path is not None:
                save_layout(layout, self.path)


def _resolve_cameras(box: _LayoutBox, preset: str | None,
                     cameras: list[CameraModel] | None):
    """(CameraPreset, error-response-or-None) from a request body."""
    if cameras:
        try:
            cams = tuple(c.to_camera() for c in cameras)
        except TwinwatchError as exc:
            return None, _field_error("cameras", str(exc))
        return CameraPreset(name="custom", cameras=cams), None
    if preset is None:
        return None, _field_error("preset", "either preset or cameras is required")
    try:
        from .station import builtin_preset
        return builtin_preset(preset, box.layout), None
    except UnknownPresetError as exc:
        return None, _field_error("preset", str(exc))


def create_app(layout: StationLayout | None = None,
               layout_path: str | Path | None = None,
               static_dir: str | Path | None = None) -> FastAPI:
    from .station import default_layout, load_layout

    if layout is None:
        layout = load_layout(layout_path) if layout_path else default_layout()
    box = _LayoutBox(layout, Path(layout_path) if layout_path else None)

    app = FastAPI(title="twinwatch", version=__version__)
    app.state.layout_box = box

    @app.exception_handler(RequestValidationError)
    async def _validation_handler(request: Request, exc: RequestValidationError):
        errors = exc.errors()
        if any(e.get("type") == "json_invalid" for e in errors):
            return JSONResponse(status_code=400,
                                content={"detail": "malformed JSON body"})
        detail = [{"field": ".".join(str(p) for p in e.get("loc", []) if p != "body"),
                   "msg": e.get("msg", "invalid")} for e in errors]
        return JSONResponse(status_code=422, content={"detail": detail})

    @app.get("/api/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.get("/api/layout")
    def get_layout():
        return box.layout.to_dict()

    @app.put("/api/layout")
    def put_layout(doc: dict):
        try:
            new_layout = StationLayout.from_dict(doc)
        except TwinwatchError as exc:
            return _field_error("layout", str(exc))
        box.replace(new_layout)
        return {"status": "ok", "name": new_layout.name}

    @app.get("/api/presets")
    def presets():
        return {"presets": [
            {"name": name, "cameras": [c.to_dict() for c in cams]}
            for name, cams in box.layout.presets.items()
        ]}

    @app.post("/api/simulate")
    def simulate(req: SimulateRequest, fmt: str = Query("json", alias="format")):
        if req.replications < 1:
            return _field_error("replications", "must be at least 1")
        if req.mode not in ("geometric", "stochastic"):
            return _field_error("mode", f"unknown mode {req.mode!r}")
        preset, err = _resolve_cameras(box, req.preset, req.cameras)
        if err is not None:
            return err
        try:
            period = TimeOfDay.from_name(req.period)
            weights = (DetectionWeights(**req.weights.model_dump())
                       if req.weights else DetectionWeights.equal())
            plan = ExperimentPlan(
                presets=(preset.name,),
                periods=(period,),
                scenarios=tuple(req.scenarios),
                target_suspects_per_cell=1,
                max_replications=req.replications,
                mode=req.mode,
                base_seed=req.seed,
                weights=weights,
                threshold=DetectionThreshold(req.threshold),
                replication_minutes=req.replication_minutes,
                custom_preset=preset,
            )
            report = run_experiment(box.layout, plan)
        except TwinwatchError as exc:
            return _field_error("plan", str(exc))
        if fmt == "csv":
            return PlainTextResponse(report_to_csv(report), media_type="text/csv")
        if fmt == "markdown":
            return PlainTextResponse(report_to_markdown(report),
                                     media_type="text/markdown")
        return report.to_dict()

    @app.post("/api/heatmap")
    def heatmap(req: HeatmapRequest):
        if req.cell_size <= 0:
            return _field_error("cell_size", "must be positive")
        if req.cameras is None and req.preset is None:
            cams: tuple[Camera, ...] = ()
        else:
            preset, err = _resolve_cameras(box, req.preset, req.cameras)
            if err is not None:
                return err
            cams = preset.cameras
        weights = (DetectionWeights(**req.weights.model_dump())
                   if req.weights else DetectionWeights.equal())
        grid = compute_heatmap(box.layout.bounds, cams, weights,
                               NormalizationBounds(), cell_size=req.cell_size)
        return grid.to_dict()

    @app.post("/api/optimize")
    def optimize_endpoint(req: OptimizeRequest, request: Request):
        if req.budget < 1:
            return JSONResponse(status_code=409,
                                content={"detail": "budget must be at least 1"})
        preset, err = _resolve_cameras(box, req.preset, req.cameras)
        if err is not None:
            return err
        free = {cid: FreeParams(pan_bounds=fp.pan, position_mount=fp.position_mount)
                for cid, fp in req.free.items()}
        if not free:
            free = {c.id: FreeParams(pan_bounds=(0.0, 360.0))
                    for c in preset.cameras}
        if all(fp.pan_bounds is None and fp.position_mount is None
               for fp in free.values()):
            return _field_error("free", "no free parameters")
        obj = req.objective
        overrides: dict = {}
        if obj.suspects_per_hour_mean is not None:
            from .distributions import NormalSpec
            overrides["suspects_per_hour"] = NormalSpec(
                obj.suspects_per_hour_mean, 1.0, min_clamp=0.0)
        try:
            problem = OptimizationProblem(
                layout=box.layout,
                cameras=preset.cameras,
                free=free,
                objective=ObjectiveConfig(
                    mode=obj.mode,
                    periods=tuple(TimeOfDay.from_name(p) for p in obj.periods),
                    scenarios=tuple(obj.scenarios),
                    threshold=DetectionThreshold(obj.threshold),
                    replications=obj.replications,
                    seed=obj.seed,
                    duration_s=obj.duration_minutes * 60.0,
                    sim_overrides=overrides,
                ),
                budget=req.budget,
                restarts=req.restarts,
            )
        except TwinwatchError as exc:
            return _field_error("problem", str(exc))

        wants_stream = "application/x-ndjson" in request.headers.get("accept", "")
        if not wants_stream:
            result = optimize(problem)
            return result.to_dict()

        def event_stream():
            queue: Queue = Queue()
            holder: dict = {}

            def worker():
                try:
                    holder["result"] = optimize(
                        problem, on_evaluation=queue.put)
                except Exception as exc:  # surfaced as a stream event
                    holder["error"] = str(exc)
                finally:
                    queue.put(None)

            thread = threading.Thread(target=worker, daemon=True)
            thread.start()
            best = float("-inf")
            while True:
                point = queue.get()
                if point is None:
                    break
                best = max(best, point.objective)
                yield json.dumps({"type": "progress",
                                  "iteration": point.iteration,
                                  "objective": point.objective,
                                  "best": best}) + "\n"
            thread.join()
            if "error" in holder:
                yield json.dumps({"type": "error", "detail": holder["error"]}) + "\n"
            else:
                yield json.dumps({"type": "result",
                                  **holder["result"].to_dict()}) + "\n"

        return StreamingResponse(event_stream(), media_type="application/x-ndjson")

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True),
                  name="planner")

    return app


def serve(layout_path: str | Path | None = None,
          host: str | None = None, port: int | None = None,
          static_dir: str | Path | None = None) -> None:
    """Run the HTTP service with uvicorn; bind/port fall back to the
    TWINWATCH_BIND / TWINWATCH_PORT environment variables."""
    import uvicorn

    host = host or os.environ.get("TWINWATCH_BIND", DEFAULT_BIND)
    port = port if port is not None else int(
        os.environ.get("TWINWATCH_PORT", DEFAULT_PORT))
    app = create_app(layout_path=layout_path, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)
