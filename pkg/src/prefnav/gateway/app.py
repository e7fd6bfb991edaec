"""HTTP and websocket surface over a running ``PipelineRuntime``.

Endpoints return plain JSON views of runtime state; the websocket pushes the
latest simulation frame at the control rate.  When a built UI bundle exists
it is served from the root path, with API routes taking precedence.
"""

from __future__ import annotations

import asyncio
import logging
from pathlib import Path

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from ..grammar import BaselineConflict, UnparseablePreference
from ..morl.world import ScenarioError
from .backends import BackendError, CassetteMiss, SchemaError
from .runtime import PipelineRuntime

log = logging.getLogger(__name__)


class FeedbackBody(BaseModel):
    text: str


def _rule_view(rule) -> dict:
    return rule.to_dict()


def create_app(runtime: PipelineRuntime, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="preference navigation gateway")
    app.state.runtime = runtime

    @app.get("/state")
    def get_state() -> dict:
        return runtime.state()

    @app.get("/health")
    def get_health() -> dict:
        return runtime.health()

    @app.get("/rules")
    def get_rules() -> dict:
        return runtime.rules()

    @app.delete("/rules/{rule_id}")
    def remove_rule(rule_id: str) -> dict:
        try:
            removed = runtime.delete_rule(rule_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no rule with id {rule_id!r}")
        return {"deleted": _rule_view(removed)}

    @app.get("/preference")
    def get_preference() -> dict:
        snapshot = runtime.snapshot
        return {
            "lambda": snapshot.translation.vector.to_dict(),
            "applied_rules": list(snapshot.translation.applied_rules),
            "explanation": snapshot.translation.explanation,
            "generation": snapshot.generation,
            "rules_version": snapshot.rules_version,
        }

    @app.post("/feedback")
    def post_feedback(body: FeedbackBody) -> dict:
        try:
            result, translation = runtime.submit_feedback(body.text)
        except BaselineConflict as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except (UnparseablePreference, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except (BackendError, CassetteMiss, SchemaError) as exc:
            raise HTTPException(status_code=502, detail=f"{type(exc).__name__}: {exc}")
        return {
            "operation": result.operation.value,
            "rule": _rule_view(result.rule),
            "removed": _rule_view(result.removed) if result.removed else None,
            "lambda": translation.vector.to_dict(),
            "applied_rules": list(translation.applied_rules),
            "explanation": translation.explanation,
        }

    @app.post("/scenario/{name}/reset")
    def reset_scenario(name: str) -> dict:
        try:
            runtime.reset_scenario(name)
        except (ScenarioError, FileNotFoundError, KeyError) as exc:
            raise HTTPException(status_code=404, detail=f"unknown scenario {name!r}: {exc}")
        return runtime.state()

    @app.websocket("/stream")
    async def stream(ws: WebSocket) -> None:
        await ws.accept()
        period = runtime.tick_period_s
        try:
            while True:
                await ws.send_json(runtime.latest_frame())
                await asyncio.sleep(period)
        except WebSocketDisconnect:
            pass
        except Exception as exc:
            log.debug("stream closed: %s", exc)

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
