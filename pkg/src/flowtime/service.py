"""HTTP/JSON facade over discovery, express, reduction and what-if.

The loaded model is an immutable baseline; every what-if request applies
its scenario to a fresh copy and recomputes, so concurrent requests
never observe each other. Responses are cached by request-content hash
and replayed byte-for-byte.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, File, Form, Request, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import Response

from .errors import DataError, IrreducibilityBroken, NumericError
from .eventlog import parse_event_log
from .gmm import FitConfig
from .discovery import SemiMarkovFlow, discover, fit_edge_distributions, fit_edges_as_point_masses
from .express import mean_execution_time
from .reduction import ReductionConfig, reduce_flow
from .whatif import Scenario, apply_scenario

CURVE_POINTS = 512


def _json_bytes(payload: dict) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()


def _json_response(body: bytes, status: int = 200) -> Response:
    return Response(content=body, status_code=status, media_type="application/json")


def _fitted_copy(flow: SemiMarkovFlow) -> SemiMarkovFlow:
    if all(m.fitted is not None for m in flow.edge_times.values()):
        return flow
    if any(m.samples for m in flow.edge_times.values()):
        return fit_edge_distributions(flow, FitConfig())
    return fit_edges_as_point_masses(flow)


def _pdf_payload(flow: SemiMarkovFlow, threshold: float) -> dict:
    pdf = reduce_flow(_fitted_copy(flow), ReductionConfig(threshold=threshold))
    grid = np.linspace(0.0, pdf.truncated.support_hint(), CURVE_POINTS)
    return {
        "mass_check": pdf.mass_check,
        "mean_hours": pdf.mixture.mean(),
        "mixture": pdf.mixture.to_dict(),
        "curve": {
            "t_hours": [float(t) for t in grid],
            "density": [float(d) for d in pdf.truncated.density(grid)],
        },
    }


@dataclass
class SessionState:
    baseline: SemiMarkovFlow
    cache: dict[str, bytes] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def baseline_payload(self) -> dict:
        report = mean_execution_time(self.baseline)
        return {
            "model": self.baseline.to_dict(include_samples=False),
            "report": report.to_dict(self.baseline),
        }


def create_app(flow: SemiMarkovFlow) -> FastAPI:
    app = FastAPI(title="flowtime", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    state = SessionState(baseline=flow)
    app.state.session = state

    def cached(key: str, build) -> Response:
        with state.lock:
            hit = state.cache.get(key)
        if hit is not None:
            return _json_response(hit)
        body = _json_bytes(build())
        with state.lock:
            state.cache[key] = body
        return _json_response(body)

    @app.get("/model")
    def get_model() -> Response:
        return cached("model", state.baseline_payload)

    @app.post("/whatif")
    async def post_whatif(request: Request) -> Response:
        raw = await request.body()
        try:
            payload = json.loads(raw or b"{}")
            scenario = Scenario.from_dict(payload)
            full = bool(payload.get("full", False))
        except (ValueError, KeyError, TypeError) as exc:
            return _json_response(_json_bytes({"error": f"malformed scenario: {exc}"}), 400)

        key = "whatif:" + hashlib.sha256(
            _json_bytes({"edits": scenario.to_dict()["edits"], "full": full})
        ).hexdigest()

        def build() -> dict:
            edited = apply_scenario(state.baseline, scenario)
            body = {
                "baseline": mean_execution_time(state.baseline).to_dict(state.baseline),
                "report": mean_execution_time(edited).to_dict(edited),
            }
            if full:
                body["baseline_pdf"] = _pdf_payload(state.baseline, 0.001)
                body["scenario_pdf"] = _pdf_payload(edited, 0.001)
            return body

        try:
            return cached(key, build)
        except IrreducibilityBroken as exc:
            return _json_response(_json_bytes({"error": str(exc)}), 409)
        except DataError as exc:
            return _json_response(_json_bytes({"error": str(exc)}), 422)
        except NumericError as exc:
            return _json_response(_json_bytes({"error": str(exc), "kind": "numeric"}), 500)

    @app.post("/log")
    async def post_log(file: UploadFile = File(...), k: int = Form(1)) -> Response:
        try:
            text = (await file.read()).decode("utf-8")
            new_flow = discover(parse_event_log(text), k)
        except DataError as exc:
            return _json_response(_json_bytes({"error": str(exc)}), 422)
        with state.lock:
            state.baseline = new_flow
            state.cache.clear()
        return cached("model", state.baseline_payload)

    @app.get("/pdf")
    def get_pdf(threshold: float = 0.001) -> Response:
        key = f"pdf:{threshold!r}"
        try:
            return cached(key, lambda: _pdf_payload(state.baseline, threshold))
        except NumericError as exc:
            return _json_response(_json_bytes({"error": str(exc), "kind": "numeric"}), 500)

    return app
