import os
import json
import logging
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from services.config import load_settings
from services.errors import MergeGameError
from services.mapping.adaptive import AdaptiveDecision
from services.mapping.observation import EnvironmentObservation
from services.policy.policy_factory import PolicyFactory
from services.policy.policy_provider import DecisionPolicy
from services.scenario.kinematics import KinematicContext
from services.serialization import load_model

logger = logging.getLogger(__name__)

app = FastAPI()

MODEL_ENV = "MERGEGAME_MODEL"

class ContextBody(BaseModel):
    gap_init: float
    gap_ahead: float
    v0: float
    v1: float
    a0: float = 0.0
    a1: float = 0.0
    jerk0_mag: float = 1.0
    jerk1_mag: float = 1.0
    horizon: float = 1.0


class ObservationBody(BaseModel):
    d01_y: float
    dv01_x: float
    d01_x: float
    d_ahead: float
    v1_x: float


class DecideRequest(BaseModel):
    ctx: ContextBody
    obs: ObservationBody


def load_policy(model_path: str | None = None) -> DecisionPolicy | None:
    """Adaptive policy over the mapping model at model_path (or MERGEGAME_MODEL)."""
    model_path = model_path or os.getenv(MODEL_ENV)
    if not model_path:
        return None
    settings = load_settings()
    model = load_model(model_path)
    logger.info("Loaded mapping model from %s", model_path)
    return PolicyFactory.create_policy("adaptive", settings.norms, settings.kinematics.a_bounds, model=model)


def decision_message(decision: AdaptiveDecision) -> dict:
    return {
        "sigma0": [decision.sigma0.p, 1.0 - decision.sigma0.p],
        "sigma1": [decision.sigma1.p, 1.0 - decision.sigma1.p],
        "q0": decision.q0.value,
        "q1": decision.q1.value,
        "lambda0": [decision.lambda0.w1, decision.lambda0.w2],
        "lambda1": [decision.lambda1.w1, decision.lambda1.w2],
        "posterior0": None if decision.posterior0 is None else decision.posterior0.tolist(),
        "posterior1": None if decision.posterior1 is None else decision.posterior1.tolist(),
        "degenerate": decision.degenerate,
    }


def run_decision(policy: DecisionPolicy, body: dict) -> dict:
    request = DecideRequest.model_validate(body)
    ctx = KinematicContext(**request.ctx.model_dump())
    obs = EnvironmentObservation(**request.obs.model_dump())
    return decision_message(policy.decide(ctx, obs))


@app.on_event("startup")
async def startup():
    app.state.policy = None
    try:
        app.state.policy = load_policy()
    except (MergeGameError, OSError) as e:
        logger.error("Could not load mapping model: %s", e)


@app.exception_handler(MergeGameError)
async def merge_game_error(request, exc: MergeGameError):
    return JSONResponse(status_code=422, content={"detail": str(exc)})


@app.post("/decide")
async def decide(request: DecideRequest):
    """
    One online step: infer weights from the environment, solve the game and
    return P0's action.
    """
    policy = getattr(app.state, "policy", None)
    if policy is None:
        return JSONResponse(status_code=503, content={"detail": "no mapping model loaded"})
    return run_decision(policy, request.model_dump())


@app.websocket("/decision-stream")
async def decision_stream(websocket: WebSocket):
    """
    Per-frame decisions for a running interaction.
    """
    await websocket.accept()
    policy = getattr(app.state, "policy", None)
    frames = 0

    try:
        async for message in websocket.iter_text():
            try:
                data = json.loads(message)
            except json.JSONDecodeError as e:
                await websocket.send_json({"event": "error", "detail": f"invalid JSON: {e}"})
                continue
            if not isinstance(data, dict):
                await websocket.send_json({"event": "error", "detail": "expected a JSON object"})
                continue

            match data.get('event'):
                case "start":
                    model_path = data.get('model')
                    if model_path:
                        try:
                            policy = load_policy(model_path)
                        except (MergeGameError, OSError) as e:
                            await websocket.send_json({"event": "error", "detail": str(e)})
                            continue
                    frames = 0
                    logger.info("Decision stream started (model loaded: %s)", policy is not None)
                    await websocket.send_json({"event": "started", "model_loaded": policy is not None})

                case "frame":
                    if policy is None:
                        await websocket.send_json({"event": "error", "detail": "no mapping model loaded"})
                        continue
                    try:
                        decision = run_decision(policy, data)
                    except (MergeGameError, ValueError) as e:
                        await websocket.send_json({"event": "error", "detail": str(e)})
                        continue
                    frames += 1
                    await websocket.send_json({"event": "decision", "frame": data.get('frame', frames), **decision})

                case "stop":
                    logger.info("Decision stream stopped after %d frames", frames)
                    await websocket.send_json({"event": "stopped", "frames": frames})
                    break

                case other:
                    await websocket.send_json({"event": "error", "detail": f"unknown event {other!r}"})

    except WebSocketDisconnect:
        logger.info("Decision stream disconnected after %d frames", frames)


# Health check endpoint for Railway
@app.get("/health")
async def health():
    return {"status": "ok", "model_loaded": getattr(app.state, "policy", None) is not None}

if __name__ == "__main__":
    import uvicorn
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    port = int(os.getenv("PORT", "8080"))
    uvicorn.run(app, host="0.0.0.0", port=port)
