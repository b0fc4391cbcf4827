"""HTTP surface of the wallet service.

All bodies are UTF-8 JSON; errors come back as {code, message} with stable
code strings so clients can branch without parsing prose.
"""

import os

from fastapi import FastAPI, Header, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..errors import (
    AttestationError,
    AuthenticationRequiredError,
    ChannelError,
    CredentialsError,
    FaucetDisabledError,
    LedgerRejectedError,
    NotFoundError,
    StaleDocumentError,
    StoreRejectedError,
    ValidationError,
    WalletError,
)
from .core import WalletService

_STATUS_BY_CLASS = [
    (AuthenticationRequiredError, 401),
    (CredentialsError, 401),
    (ValidationError, 400),
    (NotFoundError, 404),
    (FaucetDisabledError, 403),
    (StaleDocumentError, 409),
    (StoreRejectedError, 409),
    (AttestationError, 409),
    (LedgerRejectedError, 409),
    (ChannelError, 503),
]


def _status_for(exc: WalletError) -> int:
    for cls, status in _STATUS_BY_CLASS:
        if isinstance(exc, cls):
            return status
    return 500


def create_app(service: WalletService) -> FastAPI:
    app = FastAPI(title="mfwallet", version="0.1.0")
    app.state.service = service
    if service.config.dev_mode:
        # the dev UI may be served from another origin (vite/tsc watch)
        app.add_middleware(
            CORSMiddleware,
            allow_origins=["*"],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(WalletError)
    async def wallet_error_handler(_request: Request, exc: WalletError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"code": exc.code, "message": str(exc)},
        )

    @app.post("/accounts", status_code=201)
    async def signup(body: dict):
        return service.signup(body)

    @app.post("/sessions", status_code=201)
    async def login(body: dict):
        identifier = body.get("identifier") or body.get("wallet_address") or ""
        witnesses = body.get("witnesses") or {}
        if not identifier:
            raise ValidationError("identifier or wallet_address required")
        if not isinstance(witnesses, dict) or not witnesses:
            raise ValidationError("witnesses map required")
        return service.login(str(identifier), witnesses)

    @app.delete("/sessions/{session_id}", status_code=204)
    async def logout(session_id: str):
        service.logout(session_id)
        return Response(status_code=204)

    @app.post("/wallets/{address}/factors/{factor_id}")
    async def recover(
        address: str,
        factor_id: str,
        body: dict,
        x_session_id: str | None = Header(default=None),
    ):
        session_id = body.get("session_id") or x_session_id
        result = service.recover_factor(session_id, factor_id, body.get("factor") or {})
        return result

    @app.get("/wallets/{address}/balance")
    async def balance(address: str):
        return service.balance(address)

    @app.post("/wallets/{address}/transfers", status_code=201)
    async def transfer(
        address: str, body: dict, x_session_id: str | None = Header(default=None)
    ):
        session_id = body.get("session_id") or x_session_id
        return service.send(
            session_id, str(body.get("to", "")), int(body.get("amount_units", 0))
        )

    @app.get("/policies/{address}")
    async def policy(address: str):
        data = service.policy(address)
        return Response(content=data, media_type="application/json")

    @app.get("/dev/inbox/{email}")
    async def inbox(email: str):
        return service.inbox_latest(email)

    @app.post("/dev/faucet")
    async def faucet(body: dict):
        return service.faucet(
            str(body.get("wallet_address", "")), int(body.get("amount_units", 0))
        )

    @app.get("/healthz")
    async def healthz():
        return service.healthz()

    static_dir = service.config.static_dir
    if static_dir and os.path.isdir(static_dir):
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def main() -> None:
    import uvicorn

    from .config import ServiceConfig

    config = ServiceConfig.load(os.environ.get("WALLET_CONFIG"))
    service = WalletService(config)
    uvicorn.run(create_app(service), host=config.host, port=config.port)


if __name__ == "__main__":
    main()
