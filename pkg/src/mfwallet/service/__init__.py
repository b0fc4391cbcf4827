from .app import create_app
from .config import ServiceConfig
from .core import Session, SharedBackend, WalletService, parse_factor_spec

__all__ = [
    "create_app",
    "ServiceConfig",
    "Session",
    "SharedBackend",
    "WalletService",
    "parse_factor_spec",
]
