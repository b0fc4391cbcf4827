"""Service configuration: file-based with environment overrides."""

import json
import os
from dataclasses import dataclass, field, replace


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8710
    kdf_profile: str = "production"
    peer_count: int = 8
    topology: str = "complete"
    capacity_bytes: int = 64 << 20
    min_value_units: int = 0
    rng_seed: int = 0
    session_ttl_seconds: int = 900
    gossip_rounds: int = 2
    home_peer: int = 0
    dev_mode: bool = False  # enables the faucet and the OOBA inbox endpoint
    static_dir: str | None = None

    @classmethod
    def load(cls, path: str | None = None, env: dict | None = None) -> "ServiceConfig":
        env = os.environ if env is None else env
        cfg = cls()
        if path:
            with open(path, "r", encoding="utf-8") as fh:
                file_values = json.load(fh)
            cfg = replace(cfg, **{k: v for k, v in file_values.items() if hasattr(cfg, k)})
        overrides = {}
        mapping = {
            "WALLET_HOST": ("host", str),
            "WALLET_PORT": ("port", int),
            "WALLET_KDF_PROFILE": ("kdf_profile", str),
            "WALLET_PEER_COUNT": ("peer_count", int),
            "WALLET_TOPOLOGY": ("topology", str),
            "WALLET_SESSION_TTL": ("session_ttl_seconds", int),
            "WALLET_GOSSIP_ROUNDS": ("gossip_rounds", int),
            "WALLET_HOME_PEER": ("home_peer", int),
            "WALLET_DEV": ("dev_mode", lambda v: v.lower() in ("1", "true", "yes")),
            "WALLET_STATIC_DIR": ("static_dir", str),
        }
        for var, (attr, conv) in mapping.items():
            if var in env:
                overrides[attr] = conv(env[var])
        return replace(cfg, **overrides)
