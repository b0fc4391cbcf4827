from .network import (
    IdentifierBinding,
    Network,
    NetworkConfig,
    Peer,
    StoredRecord,
    binding_payload,
    identifier_hash,
    make_binding,
    record_key_for_address,
)
from .scenario import ScenarioRunner, craft_flood_document, make_wallet, run_scenario_file

__all__ = [
    "IdentifierBinding",
    "Network",
    "NetworkConfig",
    "Peer",
    "StoredRecord",
    "binding_payload",
    "identifier_hash",
    "make_binding",
    "record_key_for_address",
    "ScenarioRunner",
    "craft_flood_document",
    "make_wallet",
    "run_scenario_file",
]
