import hashlib
import json
from typing import Any


def canonical_json(payload: Any) -> str:
    """Serialise with sorted keys and no whitespace variance."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)


def config_hash(payload: dict[str, Any]) -> str:
    """Stable SHA-256 of a configuration mapping.

    Key format mirrors the filter hashes used for cache keys: the mapping is
    dumped with ``sort_keys`` so field order never changes the digest.
    """
    return hashlib.sha256(canonical_json(payload).encode()).hexdigest()
