"""Stable seed derivation independent of Python's hash randomization."""

import hashlib


def stable_seed(*parts) -> int:
    """31-bit seed from the SHA-256 of the ``|``-joined string parts."""
    text = "|".join(str(p) for p in parts)
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:4], "big") >> 1
