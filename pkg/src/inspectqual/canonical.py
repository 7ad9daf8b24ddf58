"""Canonical JSON serialization and content digests.

Every hashable document in the toolkit (dataset sheets, validation
reports, reference models, audit entries) is digested over the same
canonical byte form so that logically identical content always hashes
identically:

  * object keys sorted lexicographically at every nesting level,
  * no insignificant whitespace,
  * numbers in shortest round-trip decimal form,
  * UTF-8 encoding, single trailing LF.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

from .errors import DomainError


def canonical_dumps(doc: Any) -> str:
    """Serialize to the canonical JSON text form (without the trailing LF)."""
    try:
        return json.dumps(
            doc,
            sort_keys=True,
            separators=(",", ":"),
            ensure_ascii=False,
            allow_nan=False,
        )
    except ValueError as exc:
        raise DomainError(f"document is not canonically serializable: {exc}") from exc


def canonical_bytes(doc: Any) -> bytes:
    """Canonical UTF-8 byte form, LF-terminated. Digests are computed over this."""
    return canonical_dumps(doc).encode("utf-8") + b"\n"


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def canonical_digest(doc: Any) -> str:
    """SHA-256 hex digest of the canonical byte form."""
    return sha256_hex(canonical_bytes(doc))


def digest_with_field(doc: dict, field: str = "digest") -> dict:
    """Return a copy of `doc` carrying its own digest.

    The digest is computed over the document with `field` removed, so a
    stored document can always be re-verified by stripping the field and
    re-hashing.
    """
    body = {k: v for k, v in doc.items() if k != field}
    out = dict(body)
    out[field] = canonical_digest(body)
    return out


def verify_digest_field(doc: dict, field: str = "digest") -> bool:
    """Check that a document's embedded digest matches its content."""
    if field not in doc:
        return False
    body = {k: v for k, v in doc.items() if k != field}
    return canonical_digest(body) == doc[field]
