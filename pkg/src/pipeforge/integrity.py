"""Seal generated pipeline text and detect manual edits.

A sealed file starts with a digest header comment::

    # pipeforge-digest: v1; sha256=<64 lowercase hex>

The digest covers the canonical body (header stripped, CRLF folded to LF,
exactly one trailing newline), so sealed files stay valid engine input and
re-sealing is idempotent. Running ``verify`` as the first pipeline job
fails the build when the file drifted from its generated state.
"""

from __future__ import annotations

import enum
import hashlib
import re
from dataclasses import dataclass

HEADER_PREFIX = "# pipeforge-digest: v1; sha256="
HEADER_RE = re.compile(r"^# pipeforge-digest: v1; sha256=([0-9a-f]{64})$")


class VerdictKind(enum.Enum):
    SEALED_VALID = "SealedValid"
    TAMPERED = "Tampered"
    UNSEALED = "Unsealed"


@dataclass(frozen=True)
class SealVerdict:
    kind: VerdictKind
    detail: str


def canonicalize(text: str) -> bytes:
    """Return the canonical bytes of *text*.

    Drops the digest header line when present, folds CRLF to LF, and
    guarantees exactly one trailing newline (so "" becomes b"\\n").
    """
    lines = text.split("\n", 1)
    if HEADER_RE.match(lines[0].rstrip("\r")):
        text = lines[1] if len(lines) > 1 else ""
    text = text.replace("\r\n", "\n")
    return (text.rstrip("\n") + "\n").encode("utf-8")


def seal(body: str) -> str:
    """Prefix *body* with its digest header.

    The header is a YAML comment, so the sealed text remains valid input
    for the CI engine. Sealing an already-sealed text yields the same
    output (the old header is excluded from the digest).
    """
    canonical = canonicalize(body)
    if canonical == b"\n":
        raise ValueError("refusing to seal an empty body")
    digest = hashlib.sha256(canonical).hexdigest()
    return HEADER_PREFIX + digest + "\n" + canonical.decode("utf-8")


def verify(text: str) -> SealVerdict:
    """Check a (possibly) sealed text against its embedded digest."""
    first_line = text.split("\n", 1)[0].rstrip("\r")
    match = HEADER_RE.match(first_line)
    if match is None:
        return SealVerdict(VerdictKind.UNSEALED, "no digest header")
    recorded = match.group(1)
    computed = hashlib.sha256(canonicalize(text)).hexdigest()
    if computed != recorded:
        return SealVerdict(
            VerdictKind.TAMPERED,
            f"header sha256={recorded} but canonical body sha256={computed}",
        )
    return SealVerdict(VerdictKind.SEALED_VALID, "digest matches")
