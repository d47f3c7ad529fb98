"""Exception types shared across the package.

Every error raised by pipeforge derives from :class:`PipeforgeError` so
callers (CLI, HTTP service) can map failures to exit codes / status codes
in one place.
"""

from __future__ import annotations


class PipeforgeError(Exception):
    """Base class for all pipeforge errors."""


# --- scanner ---

class PathNotFound(PipeforgeError):
    pass


class NotADirectory(PipeforgeError):
    pass


class TooManyFiles(PipeforgeError):
    pass


# --- catalog ---

class CatalogNotFound(PipeforgeError):
    pass


class VersionNotFound(PipeforgeError):
    pass


class MalformedBlock(PipeforgeError):
    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class GroupNotFound(PipeforgeError):
    pass


class EngineUnsupported(PipeforgeError):
    pass


class MissingParam(PipeforgeError):
    def __init__(self, name: str):
        super().__init__(f"missing value for parameter {name!r}")
        self.name = name


# --- inference ---

class UnknownStage(PipeforgeError):
    pass


class NoCatalogGroup(PipeforgeError):
    def __init__(self, language: str):
        super().__init__(f"no catalog group for language {language!r}")
        self.language = language


# --- renderer ---

class PolicyViolation(PipeforgeError):
    def __init__(self, block: str, reason: str):
        super().__init__(f"block {block!r}: {reason}")
        self.block = block
        self.reason = reason


class UnresolvedRef(PipeforgeError):
    pass


# --- registry ---

class NotFound(PipeforgeError):
    pass


class DuplicateName(PipeforgeError):
    pass


class ReferentialIntegrity(PipeforgeError):
    def __init__(self, entity_id: str, referrers: list[str]):
        super().__init__(
            f"entity {entity_id!r} is referenced by {', '.join(sorted(referrers))}"
        )
        self.entity_id = entity_id
        self.referrers = referrers


class NoTemplatesMatched(PipeforgeError):
    pass


class NeverBreaksEven(PipeforgeError):
    pass


class RegistryBusy(PipeforgeError):
    pass
