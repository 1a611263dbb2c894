"""Non-fatal problems collected while loading and mining."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Diagnostic:
    level: str  # "warning" | "error"
    source: str
    message: str
    line: int | None = None

    def to_dict(self) -> dict:
        return {"level": self.level, "source": self.source,
                "message": self.message, "line": self.line}


@dataclass
class Diagnostics:
    """Accumulates per-record errors and warnings.

    ``skipped`` counts input records that were dropped because of an error.
    """

    entries: list[Diagnostic] = field(default_factory=list)
    skipped: int = 0

    def warn(self, source: str, message: str, line: int | None = None) -> None:
        log.warning("%s: %s", source, message)
        self.entries.append(Diagnostic("warning", source, message, line))

    def error(self, source: str, message: str, line: int | None = None,
              skip: bool = True) -> None:
        log.error("%s: %s", source, message)
        self.entries.append(Diagnostic("error", source, message, line))
        if skip:
            self.skipped += 1

    @property
    def warnings(self) -> list[Diagnostic]:
        return [d for d in self.entries if d.level == "warning"]

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.entries if d.level == "error"]

    def extend(self, other: "Diagnostics") -> None:
        self.entries.extend(other.entries)
        self.skipped += other.skipped
