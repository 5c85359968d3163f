"""Run settings shared by the command line and the scripts."""

from __future__ import annotations

from dataclasses import dataclass, fields


@dataclass(frozen=True)
class Settings:
    order: int = 50  # series / verification order
    rel_tol: float = 1e-10  # numeric stopping tolerance
    term_cap: int = 10**6  # maximum number of summed terms
    catalog: str | None = None  # catalog file for `check`; None means the shipped one
    fmt: str = "json"

    def __post_init__(self):
        if self.order < 0:
            raise ValueError(f"order must be non-negative (got {self.order})")
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive (got {self.rel_tol})")
        if self.term_cap < 1:
            raise ValueError(f"term_cap must be at least 1 (got {self.term_cap})")
        if self.fmt not in ("json", "text"):
            raise ValueError(f"unknown output format {self.fmt!r}")

    @classmethod
    def from_namespace(cls, ns) -> "Settings":
        values = {f.name: getattr(ns, f.name) for f in fields(cls) if hasattr(ns, f.name)}
        if hasattr(ns, "format"):
            values["fmt"] = ns.format
        return cls(**values)
