"""Checks on hypergeometric representations S_1 F_1 + ... + S_n F_n of integrals.

Two statements are tested per representation:

* every non-rational term spans a derivative module of the same dimension
  (rational terms only add rational functions and are ignored);
* that common dimension equals the number of master integrals recorded
  for the catalog entry.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import NamedTuple, Union

from .algebra import RatFun
from .horn import HornSpec, PFQSpec, spec_from_json
from .reduction import BasisReport, basis_count
from .syntax import parse_ratfun

GAMMA_FLAG = "gamma-expressible"


class CatalogError(ValueError):
    pass


class PropositionError(ValueError):
    pass


@dataclass(frozen=True)
class Term:
    prefactor: RatFun
    function: Union[PFQSpec, HornSpec]


@dataclass(frozen=True)
class HyperRepresentation:
    terms: tuple[Term, ...]
    argument_note: str = ""

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ValueError("a representation needs at least one term")


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    representation: HyperRepresentation
    expected_masters: int
    masters_note: str = ""
    provenance: str = ""
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.expected_masters < 1:
            raise ValueError(f"expected_masters must be at least 1 (got {self.expected_masters})")

    @property
    def gamma_expressible(self) -> bool:
        return self.masters_note.startswith(GAMMA_FLAG)


class Uniformity(NamedTuple):
    passed: bool
    counts: list  # BasisReport, or None for an unsupported term


class MasterCount(NamedTuple):
    passed: bool
    computed: int
    expected: int


def check_uniform_basis(rep: HyperRepresentation) -> Uniformity:
    counts: list[BasisReport | None] = []
    for i, term in enumerate(rep.terms):
        if isinstance(term.function, HornSpec):
            counts.append(None)
            continue
        try:
            counts.append(basis_count(term.function))
        except Exception as exc:
            raise PropositionError(f"term {i}: {exc}") from exc
    seen = {c.nontrivial_count for c in counts if c is not None and c.nontrivial_count > 0}
    return Uniformity(len(seen) <= 1, counts)


def _master_count(entry: CatalogEntry, uni: Uniformity) -> MasterCount:
    if not uni.passed:
        raise PropositionError(
            f"{entry.name}: terms disagree on the basis size; inspect check_uniform_basis for the per-term counts"
        )
    nontrivial = [c.nontrivial_count for c in uni.counts if c is not None and c.nontrivial_count > 0]
    if not nontrivial:
        # only Gamma-expressible pieces: the count is not comparable
        return MasterCount(entry.gamma_expressible, 0, entry.expected_masters)
    computed = nontrivial[0]
    return MasterCount(computed == entry.expected_masters, computed, entry.expected_masters)


def check_master_count(entry: CatalogEntry) -> MasterCount:
    """Common basis size (derivative count plus one) against expected_masters."""
    return _master_count(entry, check_uniform_basis(entry.representation))


# ---------------------------------------------------------------------------
# catalog files


def _entry_from_json(obj, index: int) -> CatalogEntry:
    def bad(fieldname, msg):
        return CatalogError(f"entry {index}: field '{fieldname}': {msg}")

    if not isinstance(obj, dict):
        raise CatalogError(f"entry {index}: expected an object")
    name = obj.get("name")
    if not isinstance(name, str) or not name:
        raise bad("name", "must be a non-empty string")
    raw_terms = obj.get("terms")
    if not isinstance(raw_terms, list) or not raw_terms:
        raise bad("terms", "must be a non-empty list")
    terms = []
    for t, raw in enumerate(raw_terms):
        if not isinstance(raw, dict):
            raise bad(f"terms[{t}]", "expected an object")
        try:
            S = parse_ratfun(str(raw.get("S", "1")))
        except ValueError as exc:
            raise bad(f"terms[{t}].S", exc) from None
        if S.is_zero():
            raise bad(f"terms[{t}].S", "prefactor is zero")
        try:
            fn = spec_from_json(raw)
        except ValueError as exc:
            raise bad(f"terms[{t}]", exc) from None
        terms.append(Term(S, fn))
    em = obj.get("expected_masters")
    if not isinstance(em, int) or isinstance(em, bool):
        raise bad("expected_masters", "must be an integer")
    if em < 1:
        raise bad("expected_masters", f"must be at least 1 (got {em})")
    rep = HyperRepresentation(tuple(terms), str(obj.get("argument_note", "")))
    known = {"name", "terms", "expected_masters", "masters_note", "provenance", "argument_note"}
    return CatalogEntry(
        name,
        rep,
        em,
        str(obj.get("masters_note", "")),
        str(obj.get("provenance", "")),
        {k: v for k, v in obj.items() if k not in known},
    )


def parse_catalog(text: str) -> list[CatalogEntry]:
    if not text.strip():
        raise CatalogError("no entries")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"catalog is not valid JSON: {exc}") from None
    raw = data.get("entries") if isinstance(data, dict) else data
    if not isinstance(raw, list):
        raise CatalogError("catalog must be a list of entries or an object with an 'entries' list")
    if not raw:
        raise CatalogError("no entries")
    entries = [_entry_from_json(obj, i) for i, obj in enumerate(raw)]
    seen: dict[str, int] = {}
    for i, e in enumerate(entries):
        if e.name in seen:
            raise CatalogError(f"entry {i}: duplicate name '{e.name}' (first used by entry {seen[e.name]})")
        seen[e.name] = i
    return entries


def load_catalog(path) -> list[CatalogEntry]:
    return parse_catalog(Path(path).read_text())


def default_catalog_path() -> Path:
    return Path(str(resources.files("hornred") / "data" / "catalog.json"))


# ---------------------------------------------------------------------------
# running


def check_entry(entry: CatalogEntry) -> dict:
    out: dict = {"name": entry.name, "expected_masters": entry.expected_masters}
    try:
        uni = check_uniform_basis(entry.representation)
    except PropositionError as exc:
        out.update(passed=False, error=str(exc))
        return out
    out["counts"] = [None if c is None else c.to_json() for c in uni.counts]
    out["uniform"] = uni.passed
    if any(c is None for c in uni.counts):
        out["unsupported_terms"] = [i for i, c in enumerate(uni.counts) if c is None]
    if not uni.passed:
        out.update(passed=False, computed=None)
        return out
    mc = _master_count(entry, uni)
    out.update(passed=mc.passed, computed=mc.computed)
    return out


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("HORNRED_THREADS", "1")))
    except ValueError:
        return 1


def run_catalog(entries: list[CatalogEntry], threads: int | None = None) -> dict:
    """Report with one record per entry, ordered by name."""
    threads = thread_cap() if threads is None else max(1, threads)
    ordered = sorted(entries, key=lambda e: e.name)
    if threads == 1:
        records = [check_entry(e) for e in ordered]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(check_entry, ordered))
    failing = [r["name"] for r in records if not r["passed"]]
    return {"passed": not failing, "failing": failing, "entries": records}
