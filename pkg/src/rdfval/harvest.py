"""Paged harvesting of remote SPARQL endpoints into local graphs.

A source is drained with ORDER BY ?s ?p ?o / LIMIT / OFFSET pages so a
harvest is reproducible; a harvest is complete exactly when the last page
came back shorter than the page size.
"""
from __future__ import annotations

import gzip
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import urlencode

import requests

from .catalog import Catalog
from .checker import (
    CheckOutcome,
    DEFAULT_BUDGET,
    DEFAULT_LIMIT,
    check,
    mark_source_incomplete,
)
from .graph import Graph, GraphBuilder
from .ntriples import serialize_ntriples
from .packs import PROFILE_CLASSES, load_pack
from .report import SourceOutcomes, outcomes_document, parse_outcomes_document
from .terms import BlankNode, Iri, Literal, RDF_TYPE, Term

RESULTS_MEDIA_TYPE = "application/sparql-results+json"
# Query strings beyond this URL length go as a form-encoded POST instead.
MAX_GET_URL = 2048

DEFAULT_PAGE_SIZE = 10_000
DEFAULT_TIMEOUT = 30.0
DEFAULT_MAX_RETRIES = 3
BACKOFF_BASE = 1.0
BACKOFF_FACTOR = 2.0

COMPLETE = "complete"
PARTIAL = "partial"
UNAVAILABLE = "unavailable"


@dataclass(frozen=True)
class Source:
    abbreviation: str
    endpoint_url: str
    vocabulary: str | None = None
    page_size: int = DEFAULT_PAGE_SIZE
    timeout: float = DEFAULT_TIMEOUT
    max_retries: int = DEFAULT_MAX_RETRIES


_SOURCE_KEYS = {
    "abbreviation",
    "endpoint-url",
    "vocabulary",
    "page-size",
    "timeout",
    "max-retries",
}


def load_sources(data) -> list[Source]:
    """Load a sources file (bytes, text, or a binary file object)."""
    if hasattr(data, "read"):
        data = data.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ValueError(f"sources file is not valid JSON: {exc}") from None
    if not isinstance(doc, list):
        raise ValueError("sources file must be a JSON array")

    problems: list[str] = []
    sources: list[Source] = []
    seen: set[str] = set()
    for i, obj in enumerate(doc):
        where = f"source #{i + 1}"
        if not isinstance(obj, dict):
            problems.append(f"{where}: must be an object")
            continue
        for key in obj:
            if key not in _SOURCE_KEYS:
                problems.append(f"{where}: unknown field {key!r}")
        abbr = obj.get("abbreviation")
        url = obj.get("endpoint-url")
        if not isinstance(abbr, str) or not abbr:
            problems.append(f"{where}: abbreviation must be a non-empty string")
            continue
        where = f"source {abbr!r}"
        if abbr in seen:
            problems.append(f"{where}: duplicate abbreviation")
            continue
        seen.add(abbr)
        if not isinstance(url, str) or not url.startswith(("http://", "https://")):
            problems.append(f"{where}: endpoint-url must be an http(s) URL")
            continue
        vocabulary = obj.get("vocabulary")
        if vocabulary is not None and not isinstance(vocabulary, str):
            problems.append(f"{where}: vocabulary must be a string")
            continue
        page_size = obj.get("page-size", DEFAULT_PAGE_SIZE)
        if not isinstance(page_size, int) or isinstance(page_size, bool) or page_size < 1:
            problems.append(f"{where}: page-size must be a positive integer")
            continue
        timeout = obj.get("timeout", DEFAULT_TIMEOUT)
        if not isinstance(timeout, (int, float)) or isinstance(timeout, bool) or timeout <= 0:
            problems.append(f"{where}: timeout must be a positive number")
            continue
        retries = obj.get("max-retries", DEFAULT_MAX_RETRIES)
        if not isinstance(retries, int) or isinstance(retries, bool) or retries < 0:
            problems.append(f"{where}: max-retries must be a non-negative integer")
            continue
        sources.append(
            Source(abbr, url, vocabulary, page_size, float(timeout), retries)
        )
    if problems:
        raise ValueError("invalid sources file:\n" + "\n".join(problems))
    return sources


@dataclass(frozen=True)
class HarvestResult:
    source: Source
    status: str
    graph: Graph
    pages_fetched: int
    reason: str | None = None


class _PageFailure(Exception):
    pass


def _page_query(page_size: int, offset: int) -> str:
    return (
        "SELECT ?s ?p ?o WHERE { ?s ?p ?o } "
        f"ORDER BY ?s ?p ?o LIMIT {page_size} OFFSET {offset}"
    )


def _term_from_binding(obj) -> Term:
    kind = obj["type"]
    value = obj["value"]
    if kind == "uri":
        return Iri(value)
    if kind == "bnode":
        return BlankNode(value)
    if kind in ("literal", "typed-literal"):
        lang = obj.get("xml:lang")
        if lang:
            return Literal(value, language=lang)
        datatype = obj.get("datatype")
        if datatype:
            return Literal(value, Iri(datatype))
        return Literal(value)
    raise ValueError(f"unknown term type {kind!r}")


def _parse_rows(payload: bytes) -> list[tuple[Term, Iri, Term]]:
    doc = json.loads(payload)
    rows: list[tuple[Term, Iri, Term]] = []
    for binding in doc["results"]["bindings"]:
        s = _term_from_binding(binding["s"])
        p = _term_from_binding(binding["p"])
        o = _term_from_binding(binding["o"])
        if isinstance(s, Literal) or not isinstance(p, Iri):
            raise ValueError("binding is not a well-formed triple")
        rows.append((s, p, o))
    return rows


def _fetch_page(
    session, source: Source, offset: int, sleep
) -> list[tuple[Term, Iri, Term]]:
    query = _page_query(source.page_size, offset)
    headers = {"Accept": RESULTS_MEDIA_TYPE}
    get_url = source.endpoint_url + "?" + urlencode({"query": query})
    last_reason = "no attempt made"
    for attempt in range(source.max_retries + 1):
        if attempt:
            sleep(BACKOFF_BASE * BACKOFF_FACTOR ** (attempt - 1))
        try:
            if len(get_url) <= MAX_GET_URL:
                response = session.get(
                    source.endpoint_url,
                    params={"query": query},
                    headers=headers,
                    timeout=source.timeout,
                )
            else:
                response = session.post(
                    source.endpoint_url,
                    data={"query": query},
                    headers=headers,
                    timeout=source.timeout,
                )
        except requests.RequestException as exc:
            last_reason = f"request failed: {exc}"
            continue
        if response.status_code != 200:
            last_reason = f"HTTP {response.status_code}"
            continue
        try:
            return _parse_rows(response.content)
        except (KeyError, TypeError, ValueError) as exc:
            last_reason = f"malformed result set: {exc}"
            continue
    raise _PageFailure(last_reason)


def harvest(source: Source, *, session=None, sleep=time.sleep) -> HarvestResult:
    """Drain a source page by page.

    A failing first page makes the source unavailable; a failure after at
    least one page yields a partial result with everything fetched so far.
    """
    owns_session = session is None
    if owns_session:
        session = requests.Session()
    builder = GraphBuilder()
    pages = 0
    offset = 0
    try:
        while True:
            try:
                rows = _fetch_page(session, source, offset, sleep)
            except _PageFailure as exc:
                status = UNAVAILABLE if pages == 0 else PARTIAL
                return HarvestResult(
                    source, status, builder.freeze(name=source.abbreviation), pages, str(exc)
                )
            pages += 1
            for s, p, o in rows:
                builder.add(s, p, o)
            if len(rows) < source.page_size:
                return HarvestResult(
                    source, COMPLETE, builder.freeze(name=source.abbreviation), pages
                )
            offset += source.page_size
    finally:
        if owns_session:
            session.close()


def profile(g: Graph, classes) -> tuple[int, ...]:
    """Instance counts for each class, in the given order."""
    return tuple(g.count(None, RDF_TYPE, cls) for cls in classes)


# ---------------------------------------------------------------------------
# Campaigns


@dataclass(frozen=True)
class SourceRun:
    source: Source
    status: str
    pages_fetched: int
    triples: int
    reason: str | None
    outcomes: tuple[CheckOutcome, ...]
    from_cache: bool = False


def _write_data(path: Path, graph: Graph) -> None:
    with path.open("wb") as f:
        # Fixed mtime keeps re-harvests byte-identical for identical data.
        with gzip.GzipFile(fileobj=f, mode="wb", mtime=0) as z:
            z.write(serialize_ntriples(graph))


def read_data(path: Path) -> Graph:
    from .ntriples import parse_ntriples

    with gzip.open(path, "rb") as z:
        return parse_ntriples(z.read(), name=path.parent.name)


def _profile_document(source: Source, result: HarvestResult, classes) -> dict:
    counts = profile(result.graph, classes)
    return {
        "source": source.abbreviation,
        "endpoint-url": source.endpoint_url,
        "status": result.status,
        "pages-fetched": result.pages_fetched,
        "reason": result.reason,
        "triples": len(result.graph),
        "classes": {cls.text: n for cls, n in zip(classes, counts)},
    }


def run_campaign(
    sources,
    out_dir,
    *,
    catalogs: dict[str, Catalog] | None = None,
    limit: int = DEFAULT_LIMIT,
    budget: float = DEFAULT_BUDGET,
    concurrency: int = 4,
    do_check: bool = True,
    session_factory=None,
    sleep=time.sleep,
    log=None,
) -> list[SourceRun]:
    """Harvest, check, and persist every source under ``out_dir``.

    Each source gets ``<abbr>/data.nt.gz``, ``profile.json`` and (when
    checking) ``outcomes.json``.  A source already stored as complete is
    not fetched again; if only its outcomes are missing they are computed
    from the stored data.  Partial harvests keep their outcomes but flag
    every result as source-incomplete.  ``do_check=False`` harvests and
    profiles only.
    """
    sources = list(sources)
    catalogs = dict(catalogs or {})
    if do_check:
        missing = [s.abbreviation for s in sources if not s.vocabulary]
        if missing:
            raise ValueError(
                "sources without a vocabulary cannot be checked: " + ", ".join(missing)
            )
        for s in sources:
            if s.vocabulary not in catalogs:
                catalogs[s.vocabulary] = load_pack(s.vocabulary)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    def say(message: str) -> None:
        if log is not None:
            log(message)

    def check_and_store(source: Source, path: Path, status: str, graph: Graph):
        outcomes = tuple(
            check(graph, catalogs[source.vocabulary], limit=limit, budget=budget)
        )
        if status == PARTIAL:
            outcomes = tuple(mark_source_incomplete(outcomes, parts_missing=1))
        column = SourceOutcomes(source.abbreviation, source.vocabulary, status, outcomes)
        path.write_text(
            json.dumps(outcomes_document(column), indent=2) + "\n", encoding="utf-8"
        )
        return outcomes

    def run_one(source: Source) -> SourceRun:
        sdir = out / source.abbreviation
        data_path = sdir / "data.nt.gz"
        profile_path = sdir / "profile.json"
        outcomes_path = sdir / "outcomes.json"

        prof = None
        if data_path.exists() and profile_path.exists():
            stored = json.loads(profile_path.read_text(encoding="utf-8"))
            if stored.get("status") == COMPLETE:
                prof = stored
        if prof is not None:
            if not do_check:
                say(f"{source.abbreviation}: already complete, skipped")
                return SourceRun(
                    source, COMPLETE, prof["pages-fetched"], prof["triples"], None, (),
                    from_cache=True,
                )
            if outcomes_path.exists():
                column = parse_outcomes_document(
                    json.loads(outcomes_path.read_text(encoding="utf-8"))
                )
                say(f"{source.abbreviation}: already complete, skipped")
                return SourceRun(
                    source, COMPLETE, prof["pages-fetched"], prof["triples"], None,
                    column.outcomes, from_cache=True,
                )
            outcomes = check_and_store(
                source, outcomes_path, COMPLETE, read_data(data_path)
            )
            say(f"{source.abbreviation}: checked stored data")
            return SourceRun(
                source, COMPLETE, prof["pages-fetched"], prof["triples"], None,
                outcomes, from_cache=True,
            )

        session = session_factory() if session_factory is not None else None
        result = harvest(source, session=session, sleep=sleep)
        sdir.mkdir(parents=True, exist_ok=True)
        _write_data(data_path, result.graph)
        classes = PROFILE_CLASSES.get(source.vocabulary, ())
        profile_path.write_text(
            json.dumps(_profile_document(source, result, classes), indent=2) + "\n",
            encoding="utf-8",
        )
        outcomes: tuple[CheckOutcome, ...] = ()
        if do_check and result.status != UNAVAILABLE:
            outcomes = check_and_store(
                source, outcomes_path, result.status, result.graph
            )
        elif do_check:
            column = SourceOutcomes(
                source.abbreviation, source.vocabulary, UNAVAILABLE, ()
            )
            outcomes_path.write_text(
                json.dumps(outcomes_document(column), indent=2) + "\n",
                encoding="utf-8",
            )
        say(
            f"{source.abbreviation}: {result.status}, {result.pages_fetched} page(s), "
            f"{len(result.graph)} triples"
        )
        return SourceRun(
            source,
            result.status,
            result.pages_fetched,
            len(result.graph),
            result.reason,
            outcomes,
        )

    if concurrency <= 1 or len(sources) <= 1:
        return [run_one(s) for s in sources]
    with ThreadPoolExecutor(max_workers=concurrency) as pool:
        return list(pool.map(run_one, sources))
