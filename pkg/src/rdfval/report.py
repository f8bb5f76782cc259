"""Rendering of check outcomes as matrices and summary tables.

All renderers are pure text functions so a re-run over the same inputs
produces byte-identical files.  CSV output follows RFC 4180 (CRLF rows,
minimal quoting); Markdown output adds thousands separators.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .catalog import CLASSIFICATION_KEYS, Catalog, classify, round_percentage
from .checker import (
    CheckOutcome,
    ENGINE_FAILURE,
    NOT_IMPLEMENTED_STATUS,
    OK,
    SOURCE_INCOMPLETE,
    TRUNCATED,
    VIOLATED,
)

_STATUSES = (OK, VIOLATED, TRUNCATED, ENGINE_FAILURE, NOT_IMPLEMENTED_STATUS, SOURCE_INCOMPLETE)


@dataclass(frozen=True)
class SourceOutcomes:
    """One matrix column: everything one source produced for one pack."""

    name: str
    pack: str | None
    harvest_status: str
    outcomes: tuple[CheckOutcome, ...]


def outcomes_document(column: SourceOutcomes) -> dict:
    return {
        "source": column.name,
        "pack": column.pack,
        "harvest-status": column.harvest_status,
        "outcomes": [
            {
                "constraint-id": o.constraint_id,
                "status": o.status,
                "count": o.count,
                "limit": o.limit,
                "reason": o.reason,
                "parts-missing": o.parts_missing,
            }
            for o in column.outcomes
        ],
    }


def parse_outcomes_document(doc) -> SourceOutcomes:
    try:
        outcomes = tuple(
            CheckOutcome(
                constraint_id=o["constraint-id"],
                status=o["status"],
                count=o.get("count", 0),
                limit=o.get("limit"),
                reason=o.get("reason"),
                parts_missing=o.get("parts-missing"),
            )
            for o in doc["outcomes"]
        )
        column = SourceOutcomes(
            doc["source"], doc.get("pack"), doc.get("harvest-status", "complete"), outcomes
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed outcomes document: {exc}") from None
    for o in outcomes:
        if o.status not in _STATUSES:
            raise ValueError(f"malformed outcomes document: unknown status {o.status!r}")
    return column


# ---------------------------------------------------------------------------
# Cells and tables


def _number(n: int, thousands: bool) -> str:
    return f"{n:,}" if thousands else str(n)


def cell_text(outcome: CheckOutcome | None, *, thousands: bool) -> str:
    """One matrix cell.  A constraint with no outcome at all (for example
    from an unavailable source) renders as a failure."""
    if outcome is None or outcome.status == ENGINE_FAILURE:
        return "✗"
    if outcome.status == OK:
        return "✓"
    if outcome.status == VIOLATED:
        return _number(outcome.count, thousands)
    if outcome.status == TRUNCATED:
        bound = outcome.limit if outcome.limit is not None else outcome.count
        return ">" + _number(bound, thousands)
    if outcome.status == NOT_IMPLEMENTED_STATUS:
        return "(!)"
    if outcome.status == SOURCE_INCOMPLETE:
        return f"({_number(outcome.count, thousands)})"
    raise ValueError(f"unknown outcome status {outcome.status!r}")


def _csv_table(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _md_table(header: list[str], rows: list[list[str]]) -> str:
    lines = [
        "| " + " | ".join(header) + " |",
        "| " + " | ".join("---" for _ in header) + " |",
    ]
    for row in rows:
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"


def _table(header, rows, fmt: str) -> str:
    if fmt == "csv":
        return _csv_table(header, rows)
    if fmt == "md":
        return _md_table(header, rows)
    raise ValueError(f"unknown format {fmt!r}; expected 'csv' or 'md'")


def render_matrix(catalog: Catalog, columns, fmt: str = "md") -> str:
    """Constraints as rows (catalog order, with severity stars), sources as
    columns."""
    columns = list(columns)
    thousands = fmt == "md"
    header = ["constraint", "severity"] + [c.name for c in columns]
    by_column = [
        {o.constraint_id: o for o in col.outcomes} for col in columns
    ]
    rows = []
    for c in catalog:
        row = [c.id, c.severity.superscript]
        for lookup in by_column:
            row.append(cell_text(lookup.get(c.id), thousands=thousands))
        rows.append(row)
    return _table(header, rows, fmt)


# ---------------------------------------------------------------------------
# Aggregate table

_COUNTED = (VIOLATED, TRUNCATED, SOURCE_INCOMPLETE)


def _violation_fractions(catalog: Catalog, columns) -> tuple[int, dict[str, Fraction]]:
    counts = {key: 0 for key in CLASSIFICATION_KEYS}
    total = 0
    for col in columns:
        for o in col.outcomes:
            if o.status not in _COUNTED or not o.count:
                continue
            c = catalog.get(o.constraint_id)
            if c is None:
                continue
            total += o.count
            for key in CLASSIFICATION_KEYS[:3]:
                if key in c.expressivity:
                    counts[key] += o.count
            counts[c.severity.json_name] += o.count
    fractions = {
        key: Fraction(counts[key], total) if total else Fraction(0)
        for key in CLASSIFICATION_KEYS
    }
    return total, fractions


def render_aggregate(groups, fmt: str = "md") -> str:
    """Constraint (C) and violation (CV) breakdowns per vocabulary plus an
    unweighted-mean Total pair.

    ``groups`` is an iterable of (label, catalog, columns).
    """
    groups = list(groups)
    thousands = fmt == "md"
    header = ["measure"]
    c_fracs: list[dict[str, Fraction]] = []
    cv_fracs: list[dict[str, Fraction]] = []
    c_abs: list[int] = []
    cv_abs: list[int] = []
    for label, catalog, columns in groups:
        header += [f"{label} C", f"{label} CV"]
        summary = classify(catalog)
        vocab = catalog.vocabularies()[0]
        breakdown = summary.per_vocabulary[vocab]
        c_abs.append(breakdown.total)
        c_fracs.append({key: breakdown.fraction(key) for key in CLASSIFICATION_KEYS})
        total, fractions = _violation_fractions(catalog, columns)
        cv_abs.append(total)
        cv_fracs.append(fractions)
    header += ["Total C", "Total CV"]

    def mean(fracs: list[dict[str, Fraction]], key: str) -> Fraction:
        if not fracs:
            return Fraction(0)
        return sum((f[key] for f in fracs), Fraction(0)) / len(fracs)

    rows = [["total"]]
    for ca, cva in zip(c_abs, cv_abs):
        rows[0] += [_number(ca, thousands), _number(cva, thousands)]
    rows[0] += [_number(sum(c_abs), thousands), _number(sum(cv_abs), thousands)]
    for key in CLASSIFICATION_KEYS:
        row = [f"{key} %"]
        for cf, cvf in zip(c_fracs, cv_fracs):
            row += [round_percentage(cf[key]), round_percentage(cvf[key])]
        row += [
            round_percentage(mean(c_fracs, key)),
            round_percentage(mean(cv_fracs, key)),
        ]
        rows.append(row)
    return _table(header, rows, fmt)


def summarize_counts(rows, fmt: str = "md") -> str:
    """Sources and triples per vocabulary with a computed Total row."""
    rows = list(rows)
    thousands = fmt == "md"
    header = ["vocabulary", "sources", "triples"]
    body = [
        [label, _number(sources, thousands), _number(triples, thousands)]
        for label, sources, triples in rows
    ]
    body.append(
        [
            "Total",
            _number(sum(r[1] for r in rows), thousands),
            _number(sum(r[2] for r in rows), thousands),
        ]
    )
    return _table(header, body, fmt)


# ---------------------------------------------------------------------------
# Campaign directories


def render_campaign(out_dir) -> dict[str, str]:
    """Render every report file for a campaign directory.

    Returns {file name: content}; the caller decides where to write.  The
    scan order is sorted, so re-rendering the same directory is
    byte-identical.
    """
    from .packs import load_pack

    out = Path(out_dir)
    if not out.is_dir():
        raise ValueError(f"{out} is not a directory")
    scanned: list[tuple[SourceOutcomes, int]] = []
    for sub in sorted(p for p in out.iterdir() if p.is_dir()):
        outcomes_path = sub / "outcomes.json"
        if not outcomes_path.exists():
            continue
        column = parse_outcomes_document(
            json.loads(outcomes_path.read_text(encoding="utf-8"))
        )
        triples = 0
        profile_path = sub / "profile.json"
        if profile_path.exists():
            triples = json.loads(profile_path.read_text(encoding="utf-8")).get("triples", 0)
        scanned.append((column, triples))
    if not scanned:
        raise ValueError(f"no outcomes.json found under {out}")

    grouped: dict[str, list[tuple[SourceOutcomes, int]]] = {}
    for column, triples in scanned:
        if column.pack is None:
            raise ValueError(
                f"source {column.name!r} has no pack recorded; matrices need one"
            )
        grouped.setdefault(column.pack, []).append((column, triples))

    files: dict[str, str] = {}
    aggregate_groups = []
    counts_rows = []
    for pack, members in grouped.items():
        catalog = load_pack(pack)
        vocabulary = catalog.vocabularies()[0]
        columns = [column for column, _ in members]
        for fmt in ("csv", "md"):
            files[f"{pack}-matrix.{fmt}"] = render_matrix(catalog, columns, fmt)
        aggregate_groups.append((vocabulary, catalog, columns))
        counts_rows.append(
            (vocabulary, len(members), sum(triples for _, triples in members))
        )
    for fmt in ("csv", "md"):
        files[f"aggregate.{fmt}"] = render_aggregate(aggregate_groups, fmt)
        files[f"counts.{fmt}"] = summarize_counts(counts_rows, fmt)
    return files
