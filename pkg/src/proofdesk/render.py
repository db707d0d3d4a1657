"""Serializable render model: what a client needs to draw an article.

The model mirrors the article tree (items, steps, nested subproofs) with
per-step obligation ids, statuses and theses, and annotates every identifier
token of the canonical source with its kind and declaration anchor (a local
`#...` anchor or a `/library/...` URI).
"""

from __future__ import annotations

import re

from . import names
from .article import Article, Definition, format_formula, pretty_print
from .obligations import StepRecord
from .parser import KEYWORDS
from .verifier import VerificationReport

IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


def _symbol_table(article: Article) -> dict[str, tuple[str, str | None]]:
    """name -> (kind, anchor) for everything declared in the article."""
    table: dict[str, tuple[str, str | None]] = {}
    table[article.name] = ("article-name", None)
    for var, type_pred in article.reservations:
        table[var] = ("variable", f"#reserve-{var}")
        table.setdefault(type_pred, ("predicate", None))
    for decl in article.functor_decls:
        table[decl.name] = ("functor", f"#func-{decl.name}")
        table.setdefault(decl.result_type, ("predicate", None))
        for param in decl.params:
            table.setdefault(param, ("variable", None))
    for item in article.items:
        table.setdefault(item.label, ("label", f"#label-{item.label}"))
    return table


def _collect_step_labels(steps, table: dict[str, tuple[str, str | None]]) -> None:
    for record in steps:
        if record.label:
            table.setdefault(record.label, ("label", f"#label-{record.label}"))
        _collect_step_labels(record.children, table)


def _annotate_tokens(source: str, table: dict[str, tuple[str, str | None]]) -> list[dict]:
    tokens = []
    for m in IDENT_RE.finditer(source):
        text = m.group()
        if text in KEYWORDS:
            kind, anchor = "keyword", None
        elif text in table:
            kind, anchor = table[text]
        elif text[0].isupper():
            kind, anchor = "variable", None
        elif names.is_library_reference(text):
            kind, anchor = "reference", f"/library/{text}"
        else:
            kind, anchor = "predicate", None
        tokens.append(
            {"start": m.start(), "end": m.end(), "text": text,
             "kind": kind, "anchor": anchor}
        )
    return tokens


def _ref_entry(ref: str, local_labels: set[str]) -> dict:
    if ref in local_labels:
        return {"name": ref, "anchor": f"#label-{ref}"}
    return {"name": ref, "anchor": f"/library/{ref}"}


def _step_node(record: StepRecord, report: VerificationReport,
               local_labels: set[str]) -> dict:
    result = report.obligations.get(record.obligation_id or "")
    if record.kind == "let":
        text = "let " + ", ".join(record.let_variables)
    else:
        prefix = {"assume": "assume ", "thus": "thus ", "aux": ""}[record.kind]
        label = f"{record.label}: " if record.label else ""
        text = f"{prefix}{label}{format_formula(record.formula)}"
    status = result.status.value if result else (
        "skeleton_error" if record.skeleton_error else None
    )
    return {
        "kind": record.kind,
        "text": text,
        "label": record.label,
        "anchor": f"#label-{record.label}" if record.label else None,
        "e_ordinal": record.e_ordinal,
        "obligation_id": record.obligation_id,
        "status": status,
        "millis": result.wall_millis if result else None,
        "refs": [_ref_entry(r, local_labels) for r in record.refs],
        "thesis_after": (
            format_formula(record.thesis_after)
            if record.thesis_after is not None else None
        ),
        "skeleton_error": record.skeleton_error,
        "steps": [_step_node(c, report, local_labels) for c in record.children],
    }


def render_model(article: Article, report: VerificationReport) -> dict:
    """The document served to clients for drawing the verified article."""
    source = pretty_print(article)
    table = _symbol_table(article)
    for item_report in report.items:
        _collect_step_labels(item_report.steps, table)
    local_labels = {
        name for name, (kind, _) in table.items() if kind == "label"
    }

    items = []
    by_label = {item.label: item for item in article.items}
    for item_report in report.items:
        item = by_label[item_report.label]
        kind = "definition" if isinstance(item, Definition) else "theorem"
        items.append(
            {
                "label": item.label,
                "kind": kind,
                "ordinal": item.ordinal,
                "anchor": f"#label-{item.label}",
                "export_name": (
                    names.definition_name(item.ordinal, article.name)
                    if isinstance(item, Definition)
                    else names.theorem_name(item.ordinal, article.name)
                ),
                "formula": format_formula(item.formula),
                "status": item_report.status,
                "error": item_report.error,
                "thesis": format_formula(item.formula),
                "steps": [
                    _step_node(s, report, local_labels) for s in item_report.steps
                ],
            }
        )

    return {
        "article": article.name,
        "ok": report.ok,
        "source": source,
        "tokens": _annotate_tokens(source, table),
        "reservations": [
            {"variable": v, "type": t, "anchor": f"#reserve-{v}"}
            for v, t in article.reservations
        ],
        "functors": [
            {
                "name": d.name,
                "params": list(d.params),
                "result_type": d.result_type,
                "ordinal": d.ordinal,
                "anchor": f"#func-{d.name}",
                "type_axiom": names.functor_type_name(d.ordinal, article.name),
            }
            for d in article.functor_decls
        ],
        "items": items,
    }
