"""Persistent store of exported items: the artifact's miniature library.

Each exported item keeps its name, kind, closed guarded formula, exact
symbol set, and (for type axioms) the functor it declares.  The store
persists as JSON with formulas in TPTP syntax; symbols are recomputed and
verified on load.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from . import fol, names, tptp
from .article import Article, Definition, FunctorDecl, Theorem
from .errors import ProofDeskError


class ExportError(ProofDeskError):
    """Exporting an unverified item without the force flag."""


@dataclass(frozen=True)
class LibraryItem:
    name: str
    kind: str  # names.THEOREM / DEFINITION / FUNCTOR_TYPE
    formula: fol.Formula
    symbols: frozenset[str]
    article: str
    declares: str | None = None  # functor a dt_k item types

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "formula": tptp.format_formula(self.formula),
            "symbols": sorted(self.symbols),
            "article": self.article,
            "declares": self.declares,
        }


def functor_type_axiom(decl: FunctorDecl, reservations: dict[str, str]) -> fol.Formula:
    """`result_type(f(args))` universally quantified over the declaration's
    parameters, guarded by their reserved type predicates."""
    application = fol.make_app(decl.name, [fol.Var(v) for v in decl.params])
    conclusion = fol.Atom(decl.result_type, (application,))
    if not decl.params:
        return conclusion
    guards = [
        fol.Atom(reservations[v], (fol.Var(v),))
        for v in decl.params
        if v in reservations
    ]
    body = fol.Implies(fol.conjoin(guards), conclusion) if guards else conclusion
    return fol.ForAll(decl.params, body)


def _item(name: str, kind: str, formula: fol.Formula, article: str,
          declares: str | None = None) -> LibraryItem:
    return LibraryItem(
        name, kind, formula, frozenset(fol.symbols(formula)), article, declares
    )


def export_article(article: Article, report=None, force: bool = False) -> list[LibraryItem]:
    """Exported items of an article: theorems, definitions, functor types.

    Formulas are relativized: quantifiers pick up guards from the article's
    reservations.  When a verification report is given, any failed item
    blocks the export unless `force` is set.
    """
    if report is not None and not force:
        failed = [ir.label for ir in report.items if ir.status == "failed"]
        if failed:
            raise ExportError(
                "cannot export article with failed items: " + ", ".join(failed)
            )
    reservations = article.reservation_map()
    out: list[LibraryItem] = []
    for decl in article.functor_decls:
        out.append(
            _item(
                names.functor_type_name(decl.ordinal, article.name),
                names.FUNCTOR_TYPE,
                functor_type_axiom(decl, reservations),
                article.name,
                declares=decl.name,
            )
        )
    for item in article.items:
        guarded = fol.relativize(item.formula, reservations)
        if isinstance(item, Definition):
            out.append(
                _item(
                    names.definition_name(item.ordinal, article.name),
                    names.DEFINITION,
                    guarded,
                    article.name,
                )
            )
        elif isinstance(item, Theorem):
            out.append(
                _item(
                    names.theorem_name(item.ordinal, article.name),
                    names.THEOREM,
                    guarded,
                    article.name,
                )
            )
    return out


class LibraryStore:
    """Name-indexed collection of exported items from installed articles."""

    def __init__(self) -> None:
        self.articles: dict[str, list[LibraryItem]] = {}
        self._by_name: dict[str, LibraryItem] = {}
        self._dt_index: dict[str, LibraryItem] = {}

    def __len__(self) -> int:
        return len(self._by_name)

    def add_article(self, article_name: str, items: list[LibraryItem]) -> None:
        if article_name in self.articles:
            raise ProofDeskError(f"article '{article_name}' already installed")
        for item in items:
            if item.name in self._by_name:
                raise ProofDeskError(f"library name collision: {item.name}")
        self.articles[article_name] = list(items)
        for item in items:
            self._by_name[item.name] = item
            if item.declares is not None:
                current = self._dt_index.get(item.declares)
                # Deterministic pick when several articles declare one symbol.
                if current is None or item.name < current.name:
                    self._dt_index[item.declares] = item

    def get(self, name: str) -> LibraryItem | None:
        return self._by_name.get(name)

    def has(self, name: str) -> bool:
        return name in self._by_name

    def dt_for(self, symbol: str) -> LibraryItem | None:
        """The type axiom declaring a functor/constant symbol, if any."""
        return self._dt_index.get(symbol)

    def all_items(self) -> list[LibraryItem]:
        return [item for items in self.articles.values() for item in items]

    def all_names(self) -> list[str]:
        return sorted(self._by_name)

    # -- persistence ---------------------------------------------------------

    def save(self, path: str | Path) -> None:
        doc = {
            "articles": {
                name: [item.to_dict() for item in items]
                for name, items in sorted(self.articles.items())
            }
        }
        path = Path(path)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
        tmp.replace(path)

    @classmethod
    def load(cls, path: str | Path) -> "LibraryStore":
        doc = json.loads(Path(path).read_text())
        store = cls()
        for article_name, raw_items in doc["articles"].items():
            items = []
            for raw in raw_items:
                formula = tptp.parse_tptp_formula(raw["formula"])
                symbols = frozenset(fol.symbols(formula))
                if symbols != frozenset(raw["symbols"]):
                    raise ProofDeskError(
                        f"symbol set mismatch for {raw['name']} on load"
                    )
                items.append(
                    LibraryItem(
                        raw["name"],
                        raw["kind"],
                        formula,
                        symbols,
                        raw["article"],
                        raw.get("declares"),
                    )
                )
            store.add_article(article_name, items)
        return store
