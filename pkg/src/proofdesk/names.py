"""The library naming scheme for exported and generated formulas.

Every name encodes (kind, ordinal, article) and parses back losslessly:

  t<N>_<article>              theorem N of an article
  d<N>_<article>              definition N of an article
  dt_k<N>_<article>           type axiom of the article's N-th functor
  dt_c<J>_<T>__<article>      type axiom of local constant J in theorem T's proof
  e<K>_<T>__<article>         proposition K inside theorem T's proof
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import NameSchemeError

THEOREM = "theorem"
DEFINITION = "definition"
FUNCTOR_TYPE = "functor-type"
CONSTANT_TYPE = "constant-type"
LOCAL_PROPOSITION = "local-proposition"

_ARTICLE = r"[a-z][a-z0-9_]*"
_PATTERNS = [
    (THEOREM, re.compile(rf"t(?P<n>[1-9]\d*)_(?P<article>{_ARTICLE})\Z")),
    (DEFINITION, re.compile(rf"d(?P<n>[1-9]\d*)_(?P<article>{_ARTICLE})\Z")),
    (FUNCTOR_TYPE, re.compile(rf"dt_k(?P<n>[1-9]\d*)_(?P<article>{_ARTICLE})\Z")),
    (
        CONSTANT_TYPE,
        re.compile(
            rf"dt_c(?P<n>[1-9]\d*)_(?P<item>[1-9]\d*)__(?P<article>{_ARTICLE})\Z"
        ),
    ),
    (
        LOCAL_PROPOSITION,
        re.compile(
            rf"e(?P<n>[1-9]\d*)_(?P<item>[1-9]\d*)__(?P<article>{_ARTICLE})\Z"
        ),
    ),
]


@dataclass(frozen=True)
class ParsedName:
    kind: str
    ordinal: int
    article: str
    item: int | None = None  # theorem ordinal, for proof-local names

    def format(self) -> str:
        return format_name(self.kind, self.ordinal, self.article, self.item)


def format_name(kind: str, ordinal: int, article: str, item: int | None = None) -> str:
    if kind == THEOREM:
        return f"t{ordinal}_{article}"
    if kind == DEFINITION:
        return f"d{ordinal}_{article}"
    if kind == FUNCTOR_TYPE:
        return f"dt_k{ordinal}_{article}"
    if kind == CONSTANT_TYPE:
        assert item is not None
        return f"dt_c{ordinal}_{item}__{article}"
    if kind == LOCAL_PROPOSITION:
        assert item is not None
        return f"e{ordinal}_{item}__{article}"
    raise NameSchemeError(f"unknown name kind: {kind}")


def theorem_name(n: int, article: str) -> str:
    return format_name(THEOREM, n, article)


def definition_name(n: int, article: str) -> str:
    return format_name(DEFINITION, n, article)


def functor_type_name(k: int, article: str) -> str:
    return format_name(FUNCTOR_TYPE, k, article)


def constant_type_name(j: int, theorem_ordinal: int, article: str) -> str:
    return format_name(CONSTANT_TYPE, j, article, theorem_ordinal)


def local_proposition_name(k: int, theorem_ordinal: int, article: str) -> str:
    return format_name(LOCAL_PROPOSITION, k, article, theorem_ordinal)


def parse_name(name: str) -> ParsedName:
    """Inverse of format_name; raises NameSchemeError on anything else.

    The five patterns are prefix-disjoint (t<digit>, d<digit>, dt_k, dt_c,
    e<digit>), so at most one can match.
    """
    for kind, pattern in _PATTERNS:
        m = pattern.match(name)
        if m:
            item = int(m.group("item")) if "item" in m.groupdict() else None
            return ParsedName(kind, int(m.group("n")), m.group("article"), item)
    raise NameSchemeError(f"not a library-scheme name: {name!r}")


def is_library_reference(ref: str) -> bool:
    """True for references that name an exported theorem or definition."""
    try:
        parsed = parse_name(ref)
    except NameSchemeError:
        return False
    return parsed.kind in (THEOREM, DEFINITION)
