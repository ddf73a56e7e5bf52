"""Lexical BM25 retrieval over the bundled methodology corpus.

Snippets live as UTF-8 text files with a small front matter (id, title,
tags, blank line, body). Tokenization lowercases, splits on
non-alphanumerics, and drops single-character tokens; two-character
terms like "pc" are kept.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DuplicateId

K1 = 1.2
B = 0.75

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    return [t for t in _TOKEN_RE.findall(text.lower()) if len(t) >= 2]


@dataclass(frozen=True)
class Snippet:
    id: str
    title: str
    body: str
    tags: tuple[str, ...] = ()

    def text(self) -> str:
        return " ".join((self.title, self.body, " ".join(self.tags)))


class Index:
    """Immutable BM25 index over a snippet corpus."""

    def __init__(self, corpus: Sequence[Snippet]):
        if not corpus:
            raise ValueError("corpus must be non-empty")
        ids = [s.id for s in corpus]
        if len(set(ids)) != len(ids):
            dup = next(i for i in ids if ids.count(i) > 1)
            raise DuplicateId(f"duplicate snippet id {dup!r}")
        self.snippets = {s.id: s for s in corpus}
        self._order = tuple(ids)
        self._tf: dict[str, Counter] = {}
        self._lengths: dict[str, int] = {}
        df: Counter = Counter()
        for s in corpus:
            tokens = tokenize(s.text())
            tf = Counter(tokens)
            self._tf[s.id] = tf
            self._lengths[s.id] = len(tokens)
            for term in tf:
                df[term] += 1
        self._df = dict(df)
        self.n_docs = len(corpus)
        self.avg_length = sum(self._lengths.values()) / self.n_docs

    def idf(self, term: str) -> float:
        df = self._df.get(term, 0)
        return math.log(1.0 + (self.n_docs - df + 0.5) / (df + 0.5))

    def score(self, doc_id: str, query_tokens: Iterable[str]) -> float:
        tf = self._tf[doc_id]
        dl = self._lengths[doc_id]
        norm = K1 * (1 - B + B * dl / self.avg_length)
        total = 0.0
        for term in query_tokens:
            f = tf.get(term, 0)
            if f == 0:
                continue
            total += self.idf(term) * f * (K1 + 1) / (f + norm)
        return total

    def search(self, query: str, k: int) -> list[tuple[str, float]]:
        if k < 1:
            raise ValueError("k must be positive")
        tokens = tokenize(query)
        scored = [
            (doc_id, self.score(doc_id, tokens)) for doc_id in self._order
        ]
        ranked = sorted(
            (item for item in scored if item[1] > 0),
            key=lambda item: (-item[1], item[0]),
        )
        return ranked[:k]


def build_index(corpus: Sequence[Snippet]) -> Index:
    return Index(corpus)


def search(index: Index, query: str, k: int) -> list[tuple[str, float]]:
    return index.search(query, k)


def parse_snippet(text: str, fallback_id: str = "") -> Snippet:
    """Parse the front-matter snippet format (id:, title:, tags:, blank, body)."""
    lines = text.splitlines()
    meta = {"id": fallback_id, "title": "", "tags": ""}
    body_start = 0
    for idx, line in enumerate(lines):
        if not line.strip():
            body_start = idx + 1
            break
        key, _, value = line.partition(":")
        key = key.strip().lower()
        if key in meta:
            meta[key] = value.strip()
        body_start = idx + 1
    body = "\n".join(lines[body_start:]).strip()
    if not meta["id"]:
        raise ValueError("snippet missing id")
    if not body:
        raise ValueError(f"snippet {meta['id']!r} has an empty body")
    tags = tuple(t.strip() for t in meta["tags"].split(",") if t.strip())
    return Snippet(id=meta["id"], title=meta["title"], body=body, tags=tags)


def load_corpus(directory: str | Path) -> list[Snippet]:
    """Load all .txt snippets from a directory, sorted by filename."""
    directory = Path(directory)
    snippets = []
    for path in sorted(directory.glob("*.txt")):
        snippets.append(parse_snippet(path.read_text("utf-8"), path.stem))
    if not snippets:
        raise ValueError(f"no snippets found under {directory}")
    return snippets


def default_corpus() -> list[Snippet]:
    """The corpus bundled with the package."""
    root = resources.files("causalab").joinpath("corpus")
    snippets = []
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".txt"):
            snippets.append(
                parse_snippet(entry.read_text("utf-8"), entry.name[:-4])
            )
    return snippets


def default_index() -> Index:
    return Index(default_corpus())
