"""Per-tweet feature bundles.

A :class:`FeatureBundle` has a categorical part (string keys with counts,
hashed later) and a dense part made of named fixed-length blocks.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .lexicons import (
    DEFAULT_TAGSET,
    ClusterMap,
    PosTagging,
    cluster_features,
    manual_features,
    negated_context,
    scored_features,
)
from .text import DEFAULT_EMOTICONS, DEFAULT_NEGATORS, EmoticonTable, TokenizedDoc, preprocess, surface_stats

__all__ = [
    "FAMILIES",
    "FeatureConfig",
    "FeatureBundle",
    "EmbeddingTable",
    "Resources",
    "MissingResourceError",
    "word_ngrams",
    "char_ngrams",
    "pos_counts",
    "embed_compose",
    "load_embeddings",
    "extract",
    "extract_texts",
]

FAMILIES = ("word_ngrams", "char_ngrams", "surface", "manual_lex", "scored_lex", "clusters",
            "pos", "embeddings")

_NGRAM_KINDS = {"word", "hashtag", "emoticon"}
_PLACEHOLDER = {"url": "<url>", "mention": "<user>"}
_SPACES = re.compile(r"\s+")


class MissingResourceError(ValueError):
    """An enabled feature family has no resource to work from."""


@dataclass(frozen=True)
class FeatureConfig:
    word_ngrams: bool = True
    char_ngrams: bool = True
    surface: bool = True
    manual_lex: bool = True
    scored_lex: bool = True
    clusters: bool = True
    pos: bool = True
    embeddings: bool = True
    ngram_range: tuple = (1, 4)
    char_range: tuple = (3, 5)

    def __post_init__(self):
        for name, (lo, hi), floor in (("ngram_range", self.ngram_range, 1),
                                      ("char_range", self.char_range, 1)):
            if not floor <= lo <= hi:
                raise ValueError(f"{name} must satisfy {floor} <= min <= max, got {(lo, hi)}")

    def enabled(self):
        return [f for f in FAMILIES if getattr(self, f)]


@dataclass(frozen=True)
class FeatureBundle:
    categorical: Counter
    dense: tuple = ()   # ((name, array), ...)

    @property
    def dense_layout(self):
        return tuple((name, len(v)) for name, v in self.dense)

    def dense_vector(self):
        if not self.dense:
            return np.zeros(0)
        return np.concatenate([v for _, v in self.dense])

    def __eq__(self, other):
        if not isinstance(other, FeatureBundle):
            return NotImplemented
        return (self.categorical == other.categorical
                and self.dense_layout == other.dense_layout
                and all(np.array_equal(a, b) for (_, a), (_, b) in zip(self.dense, other.dense)))


@dataclass(frozen=True)
class EmbeddingTable:
    dim: int
    vectors: dict

    def __post_init__(self):
        if self.dim <= 0:
            raise ValueError("embedding dim must be positive")
        for w, v in self.vectors.items():
            if len(v) != self.dim:
                raise ValueError(f"vector for {w!r} has length {len(v)}, expected {self.dim}")


@dataclass
class Resources:
    manual: list = field(default_factory=list)      # ManualLexicon
    scored: list = field(default_factory=list)      # ScoredLexicon
    clusters: ClusterMap | None = None
    embeddings: EmbeddingTable | None = None
    tags: dict | None = None                        # record id -> PosTagging
    tagset: tuple = DEFAULT_TAGSET
    negators: frozenset = DEFAULT_NEGATORS
    emoticons: EmoticonTable = DEFAULT_EMOTICONS


def _ngram_terms(doc):
    terms = []
    for tok in doc.tokens:
        if tok.kind in _PLACEHOLDER:
            terms.append(_PLACEHOLDER[tok.kind])
        elif tok.kind in _NGRAM_KINDS:
            terms.append(tok.lowered + "_NEG" if tok.negated else tok.lowered)
    return terms


def word_ngrams(doc: TokenizedDoc, nmin=1, nmax=4) -> Counter:
    """Contiguous n-grams keyed ``w{n}:tok tok``; negated words carry ``_NEG``."""
    if not 1 <= nmin <= nmax:
        raise ValueError("need 1 <= nmin <= nmax")
    terms = _ngram_terms(doc)
    out = Counter()
    for n in range(nmin, nmax + 1):
        for i in range(len(terms) - n + 1):
            out[f"w{n}:" + " ".join(terms[i:i + n])] += 1
    return out


def char_ngrams(text: str, mmin=3, mmax=5) -> Counter:
    """Character m-grams of the lowercased text with whitespace runs collapsed."""
    if not 1 <= mmin <= mmax:
        raise ValueError("need 1 <= mmin <= mmax")
    s = _SPACES.sub(" ", text.lower()).strip()
    out = Counter()
    for m in range(mmin, mmax + 1):
        for i in range(len(s) - m + 1):
            out[f"c{m}:" + s[i:i + m]] += 1
    return out


def pos_counts(tags: PosTagging | None, doc: TokenizedDoc, tagset=None) -> np.ndarray:
    """Tag counts split by context: ``[tag0_aff, tag0_neg, tag1_aff, ...]``."""
    tagset = tuple(tagset or (tags.tagset if tags is not None else DEFAULT_TAGSET))
    out = np.zeros(2 * len(tagset))
    if tags is None:
        return out
    tags.check(doc)
    index = {t: k for k, t in enumerate(tagset)}
    for tag, neg in zip(tags.tags, negated_context(doc)):
        if tag in index:
            out[2 * index[tag] + int(neg)] += 1
    return out


def embed_compose(doc: TokenizedDoc, table: EmbeddingTable) -> np.ndarray:
    """``[min, max, mean]`` of the in-vocabulary word vectors, zeros if none."""
    vecs = [table.vectors[t.lowered] for t in doc.tokens
            if t.kind == "word" and t.lowered in table.vectors]
    if not vecs:
        return np.zeros(3 * table.dim)
    V = np.asarray(vecs, dtype=float)
    return np.concatenate([V.min(axis=0), V.max(axis=0), V.mean(axis=0)])


def load_embeddings(path) -> EmbeddingTable:
    """Text vectors, ``word v1 ... vd`` per line; a ``count dim`` header is skipped."""
    vectors, dim = {}, None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split(" ")
            if not line.strip():
                continue
            if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
                continue
            word, vals = parts[0], parts[1:]
            if dim is None:
                dim = len(vals)
            if len(vals) != dim:
                raise ValueError(f"{path}:{lineno}: expected {dim} values, got {len(vals)}")
            vectors[word.lower()] = np.array(vals, dtype=float)
    if dim is None:
        raise ValueError(f"{path}: no vectors")
    return EmbeddingTable(dim, vectors)


def _require(resource, what):
    if resource is None or (isinstance(resource, list) and not resource):
        raise MissingResourceError(f"feature family needs a resource that is not configured: {what}")


def extract(doc: TokenizedDoc, cfg: FeatureConfig, resources: Resources,
            tags: PosTagging | None = None) -> FeatureBundle:
    """Build the bundle of every family enabled in ``cfg``.

    Disabled families are absent from the bundle, not zero-filled.
    ``tags`` are this document's POS tags; ``None`` gives a zero POS block.
    """
    cat = Counter()
    dense = []
    if cfg.word_ngrams:
        cat.update(word_ngrams(doc, *cfg.ngram_range))
    if cfg.char_ngrams:
        cat.update(char_ngrams(doc.raw, *cfg.char_range))
    if cfg.surface:
        dense.append(("surface", np.asarray(surface_stats(doc, resources.emoticons).as_list(), float)))
    if cfg.manual_lex:
        _require(resources.manual, "manual lexicon")
        for lex in resources.manual:
            dense.append((f"manual:{lex.name}", manual_features(doc, tags, lex, resources.tagset)))
    if cfg.scored_lex:
        _require(resources.scored, "scored lexicon")
        for lex in resources.scored:
            dense.append((f"scored:{lex.name}", scored_features(doc, lex)))
    if cfg.clusters:
        _require(resources.clusters, "word clusters")
        cat.update(cluster_features(doc, resources.clusters))
    if cfg.pos:
        _require(resources.tags, "POS tags")
        dense.append(("pos", pos_counts(tags, doc, resources.tagset)))
    if cfg.embeddings:
        _require(resources.embeddings, "word embeddings")
        dense.append(("embeddings", embed_compose(doc, resources.embeddings)))
    return FeatureBundle(cat, tuple(dense))


def extract_texts(texts, ids, cfg: FeatureConfig, resources: Resources):
    """Tokenize, mark negation and extract for a list of raw texts."""
    out = []
    for rid, text in zip(ids, texts):
        doc = preprocess(text, resources.negators)
        tags = resources.tags.get(rid) if (cfg.pos and resources.tags) else None
        out.append(extract(doc, cfg, resources, tags))
    return out
