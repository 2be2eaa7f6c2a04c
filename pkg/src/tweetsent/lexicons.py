"""Sentiment lexicons, word clusters, POS tags and the features built on them.

Polarity counts are split by negation context: a token is *negated* when
it lies inside a negation scope (see :func:`tweetsent.text.mark_negation`)
and *affirmative* otherwise.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .text import TokenizedDoc

__all__ = [
    "ManualLexicon",
    "ScoredLexicon",
    "ClusterMap",
    "PosTagging",
    "DEFAULT_TAGSET",
    "MANUAL_DIM",
    "SCORED_DIM",
    "load_manual",
    "load_scored",
    "load_clusters",
    "load_tagset",
    "load_tags",
    "negated_context",
    "manual_features",
    "manual_feature_names",
    "scored_features",
    "cluster_features",
]

# Twitter POS tagset of Gimpel et al. (2011) without the rare "M" tag
# (proper noun + verbal); one tag per slot of the per-tag block.
DEFAULT_TAGSET = ("N", "O", "^", "S", "Z", "V", "L", "A", "R", "!", "D", "P", "&", "T",
                  "X", "Y", "#", "@", "~", "U", "E", "$", ",", "G")

_CELLS = 4   # (affirmative, negated) x (positive, negative)
MANUAL_DIM = 2 * 8 + len(DEFAULT_TAGSET) * _CELLS
SCORED_DIM = 8


@dataclass(frozen=True)
class ManualLexicon:
    positive: frozenset
    negative: frozenset
    name: str = "manual"

    def __post_init__(self):
        object.__setattr__(self, "positive", frozenset(w.lower() for w in self.positive))
        object.__setattr__(self, "negative", frozenset(w.lower() for w in self.negative))

    def polarity(self, word):
        """(is_positive, is_negative) for a lowercase word; both may hold."""
        return word in self.positive, word in self.negative


@dataclass(frozen=True)
class ScoredLexicon:
    scores: dict
    name: str = "scored"

    def __post_init__(self):
        for w, s in self.scores.items():
            if not math.isfinite(s):
                raise ValueError(f"non-finite score for {w!r} in lexicon {self.name}")

    def get(self, word):
        """Score of ``word`` or ``None`` when absent."""
        return self.scores.get(word)


@dataclass(frozen=True)
class ClusterMap:
    clusters: dict
    name: str = "clusters"

    def get(self, word):
        return self.clusters.get(word)


@dataclass(frozen=True)
class PosTagging:
    tags: tuple
    tagset: tuple = DEFAULT_TAGSET

    def __post_init__(self):
        object.__setattr__(self, "tags", tuple(self.tags))
        object.__setattr__(self, "tagset", tuple(self.tagset))
        unknown = sorted(set(self.tags) - set(self.tagset))
        if unknown:
            raise ValueError(f"tags {unknown} not in tagset")

    def check(self, doc):
        if len(self.tags) != len(doc.tokens):
            raise ValueError(f"POS tags misaligned: {len(self.tags)} tags for {len(doc.tokens)} tokens")


# -- loaders -----------------------------------------------------------------

def _lines(path):
    with open(path, encoding="utf-8", errors="strict") as fh:
        for line in fh:
            s = line.strip()
            if s and not s.startswith(("#", ";")):
                yield s


def load_manual(path, format, name=None) -> ManualLexicon:
    """Load a polarity word list.

    Parameters
    ----------
    path : path or pair of paths
        For ``bingliu-pair`` either ``(positive_file, negative_file)`` or a
        directory holding ``positive-words.txt`` and ``negative-words.txt``.
    format : {"bingliu-pair", "mpqa-clues", "nrc-emotion"}
    """
    pos, neg = set(), set()
    if format == "bingliu-pair":
        if isinstance(path, (str, Path)) and Path(path).is_dir():
            files = (Path(path) / "positive-words.txt", Path(path) / "negative-words.txt")
        else:
            files = tuple(path)
            if len(files) != 2:
                raise ValueError("bingliu-pair needs a positive and a negative file")
        pos.update(w.lower() for w in _lines(files[0]))
        neg.update(w.lower() for w in _lines(files[1]))
        default_name = "bingliu"
    elif format == "mpqa-clues":
        for lineno, line in enumerate(_lines(path), start=1):
            fields = dict(kv.split("=", 1) for kv in line.split() if "=" in kv)
            if "word1" not in fields or "priorpolarity" not in fields:
                raise ValueError(f"{path}: clue {lineno} lacks word1= or priorpolarity=")
            word, polarity = fields["word1"].lower(), fields["priorpolarity"].lower()
            if polarity in ("positive", "both"):
                pos.add(word)
            if polarity in ("negative", "both", "weakneg"):
                neg.add(word)
            elif polarity not in ("positive", "neutral"):
                raise ValueError(f"{path}: unknown priorpolarity {polarity!r}")
        default_name = "mpqa"
    elif format == "nrc-emotion":
        for line in _lines(path):
            cols = line.split("\t")
            if len(cols) != 3:
                raise ValueError(f"{path}: expected word<TAB>affect<TAB>flag, got {line!r}")
            word, affect, flag = cols
            if flag.strip() == "1":
                if affect == "positive":
                    pos.add(word.lower())
                elif affect == "negative":
                    neg.add(word.lower())
        default_name = "nrc-emotion"
    else:
        raise ValueError(f"unknown manual lexicon format {format!r}")
    return ManualLexicon(frozenset(pos), frozenset(neg), name or default_name)


def load_scored(path, name=None) -> ScoredLexicon:
    """Unigram score file: ``word<TAB>score[<TAB>...]``."""
    scores = {}
    for line in _lines(path):
        cols = line.split("\t")
        if len(cols) < 2:
            raise ValueError(f"{path}: expected word<TAB>score, got {line!r}")
        try:
            scores[cols[0].lower()] = float(cols[1])
        except ValueError:
            raise ValueError(f"{path}: bad score {cols[1]!r}") from None
    return ScoredLexicon(scores, name or Path(path).stem)


def load_clusters(path) -> ClusterMap:
    """CMU cluster file: ``bitstring<TAB>word[<TAB>count]``."""
    clusters = {}
    for line in _lines(path):
        cols = line.split("\t")
        if len(cols) < 2:
            raise ValueError(f"{path}: expected cluster<TAB>word, got {line!r}")
        word = cols[1].lower()
        if word in clusters and clusters[word] != cols[0]:
            raise ValueError(f"{path}: word {word!r} assigned to two clusters")
        clusters[word] = cols[0]
    return ClusterMap(clusters)


def load_tagset(path):
    """One tag per line.  No comment syntax: ``#`` is itself a tag."""
    tags = tuple(s.strip() for s in Path(path).read_text(encoding="utf-8").splitlines() if s.strip())
    if len(set(tags)) != len(tags):
        raise ValueError(f"{path}: duplicate tags")
    return tags


def load_tags(path, tagset=DEFAULT_TAGSET):
    """Tag file ``id<TAB>tag tag ...`` aligned to :func:`tweetsent.text.tokenize`."""
    out = {}
    for line in _lines(path):
        rid, _, tags = line.partition("\t")
        out[rid] = PosTagging(tuple(tags.split()), tagset)
    return out


# -- features ----------------------------------------------------------------

def negated_context(doc: TokenizedDoc):
    """Per-token negation context.

    Word tokens use their own flag.  Other tokens (hashtags, emoticons) are
    in negated context when they fall inside a scope range.
    """
    inside = np.zeros(len(doc.tokens), dtype=bool)
    for start, stop in doc.scopes:
        inside[start:stop] = True
    return [tok.negated if tok.kind == "word" else bool(inside[i])
            for i, tok in enumerate(doc.tokens)]


def _all_caps(s):
    letters = [c for c in s if c.isalpha()]
    return len(letters) >= 2 and all(c.isupper() for c in letters)


def _cell(negated, is_pos):
    # layout within a 4-block: aff/pos, aff/neg, neg/pos, neg/neg
    return 2 * int(negated) + (0 if is_pos else 1)


def manual_features(doc: TokenizedDoc, tags: PosTagging | None, lex: ManualLexicon,
                    tagset=None) -> np.ndarray:
    """Polarity counts for a word-list lexicon.

    Layout (``8 + 8 + 4 * len(tagset)`` values, 112 for the 24-tag default):

    * W  words (4) then hashtags with ``#`` stripped (4)
    * U  the same 8 counts restricted to all-caps surfaces
    * P  for each tag, the 4 cells over word tokens carrying that tag

    Each 4-cell group is (affirmative, negated) x (positive, negative).
    """
    if tagset is None:
        tagset = tags.tagset if tags is not None else DEFAULT_TAGSET
    tag_index = {t: k for k, t in enumerate(tagset)}
    if tags is not None:
        tags.check(doc)
    out = np.zeros(16 + _CELLS * len(tagset))
    ctx = negated_context(doc)
    for i, tok in enumerate(doc.tokens):
        if tok.kind == "word":
            key, offset = tok.lowered, 0
        elif tok.kind == "hashtag":
            key, offset = tok.lowered.lstrip("#"), 4
        else:
            continue
        is_pos, is_neg = lex.polarity(key)
        if not (is_pos or is_neg):
            continue
        caps = _all_caps(tok.surface)
        for flag, polar in ((is_pos, True), (is_neg, False)):
            if not flag:
                continue
            c = _cell(ctx[i], polar)
            out[offset + c] += 1
            if caps:
                out[8 + offset + c] += 1
            if tok.kind == "word" and tags is not None and tags.tags[i] in tag_index:
                out[16 + _CELLS * tag_index[tags.tags[i]] + c] += 1
    return out


def manual_feature_names(prefix="lex", tagset=DEFAULT_TAGSET):
    cells = ["aff_pos", "aff_neg", "neg_pos", "neg_neg"]
    names = [f"{prefix}:{blk}:{src}:{c}" for blk in ("W", "U") for src in ("word", "hashtag")
             for c in cells]
    names += [f"{prefix}:P:{t}:{c}" for t in tagset for c in cells]
    return names


def scored_features(doc: TokenizedDoc, lex: ScoredLexicon) -> np.ndarray:
    """Aggregate scores per negation context.

    For affirmative then negated tokens: count of positive scores, sum of
    scores, max score, score of the last positively scored token.  Contexts
    without any scored token give zeros.
    """
    out = np.zeros(SCORED_DIM)
    ctx = negated_context(doc)
    seen = [False, False]
    for i, tok in enumerate(doc.tokens):
        if tok.kind not in ("word", "hashtag"):
            continue
        score = lex.get(tok.lowered)
        if score is None and tok.kind == "hashtag":
            score = lex.get(tok.lowered[1:])
        if score is None:
            continue
        base = 4 * int(ctx[i])
        block = out[base:base + 4]
        if score > 0:
            block[0] += 1
            block[3] = score
        block[1] += score
        block[2] = score if not seen[ctx[i]] else max(block[2], score)
        seen[ctx[i]] = True
    return out


def cluster_features(doc: TokenizedDoc, cm: ClusterMap) -> Counter:
    """Counts keyed ``cl:<cluster>:aff`` / ``cl:<cluster>:neg``."""
    out = Counter()
    ctx = negated_context(doc)
    for i, tok in enumerate(doc.tokens):
        if tok.kind == "punctuation":
            continue
        cid = cm.get(tok.lowered)
        if cid is not None:
            out[f"cl:{cid}:{'neg' if ctx[i] else 'aff'}"] += 1
    return out
