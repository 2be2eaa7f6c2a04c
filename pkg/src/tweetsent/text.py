"""Tweet tokenization, negation scopes and surface counts.

The tokenizer follows the layout of Christopher Potts' sentiment-aware
tokenizer: one alternation of regular expressions, tried left to right,
so that emoticons, URLs, @mentions and #hashtags come out whole.  Unlike
that tokenizer, runs of punctuation (``!!!``, ``?!``, ``...``) stay a
single token and case is kept in ``surface``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, replace
from pathlib import Path

__all__ = [
    "Token",
    "TokenizedDoc",
    "SurfaceStats",
    "EmoticonTable",
    "DEFAULT_NEGATORS",
    "DEFAULT_EMOTICONS",
    "tokenize",
    "mark_negation",
    "surface_stats",
    "is_negator",
    "load_wordlist",
    "load_negators",
    "load_emoticons",
    "preprocess",
]

KINDS = ("word", "hashtag", "mention", "url", "emoticon", "punctuation", "number", "other")

_EYES = r"[:;=8]"
_NOSE = r"[\-o\*'^]?"
_MOUTH = r"[\)\]\(\[dDpP/\:\}\{@\|\\3oO]"
_EMOTICON = (
    rf"(?:<\\?/?3"                                # hearts, broken hearts
    rf"|[<>]?{_EYES}{_NOSE}{_MOUTH}+(?![\w])"     # :-) ;p :(((
    rf"|(?<![\w])[\)\]\(\[\}}\{{|]{_NOSE}{_EYES}(?![\w]))"   # (-: ):
)
_URL = r"(?:https?://\S+|www\.\S+)"
_MENTION = r"(?:@\w+)"
_HASHTAG = r"(?:\#+[\w_]+[\w'_\-]*[\w_]+|\#\w)"
_NUMBER = r"(?:[+\-]?\d+(?:[,./:\-]\d+)*)"
_WORD = r"(?:\w+(?:['’\-]\w+)*)"
_PUNCT = r"(?:[!?]+|\.+|…+|,+|;+|:+)"
_OTHER = r"(?:\S)"

_TOKEN_RE = re.compile(
    "|".join(f"(?P<{k}>{p})" for k, p in [
        ("url", _URL), ("emoticon", _EMOTICON), ("mention", _MENTION), ("hashtag", _HASHTAG),
        ("number", _NUMBER + r"(?![\w'’])"), ("word", _WORD), ("punctuation", _PUNCT),
        ("other", _OTHER),
    ]),
    re.UNICODE,
)
_ELONGATED = re.compile(r"(.)\1\1", re.DOTALL)


@dataclass(frozen=True)
class Token:
    surface: str
    kind: str
    negated: bool = False

    @property
    def lowered(self):
        return self.surface.lower()


@dataclass(frozen=True)
class TokenizedDoc:
    raw: str
    tokens: tuple
    scopes: tuple = ()   # (start, stop) token ranges of negation scopes; set by mark_negation

    def __len__(self):
        return len(self.tokens)

    @property
    def n_negated_contexts(self):
        return len(self.scopes)


@dataclass(frozen=True)
class SurfaceStats:
    exclamations: int = 0
    questions: int = 0
    mixed_runs: int = 0
    all_caps: int = 0
    elongated: int = 0
    negated_contexts: int = 0
    pos_emoticons: int = 0
    neg_emoticons: int = 0
    has_emoticon: int = 0

    def as_list(self):
        return [self.exclamations, self.questions, self.mixed_runs, self.all_caps,
                self.elongated, self.negated_contexts, self.pos_emoticons,
                self.neg_emoticons, self.has_emoticon]

    @staticmethod
    def names():
        return ["exclamations", "questions", "mixed_runs", "all_caps", "elongated",
                "negated_contexts", "pos_emoticons", "neg_emoticons", "has_emoticon"]


def tokenize(text: str) -> TokenizedDoc:
    """Split ``text`` into typed tokens.  Never raises."""
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        s = m.group(0)
        if kind == "word" and s.replace("'", "").replace("’", "").replace("-", "").isdigit():
            kind = "number"
        tokens.append(Token(s, kind))
    return TokenizedDoc(text, tuple(tokens))


# -- negation ----------------------------------------------------------------

DEFAULT_NEGATORS = frozenset({
    "not", "no", "never", "nothing", "nobody", "none", "cannot", "nowhere", "neither",
    "nor", "cant", "dont", "doesnt", "didnt", "isnt", "wasnt", "wont", "wouldnt",
    "shouldnt", "couldnt", "aint", "havent", "hasnt", "arent",
})


def is_negator(token, negators=DEFAULT_NEGATORS):
    if token.kind != "word":
        return False
    low = token.lowered
    return low in negators or low.endswith("n't") or low.endswith("n’t")


def mark_negation(doc: TokenizedDoc, negators=DEFAULT_NEGATORS) -> TokenizedDoc:
    """Flag word tokens inside negation scopes.

    A scope opens at a negator and closes at the next punctuation token
    or at the end of the tweet.  Negators met inside an open scope extend
    it rather than opening a new one.  Existing flags are ignored, so the
    function is idempotent.
    """
    if not negators:
        raise ValueError("negator set must be non-empty")
    out, scopes = [], []
    start = None
    for i, tok in enumerate(doc.tokens):
        if tok.kind == "punctuation":
            if start is not None:
                scopes.append((start, i))
                start = None
            out.append(replace(tok, negated=False))
        elif is_negator(tok, negators):
            if start is None:
                start = i + 1
            out.append(replace(tok, negated=False))
        else:
            out.append(replace(tok, negated=start is not None and tok.kind == "word"))
    if start is not None:
        scopes.append((start, len(doc.tokens)))
    return TokenizedDoc(doc.raw, tuple(out), tuple(scopes))


# -- emoticons ---------------------------------------------------------------

@dataclass(frozen=True)
class EmoticonTable:
    positive: frozenset
    negative: frozenset

    def polarity(self, surface):
        """+1, -1 or 0 (neutral / unknown)."""
        key = _normalize_emoticon(surface)
        if key in self.positive:
            return 1
        if key in self.negative:
            return -1
        return 0


def _normalize_emoticon(s):
    # collapse repeated mouths so ":)))" looks up as ":)"
    return re.sub(r"(.)\1+$", r"\1", s)


def _default_emoticons():
    pos, neg = set(), set()
    noses = ["", "-", "o", "'", "^", "*"]
    for eyes in ":;=8":
        for nose in noses:
            for mouth in ")]}DpP3*":
                pos.add(eyes + nose + mouth)
            for mouth in "([{/\\":
                neg.add(eyes + nose + mouth)
            for mouth in "([{":
                pos.add(mouth + nose + eyes)
            for mouth in ")]}":
                neg.add(mouth + nose + eyes)
    for face in list(pos):
        pos.add(">" + face if face[0] in ":;=8" else face + "<")
    pos.add("<3")
    neg.update({"</3", "<\\3", ":'(", ";'("})
    return EmoticonTable(frozenset(pos), frozenset(neg - pos))


DEFAULT_EMOTICONS = _default_emoticons()


# -- surface statistics --------------------------------------------------------

def surface_stats(doc: TokenizedDoc, emoticons: EmoticonTable = DEFAULT_EMOTICONS) -> SurfaceStats:
    excl = ques = mixed = caps = elong = pos = neg = neu = 0
    for tok in doc.tokens:
        s = tok.surface
        if tok.kind == "punctuation":
            e, q = s.count("!"), s.count("?")
            excl += e
            ques += q
            mixed += int(e > 0 and q > 0)
        elif tok.kind == "word":
            letters = [c for c in s if c.isalpha()]
            if len(letters) >= 2 and all(c.isupper() for c in letters):
                caps += 1
            if _ELONGATED.search(s):
                elong += 1
        elif tok.kind == "emoticon":
            p = emoticons.polarity(s)
            pos += p > 0
            neg += p < 0
            neu += p == 0
    return SurfaceStats(excl, ques, mixed, caps, elong, doc.n_negated_contexts,
                        pos, neg, int(pos + neg + neu > 0))


# -- resource files ------------------------------------------------------------

def load_wordlist(path):
    """One entry per line; blank lines and ``#`` comments are skipped."""
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        s = line.strip()
        if s and not s.startswith("#"):
            out.append(s)
    return out


def load_negators(path):
    return frozenset(w.lower() for w in load_wordlist(path))


def load_emoticons(positive_path, negative_path):
    return EmoticonTable(frozenset(load_wordlist(positive_path)),
                         frozenset(load_wordlist(negative_path)))


def preprocess(text, negators=DEFAULT_NEGATORS):
    """Tokenize and mark negation in one call."""
    return mark_negation(tokenize(text), negators)
