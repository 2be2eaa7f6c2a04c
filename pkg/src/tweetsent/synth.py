"""Template-generated tweets and invented resources for end-to-end runs.

Real SemEval tweets and the published lexicons cannot be redistributed,
so tests and demos use this generator.  Sentiment is planted through a
small invented polarity vocabulary, negation flips it, and filler words
carry no signal.  Everything is a pure function of the seed.
"""
from __future__ import annotations

from collections import Counter
from pathlib import Path

import numpy as np

from .features import FeatureBundle
from .corpus import LABEL5, Dataset, Label2, Label3, Record, Schema, format_label
from .lexicons import DEFAULT_TAGSET
from .text import is_negator, tokenize

__all__ = ["POSITIVE_WORDS", "NEGATIVE_WORDS", "FILLER", "TOPICS", "make_dataset",
           "write_dataset", "write_resources", "write_tags", "write_bundle", "tag_tokens",
           "config_text", "planted_lambda_task"]

POSITIVE_WORDS = ("good", "great", "love", "awesome", "happy", "excellent", "amazing", "nice",
                  "fun", "best", "wonderful", "brilliant", "perfect", "enjoy", "glad")
NEGATIVE_WORDS = ("bad", "awful", "hate", "terrible", "sad", "horrible", "worst", "boring",
                  "poor", "annoying", "ugly", "disappointing", "lame", "broken", "angry")
FILLER = ("today", "the", "game", "phone", "movie", "watch", "tomorrow", "going", "new", "just",
          "at", "with", "my", "show", "update", "weather", "train", "meeting", "this", "morning",
          "tonight", "week", "people", "album", "coffee", "match", "news", "class", "lunch", "city")
TOPICS = ("iphone", "netflix", "football", "election", "coffee")
NEGATORS = ("not", "never", "don't", "isn't", "no")
_VERBS = {"love", "hate", "enjoy", "watch", "going"}
_FUNCTION = {"the": "D", "this": "D", "my": "D", "at": "P", "with": "P", "just": "R"}


def _clause(rng, polarity, strength=1):
    """Words expressing ``polarity`` (+1, -1 or 0) with ``strength`` cues."""
    words = list(rng.choice(FILLER, size=rng.integers(2, 5)))
    for _ in range(strength if polarity else 0):
        flip = rng.random() < 0.25
        lex = POSITIVE_WORDS if (polarity > 0) != flip else NEGATIVE_WORDS
        cue = [str(rng.choice(NEGATORS))] if flip else []
        cue.append(str(rng.choice(lex)))
        at = int(rng.integers(0, len(words) + 1))
        words[at:at] = cue
    return [str(w) for w in words]


def _tweet(rng, polarity, strength=1):
    words = _clause(rng, polarity, strength)
    extras = []
    r = rng.random()
    if polarity and r < 0.2:
        extras.append(":)" if polarity > 0 else ":(")
    elif polarity and r < 0.35:
        extras.append("#" + str(rng.choice(POSITIVE_WORDS if polarity > 0 else NEGATIVE_WORDS)))
    if rng.random() < 0.15:
        extras.append("@user" + str(int(rng.integers(1, 99))))
    if strength > 1:
        words[0] = words[0].upper()
        extras.append("!!!")
    if rng.random() < 0.1:
        extras.append("http://t.co/" + "".join(rng.choice(list("abcdefgh"), size=5)))
    text = " ".join(words + extras)
    # a trailing, unrelated clause after punctuation; the negation scope stops at the comma
    if rng.random() < 0.3:
        text += " , " + " ".join(str(w) for w in rng.choice(FILLER, size=2))
    return text


def make_dataset(schema, n, seed=0, id_offset=0, class_probs=None) -> Dataset:
    """``n`` synthetic records for ``schema`` ("A", "BD" or "CE")."""
    schema = Schema(schema)
    rng = np.random.default_rng(seed)
    if schema is Schema.A:
        classes, polar = tuple(Label3), {Label3.POSITIVE: 1, Label3.NEGATIVE: -1, Label3.NEUTRAL: 0}
    elif schema is Schema.BD:
        classes, polar = tuple(Label2), {Label2.POSITIVE: 1, Label2.NEGATIVE: -1}
    else:
        classes, polar = LABEL5, {v: int(np.sign(v)) for v in LABEL5}
    probs = class_probs or [1.0 / len(classes)] * len(classes)
    records = []
    for i in range(n):
        label = classes[int(rng.choice(len(classes), p=probs))]
        strength = 2 if schema is Schema.CE and abs(int(label)) == 2 else 1
        text = _tweet(rng, polar[label], strength)
        topic = None if schema is Schema.A else str(rng.choice(TOPICS))
        if topic is not None:
            text = f"{topic} {text}"
        records.append(Record(str(100000 + id_offset + i), text, label, topic))
    return Dataset(schema, records)


def write_dataset(ds: Dataset, path):
    lines = []
    for r in ds.records:
        cols = [r.id] + ([r.topic] if ds.schema.has_topic else []) + [format_label(r.label), r.text]
        lines.append("\t".join(cols) + "\n")
    Path(path).write_text("".join(lines), encoding="utf-8")


def tag_tokens(text):
    """Deterministic stand-in for a Twitter POS tagger."""
    tags = []
    for tok in tokenize(text).tokens:
        low = tok.lowered
        kind_tag = {"hashtag": "#", "mention": "@", "url": "U", "emoticon": "E",
                    "punctuation": ",", "number": "$", "other": "G"}.get(tok.kind)
        if kind_tag:
            tags.append(kind_tag)
        elif is_negator(tok):
            tags.append("R")
        elif low in _VERBS:
            tags.append("V")
        elif low in POSITIVE_WORDS or low in NEGATIVE_WORDS:
            tags.append("A")
        elif low in _FUNCTION:
            tags.append(_FUNCTION[low])
        elif low in TOPICS:
            tags.append("^")
        else:
            tags.append("N")
    return tags


def write_resources(outdir, seed=0):
    """Invented lexicons, clusters, embeddings and tagset; returns the paths."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    p = {}
    p["bingliu_pos"] = out / "bingliu-positive.txt"
    p["bingliu_neg"] = out / "bingliu-negative.txt"
    p["bingliu_pos"].write_text(";; invented word list\n" + "\n".join(POSITIVE_WORDS) + "\n",
                                encoding="utf-8")
    p["bingliu_neg"].write_text(";; invented word list\n" + "\n".join(NEGATIVE_WORDS) + "\n",
                                encoding="utf-8")
    clues = [f"type=strongsubj len=1 word1={w} pos1=adj stemmed1=n priorpolarity=positive"
             for w in POSITIVE_WORDS[::2]]
    clues += [f"type=strongsubj len=1 word1={w} pos1=adj stemmed1=n priorpolarity=negative"
              for w in NEGATIVE_WORDS[::2]]
    clues += [f"type=weaksubj len=1 word1={w} pos1=noun stemmed1=n priorpolarity=neutral"
              for w in FILLER[:3]]
    p["mpqa"] = out / "mpqa.tff"
    p["mpqa"].write_text("\n".join(clues) + "\n", encoding="utf-8")
    rows = []
    for w in sorted(set(POSITIVE_WORDS[1::2]) | set(NEGATIVE_WORDS[1::2]) | set(FILLER[:5])):
        for affect in ("anger", "joy", "negative", "positive"):
            flag = int((affect == "positive" and w in POSITIVE_WORDS)
                       or (affect == "negative" and w in NEGATIVE_WORDS)
                       or (affect == "joy" and w in POSITIVE_WORDS)
                       or (affect == "anger" and w in NEGATIVE_WORDS))
            rows.append(f"{w}\t{affect}\t{flag}")
    p["nrc"] = out / "nrc-emotion.txt"
    p["nrc"].write_text("\n".join(rows) + "\n", encoding="utf-8")
    scores = [f"{w}\t{rng.uniform(0.5, 3.0):.3f}\t10\t2" for w in POSITIVE_WORDS]
    scores += [f"{w}\t{-rng.uniform(0.5, 3.0):.3f}\t2\t10" for w in NEGATIVE_WORDS]
    scores += [f"{w}\t{rng.normal(0.0, 0.2):.3f}\t5\t5" for w in FILLER]
    p["scored"] = out / "unigrams-scored.txt"
    p["scored"].write_text("\n".join(scores) + "\n", encoding="utf-8")
    clusters = [f"0110{i % 3:02b}\t{w}\t10" for i, w in enumerate(POSITIVE_WORDS)]
    clusters += [f"1011{i % 3:02b}\t{w}\t10" for i, w in enumerate(NEGATIVE_WORDS)]
    clusters += [f"00{i % 5:03b}\t{w}\t10" for i, w in enumerate(FILLER)]
    p["clusters"] = out / "clusters.txt"
    p["clusters"].write_text("\n".join(clusters) + "\n", encoding="utf-8")
    dim = 8
    vec_lines = [f"{len(POSITIVE_WORDS) + len(NEGATIVE_WORDS) + len(FILLER)} {dim}"]
    axis = rng.normal(size=dim)
    axis /= np.linalg.norm(axis)
    for words, sign in ((POSITIVE_WORDS, 1.0), (NEGATIVE_WORDS, -1.0), (FILLER, 0.0)):
        for w in words:
            v = 0.5 * rng.normal(size=dim) + sign * 1.5 * axis
            vec_lines.append(w + " " + " ".join(f"{x:.5f}" for x in v))
    p["embeddings"] = out / "embeddings.txt"
    p["embeddings"].write_text("\n".join(vec_lines) + "\n", encoding="utf-8")
    p["tagset"] = out / "tagset.txt"
    p["tagset"].write_text("\n".join(DEFAULT_TAGSET) + "\n", encoding="utf-8")
    p["negators"] = out / "negators.txt"
    p["negators"].write_text("\n".join(["not", "no", "never", "nothing", "nobody", "none",
                                        "cannot"]) + "\n", encoding="utf-8")
    return p


def write_tags(datasets, path):
    lines = []
    for ds in datasets:
        for r in ds.records:
            lines.append(f"{r.id}\t{' '.join(tag_tokens(r.text))}\n")
    Path(path).write_text("".join(lines), encoding="utf-8")


def config_text(subtask, resource_dir=".", tags="tags.txt", **overrides):
    """INI text wired to the files of :func:`write_resources`."""
    r = Path(resource_dir)
    sections = {
        "run": {"subtask": subtask, "seed": "0"},
        "resources": {
            "manual": "\n".join([
                f"bingliu-pair:{r / 'bingliu-positive.txt'}|{r / 'bingliu-negative.txt'}",
                f"mpqa-clues:{r / 'mpqa.tff'}",
                f"nrc-emotion:{r / 'nrc-emotion.txt'}"]),
            "scored": str(r / "unigrams-scored.txt"),
            "clusters": str(r / "clusters.txt"),
            "embeddings": str(r / "embeddings.txt"),
            "tagset": str(r / "tagset.txt"),
            "tags": str(r / tags),
        },
        "vectorize": {"hash_dim": str(2 ** 16), "alpha": "0.6"},
        "model": {},
        "grid": {},
    }
    for key, value in overrides.items():
        sec, _, opt = key.partition("__")
        sections.setdefault(sec, {})[opt] = str(value)
    lines = []
    for sec, opts in sections.items():
        lines.append(f"[{sec}]")
        for k, v in opts.items():
            v = v.replace("\n", "\n    ")
            lines.append(f"{k} = {v}")
        lines.append("")
    return "\n".join(lines)


def write_bundle(outdir, n=200, n_test=100, seed=0):
    """Resources, a train and test file per schema, tags and per-subtask configs."""
    out = Path(outdir)
    write_resources(out, seed)
    sets = {}
    for k, schema in enumerate(("A", "BD", "CE")):
        sets[f"train_{schema}"] = make_dataset(schema, n, seed + 2 * k, 10000 * k)
        sets[f"test_{schema}"] = make_dataset(schema, n_test, seed + 2 * k + 1, 10000 * k + 5000)
    for name, ds in sets.items():
        write_dataset(ds, out / f"{name}.tsv")
    write_tags(sets.values(), out / "tags.txt")
    for st in "ABCD":
        (out / f"subtask_{st}.ini").write_text(config_text(st), encoding="utf-8")
    return out


def planted_lambda_task(n, seed=0, noise_dims=50, shift=2.0, flip=0.1):
    """Dense binary task whose best hinge-SVM ``lam`` on the grid 1e-7..1e1 is 1e-3.

    Class means differ by ``shift`` along the first axis, while most of the
    within-class variance lies on the diagonal of the first two axes.  The
    class-mean direction that heavy regularization falls back to is thus a
    poor classifier.  ``noise_dims`` pure-noise columns and a ``flip`` rate of
    label noise make the nearly hard-margin fits at tiny ``lam`` chase noise.

    Returns ``(bundles, labels)`` with a single dense block per bundle.
    """
    rng = np.random.default_rng(seed)
    y = rng.integers(0, 2, n) * 2 - 1
    along = np.array([1.0, 1.0]) / np.sqrt(2.0)
    across = np.array([1.0, -1.0]) / np.sqrt(2.0)
    signal = (y[:, None] * np.array([shift, 0.0])
              + 3.0 * rng.normal(size=(n, 1)) * along
              + 0.3 * rng.normal(size=(n, 1)) * across)
    X = np.hstack([signal, rng.normal(size=(n, noise_dims))])
    y = np.where(rng.random(n) < flip, -y, y)
    bundles = [FeatureBundle(Counter(), (("x", X[i]),)) for i in range(n)]
    return bundles, [Label2.POSITIVE if t > 0 else Label2.NEGATIVE for t in y]
