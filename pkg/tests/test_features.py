from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tweetsent.features import (
    EmbeddingTable,
    FeatureConfig,
    MissingResourceError,
    Resources,
    char_ngrams,
    embed_compose,
    extract,
    extract_texts,
    load_embeddings,
    pos_counts,
    word_ngrams,
)
from tweetsent.lexicons import DEFAULT_TAGSET, ManualLexicon, PosTagging
from tweetsent.synth import tag_tokens
from tweetsent.text import preprocess

words = st.lists(st.sampled_from(["good", "day", "not", "bad", "never", "cool", "the", ".", "#yay"]),
                 max_size=15).map(" ".join)

ONLY_NGRAMS = FeatureConfig(*([True] + [False] * 7))


def test_word_ngram_examples():
    assert word_ngrams(preprocess("good day"), 1, 2) == Counter(["w1:good", "w1:day", "w2:good day"])
    assert "w1:good_NEG" in word_ngrams(preprocess("not good"), 1, 1)
    assert word_ngrams(preprocess("good"), 2, 2) == Counter()


def test_ngram_placeholders():
    grams = word_ngrams(preprocess("@bob see http://t.co/x"), 1, 1)
    assert set(grams) == {"w1:<user>", "w1:see", "w1:<url>"}


@given(words, st.integers(1, 4), st.integers(0, 3))
def test_ngram_count_identity(text, nmin, extra):
    nmax = nmin + extra
    doc = preprocess(text)
    T = sum(t.kind in ("word", "hashtag", "emoticon") for t in doc.tokens)
    total = sum(word_ngrams(doc, nmin, nmax).values())
    assert total == sum(max(0, T - n + 1) for n in range(nmin, nmax + 1))


def test_char_ngram_examples():
    assert char_ngrams("abcd", 3, 3) == Counter(["c3:abc", "c3:bcd"])
    assert char_ngrams("ab", 3, 5) == Counter()
    assert char_ngrams("aaaa", 3, 3)["c3:aaa"] == 2
    assert char_ngrams("A  \t B", 3, 3) == Counter(["c3:a b"])


def test_pos_count_examples():
    doc = preprocess("never dogs")
    assert not pos_counts(None, doc).any()
    v = pos_counts(PosTagging(("R", "N")), doc)
    assert v.shape == (48,)
    assert np.flatnonzero(v).tolist() == sorted([2 * DEFAULT_TAGSET.index("R"), 2 * DEFAULT_TAGSET.index("N") + 1])
    with pytest.raises(ValueError):
        pos_counts(PosTagging(("N",)), doc)


@given(words)
def test_pos_columns_sum_to_token_count(text):
    doc = preprocess(text)
    tags = PosTagging(tag_tokens(text))
    v = pos_counts(tags, doc)
    recount = Counter(tags.tags)
    for k, tag in enumerate(DEFAULT_TAGSET):
        assert v[2 * k] + v[2 * k + 1] == recount[tag]
    assert v.sum() == len(doc.tokens)


TABLE = EmbeddingTable(2, {"good": np.array([1.0, 2.0]), "day": np.array([3.0, 0.0])})


def test_embed_examples():
    np.testing.assert_array_equal(embed_compose(preprocess("good day"), TABLE), [1, 0, 3, 2, 2, 1])
    np.testing.assert_array_equal(embed_compose(preprocess("good"), TABLE), [1, 2, 1, 2, 1, 2])
    np.testing.assert_array_equal(embed_compose(preprocess("nothing here"), TABLE), np.zeros(6))


@given(st.lists(st.lists(st.floats(-5, 5), min_size=3, max_size=3), min_size=1, max_size=6))
def test_embed_min_avg_max_order(vectors):
    table = EmbeddingTable(3, {f"w{i}": np.array(v) for i, v in enumerate(vectors)})
    out = embed_compose(preprocess(" ".join(table.vectors)), table)
    lo, hi, mean = out[:3], out[3:6], out[6:]
    assert (lo <= mean + 1e-12).all() and (mean <= hi + 1e-12).all()


def test_load_embeddings(tmp_path):
    path = tmp_path / "e.txt"
    path.write_text("2 2\nGood 1 2\nday 3 0\n", encoding="utf-8")
    table = load_embeddings(path)
    assert table.dim == 2 and set(table.vectors) == {"good", "day"}
    path.write_text("good 1 2\nday 3\n", encoding="utf-8")
    with pytest.raises(ValueError, match=":2:"):
        load_embeddings(path)


def test_only_word_ngrams():
    b = extract(preprocess("good day"), ONLY_NGRAMS, Resources())
    assert b.dense == () and b.categorical


def test_disabled_families_are_absent(subtask_a_split):
    cfg, train, _, resources, _ = subtask_a_split
    no_emb = FeatureConfig(embeddings=False)
    ids, texts = train.ids[:5], train.texts[:5]
    with_emb = extract_texts(texts, ids, FeatureConfig(), resources)
    without = extract_texts(texts, ids, no_emb, resources)
    assert "embeddings" in dict(with_emb[0].dense_layout)
    assert "embeddings" not in dict(without[0].dense_layout)
    assert len({b.dense_layout for b in with_emb}) == 1


def test_extract_deterministic(subtask_a_split):
    _, train, _, resources, _ = subtask_a_split
    a = extract_texts(train.texts[:20], train.ids[:20], FeatureConfig(), resources)
    b = extract_texts(train.texts[:20], train.ids[:20], FeatureConfig(), resources)
    assert a == b


def test_missing_resource_is_named():
    cfg = FeatureConfig(word_ngrams=False, char_ngrams=False, surface=False, manual_lex=False,
                        scored_lex=False, clusters=True, pos=False, embeddings=False)
    with pytest.raises(MissingResourceError, match="word clusters"):
        extract(preprocess("x"), cfg, Resources(manual=[ManualLexicon(set(), set())]))


def test_bad_ranges():
    with pytest.raises(ValueError):
        FeatureConfig(ngram_range=(3, 2))
    with pytest.raises(ValueError):
        word_ngrams(preprocess("a"), 0, 1)
