"""Feature hashing, alpha-power damping and the tf-idf baseline.

The final vector of a document is ``[hashed | dense]``: the hashed block
holds the (transformed, L2-normalized) categorical counts and the dense
block holds the engineered features divided by their max-abs over the
training documents.
"""
from __future__ import annotations

import hashlib
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

__all__ = [
    "HashSpec",
    "IdfTable",
    "Vectorizer",
    "key_hash",
    "hash_vectorize",
    "hash_matrix",
    "alpha_power",
    "tfidf_fit",
    "tfidf_apply",
]

ALPHAS = (0.2, 0.4, 0.6, 0.8, 1.0)


@dataclass(frozen=True)
class HashSpec:
    dim: int = 2 ** 18
    seed: int = 0
    signed: bool = True

    def __post_init__(self):
        if self.dim < 2 ** 10 or self.dim & (self.dim - 1):
            raise ValueError(f"hash dim must be a power of two >= 1024, got {self.dim}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("hash seed must fit in 64 unsigned bits")


@lru_cache(maxsize=1 << 20)
def key_hash(key: str, seed: int = 0):
    """(64-bit index hash, sign) of ``key``.

    BLAKE2b keyed with the little-endian seed; both halves of a 128-bit
    digest are read little-endian, so the result is platform independent.
    """
    digest = hashlib.blake2b(key.encode("utf-8"), digest_size=16,
                             key=seed.to_bytes(8, "little")).digest()
    h = int.from_bytes(digest[:8], "little")
    sign = 1.0 if digest[8] & 1 else -1.0
    return h, sign


def _hash_counts(counts, spec):
    cols, vals = [], []
    for key, m in counts.items():
        h, s = key_hash(key, spec.seed)
        cols.append(h & (spec.dim - 1))
        vals.append(m * s if spec.signed else float(m))
    return cols, vals


def hash_vectorize(bundle, spec: HashSpec) -> sp.csr_matrix:
    """1 x dim row with every key's count added at its hashed index."""
    counts = getattr(bundle, "categorical", bundle)
    cols, vals = _hash_counts(counts, spec)
    row = sp.csr_matrix((np.asarray(vals, float), (np.zeros(len(cols), int), cols)),
                        shape=(1, spec.dim))
    row.sum_duplicates()
    return row


def hash_matrix(bundles, spec: HashSpec, weights=None) -> sp.csr_matrix:
    """Stack :func:`hash_vectorize` rows; ``weights`` optionally maps key -> factor."""
    indptr, indices, data = [0], [], []
    for b in bundles:
        counts = getattr(b, "categorical", b)
        if weights is not None:
            counts = {k: m * weights(k) for k, m in counts.items()}
        cols, vals = _hash_counts(counts, spec)
        indices.extend(cols)
        data.extend(vals)
        indptr.append(len(indices))
    X = sp.csr_matrix((np.asarray(data, float), np.asarray(indices, np.int64), np.asarray(indptr)),
                      shape=(len(indptr) - 1, spec.dim))
    X.sum_duplicates()   # collisions add up
    X.sort_indices()
    return X


def alpha_power(x, alpha):
    """Elementwise ``sign(x) * |x|**alpha``; zeros stay zero."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if sp.issparse(x):
        out = x.copy().astype(float)
        out.data = np.sign(out.data) * np.abs(out.data) ** alpha
        return out
    x = np.asarray(x, dtype=float)
    if alpha == 1.0:
        return x.copy()
    return np.sign(x) * np.abs(x) ** alpha


@dataclass(frozen=True)
class IdfTable:
    idf: dict
    n_docs: int

    @property
    def unseen(self):
        return math.log(1.0 + self.n_docs) + 1.0

    def __call__(self, key):
        return self.idf.get(key, self.unseen)


def tfidf_fit(bundles) -> IdfTable:
    """``idf(t) = ln((1 + N) / (1 + df(t))) + 1`` over the categorical keys."""
    df = Counter()
    n = 0
    for b in bundles:
        df.update(set(getattr(b, "categorical", b)))
        n += 1
    return IdfTable({k: math.log((1.0 + n) / (1.0 + c)) + 1.0 for k, c in df.items()}, n)


def tfidf_apply(bundle, table: IdfTable | None, spec: HashSpec) -> sp.csr_matrix:
    if table is None:
        raise RuntimeError("tf-idf table used before tfidf_fit")
    return hash_matrix([bundle], spec, weights=table)


def _row_l2(X):
    norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())
    norms[norms == 0.0] = 1.0
    return sp.diags(1.0 / norms) @ X


@dataclass(frozen=True)
class Vectorizer:
    """Bundles to rows.  Build with :meth:`fit`; immutable afterwards.

    Parameters
    ----------
    weighting : {"alpha", "tfidf"}
        Damping of the hashed counts.
    normalize : bool
        L2-normalize the hashed block of each row.
    """

    spec: HashSpec = HashSpec()
    alpha: float = 1.0
    weighting: str = "alpha"
    normalize: bool = True
    dense_layout: tuple = ()          # ((name, length), ...)
    dense_scale: np.ndarray | None = field(default=None, repr=False)   # None until fit
    idf: IdfTable | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.weighting not in ("alpha", "tfidf"):
            raise ValueError(f"unknown weighting {self.weighting!r}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")

    @property
    def n_features(self):
        return self.spec.dim + int(sum(n for _, n in self.dense_layout))

    def fit(self, bundles):
        bundles = list(bundles)
        layout = bundles[0].dense_layout if bundles else ()
        D = self._dense(bundles, layout)
        scale = np.abs(D).max(axis=0) if len(D) else np.zeros(D.shape[1])
        scale[scale == 0.0] = 1.0
        idf = tfidf_fit(bundles) if self.weighting == "tfidf" else None
        return Vectorizer(self.spec, self.alpha, self.weighting, self.normalize, tuple(layout),
                          scale, idf)

    def _dense(self, bundles, layout):
        width = int(sum(n for _, n in layout))
        D = np.zeros((len(bundles), width))
        for i, b in enumerate(bundles):
            if b.dense_layout != tuple(layout):
                raise ValueError(f"dense layout of document {i} differs from the fitted layout")
            if width:
                D[i] = b.dense_vector()
        return D

    def transform(self, bundles) -> sp.csr_matrix:
        bundles = list(bundles)
        if self.dense_scale is None:
            raise RuntimeError("Vectorizer used before fit")
        if self.weighting == "tfidf":
            if self.idf is None:
                raise RuntimeError("tf-idf table used before tfidf_fit")
            H = hash_matrix(bundles, self.spec, weights=self.idf)
        else:
            H = alpha_power(hash_matrix(bundles, self.spec), self.alpha)
        if self.normalize:
            H = _row_l2(H)
        D = self._dense(bundles, self.dense_layout) / self.dense_scale
        X = sp.hstack([H, sp.csr_matrix(D)], format="csr")
        X.sort_indices()
        return X

    def with_alpha(self, alpha):
        """Same fitted state with another alpha (scales do not depend on alpha)."""
        return Vectorizer(self.spec, alpha, self.weighting, self.normalize, self.dense_layout,
                          self.dense_scale, self.idf)

    def to_state(self):
        return {
            "dim": self.spec.dim, "seed": self.spec.seed, "signed": self.spec.signed,
            "alpha": self.alpha, "weighting": self.weighting, "normalize": self.normalize,
            "dense_layout": [[n, k] for n, k in self.dense_layout],
            "idf": None if self.idf is None else {"n_docs": self.idf.n_docs,
                                                  "idf": dict(sorted(self.idf.idf.items()))},
        }, {"dense_scale": np.asarray(self.dense_scale, dtype=float)}

    @classmethod
    def from_state(cls, meta, arrays):
        idf = None
        if meta["idf"] is not None:
            idf = IdfTable(dict(meta["idf"]["idf"]), int(meta["idf"]["n_docs"]))
        return cls(HashSpec(meta["dim"], meta["seed"], meta["signed"]), meta["alpha"],
                   meta["weighting"], meta["normalize"],
                   tuple((n, int(k)) for n, k in meta["dense_layout"]),
                   np.asarray(arrays["dense_scale"], dtype=float), idf)
