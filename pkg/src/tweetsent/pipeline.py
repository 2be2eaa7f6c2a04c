"""End-to-end training and prediction, plus the model container.

The container is a zip archive with fixed timestamps and sorted entries::

    format.json          container version, subtask, schema
    config.json          resolved run configuration (resources, features)
    vectorizer.json      hashing and scaling parameters
    model.json           model structure; arrays live in arrays/*.npy
    fingerprint.tsv      reference texts with the predictions made at save time

Loading re-predicts the fingerprint texts and refuses a container whose
predictions no longer match.
"""
from __future__ import annotations

import io
import json
import zipfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .calibrate import CalibratedModel, IsotonicMap, PlattParams
from .config import RunConfig
from .corpus import Dataset, Schema, format_label, parse_label
from .ensemble import BaseSpec, StackedModel, fit_base, train_stack
from .features import FAMILIES, FeatureConfig, Resources, extract_texts, load_embeddings
from .lexicons import DEFAULT_TAGSET, load_clusters, load_manual, load_scored, load_tags, load_tagset
from .linear import LinearModel
from .select import Grid
from .text import load_negators
from .vectorize import HashSpec, Vectorizer

__all__ = ["Pipeline", "load_resources", "train_pipeline", "save_model", "load_model",
           "ContainerError", "FORMAT_VERSION"]

FORMAT_VERSION = 1
_EPOCH = (1980, 1, 1, 0, 0, 0)


class ContainerError(ValueError):
    pass


def load_resources(cfg: RunConfig) -> Resources:
    """Load every resource the enabled feature families need.

    Raises
    ------
    FileNotFoundError
        Naming the missing path.
    """
    f = cfg.features

    def need(path, what):
        if path is None:
            return None
        for p in (path if isinstance(path, tuple) else (path,)):
            if not Path(p).exists():
                raise FileNotFoundError(f"{what} not found: {p}")
        return path

    tagset = load_tagset(need(cfg.tagset, "tagset")) if cfg.tagset else DEFAULT_TAGSET
    res = Resources(tagset=tagset)
    if cfg.negators:
        res.negators = load_negators(need(cfg.negators, "negator list"))
    if f.manual_lex:
        res.manual = [load_manual(need(p, f"{fmt} lexicon"), fmt) for fmt, p in cfg.manual]
    if f.scored_lex:
        res.scored = [load_scored(need(p, "scored lexicon")) for p in cfg.scored]
    if f.clusters and cfg.clusters:
        res.clusters = load_clusters(need(cfg.clusters, "cluster file"))
    if f.embeddings and cfg.embeddings:
        res.embeddings = load_embeddings(need(cfg.embeddings, "embedding file"))
    if f.pos and cfg.tags:
        res.tags = load_tags(need(cfg.tags, "POS tag file"), tagset)
    return res


@dataclass(frozen=True, eq=False)
class Pipeline:
    """A fitted feature extractor, vectorizer and model."""

    cfg: RunConfig
    vectorizer: Vectorizer
    model: object                # LinearModel | CalibratedModel | StackedModel
    resources: Resources

    @property
    def classes(self):
        return self.model.classes

    def transform(self, texts, ids):
        bundles = extract_texts(texts, ids, self.cfg.features, self.resources)
        return self.vectorizer.transform(bundles)

    def predict_texts(self, texts, ids):
        return self.model.predict(self.transform(texts, ids))

    def predict(self, dataset: Dataset):
        if dataset.schema is not self.cfg.info.schema:
            raise ValueError(f"model for subtask {self.cfg.subtask} cannot read schema "
                             f"{dataset.schema.value} data")
        return self.predict_texts(dataset.texts, dataset.ids)


def train_pipeline(cfg: RunConfig, train: Dataset, resources: Resources | None = None) -> Pipeline:
    if train.schema is not cfg.info.schema:
        raise ValueError(f"subtask {cfg.subtask} expects schema {cfg.info.schema.value}, "
                         f"got {train.schema.value}")
    resources = resources or load_resources(cfg)
    bundles = extract_texts(train.texts, train.ids, cfg.features, resources)
    vec = Vectorizer(HashSpec(cfg.hash_dim, cfg.hash_seed, cfg.signed), cfg.alpha,
                     cfg.weighting, cfg.normalize).fit(bundles)
    X = vec.transform(bundles)
    y = train.labels
    classes = tuple(c for c in cfg.info.classes if c in set(y))
    if cfg.model_kind == "stacked":
        model = train_stack(X, y, cfg.bases, k=cfg.folds, seed=cfg.seed, measure=cfg.info.measure,
                            meta_lams=cfg.meta_lams, classes=classes)
    else:
        model = fit_base(cfg.bases[0], X, y, classes, k_cal=cfg.folds, seed=cfg.seed)
    return Pipeline(cfg, vec, model, resources)


# -- persistence ---------------------------------------------------------------

class _Writer:
    def __init__(self):
        self.files = {}

    def array(self, name, a):
        buf = io.BytesIO()
        np.lib.format.write_array(buf, np.ascontiguousarray(a), allow_pickle=False)
        path = f"arrays/{name}.npy"
        self.files[path] = buf.getvalue()
        return path

    def json(self, name, obj):
        self.files[name] = (json.dumps(obj, indent=1, sort_keys=True) + "\n").encode("utf-8")

    def text(self, name, s):
        self.files[name] = s.encode("utf-8")

    def write(self, path):
        with zipfile.ZipFile(path, "w", zipfile.ZIP_DEFLATED) as zf:
            for name in sorted(self.files):
                info = zipfile.ZipInfo(name, date_time=_EPOCH)
                info.compress_type = zipfile.ZIP_DEFLATED
                info.external_attr = 0o644 << 16
                zf.writestr(info, self.files[name])


def _labels_out(classes):
    return [format_label(c) for c in classes]


def _linear_state(w, prefix, m: LinearModel):
    return {"type": "linear", "classes": _labels_out(m.classes), "loss": m.loss, "lam": m.lam,
            "n_iter": m.n_iter, "objective": m.objective,
            "W": w.array(prefix + ".W", m.W), "b": w.array(prefix + ".b", m.b)}


def _model_state(w, prefix, m):
    if isinstance(m, LinearModel):
        return _linear_state(w, prefix, m)
    if isinstance(m, CalibratedModel):
        maps = []
        for k, mp in enumerate(m.maps):
            if isinstance(mp, PlattParams):
                maps.append({"kind": "platt", "A": mp.A, "B": mp.B})
            else:
                maps.append({"kind": "isotonic", "x": w.array(f"{prefix}.map{k}.x", mp.x),
                             "p": w.array(f"{prefix}.map{k}.p", mp.p)})
        return {"type": "calibrated", "method": m.method, "maps": maps,
                "base": _linear_state(w, prefix + ".base", m.base)}
    if isinstance(m, StackedModel):
        return {"type": "stacked", "k": m.k, "seed": m.seed,
                "specs": [[s.learner, s.mode, s.calibration, s.lam, s.class_weight] for s in m.specs],
                "bases": [_model_state(w, f"{prefix}.base{i}", b) for i, b in enumerate(m.bases)],
                "meta": _linear_state(w, prefix + ".meta", m.meta)}
    raise TypeError(f"cannot serialize {type(m).__name__}")


def _load_model(st, arrays, schema):
    if st["type"] == "linear":
        return LinearModel(tuple(parse_label(c, schema) for c in st["classes"]),
                           arrays[st["W"]], arrays[st["b"]], st["loss"], st["lam"],
                           st["n_iter"], st["objective"])
    if st["type"] == "calibrated":
        maps = tuple(PlattParams(d["A"], d["B"]) if d["kind"] == "platt"
                     else IsotonicMap(arrays[d["x"]], arrays[d["p"]]) for d in st["maps"])
        return CalibratedModel(_load_model(st["base"], arrays, schema), st["method"], maps)
    if st["type"] == "stacked":
        specs = tuple(BaseSpec(*s) for s in st["specs"])
        bases = tuple(_load_model(b, arrays, schema) for b in st["bases"])
        return StackedModel(specs, bases, _load_model(st["meta"], arrays, schema), st["k"], st["seed"])
    raise ContainerError(f"unknown model type {st['type']!r}")


def _config_state(cfg: RunConfig):
    f = cfg.features
    return {
        "subtask": cfg.subtask, "seed": cfg.seed,
        "features": {**{k: getattr(f, k) for k in FAMILIES},
                     "ngram_range": list(f.ngram_range), "char_range": list(f.char_range)},
        "resources": {"manual": [[fmt, list(p) if isinstance(p, tuple) else p] for fmt, p in cfg.manual],
                      "scored": list(cfg.scored), "clusters": cfg.clusters,
                      "embeddings": cfg.embeddings, "tags": cfg.tags, "tagset": cfg.tagset,
                      "negators": cfg.negators},
        "vectorize": {"hash_dim": cfg.hash_dim, "hash_seed": cfg.hash_seed, "signed": cfg.signed,
                      "alpha": cfg.alpha, "weighting": cfg.weighting, "normalize": cfg.normalize},
        "model_kind": cfg.model_kind, "folds": cfg.folds,
        "bases": [[b.learner, b.mode, b.calibration, b.lam] for b in cfg.bases],
        "meta_lams": list(cfg.meta_lams),
        "grid": {"alpha": list(cfg.grid.alpha), "lam": list(cfg.grid.lam),
                 "hash_dim": list(cfg.grid.hash_dim)},
    }


def _config_from_state(st):
    r = st["resources"]
    feats = dict(st["features"])
    feats["ngram_range"] = tuple(feats["ngram_range"])
    feats["char_range"] = tuple(feats["char_range"])
    return RunConfig(
        subtask=st["subtask"], seed=st["seed"], features=FeatureConfig(**feats),
        manual=tuple((fmt, tuple(p) if isinstance(p, list) else p) for fmt, p in r["manual"]),
        scored=tuple(r["scored"]), clusters=r["clusters"], embeddings=r["embeddings"],
        tags=r["tags"], tagset=r["tagset"], negators=r["negators"],
        **st["vectorize"],
        model_kind=st["model_kind"], folds=st["folds"],
        bases=tuple(BaseSpec(*b) for b in st["bases"]), meta_lams=tuple(st["meta_lams"]),
        grid=Grid(**{k: tuple(v) for k, v in st["grid"].items()}))


def save_model(pipe: Pipeline, path, fingerprint: Dataset | None = None):
    """Write ``pipe`` to a deterministic zip container.

    The first 50 records of ``fingerprint`` are stored with the predictions
    ``pipe`` makes on them; :func:`load_model` checks they are reproduced.
    """
    w = _Writer()
    schema = pipe.cfg.info.schema
    w.json("format.json", {"version": FORMAT_VERSION, "subtask": pipe.cfg.subtask,
                           "schema": schema.value})
    w.json("config.json", _config_state(pipe.cfg))
    vmeta, varrays = pipe.vectorizer.to_state()
    vmeta["dense_scale"] = w.array("vectorizer.dense_scale", varrays["dense_scale"])
    w.json("vectorizer.json", vmeta)
    w.json("model.json", _model_state(w, "model", pipe.model))
    lines = []
    if fingerprint is not None and len(fingerprint):
        recs = fingerprint.records[:50]
        preds = pipe.predict_texts([r.text for r in recs], [r.id for r in recs])
        lines = [f"{r.id}\t{format_label(p)}\t{r.text}\n" for r, p in zip(recs, preds)]
    w.text("fingerprint.tsv", "".join(lines))
    w.write(path)


def load_model(path, resources: Resources | None = None, verify=True) -> Pipeline:
    try:
        zf = zipfile.ZipFile(path)
    except (OSError, zipfile.BadZipFile) as exc:
        raise ContainerError(f"cannot open model container {path}: {exc}") from None
    with zf:
        names = set(zf.namelist())
        for need in ("format.json", "config.json", "vectorizer.json", "model.json"):
            if need not in names:
                raise ContainerError(f"{path}: missing {need}")
        fmt = json.loads(zf.read("format.json"))
        if fmt["version"] > FORMAT_VERSION:
            raise ContainerError(f"{path}: container version {fmt['version']} is newer than "
                                 f"this library ({FORMAT_VERSION})")
        arrays = {n: np.lib.format.read_array(io.BytesIO(zf.read(n)), allow_pickle=False)
                  for n in names if n.startswith("arrays/")}
        cfg = _config_from_state(json.loads(zf.read("config.json")))
        vmeta = json.loads(zf.read("vectorizer.json"))
        vec = Vectorizer.from_state(vmeta, {"dense_scale": arrays[vmeta["dense_scale"]]})
        schema = Schema(fmt["schema"])
        model = _load_model(json.loads(zf.read("model.json")), arrays, schema)
        fingerprint = zf.read("fingerprint.tsv").decode("utf-8") if "fingerprint.tsv" in names else ""
    pipe = Pipeline(cfg, vec, model, resources or load_resources(cfg))
    if verify and fingerprint:
        rows = [line.split("\t", 2) for line in fingerprint.splitlines()]
        got = pipe.predict_texts([r[2] for r in rows], [r[0] for r in rows])
        if [format_label(g) for g in got] != [r[1] for r in rows]:
            raise ContainerError(f"{path}: stored fingerprint predictions are not reproduced")
    return pipe
