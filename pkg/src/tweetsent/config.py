"""INI run configuration.

Example::

    [run]
    subtask = A
    seed = 0

    [features]
    embeddings = no
    ngram_range = 1,4

    [resources]
    manual = bingliu-pair:lex/pos.txt|lex/neg.txt
             mpqa-clues:lex/subjclues.tff
    scored = lex/s140.tsv
    clusters = lex/clusters.txt

    [vectorize]
    hash_dim = 262144
    alpha = 0.4

    [model]
    kind = stacked
    bases = svm:crammer_singer:isotonic:1e-4
            svm:crammer_singer:platt:1e-4
            logreg:ovr:native:1e-4
            logreg:multinomial:native:1e-4

    [grid]
    alpha = 0.2,0.4,0.6,0.8,1
    lam = 1e-7,1e-6,...

Relative resource paths are resolved against the config file's directory.
Omitted keys take the subtask defaults listed in :data:`SUBTASKS`.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path

from .corpus import LABEL5, Label2, Label3, Schema
from .ensemble import DEFAULT_BASES, META_LAMBDAS, BaseSpec
from .features import FAMILIES, FeatureConfig
from .select import DEFAULT_ALPHAS, DEFAULT_LAMBDAS, Grid

__all__ = ["SubtaskInfo", "SUBTASKS", "RunConfig", "ConfigError", "load_config", "parse_config"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SubtaskInfo:
    schema: Schema
    classes: tuple
    measure: str
    model_kind: str             # "stacked" or "single"
    bases: tuple
    embeddings: bool
    quantify: bool = False


SUBTASKS = {
    "A": SubtaskInfo(Schema.A, tuple(Label3), "f1_pn", "stacked", DEFAULT_BASES, True),
    "B": SubtaskInfo(Schema.BD, tuple(Label2), "macro_recall", "single",
                     (BaseSpec("svm", "ovr", "none"),), False),
    "C": SubtaskInfo(Schema.CE, LABEL5, "mae_macro", "single",
                     (BaseSpec("logreg", "multinomial", "none"),), False),
    "D": SubtaskInfo(Schema.BD, tuple(Label2), "kld", "single",
                     (BaseSpec("svm", "ovr", "none"),), False, quantify=True),
}


@dataclass(frozen=True)
class RunConfig:
    subtask: str = "A"
    seed: int = 0
    jobs: int = 1
    features: FeatureConfig = FeatureConfig()
    manual: tuple = ()          # ((format, path-or-paths), ...)
    scored: tuple = ()
    clusters: str | None = None
    embeddings: str | None = None
    tags: str | None = None
    tagset: str | None = None
    negators: str | None = None
    hash_dim: int = 2 ** 18
    hash_seed: int = 0
    signed: bool = True
    alpha: float = 1.0
    weighting: str = "alpha"
    normalize: bool = True
    model_kind: str = "stacked"
    bases: tuple = DEFAULT_BASES
    folds: int = 5
    meta_lams: tuple = META_LAMBDAS
    grid: Grid = Grid()
    text: str = field(default="", compare=False, repr=False)
    base_dir: str | None = field(default=None, compare=False, repr=False)

    @property
    def info(self) -> SubtaskInfo:
        return SUBTASKS[self.subtask]

    def with_overrides(self, subtask=None, seed=None, jobs=None):
        cfg = self
        if subtask is not None and subtask.upper() != self.subtask:
            cfg = parse_config(self.text, subtask=subtask, base_dir=self.base_dir)
        if seed is not None:
            cfg = replace(cfg, seed=seed)
        if jobs is not None:
            cfg = replace(cfg, jobs=jobs)
        return cfg


def _floats(s):
    return tuple(float(x) for x in s.replace("\n", ",").split(",") if x.strip())


def _ints(s):
    return tuple(int(float(x)) for x in s.replace("\n", ",").split(",") if x.strip())


def _pair(s):
    a, b = _ints(s)
    return (a, b)


def _resolve(p, base_dir):
    path = Path(p.strip())
    if base_dir is not None and not path.is_absolute():
        path = Path(base_dir) / path
    return str(path)


def _parse_base(s):
    parts = s.strip().split(":")
    if len(parts) not in (3, 4):
        raise ConfigError(f"base spec {s!r} must be learner:mode:calibration[:lam]")
    lam = float(parts[3]) if len(parts) == 4 else 1e-4
    try:
        return BaseSpec(parts[0], parts[1], parts[2], lam)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _lines(value):
    return [v.strip() for v in value.splitlines() if v.strip()]


_KEYS = {
    "run": {"subtask", "seed", "jobs"},
    "features": set(FAMILIES) | {"ngram_range", "char_range"},
    "resources": {"manual", "scored", "clusters", "embeddings", "tags", "tagset", "negators"},
    "vectorize": {"hash_dim", "hash_seed", "signed", "alpha", "weighting", "normalize"},
    "model": {"kind", "bases", "lam", "folds", "meta_lams"},
    "grid": {"alpha", "lam", "hash_dim"},
}


def parse_config(text, *, subtask=None, base_dir=None) -> RunConfig:
    """Build a :class:`RunConfig` from INI text."""
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax: {exc}") from None
    unknown = set(cp.sections()) - set(_KEYS)
    if unknown:
        raise ConfigError(f"unknown config sections {sorted(unknown)}")
    for sec in cp.sections():
        extra = set(cp.options(sec)) - _KEYS[sec]
        if extra:
            raise ConfigError(f"unknown keys in [{sec}]: {sorted(extra)}")
    get = lambda sec, key, default=None: cp.get(sec, key, fallback=default)  # noqa: E731

    st = (subtask or get("run", "subtask", "A")).upper()
    if st not in SUBTASKS:
        raise ConfigError(f"unknown subtask {st!r}; choose one of {sorted(SUBTASKS)}")
    info = SUBTASKS[st]
    try:
        flags = {f: cp.getboolean("features", f, fallback=True) for f in FAMILIES}
        if not cp.has_option("features", "embeddings"):
            flags["embeddings"] = info.embeddings
        feats = FeatureConfig(**flags,
                              ngram_range=_pair(get("features", "ngram_range", "1,4")),
                              char_range=_pair(get("features", "char_range", "3,5")))
        manual = []
        for line in _lines(get("resources", "manual", "")):
            fmt, _, paths = line.partition(":")
            files = [_resolve(p, base_dir) for p in paths.split("|")]
            manual.append((fmt.strip(), tuple(files) if len(files) > 1 else files[0]))
        scored = tuple(_resolve(p, base_dir) for p in _lines(get("resources", "scored", "")))
        opt = lambda key: (_resolve(get("resources", key), base_dir)  # noqa: E731
                           if get("resources", key) else None)
        kind = get("model", "kind", info.model_kind)
        if kind not in ("stacked", "single"):
            raise ConfigError(f"model kind must be stacked or single, got {kind!r}")
        if cp.has_option("model", "bases"):
            bases = tuple(_parse_base(b) for b in _lines(get("model", "bases")))
        else:
            lam = float(get("model", "lam", "1e-4"))
            bases = tuple(b.with_lam(lam) for b in info.bases) if kind == info.model_kind \
                else tuple(b.with_lam(lam) for b in DEFAULT_BASES)
        if kind == "single" and len(bases) != 1:
            raise ConfigError("a single model needs exactly one base spec")
        grid = Grid(alpha=_floats(get("grid", "alpha", ",".join(map(str, DEFAULT_ALPHAS)))),
                    lam=_floats(get("grid", "lam", ",".join(map(repr, DEFAULT_LAMBDAS)))),
                    hash_dim=_ints(get("grid", "hash_dim", get("vectorize", "hash_dim", str(2 ** 18)))))
        cfg = RunConfig(
            subtask=st,
            seed=int(get("run", "seed", "0")),
            jobs=int(get("run", "jobs", "1")),
            features=feats,
            manual=tuple(manual),
            scored=scored,
            clusters=opt("clusters"),
            embeddings=opt("embeddings"),
            tags=opt("tags"),
            tagset=opt("tagset"),
            negators=opt("negators"),
            hash_dim=int(get("vectorize", "hash_dim", str(2 ** 18))),
            hash_seed=int(get("vectorize", "hash_seed", "0")),
            signed=cp.getboolean("vectorize", "signed", fallback=True),
            alpha=float(get("vectorize", "alpha", "1.0")),
            weighting=get("vectorize", "weighting", "alpha"),
            normalize=cp.getboolean("vectorize", "normalize", fallback=True),
            model_kind=kind,
            bases=bases,
            folds=int(get("model", "folds", "5")),
            meta_lams=_floats(get("model", "meta_lams", ",".join(map(repr, META_LAMBDAS)))),
            grid=grid,
            text=text,
            base_dir=None if base_dir is None else str(base_dir),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"bad config value: {exc}") from None
    return cfg


def load_config(path, subtask=None) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, subtask=subtask, base_dir=path.parent)
