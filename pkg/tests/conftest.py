import pytest

from tweetsent import synth
from tweetsent.config import parse_config
from tweetsent.pipeline import load_resources


@pytest.fixture(scope="session")
def resource_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("resources")
    synth.write_resources(out, seed=0)
    return out


@pytest.fixture(scope="session")
def bundle_dir(tmp_path_factory):
    return synth.write_bundle(tmp_path_factory.mktemp("bundle"), n=200, n_test=100, seed=0)


@pytest.fixture(scope="session")
def subtask_a_split(tmp_path_factory):
    """600 training and 400 held-out subtask-A records plus a wired config."""
    out = tmp_path_factory.mktemp("split_a")
    synth.write_resources(out, seed=0)
    train = synth.make_dataset("A", 600, seed=11, id_offset=0)
    test = synth.make_dataset("A", 400, seed=12, id_offset=5000)
    synth.write_dataset(train, out / "train.tsv")
    synth.write_dataset(test, out / "test.tsv")
    synth.write_tags([train, test], out / "tags.txt")
    (out / "run.ini").write_text(synth.config_text("A"), encoding="utf-8")
    cfg = parse_config(synth.config_text("A"), base_dir=out)
    return cfg, train, test, load_resources(cfg), out


@pytest.fixture
def report(capsys, request):
    """Print one PASS/FAIL line for an acceptance criterion, whatever the outcome.

    ``ok=None`` records a criterion that is not run (SKIP).
    """
    lines = []

    def record(criterion, ok, detail=""):
        lines.append((criterion, ok, detail))
        return ok

    yield record
    with capsys.disabled():
        for criterion, ok, detail in lines:
            tail = f"  ({detail})" if detail else ""
            status = "SKIP" if ok is None else "PASS" if ok else "FAIL"
            print(f"\nACCEPTANCE {status}: {criterion}{tail}")
