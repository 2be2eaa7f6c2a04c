"""Hand-built gold/prediction file pairs with closed-form expected scores."""
import json
import math
from pathlib import Path

from tweetsent.config import SUBTASKS
from tweetsent.corpus import load_dataset, read_predictions
from tweetsent.evalq import score

CASE_DIR = Path(__file__).parent / "data" / "metric_cases"
CASES = sorted(p for p in CASE_DIR.iterdir() if p.is_dir())


def expected_value(case):
    expr = json.loads((case / "case.json").read_text(encoding="utf-8"))["expected"]
    return float(eval(expr, {"__builtins__": {}}, {"log": math.log}))


def scored_value(case):
    meta = json.loads((case / "case.json").read_text(encoding="utf-8"))
    info = SUBTASKS[meta["subtask"]]
    gold = load_dataset(case / "gold.tsv", info.schema)
    by_id = {rid: label for rid, _, label in read_predictions(case / "pred.tsv", info.schema)}
    pred = [by_id[rid] for rid in gold.ids]
    return info.measure, score(info.measure, gold.labels, pred, info.classes, gold.topics)
