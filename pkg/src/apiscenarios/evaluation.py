"""Precision, recall, F1 and accuracy against gold labels."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .errors import EvaluationError

TASKS = ("link", "validity", "summary", "reactions")
INVALID = "invalid"


def _ratio(num: int, den: int) -> float | None:
    return num / den if den > 0 else None


@dataclass(frozen=True)
class EvalReport:
    tp: int
    fp: int
    tn: int
    fn: int
    precision: float | None
    recall: float | None
    f1: float | None
    accuracy: float | None

    @classmethod
    def from_counts(cls, tp: int, fp: int, tn: int, fn: int) -> "EvalReport":
        p = _ratio(tp, tp + fp)
        r = _ratio(tp, tp + fn)
        f1 = None
        if p is not None and r is not None and p + r > 0:
            f1 = 2 * p * r / (p + r)
        return cls(tp, fp, tn, fn, p, r, f1, _ratio(tp + tn, tp + fp + tn + fn))

    @property
    def undefined(self) -> tuple[str, ...]:
        """Names of the metrics whose denominator was zero."""
        return tuple(n for n in ("precision", "recall", "f1", "accuracy")
                     if getattr(self, n) is None)

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn,
                "precision": self.precision, "recall": self.recall, "f1": self.f1,
                "accuracy": self.accuracy, "undefined": list(self.undefined)}


def load_labels(path: str | Path) -> dict[str, object]:
    """Read ``{"snippet_id", "label"}`` JSON lines into a dict."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise EvaluationError(f"cannot read labels {path}: {exc}") from exc
    out: dict[str, object] = {}
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            sid, label = rec["snippet_id"], rec["label"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise EvaluationError(f"{path}:{lineno}: malformed label record ({exc})") from exc
        if sid in out:
            raise EvaluationError(f"{path}:{lineno}: duplicate snippet_id {sid!r}")
        out[str(sid)] = label
    return out


def _link_outcome(pred, gold) -> str:
    """Positives are linked snippets; a wrong API is a false positive and an
    unlinked or rejected snippet with a gold API is a false negative."""
    pred_api = pred not in (None, INVALID)
    if gold == INVALID:
        return "fp" if pred_api else "tn"
    if pred_api:
        return "tp" if pred == gold else "fp"
    return "fn"


def _validity_outcome(pred, gold) -> str:
    """Positive class: the snippet is not valid code."""
    p, g = pred == INVALID, gold == INVALID
    if p and g:
        return "tp"
    if p:
        return "fp"
    return "fn" if g else "tn"


def evaluate(predictions: Iterable[tuple[str, object]] | Mapping[str, object],
             gold: Mapping[str, object] | str | Path, task: str = "link") -> EvalReport:
    """Score predictions against gold labels.

    ``link`` and ``validity`` count one outcome per snippet.  ``summary``
    and ``reactions`` labels are id lists; every id counts as one item and
    there are no true negatives.  Gold snippets without a prediction count
    as unlinked/valid/empty.
    """
    if task not in TASKS:
        raise EvaluationError(f"unknown task {task!r}; expected one of {', '.join(TASKS)}")
    if not isinstance(gold, Mapping):
        gold = load_labels(gold)
    pred = dict(predictions.items() if isinstance(predictions, Mapping) else predictions)
    missing = sorted(set(pred) - set(gold))
    if missing:
        raise EvaluationError("predictions without gold labels: " + ", ".join(missing))
    counts = {"tp": 0, "fp": 0, "tn": 0, "fn": 0}
    for sid, g in gold.items():
        p = pred.get(sid)
        if task in ("summary", "reactions"):
            ps, gs = set(p or ()), set(g or ())
            counts["tp"] += len(ps & gs)
            counts["fp"] += len(ps - gs)
            counts["fn"] += len(gs - ps)
        elif task == "link":
            counts[_link_outcome(p, g)] += 1
        else:
            counts[_validity_outcome(p, g)] += 1
    return EvalReport.from_counts(**counts)


def predictions_from_scenarios(doc: Mapping, task: str) -> dict[str, object]:
    """Derive predictions for ``task`` from an emitted scenario document."""
    out: dict[str, object] = {}
    for sc in doc.get("scenarios", ()):
        sid = sc["snippet_id"]
        if task == "link":
            out[sid] = sc["api"]["api"]
        elif task == "validity":
            out[sid] = "valid"
        elif task == "summary":
            desc = sc.get("description") or {}
            out[sid] = [s["id"] for s in desc.get("problem", []) + desc.get("solution", [])]
        elif task == "reactions":
            out[sid] = [r["id"] for r in sc.get("reactions", ())]
    if task in ("link", "validity"):
        for sid in doc.get("invalid_snippets", ()):
            out[sid] = INVALID
        for sid in doc.get("undecided_snippets", ()):
            out[sid] = None if task == "link" else "valid"
    return out
