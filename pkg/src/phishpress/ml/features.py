"""Feature vectors and their CSV / JSON Lines file layout.

Canonical feature order is (phish_ratio, legit_ratio, bad_form,
bad_action_field, non_matching_urls); a file may carry any subset, and a
feature mask names the active slots in canonical order.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

CANONICAL_FEATURES = (
    "phish_ratio",
    "legit_ratio",
    "bad_form",
    "bad_action_field",
    "non_matching_urls",
)

COMPRESSION_FEATURES = CANONICAL_FEATURES[:2]
HTML_FEATURES = CANONICAL_FEATURES[2:]


@dataclass(frozen=True)
class FeatureVector:
    doc_id: str
    features: tuple[float, ...]
    label: int | None = None

    def __post_init__(self):
        for v in self.features:
            if v != v or v in (float("inf"), float("-inf")):
                raise ValueError(f"non-finite feature in {self.doc_id}")


def resolve_mask(names: Sequence[str]) -> tuple[str, ...]:
    """Validate feature names and return them in canonical order."""
    unknown = [n for n in names if n not in CANONICAL_FEATURES]
    if unknown:
        raise ValueError(f"unknown feature names: {unknown}")
    return tuple(n for n in CANONICAL_FEATURES if n in set(names))


def save_feature_rows(rows: Iterable[dict], path: str | Path,
                      mask: Sequence[str], with_label: bool = True) -> Path:
    """Write feature rows as .csv or .jsonl depending on the suffix."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mask = resolve_mask(mask)
    columns = ["doc_id", *mask] + (["label"] if with_label else [])
    rows = list(rows)
    if path.suffix == ".csv":
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
            writer.writeheader()
            for row in rows:
                writer.writerow(row)
    else:
        with path.open("w", encoding="utf-8") as fh:
            for row in rows:
                fh.write(json.dumps({c: row.get(c) for c in columns}) + "\n")
    return path


def _rows_from_file(path: Path) -> list[dict]:
    if path.suffix == ".csv":
        with path.open("r", encoding="utf-8", newline="") as fh:
            return list(csv.DictReader(fh))
    rows = []
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows


def load_feature_vectors(
    path: str | Path, mask: Sequence[str] | None = None
) -> tuple[list[FeatureVector], tuple[str, ...]]:
    """Read a feature file; returns the vectors and the mask actually used
    (requested, or every canonical column present in the file)."""
    path = Path(path)
    rows = _rows_from_file(path)
    if not rows:
        return [], tuple(mask or ())
    present = [c for c in CANONICAL_FEATURES if c in rows[0]]
    use = resolve_mask(mask) if mask else tuple(present)
    missing = [c for c in use if c not in present]
    if missing:
        raise ValueError(f"feature file {path} lacks columns {missing}")
    vectors = []
    for row in rows:
        label = row.get("label")
        if label in (None, ""):
            parsed_label = None
        else:
            parsed_label = int(label)
        vectors.append(
            FeatureVector(
                doc_id=str(row["doc_id"]),
                features=tuple(float(row[c]) for c in use),
                label=parsed_label,
            )
        )
    return vectors, use
