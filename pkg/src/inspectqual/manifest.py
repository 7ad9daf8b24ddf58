"""Dataset Specification Sheets: validation, hashing, diffing, composition.

A sheet is the frozen identity of a training/validation/test dataset:
what it contains, how it was acquired and labelled, and which biases
were considered. Sheets are immutable once digested; any change is a new
version with a new digest. The content digest is SHA-256 over the
canonical JSON form (see `canonical`), excluding the digest field
itself, so key order in the source file never matters.

Composition checks enforce the attribute-study mix rule: a bounded
defect fraction (default 25-50%, inclusive) and, when required, a
declared marginal-case label type.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional

from .canonical import canonical_digest as _digest_doc
from .errors import DomainError
from .timestamps import parse_rfc3339

_ABSENT = object()

# Violation codes are stable identifiers; scripts may match on them.
MISSING_ID = "MISSING_ID"
BAD_VERSION = "BAD_VERSION"
MISSING_STORAGE_LOCATION = "MISSING_STORAGE_LOCATION"
EMPTY_CLASSES = "EMPTY_CLASSES"
NEGATIVE_CLASS_COUNT = "NEGATIVE_CLASS_COUNT"
COUNT_MISMATCH = "COUNT_MISMATCH"
NO_DEFECT_CLASS = "NO_DEFECT_CLASS"
NO_NONDEFECT_CLASS = "NO_NONDEFECT_CLASS"
UNKNOWN_DEFECT_CLASS = "UNKNOWN_DEFECT_CLASS"
MISSING_ACQUISITION = "MISSING_ACQUISITION"
MISSING_DEFECT_GENERATION = "MISSING_DEFECT_GENERATION"
MISSING_LABEL_TYPES = "MISSING_LABEL_TYPES"
MISSING_LABELLING_PROCESS = "MISSING_LABELLING_PROCESS"
MISSING_ANNOTATOR_INSTRUCTIONS = "MISSING_ANNOTATOR_INSTRUCTIONS"
BAD_TIMESTAMP = "BAD_TIMESTAMP"
BAD_BIAS_ENTRY = "BAD_BIAS_ENTRY"


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def to_json_dict(self) -> dict:
        return {"code": self.code, "message": self.message}


@dataclass(frozen=True)
class Labelling:
    label_types: tuple
    process: str
    annotator_instructions_ref: str
    inter_annotator_stats: Optional[dict] = None

    def to_json_dict(self) -> dict:
        return {
            "label_types": list(self.label_types),
            "process": self.process,
            "annotator_instructions_ref": self.annotator_instructions_ref,
            "inter_annotator_stats": self.inter_annotator_stats,
        }


@dataclass(frozen=True)
class BiasEntry:
    source: str
    mitigation: str

    def to_json_dict(self) -> dict:
        return {"source": self.source, "mitigation": self.mitigation}


@dataclass(frozen=True)
class DatasetSpecSheet:
    """Versioned, hashable description of an inspection dataset.

    Construction is structural only; semantic rules (count consistency,
    defect/non-defect class split, required fields) are reported by
    `validate_sheet` so that a defective document can still be loaded
    and examined.
    """

    dataset_id: str
    version: int
    storage_location: str
    class_distribution: dict
    defect_classes: tuple
    total_samples: int
    acquisition: dict
    defect_generation: str
    labelling: Labelling
    bias: tuple
    created_at: str
    artificial_defects_used: bool = False
    content_digest: Optional[str] = None

    def to_json_dict(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "version": self.version,
            "storage_location": self.storage_location,
            "class_distribution": dict(self.class_distribution),
            "defect_classes": list(self.defect_classes),
            "total_samples": self.total_samples,
            "acquisition": dict(self.acquisition),
            "defect_generation": self.defect_generation,
            "artificial_defects_used": self.artificial_defects_used,
            "labelling": self.labelling.to_json_dict(),
            "bias": [entry.to_json_dict() for entry in self.bias],
            "created_at": self.created_at,
            "content_digest": self.content_digest,
        }

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "DatasetSpecSheet":
        try:
            labelling_doc = doc["labelling"]
            labelling = Labelling(
                label_types=tuple(labelling_doc["label_types"]),
                process=labelling_doc["process"],
                annotator_instructions_ref=labelling_doc["annotator_instructions_ref"],
                inter_annotator_stats=labelling_doc.get("inter_annotator_stats"),
            )
            return cls(
                dataset_id=doc["dataset_id"],
                version=doc["version"],
                storage_location=doc["storage_location"],
                class_distribution=dict(doc["class_distribution"]),
                defect_classes=tuple(doc["defect_classes"]),
                total_samples=doc["total_samples"],
                acquisition=dict(doc["acquisition"]),
                defect_generation=doc["defect_generation"],
                artificial_defects_used=doc.get("artificial_defects_used", False),
                labelling=labelling,
                bias=tuple(
                    BiasEntry(source=b["source"], mitigation=b["mitigation"])
                    for b in doc.get("bias", [])
                ),
                created_at=doc["created_at"],
                content_digest=doc.get("content_digest"),
            )
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed dataset sheet document: {exc}") from exc


@dataclass(frozen=True)
class CompositionPolicy:
    """Bounds on the defect share of a sample set, inclusive at both ends."""

    min_defect_fraction: float = 0.25
    max_defect_fraction: float = 0.50
    require_marginal_cases: bool = True

    def __post_init__(self):
        if not (0.0 < self.min_defect_fraction <= self.max_defect_fraction < 1.0):
            raise DomainError(
                "composition bounds must satisfy 0 < min <= max < 1, got "
                f"[{self.min_defect_fraction}, {self.max_defect_fraction}]"
            )

    def to_json_dict(self) -> dict:
        return {
            "min_defect_fraction": self.min_defect_fraction,
            "max_defect_fraction": self.max_defect_fraction,
            "require_marginal_cases": self.require_marginal_cases,
        }

    @classmethod
    def from_json_dict(cls, doc: Mapping) -> "CompositionPolicy":
        return cls(
            min_defect_fraction=doc.get("min_defect_fraction", 0.25),
            max_defect_fraction=doc.get("max_defect_fraction", 0.50),
            require_marginal_cases=doc.get("require_marginal_cases", True),
        )


@dataclass(frozen=True)
class CompositionVerdict:
    passed: bool
    defect_fraction: float
    reasons: list = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "passed": self.passed,
            "defect_fraction": self.defect_fraction,
            "reasons": list(self.reasons),
        }


def validate_sheet(sheet: DatasetSpecSheet) -> list:
    """Return every violated rule as a (code, message) record; empty = valid."""
    violations = []

    def flag(code: str, message: str) -> None:
        violations.append(Violation(code=code, message=message))

    if not sheet.dataset_id:
        flag(MISSING_ID, "dataset_id must be non-empty")
    if not isinstance(sheet.version, int) or sheet.version < 1:
        flag(BAD_VERSION, f"version must be an integer >= 1, got {sheet.version!r}")
    if not sheet.storage_location:
        flag(MISSING_STORAGE_LOCATION, "storage_location must be non-empty")

    if not sheet.class_distribution:
        flag(EMPTY_CLASSES, "class_distribution must name at least one class")
    else:
        negatives = {
            label: count
            for label, count in sheet.class_distribution.items()
            if not isinstance(count, int) or count < 0
        }
        if negatives:
            flag(
                NEGATIVE_CLASS_COUNT,
                f"class counts must be non-negative integers: {sorted(negatives)}",
            )
        else:
            counted = sum(sheet.class_distribution.values())
            if counted != sheet.total_samples:
                flag(
                    COUNT_MISMATCH,
                    f"class counts sum to {counted} but total_samples is "
                    f"{sheet.total_samples}",
                )

    unknown = [c for c in sheet.defect_classes if c not in sheet.class_distribution]
    if unknown:
        flag(
            UNKNOWN_DEFECT_CLASS,
            f"defect_classes not present in class_distribution: {sorted(unknown)}",
        )
    if not sheet.defect_classes:
        flag(NO_DEFECT_CLASS, "at least one class must be declared a defect class")
    if sheet.class_distribution and not (
        set(sheet.class_distribution) - set(sheet.defect_classes)
    ):
        flag(NO_NONDEFECT_CLASS, "at least one class must be a non-defect class")

    if not sheet.acquisition:
        flag(MISSING_ACQUISITION, "acquisition setup and parameters are required")
    if not sheet.defect_generation:
        flag(
            MISSING_DEFECT_GENERATION,
            "defect generation or sampling methodology must be described",
        )
    if not sheet.labelling.label_types:
        flag(MISSING_LABEL_TYPES, "labelling.label_types must be non-empty")
    if not sheet.labelling.process:
        flag(MISSING_LABELLING_PROCESS, "labelling.process must be non-empty")
    if not sheet.labelling.annotator_instructions_ref:
        flag(
            MISSING_ANNOTATOR_INSTRUCTIONS,
            "labelling.annotator_instructions_ref must be non-empty",
        )

    for entry in sheet.bias:
        if not entry.source or not entry.mitigation:
            flag(
                BAD_BIAS_ENTRY,
                "bias entries need both a source and a mitigation",
            )
            break

    try:
        parse_rfc3339(sheet.created_at)
    except DomainError:
        flag(BAD_TIMESTAMP, f"created_at is not RFC 3339: {sheet.created_at!r}")

    return violations


def _canonical_doc(sheet: DatasetSpecSheet) -> dict:
    doc = sheet.to_json_dict()
    doc.pop("content_digest", None)
    return doc


def canonical_digest(sheet: DatasetSpecSheet) -> str:
    """SHA-256 over the sheet's canonical form; requires a valid sheet."""
    violations = validate_sheet(sheet)
    if violations:
        codes = ", ".join(v.code for v in violations)
        raise DomainError(f"cannot digest an invalid sheet ({codes})")
    return _digest_doc(_canonical_doc(sheet))


def with_digest(sheet: DatasetSpecSheet) -> DatasetSpecSheet:
    """Return a copy of the sheet carrying its content digest."""
    doc = sheet.to_json_dict()
    doc["content_digest"] = canonical_digest(sheet)
    return DatasetSpecSheet.from_json_dict(doc)


@dataclass(frozen=True)
class FieldChange:
    """One differing leaf between two sheets; None marks an absent side."""

    field_path: str
    old: Any
    new: Any

    def to_json_dict(self) -> dict:
        return {"field_path": self.field_path, "old": self.old, "new": self.new}


def _diff_values(path: str, a: Any, b: Any, out: list) -> None:
    if a is _ABSENT or b is _ABSENT or type(a) is not type(b):
        if a is not b:
            out.append(
                FieldChange(
                    field_path=path,
                    old=None if a is _ABSENT else a,
                    new=None if b is _ABSENT else b,
                )
            )
        return
    if isinstance(a, dict):
        for key in sorted(set(a) | set(b)):
            _diff_values(
                f"{path}.{key}" if path else key,
                a.get(key, _ABSENT),
                b.get(key, _ABSENT),
                out,
            )
    elif isinstance(a, list):
        for i in range(max(len(a), len(b))):
            _diff_values(
                f"{path}[{i}]",
                a[i] if i < len(a) else _ABSENT,
                b[i] if i < len(b) else _ABSENT,
                out,
            )
    elif a != b:
        out.append(FieldChange(field_path=path, old=a, new=b))


def diff_sheets(a: DatasetSpecSheet, b: DatasetSpecSheet) -> list:
    """Leaf-level change set between two sheets' canonical forms.

    Empty iff the canonical forms are identical; an element added to or
    removed from a list shows up as a single record at its index.
    """
    changes: list = []
    _diff_values("", _canonical_doc(a), _canonical_doc(b), changes)
    return changes


def _has_marginal_label(label_types) -> bool:
    return any("marginal" in label.lower() for label in label_types)


def check_composition_counts(
    class_counts: Mapping[str, int],
    defect_classes,
    policy: CompositionPolicy,
    label_types=None,
) -> CompositionVerdict:
    """Composition verdict over raw class counts.

    The marginal-case rule (a label type containing "marginal") is only
    applied when `label_types` is given; callers holding bare
    defect/good counts, with no label taxonomy, check the fraction
    bounds alone.
    """
    total = sum(class_counts.values())
    if total < 1:
        raise DomainError("composition check needs at least one sample")
    defect_total = sum(
        count for label, count in class_counts.items() if label in set(defect_classes)
    )
    fraction = defect_total / total

    reasons = []
    if fraction < policy.min_defect_fraction:
        reasons.append(
            f"defect fraction {fraction:.4f} below minimum "
            f"{policy.min_defect_fraction}"
        )
    elif fraction > policy.max_defect_fraction:
        reasons.append(
            f"defect fraction {fraction:.4f} above maximum "
            f"{policy.max_defect_fraction}"
        )
    if (
        policy.require_marginal_cases
        and label_types is not None
        and not _has_marginal_label(label_types)
    ):
        reasons.append("no marginal-case label type declared")

    return CompositionVerdict(
        passed=not reasons, defect_fraction=fraction, reasons=reasons
    )


def check_composition(
    sheet: DatasetSpecSheet, policy: CompositionPolicy
) -> CompositionVerdict:
    """Check a sheet's class mix against a composition policy."""
    violations = validate_sheet(sheet)
    if violations:
        codes = ", ".join(v.code for v in violations)
        raise DomainError(f"cannot check composition of an invalid sheet ({codes})")
    if sheet.total_samples < 1:
        raise DomainError("composition check needs at least one sample")
    return check_composition_counts(
        sheet.class_distribution,
        sheet.defect_classes,
        policy,
        label_types=sheet.labelling.label_types,
    )


def load_sheet(path) -> DatasetSpecSheet:
    """Read a sheet from a UTF-8 JSON file."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DomainError(f"sheet file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise DomainError(f"sheet file {path} must contain a JSON object")
    return DatasetSpecSheet.from_json_dict(doc)


def save_sheet(sheet: DatasetSpecSheet, path) -> None:
    """Write a sheet as readable UTF-8 JSON (digest-stable on reload)."""
    Path(path).write_text(
        json.dumps(sheet.to_json_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
