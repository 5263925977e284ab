"""End-to-end scan of workflow files: parse, abstract, classify, measure."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .abstraction import ConstructBag, abstract_workflow
from .catalog import Catalog, ValidationReport, default_catalog, validate_workflow
from .metrics import WorkflowMetrics, metrics_to_dict, workflow_metrics
from .model import (
    ConcretePath,
    WorkflowParseError,
    enumerate_paths,
    parse_workflow,
)


@dataclass(frozen=True)
class ScanResult:
    file: str
    error: WorkflowParseError | None
    paths: tuple[ConcretePath, ...] | None
    bag: ConstructBag | None
    metrics: WorkflowMetrics | None
    validation: ValidationReport | None

    @property
    def parsed(self) -> bool:
        return self.error is None

    @property
    def valid(self) -> bool:
        """Parses and every construct is catalog-known."""
        return self.parsed and self.validation is not None and self.validation.is_language_valid


def scan_text(text: str, file: str, catalog: Catalog | None = None) -> ScanResult:
    if catalog is None:
        catalog = default_catalog()
    try:
        tree = parse_workflow(text)
        paths = enumerate_paths(tree)
        if not paths:
            raise WorkflowParseError("workflow mapping is empty")
    except WorkflowParseError as exc:
        return ScanResult(file=file, error=exc, paths=None, bag=None, metrics=None, validation=None)
    bag = abstract_workflow(paths, catalog.rules)
    return ScanResult(
        file=file,
        error=None,
        paths=tuple(paths),
        bag=bag,
        metrics=workflow_metrics(bag, catalog),
        validation=validate_workflow(bag, catalog, paths),
    )


def scan_file(path: str | Path, catalog: Catalog | None = None) -> ScanResult:
    file = str(path)
    try:
        text = Path(path).read_text(encoding="utf-8-sig")
    except OSError as exc:
        error = WorkflowParseError(f"cannot read file: {exc}")
        return ScanResult(file=file, error=error, paths=None, bag=None, metrics=None, validation=None)
    return scan_text(text, file, catalog)


def scan_record(result: ScanResult, workflow_id: str | None = None) -> dict:
    """The JSON record for one scanned file."""
    record: dict = {"file": result.file, "valid": result.valid}
    if workflow_id is not None:
        record["workflow_id"] = workflow_id
    if result.error is not None:
        record["error"] = {
            "message": result.error.message,
            "line": result.error.line,
            "column": result.error.column,
        }
        return record
    assert result.metrics is not None
    record.update(metrics_to_dict(result.metrics))
    return record
