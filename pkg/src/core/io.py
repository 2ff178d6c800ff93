"""Run configuration parsing and result files.

Config files hold one ``block.key = value`` entry per line; ``#`` starts a
comment. Top-level keys (``scenario``, ``seed``, ``output``) carry no
block prefix. Results go to one CSV per experiment record, a checks table,
a scalars table and a JSON manifest written last.
"""

import csv
import logging
import os
import tempfile
from pathlib import Path
from typing import Iterable, Mapping

from pydantic import TypeAdapter, ValidationError

from src.core.errors import ConfigError
from src.models.results import CheckResult, ExperimentRecord, RunManifest
from src.models.schemas import RunConfig

logger = logging.getLogger("gp_fluctuations")

FLOAT_FORMAT = ".16e"
MANIFEST_NAME = "manifest.json"
CHECKS_NAME = "checks.csv"
SCALARS_NAME = "scalars.csv"

_manifest_adapter = TypeAdapter(RunManifest)


# --- Configuration ---


def parse_config_text(text: str) -> dict[str, str]:
    """Flat ``{"block.key": "value"}`` mapping from config text."""
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'block.key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}", "missing key before '='")
        if key in entries:
            raise ConfigError(key, f"given twice (again on line {lineno})")
        entries[key] = value
    return entries


def _nest(entries: Mapping[str, str]) -> dict:
    nested: dict = {}
    for key, value in entries.items():
        parts = key.split(".")
        if len(parts) > 2 or not all(parts):
            raise ConfigError(key, "keys are 'name' or 'block.name'")
        if len(parts) == 1:
            if isinstance(nested.get(key), dict):
                raise ConfigError(key, "is a block, not a value")
            nested[key] = value
            continue
        block = nested.setdefault(parts[0], {})
        if not isinstance(block, dict):
            raise ConfigError(key, f"'{parts[0]}' is a value, not a block")
        block[parts[1]] = value
    return nested


def build_config(entries: Mapping[str, str]) -> RunConfig:
    """Validate a flat mapping; the first failure becomes a ConfigError naming its key."""
    try:
        return RunConfig.model_validate(_nest(entries))
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(part) for part in first["loc"]) or "config"
        raise ConfigError(key, first["msg"]) from e


def load_config(path: Path | None = None, overrides: Mapping[str, str] | None = None) -> RunConfig:
    """Read ``path`` (if any), apply ``overrides`` on top, and validate."""
    entries: dict[str, str] = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError("config", f"cannot read {path}: {e.strerror or e}") from e
        entries = parse_config_text(text)
    entries.update({k: str(v) for k, v in (overrides or {}).items()})
    config = build_config(entries)
    logger.debug("config: scenario=%s seed=%d (%d explicit keys)", config.scenario.value, config.seed, len(entries))
    return config


def parse_override(item: str) -> tuple[str, str]:
    """``"block.key=value"`` from the command line."""
    if "=" not in item:
        raise ConfigError(item, "overrides are written as block.key=value")
    key, value = (part.strip() for part in item.split("=", 1))
    return key, value


# --- Output files ---


def _format(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, float)):
        return format(float(value), FLOAT_FORMAT)
    return str(value)


def _unique_path(directory: Path, stem: str, used: set[str]) -> Path:
    name = stem
    suffix = 2
    while name in used:
        name = f"{stem}-{suffix}"
        suffix += 1
    used.add(name)
    return directory / f"{name}.csv"


def write_series_csv(record: ExperimentRecord, path: Path) -> Path:
    """One column per series; shorter series leave trailing cells empty."""
    columns = list(record.series)
    length = max((len(v) for v in record.series.values()), default=0)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for i in range(length):
            writer.writerow([_format(record.series[c][i]) if i < len(record.series[c]) else "" for c in columns])
    return path


def write_checks_csv(records: Iterable[ExperimentRecord], path: Path) -> Path:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["record", "check", "passed", "residual", "threshold", "detail"])
        for record in records:
            for check in record.checks:
                writer.writerow([record.name, check.name, _format(check.passed), _format(check.residual),
                                 _format(check.threshold), check.detail])
    return path


def write_scalars_csv(records: Iterable[ExperimentRecord], path: Path) -> Path:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["record", "name", "value"])
        for record in records:
            for name, value in record.scalars.items():
                writer.writerow([record.name, name, _format(value)])
    return path


def write_records(records: list[ExperimentRecord], directory: Path) -> list[Path]:
    """Series CSVs for every record that has series, then the checks and scalars tables."""
    directory.mkdir(parents=True, exist_ok=True)
    used: set[str] = {Path(CHECKS_NAME).stem, Path(SCALARS_NAME).stem}
    written = []
    for record in records:
        if not any(record.series.values()):
            continue
        written.append(write_series_csv(record, _unique_path(directory, record.name, used)))
    written.append(write_checks_csv(records, directory / CHECKS_NAME))
    written.append(write_scalars_csv(records, directory / SCALARS_NAME))
    logger.debug("wrote %d files to %s", len(written), directory)
    return written


def write_manifest(manifest: RunManifest, directory: Path) -> Path:
    """Write the manifest through a temporary file and an atomic rename.

    Non-finite floats are written as null.
    """
    directory.mkdir(parents=True, exist_ok=True)
    target = directory / MANIFEST_NAME
    payload = _manifest_adapter.dump_json(manifest, indent=2)
    fd, tmp = tempfile.mkstemp(prefix=".manifest-", suffix=".json", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return target


def failed_checks(checks: Iterable[CheckResult]) -> list[CheckResult]:
    return [c for c in checks if not c.passed]
