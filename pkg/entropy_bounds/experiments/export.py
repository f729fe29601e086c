"""
Record Export
=============

Writes an experiment's output directory:

- ``summary.csv``  one row per n (or per suite)
- ``records.csv``  long format: experiment, n, trial, metric, value, citation;
                   summary rows carry trial = "aggregate"
- ``manifest.json`` config, its sha256, seed, package versions and the sha256
                   of every file written

Floats are written with 17 significant digits and '.' decimals so identical
(config, seed) pairs give byte-identical files.
"""

import hashlib
import json
import logging
import platform
from importlib import metadata
from pathlib import Path
from typing import Any, Dict

import pandas as pd

from entropy_bounds.experiments.config import ExperimentBase
from entropy_bounds.experiments.registry import CITATIONS
from entropy_bounds.experiments.runner import ExperimentResult
from entropy_bounds.schemas import ManifestSchema

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
RECORD_COLUMNS = ["experiment", "n", "trial", "metric", "value", "citation"]
VERSIONED_PACKAGES = ("numpy", "scipy", "pandas", "pydantic")


def config_digest(config: ExperimentBase) -> str:
    payload = json.dumps(config.model_dump(mode="json", by_alias=True), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _versions() -> Dict[str, str]:
    versions = {"python": platform.python_version()}
    for package in VERSIONED_PACKAGES:
        try:
            versions[package] = metadata.version(package)
        except metadata.PackageNotFoundError:
            versions[package] = "unknown"
    return versions


def _melt(frame: pd.DataFrame, experiment: str, trial_label: Any = None) -> pd.DataFrame:
    """Numeric and boolean columns of ``frame`` as long-format records."""
    frame = frame.copy()
    if "n" not in frame.columns:
        frame["n"] = pd.NA
    if trial_label is not None or "trial" not in frame.columns:
        frame["trial"] = trial_label if trial_label is not None else pd.NA
    metrics = [
        c
        for c in frame.columns
        if c not in ("n", "trial") and (pd.api.types.is_numeric_dtype(frame[c]) or pd.api.types.is_bool_dtype(frame[c]))
    ]
    long = frame.melt(id_vars=["n", "trial"], value_vars=metrics, var_name="metric", value_name="value")
    long["value"] = long["value"].astype(float)
    long.insert(0, "experiment", experiment)
    long["citation"] = CITATIONS.get(experiment, experiment)
    return long[RECORD_COLUMNS]


def records_frame(result: ExperimentResult, experiment: str) -> pd.DataFrame:
    """Per-trial records followed by the aggregate rows."""
    parts = [_melt(result.trials, experiment), _melt(result.summary, experiment, "aggregate")]
    return pd.concat(parts, ignore_index=True).dropna(subset=["value"])


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_results(result: ExperimentResult, config: ExperimentBase, out_dir: Path) -> ManifestSchema:
    """
    Write summary, records and manifest into ``out_dir`` (created if needed).

    Returns:
        The manifest that was written.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    experiment = config.experiment  # type: ignore[attr-defined]

    summary_path = out_dir / "summary.csv"
    records_path = out_dir / "records.csv"
    result.summary.to_csv(summary_path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    records_frame(result, experiment).to_csv(records_path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")

    manifest = ManifestSchema(
        experiment=experiment,
        seed=config.seed,
        config=config.model_dump(mode="json", by_alias=True),
        config_sha256=config_digest(config),
        versions=_versions(),
        files={p.name: _sha256(p) for p in (summary_path, records_path)},
    )
    (out_dir / "manifest.json").write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info("wrote %s records to %s", experiment, out_dir)
    return manifest
