"""JSON, CSV and JUnit output formatters.

Outputs carry no timestamps, so identical runs produce identical bytes.
"""

import csv
import io
import json
import logging
import math
import os
import tempfile
import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Any

from orlicz_spectra.runner import SolveResult, SweepResult, ValidationResult

logger = logging.getLogger(__name__)

SCHEMA = "orlicz-spectra/v1"
SWEEP_COLUMNS = ("k", "s", "i", "lambda", "c_value", "residual")


def atomic_write_text(path: Path, text: str) -> None:
    """Write text through a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise
    logger.debug(f"Wrote {path}")


def _finite(value: Any) -> Any:
    """Replace non-finite floats by None so the document stays valid JSON."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(v) for v in value]
    return value


def dumps(data: dict[str, Any]) -> str:
    return json.dumps(_finite(data), indent=2, sort_keys=True, allow_nan=False) + "\n"


class SolveReporter:
    """Generates the solve result document."""

    def generate_report(self, result: SolveResult, output_file: Path | None = None) -> str:
        """Generate JSON report.

        Args:
            result: Solve result
            output_file: Optional path to save report

        Returns:
            JSON string
        """
        data = {
            "schema": SCHEMA,
            "task": "solve",
            "inputs": result.config.to_dict(),
            "ok": result.ok,
            "levels": [outcome.to_dict() for outcome in result.outcomes],
        }
        text = dumps(data)
        if output_file:
            atomic_write_text(output_file, text)
        return text


class SweepReporter:
    """Generates the sweep CSV table and its companion verdict document."""

    def generate_table(self, result: SweepResult) -> str:
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in result.rows:
            writer.writerow({key: "" if value is None else repr(value) for key, value in row.values().items()})
        return buffer.getvalue()

    def generate_verdicts(self, result: SweepResult) -> str:
        data = {
            "schema": SCHEMA,
            "task": "sweep",
            "inputs": result.config.to_dict(),
            "ok": result.ok,
            "verdicts": [v.to_dict() for v in result.verdicts],
            "errors": [{"k": r.k, "s": r.s, "i": r.level, "error": r.error} for r in result.errors],
        }
        return dumps(data)

    def generate_report(self, result: SweepResult, output_file: Path | None = None) -> tuple[str, str]:
        """Generate the table and verdicts; with a path, write the CSV there and the JSON beside it.

        Returns:
            (CSV text, JSON text)
        """
        table = self.generate_table(result)
        verdicts = self.generate_verdicts(result)
        if output_file:
            atomic_write_text(output_file, table)
            atomic_write_text(self.verdicts_path(output_file), verdicts)
        return table, verdicts

    @staticmethod
    def verdicts_path(output_file: Path) -> Path:
        return Path(output_file).with_suffix(".verdicts.json")


class ValidationReporter:
    """Generates the validation battery document."""

    def generate_report(self, result: ValidationResult, output_file: Path | None = None) -> str:
        data = {
            "schema": SCHEMA,
            "task": "validate",
            "inputs": result.config.to_dict(),
            "ok": result.ok,
            "battery": result.battery.to_dict(),
            "observations": result.observations,
        }
        text = dumps(data)
        if output_file:
            atomic_write_text(output_file, text)
        return text


class JUnitReporter:
    """Generates JUnit XML format for CI integration."""

    def generate_report(self, result: ValidationResult, output_file: Path | None = None) -> str:
        """Generate JUnit XML report, one testcase per sub-test.

        Args:
            result: Validation result
            output_file: Optional path to save report

        Returns:
            XML string
        """
        battery = result.battery
        testsuite = ET.Element("testsuite")
        testsuite.set("name", "Orlicz spectra validation")
        testsuite.set("tests", str(len(battery.subtests)))
        testsuite.set("failures", str(len(battery.failed())))
        testsuite.set("errors", "0")

        for subtest in battery.subtests:
            testcase = ET.SubElement(testsuite, "testcase")
            testcase.set("name", subtest.name)
            testcase.set("classname", "orlicz_spectra.validation")
            if not subtest.ok:
                failure = ET.SubElement(testcase, "failure")
                failure.set("type", "property")
                failure.set("message", f"{subtest.failures}/{subtest.trials} trials failed: {subtest.anchor}")
                failure.text = "\n".join(subtest.details)

        xml_str = '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(testsuite, encoding="unicode") + "\n"
        if output_file:
            atomic_write_text(output_file, xml_str)
        return xml_str
