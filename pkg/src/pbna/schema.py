"""JSON Schema for the reports written by the CLI."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema


@lru_cache(maxsize=1)
def report_schema() -> dict:
    text = resources.files("pbna").joinpath("data/report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def validate_report(doc: dict) -> None:
    """Raise ``jsonschema.ValidationError`` if ``doc`` is malformed."""
    jsonschema.validate(doc, report_schema())
