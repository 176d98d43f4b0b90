"""Bundled case-study inputs: five products, 32 features, ten modifications."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

CASE_STUDY_FILES = {
    "model": "model.json",
    "assessment": "assessment.json",
    "catalog": "modifications.json",
}


def case_study_path(kind: str) -> Path:
    return Path(str(resources.files("plopt.data").joinpath("case_study", CASE_STUDY_FILES[kind])))
