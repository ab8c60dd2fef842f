from __future__ import annotations

import json
import pathlib

import pytest

from fdplace.model import FailureModel, parse_model

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def fixture_path(name: str) -> pathlib.Path:
    return FIXTURES / name


def load_model(name: str) -> FailureModel:
    return parse_model(fixture_path(name).read_text())


def load_json(name: str) -> object:
    return json.loads(fixture_path(name).read_text())


@pytest.fixture
def two_rows() -> FailureModel:
    return load_model("two_rows.json")


@pytest.fixture
def shared_tree() -> FailureModel:
    return load_model("shared_tree.json")
