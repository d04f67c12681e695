import os
from pathlib import Path

import hypothesis
import pytest

from contextlab.models import load_behavior, read_json

hypothesis.settings.register_profile("default", max_examples=50, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=500, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


def load_fixture(name: str):
    behavior, _ = load_behavior(FIXTURES / name)
    return behavior


@pytest.fixture
def prbox():
    return load_fixture("prbox.json")


@pytest.fixture
def cycle4_correlated():
    return load_fixture("cycle4_correlated.json")


@pytest.fixture
def disturbing1():
    return load_fixture("disturbing1.json")


@pytest.fixture
def maximally_disturbing():
    return load_fixture("maximally_disturbing.json")


@pytest.fixture
def frozen_violation() -> dict:
    data, _ = read_json(FIXTURES / "violations" / "postprocess_cbd2.json")
    return data
