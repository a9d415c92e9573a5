import json
from pathlib import Path

import pytest

from fraysched.core import load_instance

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def example1_instance_path():
    return DATA_DIR / "example1.instance.json"


@pytest.fixture(scope="session")
def example1_schedule_path():
    return DATA_DIR / "example1.schedule.json"


@pytest.fixture()
def example1(example1_instance_path):
    with open(example1_instance_path, encoding="utf-8") as fh:
        return load_instance(json.load(fh))


@pytest.fixture()
def example1_schedule_doc(example1_schedule_path):
    with open(example1_schedule_path, encoding="utf-8") as fh:
        return json.load(fh)
