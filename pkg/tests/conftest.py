import json

import pytest

from oracles import GOLDEN


@pytest.fixture(scope="session")
def golden():
    return json.loads(GOLDEN.read_text())
