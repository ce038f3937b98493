import os
from functools import lru_cache

import pytest

from chevgreen.count import make_group


def pytest_configure(config):
    config.addinivalue_line("markers", "extended: long counting runs, enabled by CHEVGREEN_EXTENDED=1")
    config.addinivalue_line("markers", "slow: takes more than a few seconds")


def pytest_collection_modifyitems(config, items):
    if os.environ.get("CHEVGREEN_EXTENDED") == "1":
        return
    skip = pytest.mark.skip(reason="extended run; set CHEVGREEN_EXTENDED=1")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)


@lru_cache(maxsize=None)
def group(label, q, twisted=False):
    return make_group(label, q, twisted)
