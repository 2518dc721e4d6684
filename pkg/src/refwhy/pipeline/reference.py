"""Access to the bundled reference dataset (agreement counts, category taxonomy)."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources


@lru_cache(maxsize=1)
def load_reference_data() -> dict:
    payload = resources.files("refwhy.data").joinpath("reference_data.json").read_text(
        encoding="utf-8"
    )
    return json.loads(payload)


def motivation_category_names() -> list[str]:
    return [entry["name"] for entry in load_reference_data()["motivation_categories"]]
