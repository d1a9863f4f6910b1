"""Loaders for the data files shipped with the package."""

from __future__ import annotations

import json
from importlib import resources


def data_text(name: str) -> str:
    return resources.files("caio.data").joinpath(name).read_text(encoding="utf-8")


def data_json(name: str):
    return json.loads(data_text(name))


def emotion_rules_doc() -> list:
    return data_json("emotion_rules.json")


def inference_rules_doc() -> list:
    return data_json("inference_rules.json")


def catalog_doc() -> list:
    return data_json("catalog.json")


def discourse_rules_doc() -> list:
    return data_json("discourse_rules.json")


def patterns_doc() -> list:
    return data_json("patterns.json")


def scenario_doc(name: str) -> dict:
    return data_json(f"scenarios/{name}.json")
