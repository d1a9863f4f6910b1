from __future__ import annotations

import pytest

from caio import defaults
from caio.acts import load_catalog
from caio.memory import load_semantic


@pytest.fixture(scope="session")
def emotion_rules_doc():
    return defaults.emotion_rules_doc()


@pytest.fixture(scope="session")
def semantic_store(emotion_rules_doc):
    return load_semantic(emotion_rules_doc)


@pytest.fixture(scope="session")
def emotion_rules(semantic_store):
    return semantic_store.emotion_rules


@pytest.fixture(scope="session")
def catalog(emotion_rules):
    return load_catalog(defaults.catalog_doc(), emotion_rules)


@pytest.fixture(scope="session")
def patterns(catalog):
    from caio.perception import load_patterns

    return load_patterns(defaults.patterns_doc(), catalog)


@pytest.fixture(scope="session")
def discourse_rules():
    from caio.deliberation import load_discourse_rules

    return load_discourse_rules(defaults.discourse_rules_doc())


@pytest.fixture(scope="session")
def inference_rules():
    from caio.memory import load_rules

    return load_rules(defaults.inference_rules_doc())
