from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from tiger.ingest import builtin_fixture_dir, load_dataset, load_qualitative_file
from tiger.scorecard import load_calibration
from tiger.taxonomy import TaxonomyConfig, classify

# The randomized property suites each run at least this many cases.
PROPERTY_EXAMPLES = 500

settings.register_profile(
    "acceptance",
    max_examples=PROPERTY_EXAMPLES,
    deadline=None,
    suppress_health_check=[
        HealthCheck.function_scoped_fixture,
        HealthCheck.too_slow,
        HealthCheck.filter_too_much,
    ],
)
settings.load_profile("acceptance")


@pytest.fixture(scope="session")
def fixture_dir():
    return builtin_fixture_dir("compound-2022")


@pytest.fixture(scope="session")
def qualitative_path(fixture_dir):
    return fixture_dir.parent / "compound-2022-qualitative.json"


@pytest.fixture(scope="session")
def compound(fixture_dir):
    result = load_dataset(fixture_dir)
    assert not result.warnings
    return result.dataset


@pytest.fixture(scope="session")
def compound_profiles(compound):
    return classify(
        compound.agent_evidence,
        TaxonomyConfig(),
        known_addresses=[record.address for record in compound.balances],
    )


@pytest.fixture(scope="session")
def compound_entries(qualitative_path):
    return load_qualitative_file(qualitative_path)


@pytest.fixture(scope="session")
def paper_calibration():
    return load_calibration("paper-2022")
