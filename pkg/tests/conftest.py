import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = os.path.join(os.path.dirname(__file__), "data")
CATALOG = os.path.join(DATA, "catalog50.jsonl")

# printed Alexander polynomials used in several test files
K15_DELTA = "8t^6-21t^5+27t^4-27t^3+27t^2-21t+8"
PRETZEL_DELTA = "1-t+t^3-t^4+t^5-t^6+t^7-t^9+t^10"


@pytest.fixture(scope="session")
def catalog():
    from krl.knots import load_catalog
    return load_catalog(CATALOG)


@pytest.fixture(scope="session")
def k15():
    from krl import raw
    return raw(K15_DELTA, signature=-6, flags=["alternating", "small"], name="K15a78855")


@pytest.fixture(scope="session")
def pretzel():
    from krl import raw
    return raw(PRETZEL_DELTA, signature=8, flags=["montesinos"], name="P(-2,3,7)")


def pytest_terminal_summary(terminalreporter):
    import sys
    mods = [m for name, m in list(sys.modules.items()) if name.endswith("test_acceptance")]
    results = getattr(mods[0], "RESULTS", {}) if mods else {}
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n][1])
