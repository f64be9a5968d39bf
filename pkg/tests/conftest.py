from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for `reference` imports


def pytest_runtest_logreport(report):
    # one visible pass/fail line per acceptance criterion
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        status = "PASS" if report.passed else "FAIL"
        name = report.nodeid.split("::")[-1]
        print(f"\n[ACCEPTANCE {status}] {name}", flush=True)


@pytest.fixture
def checkpoint_factory():
    """Build (checkpoints, universe) from plain sets of template strings."""
    from logcurves.templates import Checkpoint

    def build(*template_sets: set[str], timestamps=None):
        texts = sorted(set().union(*template_sets))
        index = {t: i for i, t in enumerate(texts)}
        cps = []
        for k, s in enumerate(template_sets):
            ts = timestamps[k] if timestamps else k * 1000
            cps.append(Checkpoint(k, ts, frozenset(index[t] for t in s), max(1, len(s))))
        return cps, texts

    return build
