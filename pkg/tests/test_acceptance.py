"""Runs every acceptance criterion once at its stated tolerance and budget."""

import jsonschema
import pytest

from ibm_lifetime import acceptance


@pytest.fixture(scope="session")
def report():
    return acceptance.run_suite()


def test_report_matches_schema(report):
    jsonschema.validate(report, acceptance.REPORT_SCHEMA)
    assert [c["id"] for c in report["criteria"]] == sorted(acceptance.CRITERIA)


@pytest.mark.parametrize("cid", sorted(acceptance.CRITERIA))
def test_criterion(report, cid, capsys):
    entry = next(c for c in report["criteria"] if c["id"] == cid)
    with capsys.disabled():
        print("\n" + acceptance.CriterionResult(**entry).line(), end="")
    assert entry["passed"], f"criterion {cid} failed: {entry.get('error') or entry['details']}"
