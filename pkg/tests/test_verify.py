import json

import pytest

from chiralosc import verify
from chiralosc.core import Params

CONTROLS = {"jacobi_corrupted_control", "printed_C_m2_nonconserved", "he_printed_p1y_control"}


@pytest.fixture(scope="module")
def report():
    return verify.run_suite("all", seed=42)


def test_registry_size_and_suites():
    assert len(verify.REGISTRY) >= 25
    assert {c.suite for c in verify.REGISTRY.values()} == set(verify.SUITES)


def test_all_checks_behave_as_expected(report):
    bad = [(r.name, r.residual, r.tolerance) for r in report if not r.ok]
    assert not bad


def test_controls_fail_and_are_flagged(report):
    by_name = {r.name: r for r in report}
    for name in CONTROLS:
        r = by_name[name]
        assert r.expected_fail and not r.passed and r.ok
    assert {r.name for r in report if r.expected_fail} == CONTROLS


def test_report_sorted_and_deterministic(report):
    names = [r.name for r in report]
    assert names == sorted(names)
    again = verify.run_suite("algebra", seed=42)
    by_name = {r.name: r for r in report}
    for r in again:
        assert r.residual == by_name[r.name].residual


def test_single_check_matches_suite(report):
    by_name = {r.name: r for r in report}
    assert verify.run_check("jacobi_corrupted_control", 42).residual == by_name["jacobi_corrupted_control"].residual


def test_seed_changes_samples():
    a = verify.run_check("jacobi_corrupted_control", 1)
    b = verify.run_check("jacobi_corrupted_control", 2)
    assert a.residual != b.residual


def test_passed_tracks_tolerance():
    r = verify.CheckResult("x", True, 0.5, 1.0, 1)
    assert r.ok
    c = verify.CheckResult("y", False, 2.0, 1.0, 1, expected_fail=True)
    assert c.ok
    d = json.loads(c.to_json())
    assert d["ok"] is True and d["name"] == "y"


def test_unknown_suite():
    with pytest.raises(ValueError):
        verify.run_suite("geometry")


def test_negative_lambda_suite_skips_darboux():
    rs = verify.run_suite("brackets", seed=3, params=Params(-1.5, 0.8))
    assert verify.all_ok(rs)
    assert "not applicable" in {r.name: r for r in rs}["darboux_pullback_canonical"].notes


def test_table_mentions_every_check(report):
    table = verify.format_table(report)
    assert all(r.name in table for r in report)
    assert "0 unexpected" in table


def test_sampler_rejects_small_momentum(rng):
    z = verify.sample_full(rng, 2000)
    assert (z[:, 4] ** 2 + z[:, 5] ** 2).min() >= 0.01
    assert abs(z).max() <= 2
