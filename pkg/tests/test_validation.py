"""Erratum report and the named verification suite."""

from __future__ import annotations

from fractions import Fraction

from dfchaos.validation import run_verification, theta_erratum_report


def test_erratum_report_is_definitive():
    report = theta_erratum_report(total_masses=(Fraction(1, 2), 2))
    assert len(report.entries) == 2
    for entry in report.entries:
        by_slot = {(c.order, c.slot): c for c in entry.comparisons}
        # recursion limit and oracle agree everywhere
        assert all(c.recursion_vs_oracle <= 1e-5 for c in entry.comparisons)
        # first-order value is shared by all three sources
        assert by_slot[(1, 1)].published_vs_oracle <= 1e-12
        # second-row tabulated values are far from both independent routes
        assert by_slot[(2, 1)].published_vs_oracle > 0.1
        assert by_slot[(2, 2)].published_vs_oracle > 0.1
        # the reconstruction arbiter settles which row is usable
        assert entry.reconstruction_residual_oracle <= 1e-12
        assert entry.reconstruction_residual_published > 1e-2
        assert "inconsistent" in entry.verdict
    payload = report.to_json()
    assert len(payload["entries"]) == 2


def test_quick_verification_all_green():
    result = run_verification(quick=True)
    failing = [c.name for c in result.checks if not c.passed]
    assert result.all_passed, f"failing checks: {failing}"
    assert len(result.checks) == 12
    names = {c.name for c in result.checks}
    assert "integral-isometry" in names
    assert "urn-law-suite" in names
