"""Tests for the built-in golden checks."""
import pytest

from config_schema import EvalSettings
from selftest import CheckResult, relative_error, run_selftest


@pytest.fixture(scope='module')
def results():
    return run_selftest()


class TestRunSelftest:
    """Test the golden check list."""

    def test_every_check_passes(self, results):
        """Every golden check passes at default settings."""
        failed = [r.line() for r in results if not r.passed]
        assert failed == []

    def test_names_unique(self, results):
        """Check names are unique."""
        names = [r.name for r in results]
        assert len(names) == len(set(names))

    def test_covers_every_group(self, results):
        """Each check group contributes at least one check."""
        names = ' '.join(r.name for r in results)
        for label in ('smooth', 'boundary-equality', 'no-solution', 'Newtonian', 'c=0.8', 'K1', 'round trip'):
            assert label in names

    def test_strict_tolerance_reports_failures(self):
        """Failing checks are reported, not raised."""
        outcome = run_selftest(EvalSettings(max_iter=1))
        assert any(not r.passed for r in outcome)


class TestCheckResult:
    """Test report lines."""

    def test_pass_line(self):
        """Passing lines start with PASS."""
        line = CheckResult("zeta1", 0.7943, 0.7943, 1e-3, True).line()
        assert line.startswith("PASS  zeta1:")

    def test_fail_line(self):
        """Failing lines carry the tolerance."""
        line = CheckResult("zeta1", 0.9, 0.7943, 1e-3, False).line()
        assert line.startswith("FAIL")
        assert "tol 0.001" in line


class TestRelativeError:
    """Test the finite-difference comparison."""

    def test_small_values_compared_relatively(self):
        """A 1e-3 relative miss on a derivative of size 1e-4 is not hidden."""
        assert relative_error(1e-4, 1.001e-4, 1e-4) == pytest.approx(1e-3)

    def test_floor_near_a_zero(self):
        """Near a zero the error is measured against the natural scale."""
        assert relative_error(1e-12, 2e-12, 1.0) == pytest.approx(1e-9)
        assert relative_error(0.0, 0.0, 1.0) == 0.0
