"""The thirteen acceptance criteria at their stated tolerances and sizes.

Each test prints one PASS/FAIL line; the lines are also collected and shown
in the pytest terminal summary.
"""
import pytest

from complab.verify import CHECKS, run_check

RESULTS: list[str] = []

# wall-clock budgets (seconds) where a criterion states one
BUDGETS = {1: 10.0, 2: 1.0, 4: 1.0, 10: 120.0, 12: 120.0}


@pytest.mark.parametrize("number", [num for num, _, _ in CHECKS], ids=lambda n: f"criterion_{n:02d}")
def test_criterion(number):
    result = run_check(number, quick=False)
    budget = BUDGETS.get(number)
    in_budget = budget is None or result.runtime < budget
    passed = result.passed and in_budget
    line = result.line().replace("[PASS]", "[PASS]" if passed else "[FAIL]")
    line += f" ({result.runtime:.2f}s" + (f", budget {budget:g}s)" if budget else ")")
    RESULTS.append(line)
    print(line)
    assert result.passed, result.detail
    assert in_budget, f"runtime {result.runtime:.2f}s exceeds {budget}s"
