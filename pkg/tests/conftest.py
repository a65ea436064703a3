import pytest

from complab.enumeration import enumerate_all_compositions
from complab.part_set import make_part_set

PART_SETS = [(1,), (2,), (1, 2), (1, 4), (3,)]


@pytest.fixture(params=PART_SETS, ids=lambda ex: "excl" + "_".join(map(str, ex)))
def part_set(request):
    return make_part_set(request.param)


def brute_force(ps, n):
    """Compositions of n with parts in ps, via the ball-and-bar bijection."""
    return [c for c in enumerate_all_compositions(n) if all(k in ps for k in c)]


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
