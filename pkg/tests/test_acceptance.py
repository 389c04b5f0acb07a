"""The twelve acceptance criteria, each at its stated tolerance.

Every run prints one pass/fail line per criterion in the terminal summary.
Details of the measured values are attached to failing assertions.
"""

import pytest

from coulomb_counts.verify import CHECKS, run_check


@pytest.mark.parametrize("number", sorted(CHECKS))
def test_criterion(number, acceptance_log):
    result = run_check(number)
    line = result.line()
    acceptance_log.append(line)
    print(line)
    for d in result.details:
        print("    " + d)
    assert result.passed, line + "\n" + "\n".join(result.details)
