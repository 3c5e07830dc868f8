"""Exit criteria. Each criterion prints one PASS/FAIL line with its worst error."""

import pytest

from graphsim.reproduce import CRITERIA, TOLERANCES


@pytest.mark.parametrize("key", list(CRITERIA))
def test_criterion(key, capsys):
    result = CRITERIA[key](TOLERANCES[key])
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.line()
