"""The ten primary acceptance criteria, one test each.

Every test prints a single ``[PASS]`` / ``[FAIL]`` line (visible with
``pytest -s`` or in the ``-v`` log's captured output) and then asserts.
"""

import pytest

from steinitz_measure import selfcheck

CRITERIA = [
    ("measure_axioms", selfcheck.check_measure_axioms),
    ("hamming_metric", selfcheck.check_hamming_metric),
    ("tensor_law", selfcheck.check_tensor_law),
    ("member_oracle", selfcheck.check_member_oracle),
    ("saturation", selfcheck.check_saturation),
    ("relative_range_embedding", selfcheck.check_relative_range),
    ("model_chain", selfcheck.check_model_chain),
    ("back_and_forth_witness", selfcheck.check_back_and_forth),
    ("automorphism_extension", selfcheck.check_extension),
    ("classification_invariant", selfcheck.check_classification),
]


@pytest.mark.parametrize("name, check", CRITERIA, ids=[f"{i:02d}_{n}" for i, (n, _) in enumerate(CRITERIA, 1)])
def test_criterion(name, check, capsys):
    result = check()
    with capsys.disabled():
        print("\n" + result.line())
    assert result.ok, result.detail


def test_all_criteria_are_covered():
    assert [c for _, c in CRITERIA] == selfcheck.CHECKS
