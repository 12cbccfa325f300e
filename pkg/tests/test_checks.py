import pytest

from tlwavelab import checks
from tlwavelab.grid import GridSpec
from tlwavelab.meyer import default_system


def test_profile_checks_names_and_summary():
    results = checks.profile_checks(default_system(1))
    names = [r.name for r in results]
    assert names[0] == "partition_identity_max_err"
    assert results[0].summary == "partition identity max err < 1e-9"
    assert checks.all_passed(results)
    assert "negative" in results[-1].detail


def test_check_result_helpers():
    r = checks._le("x_err", 2.0, 1.0)
    assert not r.passed and r.to_dict()["summary"] == "x err < 1"
    assert checks._ge("y", 0.5, 0.1).summary == "y > 0.1"
    assert checks._le("z", 0.0, 0.0).summary == "z == 0"
    assert checks.finite_or_none(float("nan")) is None and checks.finite_or_none(2.0) == 2.0


def test_small_suite_passes_and_is_deterministic():
    spec = GridSpec(1, 3, 8)
    sizes = {"parseval": 3, "gram": 30, "diag": 20, "controls": 5, "square": 3, "adjoint": 2}
    a = checks.verify_suite(spec, seed=4, sizes=sizes)
    b = checks.verify_suite(spec, seed=4, sizes=sizes, jobs=3)
    assert checks.all_passed(a)
    assert [r.to_dict() for r in a] == [r.to_dict() for r in b]


def test_far_scale_pairs():
    spec = GridSpec(1, 3, 8)
    pairs = checks.far_scale_pairs(spec)
    assert all(abs(j - jt) >= 2 for j, jt in pairs)
    assert (spec.j_lo, spec.j_hi) in pairs


@pytest.mark.parametrize("dim", [1, 2])
def test_father_lattice_checks(dim):
    results = checks.father_lattice_checks(default_system(1), dim)
    assert checks.all_passed(results) and len(results) == dim
