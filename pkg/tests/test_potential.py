import json
import math

import numpy as np
import pytest

from wellpath import (
    ConfinementError,
    NegativePotentialError,
    PotentialSpec,
    ProblemFormatError,
    UNBOUNDED_GUARD,
    WellValidationError,
    confinement_radius,
    eval_K,
    eval_W,
    load_problem,
    problem_from_dict,
    validate_wells,
)


def test_double_well_values(double_well_1d):
    p = double_well_1d
    assert eval_W(p, [0.0]) == 0.5
    assert eval_W(p, [1.0]) == 0.0
    assert eval_W(p, [2.0]) == 4.5
    assert eval_K(p, [0.0]) == 1.0
    assert eval_K(p, [-1.0]) == 0.0
    assert eval_K(p, [2.0]) == 3.0


def test_batch_evaluation(double_well_1d):
    xs = np.array([[0.0], [1.0], [2.0]])
    np.testing.assert_allclose(eval_W(double_well_1d, xs), [0.5, 0.0, 4.5])


def test_k_squared_is_twice_w(rng, double_well_2d):
    pts = rng.uniform(-2, 2, size=(200, 2))
    w = eval_W(double_well_2d, pts)
    k = eval_K(double_well_2d, pts)
    np.testing.assert_allclose(k * k, 2 * w, rtol=1e-12, atol=1e-15)


def test_negative_potential_aborts():
    p = PotentialSpec.from_strings(1, "x1", [[0.0]])
    assert eval_W(p, [1.0]) == 1.0
    with pytest.raises(NegativePotentialError) as info:
        eval_W(p, [-1.0])
    assert "-1" in str(info.value)
    with pytest.raises(NegativePotentialError):
        eval_W(p, np.array([[0.5], [-0.25]]))


def test_validate_wells_pass(double_well_1d, triple_well):
    checks = validate_wells(double_well_1d)
    assert [c.residual for c in checks] == [0.0, 0.0]
    assert [c.index for c in checks] == [0, 1]
    assert all(c.residual <= 1e-9 for c in validate_wells(triple_well))


def test_validate_wells_failure_residual_reported():
    p = PotentialSpec.from_strings(1, "0.5*(1 - x1^2)^2", [[0.9]])
    with pytest.raises(WellValidationError) as info:
        validate_wells(p)
    # W(0.9) = 0.5 * (1 - 0.81)^2 = 0.018050
    assert "0.018" in str(info.value)


def test_validate_wells_lists_all_offenders():
    p = PotentialSpec.from_strings(1, "0.5*(1 - x1^2)^2", [[0.9], [1.0], [0.5]])
    with pytest.raises(WellValidationError) as info:
        validate_wells(p)
    msg = str(info.value)
    assert "0" in msg and "2" in msg


def test_validate_wells_order_independent(double_well_1d):
    p = double_well_1d
    q = PotentialSpec.from_strings(1, "0.5*(1 - x1^2)^2", [[1.0], [-1.0]])
    rp = [(c.point, c.residual) for c in validate_wells(p)]
    rq = [(c.point, c.residual) for c in validate_wells(q)]
    assert rp == list(reversed(rq))


def test_duplicate_wells_rejected():
    with pytest.raises(WellValidationError):
        PotentialSpec.from_strings(1, "x1^2", [[0.0], [0.0]])


def test_empty_wells_rejected():
    with pytest.raises(WellValidationError):
        PotentialSpec.from_strings(1, "x1^2", [])


def test_confinement_constant_k():
    # k(t)=1: h(s)=s, so R = d0 + budget + 1 with d0 = 0 on a well
    p = PotentialSpec.from_strings(
        1, "0.5*(1 - x1^2)^2", [[-1.0], [1.0]], confinement_k="1"
    )
    r = confinement_radius(p, [-1.0], 4.0 / 3.0)
    assert r == pytest.approx(4.0 / 3.0 + 1.0, rel=1e-5)


def test_confinement_linear_k():
    # k(t)=t: h(s)=s^2/2, R = sqrt(2*(budget+1))
    p = PotentialSpec.from_strings(
        1, "0.5*(1 - x1^2)^2", [[-1.0], [1.0]], confinement_k="t"
    )
    r = confinement_radius(p, [-1.0], 4.0 / 3.0)
    assert r == pytest.approx(math.sqrt(14.0 / 3.0), rel=1e-5)


def test_confinement_off_well_start():
    # x0 = 0 has d0 = 1; with k(t)=1, R = 1 + budget + 1
    p = PotentialSpec.from_strings(
        1, "0.5*(1 - x1^2)^2", [[-1.0], [1.0]], confinement_k="1"
    )
    r = confinement_radius(p, [0.0], 0.5)
    assert r == pytest.approx(2.5, rel=1e-5)


def test_confinement_absent_guard(double_well_1d):
    assert confinement_radius(double_well_1d, [-1.0], 1.0) == UNBOUNDED_GUARD


def test_confinement_monotone_in_budget():
    p = PotentialSpec.from_strings(
        1, "0.5*(1 - x1^2)^2", [[-1.0], [1.0]], confinement_k="t"
    )
    radii = [confinement_radius(p, [-1.0], b) for b in (0.0, 0.5, 1.0, 2.0, 4.0)]
    assert all(b >= a for a, b in zip(radii, radii[1:]))


def test_confinement_nondivergent_k_errors():
    # integral of exp(-t) converges; target is never bracketed
    p = PotentialSpec.from_strings(
        1, "0.5*(1 - x1^2)^2", [[-1.0], [1.0]], confinement_k="exp(-t)"
    )
    with pytest.raises(ConfinementError):
        confinement_radius(p, [-1.0], 4.0, max_radius=1e6)


def test_confinement_negative_k_errors():
    p = PotentialSpec.from_strings(
        1, "0.5*(1 - x1^2)^2", [[-1.0], [1.0]], confinement_k="-1"
    )
    with pytest.raises(ConfinementError):
        confinement_radius(p, [-1.0], 1.0)


def test_confinement_budget_validation():
    p = PotentialSpec.from_strings(
        1, "0.5*(1 - x1^2)^2", [[-1.0], [1.0]], confinement_k="1"
    )
    with pytest.raises(ConfinementError):
        confinement_radius(p, [-1.0], -1.0)
    with pytest.raises(ConfinementError):
        confinement_radius(p, [-1.0], float("inf"))


def test_problem_from_dict_roundtrip():
    d = {
        "dimension": 2,
        "potential": "0.5*((x1^2-1)^2 + x2^2)",
        "wells": [[-1.0, 0.0], [1.0, 0.0]],
        "well_tolerance": 1e-9,
        "domain_box": [[-2.0, 2.0], [-2.0, 2.0]],
    }
    prob = problem_from_dict(d)
    assert prob.spec.dimension == 2
    assert prob.domain_box.shape == (2, 2)
    assert prob.spec.well_tolerance == 1e-9


def test_problem_unknown_field_rejected():
    with pytest.raises(ProblemFormatError):
        problem_from_dict(
            {"dimension": 1, "potential": "x1^2", "wells": [[0.0]], "extra": 1}
        )


@pytest.mark.parametrize(
    "broken",
    [
        {"potential": "x1^2", "wells": [[0.0]]},  # missing dimension
        {"dimension": 1, "wells": [[0.0]]},  # missing potential
        {"dimension": 1, "potential": "x1^2"},  # missing wells
        {"dimension": 1, "potential": "x1^2", "wells": [[0.0, 1.0]]},  # bad point size
        {"dimension": 1, "potential": "x1^2", "wells": [0.0]},  # not list of lists
        {"dimension": 1, "potential": "x1^2", "wells": [[0.0]], "domain_box": [[2, -2]]},
        {"dimension": 0, "potential": "x1^2", "wells": [[0.0]]},
        {"dimension": 1, "potential": "x1^2", "wells": [[0.0]], "well_tolerance": -1},
    ],
)
def test_problem_schema_errors(broken):
    with pytest.raises(ProblemFormatError):
        problem_from_dict(broken)


def test_load_problem(tmp_path):
    path = tmp_path / "prob.json"
    path.write_text(
        json.dumps(
            {
                "dimension": 1,
                "potential": "0.5*(1-x1^2)^2",
                "wells": [[-1.0], [1.0]],
                "domain_box": [[-2.0, 2.0]],
            }
        )
    )
    prob = load_problem(path)
    assert prob.spec.dimension == 1


def test_load_problem_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ProblemFormatError):
        load_problem(path)


def test_spec_immutable(double_well_1d):
    with pytest.raises(Exception):
        double_well_1d.wells[0, 0] = 5.0


def test_evaluation_deterministic(double_well_2d, rng):
    pts = rng.uniform(-2, 2, size=(50, 2))
    a = eval_W(double_well_2d, pts)
    b = eval_W(double_well_2d, pts)
    assert np.array_equal(a, b)
