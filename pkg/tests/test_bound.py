import math
import time

import numpy as np
import pytest

from dual_sonc.bound import (
    BoundStatus,
    Branch,
    build_lp_relax1,
    build_lp_relax2,
    dual_sonc_bound,
    edge_case_probe,
    recover_bound,
    relaxed_bound,
)
from dual_sonc.dual_cone import DualVector
from dual_sonc.errors import RelaxationUnboundedError, VertexConditionError
from dual_sonc.support import ExponentialSum, Kind, sign_split
from tests.generators import random_signed_sum, random_simplex_polynomial

LN3 = math.log(3)


def test_motzkin(instances):
    start = time.perf_counter()
    result = dual_sonc_bound(instances['motzkin'])
    elapsed = time.perf_counter() - start

    assert result.status is BoundStatus.BOUNDED
    assert result.branch is Branch.ZERO_IN_A_PLUS
    assert result.gamma_star == pytest.approx(26.0, abs=1e-6)
    assert result.c_star == pytest.approx(3 * LN3, abs=1e-8)
    assert result.lower_bound == pytest.approx(-26.0, abs=1e-6)
    tau = result.certificate.taus[(2, 2)]
    assert tau == pytest.approx((LN3 / 2, LN3 / 2), abs=1e-8)
    assert elapsed < 0.05


def test_negative_constant(instances):
    start = time.perf_counter()
    result = dual_sonc_bound(instances['negative_constant'])
    assert time.perf_counter() - start < 0.05
    assert result.gamma_star == pytest.approx(3 + 1 / (2 * math.sqrt(3)), abs=1e-8)
    assert result.gamma_star == pytest.approx(3.28868, abs=1e-4)


def test_three_negatives(instances):
    result = dual_sonc_bound(instances['three_negatives'])
    assert result.gamma_star == pytest.approx(4.51135, abs=1e-3)


def test_paired_negatives_small_coefficient(instances):
    # the optimal shift leaves a constant of 2^(1/4)
    result = dual_sonc_bound(instances['paired_negatives_c1'])
    assert result.gamma_star == pytest.approx(2 ** 0.25 - 2, abs=1e-8)


def test_paired_negatives_large_coefficient_is_infeasible(instances):
    result = dual_sonc_bound(instances['paired_negatives_c3'])
    assert result.status is BoundStatus.INFEASIBLE
    assert not result.bounded
    assert result.lower_bound == -math.inf


def test_kirkman(instances):
    start = time.perf_counter()
    result = dual_sonc_bound(instances['kirkman'])
    assert time.perf_counter() - start < 1.0
    # no constant term, so gamma* is e^c* itself
    assert result.branch is Branch.ZERO_IN_A_PLUS
    assert result.gamma_star == pytest.approx(2.5978273445, abs=1e-8)
    assert result.gamma_star == pytest.approx(math.exp(result.c_star), rel=1e-12)


def test_perfect_square(instances):
    result = dual_sonc_bound(instances['perfect_square'])
    assert result.gamma_star == pytest.approx(3.0, abs=1e-8)


def test_negative_origin_branch(instances):
    # -5 + e^x + e^-x: the best shift leaves -1 at the origin
    result = dual_sonc_bound(instances['cosh_shift'])
    assert result.branch is Branch.ZERO_IN_A_MINUS
    assert result.gamma_star == pytest.approx(4.0, abs=1e-8)
    assert result.c_star == pytest.approx(0.0, abs=1e-8)


def test_no_negative_terms(instances):
    result = dual_sonc_bound(instances['allpos'])
    assert result.bounded
    assert result.c_star == -math.inf
    assert result.lower_bound == instances['allpos'].constant
    assert result.certificate.taus == {}


def test_vertex_condition_is_enforced():
    f = ExponentialSum.from_terms(1, [((1,), 1.0), ((2,), -1.0)], Kind.POLYNOMIAL)
    with pytest.raises(VertexConditionError) as info:
        dual_sonc_bound(f)
    assert info.value.violations == ((2,),)


def test_build_lp_relax1(instances):
    lp = build_lp_relax1(instances['motzkin'])
    assert lp.num_variables == 3
    assert len(lp.constraints) == 3

    lp = build_lp_relax1(instances['negative_constant'])
    rhs = sorted(constraint.rhs for constraint in lp.constraints)
    expected = sorted([math.log(1 / 3), math.log(1 / 23), 0.0, math.log(0.5)])
    assert rhs == pytest.approx(expected)


def test_build_lp_relax2(instances):
    assert build_lp_relax2(instances['motzkin']) is None

    lp = build_lp_relax2(instances['cosh_shift'])
    assert len(lp.constraints) == 2

    one_sided = ExponentialSum.from_terms(1, [((0,), -1.0), ((1,), 1.0), ((2,), 1.0)])
    assert build_lp_relax2(one_sided) is None


@pytest.mark.parametrize(
    'c_star, v_0, branch, expected',
    [
        (3 * LN3, 1.0, Branch.ZERO_IN_A_PLUS, -26.0),
        (0.0, -5.0, Branch.ZERO_IN_A_MINUS, -4.0),
        (math.log(2), 0.0, 'ZeroInAplus', -2.0),
    ],
)
def test_recover_bound(c_star, v_0, branch, expected):
    assert recover_bound(c_star, v_0, branch) == pytest.approx(expected)


def test_edge_case_probe(instances):
    assert edge_case_probe(instances['allpos'])
    assert not edge_case_probe(instances['motzkin'])
    f = ExponentialSum.from_terms(
        1, [((0,), 1.0), ((1,), -1.0), ((2,), 1.0)], Kind.POLYNOMIAL
    )
    assert edge_case_probe(f)


def test_infeasible_instance_never_enters_the_cone(instances):
    f = instances['paired_negatives_c3']
    assert not any(edge_case_probe(f.shifted(g)) for g in np.linspace(-1e6, 1e6, 100))


def test_bounded_instance_enters_the_cone(instances):
    f = instances['motzkin']
    assert any(edge_case_probe(f.shifted(g)) for g in np.linspace(-1e6, 1e6, 100))


@pytest.mark.parametrize(
    'name',
    [
        'motzkin',
        'three_negatives',
        'negative_constant',
        'paired_negatives_c1',
        'kirkman',
        'cosh_shift',
        'allpos',
    ],
)
def test_certificate_is_valid(instances, name):
    f = instances[name]
    result = dual_sonc_bound(f)
    shifted = f.shifted(result.gamma_star)

    assert edge_case_probe(shifted)
    w = DualVector.from_sum(shifted)
    assert result.certificate.max_violation(w, sign_split(shifted)) <= 1e-8


def test_shift_consistency(rng):
    for _ in range(50):
        f = random_simplex_polynomial(rng)
        result = dual_sonc_bound(f)
        for t in (-10.0, 0.5, 1e3):
            moved = dual_sonc_bound(f.shifted(t))
            assert moved.status is result.status
            if result.bounded:
                expected = result.gamma_star - t
                assert moved.gamma_star == pytest.approx(expected, abs=1e-7)


def test_shift_consistency_for_exponential_sums(rng):
    branches = set()
    for _ in range(60):
        f = random_signed_sum(rng)
        result = dual_sonc_bound(f)
        if result.bounded:
            branches.add(result.branch)
        for t in (-10.0, 0.5, 1e3):
            moved = dual_sonc_bound(f.shifted(t))
            assert moved.status is result.status
            if result.bounded:
                expected = result.gamma_star - t
                assert moved.gamma_star == pytest.approx(expected, rel=1e-9, abs=1e-7)

    assert branches == {Branch.ZERO_IN_A_PLUS, Branch.ZERO_IN_A_MINUS}


def test_relaxation_reports_violation(instances):
    result = relaxed_bound(instances['paired_negatives_c3'], epsilon=1.0)
    assert result.tol > 0
    assert not result.certified
    assert result.epsilon == 1.0


def test_relaxation_matches_strict_bound(instances):
    f = instances['paired_negatives_c1']
    result = relaxed_bound(f, epsilon=1.0)
    assert result.tol == 0.0
    assert result.certified
    assert result.gamma_star == pytest.approx(dual_sonc_bound(f).gamma_star, abs=1e-8)


def test_relaxation_falls_back_to_strict_optimum(instances):
    # the relaxed program is unbounded at epsilon = 1, the strict one is not
    for epsilon in (1.0, 3.0):
        result = relaxed_bound(instances['motzkin'], epsilon=epsilon)
        assert result.tol == 0.0
        assert result.certified
        assert result.epsilon == epsilon
        assert result.c_star == pytest.approx(3 * LN3, abs=1e-8)
        assert result.gamma_star == pytest.approx(26.0, abs=1e-8)


def test_relaxation_weight_too_small(instances):
    # no strict optimum to fall back on
    with pytest.raises(RelaxationUnboundedError):
        relaxed_bound(instances['paired_negatives_c3'], epsilon=1e-6)


def test_relaxation_without_negative_terms(instances):
    result = relaxed_bound(instances['allpos'], epsilon=1.0)
    assert result.certified
    assert result.lower_bound == instances['allpos'].constant


@pytest.mark.parametrize('epsilon', [0.0, -1.0])
def test_relaxation_weight_must_be_positive(instances, epsilon):
    with pytest.raises(ValueError):
        relaxed_bound(instances['motzkin'], epsilon)
