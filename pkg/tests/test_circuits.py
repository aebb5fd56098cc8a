import math

import numpy as np
import pytest

from dual_sonc.barycentric import BarycentricVector
from dual_sonc.circuits import (
    CircuitInstance,
    age_witness_check,
    circuit_nonnegative,
    circuit_number,
    circuit_verdict,
)
from dual_sonc.dual_cone import DualVector
from dual_sonc.errors import CircuitError
from dual_sonc.oracle import OracleConfig, sample_min
from dual_sonc.support import ExponentialSum, Kind


def test_circuit_number_motzkin():
    outer = {(0, 0): 1.0, (2, 4): 1.0, (4, 2): 1.0}
    lambdas = BarycentricVector({alpha: 1 / 3 for alpha in outer})
    assert circuit_number(outer, lambdas).theta == pytest.approx(3.0)


@pytest.mark.parametrize(
    'outer, weights, expected',
    [
        ({(0,): 1.0, (2,): 1.0}, {(0,): 0.5, (2,): 0.5}, 2.0),
        ({(0,): 5.0}, {(0,): 1.0}, 5.0),
        ({(0,): 1.0, (2,): 4.0}, {(0,): 0.5, (2,): 0.5}, 4.0),
    ],
)
def test_circuit_number(outer, weights, expected):
    theta = circuit_number(outer, BarycentricVector(weights)).theta
    assert theta == pytest.approx(expected)


def test_circuit_number_needs_positive_outer_coefficients():
    with pytest.raises(CircuitError):
        circuit_number(
            {(0,): -1.0, (2,): 1.0}, BarycentricVector({(0,): 0.5, (2,): 0.5})
        )


def test_log_space_matches_direct_product(rng):
    for _ in range(50):
        size = int(rng.integers(1, 6))
        outer = {(i,): float(10 ** rng.uniform(-3, 3)) for i in range(size)}
        weights = dict(zip(outer, rng.dirichlet(np.ones(size))))
        direct = np.prod([(outer[a] / weights[a]) ** weights[a] for a in outer])

        theta = circuit_number(outer, BarycentricVector(weights)).theta
        assert theta == pytest.approx(direct, rel=1e-12)


def test_motzkin_is_nonnegative(instances):
    verdict = circuit_verdict(CircuitInstance.from_sum(instances['motzkin']))
    assert verdict.nonnegative
    assert verdict.equality
    assert verdict.circuit.theta == pytest.approx(3.0)


def test_perturbed_motzkin_is_not(instances):
    ci = CircuitInstance.from_sum(instances['motzkin_perturbed'])
    assert not circuit_nonnegative(ci)


def test_perfect_square_sits_on_the_boundary(instances):
    verdict = circuit_verdict(CircuitInstance.from_sum(instances['perfect_square']))
    assert verdict.nonnegative
    assert verdict.equality
    assert verdict.circuit.theta == pytest.approx(2.0)


def test_equality_boundary_flips():
    outer = {(0, 0): 1.0, (2, 4): 1.0, (4, 2): 1.0}
    assert circuit_nonnegative(CircuitInstance(outer, (2, 2), -3.0))
    assert not circuit_nonnegative(CircuitInstance(outer, (2, 2), -3.0 * (1 + 1e-6)))


def test_dependent_outer_exponents():
    outer = {(0,): 1.0, (1,): 1.0, (2,): 1.0}
    with pytest.raises(CircuitError):
        circuit_verdict(CircuitInstance(outer, (1,), -1.0))


def test_inner_exponent_outside():
    outer = {(0,): 1.0, (2,): 1.0}
    with pytest.raises(CircuitError):
        circuit_verdict(CircuitInstance(outer, (3,), -1.0))


def test_from_sum_needs_a_single_negative_term(instances):
    with pytest.raises(CircuitError):
        CircuitInstance.from_sum(instances['three_negatives'])


def test_age_witness():
    half = BarycentricVector({(0,): 0.5, (2,): 0.5})

    def w(inner):
        return DualVector({(0,): 1.0, (1,): inner, (2,): 1.0})

    assert age_witness_check(w(-2.0), (1,), half)
    assert not age_witness_check(w(-3.0), (1,), half)
    assert age_witness_check(w(4.0), (1,), half)


def test_age_witness_rejects_bad_lambda():
    w = DualVector({(0,): 1.0, (1,): -1.0, (2,): 1.0})
    with pytest.raises(CircuitError):
        age_witness_check(w, (1,), BarycentricVector({(0,): 0.9, (2,): 0.1}))


def random_circuit(rng, n, scale):
    """A circuit function with minimum 1 - scale attained at a random point"""
    if n == 1:
        outer = [(0.0,), (float(rng.integers(2, 5)),)]
    else:
        a, b = (float(v) for v in rng.integers(2, 5, size=2))
        outer = [(0.0, 0.0), (a, 0.0), (0.0, b)]
    lambdas = rng.dirichlet(np.ones(n + 1))
    beta = tuple(lambdas @ np.array(outer))
    x0 = rng.uniform(-1, 1, size=n)

    terms = [(a, float(l * math.exp(-np.dot(x0, a)))) for a, l in zip(outer, lambdas)]
    terms.append((beta, -scale * math.exp(-np.dot(x0, beta))))
    return ExponentialSum.from_terms(n, terms, Kind.EXPONENTIAL)


@pytest.mark.parametrize('n', [1, 2])
@pytest.mark.parametrize('scale', [0.5, 0.9, 1.1, 1.5])
def test_agrees_with_sampled_minimum(rng, n, scale):
    cfg = OracleConfig(grid_points_per_axis=41, box_radius=3.0, refine_steps=100)
    for _ in range(5):
        f = random_circuit(rng, n, scale)
        verdict = circuit_verdict(CircuitInstance.from_sum(f))
        sampled = sample_min(f, cfg).value

        assert verdict.nonnegative is (scale < 1)
        if verdict.nonnegative:
            assert sampled >= -1e-6
        else:
            assert sampled < -1e-3
