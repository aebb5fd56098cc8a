"""
Circuit numbers and primal nonnegativity checks for circuit functions and
fixed-witness AGE functions.

For positive outer coefficients c_a and barycentric coordinates lambda of the
inner exponent b, the circuit number is prod (c_a / lambda_a)^lambda_a; the
function is nonnegative iff |c_b| does not exceed it. Products are always
formed in log-space.
"""

import logging
import math
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from dual_sonc.barycentric import (
    NEGATIVE_WEIGHT_TOLERANCE,
    RESIDUAL_TOLERANCE,
    BarycentricVector,
    Exponent,
    lambda_feasible,
)
from dual_sonc.errors import CircuitError
from dual_sonc.reports import ReportMixin
from dual_sonc.support import ExponentialSum, sign_split

logger = logging.getLogger(__name__)

CIRCUIT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class CircuitInstance:
    outer: Mapping[Exponent, float]
    inner_exponent: Exponent
    inner_coefficient: float

    @classmethod
    def from_sum(cls, f: ExponentialSum):
        """Reads a sum with exactly one negative term as a circuit candidate"""
        dec = sign_split(f)
        if len(dec.a_minus) != 1:
            raise CircuitError(
                'a circuit instance needs exactly one negative term, '
                f'found {len(dec.a_minus)}'
            )
        beta = dec.a_minus[0]
        return cls({alpha: f.terms[alpha] for alpha in dec.a_plus}, beta, f.terms[beta])

    def affinely_independent(self) -> bool:
        points = np.array(list(self.outer), dtype=float)
        lifted = np.hstack([points, np.ones((points.shape[0], 1))])
        return np.linalg.matrix_rank(lifted) == points.shape[0]


@dataclass(frozen=True)
class CircuitNumber(ReportMixin):
    theta: float
    log_theta: float
    lambda_used: BarycentricVector


@dataclass(frozen=True)
class CircuitVerdict(ReportMixin):
    nonnegative: bool
    equality: bool
    circuit: Optional[CircuitNumber]
    inner_coefficient: float


def circuit_number(outer_coeffs: Mapping[Exponent, float], lambdas: BarycentricVector):
    for alpha, coefficient in outer_coeffs.items():
        if coefficient <= 0:
            raise CircuitError(f'outer coefficient at {list(alpha)} must be positive')

    log_theta = 0.0
    # 0 * ln(0 / y) = 0, so only the support contributes
    for alpha in lambdas.support():
        weight = lambdas[alpha]
        if alpha not in outer_coeffs:
            raise CircuitError(
                f'lambda weights {list(alpha)}, which has no coefficient'
            )
        log_theta += weight * (math.log(outer_coeffs[alpha]) - math.log(weight))

    return CircuitNumber(math.exp(log_theta), log_theta, lambdas)


def circuit_verdict(ci: CircuitInstance) -> CircuitVerdict:
    if not ci.affinely_independent():
        raise CircuitError('outer exponents are not affinely independent')

    lambdas = lambda_feasible(list(ci.outer), ci.inner_exponent)
    if lambdas is None:
        if ci.inner_coefficient >= 0:
            return CircuitVerdict(True, False, None, ci.inner_coefficient)
        raise CircuitError(
            f'inner exponent {list(ci.inner_exponent)} lies outside the outer simplex'
        )

    circuit = circuit_number(ci.outer, lambdas)
    magnitude = abs(ci.inner_coefficient)
    nonnegative = (
        ci.inner_coefficient >= 0 or magnitude <= circuit.theta + CIRCUIT_TOLERANCE
    )
    equality = abs(magnitude - circuit.theta) <= CIRCUIT_TOLERANCE
    logger.debug('circuit number %.12g against |c_b| = %.12g', circuit.theta, magnitude)
    return CircuitVerdict(nonnegative, equality, circuit, ci.inner_coefficient)


def circuit_nonnegative(ci: CircuitInstance) -> bool:
    return circuit_verdict(ci).nonnegative


def age_witness_check(
    w, beta: Exponent, lambdas: BarycentricVector, tolerance: float = CIRCUIT_TOLERANCE
) -> bool:
    """Checks the AGE inequality for the single-beta function of ``w`` at ``lambdas``

    ``w`` is any mapping-like from exponent to value (a DualVector works).
    """
    beta = tuple(beta)
    if lambdas.residual(beta) > RESIDUAL_TOLERANCE or any(
        weight < -NEGATIVE_WEIGHT_TOLERANCE for weight in lambdas.weights.values()
    ):
        raise CircuitError(f'lambda is not a barycentric vector of {list(beta)}')

    if w[beta] >= 0:
        return True

    support = lambdas.support()
    circuit = circuit_number(
        {alpha: w[alpha] for alpha in support},
        BarycentricVector({alpha: lambdas[alpha] for alpha in support}),
    )
    return circuit.theta >= -w[beta] - tolerance
