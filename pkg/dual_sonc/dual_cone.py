"""
Membership in the dual SONC cone.

A coefficient vector w belongs to the dual cone iff for every negative
exponent b there is a vector tau with

    ln(|w_b| / w_a) <= (a - b)^T tau      for every positive exponent a,

or, equivalently, iff ln|w_b| <= sum lambda_a ln(w_a) for every barycentric
vector lambda of b over the positive exponents. Both tests are implemented;
the first one produces a certificate.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from dual_sonc.barycentric import Exponent, LambdaOptimum, LambdaPolytope
from dual_sonc.reports import ReportMixin
from dual_sonc.simplex import LinearProgram, Relation, Status, solve
from dual_sonc.support import ExponentialSum, Kind, SignDecomposition

logger = logging.getLogger(__name__)

# tolerance on log-scale inequalities
MEMBERSHIP_TOLERANCE = 1e-8

NEGATIVE_VERTEX = 'negative vertex coefficient'


@dataclass(frozen=True)
class DualVector:
    values: Mapping[Exponent, float]

    @classmethod
    def from_sum(cls, f: ExponentialSum):
        return cls(dict(f.terms))

    def __getitem__(self, alpha: Exponent) -> float:
        return self.values.get(alpha, 0.0)

    def pairing(self, coefficients: Mapping[Exponent, float]) -> float:
        """The natural duality pairing sum_a v_a * c_a"""
        if isinstance(coefficients, ExponentialSum):
            coefficients = coefficients.terms
        return math.fsum(v * coefficients.get(a, 0.0) for a, v in self.values.items())

    def scaled(self, factor: float):
        return DualVector({a: factor * v for a, v in self.values.items()})

    def as_sum(self, kind: Kind = Kind.EXPONENTIAL) -> ExponentialSum:
        """The function identified with this vector"""
        n = len(next(iter(self.values)))
        return ExponentialSum.from_terms(n, self.values, kind)


@dataclass(frozen=True)
class DualMembershipCertificate(ReportMixin):
    taus: Mapping[Exponent, Tuple[float, ...]] = field(default_factory=dict)

    def max_violation(self, w: DualVector, dec: SignDecomposition) -> float:
        """Largest amount by which a log-ratio inequality fails (<= 0 when all hold)"""
        worst = -math.inf
        for beta, tau in self.taus.items():
            for alpha in dec.a_plus:
                if w[alpha] == 0:
                    continue
                lhs = math.log(abs(w[beta]) / w[alpha])
                rhs = float(np.dot(np.subtract(alpha, beta, dtype=float), tau))
                worst = max(worst, lhs - rhs)
        return worst


@dataclass(frozen=True)
class MembershipVerdict:
    member: bool
    certificate: Optional[DualMembershipCertificate] = None
    reason: str = ''
    witnesses: Mapping[Exponent, LambdaOptimum] = field(default_factory=dict)

    def __bool__(self):
        return self.member


def _precondition_violation(w: DualVector, dec: SignDecomposition) -> Optional[str]:
    for alpha in dec.vertices:
        if w[alpha] < 0:
            return NEGATIVE_VERTEX
    for alpha in dec.a_plus:
        if w[alpha] < 0:
            return f'negative coefficient at positive exponent {list(alpha)}'
    return None


def _active_betas(w: DualVector, dec: SignDecomposition) -> List[Exponent]:
    # ln 0 = -inf makes every inequality of a zero-valued beta vacuous
    return [beta for beta in dec.a_minus if w[beta] != 0]


def _zero_reachable(dec: SignDecomposition, beta: Exponent, zeros: List[Exponent]):
    """True iff some barycentric vector of ``beta`` weights a zero-valued exponent"""
    reach = LambdaPolytope(dec.a_plus, beta).minimize({alpha: -1.0 for alpha in zeros})
    return reach is not None and reach.value < -MEMBERSHIP_TOLERANCE


def build_membership_lp(w: DualVector, dec: SignDecomposition):
    """Assembles the tau feasibility program

    Returns ``(lp, tau_variables, blocked)`` where ``blocked`` lists the betas
    that can never be certified because a positive exponent with value zero is
    reachable from them. Unreachable zero-valued exponents get no row.
    """
    lp = LinearProgram()
    tau_variables: Dict[Exponent, List[int]] = {}
    blocked = []
    zeros = [alpha for alpha in dec.a_plus if w[alpha] == 0]

    for beta in _active_betas(w, dec):
        if zeros and _zero_reachable(dec, beta, zeros):
            blocked.append(beta)
            continue

        n = len(beta)
        tau_variables[beta] = lp.add_variables(n, prefix=f'tau{list(beta)}')
        log_beta = math.log(abs(w[beta]))
        for alpha in dec.a_plus:
            if w[alpha] == 0:
                continue
            lp.add_constraint(
                dict(zip(tau_variables[beta], np.subtract(alpha, beta, dtype=float))),
                Relation.GE,
                log_beta - math.log(w[alpha]),
                name=f'beta={list(beta)} alpha={list(alpha)}',
            )
    return lp, tau_variables, blocked


def check_membership_tau(w: DualVector, dec: SignDecomposition) -> MembershipVerdict:
    reason = _precondition_violation(w, dec)
    if reason:
        return MembershipVerdict(False, reason=reason)

    lp, tau_variables, blocked = build_membership_lp(w, dec)
    if blocked:
        return MembershipVerdict(
            False, reason=f'zero coefficient reachable from {list(blocked[0])}'
        )

    if not tau_variables:
        return MembershipVerdict(True, DualMembershipCertificate({}))

    solution = solve(lp)
    logger.debug(
        'membership program: %d variables, %d rows, status %s',
        lp.num_variables,
        len(lp.constraints),
        solution.status.value,
    )
    if solution.status is not Status.OPTIMAL:
        return MembershipVerdict(False, reason='log-ratio system is infeasible')

    taus = {
        beta: tuple(float(solution.point[i]) for i in indices)
        for beta, indices in tau_variables.items()
    }
    return MembershipVerdict(True, DualMembershipCertificate(taus))


def check_membership_lambda(w: DualVector, dec: SignDecomposition) -> MembershipVerdict:
    reason = _precondition_violation(w, dec)
    if reason:
        return MembershipVerdict(False, reason=reason)

    witnesses = {}
    zeros = [alpha for alpha in dec.a_plus if w[alpha] == 0]
    for beta in _active_betas(w, dec):
        polytope = LambdaPolytope(dec.a_plus, beta)
        # ln 0 = -inf: any coordinate vector touching a zero drives the minimum to -inf
        if zeros and _zero_reachable(dec, beta, zeros):
            return MembershipVerdict(
                False, reason=f'zero coefficient reachable from {list(beta)}'
            )

        cost = {
            alpha: math.log(w[alpha]) if w[alpha] > 0 else math.inf
            for alpha in dec.a_plus
        }
        optimum = polytope.minimize(cost)
        if optimum is None:
            # beta outside the hull: no coordinates to check
            continue

        witnesses[beta] = optimum
        if optimum.value < math.log(abs(w[beta])) - MEMBERSHIP_TOLERANCE:
            return MembershipVerdict(
                False,
                reason=(
                    f'weighted log-mean {optimum.value:.6g} below '
                    f'ln|w| = {math.log(abs(w[beta])):.6g} at {list(beta)}'
                ),
                witnesses=witnesses,
            )

    return MembershipVerdict(True, witnesses=witnesses)
