"""
Lower bounds from the dual SONC cone.

For f = sum v_a e^<x,a> + v_0 the solver looks for the smallest shift g with
f + g in the dual cone. Writing c = ln|v_0 + g| turns the membership
inequalities into a linear program in c and one vector tau per negative
exponent. Two programs are needed because the sign of v_0 + g is not known in
advance:

* origin positive (always the case for polynomials): minimise c, the bound is
  v_0 - e^c;
* origin negative (exponential sums whose positive exponents surround the
  origin): maximise c, the bound is v_0 + e^c.

The better of the feasible programs gives the bound.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional

from dual_sonc.barycentric import Exponent, lambda_feasible
from dual_sonc.dual_cone import (
    DualMembershipCertificate,
    DualVector,
    MembershipVerdict,
    check_membership_tau,
)
from dual_sonc.errors import (
    InstanceError,
    RelaxationUnboundedError,
    VertexConditionError,
)
from dual_sonc.reports import ReportMixin
from dual_sonc.simplex import (
    Bound,
    LinearProgram,
    LpSolution,
    Relation,
    Sense,
    Status,
    solve,
)
from dual_sonc.support import (
    ExponentialSum,
    Kind,
    SignDecomposition,
    sign_split,
    validate_vertex_condition,
)

logger = logging.getLogger(__name__)

# violations below this are rounding noise from the pivots
TOL_FLOOR = 1e-12


class Branch(str, Enum):
    ZERO_IN_A_PLUS = 'ZeroInAplus'
    ZERO_IN_A_MINUS = 'ZeroInAminus'


class BoundStatus(str, Enum):
    BOUNDED = 'Bounded'
    INFEASIBLE = 'Infeasible'


@dataclass(frozen=True)
class BoundResult(ReportMixin):
    status: BoundStatus
    gamma_star: float
    c_star: float
    branch: Optional[Branch]
    lower_bound: float
    certificate: Optional[DualMembershipCertificate]

    @classmethod
    def infeasible(cls):
        return cls(BoundStatus.INFEASIBLE, math.inf, math.nan, None, -math.inf, None)

    @property
    def bounded(self) -> bool:
        return self.status is BoundStatus.BOUNDED


@dataclass(frozen=True)
class RelaxedBoundResult(BoundResult):
    tol: float = 0.0
    epsilon: float = 1.0

    @property
    def certified(self) -> bool:
        """Only a zero violation leaves the bound certified"""
        return self.tol == 0.0


@dataclass
class BranchProgram:
    """A branch LP together with the bookkeeping needed to read its solution"""

    branch: Branch
    lp: LinearProgram
    c_index: int
    tau_variables: Dict[Exponent, List[int]] = field(default_factory=dict)
    tol_index: Optional[int] = None

    def certificate(self, solution: LpSolution) -> DualMembershipCertificate:
        return DualMembershipCertificate(
            {
                beta: tuple(float(solution.point[i]) for i in indices)
                for beta, indices in self.tau_variables.items()
            }
        )


def bound_decomposition(f: ExponentialSum) -> SignDecomposition:
    """Signed support without the origin, which the branch programs handle through c"""
    return _strip_origin(f, sign_split(f))


def _strip_origin(f: ExponentialSum, dec: Optional[SignDecomposition]):
    if dec is None:
        dec = sign_split(f)
    origin = f.origin
    return SignDecomposition(
        tuple(a for a in dec.a_plus if a != origin),
        tuple(a for a in dec.a_minus if a != origin),
        {a: flag for a, flag in dec.vertex_flags.items() if a != origin},
    )


def _add_ratio_rows(program, f, beta, alphas, tol_index):
    """Adds ln(|v_b| / v_a) <= (a - b)^T tau_b (+ tol) for every a in ``alphas``"""
    lp = program.lp
    tau = program.tau_variables[beta]
    log_beta = math.log(abs(f.terms[beta]))
    for alpha in alphas:
        row = {i: float(a - b) for i, a, b in zip(tau, alpha, beta)}
        if tol_index is not None:
            row[tol_index] = 1.0
        lp.add_constraint(
            row,
            Relation.GE,
            log_beta - math.log(f.terms[alpha]),
            name=f'ratio beta={list(beta)} alpha={list(alpha)}',
        )


def _assemble_relax1(f, dec=None, epsilon: Optional[float] = None) -> BranchProgram:
    dec = _strip_origin(f, dec)
    lp = LinearProgram(sense=Sense.MINIMIZE)
    program = BranchProgram(Branch.ZERO_IN_A_PLUS, lp, c_index=-1)

    for beta in dec.a_minus:
        program.tau_variables[beta] = lp.add_variables(f.n, prefix=f'tau{list(beta)}')
    program.c_index = lp.add_variable('c')
    objective = {program.c_index: 1.0}

    if epsilon is not None:
        program.tol_index = lp.add_variable('tol', Bound.NONNEGATIVE)
        objective[program.tol_index] = epsilon
    lp.set_objective(objective)

    for beta in dec.a_minus:
        _add_ratio_rows(program, f, beta, dec.a_plus, program.tol_index)

    for beta in dec.a_minus:
        # ln|v_b| - c <= (-b)^T tau_b
        row = {i: -float(b) for i, b in zip(program.tau_variables[beta], beta)}
        row[program.c_index] = 1.0
        lp.add_constraint(
            row, Relation.GE, math.log(abs(f.terms[beta])), f'origin beta={list(beta)}'
        )

    return program


def _assemble_relax2(f, dec=None, epsilon: Optional[float] = None) -> BranchProgram:
    dec = _strip_origin(f, dec)
    origin = f.origin
    lp = LinearProgram(sense=Sense.MAXIMIZE)
    program = BranchProgram(Branch.ZERO_IN_A_MINUS, lp, c_index=-1)

    for beta in dec.a_minus:
        program.tau_variables[beta] = lp.add_variables(f.n, prefix=f'tau{list(beta)}')
    program.tau_variables[origin] = lp.add_variables(f.n, prefix='tau[origin]')
    program.c_index = lp.add_variable('c')
    objective = {program.c_index: 1.0}

    if epsilon is not None:
        program.tol_index = lp.add_variable('tol', Bound.NONNEGATIVE)
        objective[program.tol_index] = -epsilon
    lp.set_objective(objective)

    for beta in dec.a_minus:
        _add_ratio_rows(program, f, beta, dec.a_plus, program.tol_index)

    for alpha in dec.a_plus:
        # c - ln(v_a) <= a^T tau_0
        row = {i: float(a) for i, a in zip(program.tau_variables[origin], alpha)}
        row[program.c_index] = -1.0
        lp.add_constraint(
            row, Relation.GE, -math.log(f.terms[alpha]), f'origin alpha={list(alpha)}'
        )

    return program


def build_lp_relax1(f: ExponentialSum, dec: SignDecomposition = None) -> LinearProgram:
    return _assemble_relax1(f, dec).lp


def relax2_applicable(f: ExponentialSum, dec: SignDecomposition = None) -> bool:
    """The negative-origin program needs positive exponents surrounding the origin

    Polynomials never qualify since their exponents lie in the nonnegative orthant.
    """
    if f.kind is Kind.POLYNOMIAL:
        return False
    dec = _strip_origin(f, dec)
    if not dec.a_plus:
        return False
    return lambda_feasible(list(dec.a_plus), f.origin) is not None


def build_lp_relax2(
    f: ExponentialSum, dec: SignDecomposition = None
) -> Optional[LinearProgram]:
    """Returns None when the branch does not apply"""
    if not relax2_applicable(f, dec):
        return None
    return _assemble_relax2(f, dec).lp


def recover_bound(c_star: float, v_0: float, branch: Branch) -> float:
    if Branch(branch) is Branch.ZERO_IN_A_PLUS:
        return v_0 - math.exp(c_star)
    return v_0 + math.exp(c_star)


def edge_case_probe(f: ExponentialSum) -> bool:
    """True iff ``f`` itself is in the dual cone, which makes 0 a lower bound"""
    return _probe(f).member


def _probe(f: ExponentialSum) -> MembershipVerdict:
    if not f.terms:
        return MembershipVerdict(True, DualMembershipCertificate({}))
    try:
        dec = sign_split(f)
    except InstanceError as exception:
        return MembershipVerdict(False, reason=str(exception))
    return check_membership_tau(DualVector.from_sum(f), dec)


def _require_vertex_condition(f: ExponentialSum):
    violations = validate_vertex_condition(f, adjoin_origin=True)
    if violations:
        raise VertexConditionError(violations)


def _result(program, solution, v_0, cls=BoundResult, **extra):
    c_star = float(solution.point[program.c_index])
    lower_bound = recover_bound(c_star, v_0, program.branch)
    return cls(
        BoundStatus.BOUNDED,
        -lower_bound,
        c_star,
        program.branch,
        lower_bound,
        program.certificate(solution),
        **extra,
    )


def _degenerate_result(f: ExponentialSum, cls=BoundResult, **extra):
    """Handles e^c -> 0, i.e. the shift that cancels the constant term"""
    verdict = _probe(f.without_constant())
    if not verdict.member:
        logger.warning(
            'unbounded origin program but the constant-free sum is not certified'
        )
        return None

    logger.info('constant-free sum is in the dual cone; bound is the constant term')
    v_0 = f.constant
    return cls(
        BoundStatus.BOUNDED,
        -v_0,
        -math.inf,
        Branch.ZERO_IN_A_PLUS,
        v_0,
        verdict.certificate,
        **extra,
    )


def _pick(candidates: List[BoundResult]) -> Optional[BoundResult]:
    # ties go to the positive-origin branch, which is listed first
    best = None
    for candidate in candidates:
        if best is None or candidate.gamma_star < best.gamma_star:
            best = candidate
    return best


def dual_sonc_bound(f: ExponentialSum) -> BoundResult:
    """Certified lower bound -gamma* with f + gamma* in the dual SONC cone"""
    _require_vertex_condition(f)
    dec = bound_decomposition(f)
    v_0 = f.constant
    candidates = []

    program = _assemble_relax1(f, dec)
    solution = solve(program.lp)
    logger.debug('positive-origin program: %s', solution.status.value)
    if solution.status is Status.OPTIMAL:
        candidates.append(_result(program, solution, v_0))
    elif solution.status is Status.UNBOUNDED:
        degenerate = _degenerate_result(f)
        if degenerate:
            candidates.append(degenerate)

    if relax2_applicable(f, dec):
        program = _assemble_relax2(f, dec)
        solution = solve(program.lp)
        logger.debug('negative-origin program: %s', solution.status.value)
        if solution.status is Status.OPTIMAL:
            candidates.append(_result(program, solution, v_0))
        elif solution.status is Status.UNBOUNDED:
            logger.warning('negative-origin program unbounded; branch skipped')
    else:
        logger.debug('negative-origin program skipped for %s', f.name or 'instance')

    best = _pick(candidates)
    if best is None:
        logger.info('no shift puts %s into the dual cone', f.name or 'the instance')
        return BoundResult.infeasible()

    logger.info(
        'bound %.12g from %s (gamma* = %.12g)',
        best.lower_bound,
        best.branch.value,
        best.gamma_star,
    )
    return best


def _relaxed_branch(assemble, f, dec, v_0, epsilon):
    """Relaxed optimum of one branch, or its strict optimum when the relaxed LP runs off

    Returns ``(result, unbounded)``; ``unbounded`` flags a relaxed program that
    had no strict optimum to fall back on.
    """
    program = assemble(f, dec, epsilon)
    solution = solve(program.lp)
    if solution.status is Status.OPTIMAL:
        return _relaxed_result(program, solution, v_0, epsilon), False
    if solution.status is not Status.UNBOUNDED:
        return None, False

    strict_program = assemble(f, dec)
    strict = solve(strict_program.lp)
    if strict.status is Status.OPTIMAL:
        logger.warning(
            'relaxed %s program unbounded for epsilon=%g; using the strict optimum',
            program.branch.value,
            epsilon,
        )
        result = _result(
            strict_program, strict, v_0, RelaxedBoundResult, tol=0.0, epsilon=epsilon
        )
        return result, False
    if strict.status is Status.UNBOUNDED and program.branch is Branch.ZERO_IN_A_PLUS:
        degenerate = _degenerate_result(f, RelaxedBoundResult, tol=0.0, epsilon=epsilon)
        return degenerate, False
    return None, strict.status is Status.INFEASIBLE


def relaxed_bound(f: ExponentialSum, epsilon: float) -> RelaxedBoundResult:
    """Bound from the programs with a shared violation ``tol`` on the ratio constraints

    The objective pays ``epsilon`` per unit of violation. A positive ``tol``
    means the bound is not certified. When the relaxed program is unbounded
    but the strict one is not, the strict optimum is returned with ``tol = 0``.
    """
    if not epsilon > 0:
        raise ValueError(f'epsilon must be positive, got {epsilon}')

    _require_vertex_condition(f)
    dec = bound_decomposition(f)
    v_0 = f.constant
    candidates = []
    unbounded = False

    branches = [_assemble_relax1]
    if relax2_applicable(f, dec):
        branches.append(_assemble_relax2)
    for assemble in branches:
        result, runaway = _relaxed_branch(assemble, f, dec, v_0, epsilon)
        unbounded = unbounded or runaway
        if result is not None:
            candidates.append(result)

    best = _pick(candidates)
    if best is None:
        if unbounded:
            raise RelaxationUnboundedError(
                f'relaxed program is unbounded for epsilon={epsilon} and the strict '
                'program is infeasible; a larger violation weight is needed'
            )
        raise RelaxationUnboundedError('no relaxed program produced a bound')

    if best.tol > 0:
        logger.warning(
            'relaxed bound %.12g violates the cone constraints by %.3e; not certified',
            best.lower_bound,
            best.tol,
        )
    return best


def _relaxed_result(program, solution, v_0, epsilon) -> RelaxedBoundResult:
    tol = float(solution.point[program.tol_index])
    if tol < TOL_FLOOR:
        tol = 0.0
    return _result(program, solution, v_0, RelaxedBoundResult, tol=tol, epsilon=epsilon)
