"""
Dense two-phase primal simplex for the small linear programs assembled by the
other modules.

Free variables are split into a difference of two nonnegative columns,
Bland's rule prevents cycling, and every solve owns its tableau.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from dual_sonc.errors import NumericalBreakdownError

logger = logging.getLogger(__name__)


class Sense(str, Enum):
    MINIMIZE = 'minimize'
    MAXIMIZE = 'maximize'


class Relation(str, Enum):
    LE = '<='
    EQ = '='
    GE = '>='


class Bound(str, Enum):
    FREE = 'free'
    NONNEGATIVE = 'nonnegative'


class Status(str, Enum):
    OPTIMAL = 'Optimal'
    INFEASIBLE = 'Infeasible'
    UNBOUNDED = 'Unbounded'


@dataclass(frozen=True)
class Tolerances:
    pivot: float = 1e-10
    feasibility: float = 1e-8
    iteration_factor: int = 50


DEFAULT_TOLERANCES = Tolerances()

Coefficients = Union[Mapping[int, float], Sequence[float]]


@dataclass(frozen=True)
class Constraint:
    coefficients: Tuple[Tuple[int, float], ...]
    relation: Relation
    rhs: float
    name: str = ''


@dataclass
class LinearProgram:
    """A linear program assembled one variable and one row at a time.

    Rows are stored sparsely as ``(index, coefficient)`` pairs and densified by
    :meth:`dense`; every densified row has exactly ``num_variables`` entries.
    """

    sense: Sense = Sense.MINIMIZE
    objective: Dict[int, float] = field(default_factory=dict)
    bounds: List[Bound] = field(default_factory=list)
    names: List[str] = field(default_factory=list)
    constraints: List[Constraint] = field(default_factory=list)

    @property
    def num_variables(self) -> int:
        return len(self.bounds)

    def add_variable(self, name: str = '', bound: Bound = Bound.FREE) -> int:
        self.bounds.append(Bound(bound))
        self.names.append(name or f'x{len(self.bounds) - 1}')
        return len(self.bounds) - 1

    def add_variables(self, count: int, prefix: str = 'x', bound=Bound.FREE):
        return [self.add_variable(f'{prefix}[{i}]', bound) for i in range(count)]

    def set_objective(self, coefficients: Coefficients, sense: Sense = None):
        self.objective = _as_pairs_dict(coefficients)
        if sense is not None:
            self.sense = Sense(sense)

    def add_constraint(
        self, coefficients: Coefficients, relation: Relation, rhs: float, name: str = ''
    ) -> Constraint:
        rhs = float(rhs)
        if not math.isfinite(rhs):
            raise ValueError(f'constraint {name!r} has non-finite rhs {rhs}')

        pairs = _as_pairs_dict(coefficients)
        for index in pairs:
            if not 0 <= index < self.num_variables:
                raise ValueError(
                    f'constraint {name!r} references unknown variable {index}'
                )

        constraint = Constraint(
            coefficients=tuple(sorted(pairs.items())),
            relation=Relation(relation),
            rhs=rhs,
            name=name,
        )
        self.constraints.append(constraint)
        return constraint

    def with_objective(self, coefficients: Coefficients, sense: Sense = None):
        """Returns a copy sharing rows and variables but with a new objective"""
        return LinearProgram(
            sense=Sense(sense) if sense is not None else self.sense,
            objective=_as_pairs_dict(coefficients),
            bounds=list(self.bounds),
            names=list(self.names),
            constraints=list(self.constraints),
        )

    def dense(self):
        """Returns ``(c, A, relations, b, free)`` as numpy arrays"""
        n = self.num_variables
        c = np.zeros(n)
        for index, value in self.objective.items():
            c[index] = value

        A = np.zeros((len(self.constraints), n))
        b = np.zeros(len(self.constraints))
        for row, constraint in enumerate(self.constraints):
            for index, value in constraint.coefficients:
                A[row, index] += value
            b[row] = constraint.rhs

        relations = [constraint.relation for constraint in self.constraints]
        free = np.array([bound is Bound.FREE for bound in self.bounds], dtype=bool)
        return c, A, relations, b, free

    def residuals(self, point) -> np.ndarray:
        """Per-row constraint violation at ``point`` (zero when satisfied)"""
        _, A, relations, b, _ = self.dense()
        lhs = A @ np.asarray(point, dtype=float)
        violation = np.zeros(len(relations))
        for row, relation in enumerate(relations):
            if relation is Relation.LE:
                violation[row] = max(lhs[row] - b[row], 0.0)
            elif relation is Relation.GE:
                violation[row] = max(b[row] - lhs[row], 0.0)
            else:
                violation[row] = abs(lhs[row] - b[row])
        return violation


def _as_pairs_dict(coefficients: Coefficients) -> Dict[int, float]:
    if isinstance(coefficients, Mapping):
        items = coefficients.items()
    else:
        items = enumerate(coefficients)
    return {int(index): float(value) for index, value in items if value != 0}


@dataclass(frozen=True)
class LpSolution:
    status: Status
    point: Optional[np.ndarray] = None
    objective_value: Optional[float] = None
    iterations: int = 0

    @property
    def is_optimal(self) -> bool:
        return self.status is Status.OPTIMAL


class _Tableau:
    """Simplex tableau; the last row holds reduced costs, the last column the rhs"""

    def __init__(self, T: np.ndarray, basis: List[int], tolerances, cap: int):
        self.T = T
        self.basis = basis
        self.tol = tolerances
        self.cap = cap
        self.iterations = 0

    def pivot(self, row: int, col: int):
        T = self.T
        T[row, :] /= T[row, col]
        factors = T[:, col].copy()
        factors[row] = 0.0
        T -= np.outer(factors, T[row, :])
        self.basis[row] = col

    def entering(self, columns: int) -> int:
        # Bland: lowest index with a negative reduced cost
        reduced = self.T[-1, :columns]
        candidates = np.flatnonzero(reduced < -self.tol.pivot)
        return int(candidates[0]) if candidates.size else -1

    def leaving(self, col: int) -> int:
        column = self.T[:-1, col]
        rows = np.flatnonzero(column > self.tol.pivot)
        if not rows.size:
            return -1

        ratios = self.T[rows, -1] / column[rows]
        best = ratios.min()
        slack = self.tol.pivot * max(1.0, abs(best))
        ties = rows[ratios <= best + slack]
        # Bland: among tied rows leave the lowest-indexed basic variable
        return int(min(ties, key=lambda r: self.basis[r]))

    def run(self, columns: int) -> Status:
        while True:
            col = self.entering(columns)
            if col == -1:
                return Status.OPTIMAL

            row = self.leaving(col)
            if row == -1:
                return Status.UNBOUNDED

            self.iterations += 1
            if self.iterations > self.cap:
                raise NumericalBreakdownError(
                    f'simplex exceeded {self.cap} pivots on a '
                    f'{self.T.shape[0] - 1}x{self.T.shape[1] - 1} tableau'
                )
            self.pivot(row, col)


def solve(lp: LinearProgram, tolerances: Tolerances = DEFAULT_TOLERANCES) -> LpSolution:
    c, A, relations, b, free = lp.dense()
    m, n = A.shape
    free_idx = np.flatnonzero(free)

    # x = x_plus - x_minus for every free variable
    A_std = np.hstack([A, -A[:, free_idx]])
    c_std = np.concatenate([c, -c[free_idx]])
    if lp.sense is Sense.MAXIMIZE:
        c_std = -c_std
    structural = A_std.shape[1]

    relations = list(relations)
    b = b.copy()
    for row in range(m):
        if b[row] < 0:
            A_std[row, :] *= -1
            b[row] *= -1
            if relations[row] is Relation.LE:
                relations[row] = Relation.GE
            elif relations[row] is Relation.GE:
                relations[row] = Relation.LE

    slack_rows = [row for row in range(m) if relations[row] is not Relation.EQ]
    artificial_rows = [row for row in range(m) if relations[row] is not Relation.LE]
    num_slack = len(slack_rows)
    num_art = len(artificial_rows)
    total = structural + num_slack + num_art

    T = np.zeros((m + 1, total + 1))
    T[:m, :structural] = A_std
    T[:m, -1] = b
    basis = [-1] * m

    for k, row in enumerate(slack_rows):
        col = structural + k
        T[row, col] = 1.0 if relations[row] is Relation.LE else -1.0
        if relations[row] is Relation.LE:
            basis[row] = col
    for k, row in enumerate(artificial_rows):
        col = structural + num_slack + k
        T[row, col] = 1.0
        basis[row] = col

    cap = tolerances.iteration_factor * (m + total)
    tableau = _Tableau(T, basis, tolerances, cap)
    first_artificial = structural + num_slack

    if num_art:
        # phase one: minimise the sum of artificial variables
        T[-1, first_artificial:total] = 1.0
        for row in artificial_rows:
            T[-1, :] -= T[row, :]
        tableau.run(total)

        infeasibility = -T[-1, -1]
        scale = max(1.0, float(np.max(b, initial=0.0)))
        if infeasibility > tolerances.feasibility * scale:
            logger.debug('phase one ended with infeasibility %.3e', infeasibility)
            return LpSolution(Status.INFEASIBLE, iterations=tableau.iterations)

        _drive_out_artificials(tableau, first_artificial)
        T = tableau.T

    keep = list(range(first_artificial)) + [total]
    tableau.T = T = T[:, keep]
    columns = first_artificial

    cost = np.zeros(columns + 1)
    cost[:structural] = c_std
    T[-1, :] = cost
    for row, col in enumerate(tableau.basis):
        if cost[col] != 0.0:
            T[-1, :] -= cost[col] * T[row, :]

    status = tableau.run(columns)
    if status is Status.UNBOUNDED:
        return LpSolution(Status.UNBOUNDED, iterations=tableau.iterations)

    x_std = np.zeros(columns)
    for row, col in enumerate(tableau.basis):
        x_std[col] = T[row, -1]

    point = x_std[:n].copy()
    point[free_idx] -= x_std[n:structural]
    value = float(c @ point)

    logger.debug(
        'simplex optimal after %d pivots (%d rows, %d columns), objective %.12g',
        tableau.iterations,
        m,
        total,
        value,
    )
    return LpSolution(Status.OPTIMAL, point, value, tableau.iterations)


def _drive_out_artificials(tableau: _Tableau, first_artificial: int):
    """Pivots degenerate artificials out of the basis and drops redundant rows"""
    redundant = []
    for row, col in enumerate(tableau.basis):
        if col < first_artificial:
            continue

        candidates = np.flatnonzero(
            np.abs(tableau.T[row, :first_artificial]) > tableau.tol.pivot
        )
        if candidates.size:
            tableau.pivot(row, int(candidates[0]))
        else:
            redundant.append(row)

    if redundant:
        logger.debug('dropping %d redundant rows after phase one', len(redundant))
        keep = [row for row in range(len(tableau.basis)) if row not in redundant]
        tableau.T = tableau.T[keep + [tableau.T.shape[0] - 1], :]
        tableau.basis = [tableau.basis[row] for row in keep]


def feasible(lp: LinearProgram, tolerances: Tolerances = DEFAULT_TOLERANCES) -> bool:
    return solve(lp.with_objective({}), tolerances).status is Status.OPTIMAL
