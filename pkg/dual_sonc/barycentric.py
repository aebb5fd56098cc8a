"""
Barycentric coordinates of an exponent with respect to a set of exponents.

The polytope of coordinates is

    {lambda >= 0 : sum lambda_a * a = beta, sum lambda_a = 1}

and is nonempty exactly when ``beta`` lies in the convex hull of the set.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from dual_sonc.simplex import Bound, LinearProgram, Relation, Sense, Status, solve

logger = logging.getLogger(__name__)

Number = Union[int, float]
Exponent = Tuple[Number, ...]

# absolute residual allowed on the defining equations
RESIDUAL_TOLERANCE = 1e-9
NEGATIVE_WEIGHT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class BarycentricVector:
    weights: Mapping[Exponent, float]

    def __getitem__(self, exponent: Exponent) -> float:
        return self.weights.get(exponent, 0.0)

    def support(self):
        """Exponents carrying a positive weight"""
        return [alpha for alpha, weight in self.weights.items() if weight > 0]

    def combination(self) -> np.ndarray:
        """The point sum lambda_a * a"""
        dim = len(next(iter(self.weights)))
        point = np.zeros(dim)
        for alpha, weight in self.weights.items():
            point += weight * np.asarray(alpha, dtype=float)
        return point

    def residual(self, beta: Exponent) -> float:
        """Largest violation of the two defining equations"""
        total = math.fsum(self.weights.values())
        coords = np.abs(self.combination() - np.asarray(beta, dtype=float))
        return max(abs(total - 1.0), float(coords.max(initial=0.0)))

    def to_dict(self):
        return {str(list(alpha)): weight for alpha, weight in self.weights.items()}


@dataclass(frozen=True)
class LambdaOptimum:
    lambdas: BarycentricVector
    value: float


class LambdaPolytope:
    def __init__(self, a_plus: Sequence[Exponent], beta: Exponent):
        if not a_plus:
            raise ValueError('barycentric coordinates need at least one exponent')

        self.a_plus = [tuple(alpha) for alpha in a_plus]
        self.beta = tuple(beta)
        if any(len(alpha) != len(self.beta) for alpha in self.a_plus):
            raise ValueError('exponents and beta must share one dimension')

    def build_program(self, cost: Mapping[Exponent, float] = None):
        """Assembles the coordinate LP; exponents with cost +inf get no variable

        Returns the program together with the exponents its variables stand for.
        """
        cost = cost or {}
        usable = [alpha for alpha in self.a_plus if cost.get(alpha, 0.0) != math.inf]

        lp = LinearProgram(sense=Sense.MINIMIZE)
        for alpha in usable:
            lp.add_variable(f'lambda{list(alpha)}', Bound.NONNEGATIVE)

        objective = {}
        for index, alpha in enumerate(usable):
            value = cost.get(alpha, 0.0)
            if value == -math.inf or math.isnan(value):
                raise ValueError(
                    f'cost for {alpha} must be finite or +inf, got {value}'
                )
            objective[index] = value
        lp.set_objective(objective)

        for coord, target in enumerate(self.beta):
            lp.add_constraint(
                {index: alpha[coord] for index, alpha in enumerate(usable)},
                Relation.EQ,
                target,
                name=f'coordinate {coord}',
            )
        lp.add_constraint(
            {index: 1.0 for index in range(len(usable))}, Relation.EQ, 1.0, 'sum'
        )
        return lp, usable

    def minimize(
        self, cost: Mapping[Exponent, float] = None
    ) -> Optional[LambdaOptimum]:
        lp, usable = self.build_program(cost)
        if not usable:
            return None

        solution = solve(lp)
        if solution.status is Status.INFEASIBLE:
            return None
        if solution.status is not Status.OPTIMAL:
            # bounded by construction: the feasible set is a polytope
            raise RuntimeError(f'coordinate program reported {solution.status.value}')

        weights: Dict[Exponent, float] = {alpha: 0.0 for alpha in self.a_plus}
        for index, alpha in enumerate(usable):
            weight = float(solution.point[index])
            weights[alpha] = 0.0 if weight < NEGATIVE_WEIGHT_TOLERANCE else weight

        lambdas = BarycentricVector(weights)
        residual = lambdas.residual(self.beta)
        if residual > RESIDUAL_TOLERANCE:
            logger.warning(
                'barycentric residual %.3e for beta=%s exceeds %.0e',
                residual,
                list(self.beta),
                RESIDUAL_TOLERANCE,
            )
        return LambdaOptimum(lambdas, solution.objective_value)

    def feasible_point(self) -> Optional[BarycentricVector]:
        optimum = self.minimize()
        return optimum.lambdas if optimum else None


def lambda_feasible(
    a_plus: Sequence[Exponent], beta: Exponent
) -> Optional[BarycentricVector]:
    """Returns any barycentric vector of ``beta``, or None outside the hull"""
    return LambdaPolytope(a_plus, beta).feasible_point()


def minimize_linear_over_lambda(
    a_plus: Sequence[Exponent], beta: Exponent, cost: Mapping[Exponent, float]
) -> Optional[LambdaOptimum]:
    """Minimises sum lambda_a * cost_a over the coordinate polytope

    A cost of ``math.inf`` forces the weight of that exponent to zero. Returns
    None when no admissible coordinates exist.
    """
    return LambdaPolytope(a_plus, beta).minimize(cost)
