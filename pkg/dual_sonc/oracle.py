"""
Brute-force approximate minimiser used to validate certified bounds.

The search runs in exponential coordinates x in [-R, R]^n, so polynomials are
probed on the positive orthant only. Every value it reports was attained at
an evaluated point and is therefore an upper bound on the infimum.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.optimize import minimize

from dual_sonc.errors import OracleBudgetError
from dual_sonc.reports import ReportMixin
from dual_sonc.support import ExponentialSum, evaluate, evaluate_many

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleConfig:
    grid_points_per_axis: int = 101
    box_radius: float = 5.0
    refine_steps: int = 200
    max_dimension: int = 4
    chunk_size: int = 200_000

    def __post_init__(self):
        if self.grid_points_per_axis < 3:
            raise ValueError('grid_points_per_axis must be at least 3')
        if not self.box_radius > 0:
            raise ValueError('box_radius must be positive')
        if self.refine_steps < 0:
            raise ValueError('refine_steps must be nonnegative')


@dataclass(frozen=True)
class OracleResult(ReportMixin):
    value: float
    argmin: Tuple[float, ...]
    grid_value: float
    evaluations: int


def _grid_chunks(axis: np.ndarray, n: int, chunk_size: int):
    """Yields the grid points in slabs of at most ``chunk_size`` rows"""
    shape = (len(axis),) * n
    total = len(axis) ** n
    for start in range(0, total, chunk_size):
        flat = np.arange(start, min(start + chunk_size, total))
        yield axis[np.stack(np.unravel_index(flat, shape), axis=1)]


def _polish(f: ExponentialSum, start: np.ndarray, cfg: OracleConfig):
    A = f.exponent_matrix()
    c = f.coefficient_vector()

    def value_and_gradient(x):
        terms = c * np.exp(A @ x)
        return float(terms.sum()), A.T @ terms

    bounds = [(-cfg.box_radius, cfg.box_radius)] * f.n
    result = minimize(
        value_and_gradient,
        start,
        jac=True,
        method='L-BFGS-B',
        bounds=bounds,
        options={'maxiter': cfg.refine_steps},
    )
    return np.clip(result.x, -cfg.box_radius, cfg.box_radius)


def sample_min(f: ExponentialSum, cfg: OracleConfig = None) -> OracleResult:
    cfg = cfg or OracleConfig()
    if f.n > cfg.max_dimension:
        raise OracleBudgetError(
            f'dimension {f.n} exceeds the oracle budget of {cfg.max_dimension}'
        )

    axis = np.linspace(-cfg.box_radius, cfg.box_radius, cfg.grid_points_per_axis)
    best_value = np.inf
    best_point = np.zeros(f.n)
    evaluations = 0

    for slab in _grid_chunks(axis, f.n, cfg.chunk_size):
        values = evaluate_many(f, slab)
        evaluations += len(values)
        index = int(np.argmin(values))
        if values[index] < best_value:
            best_value = float(values[index])
            best_point = slab[index].copy()

    grid_value = best_value
    if cfg.refine_steps and f.terms:
        candidate = _polish(f, best_point, cfg)
        candidate_value = evaluate(f, candidate)
        # the polish may only improve on the grid
        if candidate_value < best_value:
            best_value, best_point = candidate_value, candidate

    logger.debug(
        'oracle: grid min %.12g, refined %.12g after %d evaluations',
        grid_value,
        best_value,
        evaluations,
    )
    argmin = tuple(float(v) for v in best_point)
    return OracleResult(best_value, argmin, grid_value, evaluations)
