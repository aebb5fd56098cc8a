"""
Sparse exponential sums and polynomials, their signed support and the
vertex structure of their Newton polytope.

A polynomial is read on the positive orthant through y_i = exp(x_i), so both
kinds evaluate as sum c_a * exp(<x, a>).
"""

import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from numbers import Real
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from dual_sonc.barycentric import Exponent, lambda_feasible
from dual_sonc.errors import InstanceError
from dual_sonc.reports import to_json

logger = logging.getLogger(__name__)


class Kind(str, Enum):
    POLYNOMIAL = 'polynomial'
    EXPONENTIAL = 'exponential'


@dataclass(frozen=True)
class ExponentialSum:
    n: int
    terms: Mapping[Exponent, float]
    kind: Kind = Kind.EXPONENTIAL
    name: str = field(default='', compare=False)

    def __post_init__(self):
        for alpha, coefficient in self.terms.items():
            if len(alpha) != self.n:
                raise InstanceError(
                    f'exponent {list(alpha)} does not have length {self.n}'
                )
            if coefficient == 0:
                raise InstanceError(f'exponent {list(alpha)} has a zero coefficient')

    @classmethod
    def from_terms(cls, n: int, terms, kind: Kind = Kind.EXPONENTIAL, name: str = ''):
        """Builds a sum from ``(exponent, coefficient)`` pairs, dropping zeros"""
        kind = Kind(kind)
        pairs = list(terms.items()) if isinstance(terms, Mapping) else list(terms)
        exponents = _normalise_exponents([alpha for alpha, _ in pairs], n, kind)

        collected: Dict[Exponent, float] = {}
        for alpha, (_, coefficient) in zip(exponents, pairs):
            if alpha in collected:
                raise InstanceError(f'duplicate exponent {list(alpha)}')
            collected[alpha] = float(coefficient)

        return cls(n, {a: c for a, c in collected.items() if c != 0}, kind, name)

    @property
    def d(self) -> int:
        return len(self.terms)

    @property
    def origin(self) -> Exponent:
        return (0,) * self.n

    @property
    def exponents(self) -> List[Exponent]:
        return list(self.terms)

    @property
    def constant(self) -> float:
        return self.terms.get(self.origin, 0.0)

    def coefficient(self, alpha: Exponent) -> float:
        return self.terms.get(tuple(alpha), 0.0)

    def exponent_matrix(self) -> np.ndarray:
        return np.array(self.exponents, dtype=float).reshape(self.d, self.n)

    def coefficient_vector(self) -> np.ndarray:
        return np.array(list(self.terms.values()), dtype=float)

    def with_terms(self, terms: Mapping[Exponent, float]):
        return ExponentialSum(
            self.n, {a: c for a, c in terms.items() if c != 0}, self.kind, self.name
        )

    def shifted(self, t: float):
        """Returns f + t"""
        terms = dict(self.terms)
        terms[self.origin] = terms.get(self.origin, 0.0) + t
        return self.with_terms(terms)

    def without_constant(self):
        terms = {a: c for a, c in self.terms.items() if a != self.origin}
        return self.with_terms(terms)

    def __str__(self):
        parts = [f'{c:+.6g}*e^<x,{list(a)}>' for a, c in self.terms.items()]
        return ' '.join(parts) or '0'


@dataclass(frozen=True)
class SignDecomposition:
    a_plus: Tuple[Exponent, ...]
    a_minus: Tuple[Exponent, ...]
    vertex_flags: Mapping[Exponent, bool]

    @property
    def support(self) -> Tuple[Exponent, ...]:
        return self.a_plus + self.a_minus

    @property
    def vertices(self) -> List[Exponent]:
        return [alpha for alpha, flag in self.vertex_flags.items() if flag]


def _normalise_exponents(exponents: Sequence, n: int, kind: Kind) -> List[Exponent]:
    """Keeps exponents as ints when every coordinate is integral, floats otherwise"""
    checked = []
    for alpha in exponents:
        if isinstance(alpha, (str, bytes)) or not isinstance(alpha, Sequence):
            raise InstanceError(f'exponent {alpha!r} is not an array')
        if len(alpha) != n:
            raise InstanceError(f'exponent {list(alpha)} does not have length {n}')
        for value in alpha:
            if isinstance(value, bool) or not isinstance(value, Real):
                raise InstanceError(
                    f'exponent {list(alpha)} has non-numeric entry {value!r}'
                )
            if not math.isfinite(value):
                raise InstanceError(f'exponent {list(alpha)} has non-finite entry')
        checked.append(alpha)

    integral = all(float(v).is_integer() for alpha in checked for v in alpha)
    if kind is Kind.POLYNOMIAL:
        if not integral:
            raise InstanceError('polynomial instances need integer exponents')
        if any(v < 0 for alpha in checked for v in alpha):
            raise InstanceError('polynomial instances need nonnegative exponents')

    if integral:
        return [tuple(int(v) for v in alpha) for alpha in checked]
    return [tuple(float(v) for v in alpha) for alpha in checked]


def parse_instance(text: str, name: str = '') -> ExponentialSum:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exception:
        raise InstanceError(f'malformed instance JSON: {exception}') from exception

    if not isinstance(data, dict):
        raise InstanceError('instance must be a JSON object')
    missing = {'n', 'kind', 'terms'} - set(data)
    if missing:
        fields = ', '.join(sorted(missing))
        raise InstanceError(f'instance is missing field(s): {fields}')

    n = data['n']
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InstanceError(f'"n" must be a positive integer, got {n!r}')

    try:
        kind = Kind(data['kind'])
    except ValueError:
        raise InstanceError(f'unknown kind {data["kind"]!r}') from None

    if not isinstance(data['terms'], list):
        raise InstanceError('"terms" must be an array')

    pairs = []
    for term in data['terms']:
        if not isinstance(term, dict) or 'exp' not in term or 'coef' not in term:
            raise InstanceError(f'term {term!r} needs "exp" and "coef"')
        coefficient = term['coef']
        if isinstance(coefficient, bool) or not isinstance(coefficient, Real):
            raise InstanceError(f'coefficient {coefficient!r} is not a number')
        if not math.isfinite(coefficient):
            raise InstanceError(f'coefficient {coefficient!r} is not finite')
        pairs.append((term['exp'], coefficient))

    f = ExponentialSum.from_terms(n, pairs, kind, name)
    dropped = len(pairs) - f.d
    if dropped:
        logger.debug(
            'dropped %d zero-coefficient term(s) from %s', dropped, name or 'instance'
        )
    return f


def dump_instance(f: ExponentialSum) -> str:
    return to_json(
        {
            'n': f.n,
            'kind': f.kind.value,
            'terms': [{'exp': list(a), 'coef': c} for a, c in f.terms.items()],
        }
    )


def is_vertex(A: Sequence[Exponent], alpha: Exponent) -> bool:
    """True iff ``alpha`` is not a convex combination of the other points of ``A``"""
    alpha = tuple(alpha)
    others = [tuple(a) for a in A if tuple(a) != alpha]
    if not others:
        return True
    return lambda_feasible(others, alpha) is None


def sign_split(f: ExponentialSum) -> SignDecomposition:
    if not f.terms:
        raise InstanceError('cannot split the support of an empty sum')

    a_plus = tuple(a for a, c in f.terms.items() if c > 0)
    a_minus = tuple(a for a, c in f.terms.items() if c < 0)
    if not a_plus:
        raise InstanceError('instance has no positive term')

    support = f.exponents
    flags = {alpha: is_vertex(support, alpha) for alpha in support}
    return SignDecomposition(a_plus, a_minus, flags)


def validate_vertex_condition(
    f: ExponentialSum, adjoin_origin: bool = False
) -> List[Exponent]:
    """Lists the vertices of the Newton polytope that carry a negative coefficient

    With ``adjoin_origin`` the hull is taken over the support plus the origin and
    the origin itself is exempt, since a constant shift can always fix its sign.
    An empty list means the condition holds.
    """
    points = f.exponents
    if adjoin_origin and f.origin not in f.terms:
        points = points + [f.origin]

    violations = []
    for alpha, coefficient in f.terms.items():
        if coefficient >= 0 or (adjoin_origin and alpha == f.origin):
            continue
        if is_vertex(points, alpha):
            violations.append(alpha)
    return violations


def evaluate(f: ExponentialSum, x: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (f.n,):
        raise ValueError(f'point has shape {x.shape}, expected ({f.n},)')
    return math.fsum(c * math.exp(float(np.dot(x, a))) for a, c in f.terms.items())


def evaluate_many(f: ExponentialSum, points: np.ndarray) -> np.ndarray:
    """Vectorised evaluation at the rows of ``points``"""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if not f.terms:
        return np.zeros(points.shape[0])
    return np.exp(points @ f.exponent_matrix().T) @ f.coefficient_vector()
