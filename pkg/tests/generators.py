import numpy as np

from dual_sonc.support import ExponentialSum, Kind


def random_interior_sum(rng, n=None, positives=None, negatives=None):
    """A sum whose negative exponents are strict convex combinations of positive ones"""
    n = n or int(rng.integers(1, 5))
    positives = positives or int(rng.integers(n + 1, n + 4))
    negatives = negatives or int(rng.integers(1, 3))

    a_plus = rng.integers(0, 5, size=(positives, n)).astype(float)
    # distinct points; jitter keeps them apart without changing the hull much
    a_plus += rng.uniform(-0.25, 0.25, size=a_plus.shape)
    weights = rng.dirichlet(np.ones(positives), size=negatives)
    a_minus = weights @ a_plus

    terms = [(tuple(a), float(10 ** rng.uniform(-2, 2))) for a in a_plus]
    terms += [(tuple(b), -float(10 ** rng.uniform(-2, 2))) for b in a_minus]
    return ExponentialSum.from_terms(n, terms, Kind.EXPONENTIAL)


def random_simplex_polynomial(rng, degree=6):
    """A polynomial positive on the corners of a scaled simplex, negative inside it"""
    n = int(rng.integers(1, 3))
    terms = {(0,) * n: float(rng.uniform(-3, 3)) or 1.0}
    for i in range(n):
        corner = [0] * n
        corner[i] = degree
        terms[tuple(corner)] = float(10 ** rng.uniform(-1, 1))

    for _ in range(int(rng.integers(1, 4))):
        point = tuple(int(v) for v in rng.integers(1, degree // n, size=n))
        if sum(point) < degree and point not in terms:
            terms[point] = -float(10 ** rng.uniform(-1, 1))

    for _ in range(int(rng.integers(0, 3))):
        point = tuple(int(v) for v in rng.integers(0, degree // n + 1, size=n))
        if sum(point) <= degree and point not in terms:
            terms[point] = float(10 ** rng.uniform(-1, 1))

    return ExponentialSum.from_terms(n, terms, Kind.POLYNOMIAL)


def random_signed_sum(rng):
    """An exponential sum with a signed constant and negative terms inside the hull

    Every other draw surrounds the origin with the positive exponents, which
    opens the negative-origin program.
    """
    n = int(rng.integers(1, 3))
    if rng.random() < 0.5:
        r = rng.uniform(1, 3, size=5)
        if n == 1:
            a_plus = np.array([[r[0]], [-r[1]]])
        else:
            a_plus = np.array([[r[0], 0.0], [-r[1], r[2]], [-r[3], -r[4]]])
        magnitudes = 10 ** rng.uniform(-2, -0.5, size=int(rng.integers(1, 3)))
    else:
        a_plus = rng.uniform(0.5, 4, size=(n + 1, n))
        magnitudes = 10 ** rng.uniform(-2, 1, size=int(rng.integers(1, 3)))

    weights = rng.dirichlet(np.ones(len(a_plus)), size=len(magnitudes))
    terms = {(0.0,) * n: float(rng.uniform(-3, 3)) or 1.0}
    for alpha in a_plus:
        terms[tuple(float(v) for v in alpha)] = float(10 ** rng.uniform(0, 1))
    for beta, magnitude in zip(weights @ a_plus, magnitudes):
        terms.setdefault(tuple(float(v) for v in beta), -float(magnitude))
    return ExponentialSum.from_terms(n, terms, Kind.EXPONENTIAL)
