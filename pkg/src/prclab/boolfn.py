"""Exact analysis of functions on small hypercubes.

Dense tables indexed by point, Walsh-Hadamard transform, the noise
averaging operator, and two inequality checkers: the hypercontractive
norm bound |T_rho f|_2 <= |f|_{1+rho^2}, and the collision bound for
pairs of randomized labelings evaluated on noise-correlated inputs.

Everything here is exact up to float round-off; inequality checks get a
1e-9 additive slack for that reason. Tables are capped at n <= 20.
"""

from typing import NamedTuple

import numpy as np

from . import _kernels
from .channel import flip_probability

__all__ = [
    "MAX_DIMENSION",
    "FunctionTable",
    "RandomizedFunctionTable",
    "AlphaBound",
    "CollisionCheck",
    "p_norm",
    "inner_product",
    "walsh_hadamard",
    "inverse_walsh_hadamard",
    "noise_operator",
    "noise_operator_direct",
    "channel_matrix",
    "check_hypercontractivity",
    "alpha_of",
    "collision_probability",
    "collision_probability_direct",
    "check_collision_bound",
    "collision_exponent",
]

MAX_DIMENSION = 20
INEQ_SLACK = 1e-9

# point index i encodes the input x as an n-bit mask; mask bit k is
# coordinate n-1-k, so index order matches BitString.value


class FunctionTable:
    """Real-valued function on {0,1}^n as a dense array of 2^n values."""

    __slots__ = ("n", "values")

    def __init__(self, n, values):
        if not 0 <= n <= MAX_DIMENSION:
            raise ValueError(f"dimension must be in 0..{MAX_DIMENSION}")
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (1 << n,):
            raise ValueError(f"expected {1 << n} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        self.n = n
        self.values = values.copy()
        self.values.setflags(write=False)

    @classmethod
    def constant(cls, n, c):
        return cls(n, np.full(1 << n, float(c)))

    @classmethod
    def dictator(cls, n, coord):
        """The (+1,-1)-valued function of a single coordinate."""
        if not 0 <= coord < n:
            raise ValueError("coordinate out of range")
        idx = np.arange(1 << n)
        bit = (idx >> (n - 1 - coord)) & 1
        return cls(n, 1.0 - 2.0 * bit)

    def __repr__(self):
        return f"FunctionTable(n={self.n})"


def p_norm(f, p):
    """(E|f|^p)^(1/p) under the uniform measure."""
    if p < 1:
        raise ValueError(f"norm order must be >= 1, got {p}")
    return float(np.mean(np.abs(f.values) ** p) ** (1.0 / p))


def inner_product(f, g):
    """E[f g] under the uniform measure."""
    if f.n != g.n:
        raise ValueError("dimension mismatch")
    return float(np.mean(f.values * g.values))


def _fwht(values):
    out = values.astype(np.float64).copy()
    _kernels.fwht_inplace(out)
    return out


def walsh_hadamard(f):
    """Fourier coefficients E[f chi_S], indexed by subset mask."""
    return FunctionTable(f.n, _fwht(f.values) / (1 << f.n))


def inverse_walsh_hadamard(coeffs):
    """Rebuild the function whose coefficient table is given."""
    return FunctionTable(coeffs.n, _fwht(coeffs.values))


def _popcount_table(n):
    idx = np.arange(1 << n)
    weights = np.zeros(1 << n, dtype=np.int64)
    for k in range(n):
        weights += (idx >> k) & 1
    return weights


def noise_operator(f, rho):
    """T_rho f, computed by damping coefficient S by rho^|S|."""
    flip_probability(rho)  # range check
    coeffs = _fwht(f.values) / (1 << f.n)
    damped = coeffs * (float(rho) ** _popcount_table(f.n))
    return FunctionTable(f.n, _fwht(damped))


def channel_matrix(n, rho):
    """Transition matrix M[x, y] = Pr[channel(x) = y], dense 2^n square."""
    if n > 10:
        raise ValueError("dense channel matrix capped at n <= 10")
    p = flip_probability(rho)
    idx = np.arange(1 << n)
    dist = _popcount_table(n)[np.bitwise_xor.outer(idx, idx)]
    return (1 - p) ** (n - dist) * p**dist


def noise_operator_direct(f, rho):
    """T_rho f from the definition, as the channel-matrix average.

    Independent route kept alongside the damping form on purpose; the
    two must agree to 1e-10 and the tests hold them to it.
    """
    return FunctionTable(f.n, channel_matrix(f.n, rho) @ f.values)


def check_hypercontractivity(f, rho):
    """Margin |f|_{1+rho^2} - |T_rho f|_2; nonnegative up to round-off."""
    lhs = p_norm(noise_operator(f, rho), 2)
    rhs = p_norm(f, 1 + rho * rho)
    return rhs - lhs


class RandomizedFunctionTable:
    """Randomized labeling of {0,1}^n over an opaque integer label set.

    mass[x, k] is the probability that input x gets label labels[k];
    each row sums to 1 (checked to 1e-12).
    """

    __slots__ = ("n", "labels", "mass")

    def __init__(self, n, labels, mass):
        if not 0 <= n <= MAX_DIMENSION:
            raise ValueError(f"dimension must be in 0..{MAX_DIMENSION}")
        labels = tuple(int(y) for y in labels)
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate labels")
        mass = np.asarray(mass, dtype=np.float64)
        if mass.shape != (1 << n, len(labels)):
            raise ValueError("mass must be (2^n, #labels)")
        if mass.size and float(mass.min()) < 0:
            raise ValueError("negative probability mass")
        if not np.allclose(mass.sum(axis=1), 1.0, rtol=0, atol=1e-12):
            raise ValueError("rows must sum to 1 within 1e-12")
        self.n = n
        self.labels = labels
        self.mass = mass.copy()
        self.mass.setflags(write=False)

    @classmethod
    def deterministic(cls, n, labeling):
        """One-hot table for a plain function given as a label per point."""
        labeling = [int(y) for y in labeling]
        if len(labeling) != 1 << n:
            raise ValueError(f"expected {1 << n} labels")
        labels = sorted(set(labeling))
        col = {y: k for k, y in enumerate(labels)}
        mass = np.zeros((1 << n, len(labels)))
        for x, y in enumerate(labeling):
            mass[x, col[y]] = 1.0
        return cls(n, labels, mass)

    def column(self, label):
        """The occupancy function p_y as a FunctionTable (zero if absent)."""
        try:
            k = self.labels.index(label)
        except ValueError:
            return FunctionTable.constant(self.n, 0.0)
        return FunctionTable(self.n, self.mass[:, k])

    def __repr__(self):
        return f"RandomizedFunctionTable(n={self.n}, labels={len(self.labels)})"


class AlphaBound(float):
    """Least upper bound on Pr_x[f(x) = y] over labels y in g's support.

    Plain float subtype; value lies in [0, 1] (0 happens when the two
    label sets are disjoint, and the collision bound degenerates
    correctly there).
    """

    def __new__(cls, value):
        if not 0 <= value <= 1:
            raise ValueError(f"alpha must be in [0, 1], got {value}")
        return super().__new__(cls, value)


def alpha_of(f, g):
    """Least alpha with Pr_x[f(x) = y] <= alpha for all y g can output."""
    if f.n != g.n:
        raise ValueError("dimension mismatch")
    support = [y for k, y in enumerate(g.labels) if float(g.mass[:, k].sum()) > 0]
    best = 0.0
    for y in support:
        best = max(best, float(np.mean(f.column(y).values)))
    return AlphaBound(best)


def collision_probability(f, g, rho):
    """Pr[f(x_noisy) = g(x)] for uniform x and x_noisy from the channel.

    Computed as sum over shared labels y of <q_y, T_rho p_y>.
    """
    if f.n != g.n:
        raise ValueError("dimension mismatch")
    total = 0.0
    for k, y in enumerate(g.labels):
        q_y = FunctionTable(g.n, g.mass[:, k])
        if float(q_y.values.sum()) == 0:
            continue
        total += inner_product(q_y, noise_operator(f.column(y), rho))
    return total


def collision_probability_direct(f, g, rho):
    """Same quantity by the raw double sum over (x, x_noisy) pairs.

    Exhaustive oracle for the inner-product route; n <= 10.
    """
    if f.n != g.n:
        raise ValueError("dimension mismatch")
    m = channel_matrix(f.n, rho)
    shared = [y for y in g.labels if y in f.labels]
    total = 0.0
    for y in shared:
        q = g.column(y).values
        p = f.column(y).values
        total += float(q @ m @ p) / (1 << f.n)
    return total


def collision_exponent(rho):
    """The exponent (1/2)(1-rho^2)/(1+rho^2) of the collision bound."""
    flip_probability(rho)  # range check
    r2 = float(rho) * float(rho)
    return 0.5 * (1 - r2) / (1 + r2)


class CollisionCheck(NamedTuple):
    lhs: float
    rhs: float
    ok: bool


def check_collision_bound(f, g, rho):
    """Verify Pr[f(x_noisy) = g(x)] <= alpha^((1/2)(1-rho^2)/(1+rho^2))."""
    lhs = collision_probability(f, g, rho)
    alpha = alpha_of(f, g)
    rhs = float(alpha) ** collision_exponent(rho)
    return CollisionCheck(lhs, rhs, lhs <= rhs + INEQ_SLACK)
