"""Entropy, divergences, and two exact quantitative checks.

The first check sandwiches the entropy gap log|S| - H(X) between 2 eps^2
and 2 eps log|S| + 2 sqrt(eps), valid when eps, the statistical distance
from uniform, is at most 1/4. The second bounds how far a key plus one
sample (sk, x) can be from uniform when m i.i.d. samples under a random
key are jointly eps-close to uniform: sqrt(2 eps n + 2 sqrt(eps)/m + l/m).
Both are verified by exhaustive enumeration on small instances.
"""

import math
from typing import NamedTuple

import numpy as np

__all__ = [
    "FiniteDistribution",
    "KeyedFamily",
    "HypothesisViolation",
    "EnumerationLimit",
    "PinskerCheck",
    "LeakageCheck",
    "entropy",
    "statistical_distance",
    "kl_divergence",
    "check_pinsker_sandwich",
    "key_leakage_bound",
    "joint_sample_distance",
    "check_key_leakage",
]

INEQ_SLACK = 1e-9


class HypothesisViolation(ValueError):
    """A check was asked about an instance outside its hypothesis."""


class EnumerationLimit(ValueError):
    """Exact enumeration would exceed the configured size limits."""


class FiniteDistribution:
    """Probability vector over an abstract finite set."""

    __slots__ = ("probs",)

    def __init__(self, probs):
        probs = np.asarray(probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("need a nonempty 1-d probability vector")
        if float(probs.min()) < 0:
            raise ValueError("negative probability")
        if abs(float(probs.sum()) - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1 within 1e-12")
        self.probs = probs.copy()
        self.probs.setflags(write=False)

    @classmethod
    def uniform(cls, size):
        return cls(np.full(size, 1.0 / size))

    @classmethod
    def point_mass(cls, size, at=0):
        probs = np.zeros(size)
        probs[at] = 1.0
        return cls(probs)

    @property
    def size(self):
        return self.probs.size

    def __repr__(self):
        return f"FiniteDistribution(size={self.size})"


def entropy(d):
    """Shannon entropy in bits, with 0 log 0 = 0."""
    p = d.probs[d.probs > 0]
    return float(-(p * np.log2(p)).sum())


def statistical_distance(d1, d2):
    """Total variation distance (1/2) sum |p - q|."""
    if d1.size != d2.size:
        raise ValueError("support size mismatch")
    return 0.5 * float(np.abs(d1.probs - d2.probs).sum())


def kl_divergence(d1, d2):
    """KL divergence in bits; inf when d1 puts mass where d2 has none."""
    if d1.size != d2.size:
        raise ValueError("support size mismatch")
    live = d1.probs > 0
    if np.any(d2.probs[live] == 0):
        return math.inf
    p = d1.probs[live]
    q = d2.probs[live]
    return float((p * np.log2(p / q)).sum())


class PinskerCheck(NamedTuple):
    eps: float
    lower: float
    gap: float
    upper: float
    ok: bool


def check_pinsker_sandwich(d):
    """Sandwich the entropy gap of d between its distance-to-uniform terms.

    Requires eps = SD(d, uniform) <= 1/4; outside that no claim is made
    and HypothesisViolation is raised.
    """
    eps = statistical_distance(d, FiniteDistribution.uniform(d.size))
    if eps > 0.25 + 1e-12:
        raise HypothesisViolation(f"distance to uniform {eps:.4f} exceeds 1/4")
    gap = math.log2(d.size) - entropy(d)
    lower = 2 * eps * eps
    upper = 2 * eps * math.log2(d.size) + 2 * math.sqrt(eps)
    ok = lower <= gap + INEQ_SLACK and gap <= upper + INEQ_SLACK
    return PinskerCheck(eps, lower, gap, upper, ok)


def key_leakage_bound(eps, n, m, ell):
    """Closed-form bound sqrt(2 eps n + 2 sqrt(eps)/m + ell/m)."""
    if not 0 <= eps <= 1:
        raise ValueError("eps must be in [0, 1]")
    if m < 1:
        raise ValueError("m must be at least 1")
    if n < 0 or ell < 0:
        raise ValueError("n and ell must be nonnegative")
    return math.sqrt(2 * eps * n + 2 * math.sqrt(eps) / m + ell / m)


class KeyedFamily:
    """One distribution over {0,1}^n per key in {0,1}^ell, as a dense table."""

    __slots__ = ("ell", "n", "table")

    def __init__(self, ell, n, table):
        table = np.asarray(table, dtype=np.float64)
        if table.shape != (1 << ell, 1 << n):
            raise ValueError(f"table must be (2^{ell}, 2^{n})")
        if float(table.min()) < 0:
            raise ValueError("negative probability")
        if not np.allclose(table.sum(axis=1), 1.0, rtol=0, atol=1e-12):
            raise ValueError("each key's row must sum to 1 within 1e-12")
        self.ell = ell
        self.n = n
        self.table = table.copy()
        self.table.setflags(write=False)

    def __repr__(self):
        return f"KeyedFamily(ell={self.ell}, n={self.n})"


def _check_enumerable(family, m):
    nm = family.n * m
    if family.n + family.ell > 20 or nm > 24:
        raise EnumerationLimit("instance too large: need n+ell <= 20 and m*n <= 24")
    # work is 2^ell kron powers of length 2^(m*n); cap the product too
    if family.ell + nm > 26:
        raise EnumerationLimit("joint enumeration over keys would exceed 2^26 cells")


def joint_sample_distance(family, m):
    """Exact SD of m i.i.d. samples (under one random key) from uniform."""
    _check_enumerable(family, m)
    size = 1 << (family.n * m)
    joint = np.zeros(size)
    for row in family.table:
        acc = row
        for _ in range(m - 1):
            acc = (acc[:, None] * row[None, :]).ravel()
        joint += acc
    joint /= family.table.shape[0]
    return 0.5 * float(np.abs(joint - 1.0 / size).sum())


class LeakageCheck(NamedTuple):
    measured_sd: float
    bound: float
    ok: bool


def check_key_leakage(family, m):
    """Exact key-plus-sample distance against the closed-form bound.

    eps comes from joint_sample_distance; the measured quantity is the
    exact SD of the pair (sk, x) from uniform over {0,1}^(ell+n).
    """
    eps = joint_sample_distance(family, m)
    pair = (family.table / family.table.shape[0]).ravel()
    uniform = 1.0 / pair.size
    measured = 0.5 * float(np.abs(pair - uniform).sum())
    bound = key_leakage_bound(eps, family.n, m, family.ell)
    return LeakageCheck(measured, bound, measured <= bound + INEQ_SLACK)
