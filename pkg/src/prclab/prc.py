"""Keyed pseudorandom codes: the scheme interface and its estimators.

A zero-bit scheme encodes no message; the decoder only decides whether
a string is a (noisy) codeword under the key. Three Monte-Carlo
estimators measure the scheme's completeness, soundness, and an
empirical pseudorandomness proxy. The proxy runs a fixed distinguisher
battery and reports the largest acceptance-rate gap between fresh
encodings and uniform strings; true pseudorandomness quantifies over
all efficient adversaries, so this is a lower-bound witness only.
"""

import abc
from dataclasses import dataclass, field

import numpy as np

from . import _rng
from .bits import BitString
from .channel import apply_noise
from .oracles import ConsistentOracle, LazyOracle, QuerySet
from .reports import ExperimentReport, binomial_report

__all__ = [
    "PrcScheme",
    "SecretKey",
    "QueryBudgetExceeded",
    "estimate_completeness",
    "estimate_soundness",
    "estimate_pseudorandomness_proxy",
    "DEFAULT_BATTERY",
]


class QueryBudgetExceeded(RuntimeError):
    """A scheme procedure issued more oracle queries than it declared."""


@dataclass(frozen=True)
class SecretKey:
    """Key material plus any oracle responses fixed at keygen time.

    Schemes that query the oracle during key generation sample those
    responses themselves and carry them here; encode and decode then see
    them as constraints, and the compiler folds them into its learned
    set. Serialization round-trips exactly.
    """

    bits: BitString
    absorbed: QuerySet = field(default_factory=QuerySet)

    def to_json_dict(self):
        entries = [[q.hex(), q.n, b] for q, b in self.absorbed.items()]
        return {"bits": self.bits.hex(), "n": self.bits.n, "absorbed": entries}

    @classmethod
    def from_json_dict(cls, doc):
        absorbed = QuerySet()
        for hexpart, n, b in doc["absorbed"]:
            absorbed.add(BitString.from_hex(hexpart, n), b)
        return cls(BitString.from_hex(doc["bits"], doc["n"]), absorbed)


class PrcScheme(abc.ABC):
    """Zero-bit pseudorandom code with a declared per-call query budget.

    Subclasses fix security_param (lambda), codeword_len (n), key_len,
    and query_bound (Q), and implement the three procedures. Procedures
    must be deterministic given (arguments, seed, oracle responses).
    """

    security_param: int
    codeword_len: int
    key_len: int
    query_bound: int

    @property
    def name(self):
        return type(self).__name__

    @abc.abstractmethod
    def keygen(self, seed) -> SecretKey:
        """Sample a key; any oracle use is self-sampled into .absorbed."""

    @abc.abstractmethod
    def encode(self, sk, seed, oracle) -> BitString:
        """Fresh codeword of length codeword_len."""

    @abc.abstractmethod
    def decode(self, sk, x, seed, oracle) -> bool:
        """True to accept x as a codeword under sk; total on {0,1}^n."""

    def decode_many(self, sk, xs, seed, oracle):
        """Optional vectorized decode of a (t, n) bit matrix; None if unsupported."""
        return None

    def heavy_escape(self, sk, tau, constraints):
        """Whether some tau-heavy decoder query is missing from constraints.

        Schemes whose query distribution is known in closed form may
        answer exactly; None defers to enumeration or sampling. A
        scheme that never queries has nothing to escape.
        """
        if self.query_bound == 0:
            return False
        return None

    def base_oracle(self, sk, seed, record_log=True):
        """Per-trial oracle honoring any keygen-time absorbed responses."""
        if len(sk.absorbed):
            return ConsistentOracle(sk.absorbed, seed, record_log)
        return LazyOracle(seed, record_log)


def charged_call(oracle, bound, fn, *args):
    """Run one scheme procedure and enforce its query budget."""
    before = oracle.queries_made if oracle is not None else 0
    result = fn(*args)
    used = (oracle.queries_made if oracle is not None else 0) - before
    if used > bound:
        raise QueryBudgetExceeded(f"procedure used {used} queries, declared {bound}")
    return result


def _base_params(s, trials, extra=None):
    params = {
        "scheme": s.name,
        "lambda": s.security_param,
        "n": s.codeword_len,
        "Q": s.query_bound,
        "trials": trials,
    }
    if extra:
        params.update(extra)
    return params


def estimate_completeness(s, rho, trials, seed):
    """Accept rate of decode over noisy fresh encodings; estimates 1 - delta."""
    if trials < 100:
        raise ValueError("need at least 100 trials")
    accepts = 0
    for child in _rng.split(seed, trials):
        kg, oseed, enc, noise, dec = child.spawn(5)
        sk = s.keygen(kg)
        oracle = s.base_oracle(sk, oseed, record_log=False)
        c = charged_call(oracle, s.query_bound, s.encode, sk, enc, oracle)
        if len(c) != s.codeword_len:
            raise ValueError("encode returned wrong length")
        noisy = apply_noise(c, rho, noise)
        if charged_call(oracle, s.query_bound, s.decode, sk, noisy, dec, oracle):
            accepts += 1
    return binomial_report(
        accepts,
        trials,
        _base_params(s, trials, {"rho": rho}),
        {"accept": accepts, "reject": trials - accepts},
    )


def estimate_soundness(s, trials, seed):
    """Reject rate of decode on uniform inputs; estimates 1 - mu.

    The x is drawn independently of sk each trial, which realizes the
    fixed-string-versus-random-key experiment by independence.
    """
    if trials < 100:
        raise ValueError("need at least 100 trials")
    rejects = 0
    for child in _rng.split(seed, trials):
        kg, oseed, xseed, dec = child.spawn(4)
        sk = s.keygen(kg)
        oracle = s.base_oracle(sk, oseed, record_log=False)
        x = BitString.random(s.codeword_len, _rng.generator(xseed))
        if not charged_call(oracle, s.query_bound, s.decode, sk, x, dec, oracle):
            rejects += 1
    return binomial_report(
        rejects,
        trials,
        _base_params(s, trials),
        {"reject": rejects, "accept": trials - rejects},
    )


# Distinguishers decide accept/reject on an (m, n) uint8 sample matrix.
# Each is calibrated to fire on uniform input with small probability
# (z threshold 3 where applicable), so acceptance-rate gaps near 0 mean
# the encodings look uniform to that statistic.


def _bit_frequency_test(m):
    total = m.size
    ones = int(m.sum())
    z = (ones - total / 2) / np.sqrt(total / 4)
    return abs(z) > 3


def _runs_test(m):
    rows, n = m.shape
    if n < 2:
        return False
    runs = rows + int((m[:, 1:] != m[:, :-1]).sum())
    mean = rows * (n + 1) / 2
    var = rows * (n - 1) / 4
    return abs(runs - mean) > 3 * np.sqrt(var)


def _block_collision_test(m, block=8):
    rows, n = m.shape
    per_row = n // block
    if per_row == 0:
        return False
    trimmed = m[:, : per_row * block].reshape(rows * per_row, block)
    weights = (1 << np.arange(block - 1, -1, -1)).astype(np.int64)
    values = trimmed @ weights
    _, counts = np.unique(values, return_counts=True)
    collisions = int((counts * (counts - 1) // 2).sum())
    k = rows * per_row
    expected = k * (k - 1) / 2 / (1 << block)
    return abs(collisions - expected) > 3 * max(np.sqrt(expected), 1.0)


def _duplicate_rows_test(m):
    rows = {m[i].tobytes() for i in range(m.shape[0])}
    return len(rows) < m.shape[0]


DEFAULT_BATTERY = (
    ("bit_frequency", _bit_frequency_test),
    ("runs", _runs_test),
    ("block_collisions", _block_collision_test),
    ("duplicate_rows", _duplicate_rows_test),
)


def estimate_pseudorandomness_proxy(s, m, trials, battery=DEFAULT_BATTERY, seed=0):
    """Largest battery acceptance-rate gap, encodings versus uniform.

    Each trial draws one key, m fresh encodings under it, and m uniform
    strings; every distinguisher votes on both matrices. The reported
    estimate is the max over distinguishers of |rate_enc - rate_uniform|
    and lower-bounds the scheme's true distinguishing advantage.
    """
    if trials < 100:
        raise ValueError("need at least 100 trials")
    if not battery:
        raise ValueError("battery must be nonempty")
    names = [name for name, _ in battery]
    enc_hits = dict.fromkeys(names, 0)
    uni_hits = dict.fromkeys(names, 0)
    n = s.codeword_len
    for child in _rng.split(seed, trials):
        kg, oseed, enc, uni = child.spawn(4)
        sk = s.keygen(kg)
        oracle = s.base_oracle(sk, oseed, record_log=False)
        enc_rows = np.empty((m, n), dtype=np.uint8)
        for i, eseed in enumerate(enc.spawn(m)):
            c = charged_call(oracle, s.query_bound, s.encode, sk, eseed, oracle)
            enc_rows[i] = c.to_bits()
        uni_rows = _rng.generator(uni).integers(0, 2, size=(m, n), dtype=np.uint8)
        for name, test in battery:
            enc_hits[name] += bool(test(enc_rows))
            uni_hits[name] += bool(test(uni_rows))
    gaps = {name: abs(enc_hits[name] - uni_hits[name]) / trials for name in names}
    worst = max(names, key=lambda name: gaps[name])
    p1 = enc_hits[worst] / trials
    p2 = uni_hits[worst] / trials
    # CI of a difference of two independent proportions
    halfwidth = 1.96 * np.sqrt(p1 * (1 - p1) / trials + p2 * (1 - p2) / trials)
    counts = {f"enc_{name}": enc_hits[name] for name in names}
    counts.update({f"uni_{name}": uni_hits[name] for name in names})
    return ExperimentReport(
        estimate=gaps[worst],
        trials=trials,
        ci95_halfwidth=float(halfwidth),
        counts=counts,
        params=_base_params(s, trials, {"m": m, "worst": worst}),
    )
