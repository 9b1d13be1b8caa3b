"""Oracle-removal compiler and its failure-event measurements.

The compiler learns the decoder's likely oracle traffic at keygen time:
it runs the decoder on ceil(lam/tau) uniform inputs against a fresh
function F0, recording every query/response pair into a set S that
travels with the key. Encoding and decoding then stop sharing an
oracle; each call draws its own fresh function constrained to agree
with S. Two events measure what that replacement can break:

  bad1: some query the decoder makes with probability >= tau on a
        uniform input escaped S during learning;
  bad2: no escape happened, but the encoder's and decoder's fresh
        functions were both queried at some point outside S, where
        their answers are independent.

Per-trial flags for both are reported next to closed-form bounds
(2^-lam Q/tau for bad1, Q^2 tau^((1/2)(1-rho^2)/(1+rho^2)) for the
heavy-tail term), with big-O constants fixed at 1 and each term kept
visible separately.

Exact enumeration routines verify, on tiny deterministic schemes, that
the compiled decoder's accept probability on any fixed input equals the
uncompiled one: replacing the shared oracle by consistent resamples is
a perfect simulation for soundness.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _rng
from .bits import BitString
from .boolfn import collision_exponent
from .channel import apply_noise
from .infotheory import EnumerationLimit
from .oracles import ConsistentOracle, QuerySet
from .prc import QueryBudgetExceeded, SecretKey, charged_call
from .reports import binomial_report

__all__ = [
    "CompilerParams",
    "CompiledKey",
    "BadEventCounts",
    "compile_keygen",
    "compiled_encode",
    "compiled_decode",
    "find_heavy_queries",
    "run_completeness_experiment",
    "theoretical_delta_prime",
    "bad1_bound",
    "bad2_tau_term",
    "exact_uncompiled_accept",
    "exact_compiled_accept",
]


@dataclass(frozen=True)
class CompilerParams:
    """Heaviness threshold; everything else is inherited from the scheme."""

    tau: float

    def __post_init__(self):
        if not 0 < self.tau < 1:
            raise ValueError("tau must be in (0, 1)")

    def runs_for(self, lam):
        """Learning runs ceil(lam / tau)."""
        return math.ceil(lam / self.tau)


@dataclass(frozen=True)
class CompiledKey:
    """Base key plus the learned decoder transcript."""

    sk: SecretKey
    learned: QuerySet

    def constraints(self):
        """Everything future oracles must honor: keygen-absorbed pairs first."""
        if len(self.sk.absorbed):
            return self.sk.absorbed.merged(self.learned)
        return self.learned


@dataclass
class BadEventCounts:
    """Per-trial failure flags; bad2 is only ever set when bad1 is not."""

    trials: int
    bad1_flags: list = field(default_factory=list)
    bad2_flags: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.bad1_flags) != self.trials or len(self.bad2_flags) != self.trials:
            raise ValueError("need one flag pair per trial")
        for f1, f2 in zip(self.bad1_flags, self.bad2_flags):
            if f1 and f2:
                raise ValueError("bad1 and bad2 are disjoint by definition")

    @property
    def bad1_count(self):
        return sum(self.bad1_flags)

    @property
    def bad2_count(self):
        return sum(self.bad2_flags)


def _learned_set(oracle):
    """Oracle transcript as a QuerySet, packed when cheaply possible."""
    grouped = oracle.logged_key_arrays()
    if grouped is not None and len(grouped) == 1:
        # rebuild first-order unique pairs from the raw chunks
        ((bitlen, _),) = grouped.items()
        keys_parts, bits_parts = [], []
        for chunk_len, payload, bits in oracle._chunks:
            if isinstance(payload, np.ndarray):
                keys_parts.append(payload[:, 0])
                bits_parts.append(bits)
            else:
                keys_parts.append(np.array([payload], dtype=np.uint64))
                bits_parts.append(np.array([bits], dtype=np.uint8))
        keys = np.concatenate(keys_parts)
        bits = np.concatenate(bits_parts)
        _, first = np.unique(keys, return_index=True)
        order = np.sort(first)
        return QuerySet.from_packed(bitlen, keys[order], bits[order])
    return QuerySet(dict(oracle.transcript()))


def compile_keygen(s, p, seed):
    """Sample a key and learn the decoder's transcript on uniform inputs."""
    kg, f0_seed, probe_seed, dec_seed = _rng.split(seed, 4)
    sk = s.keygen(kg)
    runs = p.runs_for(s.security_param)
    oracle = s.base_oracle(sk, f0_seed, record_log=True)
    before = oracle.queries_made
    xs = _rng.generator(probe_seed).integers(0, 2, size=(runs, s.codeword_len), dtype=np.uint8)
    verdicts = s.decode_many(sk, xs, dec_seed, oracle)
    if verdicts is None:
        for i in range(runs):
            charged_call(
                oracle, s.query_bound, s.decode,
                sk, BitString.from_bits(xs[i]), dec_seed, oracle,
            )
    elif oracle.queries_made - before > runs * s.query_bound:
        raise QueryBudgetExceeded("decoder exceeded its budget during learning")
    learned = _learned_set(oracle)
    if len(learned) > s.query_bound * runs:
        raise AssertionError("learned set larger than runs * query bound")
    return CompiledKey(sk, learned)


def compiled_encode(s, ck, seed):
    """Encode against a fresh function consistent with the learned set."""
    f1_seed, enc_seed = _rng.split(seed, 2)
    oracle = ConsistentOracle(ck.constraints(), f1_seed, record_log=False)
    c = charged_call(oracle, s.query_bound, s.encode, ck.sk, enc_seed, oracle)
    if len(c) != s.codeword_len:
        raise ValueError("encode returned wrong length")
    return c


def compiled_decode(s, ck, x, seed):
    """Decode against an independent fresh function consistent with S."""
    if len(x) != s.codeword_len:
        raise ValueError(f"expected {s.codeword_len} bits, got {len(x)}")
    f2_seed, dec_seed = _rng.split(seed, 2)
    oracle = ConsistentOracle(ck.constraints(), f2_seed, record_log=False)
    return bool(charged_call(oracle, s.query_bound, s.decode, ck.sk, x, dec_seed, oracle))


class _TeeOracle:
    """Pass-through wrapper that collects the current run's query keys."""

    def __init__(self, base):
        self.base = base
        self.seen = set()

    def begin(self):
        self.seen = set()

    def query(self, q):
        self.seen.add((q.n, q.value))
        return self.base.query(q)

    def query_batch(self, bitlen, words):
        for i in range(words.shape[0]):
            value = 0
            for k in range(words.shape[1]):
                value |= int(words[i, k]) << (64 * k)
            self.seen.add((bitlen, value))
        return self.base.query_batch(bitlen, words)

    @property
    def queries_made(self):
        return self.base.queries_made


def find_heavy_queries(s, sk, oracle, tau, probe_trials, seed, mode="auto"):
    """Queries the decoder makes with probability >= tau on uniform inputs.

    Exact mode enumerates every input (domains up to 2^16); Monte-Carlo
    mode samples probe_trials inputs and keeps empirical frequencies at
    or above tau/2, trading the definitional threshold for a margin
    against sampling error. Decoder coins are held fixed across runs.
    """
    if mode == "auto":
        mode = "exact" if s.codeword_len <= 16 else "mc"
    tee = _TeeOracle(oracle)
    counts = {}
    if mode == "exact":
        total = 1 << s.codeword_len
        for v in range(total):
            tee.begin()
            s.decode(sk, BitString(v, s.codeword_len), seed, tee)
            for key in tee.seen:
                counts[key] = counts.get(key, 0) + 1
        needed = tau * total - 1e-9
    elif mode == "mc":
        if probe_trials < 10 / tau:
            raise ValueError("need at least 10/tau probe trials")
        x_seed, dec_seed = _rng.split(seed, 2)
        rng = _rng.generator(x_seed)
        total = probe_trials
        for _ in range(total):
            tee.begin()
            s.decode(sk, BitString.random(s.codeword_len, rng), dec_seed, tee)
            for key in tee.seen:
                counts[key] = counts.get(key, 0) + 1
        needed = (tau / 2) * total - 1e-9
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return frozenset(
        BitString(value, bitlen) for (bitlen, value), c in counts.items() if c >= needed
    )


def _bad1_flag(s, ck, tau, f2_seed, heavy_seed, mode):
    """Decide the heavy-escape event for one trial; returns (flag, mode used)."""
    constraints = ck.constraints()
    if mode in ("auto", "analytic"):
        answer = s.heavy_escape(ck.sk, tau, constraints)
        if answer is not None:
            return bool(answer), "analytic"
        if mode == "analytic":
            raise ValueError("scheme has no analytic heavy-set answer")
    chosen = mode
    if mode == "auto":
        chosen = "exact" if s.codeword_len <= 16 else "mc"
    probe_oracle = ConsistentOracle(constraints, f2_seed, record_log=False)
    probes = math.ceil(100 / tau) if chosen == "mc" else 0
    heavy = find_heavy_queries(s, ck.sk, probe_oracle, tau, probes, heavy_seed, chosen)
    return any(q not in constraints for q in heavy), chosen


def _off_constraint_intersection(f1, f2, constraints):
    """Whether the two transcripts share a query outside the constraint set."""
    a = f1.logged_key_arrays()
    b = f2.logged_key_arrays()
    if a is not None and b is not None:
        for bitlen, keys in a.items():
            other = b.get(bitlen)
            if other is None:
                continue
            common = np.intersect1d(keys, other, assume_unique=True)
            if common.size == 0:
                continue
            found, _ = constraints.lookup_batch(bitlen, common[:, None])
            if not bool(found.all()):
                return True
        return False
    seen = {(bl, v) for bl, v, _ in f1._iter_logged()}
    for bl, v, _ in f2._iter_logged():
        if (bl, v) in seen and constraints.lookup(bl, v) is None:
            return True
    return False


def _run_trial(s, p, rho, child, heavy_mode):
    """One compiled completeness trial with full bad-event bookkeeping."""
    ck_seed, f1_seed, enc_seed, noise_seed, f2_seed, dec_seed, heavy_seed = child.spawn(7)
    ck = compile_keygen(s, p, ck_seed)
    constraints = ck.constraints()
    f1 = ConsistentOracle(constraints, f1_seed, record_log=True)
    c = charged_call(f1, s.query_bound, s.encode, ck.sk, enc_seed, f1)
    if len(c) != s.codeword_len:
        raise ValueError("encode returned wrong length")
    noisy = apply_noise(c, rho, noise_seed)
    f2 = ConsistentOracle(constraints, f2_seed, record_log=True)
    verdict = bool(
        charged_call(f2, s.query_bound, s.decode, ck.sk, noisy, dec_seed, f2)
    )
    bad1, mode = _bad1_flag(s, ck, p.tau, f2_seed, heavy_seed, heavy_mode)
    bad2 = (not bad1) and _off_constraint_intersection(f1, f2, constraints)
    return verdict, bad1, bad2, len(ck.learned), mode


def run_completeness_experiment(s, p, rho, trials, seed, heavy_mode="auto"):
    """Compiled completeness with per-trial bad1/bad2 flags.

    Returns (report, BadEventCounts); the report's params record the
    heavy-query decision mode and the mean learned-set size.
    """
    if trials < 100:
        raise ValueError("need at least 100 trials")
    accepts = 0
    flags1, flags2, sizes = [], [], []
    modes = set()
    for child in _rng.split(seed, trials):
        verdict, bad1, bad2, s_size, mode = _run_trial(s, p, rho, child, heavy_mode)
        accepts += verdict
        flags1.append(bad1)
        flags2.append(bad2)
        sizes.append(s_size)
        modes.add(mode)
    counts = BadEventCounts(trials, flags1, flags2)
    report = binomial_report(
        accepts,
        trials,
        params={
            "scheme": s.name,
            "lambda": s.security_param,
            "rho": rho,
            "tau": p.tau,
            "Q": s.query_bound,
            "n": s.codeword_len,
            "trials": trials,
            "bad1_mode": "+".join(sorted(modes)),
            "S_size_mean": float(np.mean(sizes)),
        },
        counts={
            "accept": accepts,
            "reject": trials - accepts,
            "bad1": counts.bad1_count,
            "bad2": counts.bad2_count,
        },
    )
    return report, counts


def bad1_bound(q_bound, tau, lam):
    """Escape-probability bound 2^-lam * Q / tau."""
    if not 0 < tau < 1:
        raise ValueError("tau must be in (0, 1)")
    return 2.0 ** (-lam) * q_bound / tau


def bad2_tau_term(q_bound, tau, rho):
    """Heavy-tail term Q^2 * tau^((1/2)(1-rho^2)/(1+rho^2))."""
    if not 0 < tau < 1:
        raise ValueError("tau must be in (0, 1)")
    return q_bound * q_bound * tau ** collision_exponent(rho)


def theoretical_delta_prime(delta, q_bound, tau, rho, eps, n, lam):
    """Compiled completeness error bound, big-O constants set to 1.

    delta + 2^-lam Q/tau + Q^2 tau^((1/2)(1-rho^2)/(1+rho^2)) + Q^2 sqrt(eps n).
    """
    if delta < 0 or eps < 0 or n < 0 or q_bound < 0:
        raise ValueError("parameters must be nonnegative")
    return (
        delta
        + bad1_bound(q_bound, tau, lam)
        + bad2_tau_term(q_bound, tau, rho)
        + q_bound * q_bound * math.sqrt(eps * n)
    )


# ---------------------------------------------------------------------------
# Exact enumeration on tiny deterministic schemes.
#
# The decoder is replayed under every possible assignment of oracle
# response bits; each distinct free query halves the branch weight.
# Preconditions: procedures ignore their seed argument, keygen is
# uniform over key_len bits with no absorbed transcript, and all oracle
# use is scalar.


class _NeedBranch(Exception):
    def __init__(self, key):
        self.key = key


class _ReplayOracle:
    """Answers from fixed constraints, then an assignment; else branches."""

    def __init__(self, constraints, assignment, recorded):
        self.constraints = constraints
        self.assignment = assignment
        self.recorded = recorded

    def query(self, q):
        key = (q.n, q.value)
        if self.constraints is not None and key in self.constraints:
            bit = self.constraints[key]
        elif key in self.assignment:
            bit = self.assignment[key]
        else:
            raise _NeedBranch(key)
        self.recorded[key] = bit
        return bit


def _enumerate_run(run_fn, constraints, assignment):
    """All completions of one oracle run.

    Yields (weight, extended assignment, queried pairs, verdict) with
    weights summing to 1 over the free response bits.
    """
    recorded = {}
    try:
        verdict = run_fn(_ReplayOracle(constraints, assignment, recorded))
    except _NeedBranch as nb:
        out = []
        for bit in (0, 1):
            extended = dict(assignment)
            extended[nb.key] = bit
            for w, a, rec, v in _enumerate_run(run_fn, constraints, extended):
                out.append((w / 2, a, rec, v))
        return out
    return [(Fraction(1), assignment, recorded, verdict)]


def _check_enumerable(s):
    if s.key_len > 4 or s.codeword_len > 4:
        raise EnumerationLimit("exact simulation needs key_len <= 4 and n <= 4")


def _decode_run(s, sk, x):
    return lambda oracle: bool(s.decode(sk, x, 0, oracle))


def exact_uncompiled_accept(s, x):
    """Exact Pr[decode(sk, x) accepts] over keys and oracle bits."""
    _check_enumerable(s)
    total = Fraction(0)
    for key_value in range(1 << s.key_len):
        sk = SecretKey(BitString(key_value, s.key_len))
        for w, _, _, verdict in _enumerate_run(_decode_run(s, sk, x), None, {}):
            if verdict:
                total += w
    return total / (1 << s.key_len)


def exact_compiled_accept(s, tau, x):
    """Exact compiled accept probability on x, marginalized over keys,
    learning inputs, the learning function F0, and the decode-time F2."""
    _check_enumerable(s)
    p = CompilerParams(tau)
    runs = p.runs_for(s.security_param)
    if runs * s.codeword_len > 16:
        raise EnumerationLimit("too many learning runs to enumerate")
    total = Fraction(0)
    for key_value in range(1 << s.key_len):
        sk = SecretKey(BitString(key_value, s.key_len))
        total += _learning_phase(s, sk, runs, {}, {}, x)
    return total / (1 << s.key_len)


def _learning_phase(s, sk, runs_left, f0_assignment, learned, x):
    if runs_left == 0:
        acc = Fraction(0)
        for w, _, _, verdict in _enumerate_run(_decode_run(s, sk, x), dict(learned), {}):
            if verdict:
                acc += w
        return acc
    n = s.codeword_len
    acc = Fraction(0)
    for probe_value in range(1 << n):
        probe = BitString(probe_value, n)
        for w, extended, recorded, _ in _enumerate_run(
            _decode_run(s, sk, probe), None, f0_assignment
        ):
            merged = dict(learned)
            merged.update(recorded)
            acc += w * _learning_phase(s, sk, runs_left - 1, extended, merged, x)
    return acc / (1 << n)
