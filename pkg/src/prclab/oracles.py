"""Lazily sampled random oracles with query transcripts.

An oracle maps bit strings to single bits. Responses are a deterministic
keyed-hash function of (root seed, query length, query value), which
gives function consistency without a memo table and makes every
experiment replayable from its seed; statistical statements about "the
random oracle" are with respect to the seed distribution. Queries of
different lengths live in disjoint namespaces.

Transcripts record first-query order, which the compiler experiments
rely on. The issued-query counter counts every call, repeats included,
and is what query budgets are charged against (stricter than distinct
counting, never weaker).
"""

import io
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _kernels, _pack, _rng
from .bits import BitString

__all__ = [
    "QuerySet",
    "LazyOracle",
    "ConsistentOracle",
    "SecretPrefixOracle",
    "CryptoOracleMachine",
    "StepBoundExceeded",
    "oracle_query",
    "consistent_resample",
    "secret_prefix",
    "run_crypto_oracle",
]


class QuerySet:
    """Insertion-ordered map from query to bit, no conflicting entries.

    Backed either by a BitString dict or, for uniform query lengths of
    at most 64 bits, by packed uint64 arrays; the two views are built
    from each other lazily so bulk lookups stay vectorized.
    """

    __slots__ = ("_entries", "_bitlen", "_keys", "_bits", "_sorted_keys", "_sorted_bits")

    def __init__(self, entries=None):
        self._entries = dict(entries) if entries else {}
        for q, b in self._entries.items():
            if b not in (0, 1):
                raise ValueError("bits must be 0 or 1")
        self._bitlen = None
        self._keys = None
        self._bits = None
        self._sorted_keys = None
        self._sorted_bits = None

    @classmethod
    def from_packed(cls, bitlen, keys, bits):
        """Adopt packed key/bit arrays already deduplicated, in order."""
        if bitlen > 64:
            raise ValueError("packed form limited to 64-bit queries")
        s = cls()
        s._entries = None
        s._bitlen = bitlen
        s._keys = np.asarray(keys, dtype=np.uint64)
        s._bits = np.asarray(bits, dtype=np.uint8)
        return s

    def _ensure_entries(self):
        if self._entries is None:
            self._entries = {
                BitString(int(k), self._bitlen): int(b)
                for k, b in zip(self._keys, self._bits)
            }
        return self._entries

    def _ensure_packed(self):
        """Packed arrays, or None when entries are mixed-length or long."""
        if self._keys is None:
            if not self._entries:
                return None
            lengths = {q.n for q in self._entries}
            if len(lengths) != 1 or max(lengths) > 64:
                return None
            self._bitlen = lengths.pop()
            self._keys = np.fromiter(
                (q.value for q in self._entries), dtype=np.uint64, count=len(self._entries)
            )
            self._bits = np.fromiter(self._entries.values(), dtype=np.uint8, count=len(self._entries))
        if self._sorted_keys is None:
            order = np.argsort(self._keys, kind="stable")
            self._sorted_keys = self._keys[order]
            self._sorted_bits = self._bits[order]
        return self._bitlen, self._sorted_keys, self._sorted_bits

    def add(self, q, bit):
        if bit not in (0, 1):
            raise ValueError("bit must be 0 or 1")
        entries = self._ensure_entries()
        old = entries.get(q)
        if old is not None and old != bit:
            raise ValueError(f"conflicting bit for query {q!r}")
        if old is None:
            entries[q] = bit
            # packed caches are stale now
            self._keys = self._bits = self._sorted_keys = self._sorted_bits = None
            self._bitlen = None

    def merged(self, other):
        """New set with self's entries first, then other's; conflicts raise."""
        out = QuerySet(self._ensure_entries())
        for q, b in other.items():
            out.add(q, b)
        return out

    def lookup(self, bitlen, value):
        """Bit for the (bitlen, value) query, or None."""
        if self._entries is not None:
            return self._entries.get(BitString(value, bitlen))
        if bitlen != self._bitlen:
            return None
        _, skeys, sbits = self._ensure_packed()
        pos = int(np.searchsorted(skeys, np.uint64(value)))
        if pos < skeys.size and int(skeys[pos]) == value:
            return int(sbits[pos])
        return None

    def lookup_batch(self, bitlen, words):
        """Vectorized lookup: (found mask, bits) for packed query rows."""
        n_rows = words.shape[0]
        packed = self._ensure_packed()
        if packed is not None and words.shape[1] == 1:
            plen, skeys, sbits = packed
            if plen != bitlen or skeys.size == 0:
                return np.zeros(n_rows, dtype=bool), np.zeros(n_rows, dtype=np.uint8)
            keys = words[:, 0]
            pos = np.minimum(np.searchsorted(skeys, keys), skeys.size - 1)
            found = skeys[pos] == keys
            return found, sbits[pos] * found
        # generic fallback, only sensible for small batches
        found = np.zeros(n_rows, dtype=bool)
        bits = np.zeros(n_rows, dtype=np.uint8)
        for i in range(n_rows):
            value = 0
            for k in range(words.shape[1]):
                value |= int(words[i, k]) << (64 * k)
            hit = self.lookup(bitlen, value)
            if hit is not None:
                found[i] = True
                bits[i] = hit
        return found, bits

    def packed_values(self):
        """(bitlen, sorted key-value array) when packable, else None."""
        packed = self._ensure_packed()
        if packed is None:
            return None
        bitlen, skeys, _ = packed
        return bitlen, skeys

    def __contains__(self, q):
        return self.lookup(q.n, q.value) is not None

    def __getitem__(self, q):
        bit = self.lookup(q.n, q.value)
        if bit is None:
            raise KeyError(q)
        return bit

    def __len__(self):
        if self._entries is not None:
            return len(self._entries)
        return int(self._keys.size)

    def items(self):
        """Entries in insertion order."""
        return iter(self._ensure_entries().items())

    def to_file(self, path):
        """Write 'hex bit' lines, insertion ordered, with a length header."""
        with open(path, "w") as fh:
            fh.write(self.dumps())

    def dumps(self):
        out = io.StringIO()
        if self._entries is None:
            length = self._bitlen
            pairs = ((BitString(int(k), length), int(b)) for k, b in zip(self._keys, self._bits))
        else:
            lengths = {q.n for q in self._entries}
            if len(lengths) > 1:
                raise ValueError("cannot serialize mixed query lengths")
            length = lengths.pop() if lengths else None
            pairs = self._entries.items()
        if length is not None:
            out.write(f"# bits={length}\n")
            for q, b in pairs:
                out.write(f"{q.hex()} {b}\n")
        return out.getvalue()

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            return cls.loads(fh.read())

    @classmethod
    def loads(cls, text):
        length = None
        s = cls()
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                if key.strip() == "bits":
                    length = int(val)
                continue
            hexpart, bitpart = line.split()
            q = BitString.from_hex(hexpart, length)
            s.add(q, int(bitpart))
        return s

    def __repr__(self):
        return f"QuerySet(len={len(self)})"


class _OracleBase:
    """Shared transcript/counter plumbing for all oracle flavors."""

    def __init__(self, record_log=True):
        self.record_log = record_log
        self._chunks = []
        self._issued = 0

    @property
    def queries_made(self):
        """Total queries issued, repeats included."""
        return self._issued

    def query(self, q):
        """Single response bit for a BitString query."""
        bit = self._respond_scalar(q.n, q.value)
        self._issued += 1
        if self.record_log:
            self._chunks.append((q.n, q.value, bit))
        return bit

    def query_batch(self, bitlen, words):
        """Response bits for packed query rows (see _pack)."""
        bits = self._respond_batch(bitlen, words)
        self._issued += words.shape[0]
        if self.record_log:
            self._chunks.append((bitlen, words, bits))
        return bits

    def _iter_logged(self):
        for bitlen, payload, bits in self._chunks:
            if isinstance(payload, np.ndarray):
                n_words = payload.shape[1]
                for i in range(payload.shape[0]):
                    value = 0
                    for k in range(n_words):
                        value |= int(payload[i, k]) << (64 * k)
                    yield bitlen, value, int(bits[i])
            else:
                yield bitlen, payload, bits

    def transcript(self):
        """Distinct logged queries in first-query order, with responses."""
        seen = set()
        out = []
        for bitlen, value, bit in self._iter_logged():
            key = (bitlen, value)
            if key not in seen:
                seen.add(key)
                out.append((BitString(value, bitlen), bit))
        return out

    def distinct_count(self):
        return len({(bl, v) for bl, v, _ in self._iter_logged()})

    def logged_key_arrays(self):
        """Distinct logged queries grouped by length, as uint64 value arrays.

        Only available when every logged query fits one word; the
        compiler uses this for fast transcript intersection.
        """
        groups = {}
        for bitlen, payload, bits in self._chunks:
            if isinstance(payload, np.ndarray):
                if payload.shape[1] != 1:
                    return None
                groups.setdefault(bitlen, []).append(payload[:, 0])
            else:
                if bitlen > 64:
                    return None
                groups.setdefault(bitlen, []).append(np.array([payload], dtype=np.uint64))
        return {
            bitlen: np.unique(np.concatenate(parts))
            for bitlen, parts in groups.items()
        }


class LazyOracle(_OracleBase):
    """Fresh random function of the given seed."""

    def __init__(self, seed, record_log=True):
        super().__init__(record_log)
        self._key0, self._key1 = _rng.oracle_keys(seed)

    def _respond_scalar(self, bitlen, value):
        return _kernels.oracle_bit(
            self._key0, self._key1, bitlen, _pack.value_to_words(value, bitlen)
        )

    def _respond_batch(self, bitlen, words):
        return _kernels.oracle_bits(self._key0, self._key1, bitlen, words)


class ConsistentOracle(_OracleBase):
    """Fresh random function constrained to agree with a recorded set."""

    def __init__(self, constraints, seed, record_log=True):
        super().__init__(record_log)
        self.constraints = constraints
        self._key0, self._key1 = _rng.oracle_keys(seed)

    def _respond_scalar(self, bitlen, value):
        hit = self.constraints.lookup(bitlen, value)
        if hit is not None:
            return hit
        return _kernels.oracle_bit(
            self._key0, self._key1, bitlen, _pack.value_to_words(value, bitlen)
        )

    def _respond_batch(self, bitlen, words):
        bits = _kernels.oracle_bits(self._key0, self._key1, bitlen, words)
        if len(self.constraints):
            found, forced = self.constraints.lookup_batch(bitlen, words)
            bits = np.where(found, forced, bits)
        return bits


def oracle_query(o, q):
    """Module-level alias for a single oracle call."""
    return o.query(q)


def consistent_resample(constraints, seed, record_log=True):
    """Fresh oracle agreeing with the constraint set on its domain."""
    return ConsistentOracle(constraints, seed, record_log)


class SecretPrefixOracle:
    """View of a base oracle under a fixed secret prefix.

    Maps q to base(sk || q); all traffic lands in the base oracle's log
    with the prefix attached. Distinct prefixes of one fixed length can
    never collide on the underlying query space.
    """

    def __init__(self, base, sk):
        self.base = base
        self.sk = sk

    def query(self, q):
        return self.base.query(self.sk.concat(q))

    def query_batch(self, bitlen, words):
        full_len, full = _pack.prepend_words(self.sk.value, self.sk.n, bitlen, words)
        return self.base.query_batch(full_len, full)

    @property
    def queries_made(self):
        return self.base.queries_made


def secret_prefix(o, sk):
    return SecretPrefixOracle(o, sk)


class StepBoundExceeded(RuntimeError):
    """A crypto-oracle machine ran past its declared step bound."""


class _SteppedOracle:
    """Oracle handle that charges each query against a step budget."""

    def __init__(self, base, bound):
        self.base = base
        self.bound = bound
        self.steps = 0

    def _charge(self, k):
        self.steps += k
        if self.steps > self.bound:
            raise StepBoundExceeded(f"exceeded {self.bound} oracle steps")

    def query(self, q):
        self._charge(1)
        return self.base.query(q)

    def query_batch(self, bitlen, words):
        self._charge(words.shape[0])
        return self.base.query_batch(bitlen, words)


@dataclass(frozen=True)
class CryptoOracleMachine:
    """Stateless deterministic program with oracle access.

    The step bound is metered in oracle queries, the one resource the
    harness can observe; output_len, when set, is enforced on returns.
    """

    program: Callable[[BitString, object], BitString]
    step_bound: int
    output_len: Optional[int] = None
    name: str = "machine"


def run_crypto_oracle(machine, input_bits, o):
    """Run the machine on input_bits with oracle o; all traffic logged in o."""
    handle = _SteppedOracle(o, machine.step_bound)
    out = machine.program(input_bits, handle)
    if not isinstance(out, BitString):
        raise TypeError("machine must return a BitString")
    if machine.output_len is not None and len(out) != machine.output_len:
        raise ValueError(f"machine declared {machine.output_len} output bits, got {len(out)}")
    return out
