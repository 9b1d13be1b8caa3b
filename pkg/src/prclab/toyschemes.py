"""Small schemes for calibration and compiler experiments.

None of these are good codes. They pin down corner cases: constant
verdicts, oracle-free decoding, decoders with known query profiles on
tiny domains (where heavy-query sets can be enumerated exactly), and a
two-query adaptive decoder for the exact simulation checks.
"""

import numpy as np

from . import _rng
from .bits import BitString
from .prc import PrcScheme, SecretKey

__all__ = [
    "ConstantVerdictScheme",
    "FirstBitScheme",
    "PadScheme",
    "FixedQueryScheme",
    "EchoQueryScheme",
    "TriggerScheme",
    "ChainScheme",
]


def _uniform_codeword(n, seed):
    return BitString.random(n, _rng.generator(seed))


class ConstantVerdictScheme(PrcScheme):
    """Uniform encodings; decode ignores everything and returns a constant."""

    def __init__(self, n=16, accept=True, lam=8):
        self.security_param = lam
        self.codeword_len = n
        self.key_len = 0
        self.query_bound = 0
        self.accept = accept

    @property
    def name(self):
        return "always-accept" if self.accept else "always-reject"

    def keygen(self, seed):
        return SecretKey(BitString.zeros(0))

    def encode(self, sk, seed, oracle):
        return _uniform_codeword(self.codeword_len, seed)

    def decode(self, sk, x, seed, oracle):
        return self.accept


class FirstBitScheme(PrcScheme):
    """Accepts iff the first bit is 0; encodes accordingly."""

    def __init__(self, n=16, lam=8):
        self.security_param = lam
        self.codeword_len = n
        self.key_len = 0
        self.query_bound = 0

    name = "first-bit"

    def keygen(self, seed):
        return SecretKey(BitString.zeros(0))

    def encode(self, sk, seed, oracle):
        c = _uniform_codeword(self.codeword_len, seed)
        return BitString(c.value & ((1 << (self.codeword_len - 1)) - 1), self.codeword_len)

    def decode(self, sk, x, seed, oracle):
        return x[0] == 0


class PadScheme(PrcScheme):
    """Oracle-free one-time pad code: the codeword is the key itself.

    Decode accepts anything within the distance threshold of sk. Honest
    completeness and soundness without any oracle traffic, which makes
    it the compiler's do-nothing baseline.
    """

    def __init__(self, n=64, threshold=None, lam=8):
        self.security_param = lam
        self.codeword_len = n
        self.key_len = n
        self.query_bound = 0
        # default threshold splits the 1/4-vs-1/2 flip-rate gap at rho=0.5
        self.threshold = threshold if threshold is not None else (3 * n) // 8

    name = "pad"

    def keygen(self, seed):
        return SecretKey(BitString.random(self.codeword_len, _rng.generator(seed)))

    def encode(self, sk, seed, oracle):
        return sk.bits

    def decode(self, sk, x, seed, oracle):
        return x.hamming_distance(sk.bits) <= self.threshold


class FixedQueryScheme(PrcScheme):
    """Decode always queries the key point and accepts on a 1 bit."""

    def __init__(self, n=8, lam=8):
        self.security_param = lam
        self.codeword_len = n
        self.key_len = lam
        self.query_bound = 1

    name = "fixed-query"

    def keygen(self, seed):
        return SecretKey(BitString.random(self.security_param, _rng.generator(seed)))

    def encode(self, sk, seed, oracle):
        return _uniform_codeword(self.codeword_len, seed)

    def decode(self, sk, x, seed, oracle):
        return oracle.query(sk.bits) == 1


class EchoQueryScheme(PrcScheme):
    """Decode queries its own input; every query has frequency 2^-n."""

    def __init__(self, n=8, lam=8):
        if n > 16:
            raise ValueError("echo scheme is for tiny domains")
        self.security_param = lam
        self.codeword_len = n
        self.key_len = 0
        self.query_bound = 1

    name = "echo-query"

    def keygen(self, seed):
        return SecretKey(BitString.zeros(0))

    def encode(self, sk, seed, oracle):
        return _uniform_codeword(self.codeword_len, seed)

    def decode(self, sk, x, seed, oracle):
        return oracle.query(x) == 1


class TriggerScheme(PrcScheme):
    """Decode queries the key point only on a trigger fraction of inputs.

    The key query's frequency is exactly trigger_count / 2^n, so placing
    it at the heaviness threshold exercises the escape event: the
    learning phase misses the query when no probe input lands in the
    trigger set.
    """

    def __init__(self, n=8, trigger_count=26, lam=8):
        if not 0 <= trigger_count <= (1 << n):
            raise ValueError("trigger_count out of range")
        self.security_param = lam
        self.codeword_len = n
        self.key_len = lam
        self.query_bound = 1
        self.trigger_count = trigger_count

    @property
    def name(self):
        return f"trigger[{self.trigger_count}/{1 << self.codeword_len}]"

    def keygen(self, seed):
        return SecretKey(BitString.random(self.security_param, _rng.generator(seed)))

    def encode(self, sk, seed, oracle):
        # encoder pings the key point too, so intersections are possible
        oracle.query(sk.bits)
        return _uniform_codeword(self.codeword_len, seed)

    def decode(self, sk, x, seed, oracle):
        if x.value < self.trigger_count:
            return oracle.query(sk.bits) == 1
        return False


class ChainScheme(PrcScheme):
    """Two-query adaptive decoder for the exact simulation checks.

    Decode asks sk||0; on a 1 it also asks sk||1 and accepts iff that
    second bit is 1. The encoder asks sk||0 as well and folds the bit
    into its first codeword bit, so encoder/decoder share a potential
    off-transcript intersection point.
    """

    def __init__(self, n=3, lam=2):
        self.security_param = lam
        self.codeword_len = n
        self.key_len = lam
        self.query_bound = 2

    name = "chain"

    def _q(self, sk, idx):
        return sk.bits.concat(BitString(idx, 1))

    def keygen(self, seed):
        return SecretKey(BitString.random(self.security_param, _rng.generator(seed)))

    def encode(self, sk, seed, oracle):
        c = _uniform_codeword(self.codeword_len, seed)
        first = oracle.query(self._q(sk, 0))
        return BitString(c.value ^ (first << (self.codeword_len - 1)), self.codeword_len)

    def decode(self, sk, x, seed, oracle):
        if oracle.query(self._q(sk, 0)) == 1:
            return oracle.query(self._q(sk, 1)) == 1
        return False
