"""Block-structured pseudorandom code built on a keyed random function.

A codeword is B blocks r_i || F_sk(r_i), where r_i is a fresh uniform
block seed of ell bits and F_sk is instantiated by secret-prefix oracle
calls: bit j of F_sk(r) is oracle(sk || r || j) with the block-output
index j carried at a fixed 8-bit width so evaluations never collide
across positions. The decoder accepts iff any received block is
self-consistent, which drives the completeness/soundness tradeoff:

    completeness = 1 - (1 - ((1+rho)/2)^(2 ell))^B
    false-accept <= B * 2^(-ell)

Raising ell hardens soundness but kills completeness at any fixed
noise level; the closed forms above make the collapse measurable.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _rng
from ._pack import pack_fields
from .bits import BitString
from .oracles import secret_prefix
from .prc import PrcScheme, SecretKey

__all__ = [
    "PrfPrcParams",
    "PrfPrcScheme",
    "prf_eval",
    "encode",
    "decode",
    "closed_form_completeness",
    "closed_form_soundness_bound",
]

_INDEX_BITS = 8  # fixed width of the output-bit index in oracle queries


@dataclass(frozen=True)
class PrfPrcParams:
    """Shape of the construction.

    ell defaults to ceil(log2(lam) / (1 - rho_design)) and blocks to
    lam^2; both may be pinned explicitly. Key and block seed must fit a
    64-bit packing word, which caps lam at 64 and ell at 63.
    """

    lam: int
    rho_design: float = 0.5
    ell: int = None
    blocks: int = None

    def __post_init__(self):
        if not 1 <= self.lam <= 64:
            raise ValueError("lam must be in 1..64")
        if not 0 <= self.rho_design <= 1:
            raise ValueError("rho_design must be in [0, 1]")
        if self.ell is None:
            if self.rho_design == 1 or self.lam == 1:
                raise ValueError("default ell undefined here; pass ell explicitly")
            object.__setattr__(
                self, "ell", math.ceil(math.log2(self.lam) / (1 - self.rho_design))
            )
        if self.blocks is None:
            object.__setattr__(self, "blocks", self.lam * self.lam)
        if not 1 <= self.ell <= 63:
            raise ValueError("ell must be in 1..63")
        if self.blocks < 1:
            raise ValueError("blocks must be positive")

    @property
    def n(self):
        """Codeword length 2 * ell * blocks."""
        return 2 * self.ell * self.blocks


def prf_eval(sk, r, oracle):
    """F_sk(r): one output bit per index j from the prefixed oracle."""
    view = secret_prefix(oracle, sk.bits)
    bits = [
        view.query(r.concat(BitString(j, _INDEX_BITS))) for j in range(len(r))
    ]
    return BitString.from_bits(bits)


def _query_words(sk, ell, r_values, j_values):
    total, words = pack_fields(
        [(sk.bits.value, sk.bits.n), (r_values, ell), (j_values, _INDEX_BITS)],
        rows=r_values.shape[0],
    )
    return total, words


def _prf_bits_batch(sk, ell, r_values, oracle):
    """PRF output bits for many block seeds at once, shape (len(r), ell)."""
    count = r_values.shape[0]
    r_rep = np.repeat(r_values, ell)
    j_tile = np.tile(np.arange(ell, dtype=np.uint64), count)
    total, words = _query_words(sk, ell, r_rep, j_tile)
    return oracle.query_batch(total, words).reshape(count, ell)


def _msb_first_bits(values, width):
    shifts = np.arange(width - 1, -1, -1, dtype=np.uint64)
    return ((values[:, None] >> shifts[None, :]) & np.uint64(1)).astype(np.uint8)


def encode(params, sk, seed, oracle):
    """Fresh codeword: B blocks of (block seed, PRF of block seed)."""
    rng = _rng.generator(seed)
    r = rng.integers(0, 1 << params.ell, size=params.blocks, dtype=np.uint64)
    prf_bits = _prf_bits_batch(sk, params.ell, r, oracle)
    blocks = np.hstack([_msb_first_bits(r, params.ell), prf_bits])
    return BitString.from_bits(blocks.ravel())


def _decode_matrix(params, sk, rows, oracle):
    """Accept flags for a (t, n) bit matrix of candidate codewords."""
    t = rows.shape[0]
    ell, blocks = params.ell, params.blocks
    split = rows.reshape(t * blocks, 2 * ell)
    powers = (1 << np.arange(ell - 1, -1, -1, dtype=np.int64)).astype(np.int64)
    r_values = (split[:, :ell].astype(np.int64) @ powers).astype(np.uint64)
    prf_bits = _prf_bits_batch(sk, ell, r_values, oracle)
    good = np.all(prf_bits == split[:, ell:], axis=1).reshape(t, blocks)
    return good.any(axis=1)


def decode(params, sk, x, oracle):
    """Accept iff some block's second half is the PRF of its first half."""
    if len(x) != params.n:
        raise ValueError(f"expected {params.n} bits, got {len(x)}")
    return bool(_decode_matrix(params, sk, x.to_bits()[None, :], oracle)[0])


def closed_form_completeness(rho, ell, blocks):
    """1 - (1 - ((1+rho)/2)^(2 ell))^B, the any-block-survives probability."""
    if not 0 <= rho <= 1:
        raise ValueError("rho must be in [0, 1]")
    p_block = ((1 + rho) / 2) ** (2 * ell)
    if p_block >= 1:
        return 1.0
    return -math.expm1(blocks * math.log1p(-p_block))


def closed_form_soundness_bound(ell, blocks):
    """Union bound B * 2^(-ell) on the false-accept rate.

    The negligible PRF-security term is dropped; under the simulated
    oracle the PRF is exact, so nothing is lost here. Values above 1
    are returned as-is: a vacuous bound is part of the story.
    """
    return blocks * 2.0 ** (-ell)


class PrfPrcScheme(PrcScheme):
    """Scheme adapter around the block construction."""

    def __init__(self, params):
        self.params = params
        self.security_param = params.lam
        self.codeword_len = params.n
        self.key_len = params.lam
        self.query_bound = params.blocks * params.ell

    @property
    def name(self):
        p = self.params
        return f"prf[lam={p.lam},ell={p.ell},B={p.blocks}]"

    def keygen(self, seed):
        return SecretKey(BitString.random(self.params.lam, _rng.generator(seed)))

    def encode(self, sk, seed, oracle):
        return encode(self.params, sk, seed, oracle)

    def decode(self, sk, x, seed, oracle):
        return decode(self.params, sk, x, oracle)

    def decode_many(self, sk, xs, seed, oracle):
        return _decode_matrix(self.params, sk, xs, oracle)

    def heavy_escape(self, sk, tau, constraints):
        """Exact heavy-set coverage check.

        On a uniform input every block seed is uniform, so each of the
        2^ell seeds appears in some block with the same probability
        p_hit = 1 - (1 - 2^(-ell))^B, and a seed's ell index queries are
        always issued together. The tau-heavy set is therefore all of
        them when p_hit >= tau and empty otherwise, and coverage reduces
        to counting distinct block seeds in the learned set.
        """
        p = self.params
        p_hit = -math.expm1(p.blocks * math.log1p(-(2.0**-p.ell)))
        if p_hit < tau:
            return False
        packed = constraints.packed_values()
        if packed is None:
            seen = {
                (q.value >> _INDEX_BITS) & ((1 << p.ell) - 1)
                for q, _ in constraints.items()
                if q.n == p.lam + p.ell + _INDEX_BITS
            }
            return len(seen) < (1 << p.ell)
        bitlen, keys = packed
        if bitlen != p.lam + p.ell + _INDEX_BITS:
            return True
        r_vals = (keys >> np.uint64(_INDEX_BITS)) & np.uint64((1 << p.ell) - 1)
        return int(np.unique(r_vals).size) < (1 << p.ell)
