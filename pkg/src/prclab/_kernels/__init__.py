"""Kernel backend selection.

The compiled extension is preferred when importable; the numpy fallback
is bit-identical, so every result in the package is backend-independent.
Set PRCLAB_KERNELS=pure|compiled to force a backend (compiled raises if
the extension is missing), or leave it at auto.
"""

import os

from . import pure as _pure
from .pure import GOLDEN, _mix64_int


def _select_backend():
    choice = os.environ.get("PRCLAB_KERNELS", "auto").lower()
    if choice not in ("auto", "pure", "compiled"):
        raise ValueError(f"PRCLAB_KERNELS must be auto, pure or compiled, got {choice!r}")
    if choice == "pure":
        return _pure
    try:
        from . import _core
    except ImportError:
        if choice == "compiled":
            raise
        return _pure
    return _core


_impl = _select_backend()
BACKEND = "pure" if _impl is _pure else "compiled"

oracle_bits = _impl.oracle_bits
fwht_inplace = _impl.fwht_inplace


def oracle_bit(key0, key1, bitlen, words):
    """Scalar response bit; words is an iterable of python ints (low word first).

    Matches oracle_bits on the packed row exactly.
    """
    m64 = (1 << 64) - 1
    s = _mix64_int(key0 ^ _mix64_int(key1 ^ (GOLDEN * (bitlen + 1) & m64)))
    for k, w in enumerate(words):
        s = _mix64_int(s ^ w ^ ((k + 1) * GOLDEN & m64))
    s = _mix64_int(s ^ key1)
    return int(s & 1)
