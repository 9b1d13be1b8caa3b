"""Packing of structured oracle queries into uint64 word matrices.

A query value is right-aligned: word 0 holds its least significant 64
bits. Field packing concatenates left to right, so the first field ends
up in the most significant position, matching integer concatenation
(a << width_b) | b.
"""

import numpy as np

_M64 = (1 << 64) - 1


def words_for(bitlen):
    """Number of 64-bit words used to carry a value of bitlen bits."""
    return max(1, -(-bitlen // 64))


def value_to_words(value, bitlen):
    """Right-aligned little-endian word list for a python int."""
    if not 0 <= value < (1 << max(bitlen, 1)):
        raise ValueError(f"value does not fit in {bitlen} bits")
    return [(value >> (64 * k)) & _M64 for k in range(words_for(bitlen))]


def pack_fields(fields, rows=None):
    """Pack (values, width) fields into a (rows, W) uint64 matrix.

    values may be a python int (broadcast) or a uint64 array; width is
    the field's bit width, at most 64. Returns (bitlen, words).
    """
    total = 0
    for values, width in fields:
        if not 1 <= width <= 64:
            raise ValueError(f"field width must be in 1..64, got {width}")
        total += width
        if rows is None and isinstance(values, np.ndarray):
            rows = values.shape[0]
    if rows is None:
        rows = 1
    out = np.zeros((rows, words_for(total)), dtype=np.uint64)
    offset = total
    for values, width in fields:
        offset -= width
        if isinstance(values, np.ndarray):
            vals = values.astype(np.uint64, copy=False)
            if width < 64 and vals.size and int(vals.max()) >= (1 << width):
                raise ValueError(f"field value does not fit in {width} bits")
        else:
            if not 0 <= values < (1 << width):
                raise ValueError(f"field value does not fit in {width} bits")
            vals = np.uint64(values)
        lo_word, shift = divmod(offset, 64)
        out[:, lo_word] |= vals << np.uint64(shift)
        if shift and shift + width > 64:
            out[:, lo_word + 1] |= vals >> np.uint64(64 - shift)
    if offset != 0:
        raise AssertionError("field widths inconsistent")
    return total, out


def prepend_words(prefix_value, prefix_len, bitlen, words):
    """Prefix every packed row with a fixed value of prefix_len bits.

    Returns (new_bitlen, new_words) where each row's value becomes
    (prefix << bitlen) | value. The prefix may exceed 64 bits.
    """
    total = prefix_len + bitlen
    out = np.zeros((words.shape[0], words_for(total)), dtype=np.uint64)
    out[:, : words.shape[1]] = words
    for i, pw in enumerate(value_to_words(prefix_value, prefix_len)):
        width = min(64, prefix_len - 64 * i)
        lo_word, shift = divmod(bitlen + 64 * i, 64)
        out[:, lo_word] |= np.uint64(pw << shift & _M64)
        if shift and shift + width > 64:
            out[:, lo_word + 1] |= np.uint64(pw >> (64 - shift))
    return total, out
