"""Havoc-style input mutation gated by a per-byte probability mask.

Byte positions are drawn uniformly and accepted or rejected against the
mask (rejection sampling), so the long-run frequency of mutating byte i is
proportional to mask.probability[i]. All operators preserve length: the
fitness map for a seed is positional and must stay valid for every input
derived from it.
"""

from __future__ import annotations

import random
from typing import Optional

from .byte_analysis import MutationMask

INTERESTING_BYTES = (0x00, 0xFF, 0x7F, 0x80, 0x01)
ARITH_MAX = 35
# Rejection-sampling retries before falling back to the most mutable byte.
RETRY_FACTOR = 16
OP_COUNT_MAX_EXP = 6  # ops per input drawn as 2**k, k in [0, OP_COUNT_MAX_EXP]


class Rng(random.Random):
    """Deterministic pseudo-random stream, seedable from a 64-bit value."""


def select_byte(mask: Optional[MutationMask], rng: random.Random, length: int) -> int:
    """Draw a byte index, accepting with the mask's probability.

    A mask entry of 1.0 accepts without consuming an extra random draw, so
    an all-ones mask is stream-identical to no mask at all. After
    RETRY_FACTOR * length rejections the most mutable index is returned.
    """
    randrange = rng.randrange
    if mask is None:
        return randrange(length)
    probs = mask.probability
    rand = rng.random
    for _ in range(RETRY_FACTOR * length):
        idx = randrange(length)
        p = probs[idx]
        if p >= 1.0 or rand() < p:
            return idx
    return mask.argmax


def draw_op_count(rng: random.Random) -> int:
    """Havoc-style stacking: 2**k operations, k uniform in [0, 6]."""
    return 1 << rng.randrange(OP_COUNT_MAX_EXP + 1)


def mutate(
    seed: bytes,
    mask: Optional[MutationMask],
    rng: random.Random,
    ops_per_input: int,
) -> bytes:
    """Apply ``ops_per_input`` random operators at mask-gated positions."""
    if ops_per_input < 1:
        raise ValueError(f"ops_per_input must be >= 1, got {ops_per_input}")
    data = bytearray(seed)
    length = len(data)
    randrange = rng.randrange
    for _ in range(ops_per_input):
        idx = select_byte(mask, rng, length)
        op = randrange(4)
        if op == 0:  # BIT_FLIP
            data[idx] ^= 1 << randrange(8)
        elif op == 1:  # BYTE_RANDOM
            data[idx] = randrange(256)
        elif op == 2:  # BYTE_ARITH
            delta = randrange(1, ARITH_MAX + 1)
            if randrange(2):
                delta = -delta
            data[idx] = (data[idx] + delta) & 0xFF
        else:  # INTERESTING_BYTE
            data[idx] = INTERESTING_BYTES[randrange(5)]
    return bytes(data)
