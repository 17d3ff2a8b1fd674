import math
from collections import Counter

import pytest
from scipy import stats

from truzz.byte_analysis import MutationMask
from truzz.mutation import (
    Rng,
    draw_op_count,
    mutate,
    select_byte,
)

N_DRAWS = 100_000


def frequencies(mask, length, n=N_DRAWS, seed=7):
    rng = Rng(seed)
    counts = Counter(select_byte(mask, rng, length) for _ in range(n))
    return [counts[i] / n for i in range(length)]


class TestSelectByte:
    def test_no_mask_is_uniform(self):
        length = 8
        freqs = frequencies(None, length)
        p = 1 / length
        sigma = math.sqrt(p * (1 - p) / N_DRAWS)
        for f in freqs:
            assert abs(f - p) < 3 * sigma + 1e-12

    def test_all_ones_mask_matches_no_mask_stream(self):
        # identical rng state evolution: the masked stream must replay the
        # unmasked one exactly, not just statistically
        mask = MutationMask(probability=[1.0] * 8)
        a, b = Rng(3), Rng(3)
        picks_masked = [select_byte(mask, a, 8) for _ in range(1000)]
        picks_plain = [select_byte(None, b, 8) for _ in range(1000)]
        assert picks_masked == picks_plain
        assert a.random() == b.random()

    def test_protected_byte_rate(self):
        # [1.0, 0.05]: accepted mass is 1.0 vs 0.05
        mask = MutationMask(probability=[1.0, 0.05])
        freqs = frequencies(mask, 2)
        assert abs(freqs[1] - 0.05 / 1.05) < 0.01
        assert abs(freqs[0] - 1.0 / 1.05) < 0.01

    def test_constant_floor_mask_is_uniform(self):
        # all entries at the floor: accepted draws are uniform, plus the
        # retry-cap fallback routes a (0.95)**64 tail to the argmax index
        mask = MutationMask(probability=[0.05] * 4)
        freqs = frequencies(mask, 4)
        fallback = 0.95 ** (16 * 4)
        assert abs(freqs[0] - ((1 - fallback) * 0.25 + fallback)) < 0.01
        for f in freqs[1:]:
            assert abs(f - (1 - fallback) * 0.25) < 0.01

    def test_chi_square_against_mask_distribution(self):
        # acceptance frequencies should match the normalized mask within a
        # chi-square test at alpha = 1e-3
        rng = Rng(11)
        for probs in (
            [1.0, 0.5, 0.25, 0.05],
            [0.05] * 8,
            [1.0] * 3 + [0.05] * 29,
        ):
            mask = MutationMask(probability=list(probs))
            total = sum(probs)
            counts = Counter(
                select_byte(mask, rng, len(probs)) for _ in range(N_DRAWS)
            )
            observed = [counts[i] for i in range(len(probs))]
            expected = [N_DRAWS * p / total for p in probs]
            _, pvalue = stats.chisquare(observed, expected)
            assert pvalue > 1e-3, (probs, pvalue)

    def test_deterministic_for_seed(self):
        mask = MutationMask(probability=[1.0, 0.3, 0.7])
        runs = [
            [select_byte(mask, Rng(42), 3) for _ in range(50)] for _ in range(2)
        ]
        assert runs[0] == runs[1]


class TestDrawOpCount:
    def test_powers_of_two_up_to_64(self):
        rng = Rng(0)
        seen = {draw_op_count(rng) for _ in range(2000)}
        assert seen == {1, 2, 4, 8, 16, 32, 64}


class TestMutate:
    def test_preserves_length(self):
        rng = Rng(1)
        seed = bytes(range(32))
        for _ in range(200):
            assert len(mutate(seed, None, rng, draw_op_count(rng))) == 32

    def test_deterministic_for_seed(self):
        seed = bytes(16)
        out1 = [mutate(seed, None, Rng(9), 8) for _ in range(1)]
        out2 = [mutate(seed, None, Rng(9), 8) for _ in range(1)]
        assert out1 == out2

    def test_single_op_changes_at_most_one_byte(self):
        rng = Rng(5)
        seed = bytes(8)
        for _ in range(500):
            mutant = mutate(seed, None, rng, 1)
            diff = [i for i in range(8) if mutant[i] != seed[i]]
            assert len(diff) <= 1

    def test_protected_byte_rarely_touched(self):
        # validation byte guarded at the floor; functional byte wide open
        mask = MutationMask(probability=[0.05, 1.0, 1.0, 1.0])
        seed = b"\x41\x00\x00\x00"
        rng = Rng(2)
        touched = sum(
            mutate(seed, mask, rng, 1)[0] != seed[0] for _ in range(20_000)
        )
        # expected touch rate ~ (0.05/3.05) * P(op changes byte) < 1.7%
        assert touched / 20_000 < 0.02

    def test_zero_ops_rejected(self):
        with pytest.raises(ValueError):
            mutate(b"ab", None, Rng(0), 0)

    def test_mask_length_matches_seed(self):
        mask = MutationMask(probability=[1.0, 0.5])
        out = mutate(b"xy", mask, Rng(0), 4)
        assert len(out) == 2
