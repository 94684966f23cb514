import math
import random

import numpy as np
import pytest

from digitfree import digit_sets
from digitfree.digit_sets import (SetDescriptor, enumerate_set, from_digits,
                                  is_palindrome, member_count, reverse, to_digits)

# independent oracles built on numpy's base_repr string rendering


def digits_str(n: int, b: int) -> str:
    return np.base_repr(n, base=b)


def reverse_oracle(n: int, b: int) -> int:
    return int(digits_str(n, b)[::-1], base=b)


def palindrome_oracle(n: int, b: int) -> bool:
    s = digits_str(n, b)
    return s == s[::-1]


def members_oracle(s: SetDescriptor, x: int) -> list[int]:
    out = []
    for n in range(x):
        if math.gcd(n, s.coprime_to) != 1:
            continue
        st = digits_str(n, s.base)
        if s.kind == "palindromes":
            if st != st[::-1]:
                continue
            if s.odd_length_only and len(st) % 2 == 0:
                continue
        elif s.kind == "missing_digit":
            if any(int(c, s.base) in s.excluded for c in st):
                continue
        elif s.kind == "reversible_pairs":
            if math.gcd(int(st[::-1], s.base), s.coprime_to) != 1:
                continue
        out.append(n)
    return out


def test_to_digits_examples():
    assert to_digits(13, 2) == [1, 0, 1, 1]
    assert to_digits(0, 7) == [0]
    assert to_digits(121, 10) == [1, 2, 1]


def test_to_digits_rejects_bad_input():
    with pytest.raises(ValueError):
        to_digits(-1, 10)
    with pytest.raises(ValueError):
        to_digits(5, 1)
    with pytest.raises(ValueError):
        from_digits([0, 7], 7)


@pytest.mark.parametrize("b", range(2, 17))
def test_digit_round_trip(b):
    rng = random.Random(100 + b)
    values = list(range(2000)) + [rng.randrange(10**6) for _ in range(2000)]
    for n in values:
        assert from_digits(to_digits(n, b), b) == n


def test_reverse_examples():
    assert reverse(13, 2) == reverse_oracle(13, 2) == 11
    assert reverse(121, 10) == 121
    assert reverse(10, 10) == 1


@pytest.mark.parametrize("b", [2, 3, 10])
def test_reverse_matches_oracle_and_palindrome_fixed_points(b):
    for n in range(10**4):
        r = reverse(n, b)
        assert r == reverse_oracle(n, b)
        assert reverse(r, b) <= n
        assert (r == n) == is_palindrome(n, b) == palindrome_oracle(n, b)


def test_single_digits_are_palindromes():
    for b in range(2, 17):
        for n in range(b):
            assert is_palindrome(n, b)
    assert is_palindrome(121, 10)
    assert not is_palindrome(10, 10)


def test_enumerate_binary_palindromes_below_16():
    s = SetDescriptor.palindromes(2)
    assert list(enumerate_set(s, 16)) == [0, 1, 3, 5, 7, 9, 15]


def test_missing_digit_count_below_100():
    s = SetDescriptor.missing_digit(10, 0)
    assert member_count(s, 100) == 90


def test_odd_palindromes_count_identity():
    s = SetDescriptor.palindromes(10, odd_length_only=True)
    assert member_count(s, 10**5) == 1000  # 10 + 90 + 900
    # the identity b + sum (b-1) b^l for x = b^(2L+1)
    for b in (2, 3, 7):
        for L in (1, 2, 3):
            got = member_count(SetDescriptor.palindromes(b, odd_length_only=True),
                               b ** (2 * L + 1))
            want = b + sum((b - 1) * b**l for l in range(1, L + 1))
            assert got == want


def test_stratum_sizes_match_formula():
    for b in (2, 5, 10):
        for l in (1, 2, 3):
            lo, hi = b ** (2 * l), b ** (2 * l + 1)
            s = SetDescriptor.palindromes(b)
            count = sum(1 for n in enumerate_set(s, hi) if n >= lo)
            assert count == (b - 1) * b**l


DESCRIPTORS = [
    SetDescriptor.all_integers(),
    SetDescriptor.all_integers(coprime_to=6),
    SetDescriptor.palindromes(2),
    SetDescriptor.palindromes(10),
    SetDescriptor.palindromes(10, odd_length_only=True),
    SetDescriptor.palindromes(10, coprime_to=990),
    SetDescriptor.missing_digit(10, 0),
    SetDescriptor.missing_digit(10, 5, coprime_to=10),
    SetDescriptor.missing_digit(5, (1, 3)),
    SetDescriptor.reversible_pairs(3, coprime_to=24),
    SetDescriptor.reversible_pairs(10, coprime_to=990),
]


@pytest.mark.parametrize("s", DESCRIPTORS, ids=lambda s: s.label())
def test_enumeration_matches_brute_filter(s):
    x = 10**4
    got = list(enumerate_set(s, x))
    assert got == members_oracle(s, x)
    assert all(a < b for a, b in zip(got, got[1:]))  # strictly increasing
    assert member_count(s, x) == len(got)


def test_enumeration_small_cutoffs():
    assert list(enumerate_set(SetDescriptor.palindromes(10), 1)) == [0]
    assert list(enumerate_set(SetDescriptor.missing_digit(10, 3), 1)) == [0]
    assert list(enumerate_set(SetDescriptor.missing_digit(10, 0), 1)) == []
    assert list(enumerate_set(SetDescriptor.reversible_pairs(7), 1)) == [0]


def test_rejects_excluding_every_digit():
    with pytest.raises(ValueError):
        SetDescriptor.missing_digit(3, (0, 1, 2))


@pytest.mark.parametrize("b", range(2, 13))
def test_even_length_palindromes_divisible_by_b_plus_1(b):
    s = SetDescriptor.palindromes(b)
    for n in enumerate_set(s, 10**6):
        if len(to_digits(n, b)) % 2 == 0:
            assert n % (b + 1) == 0


def test_reverse_block_matches_scalar():
    arr = np.arange(100, 1000, dtype=np.int64)
    rev = digit_sets.reverse_block(arr, 10, 3)
    for n, r in zip(arr[:50], rev[:50]):
        assert r == reverse_oracle(int(n), 10)


def test_contains_agrees_with_enumeration():
    s = SetDescriptor.missing_digit(10, 5, coprime_to=10)
    members = set(enumerate_set(s, 2000))
    for n in range(2000):
        assert s.contains(n) == (n in members)
