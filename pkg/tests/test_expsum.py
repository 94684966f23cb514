import cmath
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from digitfree import expsum
from digitfree.digit_sets import SetDescriptor
from digitfree.expsum import (brute_transform, dirichlet_kernel, dirichlet_kernel_deriv,
                              missing_digit_transform, palindrome_envelope,
                              palindrome_envelope_norm, palindrome_transform,
                              reversible_transform, set_transform_product)


def loop_sum(values, t) -> complex:
    """Plain python reference sum of e(n*t)."""
    return sum(cmath.exp(2j * math.pi * n * float(t)) for n in values)


def test_kernel_at_zero_and_half():
    for b in (2, 5, 10, 36):
        assert abs(dirichlet_kernel(b, 0) - b) < 1e-12
        assert abs(dirichlet_kernel(b, 1) - b) < 1e-12
    assert abs(dirichlet_kernel(10, Fraction(1, 2))) < 1e-12


def test_kernel_two_term():
    v = dirichlet_kernel(2, Fraction(1, 3))
    assert abs(v - (1 + cmath.exp(2j * math.pi / 3))) < 1e-14
    assert abs(abs(v) - 1.0) < 1e-14


@pytest.mark.parametrize("b", [2, 3, 10])
def test_kernel_matches_loop_sum(b):
    rng = random.Random(7)
    for _ in range(200):
        t = rng.random()
        assert abs(dirichlet_kernel(b, t) - loop_sum(range(b), t)) < 1e-11


def test_kernel_near_singularity():
    for t in (1e-12, 1 - 1e-12, 3 + 1e-13, -1e-12):
        v = dirichlet_kernel(7, t)
        assert abs(v - loop_sum(range(7), t)) < 1e-9
        assert np.isfinite(v.real) and np.isfinite(v.imag)


def test_kernel_deriv_finite_difference():
    h = 1e-7
    for t in (0.123, 0.734, 0.499):
        fd = (dirichlet_kernel(9, t + h) - dirichlet_kernel(9, t - h)) / (2 * h)
        dv = dirichlet_kernel_deriv(9, t)
        assert abs(dv - fd) < 1e-4 * max(abs(dv), 1.0)


def test_kernel_array_agrees_with_scalar():
    t = np.linspace(0, 1, 257)
    arr = dirichlet_kernel(10, t)
    for i in (0, 17, 100, 256):
        assert abs(arr[i] - dirichlet_kernel(10, float(t[i]))) < 1e-12


def test_palindrome_transform_counts():
    for b in (2, 5, 10):
        for l in (1, 2, 3):
            assert abs(palindrome_transform(b, 2 * l + 1, 0) - (b - 1) * b**l) < 1e-9
    assert abs(palindrome_transform(10, 3, 0) - 90) < 1e-9
    # even strata count (b-1)*b^(l-1)
    assert abs(palindrome_transform(10, 4, 0) - 90) < 1e-9
    assert abs(palindrome_transform(10, 1, 0) - 10) < 1e-12


def test_palindrome_five_bit_at_half():
    # the four 5-bit palindromes 17, 21, 27, 31 are all odd, so each term is -1
    assert abs(palindrome_transform(2, 5, Fraction(1, 2)) - (-4)) < 1e-12


@pytest.mark.parametrize("b,n_digits", [(2, 3), (2, 6), (3, 5), (5, 4), (10, 3)])
def test_palindrome_product_vs_loop(b, n_digits):
    from digitfree.digit_sets import _palindrome_length_block
    members = _palindrome_length_block(b, n_digits)
    rng = random.Random(n_digits * b)
    for _ in range(25):
        t = Fraction(rng.randrange(10**4), 10**4)
        direct = loop_sum(members.tolist(), t)
        assert abs(palindrome_transform(b, n_digits, t) - direct) < 1e-9


def test_envelope_degenerate_and_bound():
    for b in (3, 10):
        for t in (0.0, 0.31, Fraction(2, 7)):
            assert palindrome_envelope(b, 0, t) == 1
            assert palindrome_envelope(b, 1, t) == 1
    rng = random.Random(5)
    for b in (3, 10):
        for l in (2, 3, 5):
            for _ in range(50):
                assert abs(palindrome_envelope(b, l, rng.random())) <= b ** (l - 1) + 1e-9


def test_envelope_deriv_finite_difference():
    # step must sit well under the 1/(b + b^(2l-1)) oscillation scale:
    # 1e-7 is fine for (3,3); (10,3) oscillates at 1e-5 and needs 1e-10
    for b, l, h in ((3, 3, 1e-7), (10, 3, 1e-10)):
        for t in (0.1234, 0.678):
            fd = (palindrome_envelope(b, l, t + h)
                  - palindrome_envelope(b, l, t - h)) / (2 * h)
            dv = expsum.palindrome_envelope_deriv(b, l, t)
            assert abs(dv - fd) < 1e-4 * max(abs(dv), 1.0)


def test_missing_digit_counts_and_single_digit():
    assert abs(missing_digit_transform(10, 5, 3, 0) - 9**3) < 1e-9
    for t in (0.17, Fraction(3, 11)):
        one = missing_digit_transform(10, 4, 1, t)
        expect = dirichlet_kernel(10, t) - cmath.exp(2j * math.pi * 4 * float(Fraction(t) % 1 if isinstance(t, Fraction) else t))
        assert abs(one - expect) < 1e-10


def test_missing_digit_vs_eight_strings():
    vals = [n for n in range(27) if 1 not in (n % 3, n // 3 % 3, n // 9 % 3)]
    assert len(vals) == 8
    direct = loop_sum(vals, 0.3)
    assert abs(missing_digit_transform(3, 1, 3, 0.3) - direct) < 1e-12


def test_reversible_basics():
    assert abs(reversible_transform(3, 4, 0, 0) - 1) < 1e-14
    for b in (2, 7):
        for args in ((0.3, 0.1), (Fraction(1, 5), Fraction(2, 7))):
            one_digit = reversible_transform(b, 1, *args)
            a, be = (float(v) for v in args)
            expect = dirichlet_kernel(b, a - be) / b
            assert abs(one_digit - expect) < 1e-12


def test_reversible_vs_brute_81_terms():
    got = reversible_transform(3, 4, 0.21, 0.47)
    brute = expsum.reversible_brute(3, 4, 0.21, 0.47)
    assert abs(got - brute) < 1e-12


def test_periodicity():
    rng = random.Random(3)
    for _ in range(50):
        t = rng.random()
        assert abs(palindrome_transform(7, 5, t) - palindrome_transform(7, 5, t + 1)) < 1e-9
        assert abs(missing_digit_transform(7, 2, 4, t)
                   - missing_digit_transform(7, 2, 4, t + 1)) < 1e-9
        assert abs(dirichlet_kernel(12, t) - dirichlet_kernel(12, t + 1)) < 1e-10


def test_conjugate_symmetry():
    for den in (7, 64, 1000):
        for num in (1, 3, den - 1):
            t = Fraction(num, den)
            for fn in (lambda u: palindrome_transform(5, 5, u),
                       lambda u: missing_digit_transform(5, 2, 4, u),
                       lambda u: dirichlet_kernel(30, u)):
                assert abs(fn(1 - t) - fn(t).conjugate()) < 1e-11


def test_brute_transform_trivia():
    s = SetDescriptor.all_integers()
    sample = brute_transform(s, 100, 0)
    assert abs(sample.value - 100) < 1e-12
    assert sample.normalization == 100

    s = SetDescriptor.palindromes(10, odd_length_only=True)
    sample = brute_transform(s, 10**5, 0)
    assert abs(sample.value - 1000) < 1e-9

    rng = random.Random(11)
    for _ in range(20):
        t = rng.random()
        sample = brute_transform(s, 10**4, t)
        assert abs(sample.value) <= sample.normalization * (1 + 1e-12)


def test_brute_transform_guard():
    with pytest.raises(ValueError):
        brute_transform(SetDescriptor.all_integers(), 2 * 10**7, 0.1)


def test_brute_exact_rational_reduction():
    s = SetDescriptor.palindromes(3)
    t = Fraction(5, 17)
    got = brute_transform(s, 3**6, t).value
    from digitfree.digit_sets import enumerate_set
    direct = loop_sum(list(enumerate_set(s, 3**6)), t)
    assert abs(got - direct) < 1e-10


def test_set_transform_product_matches_brute():
    cases = [
        (SetDescriptor.all_integers(), 1000),
        (SetDescriptor.palindromes(10), 10**4),
        (SetDescriptor.palindromes(3, odd_length_only=True), 3**5),
        (SetDescriptor.missing_digit(10, 5), 10**4),
        (SetDescriptor.missing_digit(10, 0), 10**3),
        (SetDescriptor.reversible_pairs(5), 5**4),
    ]
    rng = random.Random(23)
    for s, x in cases:
        for _ in range(10):
            t = Fraction(rng.randrange(10**4), 10**4)
            prod = set_transform_product(s, x, t)
            assert prod is not None
            brute = brute_transform(s, x, t)
            assert abs(prod - brute.value) < 1e-9 * max(brute.normalization, 1.0)


def test_set_transform_product_unavailable_when_filtered():
    s = SetDescriptor.palindromes(10, coprime_to=990)
    assert set_transform_product(s, 1000, 0.1) is None
    assert set_transform_product(SetDescriptor.palindromes(10), 999, 0.1) is None


def test_transform_values_finite():
    rng = random.Random(9)
    for _ in range(300):
        t = rng.random()
        for v in (palindrome_transform(11, 6, t),
                  missing_digit_transform(9, 8, 5, t),
                  reversible_transform(4, 5, t, rng.random())):
            assert np.isfinite(v.real) and np.isfinite(v.imag)


def test_parseval_identity_small():
    # midpoint rule with N > 2*max frequency integrates |S|^2 exactly
    for s, x in [(SetDescriptor.all_integers(), 16),
                 (SetDescriptor.palindromes(3), 81),
                 (SetDescriptor.missing_digit(5, 4), 125)]:
        count = sum(1 for _ in expsum.digit_sets.enumerate_set(s, x))
        nodes = 64 * x
        t = (np.arange(nodes) + 0.5) / nodes
        sv = set_transform_product(s, x, t)
        quad = float(np.mean(np.abs(sv) ** 2))
        assert abs(quad - count) <= 0.01 * count


def test_decreasing_normalized_envelope_quick():
    rng = random.Random(31)
    for b in (2, 10):
        for _ in range(200):
            l = rng.randrange(2, 9)
            t = Fraction(rng.randrange(1 << 53), 1 << 53)
            lhs = abs(palindrome_envelope_norm(b, l, t))
            rhs = abs(palindrome_envelope_norm(b, l - 1, b * t))
            assert lhs <= rhs + 1e-12


def test_decreasing_missing_quick():
    rng = random.Random(37)
    for _ in range(300):
        l = rng.randrange(2, 9)
        k = rng.randrange(1, l)
        t = Fraction(rng.randrange(1 << 53), 1 << 53)
        fy = abs(missing_digit_transform(10, 5, l, t)) / 9**l
        fx = abs(missing_digit_transform(10, 5, k, t)) / 9**k
        assert fy <= fx + 1e-12


def test_decreasing_reversible_quick():
    rng = random.Random(41)
    for _ in range(200):
        l = rng.randrange(2, 9)
        k = rng.randrange(1, l)
        alpha = Fraction(rng.randrange(1 << 53), 1 << 53)
        beta = Fraction(rng.randrange(1 << 53), 1 << 53)
        fy = abs(reversible_transform(3, l, alpha, beta))
        fx = abs(reversible_transform(3, k, alpha * 3 ** (l - k), beta))
        assert fy <= fx + 1e-12
