"""Exponential-sum transforms of digit-defined sets.

Every family handled here factors over digit positions, so each transform is
evaluated as a product of O(number of digits) geometric sums instead of a sum
over set members.  The frequency argument may be a float, an exact rational
(fractions.Fraction or int), or a numpy array:

* rational inputs are reduced mod 1 in integer arithmetic before any floating
  evaluation, so values at points a/d are exact up to one rounding per factor
  (shared factors of two related transforms then agree bit-for-bit, which the
  decreasing-property checks rely on);
* float and array inputs are reduced with fmod; the reduction loses about
  eps * multiplier * |t| of phase accuracy, fine for quadrature but not for
  1e-12-level pointwise comparisons at large digit counts.

`brute_transform` performs direct member-by-member summation and is the oracle
the product formulas are tested against.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import digit_sets
from .digit_sets import SetDescriptor

_TWO_PI = 2.0 * math.pi
_SINGULAR_EPS = 1e-9
BRUTE_MEMBER_GUARD = 10**7


def e(t):
    """exp(2*pi*i*t) for scalars or arrays."""
    if isinstance(t, np.ndarray):
        return np.exp(2j * np.pi * t)
    return cmath.exp(2j * math.pi * t)


def _frac_mult(mult: int, t) -> float:
    """Fractional part of mult*t for scalar t; exact when t is rational."""
    if isinstance(t, (Fraction, int)):
        f = Fraction(t)
        num = (mult * f.numerator) % f.denominator
        return float(Fraction(num, f.denominator))
    return math.fmod(mult * t, 1.0)


def _frac_combine(m_alpha: int, alpha, m_beta: int, beta) -> float:
    """Fractional part of m_alpha*alpha - m_beta*beta; exact for rationals."""
    if isinstance(alpha, (Fraction, int)) and isinstance(beta, (Fraction, int)):
        f = Fraction(alpha) * m_alpha - Fraction(beta) * m_beta
        return float(Fraction(f.numerator % f.denominator, f.denominator))
    return math.fmod(m_alpha * alpha - m_beta * beta, 1.0)


def _kernel_scalar(b: int, y: float) -> complex:
    """sum_{n<b} e(n*y) at a single reduced phase y."""
    d = abs(y - round(y))
    if d < _SINGULAR_EPS:
        # explicit sum; the ratio form cancels catastrophically near integers
        return sum(cmath.exp(2j * math.pi * n * y) for n in range(b))
    w = cmath.exp(2j * math.pi * y)
    return (w**b - 1.0) / (w - 1.0)


def _kernel_array(b: int, y: np.ndarray) -> np.ndarray:
    ph = np.exp(2j * np.pi * y)
    out = np.empty(y.shape, dtype=complex)
    near = np.abs(y - np.round(y)) < _SINGULAR_EPS
    safe = ~near
    out[safe] = (ph[safe] ** b - 1.0) / (ph[safe] - 1.0)
    if near.any():
        ys = y[near]
        acc = np.zeros(ys.shape, dtype=complex)
        for n in range(b):
            acc += np.exp(2j * np.pi * n * ys)
        out[near] = acc
    return out


def _kernel_deriv_scalar(b: int, y: float) -> complex:
    d = abs(y - round(y))
    if d < _SINGULAR_EPS:
        return sum(2j * math.pi * n * cmath.exp(2j * math.pi * n * y) for n in range(b))
    w = cmath.exp(2j * math.pi * y)
    wb = w**b
    den = w - 1.0
    return 2j * math.pi * (b * wb * den - (wb - 1.0) * w) / (den * den)


def _kernel_deriv_array(b: int, y: np.ndarray) -> np.ndarray:
    out = np.empty(y.shape, dtype=complex)
    near = np.abs(y - np.round(y)) < _SINGULAR_EPS
    safe = ~near
    w = np.exp(2j * np.pi * y[safe])
    wb = w**b
    den = w - 1.0
    out[safe] = 2j * np.pi * (b * wb * den - (wb - 1.0) * w) / (den * den)
    if near.any():
        ys = y[near]
        acc = np.zeros(ys.shape, dtype=complex)
        for n in range(b):
            acc += 2j * np.pi * n * np.exp(2j * np.pi * n * ys)
        out[near] = acc
    return out


def dirichlet_kernel(m: int, t):
    """sum_{0<=n<m} e(n*t); equals m at integer t (removable singularity)."""
    if isinstance(t, np.ndarray):
        return _kernel_array(m, np.mod(t, 1.0))
    return _kernel_scalar(m, _frac_mult(1, t))


def dirichlet_kernel_deriv(m: int, t):
    """d/dt of dirichlet_kernel(m, t) = 2*pi*i * sum n*e(n*t)."""
    if isinstance(t, np.ndarray):
        return _kernel_deriv_array(m, np.mod(t, 1.0))
    return _kernel_deriv_scalar(m, _frac_mult(1, t))


# ---------------------------------------------------------------------------
# product machinery
#
# A factored transform is a list of (multiplier, eval, eval_deriv) triples
# where eval(y)/eval_deriv(y) act on the reduced phase y = frac(multiplier*t).
# ---------------------------------------------------------------------------


def _eval_factors(factors, t):
    vals = []
    if isinstance(t, np.ndarray):
        for mult, fn, _ in factors:
            vals.append(fn(np.mod(mult * t, 1.0)))
    else:
        for mult, fn, _ in factors:
            vals.append(fn(_frac_mult(mult, t)))
    return vals


def _product(vals):
    out = vals[0]
    for v in vals[1:]:
        out = out * v
    return out


def _product_deriv(factors, t):
    """Product rule via prefix/suffix products (no divisions, zero-safe)."""
    if isinstance(t, np.ndarray):
        vals = [fn(np.mod(m * t, 1.0)) for m, fn, _ in factors]
        ders = [m * dfn(np.mod(m * t, 1.0)) for m, _, dfn in factors]
    else:
        vals = [fn(_frac_mult(m, t)) for m, fn, _ in factors]
        ders = [m * dfn(_frac_mult(m, t)) for m, _, dfn in factors]
    k = len(vals)
    if k == 0:
        return 0.0 * (t if isinstance(t, np.ndarray) else 0.0)
    prefix = [None] * k
    suffix = [None] * k
    acc = 1.0
    for i in range(k):
        prefix[i] = acc
        acc = acc * vals[i]
    acc = 1.0
    for i in reversed(range(k)):
        suffix[i] = acc
        acc = acc * vals[i]
    total = prefix[0] * 0.0
    for i in range(k):
        total = total + prefix[i] * ders[i] * suffix[i]
    return total


def _pal_factors(b: int, n_digits: int):
    """Factored form of the exact-length palindrome transform."""
    if n_digits < 1:
        raise ValueError("digit count must be >= 1")
    kern = lambda y: _kernel_array(b, y) if isinstance(y, np.ndarray) else _kernel_scalar(b, y)
    dkern = lambda y: (_kernel_deriv_array(b, y) if isinstance(y, np.ndarray)
                       else _kernel_deriv_scalar(b, y))
    kern_m1 = lambda y: kern(y) - 1.0
    if n_digits == 1:
        return [(1, kern, dkern)]
    l, odd = divmod(n_digits, 2)
    factors = [(1 + b ** (n_digits - 1), kern_m1, dkern)]
    if odd:
        factors.append((b**l, kern, dkern))
        factors += [(b**i + b ** (2 * l - i), kern, dkern) for i in range(1, l)]
    else:
        factors += [(b**i + b ** (2 * l - 1 - i), kern, dkern) for i in range(1, l)]
    return factors


def palindrome_transform(b: int, n_digits: int, t):
    """Exponential sum over base-b palindromes with exactly n_digits digits.

    Evaluated by the product factorization over the free digit positions
    (mirrored pairs contribute one geometric sum each); cost is O(n_digits)
    kernel evaluations.  n_digits = 1 covers the single-digit stratum
    {0, ..., b-1} including 0.
    """
    return _product(_eval_factors(_pal_factors(b, n_digits), t))


def palindrome_transform_deriv(b: int, n_digits: int, t):
    return _product_deriv(_pal_factors(b, n_digits), t)


def _envelope_factors(b: int, l: int):
    kern = lambda y: _kernel_array(b, y) if isinstance(y, np.ndarray) else _kernel_scalar(b, y)
    dkern = lambda y: (_kernel_deriv_array(b, y) if isinstance(y, np.ndarray)
                       else _kernel_deriv_scalar(b, y))
    return [(b**i + b ** (2 * l - i), kern, dkern) for i in range(1, l)]


def palindrome_envelope(b: int, l: int, t):
    """Inner mirrored-pair product dominating the (2l+1)-digit palindrome sum.

    Equals 1 for l <= 1.  Modulus is at most b**(l-1), and replacing l by l-1
    while scaling the argument by b can only increase the normalized modulus
    (the decreasing property the sieve argument needs).
    """
    if l < 0:
        raise ValueError("l must be >= 0")
    if l <= 1:
        return np.ones_like(t, dtype=complex) if isinstance(t, np.ndarray) else 1.0 + 0.0j
    return _product(_eval_factors(_envelope_factors(b, l), t))


def palindrome_envelope_deriv(b: int, l: int, t):
    if l <= 1:
        return np.zeros_like(t, dtype=complex) if isinstance(t, np.ndarray) else 0.0 + 0.0j
    return _product_deriv(_envelope_factors(b, l), t)


def palindrome_envelope_norm(b: int, l: int, t):
    """Envelope scaled by the (2l+1)-digit stratum size (b-1)*b**l."""
    return palindrome_envelope(b, l, t) / ((b - 1) * b**l)


def _missing_factors(b: int, excluded_digit: int, n_digits: int):
    if not 0 <= excluded_digit < b:
        raise ValueError("excluded digit out of range")
    if n_digits < 1:
        raise ValueError("digit count must be >= 1")

    def miss(y):
        if isinstance(y, np.ndarray):
            return _kernel_array(b, y) - np.exp(2j * np.pi * excluded_digit * y)
        return _kernel_scalar(b, y) - cmath.exp(2j * math.pi * excluded_digit * y)

    def dmiss(y):
        if isinstance(y, np.ndarray):
            return (_kernel_deriv_array(b, y)
                    - 2j * np.pi * excluded_digit * np.exp(2j * np.pi * excluded_digit * y))
        return (_kernel_deriv_scalar(b, y)
                - 2j * math.pi * excluded_digit * cmath.exp(2j * math.pi * excluded_digit * y))

    return [(b**j, miss, dmiss) for j in range(n_digits)]


def missing_digit_transform(b: int, excluded_digit: int, n_digits: int, t):
    """Exponential sum over all n_digits-digit base-b strings avoiding one digit.

    The sum ranges over n = sum n_j b**j with every n_j in {0..b-1} minus the
    excluded digit (leading zeros allowed), and factors position by position.
    At t = 0 this counts the strings: (b-1)**n_digits.
    """
    return _product(_eval_factors(_missing_factors(b, excluded_digit, n_digits), t))


def missing_digit_transform_deriv(b: int, excluded_digit: int, n_digits: int, t):
    return _product_deriv(_missing_factors(b, excluded_digit, n_digits), t)


def reversible_transform(b: int, n_digits: int, alpha, beta):
    """Normalized two-frequency transform pairing n with its reversal.

    Returns (1/x) * sum_{0<=n<x} e(alpha*rev(n) - beta*n) for x = b**n_digits,
    where rev reads n in the fixed n_digits frame (leading zeros reverse into
    trailing zeros).  Factors into one geometric sum per digit position.
    """
    if n_digits < 1:
        raise ValueError("digit count must be >= 1")
    x = b**n_digits
    out = None
    for j in range(n_digits):
        y = _frac_combine(b ** (n_digits - 1 - j), alpha, b**j, beta)
        v = _kernel_scalar(b, y)
        out = v if out is None else out * v
    return out / x


def _power_exponent(x: int, b: int) -> int | None:
    """m with b**m == x, or None."""
    m = 0
    v = 1
    while v < x:
        v *= b
        m += 1
    return m if v == x else None


def set_transform_product(s: SetDescriptor, x: int, t):
    """Product-formula evaluation of sum e(n*t) over the members of s in [0, x).

    Available only for unfiltered descriptors (coprime_to = 1) and, except for
    the all-integers family, cutoffs that are powers of the base; the sum is
    assembled stratum by stratum from the factored forms.  Returns None when
    no product form applies (callers fall back to brute_transform).
    """
    if s.coprime_to != 1:
        return None
    b = s.base
    if s.kind in ("all", "reversible_pairs"):
        # unfiltered, these are plain initial segments of the integers
        return dirichlet_kernel(x, t)
    m = _power_exponent(x, b)
    if m is None:
        return None
    if s.kind == "palindromes":
        total = 0.0 + 0.0j
        for j in range(1, m + 1):
            if s.odd_length_only and j % 2 == 0:
                continue
            total = total + palindrome_transform(b, j, t)
        return total
    if s.kind == "missing_digit" and len(s.excluded) == 1:
        (a0,) = s.excluded
        scalar = not isinstance(t, np.ndarray)
        total = (1.0 + 0.0j) if a0 != 0 else 0.0 + 0.0j  # the member 0
        if isinstance(t, np.ndarray):
            total = np.full(t.shape, total, dtype=complex)
        for j in range(1, m + 1):
            # leading digit is nonzero and != a0; the j-1 lower positions are free
            y = _frac_mult(b ** (j - 1), t) if scalar else np.mod(b ** (j - 1) * t, 1.0)
            if scalar:
                lead = _kernel_scalar(b, y) - 1.0
                if a0 != 0:
                    lead -= cmath.exp(2j * math.pi * a0 * y)
            else:
                lead = _kernel_array(b, y) - 1.0
                if a0 != 0:
                    lead -= np.exp(2j * np.pi * a0 * y)
            inner = 1.0 + 0.0j
            if j > 1:
                inner = _product(_eval_factors(_missing_factors(b, a0, j - 1), t))
            total = total + lead * inner
        return total
    return None


def palindrome_stratum_brute(b: int, n_digits: int, t) -> complex:
    """Direct sum over the palindromes with exactly n_digits digits."""
    members = digit_sets._palindrome_length_block(b, n_digits)
    if len(members) > BRUTE_MEMBER_GUARD:
        raise ValueError("stratum too large for brute evaluation")
    return brute_member_sum(members, t)


def missing_digit_frame_brute(b: int, excluded_digit: int, n_digits: int, t) -> complex:
    """Direct sum over all n_digits-digit strings avoiding one digit
    (leading zeros allowed); oracle for missing_digit_transform."""
    if (b - 1) ** n_digits > BRUTE_MEMBER_GUARD:
        raise ValueError("frame too large for brute evaluation")
    allowed = np.array([d for d in range(b) if d != excluded_digit], dtype=np.int64)
    members = digit_sets._missing_digit_strings(allowed, b, n_digits)
    return brute_member_sum(members, t)


def reversible_brute(b: int, n_digits: int, alpha, beta) -> complex:
    """Direct-frame oracle for reversible_transform; guarded at 1e7 terms."""
    x = b**n_digits
    if x > BRUTE_MEMBER_GUARD:
        raise ValueError(f"brute reversible guard: frame size {x} too large")
    n = np.arange(x, dtype=np.int64)
    rev = digit_sets.reverse_block(n, b, n_digits)
    if isinstance(alpha, (Fraction, int)) and isinstance(beta, (Fraction, int)):
        fa, fb = Fraction(alpha), Fraction(beta)
        q = (fa.denominator * fb.denominator) // math.gcd(fa.denominator, fb.denominator)
        pa = (fa.numerator * (q // fa.denominator)) % q
        pb = (fb.numerator * (q // fb.denominator)) % q
        if q * q < 2**63:
            res = ((rev % q) * pa - (n % q) * pb) % q
            return complex(np.exp(2j * np.pi * (res / q)).sum() / x)
        alpha, beta = float(fa), float(fb)
    ph = np.mod(rev.astype(float) * float(alpha) - n.astype(float) * float(beta), 1.0)
    return complex(np.exp(2j * np.pi * ph).sum() / x)


def brute_member_sum(members: np.ndarray, t) -> complex:
    """Direct sum of e(n*t) over an int64 member array.

    Rational t with a denominator small enough for exact int64 modular
    reduction gets exact phases; other inputs go through float products.
    """
    if isinstance(t, (Fraction, int)):
        f = Fraction(t)
        p, q = f.numerator % f.denominator, f.denominator
        if q <= 1:
            return complex(len(members))
        if q * q < 2**63 and p < 2**62 // q + 1:
            res = ((members % q) * (p % q)) % q
            return complex(np.exp(2j * np.pi * (res / q)).sum())
        t = float(f)  # denominator too large for exact reduction
    phases = np.mod(members.astype(float) * float(t), 1.0)
    return complex(np.exp(2j * np.pi * phases).sum())


@dataclass(frozen=True)
class TransformSample:
    """One transform evaluation: the point, the raw complex value, and the
    member-count normalization that was applied to it."""

    point: object
    value: complex
    normalization: float


def brute_transform(s: SetDescriptor, x: int, t) -> TransformSample:
    """Member-by-member transform of s below x; the oracle for product forms.

    Guarded at 1e7 members.  normalization is the member count, so
    abs(value)/normalization is the normalized transform.
    """
    total = 0.0 + 0.0j
    count = 0
    for block in digit_sets.member_blocks(s, x):
        count += len(block)
        if count > BRUTE_MEMBER_GUARD:
            raise ValueError(f"brute_transform guard: more than {BRUTE_MEMBER_GUARD} members")
        total += brute_member_sum(block, t)
    return TransformSample(point=t, value=total, normalization=float(max(count, 1)))


# ---------------------------------------------------------------------------
# transform family handles (consumed by the bounds module)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TransformFamily:
    """A one-frequency transform S together with its scale and normalization.

    scale is the digit-frame size x (the integrand oscillates at spacing 1/x),
    count is #members (the normalizer of F = |S|/count), coprime_modulus the
    natural gcd restriction for rational scan points (1 when unrestricted).
    """

    name: str
    scale: int
    count: float
    coprime_modulus: int
    raw: Callable
    raw_deriv: Callable

    def value(self, t):
        return self.raw(t)

    def deriv(self, t):
        return self.raw_deriv(t)

    def normalized(self, t):
        return np.abs(self.raw(t)) / self.count


def dirichlet_family(x: int) -> TransformFamily:
    """Transform of {0, ..., x-1}: the fully analyzable reference family."""
    return TransformFamily(
        name=f"dirichlet x={x}", scale=x, count=float(x), coprime_modulus=1,
        raw=lambda t: dirichlet_kernel(x, t),
        raw_deriv=lambda t: dirichlet_kernel_deriv(x, t))


def palindrome_envelope_family(b: int, l: int) -> TransformFamily:
    return TransformFamily(
        name=f"pal-envelope b={b} l={l}", scale=b ** (2 * l),
        count=float((b - 1) * b**l), coprime_modulus=b**3 - b,
        raw=lambda t: palindrome_envelope(b, l, t),
        raw_deriv=lambda t: palindrome_envelope_deriv(b, l, t))


def palindrome_family(b: int, n_digits: int) -> TransformFamily:
    if n_digits == 1:
        count = b
    else:
        l, odd = divmod(n_digits, 2)
        count = (b - 1) * b ** (l if odd else l - 1)
    return TransformFamily(
        name=f"palindromes b={b} digits={n_digits}", scale=b**n_digits,
        count=float(count), coprime_modulus=b**3 - b,
        raw=lambda t: palindrome_transform(b, n_digits, t),
        raw_deriv=lambda t: palindrome_transform_deriv(b, n_digits, t))


def missing_digit_family(b: int, excluded_digit: int, n_digits: int) -> TransformFamily:
    return TransformFamily(
        name=f"missing b={b} a0={excluded_digit} digits={n_digits}", scale=b**n_digits,
        count=float((b - 1) ** n_digits), coprime_modulus=b,
        raw=lambda t: missing_digit_transform(b, excluded_digit, n_digits, t),
        raw_deriv=lambda t: missing_digit_transform_deriv(b, excluded_digit, n_digits, t))
