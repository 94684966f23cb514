"""Base-b digit manipulation and enumeration of digit-defined integer families.

Supported families: all integers, base-b palindromes, integers with excluded
digits, and integers filtered together with their digit reversal.  Each family
enumerates ascending and can carry a coprimality filter gcd(n, m) = 1 (applied
to both n and its reversal for the reversible family).

Enumeration is generated from free digit prefixes, so the cost is proportional
to the number of members produced, not to the range scanned.  Members are
produced in ascending numpy int64 blocks (`member_blocks`) for vectorized
consumers; `enumerate_set` flattens the blocks into a plain integer stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

_INT64_MAX = 2**63 - 1
_ALL_CHUNK = 1 << 20


def _check_base(b: int) -> None:
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")


def to_digits(n: int, b: int) -> list[int]:
    """Base-b digits of n, least significant first.

    Canonical form: the most significant digit is nonzero, except that 0 is
    represented as the single digit [0].
    """
    _check_base(b)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return [0]
    digits = []
    while n:
        n, r = divmod(n, b)
        digits.append(r)
    return digits


def from_digits(digits, b: int) -> int:
    """Inverse of to_digits; accepts any digit sequence, least significant first."""
    _check_base(b)
    n = 0
    for d in reversed(digits):
        if not 0 <= d < b:
            raise ValueError(f"digit {d} out of range for base {b}")
        n = n * b + d
    return n


def reverse(n: int, b: int) -> int:
    """Integer obtained by reversing the canonical base-b digit string of n.

    Trailing zeros of n become leading zeros and are dropped, so
    reverse(reverse(n, b), b) <= n, with equality iff n has no trailing zeros.
    """
    _check_base(b)
    if n < 0:
        raise ValueError("n must be nonnegative")
    r = 0
    if n == 0:
        return 0
    while n:
        n, d = divmod(n, b)
        r = r * b + d
    return r


def is_palindrome(n: int, b: int) -> bool:
    """True iff the canonical base-b digit string of n equals its reversal."""
    return reverse(n, b) == n


def reverse_block(arr: np.ndarray, b: int, n_digits: int) -> np.ndarray:
    """Vectorized digit reversal of arr, all entries read in a fixed
    n_digits frame (leading zeros participate)."""
    rev = np.zeros_like(arr)
    t = arr.copy()
    for _ in range(n_digits):
        rev = rev * b + t % b
        t //= b
    return rev


@dataclass(frozen=True)
class SetDescriptor:
    """Which digit-defined family is under study, plus its coprimality filter.

    kind is one of "all", "palindromes", "missing_digit", "reversible_pairs".
    Members n must satisfy gcd(n, coprime_to) = 1; for reversible_pairs the
    reversal of n must pass the same filter.
    """

    kind: str
    base: int = 10
    odd_length_only: bool = False
    excluded: frozenset = field(default_factory=frozenset)
    coprime_to: int = 1

    def __post_init__(self):
        if self.kind not in ("all", "palindromes", "missing_digit", "reversible_pairs"):
            raise ValueError(f"unknown set kind {self.kind!r}")
        _check_base(self.base)
        if self.coprime_to < 1:
            raise ValueError("coprime_to must be >= 1")
        bad = [d for d in self.excluded if not 0 <= d < self.base]
        if bad:
            raise ValueError(f"excluded digits {bad} out of range for base {self.base}")
        if self.kind == "missing_digit" and len(self.excluded) >= self.base:
            raise ValueError("cannot exclude every digit")
        if self.kind == "missing_digit" and not self.excluded:
            raise ValueError("missing_digit descriptor needs at least one excluded digit")

    @classmethod
    def all_integers(cls, coprime_to: int = 1) -> "SetDescriptor":
        return cls(kind="all", base=10, coprime_to=coprime_to)

    @classmethod
    def palindromes(cls, base: int, odd_length_only: bool = False,
                    coprime_to: int = 1) -> "SetDescriptor":
        return cls(kind="palindromes", base=base, odd_length_only=odd_length_only,
                   coprime_to=coprime_to)

    @classmethod
    def missing_digit(cls, base: int, excluded, coprime_to: int = 1) -> "SetDescriptor":
        if isinstance(excluded, int):
            excluded = (excluded,)
        return cls(kind="missing_digit", base=base, excluded=frozenset(excluded),
                   coprime_to=coprime_to)

    @classmethod
    def reversible_pairs(cls, base: int, coprime_to: int = 1) -> "SetDescriptor":
        return cls(kind="reversible_pairs", base=base, coprime_to=coprime_to)

    def label(self) -> str:
        parts = [self.kind, f"b={self.base}"]
        if self.kind == "palindromes" and self.odd_length_only:
            parts.append("odd")
        if self.kind == "missing_digit":
            parts.append("excl=" + ",".join(str(d) for d in sorted(self.excluded)))
        if self.coprime_to != 1:
            parts.append(f"coprime={self.coprime_to}")
        return " ".join(parts)

    def contains(self, n: int) -> bool:
        """Membership test for a single nonnegative integer (range-free)."""
        if n < 0:
            return False
        if math.gcd(n, self.coprime_to) != 1:
            return False
        b = self.base
        if self.kind == "all":
            return True
        if self.kind == "palindromes":
            if self.odd_length_only and len(to_digits(n, b)) % 2 == 0:
                return False
            return is_palindrome(n, b)
        if self.kind == "missing_digit":
            return not self.excluded.intersection(to_digits(n, b))
        # reversible_pairs
        return math.gcd(reverse(n, b), self.coprime_to) == 1


def _palindrome_length_block(b: int, length: int) -> np.ndarray:
    """All base-b palindromes with exactly `length` digits, ascending."""
    if length == 1:
        return np.arange(0, b, dtype=np.int64)
    half = (length + 1) // 2
    h = np.arange(b ** (half - 1), b ** half, dtype=np.int64)
    v = h.copy()
    rest = h // b if length % 2 == 1 else h.copy()
    for _ in range(half - length % 2):
        v = v * b + rest % b
        rest //= b
    return v


def _missing_digit_strings(allowed: np.ndarray, b: int, length: int) -> np.ndarray:
    """All length-`length` digit strings over `allowed`, as integers, ascending.

    Leading zeros are allowed here; exact-length members are filtered by the
    caller.  Array size is len(allowed)**length.
    """
    vals = allowed.astype(np.int64)
    for _ in range(length - 1):
        vals = (vals[:, None] * b + allowed[None, :]).ravel()
    return vals


def member_blocks(s: SetDescriptor, x: int) -> Iterator[np.ndarray]:
    """Members of s below x as ascending, non-overlapping int64 blocks.

    Blocks are ordered, so concatenating them gives the full ascending stream.
    """
    if x < 1:
        raise ValueError("x must be >= 1")
    if x > _INT64_MAX:
        raise ValueError("enumeration supports x < 2**63 only")
    b, m = s.base, s.coprime_to

    def filtered(arr: np.ndarray) -> np.ndarray:
        if m == 1:
            return arr
        return arr[np.gcd(arr, m) == 1]

    if s.kind == "all":
        lo = 0
        while lo < x:
            hi = min(lo + _ALL_CHUNK, x)
            block = filtered(np.arange(lo, hi, dtype=np.int64))
            if len(block):
                yield block
            lo = hi
        return

    if s.kind == "palindromes":
        length = 1
        while length == 1 or b ** (length - 1) < x:
            if not (s.odd_length_only and length % 2 == 0):
                block = _palindrome_length_block(b, length)
                block = block[block < x]
                block = filtered(block)
                if len(block):
                    yield block
            length += 1
        return

    if s.kind == "missing_digit":
        allowed = np.array(sorted(set(range(b)) - s.excluded), dtype=np.int64)
        allowed_nz = allowed[allowed > 0]
        if 0 not in s.excluded and x > 0 and math.gcd(0, m) == 1:
            yield np.array([0], dtype=np.int64)
        length = 1
        while b ** (length - 1) < x:
            if length == 1:
                block = filtered(allowed_nz[allowed_nz < x])
                if len(block):
                    yield block
            else:
                tails = _missing_digit_strings(allowed, b, length - 1)
                head_w = b ** (length - 1)
                for fd in allowed_nz:
                    if int(fd) * head_w >= x:
                        break
                    block = int(fd) * head_w + tails
                    block = filtered(block[block < x])
                    if len(block):
                        yield block
            length += 1
        return

    # reversible_pairs
    length = 1
    while length == 1 or b ** (length - 1) < x:
        lo = 0 if length == 1 else b ** (length - 1)
        hi = min(b ** length, x)
        for c0 in range(lo, hi, _ALL_CHUNK):
            block = np.arange(c0, min(c0 + _ALL_CHUNK, hi), dtype=np.int64)
            rev = reverse_block(block, b, length)
            keep = (np.gcd(block, m) == 1) & (np.gcd(rev, m) == 1)
            block = block[keep]
            if len(block):
                yield block
        length += 1
    return


def enumerate_set(s: SetDescriptor, x: int) -> Iterator[int]:
    """Strictly increasing stream of the members of s in [0, x)."""
    for block in member_blocks(s, x):
        for v in block:
            yield int(v)


def member_count(s: SetDescriptor, x: int) -> int:
    """Number of members of s in [0, x); streaming count over blocks.

    For unfiltered odd-length palindromes with x = b**(2L+1) this agrees with
    the counting identity b + sum_{l=1..L} (b-1)*b**l.
    """
    return sum(len(block) for block in member_blocks(s, x))
