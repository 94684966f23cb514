"""Quantitative verification of the powerfree-criterion hypotheses.

Three kinds of machinery live here:

* exact combinatorics: the palindrome digit-pair matrix (rational entries in
  closed form) and the closed-form L1 exponent derived from it;
* eigenvalue bounds: the excluded-digit transfer matrix over 4-digit windows
  and its dominant eigenvalue via power iteration, giving the L1 exponent
  alpha = 1 - log(lambda)/log(b);
* empirical checks: L-infinity scans with constant fitting, midpoint L1
  quadrature, decreasing-property sampling, the rational-point double sum,
  the large-sieve-type inequality, and progression discrepancy.

Checks return data (BoundReport et al.); nothing here proves anything.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from random import Random
from typing import Callable, Optional

import numpy as np

from . import digit_sets, expsum
from .digit_sets import SetDescriptor
from .expsum import TransformFamily

D_MAX_GUARD = 10**4
QK_GUARD = 10**6
DOUBLE_SUM_Q_GUARD = 10**3
_L1_CHUNK = 1 << 18


def thread_count() -> int:
    """Worker count for parallel matrix construction (DIGITFREE_THREADS)."""
    try:
        return max(1, int(os.environ.get("DIGITFREE_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# result containers
# ---------------------------------------------------------------------------


@dataclass
class BoundReport:
    """Outcome of one hypothesis check.

    samples holds (point description, observed, reference) triples; violations
    counts samples with observed > reference + tolerance; worst_margin is the
    largest observed - reference (negative means comfortable).
    """

    hypothesis: str
    samples: list
    fitted_constant: Optional[float]
    violations: int
    worst_margin: float
    tolerance: float
    extra: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.violations == 0


@dataclass(frozen=True)
class AlphaResult:
    """An L1-bound exponent, either closed form or from an eigenvalue."""

    base: int
    alpha: float
    method: str  # "closed_form" | "eigenvalue"
    excluded_digit: Optional[int] = None
    eigenvalue: Optional[float] = None
    residual: Optional[float] = None
    iterations: Optional[int] = None
    converged: bool = True


@dataclass(frozen=True)
class PowerIterationResult:
    value: float
    residual: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    nodes: int


@dataclass
class GMatrix:
    """Nonnegative structured matrix.

    kind "palindrome": dense symmetric Hankel b x b, exact rational entries
    kept alongside the float view.  kind "missing_digit": b^3 x b^3 with b
    nonzeros per row stored as a (b^3, b) value table; row r has its nonzeros
    at contiguous columns b*(r mod b^2) + j.
    """

    kind: str
    base: int
    values: np.ndarray
    exact: Optional[list] = None
    excluded_digit: Optional[int] = None

    @property
    def dimension(self) -> int:
        return self.base if self.kind == "palindrome" else self.base**3

    def matvec(self, v: np.ndarray) -> np.ndarray:
        if self.kind == "palindrome":
            return self.values @ v
        b = self.base
        r = np.arange(b**3)
        cols = (r % (b * b))[:, None] * b + np.arange(b)[None, :]
        return (self.values * v[cols]).sum(axis=1)

    def to_dense(self) -> np.ndarray:
        if self.kind == "palindrome":
            return self.values.copy()
        b = self.base
        n = b**3
        out = np.zeros((n, n))
        for r in range(n):
            c0 = (r % (b * b)) * b
            out[r, c0:c0 + b] = self.values[r]
        return out


# ---------------------------------------------------------------------------
# palindrome pair matrix (exact)
# ---------------------------------------------------------------------------


def pal_pair_bound(b: int, d1: int, d2: int) -> Fraction:
    """Worst case of min(1, 1/(2b*dist)) over the digit-pair phase window.

    For digits d1, d2 the phase (d1+d2)/b is known and the remaining digits
    contribute an unknown shift in [0, 2/b); the bound is the supremum of
    min(1, 1/(2b*||phase||)) over that window, which is exactly 1 when the
    closed window touches an integer and 1/(2j) otherwise, where j/b is the
    distance from the window to the nearest integer.
    """
    if b < 3:
        raise ValueError("pair bound needs base >= 3")
    for d in (d1, d2):
        if not 0 <= d < b:
            raise ValueError(f"digit {d} out of range for base {b}")
    s = d1 + d2
    m = -(-s // b)  # ceil(s/b)
    if m * b <= s + 2:
        return Fraction(1)
    j = min(s - (s // b) * b, m * b - s - 2)
    return Fraction(1, 2 * j)


def palindrome_pair_matrix(b: int) -> GMatrix:
    """The b x b matrix of pair bounds; symmetric, Hankel, periodic in d1+d2."""
    exact = [[pal_pair_bound(b, i, j) for j in range(b)] for i in range(b)]
    values = np.array([[float(v) for v in row] for row in exact])
    return GMatrix(kind="palindrome", base=b, values=values, exact=exact)


def alpha_palindrome(b: int) -> AlphaResult:
    """Closed-form L1 exponent for the palindrome envelope.

    alpha = (log b - log(4 + log(b/2 - 1))) / (2 log b); needs b >= 4.
    """
    if b < 4:
        raise ValueError("closed-form exponent needs base >= 4")
    alpha = (math.log(b) - math.log(4 + math.log(b / 2 - 1))) / (2 * math.log(b))
    return AlphaResult(base=b, alpha=alpha, method="closed_form")


# ---------------------------------------------------------------------------
# excluded-digit transfer matrix
# ---------------------------------------------------------------------------


def missing_window_bound(b: int, excluded_digit: int, t1: int, t2: int, t3: int, t4: int,
                         grid: int = 1024, refine_width: float = 1e-12) -> float:
    """sup over a 4-digit phase window of the single-position factor.

    The factor of the excluded-digit transform at phase y is
    |sum_{n<b, n != excluded} e(n*y)| / (b-1).  Knowing four leading digits
    t1..t4 pins y to [0.t1t2t3t4, 0.t1t2t3t4 + b^-4]; the supremum over that
    window is located by a uniform grid followed by golden-section refinement
    around the best cell.
    """
    for d in (excluded_digit, t1, t2, t3, t4):
        if not 0 <= d < b:
            raise ValueError(f"digit {d} out of range for base {b}")
    y0 = t1 / b + t2 / b**2 + t3 / b**3 + t4 / b**4
    h = float(b) ** -4
    y = y0 + np.linspace(0.0, h, grid + 1)
    vals = np.abs(expsum.dirichlet_kernel(b, y)
                  - np.exp(2j * np.pi * excluded_digit * y)) / (b - 1)
    i = int(np.argmax(vals))
    best = float(vals[i])

    def objective(yy: float) -> float:
        return abs(expsum.dirichlet_kernel(b, yy)
                   - cmath.exp(2j * math.pi * excluded_digit * yy)) / (b - 1)

    lo = y0 + (max(i - 1, 0)) * h / grid
    hi = y0 + (min(i + 1, grid)) * h / grid
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - inv_phi * (hi - lo)
    x2 = lo + inv_phi * (hi - lo)
    f1v, f2v = objective(x1), objective(x2)
    while hi - lo > refine_width:
        if f1v < f2v:
            lo, x1, f1v = x1, x2, f2v
            x2 = lo + inv_phi * (hi - lo)
            f2v = objective(x2)
        else:
            hi, x2, f2v = x2, x1, f1v
            x1 = hi - inv_phi * (hi - lo)
            f1v = objective(x1)
    return max(best, f1v, f2v)


def missing_digit_matrix(b: int, excluded_digit: int, grid: int = 1024,
                         refine_width: float = 1e-12) -> GMatrix:
    """b^3 x b^3 transfer matrix of window bounds.

    Row r encodes the digit triple (t2, t3, t4) of r in base b; its b nonzero
    entries sit at columns t1 + b*(r mod b^2) and carry the window bound for
    (t1, t2, t3, t4).  Exactly b^4 nonzero entries, all nonnegative.
    """
    if not 3 <= b <= 36:
        raise ValueError("transfer matrix supported for bases 3..36")
    n = b**3
    values = np.zeros((n, b))

    def fill_row(r: int) -> None:
        t2 = r % b
        t3 = (r // b) % b
        t4 = r // (b * b)
        for t1 in range(b):
            values[r, t1] = missing_window_bound(
                b, excluded_digit, t1, t2, t3, t4, grid=grid, refine_width=refine_width)

    workers = thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill_row, range(n)))
    else:
        for r in range(n):
            fill_row(r)
    return GMatrix(kind="missing_digit", base=b, values=values,
                   excluded_digit=excluded_digit)


def perron_eigenvalue(mat: GMatrix, tol: float = 1e-12,
                      max_iter: int = 10**5) -> PowerIterationResult:
    """Largest eigenvalue of a nonnegative matrix by power iteration.

    Starts from the all-ones vector, stops when the Rayleigh quotient is
    stable to relative tol, and reports the final residual ||Mv - lambda*v||
    for a unit v.  Non-convergence is reported, not raised.
    """
    if (mat.values < 0).any():
        raise ValueError("matrix must be nonnegative")
    if not mat.values.any():
        raise ValueError("matrix must be nonzero")
    v = np.ones(mat.dimension)
    v /= np.linalg.norm(v)
    lam_old = 0.0
    lam = 0.0
    iterations = 0
    converged = False
    for iterations in range(1, max_iter + 1):
        w = mat.matvec(v)
        lam = float(v @ w)
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            break  # v in the nullspace: lambda estimate stays 0
        v = w / norm_w
        if iterations > 1 and abs(lam - lam_old) <= tol * max(abs(lam), 1e-300):
            converged = True
            break
        lam_old = lam
    residual = float(np.linalg.norm(mat.matvec(v) - lam * v))
    return PowerIterationResult(value=lam, residual=residual,
                                iterations=iterations, converged=converged)


def alpha_missing_digit(b: int, excluded_digit: int, grid: int = 1024,
                        refine_width: float = 1e-12, tol: float = 1e-12,
                        max_iter: int = 10**5) -> AlphaResult:
    """L1 exponent 1 - log(lambda)/log(b) from the transfer-matrix eigenvalue."""
    mat = missing_digit_matrix(b, excluded_digit, grid=grid, refine_width=refine_width)
    pw = perron_eigenvalue(mat, tol=tol, max_iter=max_iter)
    alpha = 1.0 - math.log(pw.value) / math.log(b)
    return AlphaResult(base=b, alpha=alpha, method="eigenvalue",
                       excluded_digit=excluded_digit, eigenvalue=pw.value,
                       residual=pw.residual, iterations=pw.iterations,
                       converged=pw.converged)


# ---------------------------------------------------------------------------
# numerical L1 / Linf estimates
# ---------------------------------------------------------------------------


def l1_norm(family: TransformFamily, derivative: bool = False,
            nodes: Optional[int] = None, node_multiplier: int = 16) -> QuadratureResult:
    """Composite midpoint estimate of the L1 norm of F (or of F').

    F is the normalized transform |S|/count; the derivative variant integrates
    |S'|/count, which dominates |F'| pointwise.  nodes defaults to
    node_multiplier * scale and must stay at or above 16 * scale, the spacing
    needed to track oscillation at scale 1/x.
    """
    if nodes is None:
        nodes = node_multiplier * family.scale
    if nodes < 16 * family.scale:
        raise ValueError(f"need at least {16 * family.scale} nodes for scale {family.scale}")
    fn = family.deriv if derivative else family.value
    total = 0.0
    done = 0
    while done < nodes:
        m = min(_L1_CHUNK, nodes - done)
        t = (np.arange(done, done + m, dtype=float) + 0.5) / nodes
        total += float(np.abs(fn(t)).sum())
        done += m
    return QuadratureResult(value=total / nodes / family.count, nodes=nodes)


def linf_scan(family: TransformFamily, d_max: int, coprime_m: Optional[int] = None,
              reference: Optional[Callable[[int, int], float]] = None,
              tolerance: float = 1e-9) -> BoundReport:
    """Evaluate F at every reduced fraction a/d, 2 <= d <= d_max, and fit the
    decay constant c in F ~ exp(-c * log(scale)/log(d)).

    Denominators sharing a factor with coprime_m (default: the family's own
    modulus) are skipped.  With an explicit reference(a, d) callable every
    sample is checked against it; otherwise violations stay 0 and the fitted
    curve is reported as the reference.
    """
    if d_max > D_MAX_GUARD:
        raise ValueError(f"d_max guard is {D_MAX_GUARD}")
    modulus = family.coprime_modulus if coprime_m is None else coprime_m
    logx = math.log(family.scale)
    samples = []
    num = 0.0
    den = 0.0
    violations = 0
    worst = -math.inf
    for d in range(2, d_max + 1):
        if math.gcd(d, modulus) != 1:
            continue
        for a in range(1, d):
            if math.gcd(a, d) != 1:
                continue
            obs = float(family.normalized(Fraction(a, d)))
            ref = reference(a, d) if reference is not None else None
            if obs > 0.0:
                u = logx / math.log(d)
                num += u * math.log(obs)
                den += u * u
            if ref is not None:
                margin = obs - ref
                worst = max(worst, margin)
                if margin > tolerance:
                    violations += 1
            samples.append((f"{a}/{d}", obs, ref))
    if not samples:
        raise ValueError("all denominators filtered out; empty scan")
    fitted = -num / den if den > 0 else None
    if reference is None:
        samples = [(pt, obs, math.exp(-fitted * logx / math.log(int(pt.split("/")[1]))))
                   for (pt, obs, _) in samples] if fitted is not None else samples
        worst = 0.0
    return BoundReport(hypothesis="linf", samples=samples, fitted_constant=fitted,
                       violations=violations, worst_margin=worst, tolerance=tolerance,
                       extra={"d_max": d_max, "coprime_modulus": modulus,
                              "scale": family.scale, "family": family.name})


# ---------------------------------------------------------------------------
# decreasing-property sampling
# ---------------------------------------------------------------------------


def _dyadic(rng: Random) -> Fraction:
    return Fraction(rng.randrange(1 << 53), 1 << 53)


def check_decreasing(kind: str, b: int, excluded_digit: Optional[int] = None,
                     samples: int = 1000, max_digits: int = 8, seed: int = 12345,
                     tolerance: float = 1e-12) -> BoundReport:
    """Sample the family-specific decreasing inequality at random points.

    kinds: "phi_tilde" checks the normalized palindrome envelope against its
    predecessor at a b-scaled argument; "missing" checks frame monotonicity
    F_y <= F_x for frame sizes x <= y; "reversible" checks the two-frequency
    analogue with the first frequency rescaled by y/x.  Points are random
    dyadic rationals so both sides share bit-identical factors.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    if kind == "missing" and excluded_digit is None:
        raise ValueError("missing kind needs the excluded digit")
    rng = Random(seed)
    report_samples = []
    violations = 0
    worst = -math.inf

    for _ in range(samples):
        if kind == "phi_tilde":
            l = rng.randrange(2, max_digits + 1)
            t = _dyadic(rng)
            lhs = abs(expsum.palindrome_envelope_norm(b, l, t))
            rhs = abs(expsum.palindrome_envelope_norm(b, l - 1, b * t))
            desc = f"l={l} t={float(t):.6f}"
        elif kind == "missing":
            l = rng.randrange(2, max_digits + 1)
            k = rng.randrange(1, l)
            t = _dyadic(rng)
            lhs = abs(expsum.missing_digit_transform(b, excluded_digit, l, t)) / (b - 1) ** l
            rhs = abs(expsum.missing_digit_transform(b, excluded_digit, k, t)) / (b - 1) ** k
            desc = f"k={k} l={l} t={float(t):.6f}"
        elif kind == "reversible":
            l = rng.randrange(2, max_digits + 1)
            k = rng.randrange(1, l)
            alpha = _dyadic(rng)
            beta = _dyadic(rng)
            lhs = abs(expsum.reversible_transform(b, l, alpha, beta))
            rhs = abs(expsum.reversible_transform(b, k, alpha * b ** (l - k), beta))
            desc = f"k={k} l={l} a={float(alpha):.6f} b={float(beta):.6f}"
        else:
            raise ValueError(f"unknown decreasing kind {kind!r}")
        margin = lhs - rhs
        worst = max(worst, margin)
        if margin > tolerance:
            violations += 1
        report_samples.append((desc, lhs, rhs))

    return BoundReport(hypothesis="decreasing", samples=report_samples,
                       fitted_constant=None, violations=violations,
                       worst_margin=worst, tolerance=tolerance,
                       extra={"kind": kind, "base": b, "excluded_digit": excluded_digit,
                              "max_digits": max_digits, "seed": seed})


# ---------------------------------------------------------------------------
# double sum, large sieve, progression discrepancy
# ---------------------------------------------------------------------------


def _iroot(n: int, k: int) -> int:
    """Floor of the k-th root of a nonnegative integer, exact."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 0
    r = int(round(n ** (1.0 / k)))
    while r > 0 and r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def _double_sum_terms(family: TransformFamily, k: int, coprime_m: int = 1,
                      q_max: Optional[int] = None) -> list[tuple[int, float]]:
    q_limit = _iroot(family.scale, k)
    if q_max is not None:
        q_limit = min(q_limit, q_max)
    if q_limit > DOUBLE_SUM_Q_GUARD:
        raise ValueError(
            f"effective q range {q_limit} exceeds guard {DOUBLE_SUM_Q_GUARD}; "
            "pass q_max to truncate")
    terms = []
    for q in range(1, q_limit + 1):
        if math.gcd(q, coprime_m) != 1:
            continue
        d = q**k
        if d <= 1:
            terms.append((q, 0.0))
            continue
        a = np.arange(1, d, dtype=float)
        inner = float(np.abs(family.value(a / d)).sum()) / family.count
        terms.append((q, inner / d))
    return terms


def double_sum(family: TransformFamily, k: int, coprime_m: int = 1,
               q_max: Optional[int] = None) -> float:
    """sum over q <= scale**(1/k) coprime to m of q**-k * sum_a F(a/q**k).

    The inner sum runs over 0 < a < q**k.  q_max truncates the q range (the
    full range is guarded at 1e3 because the term count grows like q**k).
    """
    return math.fsum(v for _, v in _double_sum_terms(family, k, coprime_m, q_max))


def double_sum_split(family: TransformFamily, k: int, split_exponent: float = 3.0,
                     coprime_m: int = 1, q_max: Optional[int] = None) -> dict:
    """The same double sum split at q = (log scale)**(B/k).

    Returns the threshold, the small-q and large-q partial sums, and their
    recombination (computed from the same term list as the unsplit value).
    """
    terms = _double_sum_terms(family, k, coprime_m, q_max)
    threshold = math.log(family.scale) ** (split_exponent / k)
    s1 = math.fsum(v for q, v in terms if q <= threshold)
    s2 = math.fsum(v for q, v in terms if q > threshold)
    return {"threshold": threshold, "s1": s1, "s2": s2,
            "total": math.fsum(v for _, v in terms)}


def large_sieve_check(family: TransformFamily, q: int, k: int,
                      node_multiplier: int = 16, oversample: int = 4) -> BoundReport:
    """Check sum_{0<a<q^k} |f(a/q^k)| <= q^k * ||f||_1 + ||f'||_1 (constant 1).

    f is the normalized transform S/count.  The right side uses midpoint
    quadrature oversampled by `oversample` so quadrature error cannot flip the
    inequality.
    """
    d = q**k
    if d > QK_GUARD:
        raise ValueError(f"q**k guard is {QK_GUARD}")
    if d <= 4096:
        lhs = math.fsum(float(family.normalized(Fraction(a, d))) for a in range(1, d))
    else:
        a = np.arange(1, d, dtype=float)
        lhs = float(np.abs(family.value(a / d)).sum()) / family.count
    nodes = node_multiplier * family.scale * oversample
    l1 = l1_norm(family, derivative=False, nodes=nodes)
    l1d = l1_norm(family, derivative=True, nodes=nodes)
    rhs = d * l1.value + l1d.value
    margin = lhs - rhs
    return BoundReport(hypothesis="large_sieve", samples=[(f"q={q} k={k}", lhs, rhs)],
                       fitted_constant=None, violations=int(margin > 0), worst_margin=margin,
                       tolerance=0.0,
                       extra={"q": q, "k": k, "nodes": l1.nodes, "l1": l1.value,
                              "l1_deriv": l1d.value, "family": family.name})


def progression_discrepancy(s: SetDescriptor, x: int, d: int,
                            tolerance_scale: float = 1e-6,
                            max_members: int = 10**7) -> BoundReport:
    """Compare the progression count deviation with its transform bound.

    Over members n in [1, x]: the deviation |#{n: d|n} - count/d| must not
    exceed (count/d) * sum_{0<a<d} F(a/d), up to tolerance_scale * count of
    numerical slack.  Both sides are computed by direct enumeration.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    count = 0
    div_count = 0
    totals = np.zeros(max(d - 1, 0), dtype=complex)
    for block in digit_sets.member_blocks(s, x + 1):
        block = block[block >= 1]
        if not len(block):
            continue
        count += len(block)
        if count > max_members:
            raise ValueError(f"member guard {max_members} exceeded")
        div_count += int((block % d == 0).sum())
        for a in range(1, d):
            totals[a - 1] += expsum.brute_member_sum(block, Fraction(a, d))
    if count == 0:
        raise ValueError("empty set")
    lhs = abs(div_count - count / d)
    # (count/d) * sum_a |S(a/d)|/count collapses to sum_a |S(a/d)| / d
    rhs = float(np.abs(totals).sum()) / d
    tol = tolerance_scale * count
    margin = lhs - rhs
    return BoundReport(hypothesis="progression_discrepancy",
                       samples=[(f"d={d}", lhs, rhs)], fitted_constant=None,
                       violations=int(margin > tol), worst_margin=margin, tolerance=tol,
                       extra={"x": x, "d": d, "count": count, "divisible": div_count,
                              "descriptor": s.label()})
