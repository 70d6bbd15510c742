"""Nonparametric tests: Mann-Whitney U and Spearman rank correlation.

Both tests rank with midranks so ties are handled consistently everywhere.
Mann-Whitney offers exact enumeration (tie-free, small samples) and the
tie-corrected normal approximation with a continuity-correction toggle; the
reported U follows the min(U1, U2) convention with a positive standardized
z. Spearman reports the midrank Pearson rho with a two-tailed t
approximation by default and exact permutation p for n <= 9. Permutation
and enumeration counts are computed in integer arithmetic so exact p-values
are reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from itertools import permutations

from scipy import special

ALT_LESS = "one_tailed_less"
ALT_GREATER = "one_tailed_greater"
ALT_TWO_TAILED = "two_tailed"
_ALTERNATIVES = (ALT_LESS, ALT_GREATER, ALT_TWO_TAILED)

METHOD_EXACT = "exact"
METHOD_NORMAL = "normal_approx"
METHOD_T = "t_approx"

EXACT_MWU_MAX_N = 20  # n1 + n2 at or below which auto picks exact enumeration
EXACT_SPEARMAN_MAX_N = 9


@dataclass(frozen=True)
class StatTestResult:
    test_name: str
    p_value: float
    alternative: str
    method: str
    n1: int
    n2: int | None = None
    u: float | None = None
    u1: float | None = None
    u2: float | None = None
    z: float | None = None
    rho: float | None = None
    tie_correction_applied: bool = False
    continuity_correction: bool = False
    degenerate: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def midranks(values) -> list[float]:
    """Ranks 1..n with tied values sharing the mean of their rank span."""
    n = len(values)
    order = sorted(range(n), key=lambda i: values[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def tie_term(values) -> float:
    """Sum of t^3 - t over groups of tied values."""
    total = 0.0
    counts: dict = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    for t in counts.values():
        if t > 1:
            total += t ** 3 - t
    return total


def _norm_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def _t_sf(t: float, df: int) -> float:
    return float(special.stdtr(df, -t))


@lru_cache(maxsize=None)
def _u_count(m: int, n: int, k: int) -> int:
    """Number of interleavings of m- and n-sized groups with U statistic k."""
    if k < 0 or k > m * n:
        return 0
    if m == 0 or n == 0:
        return 1 if k == 0 else 0
    return _u_count(m - 1, n, k - n) + _u_count(m, n - 1, k)


def _u_cdf_count(u: float, n1: int, n2: int) -> int:
    limit = math.floor(u)
    return sum(_u_count(n1, n2, k) for k in range(0, limit + 1))


def mann_whitney_z_from_summary(u: float, n1: int, n2: int, tie_term_value: float = 0.0,
                                continuity: bool = True) -> float:
    """Positive standardized magnitude of U from summary statistics alone."""
    mu = n1 * n2 / 2.0
    big_n = n1 + n2
    var = n1 * n2 / 12.0 * ((big_n + 1) - tie_term_value / (big_n * (big_n - 1)))
    if var <= 0:
        return 0.0
    cc = 0.5 if continuity else 0.0
    return max(0.0, (abs(u - mu) - cc)) / math.sqrt(var)


def spearman_p_from_summary(rho: float, n: int, alternative: str = ALT_TWO_TAILED) -> float:
    """t-approximation p for a correlation of rho over n pairs (df = n - 2)."""
    if n < 3:
        raise ValueError("needs n >= 3")
    if abs(rho) >= 1.0:
        return 0.0
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    if alternative == ALT_TWO_TAILED:
        return 2.0 * _t_sf(abs(t), n - 2)
    if alternative == ALT_GREATER:
        return _t_sf(t, n - 2)
    if alternative == ALT_LESS:
        return _t_sf(-t, n - 2)
    raise ValueError(f"unknown alternative {alternative!r}")


def mann_whitney_u(a, b, alternative: str = ALT_TWO_TAILED, method: str = "auto",
                   continuity: bool = True, test_name: str = "mann_whitney_u") -> StatTestResult:
    """Rank-sum test of two independent samples.

    alternative refers to the first sample: ALT_LESS means "a tends to be
    smaller than b". U is reported as min(U1, U2); U1 and U2 are kept so
    that U1 + U2 = n1 * n2 stays checkable.
    """
    a = list(a)
    b = list(b)
    if not a or not b:
        raise ValueError("mann_whitney_u requires two non-empty samples")
    if alternative not in _ALTERNATIVES:
        raise ValueError(f"unknown alternative {alternative!r}")
    n1, n2 = len(a), len(b)
    pooled = a + b
    ranks = midranks(pooled)
    r1 = sum(ranks[:n1])
    u1 = r1 - n1 * (n1 + 1) / 2.0
    u2 = n1 * n2 - u1
    u_min = min(u1, u2)
    ties = tie_term(pooled)
    has_ties = ties > 0

    degenerate = len(set(pooled)) == 1
    if method == "auto":
        use_exact = not has_ties and (n1 + n2) <= EXACT_MWU_MAX_N
    elif method == METHOD_EXACT:
        if has_ties:
            raise ValueError("exact enumeration requires tie-free samples")
        use_exact = True
    elif method == METHOD_NORMAL:
        use_exact = False
    else:
        raise ValueError(f"unknown method {method!r}")

    mu = n1 * n2 / 2.0
    z = mann_whitney_z_from_summary(u1, n1, n2, ties, continuity)

    if use_exact:
        total = math.comb(n1 + n2, n1)
        if alternative == ALT_LESS:
            p = _u_cdf_count(u1, n1, n2) / total
        elif alternative == ALT_GREATER:
            # P(U1 >= u1) by the symmetry of the null distribution.
            p = _u_cdf_count(n1 * n2 - u1, n1, n2) / total
        else:
            p = min(1.0, 2.0 * _u_cdf_count(u_min, n1, n2) / total)
        used = METHOD_EXACT
    else:
        big_n = n1 + n2
        var = n1 * n2 / 12.0 * ((big_n + 1) - ties / (big_n * (big_n - 1)))
        cc = 0.5 if continuity else 0.0
        if var <= 0:
            p = 1.0
        elif alternative == ALT_LESS:
            p = _norm_cdf((u1 - mu + cc) / math.sqrt(var))
        elif alternative == ALT_GREATER:
            p = _norm_cdf((mu - u1 + cc) / math.sqrt(var))
        else:
            p = min(1.0, 2.0 * _norm_cdf(-z))
        used = METHOD_NORMAL

    return StatTestResult(
        test_name=test_name,
        p_value=min(1.0, max(0.0, p)),
        alternative=alternative,
        method=used,
        n1=n1, n2=n2,
        u=u_min, u1=u1, u2=u2, z=z,
        tie_correction_applied=has_ties,
        continuity_correction=continuity and used == METHOD_NORMAL,
        degenerate=degenerate,
    )


def _doubled_midranks(values) -> list[int]:
    # Midranks are half-integers; doubling keeps everything in exact ints.
    return [round(2 * r) for r in midranks(values)]


def spearman(x, y, alternative: str = ALT_TWO_TAILED, method: str = "auto",
             test_name: str = "spearman") -> StatTestResult:
    """Rank correlation of two paired samples (midrank Pearson rho)."""
    x = list(x)
    y = list(y)
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 3:
        raise ValueError("spearman requires n >= 3")
    if alternative not in _ALTERNATIVES:
        raise ValueError(f"unknown alternative {alternative!r}")
    if method == "auto":
        method = METHOD_T
    if method == METHOD_EXACT and n > EXACT_SPEARMAN_MAX_N:
        raise ValueError(f"exact permutation supported for n <= {EXACT_SPEARMAN_MAX_N}")
    if method not in (METHOD_T, METHOD_EXACT):
        raise ValueError(f"unknown method {method!r}")

    rx = _doubled_midranks(x)
    ry = _doubled_midranks(y)
    sum_x = sum(rx)
    sum_y = sum(ry)
    sxx = n * sum(v * v for v in rx) - sum_x * sum_x
    syy = n * sum(v * v for v in ry) - sum_y * sum_y
    if sxx == 0 or syy == 0:
        return StatTestResult(test_name=test_name, p_value=1.0, alternative=alternative,
                              method=method, n1=n, rho=None, degenerate=True)
    sxy = n * sum(u * v for u, v in zip(rx, ry)) - sum_x * sum_y
    rho = sxy / math.sqrt(sxx * syy)
    rho = max(-1.0, min(1.0, rho))

    if method == METHOD_T:
        if abs(rho) >= 1.0:
            p = 0.0 if alternative == ALT_TWO_TAILED else (
                0.0 if (rho > 0) == (alternative == ALT_GREATER) else 1.0)
        else:
            t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
            if alternative == ALT_TWO_TAILED:
                p = 2.0 * _t_sf(abs(t), n - 2)
            elif alternative == ALT_GREATER:
                p = _t_sf(t, n - 2)
            else:
                p = _t_sf(-t, n - 2)
    else:
        # Exact permutation in integer arithmetic: syy is permutation-invariant,
        # so comparing cross-products compares rho values exactly.
        count = 0
        total = 0
        ry_t = tuple(ry)
        if alternative == ALT_TWO_TAILED:
            threshold = abs(sxy)
            for perm in permutations(ry_t):
                total += 1
                s = n * sum(u * v for u, v in zip(rx, perm)) - sum_x * sum_y
                if abs(s) >= threshold:
                    count += 1
        elif alternative == ALT_GREATER:
            for perm in permutations(ry_t):
                total += 1
                s = n * sum(u * v for u, v in zip(rx, perm)) - sum_x * sum_y
                if s >= sxy:
                    count += 1
        else:
            for perm in permutations(ry_t):
                total += 1
                s = n * sum(u * v for u, v in zip(rx, perm)) - sum_x * sum_y
                if s <= sxy:
                    count += 1
        p = count / total

    return StatTestResult(
        test_name=test_name,
        p_value=min(1.0, max(0.0, p)),
        alternative=alternative,
        method=method,
        n1=n,
        rho=rho,
    )
