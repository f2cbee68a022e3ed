"""Brute-force cross-checks for the test suite.

Nothing here is used by the production search.  Each function reaches its
answer by a different route from the code it checks: angle defect instead of
the Heron-type formula, every parent sequence instead of leaf growth, a
generating-function count instead of listing, and a plain loop over all n!
permutations instead of the reduced vectorized search.
"""

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from . import hypgeom, search
from .errors import CostGuard, DomainError, InvalidArity
from .trees import canonicalize, decode


@dataclass
class OracleReport:
    checked_cases: int = 0
    max_discrepancy: float = 0.0
    first_failure: str = None

    def record(self, discrepancy, case, tol):
        self.checked_cases += 1
        if discrepancy > self.max_discrepancy:
            self.max_discrepancy = discrepancy
        if discrepancy > tol and self.first_failure is None:
            self.first_failure = f"{case}: discrepancy {discrepancy:.3e}"

    @property
    def ok(self):
        return self.first_failure is None


def angle_defect_area(a, b, c):
    """Triangle area as pi minus the angle sum, from the hyperbolic law of cosines.

    Sides are given as half-sinh values, like everywhere else.
    """
    la, lb, lc = (2.0 * math.asinh(x) for x in (a, b, c))
    if not (la < lb + lc and lb < la + lc and lc < la + lb):
        raise DomainError(f"lengths {(la, lb, lc)} violate the triangle inequality")

    def angle(opp, s1, s2):
        cos_ = (math.cosh(s1) * math.cosh(s2) - math.cosh(opp)) / (math.sinh(s1) * math.sinh(s2))
        return math.acos(max(-1.0, min(1.0, cos_)))

    return math.pi - angle(la, lb, lc) - angle(lb, la, lc) - angle(lc, la, lb)


def random_triangle(rng, lo=0.05, hi=10.0):
    """Half-sinh sides of a random valid triangle, uniform in s then rejected."""
    while True:
        s = [rng.uniform(lo, hi) for _ in range(3)]
        la, lb, lc = sorted(2.0 * math.asinh(x) for x in s)
        # keep clear of degenerate triangles, where acos loses all precision
        if lc < la + lb - 1e-3:
            return tuple(s)


def heron_vs_defect(cases=10_000, seed=0, tol=1e-10):
    rng = random.Random(seed)
    report = OracleReport()
    for _ in range(cases):
        a, b, c = random_triangle(rng)
        diff = abs(hypgeom.triangle_area(a, b, c) - angle_defect_area(a, b, c))
        report.record(diff, (a, b, c), tol)
    return report


# -- trees ------------------------------------------------------------------

NAIVE_MAX_K = 7


def _ahu(children, v):
    return "(" + "".join(sorted(_ahu(children, c) for c in children[v])) + ")"


def naive_trees(k):
    """One parent sequence per rooted-isomorphism class, found by exhaustion.

    Every sequence with ``i < p_i <= k`` is tried; those with a vertex of
    valence above three are dropped, and the rest are deduplicated by
    comparing AHU strings.
    """
    if k > NAIVE_MAX_K:
        raise CostGuard(f"naive enumeration capped at k = {NAIVE_MAX_K}, got {k}")
    if k < 0:
        raise InvalidArity("edge count must be nonnegative")
    seen = {}
    for seq in itertools.product(*(range(i + 1, k + 1) for i in range(k))):
        children = [[] for _ in range(k + 1)]
        for i, p in enumerate(seq):
            children[p].append(i)
        if len(children[k]) > 3 or any(len(children[v]) > 2 for v in range(k)):
            continue
        seen.setdefault(_ahu(children, k), seq)
    return list(seen.values())


def naive_tree_count(k):
    return len(naive_trees(k))


def _series_mul(a, b, size):
    out = [Fraction(0)] * size
    for i, x in enumerate(a):
        if x:
            for j in range(size - i):
                out[i + j] += x * b[j]
    return out


def _series_sub(p, m, size):
    """p(x^m) truncated."""
    out = [Fraction(0)] * size
    for i in range(0, size):
        if i * m < size:
            out[i * m] = p[i]
    return out


def polya_tree_count(k):
    """Count the trees with k edges via Polya cycle-index series.

    A non-root vertex has at most two children and the root at most three,
    so planted subtrees satisfy P = x (1 + Z(S1; P) + Z(S2; P)) and the root
    series is x (1 + Z(S1) + Z(S2) + Z(S3)).  Returns the coefficient of
    x^(k+1).
    """
    size = k + 2
    p = [Fraction(0)] * size
    for _ in range(size):
        p2 = _series_mul(p, p, size)
        px2 = _series_sub(p, 2, size)
        inner = [Fraction(int(i == 0)) + p[i] + (p2[i] + px2[i]) / 2 for i in range(size)]
        p = [Fraction(0)] + inner[: size - 1]
    p2 = _series_mul(p, p, size)
    p3 = _series_mul(p2, p, size)
    px2 = _series_sub(p, 2, size)
    px3 = _series_sub(p, 3, size)
    ppx2 = _series_mul(p, px2, size)
    root = [
        Fraction(int(i == 0)) + p[i] + (p2[i] + px2[i]) / 2 + (p3[i] + 3 * ppx2[i] + 2 * px3[i]) / 6
        for i in range(size)
    ]
    coeff = root[k]  # multiplied by x for the root vertex itself
    assert coeff.denominator == 1
    return int(coeff)


# -- search -----------------------------------------------------------------

EXHAUSTIVE_MAX_N = 8


def exhaustive_minimize(bounds):
    """Minimum over every tree and every one of the n! permutations, plainly.

    Trees come from :func:`naive_trees` and are relabeled canonically so that
    witnesses can be compared with the production search.
    """
    bounds = tuple(float(b) for b in bounds)
    n = len(bounds)
    if n < 3:
        raise InvalidArity(f"need at least 3 bounds, got {n}")
    if n > EXHAUSTIVE_MAX_N:
        raise CostGuard(f"exhaustive search capped at n = {EXHAUSTIVE_MAX_N}, got {n}")

    codes = sorted(canonicalize(decode(seq)) for seq in naive_trees(n - 3))
    results = []
    for t_index, code in enumerate(codes):
        tree = decode(code)
        for perm in itertools.permutations(range(n)):
            value = search.treecrawler(tree, [bounds[i] for i in perm])
            results.append((value, code, perm, t_index))

    low = min(r[0] for r in results)
    ties = [r for r in results if r[0] <= low + search.TIE_TOL]
    _, code, perm, t_index = min(ties, key=lambda r: (r[1], r[2]))
    return search.BoundResult(
        value=low,
        tree_index=t_index,
        tree_code=code,
        canonical_code=code,
        assignment=perm,
        evaluations=len(results),
        bounds=bounds,
    )
