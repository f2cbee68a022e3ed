"""Area bound evaluation per tree and minimization over trees and slot assignments.

For a tree T and bound values placed on its frontier slots, ``treecrawler``
walks the non-root vertices bottom-up.  Each contributes a semicyclic
triangle on its two outward edges, whose longest side becomes the value of
the edge towards the root.  The root triangle has its longest side capped at
the semicyclic radius of the other two.

``minimize`` takes the least of these over every tree with n slots and every
assignment of the n bounds to slots.  Assignments are tuples ``perm`` with
``perm[slot]`` the index into ``bounds`` placed on that slot; slots follow
:attr:`RootedTree.slot_hosts`.
"""

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import hypgeom
from .errors import DomainError, InvalidArity, MissingCatalog
from .trees import automorphisms, canonicalize, decode, enumerate_trees

#: two bound values this close are ties for witness selection
TIE_TOL = 1e-12

#: rows per vectorized work item; fixed so results never depend on --jobs
MAX_BOUND = 1e50
CHUNK_ROWS = 1 << 15


@dataclass(frozen=True)
class CrawlPlan:
    """Evaluation order for one tree.

    ``steps[i]`` lists the two inputs of non-root vertex i and ``root`` the
    three inputs of the root; an input is ``("slot", p)`` or ``("edge", j)``
    where j is the vertex whose root-ward edge is meant.
    """

    steps: tuple
    root: tuple
    n: int


@lru_cache(maxsize=1024)
def crawl_plan(tree):
    slot_of = {}
    for p, v in enumerate(tree.slot_hosts):
        slot_of.setdefault(v, []).append(p)

    def inputs(v):
        return tuple(("edge", c) for c in tree.children[v]) + tuple(
            ("slot", p) for p in slot_of.get(v, ())
        )

    steps = tuple(inputs(v) for v in range(tree.k))
    return CrawlPlan(steps=steps, root=inputs(tree.root), n=tree.n)


def root_area(a, b, c):
    """Root triangle with each side capped at the semicyclic radius of the others."""
    ma = min(a, hypgeom.semicyclic_radius(b, c))
    mb = min(b, hypgeom.semicyclic_radius(c, a))
    mc = min(c, hypgeom.semicyclic_radius(a, b))
    return hypgeom.triangle_area(ma, mb, mc)


def treecrawler(tree, values):
    """Area bound of ``tree`` with ``values[p]`` (half-sinh) on slot p."""
    if tree.n != len(values):
        raise InvalidArity(f"tree has {tree.n} slots but {len(values)} values were given")
    plan = crawl_plan(tree)
    edge = [0.0] * tree.k
    total = 0.0

    def get(ref):
        kind, j = ref
        return values[j] if kind == "slot" else edge[j]

    try:
        for i, (x, y) in enumerate(plan.steps):
            a, b = get(x), get(y)
            total += hypgeom.semicyclic_area(a, b)
            edge[i] = hypgeom.semicyclic_radius(a, b)
        total += root_area(*(get(r) for r in plan.root))
    except DomainError as exc:
        raise DomainError(f"tree {tree.code}, slot values {tuple(values)}: {exc}") from exc
    return total


def crawl_batch(plan, vals):
    """Vectorized :func:`treecrawler` over the rows of ``vals`` (shape m x n)."""
    vals = np.asarray(vals, dtype=float)
    sq = vals * vals
    edge_sq = [None] * len(plan.steps)
    total = np.zeros(vals.shape[0])

    def get(ref):
        kind, j = ref
        return sq[:, j] if kind == "slot" else edge_sq[j]

    for i, (x, y) in enumerate(plan.steps):
        a2, b2 = get(x), get(y)
        total += 2.0 * np.arcsin(np.sqrt(a2 * b2 / ((1.0 + a2) * (1.0 + b2))))
        edge_sq[i] = a2 + b2
    a2, b2, c2 = (get(r) for r in plan.root)
    ma = np.minimum(a2, b2 + c2)
    mb = np.minimum(b2, c2 + a2)
    mc = np.minimum(c2, a2 + b2)
    num = ma + mb + mc + 2.0
    x = num / (2.0 * np.sqrt((1.0 + ma) * (1.0 + mb) * (1.0 + mc)))
    bad = np.abs(x) > 1.0 + hypgeom.CLAMP_EPS
    if bad.any():
        row = int(np.argmax(bad))
        raise DomainError(f"root triangle invalid for slot values {tuple(vals[row])}")
    disc = 2.0 * (ma * mb + mb * mc + mc * ma) - (ma * ma + mb * mb + mc * mc) + 4.0 * ma * mb * mc
    total += 2.0 * np.arctan2(np.sqrt(np.maximum(disc, 0.0)), num)
    return total


def flat_bound(n, d):
    """The older bound (n - 2) times the semicyclic area with two sides d."""
    if n < 3:
        raise InvalidArity(f"n must be at least 3, got {n}")
    return (n - 2) * hypgeom.a_m(d)


# -- slot assignments -------------------------------------------------------


def full_assignments(n):
    """All n! assignments in lexicographic order."""
    return itertools.permutations(range(n))


def _coset_reps(groups, n):
    """Lex-least member of every coset of the slot-swap group, in lex order."""
    sizes = [len(g) for _, g in groups]

    def rec(i, remaining):
        if i == len(sizes):
            yield ()
            return
        for chosen in itertools.combinations(remaining, sizes[i]):
            rest = tuple(x for x in remaining if x not in chosen)
            for tail in rec(i + 1, rest):
                yield chosen + tail

    yield from rec(0, tuple(range(n)))


def reduced_assignments(tree, n=None):
    """One assignment per orbit of root-preserving automorphisms on swap cosets.

    Each yielded assignment is the lexicographically least member of its
    orbit, and they come out in lexicographic order.
    """
    n = tree.n if n is None else n
    if n != tree.n:
        raise InvalidArity(f"tree has {tree.n} slots, not {n}")
    groups = tree.slot_groups()
    hosts = [v for v, _ in groups]
    where = {v: i for i, v in enumerate(hosts)}
    bounds_of = []
    pos = 0
    for _, g in groups:
        bounds_of.append((pos, pos + len(g)))
        pos += len(g)
    # each nontrivial automorphism as a permutation of slot groups
    moves = []
    for phi in automorphisms(tree)[1:]:
        moves.append([where[phi[v]] for v in hosts])

    for rep in _coset_reps(groups, n):
        if moves and not _is_orbit_min(rep, moves, bounds_of):
            continue
        yield rep


def _is_orbit_min(rep, moves, bounds_of):
    for move in moves:
        image = [None] * len(bounds_of)
        for src, dst in enumerate(move):
            lo, hi = bounds_of[src]
            image[dst] = rep[lo:hi]
        flat = tuple(x for part in image for x in sorted(part))
        if flat < rep:
            return False
    return True


# -- minimization -----------------------------------------------------------


@dataclass(frozen=True)
class BoundQuery:
    bounds: tuple
    reduce_symmetry: bool = True
    trees: tuple = None  # codes in catalog order; None means native enumeration

    def __post_init__(self):
        b = tuple(float(x) for x in self.bounds)
        if len(b) < 3:
            raise InvalidArity(f"need at least 3 bounds, got {len(b)}")
        for x in b:
            if not x > 0.0 or math.isinf(x):
                raise ValueError(f"bounds must be positive and finite, got {x!r}")
            if x > MAX_BOUND:
                # cubes of squared values must stay finite in the batch kernel
                raise DomainError(f"bound {x!r} exceeds the supported maximum {MAX_BOUND:g}", (x,))
        object.__setattr__(self, "bounds", b)

    @property
    def n(self):
        return len(self.bounds)


@dataclass(frozen=True)
class BoundResult:
    value: float
    tree_index: int
    tree_code: tuple
    canonical_code: tuple
    assignment: tuple
    evaluations: int
    bounds: tuple = field(default=())

    @property
    def slot_values(self):
        return tuple(self.bounds[i] for i in self.assignment)


@dataclass(frozen=True)
class _Partial:
    value: float  # least value in the item
    best: tuple  # (value, assignment) lex-least within TIE_TOL of ``value``
    evaluations: int


def _tree_source(query):
    if query.trees is None:
        return enumerate_trees(query.n)
    codes = [tuple(c) for c in query.trees]
    if not codes:
        raise MissingCatalog(f"tree catalog has no trees with {query.n} slots")
    for c in codes:
        if len(c) != query.n - 3:
            raise MissingCatalog(f"catalog code {c} does not have {query.n - 3} edges")
    return codes


@lru_cache(maxsize=4)
def lex_permutations(n):
    """All permutations of range(n) as rows of an array, in lexicographic order."""
    perms = np.zeros((1, 0), dtype=np.int8)
    for m in range(1, n + 1):
        # prepend each first element to the lex-ordered permutations of the rest
        blocks = []
        for first in range(m):
            rest = np.array([x for x in range(m) if x != first], dtype=np.int8)
            block = np.empty((perms.shape[0], m), dtype=np.int8)
            block[:, 0] = first
            block[:, 1:] = rest[perms]
            blocks.append(block)
        perms = np.concatenate(blocks)
    perms.setflags(write=False)
    return perms


@lru_cache(maxsize=64)
def assignment_matrix(code, n, reduce_symmetry):
    """Assignments to examine for one tree, one per row, in lex order."""
    if not reduce_symmetry:
        return lex_permutations(n)
    rows = np.array(list(reduced_assignments(decode(code), n)), dtype=np.int8)
    rows.setflags(write=False)
    return rows


def _eval_item(code, n, reduce_symmetry, start, stop, bounds, window=None):
    """Evaluate rows [start, stop) of a tree's assignment matrix.

    Returns the least value found and the lex-least row whose value is at
    most ``window`` (default: least value plus ``TIE_TOL``).
    """
    rows = assignment_matrix(code, n, reduce_symmetry)[start:stop]
    plan = crawl_plan(decode(code))
    vals = crawl_batch(plan, np.asarray(bounds)[rows])
    low = float(vals.min())
    if window is None:
        window = low + TIE_TOL
    hits = np.flatnonzero(vals <= window)
    best = None
    if hits.size:
        first = int(hits[0])
        best = (float(vals[first]), tuple(int(x) for x in rows[first]))
    return _Partial(low, best, len(rows))


def _eval_task(args):
    return _eval_item(*args)


def minimize(query, jobs=1):
    """Least area bound over all trees and slot assignments.

    Among all (tree, assignment) pairs within ``TIE_TOL`` of the minimum the
    witness is the one with least (canonical code, assignment).  The result
    does not depend on ``jobs``.
    """
    if not isinstance(query, BoundQuery):
        query = BoundQuery(tuple(query))
    codes = _tree_source(query)
    bounds = query.bounds
    n = query.n

    tasks = []
    for t_index, code in enumerate(codes):
        rows = assignment_matrix(code, n, query.reduce_symmetry).shape[0]
        for start in range(0, rows, CHUNK_ROWS):
            stop = min(start + CHUNK_ROWS, rows)
            tasks.append((t_index, (code, n, query.reduce_symmetry, start, stop, bounds)))

    args = [a for _, a in tasks]
    if jobs and jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            partials = list(pool.map(_eval_task, args, chunksize=1))
    else:
        partials = [_eval_task(a) for a in args]

    if not all(math.isfinite(p.value) for p in partials):
        raise DomainError("search produced a non-finite area", query.bounds)
    global_min = min(p.value for p in partials)
    cut = global_min + TIE_TOL
    canon = {}
    best_key = None
    best = None
    for (t_index, a), part in zip(tasks, partials):
        if part.value > cut:
            continue
        hit = part.best
        if hit[0] > cut:
            # the item's own tie window reached past the global one
            hit = _eval_item(*a, window=cut).best
        code = a[0]
        if code not in canon:
            canon[code] = canonicalize(decode(code))
        key = (canon[code], hit[1])
        if best_key is None or key < best_key:
            best_key = key
            best = (t_index, code)

    t_index, code = best
    return BoundResult(
        value=global_min,
        tree_index=t_index,
        tree_code=code,
        canonical_code=canon[code],
        assignment=best_key[1],
        evaluations=sum(p.evaluations for p in partials),
        bounds=bounds,
    )


def default_jobs():
    return max(1, os.cpu_count() or 1)
