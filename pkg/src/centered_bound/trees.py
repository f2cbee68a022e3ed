"""Rooted trees whose vertices are trivalent once frontier edges are added.

A tree with k edges is encoded as a k-tuple ``(n_0, ..., n_{k-1})``: vertex
``v_i`` is joined to ``v_{n_i}``, its neighbour one step closer to the root,
and the root is ``v_k``.  Every vertex is padded with ``3 - deg`` frontier
slots, so a tree with k edges has ``k + 3`` slots in total.

Codes are not unique.  :func:`canonicalize` picks the lexicographically least
code among those whose vertices are listed by nonincreasing depth.
"""

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import InvalidArity, InvalidCode

MAX_VALENCE = 3


@dataclass(frozen=True)
class RootedTree:
    code: tuple
    parent: tuple
    children: tuple
    depth: tuple
    frontier_slots: tuple

    @property
    def k(self):
        """Number of edges."""
        return len(self.code)

    @property
    def root(self):
        return len(self.code)

    @property
    def vertex_count(self):
        return len(self.code) + 1

    @property
    def n(self):
        """Number of frontier slots, i.e. the polygon edge count."""
        return sum(self.frontier_slots)

    def degree(self, v):
        return len(self.children[v]) + (0 if v == self.root else 1)

    @property
    def slot_hosts(self):
        """Host vertex of each slot position.

        Slots are listed root first, then by decreasing vertex index.  The
        bound values handed to the crawler are read in this order.
        """
        hosts = []
        for v in range(self.root, -1, -1):
            hosts.extend([v] * self.frontier_slots[v])
        return tuple(hosts)

    def slot_groups(self):
        """Slot positions grouped by host vertex, in slot order."""
        groups = []
        pos = 0
        for v in range(self.root, -1, -1):
            c = self.frontier_slots[v]
            if c:
                groups.append((v, tuple(range(pos, pos + c))))
            pos += c
        return tuple(groups)

    def leaf_count(self):
        """Vertices of valence one in the tree itself."""
        return sum(1 for v in range(self.vertex_count) if self.degree(v) == 1)


def decode(code):
    """Build the :class:`RootedTree` encoded by ``code``."""
    code = tuple(code)
    k = len(code)
    children = [[] for _ in range(k + 1)]
    for i, p in enumerate(code):
        if isinstance(p, bool) or not isinstance(p, int):
            raise InvalidCode(f"entry {i} is not an integer: {p!r}", i)
        if p < 0 or p > k:
            raise InvalidCode(f"entry {i} = {p} is out of range 0..{k}", i)
        if p <= i:
            raise InvalidCode(
                f"entry {i} = {p} points to a vertex no closer to the root", i
            )
        children[p].append(i)
        deg = len(children[p]) + (0 if p == k else 1)
        if deg > MAX_VALENCE:
            raise InvalidCode(f"vertex {p} exceeds valence {MAX_VALENCE} at entry {i}", i)

    depth = [0] * (k + 1)
    for i in range(k - 1, -1, -1):
        depth[i] = depth[code[i]] + 1
    slots = []
    for v in range(k + 1):
        deg = len(children[v]) + (0 if v == k else 1)
        slots.append(MAX_VALENCE - deg)
    return RootedTree(
        code=code,
        parent=code,
        children=tuple(tuple(c) for c in children),
        depth=tuple(depth),
        frontier_slots=tuple(slots),
    )


def encode(tree, order):
    """Code of ``tree`` when its vertices are listed in ``order`` (root last)."""
    pos = {v: i for i, v in enumerate(order)}
    if order[-1] != tree.root or len(pos) != tree.vertex_count:
        raise ValueError("order must list every vertex once, ending with the root")
    return tuple(pos[tree.parent[v]] for v in order[:-1])


def canonical_order(tree):
    """Vertex order producing the canonical code.

    Levels are filled deepest first.  Within a level, vertices are ranked by
    how many children they have in each child class (more first), which
    makes the code block of the level below as small as possible; ties keep
    the parent's position as secondary key.  Equal keys at a level are
    interchangeable as far as the code is concerned.
    """
    k = tree.k
    max_depth = max(tree.depth)
    levels = [[] for _ in range(max_depth + 1)]
    for v in range(k + 1):
        levels[tree.depth[v]].append(v)

    # class rank of each vertex within its level, computed bottom-up
    rank = [0] * (k + 1)
    n_classes = 1
    for d in range(max_depth, -1, -1):
        keys = {}
        for v in levels[d]:
            counts = [0] * n_classes
            for c in tree.children[v]:
                counts[rank[c]] += 1
            keys[v] = tuple(counts)
        distinct = sorted(set(keys.values()), reverse=True)
        index = {key: r for r, key in enumerate(distinct)}
        for v in levels[d]:
            rank[v] = index[keys[v]]
        n_classes = len(distinct)

    # relative position inside each level, assigned top-down
    local = [0] * (k + 1)
    for d in range(1, max_depth + 1):
        ordered = sorted(levels[d], key=lambda v: (rank[v], local[tree.parent[v]]))
        for i, v in enumerate(ordered):
            local[v] = i
        levels[d] = ordered

    order = []
    for d in range(max_depth, -1, -1):
        order.extend(levels[d])
    return order


def canonicalize(tree):
    """Canonical code of ``tree``; equal exactly for rooted-isomorphic trees."""
    if tree.k == 0:
        return ()
    return encode(tree, canonical_order(tree))


def canonical_code(code):
    return canonicalize(decode(code))


def edge_count(n):
    if n < 3:
        raise InvalidArity(f"a polygon needs at least 3 edges, got {n}")
    return n - 3


@lru_cache(maxsize=None)
def _trees_with_edges(k):
    if k == 0:
        return ((),)
    found = set()
    for code in _trees_with_edges(k - 1):
        tree = decode(code)
        for v in range(tree.vertex_count):
            if tree.degree(v) < MAX_VALENCE:
                found.add(canonicalize(_add_leaf(tree, v)))
    return tuple(sorted(found))


def _add_leaf(tree, v):
    # new leaf takes index 0, everything else shifts up by one
    code = (v + 1,) + tuple(p + 1 for p in tree.code)
    return decode(code)


def enumerate_trees(n):
    """Canonical codes of every rooted tree with ``n`` frontier slots, sorted."""
    return list(_trees_with_edges(edge_count(n)))


def subtree_forms(tree):
    """AHU-style string for the subtree hanging from each vertex."""
    forms = [""] * tree.vertex_count
    for v in range(tree.vertex_count):  # children always have lower index
        forms[v] = "(" + "".join(sorted(forms[c] for c in tree.children[v])) + ")"
    return forms


def _isomorphisms(tree, forms, u, w):
    """Every isomorphism subtree(u) -> subtree(w), as lists of vertex pairs."""
    groups_u = {}
    groups_w = {}
    for c in tree.children[u]:
        groups_u.setdefault(forms[c], []).append(c)
    for c in tree.children[w]:
        groups_w.setdefault(forms[c], []).append(c)
    choices = []
    for form, members in sorted(groups_u.items()):
        targets = groups_w[form]
        options = []
        for perm in itertools.permutations(targets):
            sub = [_isomorphisms(tree, forms, a, b) for a, b in zip(members, perm)]
            for parts in itertools.product(*sub):
                options.append([pair for part in parts for pair in part])
        choices.append(options)
    result = []
    for combo in itertools.product(*choices):
        result.append([(u, w)] + [pair for part in combo for pair in part])
    return result


def automorphisms(tree):
    """Root-preserving automorphisms as tuples ``phi`` with ``phi[v]`` the image of v.

    The identity comes first.
    """
    forms = subtree_forms(tree)
    autos = set()
    for pairs in _isomorphisms(tree, forms, tree.root, tree.root):
        phi = [0] * tree.vertex_count
        for a, b in pairs:
            phi[a] = b
        autos.add(tuple(phi))
    identity = tuple(range(tree.vertex_count))
    autos.discard(identity)
    return [identity] + sorted(autos)


@dataclass(frozen=True)
class SlotSymmetry:
    """Symmetries of the slot assignment problem for one tree.

    ``slot_groups`` pairs each host vertex with its slot positions; slots in
    one group are interchangeable and together generate the swap subgroup.
    ``automorphisms`` lists the root-preserving vertex automorphisms.
    """

    slot_groups: tuple
    automorphisms: tuple
    n: int

    @property
    def swap_group_order(self):
        return math.prod(math.factorial(len(g)) for _, g in self.slot_groups)

    @property
    def coset_count(self):
        return math.factorial(self.n) // self.swap_group_order

    def vertex_orbits(self):
        seen = set()
        orbits = []
        for v, _ in self.slot_groups:
            if v in seen:
                continue
            orbit = sorted({phi[v] for phi in self.automorphisms}, reverse=True)
            seen.update(orbit)
            orbits.append(tuple(orbit))
        return orbits


def automorphism_orbits(tree):
    return SlotSymmetry(
        slot_groups=tree.slot_groups(),
        automorphisms=tuple(automorphisms(tree)),
        n=tree.n,
    )


def render_ascii(tree):
    """Indented drawing with the root marked by ``*``."""
    lines = []

    def walk(v, prefix, last, top):
        slots = tree.frontier_slots[v]
        label = f"v{v}" + ("*" if v == tree.root else "") + f" [{slots}]"
        if top:
            lines.append(label)
            child_prefix = ""
        else:
            lines.append(prefix + ("`-- " if last else "|-- ") + label)
            child_prefix = prefix + ("    " if last else "|   ")
        kids = sorted(tree.children[v], reverse=True)
        for i, c in enumerate(kids):
            walk(c, child_prefix, i == len(kids) - 1, False)

    walk(tree.root, "", True, True)
    return "\n".join(lines)
