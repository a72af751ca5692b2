"""Finite groups as validated Cayley tables.

Elements are dense integer indices 0..order-1 with the identity at index 0.
Everything downstream (fibers, cosets, permutation representations) indexes
off these integers, so the table is validated once at construction time.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    MissingIdentity,
    NonAssociativeTable,
    NotAPermutationRow,
    NotASubgroup,
    NotNormal,
)

# Above this order the O(n^3) associativity sweep and the subgroup search get
# slow; the toolkit targets small examples, so warn rather than refuse.
SOFT_ORDER_CAP = 48


def _validate_table(table: tuple[tuple[int, ...], ...]) -> None:
    n = len(table)
    elems = set(range(n))
    for i, row in enumerate(table):
        if len(row) != n or set(row) != elems:
            raise NotAPermutationRow(f"row {i} is not a permutation of 0..{n - 1}")
    for j in range(n):
        col = {table[i][j] for i in range(n)}
        if col != elems:
            raise NotAPermutationRow(f"column {j} is not a permutation of 0..{n - 1}")
    identity = None
    for e in range(n):
        if all(table[e][t] == t and table[t][e] == t for t in range(n)):
            identity = e
            break
    if identity is None:
        raise MissingIdentity("no two-sided identity element")
    if identity != 0:
        raise MissingIdentity(
            f"identity sits at index {identity}; relabel so it is element 0"
        )
    for a in range(n):
        for b in range(n):
            tab = table[a][b]
            for c in range(n):
                if table[tab][c] != table[a][table[b][c]]:
                    raise NonAssociativeTable(f"(a,b,c)=({a},{b},{c})")


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group on elements 0..order-1, identity at 0."""

    table: tuple[tuple[int, ...], ...]
    name: str = "G"
    inverse: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        _validate_table(self.table)
        n = len(self.table)
        if n > SOFT_ORDER_CAP:
            import warnings

            warnings.warn(f"group of order {n} exceeds the soft cap {SOFT_ORDER_CAP}")
        inv = [0] * n
        for s in range(n):
            inv[s] = self.table[s].index(0)
        object.__setattr__(self, "inverse", tuple(inv))

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def identity(self) -> int:
        return 0

    def mul(self, s: int, t: int) -> int:
        return self.table[s][t]

    def inv(self, s: int) -> int:
        return self.inverse[s]

    def conjugate(self, s: int, x: int) -> int:
        """s x s^-1."""
        return self.mul(self.mul(s, x), self.inv(s))

    def elements(self) -> range:
        return range(self.order)

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return f"FiniteGroup({self.name}, order={self.order})"


def cyclic(n: int) -> FiniteGroup:
    """Z/nZ under addition."""
    if n < 1:
        raise MissingIdentity("order must be at least 1")
    table = tuple(tuple((a + b) % n for b in range(n)) for a in range(n))
    return FiniteGroup(table, name=f"C{n}")


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the regular n-gon, order 2n.

    Element f*n + a encodes flip^f rot^a; rot*flip = flip*rot^-1.
    """
    if n < 1:
        raise MissingIdentity("order must be at least 1")

    def mul(x: int, y: int) -> int:
        f1, a1 = divmod(x, n)
        f2, a2 = divmod(y, n)
        a = (a2 - a1 if f2 else a1 + a2) % n
        return ((f1 + f2) % 2) * n + a

    table = tuple(tuple(mul(x, y) for y in range(2 * n)) for x in range(2 * n))
    return FiniteGroup(table, name=f"D{n}")


def symmetric(n: int) -> FiniteGroup:
    """S_n with elements enumerated lexicographically (identity first)."""
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    table = tuple(
        tuple(index[tuple(p[q[k]] for k in range(n))] for q in perms) for p in perms
    )
    return FiniteGroup(table, name=f"S{n}")


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    """G x H with (a, b) encoded as a*|H| + b."""
    m = h.order
    table = tuple(
        tuple(
            g.mul(x // m, y // m) * m + h.mul(x % m, y % m)
            for y in range(g.order * m)
        )
        for x in range(g.order * m)
    )
    return FiniteGroup(table, name=f"{g.name}x{h.name}")


def from_table(table) -> FiniteGroup:
    """Build a group from an explicit Cayley table (validated)."""
    tab = tuple(tuple(int(v) for v in row) for row in table)
    return FiniteGroup(tab, name=f"table({len(tab)})")


def symmetric_permutations(n: int) -> list[tuple[int, ...]]:
    """The point images behind each element index of symmetric(n)."""
    return list(itertools.permutations(range(n)))


@dataclass(frozen=True)
class NormalSubgroup:
    """A normal subgroup given by its sorted member indices."""

    group: FiniteGroup
    members: tuple[int, ...]

    def __post_init__(self) -> None:
        g = self.group
        mem = set(self.members)
        if 0 not in mem:
            raise NotASubgroup("a subgroup must contain the identity")
        for a in mem:
            if g.inv(a) not in mem:
                raise NotASubgroup(f"not inverse-closed at {a}")
            for b in mem:
                if g.mul(a, b) not in mem:
                    raise NotASubgroup(f"not closed at ({a},{b})")
        for s in g.elements():
            for x in mem:
                if g.conjugate(s, x) not in mem:
                    raise NotNormal(f"conjugate of {x} by {s} escapes")
        object.__setattr__(self, "members", tuple(sorted(mem)))

    @property
    def order(self) -> int:
        return len(self.members)

    def is_trivial(self) -> bool:
        return self.order == 1


def is_subgroup(g: FiniteGroup, members) -> bool:
    mem = set(members)
    if 0 not in mem:
        return False
    return all(g.mul(a, b) in mem for a in mem for b in mem)


def subgroup_closure(g: FiniteGroup, generators) -> tuple[int, ...]:
    """Smallest subgroup containing the generators."""
    mem = {0} | set(generators)
    frontier = list(mem)
    while frontier:
        a = frontier.pop()
        for b in list(mem):
            for c in (g.mul(a, b), g.mul(b, a), g.inv(a)):
                if c not in mem:
                    mem.add(c)
                    frontier.append(c)
    return tuple(sorted(mem))


def conjugacy_classes(g: FiniteGroup) -> list[tuple[int, ...]]:
    """Conjugacy classes, each sorted, ordered by smallest member."""
    seen = [False] * g.order
    classes = []
    for x in g.elements():
        if seen[x]:
            continue
        orbit = {g.conjugate(s, x) for s in g.elements()}
        for y in orbit:
            seen[y] = True
        classes.append(tuple(sorted(orbit)))
    classes.sort(key=lambda c: c[0])
    return classes


def normal_subgroups(g: FiniteGroup) -> list[NormalSubgroup]:
    """All normal subgroups, smallest order first.

    A normal subgroup is a union of conjugacy classes containing {e} that is
    closed under the product, so it suffices to scan class subsets.
    """
    classes = conjugacy_classes(g)
    rest = [c for c in classes if c != (0,)]
    found = []
    for mask in range(1 << len(rest)):
        mem = {0}
        for i, cls in enumerate(rest):
            if mask >> i & 1:
                mem.update(cls)
        if all(g.mul(a, b) in mem for a in mem for b in mem):
            found.append(tuple(sorted(mem)))
    found.sort(key=lambda m: (len(m), m))
    return [NormalSubgroup(g, m) for m in found]


@dataclass(frozen=True)
class Quotient:
    """Left-coset structure of G by a normal subgroup.

    coset_of[s] is the quotient-group index of sN; section[k] is the minimal
    element of coset k, which forces section(eN) = e because the identity is
    element 0.
    """

    group: FiniteGroup
    subgroup: NormalSubgroup
    coset_of: tuple[int, ...]
    section: tuple[int, ...]
    quotient_group: FiniteGroup

    def n_part(self, s: int) -> int:
        """The n in s = section(sN) * n; lies in the subgroup."""
        g = self.group
        return g.mul(g.inv(self.section[self.coset_of[s]]), s)

    @property
    def index(self) -> int:
        return self.quotient_group.order


def quotient(g: FiniteGroup, subgroup) -> Quotient:
    """Quotient data for G / N; raises NotNormal if N is not normal."""
    n = subgroup if isinstance(subgroup, NormalSubgroup) else NormalSubgroup(g, tuple(subgroup))
    if n.group is not g and n.group.table != g.table:
        raise NotASubgroup("subgroup belongs to a different group")
    cosets = []
    coset_of = [-1] * g.order
    for s in g.elements():
        if coset_of[s] >= 0:
            continue
        mem = tuple(sorted(g.mul(s, x) for x in n.members))
        cosets.append(mem)
        for y in mem:
            coset_of[y] = 0  # mark; real index assigned after sorting
    cosets.sort(key=lambda c: c[0])
    for k, mem in enumerate(cosets):
        for y in mem:
            coset_of[y] = k
    section = tuple(c[0] for c in cosets)
    qtable = tuple(
        tuple(coset_of[g.mul(section[a], section[b])] for b in range(len(cosets)))
        for a in range(len(cosets))
    )
    qg = FiniteGroup(qtable, name=f"{g.name}/{n.members}")
    return Quotient(g, n, tuple(coset_of), section, qg)


def left_regular(g: FiniteGroup) -> np.ndarray:
    """Permutation matrices lam[s] with lam[s] e_h = e_{s h}."""
    n = g.order
    lam = np.zeros((n, n, n), dtype=complex)
    for s in g.elements():
        for h in g.elements():
            lam[s, g.mul(s, h), h] = 1.0
    return lam


def right_regular(g: FiniteGroup) -> np.ndarray:
    """Permutation matrices rho[r] with rho[r] e_h = e_{h r^-1}.

    Commutes with the left representation and satisfies rho[r] rho[t] = rho[rt].
    """
    n = g.order
    rho = np.zeros((n, n, n), dtype=complex)
    for r in g.elements():
        for h in g.elements():
            rho[r, g.mul(h, g.inv(r)), h] = 1.0
    return rho
