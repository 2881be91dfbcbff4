"""Finite toy lattices on which the cube-sum quantities are exactly computable.

The lattice is a ring of ``L`` one-dimensional cubes, each carrying a few
candidate points (offsets around the cube center). ``W`` is a tabulated
stand-in for ``|V_p^-|``: symmetric, zero on tuples confined to one cube, and
by default invariant under cyclic shifts of the cubes (the ring version of
translation invariance). Placements inside a cube are multisets of candidate
points, so every supremum is a max over a finite table and depends only on
how many points sit in each cube.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, permutations

import numpy as np


def _shift(ms, s, L):
    return tuple(sorted(((c + s) % L, o) for c, o in ms))


def canonical(ms, L):
    """Representative of a multiset of (cube, offset) points under cyclic cube shifts."""
    return min(_shift(ms, s, L) for s in range(L))


def compositions(p: int, j: int):
    """Nondecreasing k_1 <= ... <= k_j with k_i >= 1 summing to p."""
    def rec(rest, parts, lo):
        if parts == 1:
            if rest >= lo:
                yield (rest,)
            return
        for k in range(lo, rest // parts + 1):
            for tail in rec(rest - k, parts - 1, k):
                yield (k,) + tail
    return list(rec(p, j, 1))


def distinct_permutations(ks):
    """Distinct orderings of ``ks``: equal entries are swapped only once."""
    return sorted(set(permutations(ks)))


@dataclass
class ToyLatticeInstance:
    L: int
    p: int
    n_offsets: int
    W: dict
    occupancy: tuple = ()
    seed: int | None = None
    invariant: bool = True
    pattern_sup: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not 2 <= self.L <= 6:
            raise ValueError("toy lattices use 2 <= L <= 6 cubes")
        if not 2 <= self.p <= 4:
            raise ValueError("toy lattices use 2 <= p <= 4")
        if not self.occupancy:
            self.occupancy = (0,) * self.L
        if len(self.occupancy) != self.L or min(self.occupancy) < 0:
            raise ValueError("occupancy needs one nonnegative count per cube")
        table = {}
        for ms in self.multisets():
            key = self.pattern(ms)
            v = self.w(ms)
            if v < 0:
                raise ValueError("W must be nonnegative")
            if len({c for c, _ in ms}) == 1 and v != 0:
                raise ValueError("W must vanish on single-cube tuples")
            table[key] = max(table.get(key, v), v)
        self.pattern_sup = table

    @property
    def points(self):
        return [(c, o) for c in range(self.L) for o in range(self.n_offsets)]

    def position(self, point, lam=1.0):
        """Coordinate of a candidate point: cube center plus a fixed offset inside the cube."""
        c, o = point
        return lam * (c + (o + 0.5) / self.n_offsets - 0.5)

    def multisets(self):
        return combinations_with_replacement(self.points, self.p)

    def pattern(self, ms):
        cnt = Counter(c for c, _ in ms)
        return tuple(cnt.get(c, 0) for c in range(self.L))

    def w(self, ms):
        key = tuple(sorted(ms))
        if self.invariant:
            key = canonical(key, self.L)
        return self.W.get(key, Fraction(0))

    @classmethod
    def from_function(cls, L, p, n_offsets, fn, occupancy=(), invariant=True):
        """Tabulate ``fn(sorted multiset)``; with ``invariant`` only orbit representatives are queried."""
        W = {}
        for ms in combinations_with_replacement(
                [(c, o) for c in range(L) for o in range(n_offsets)], p):
            key = canonical(ms, L) if invariant else ms
            if key not in W:
                W[key] = Fraction(0) if len({c for c, _ in key}) == 1 else Fraction(fn(key))
        return cls(L, p, n_offsets, W, tuple(occupancy), None, invariant)

    @classmethod
    def random(cls, seed, L, p, n_offsets=2, zero_prob=0.3, max_occ=4, invariant=True):
        """Seeded instance with values k/1000 (exact) and random occupancies."""
        rng = np.random.default_rng(seed)
        W = {}
        for ms in combinations_with_replacement(
                [(c, o) for c in range(L) for o in range(n_offsets)], p):
            key = canonical(ms, L) if invariant else ms
            if key in W:
                continue
            if len({c for c, _ in key}) == 1 or rng.random() < zero_prob:
                W[key] = Fraction(0)
            else:
                W[key] = Fraction(int(rng.integers(1, 1000)), 1000)
        occ = tuple(int(v) for v in rng.integers(0, max_occ + 1, size=L))
        return cls(L, p, n_offsets, W, occ, seed, invariant)

    @classmethod
    def single_orbit(cls, L, p, support, value=Fraction(1), n_offsets=2, occupancy=()):
        """W equal to ``value`` on the cyclic orbit of one cross-cube tuple, zero elsewhere."""
        target = canonical(tuple(sorted(support)), L)
        if len({c for c, _ in target}) == 1:
            raise ValueError("support must span at least two cubes")
        return cls.from_function(L, p, n_offsets,
                                 lambda key: value if key == target else 0, occupancy)


def sup_I(inst: ToyLatticeInstance, ks, cubes) -> Fraction:
    """I_p^{k_1..k_n}(D_1..D_n): sup of W over placements of k_i points in cube D_i."""
    if len(ks) != len(cubes):
        raise ValueError("need one cube per composition part")
    if sum(ks) != inst.p or min(ks) < 1:
        raise ValueError(f"composition {ks} is not a composition of p={inst.p}")
    counts = [0] * inst.L
    for k, c in zip(ks, cubes):
        if not 0 <= c < inst.L:
            raise ValueError(f"cube {c} outside the lattice")
        counts[c] += k
    return inst.pattern_sup.get(tuple(counts), Fraction(0))


def i_sum_k_m(inst: ToyLatticeInstance, k: int, m: int, cube: int) -> Fraction:
    """I_p^{k|m}(D): independent sums over every ordered m-tuple of cubes (repeats allowed)."""
    if k + m != inst.p:
        raise ValueError("need k + m = p")
    total = Fraction(0)
    ks = (k,) + (1,) * m
    for rest in np.ndindex(*(inst.L,) * m):
        total += sup_I(inst, ks, (cube,) + tuple(int(r) for r in rest))
    return total


def i_sum_k_set(inst: ToyLatticeInstance, k: int, ks, cube: int) -> Fraction:
    """I_p^{k|{k_1..k_m}}(D): sets of m distinct cubes other than D.

    For every such set the parts k_1..k_m are assigned in each distinct order
    once: permutations that only swap equal parts are not recounted.
    """
    ks = tuple(ks)
    if k + sum(ks) != inst.p:
        raise ValueError("parts must sum to p")
    others = [c for c in range(inst.L) if c != cube]
    orders = distinct_permutations(ks)
    total = Fraction(0)
    for cubes in combinations(others, len(ks)):
        for order in orders:
            total += sup_I(inst, (k,) + order, (cube,) + cubes)
    return total


def anchor_multiplicity_ratio(k: int, ks, i: int) -> Fraction:
    """mult(k_i)/mult(k) in the parts ``{k, k_1..k_m}``.

    Under cyclic invariance, I^{k|{..k_i..}} * mult(k_i) = I^{k_i|{..k..}} * mult(k)
    (each cube set with an assignment is counted once per cube carrying the anchor value).
    """
    parts = Counter((k,) + tuple(ks))
    return Fraction(parts[ks[i]], parts[k])


def lemma1_sides(inst: ToyLatticeInstance, cube: int):
    lhs = Fraction(0)
    for j in range(2, inst.p + 1):
        for comp in compositions(inst.p, j):
            lhs += i_sum_k_set(inst, comp[0], comp[1:], cube)
    return lhs, i_sum_k_m(inst, 1, inst.p - 1, cube)


def lemma2_sides(inst: ToyLatticeInstance, composition):
    ks = tuple(composition)
    j = len(ks)
    if sum(ks) != inst.p or min(ks) < 1:
        raise ValueError(f"{ks} is not a composition of p={inst.p}")
    occ = inst.occupancy
    p = inst.p
    occupied = [c for c in range(inst.L) if occ[c] >= 1]
    orders = distinct_permutations(ks)
    lhs = Fraction(0)
    for cubes in combinations(occupied, j):
        weight = sum(occ[c] ** p for c in cubes)
        lhs += weight * sum(sup_I(inst, order, cubes) for order in orders)
    rhs = j * sum(occ[c] ** p * i_sum_k_set(inst, ks[0], ks[1:], c) for c in occupied)
    return lhs, rhs
