import math
from collections import Counter
from fractions import Fraction
from itertools import combinations_with_replacement, permutations, product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from superstab.lattice import (ToyLatticeInstance, anchor_multiplicity_ratio, compositions,
                               distinct_permutations, i_sum_k_m, i_sum_k_set, sup_I)


# -- naive oracle: enumerate placements directly, no pattern table -------------

def naive_sup(inst, ks, cubes):
    slots = [list(combinations_with_replacement(
        [(c, o) for o in range(inst.n_offsets)], k)) for k, c in zip(ks, cubes)]
    return max(inst.w(sum(choice, ())) for choice in product(*slots))


def naive_k_m(inst, k, m, cube):
    return sum(naive_sup(inst, (k,) + (1,) * m, (cube,) + rest)
               for rest in product(range(inst.L), repeat=m))


def naive_k_set(inst, k, ks, cube):
    # ordered distinct cube tuples count every set once per permutation of the parts;
    # divide out the permutations that only swap equal parts
    others = [c for c in range(inst.L) if c != cube]
    total = sum(naive_sup(inst, (k,) + tuple(ks), (cube,) + cubes)
                for cubes in permutations(others, len(ks)))
    return total / math.prod(math.factorial(v) for v in Counter(ks).values())


def test_compositions_and_permutations():
    assert compositions(4, 2) == [(1, 3), (2, 2)]
    assert compositions(4, 3) == [(1, 1, 2)]
    assert compositions(7, 4) == [(1, 1, 1, 4), (1, 1, 2, 3), (1, 2, 2, 2)]
    assert distinct_permutations((1, 1, 2)) == [(1, 1, 2), (1, 2, 1), (2, 1, 1)]
    assert len(distinct_permutations((2, 2, 2, 1))) == 4


def test_zero_w():
    inst = ToyLatticeInstance.from_function(4, 3, 2, lambda key: 0)
    assert i_sum_k_m(inst, 1, 2, 0) == 0
    assert i_sum_k_set(inst, 1, (1, 1), 0) == 0


def test_constant_pair_value():
    c = Fraction(3, 7)
    inst = ToyLatticeInstance.from_function(3, 2, 2, lambda key: c)
    assert sup_I(inst, (1, 1), (0, 2)) == c
    assert sup_I(inst, (2,), (1,)) == 0  # single cube: zero by construction


def test_rejects_nonzero_single_cube_value():
    with pytest.raises(ValueError):
        ToyLatticeInstance(3, 2, 1, {((0, 0), (0, 0)): Fraction(1)})


@given(st.integers(1, 10**6), st.sampled_from([3, 4]), st.sampled_from([3, 4]))
def test_enumerator_matches_naive(seed, p, L):
    inst = ToyLatticeInstance.random(seed, L, p)
    for j in range(1, p + 1):
        for comp in compositions(p, j):
            for order in distinct_permutations(comp):
                for cubes in product(range(L), repeat=j):
                    assert sup_I(inst, order, cubes) == naive_sup(inst, order, cubes)
    for cube in range(L):
        assert i_sum_k_m(inst, 1, p - 1, cube) == naive_k_m(inst, 1, p - 1, cube)
        for j in range(2, p + 1):
            for comp in compositions(p, j):
                assert i_sum_k_set(inst, comp[0], comp[1:], cube) == naive_k_set(
                    inst, comp[0], comp[1:], cube)


def _swaps(p):
    for j in (2, 3):
        for comp in compositions(p, j):
            for order in distinct_permutations(comp):
                k, ks = order[0], order[1:]
                for i in range(len(ks)):
                    sw = list(ks)
                    sw[i] = k
                    yield k, ks, i, tuple(sw)


@given(st.integers(1, 10**6), st.sampled_from([3, 4]), st.sampled_from([3, 4, 5]))
def test_anchor_swap_on_invariant_lattice(seed, p, L):
    inst = ToyLatticeInstance.random(seed, L, p)
    for k, ks, i, sw in _swaps(p):
        a = i_sum_k_set(inst, k, ks, 0)
        b = i_sum_k_set(inst, ks[i], sw, 0)
        ratio = anchor_multiplicity_ratio(k, ks, i)
        assert a * ratio == b
        if ratio == 1:
            assert a == b


def test_anchor_swap_counterexample():
    # with parts {1,1,2} the anchor value 1 occurs twice, so I^{1|{1,2}} = 2 I^{2|{1,1}}
    inst = ToyLatticeInstance.random(3, 4, 4)
    a = i_sum_k_set(inst, 1, (1, 2), 0)
    b = i_sum_k_set(inst, 2, (1, 1), 0)
    assert b > 0 and a == 2 * b != b


def test_anchor_swap_needs_invariance():
    found = False
    for seed in range(1, 20):
        inst = ToyLatticeInstance.random(seed, 4, 3, invariant=False)
        if i_sum_k_set(inst, 1, (2,), 0) != i_sum_k_set(inst, 2, (1,), 0):
            found = True
            break
    assert found


def test_anchor_value_independent_of_cube():
    inst = ToyLatticeInstance.random(11, 5, 4)
    vals = {i_sum_k_m(inst, 1, 3, c) for c in range(5)}
    assert len(vals) == 1


def test_single_orbit_constructor():
    inst = ToyLatticeInstance.single_orbit(4, 3, [(0, 0), (1, 1), (1, 1)])
    assert sup_I(inst, (1, 2), (0, 1)) == 1
    assert sup_I(inst, (1, 2), (2, 3)) == 1  # shifted copy
    assert sup_I(inst, (2, 1), (0, 1)) == 0
    with pytest.raises(ValueError):
        ToyLatticeInstance.single_orbit(4, 3, [(0, 0), (0, 1), (0, 1)])


def test_validation():
    with pytest.raises(ValueError):
        ToyLatticeInstance.random(1, 7, 3)
    with pytest.raises(ValueError):
        ToyLatticeInstance.random(1, 4, 5)
    inst = ToyLatticeInstance.random(1, 3, 3)
    with pytest.raises(ValueError):
        sup_I(inst, (1, 1), (0, 1))
    with pytest.raises(ValueError):
        sup_I(inst, (1, 2), (0, 3))
