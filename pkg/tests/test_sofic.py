import random

import numpy as np
import pytest

import oracles
from instances import small_groups
from soficrank.caps import override_caps
from soficrank.coeff import PrimeField
from soficrank.errors import BadPreset, BallTooLarge, ClosureTooLarge, ProductTooLarge
from soficrank.freealg import ball, word_mul
from soficrank.sofic import (FiniteFSet, abelian_oracle, act, commutator_relators, cyclic_fset, defect_profile,
                             fixed_ratio, free_oracle, preset_approximation, product_action, regular_action_of_group,
                             regular_action_of_image, stabilizer_generators, trivial_fset, zd_fset)
from soficrank.twist import Representation


def test_act_examples():
    Z4 = cyclic_fset(4)
    assert act(Z4, 1, (1,)) == 2
    assert act(Z4, 3, (1, 1)) == 1
    for x in range(4):
        assert act(Z4, x, ()) == x


def test_fixed_ratio_examples():
    for m in range(2, 9):
        Zm = cyclic_fset(m)
        assert fixed_ratio(Zm, (1,) * m) == 1
        assert fixed_ratio(Zm, (1,)) == 0
    assert fixed_ratio(cyclic_fset(4), (1, 1)) == 0
    assert fixed_ratio(cyclic_fset(6), (1, 1, 1)) == 0


def test_act_matches_letter_by_letter():
    rng = random.Random(5)
    perms = [list(np.random.default_rng(1).permutation(9)) for _ in range(2)]
    X = FiniteFSet(perms)
    words = ball(4, 2)
    for _ in range(300):
        w, x = rng.choice(words), rng.randrange(9)
        assert X.act(x, w) == oracles.trace_act(perms, x, w)
    for w in words[:60]:
        assert X.fixed_count(w) == oracles.count_fixed(perms, w, 9)


def test_action_is_a_right_action():
    X = FiniteFSet([list(np.random.default_rng(2).permutation(7)) for _ in range(2)])
    words = ball(2, 2)
    for u in words:
        for v in words[::4]:
            for x in range(7):
                assert X.act(x, word_mul(u, v)) == X.act(X.act(x, u), v)


def test_defect_examples():
    prof = defect_profile(cyclic_fset(5), 1, abelian_oracle(1))
    assert prof.max_deviation == 0
    pt = trivial_fset(2)
    prof = defect_profile(pt, 2, free_oracle)
    assert all(r == 1 for r in prof.ratios.values())
    assert prof.max_deviation == 1
    assert all(prof.deviations[w] == 1 for w in prof.ratios if w)


def test_zd_defect_vanishes_for_large_moduli():
    assert defect_profile(zd_fset(2, 2), 2, abelian_oracle(2)).max_deviation == 1
    for m in (5, 7):
        prof = defect_profile(zd_fset(2, m), 4, abelian_oracle(2))
        assert prof.max_deviation == 0
        assert prof.ratios[(1, 2, -1, -2)] == 1


def test_product_action():
    X, Z = cyclic_fset(4), cyclic_fset(3)
    Y = product_action(X, Z)
    assert Y.size == 12
    for w in ball(3, 1):
        assert Y.fixed_ratio(w) == X.fixed_ratio(w) * Z.fixed_ratio(w)
    same = product_action(X, trivial_fset(1))
    assert defect_profile(same, 3).ratios == defect_profile(X, 3).ratios
    with pytest.raises(ProductTooLarge):
        product_action(X, Z, cap=10)


def test_regular_action_of_image():
    F5, F3 = PrimeField(5), PrimeField(3)
    assert regular_action_of_image(Representation(F5, [[[2]]])).size == 4
    assert regular_action_of_image(Representation.trivial(F5, 2, 3)).size == 1
    assert regular_action_of_image(Representation(F3, [[[1, 1], [0, 1]]])).size == 3
    with pytest.raises(ClosureTooLarge):
        regular_action_of_image(Representation(PrimeField(101), [[[3]]]), cap=10)


def test_regular_action_is_free_on_the_group():
    for name, gens in small_groups().items():
        G = regular_action_of_group(gens)
        for w in ball(3, 2):
            assert G.fixed_count(w) in (0, G.size)


def test_stabilizer_generators_are_relators():
    X = FiniteFSet(small_groups()["S3"])
    rels = stabilizer_generators(X)
    assert rels
    for r in rels:
        assert X.act(0, r) == 0
    G = regular_action_of_group(small_groups()["D4"])
    for r in stabilizer_generators(G):
        assert G.fixed_count(r) == G.size


def test_commutator_relators():
    assert commutator_relators(2) == [(1, 2, -1, -2)]
    assert len(commutator_relators(3)) == 3


def test_presets():
    Z = preset_approximation("zd_congruence", {"d": 2, "moduli": [3]})
    assert [X.size for X in Z.fsets] == [9]
    R = preset_approximation("free_random_perm", {"sizes": [5, 8], "seed": 4, "rank": 2})
    again = preset_approximation("free_random_perm", {"sizes": [5, 8], "seed": 4, "rank": 2})
    assert R.fsets == again.fsets
    assert [X.size for X in R.fsets] == [5, 8]
    G = preset_approximation("finite_regular", {"generators": small_groups()["S3"], "repeats": 3})
    assert [X.size for X in G.fsets] == [6, 6, 6] and G.exact_limit
    Q = preset_approximation("finite_quotient", {"generators": small_groups()["S3"]})
    assert Q.fsets[0].size == 3
    assert Q.oracle((1, 1)) and not Q.oracle((1,))


@pytest.mark.parametrize("name, params", [
    ("free_random_perm", {"sizes": [4]}),
    ("zd_congruence", {"moduli": [3]}),
    ("finite_regular", {"generators": [[0, 0, 1]]}),
    ("bogus", {}),
])
def test_bad_presets(name, params):
    with pytest.raises(BadPreset):
        preset_approximation(name, params)


def test_caps_override():
    with override_caps(max_set_size=50):
        with pytest.raises(BadPreset):
            preset_approximation("zd_congruence", {"d": 2, "moduli": [8]})
    preset_approximation("zd_congruence", {"d": 2, "moduli": [8]})
    with pytest.raises(BallTooLarge):
        defect_profile(trivial_fset(2), 20)


def test_dumps_loads():
    X = preset_approximation("free_random_perm", {"sizes": [11], "seed": 2, "rank": 3}).fsets[0]
    Y = FiniteFSet.loads(X.dumps())
    assert Y == X and hash(Y) == hash(X)


def test_orbits_and_spanning_words():
    X = FiniteFSet([[1, 0, 2, 4, 3], [0, 1, 3, 2, 4]])
    orbits = X.orbits()
    assert sorted(map(sorted, orbits)) == [[0, 1], [2, 3, 4]]
    root, words = X.spanning_words()
    for x, w in enumerate(words):
        assert X.act(root[x], w) == x
