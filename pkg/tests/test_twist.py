import random
from fractions import Fraction

import pytest

from instances import random_matrix, random_rep_through, small_groups
from soficrank.coeff import QQ, NumberField, PrimeIdeal
from soficrank.errors import DomainMismatch, RepresentationInvalid
from soficrank.freealg import GAMatrix, ball, parse_element, word_mul
from soficrank.rank import normalized_rank
from soficrank.sofic import cyclic_fset, preset_approximation, zd_fset
from soficrank.twist import (Representation, extend_rep, require_valid, stabilizers_act_trivially, twist_matrix,
                             validate_rep)

ROT = Representation(QQ, [[[0, 1], [-1, 0]]])


def I(k):
    return tuple(tuple(Fraction(int(i == j)) for j in range(k)) for i in range(k))


def test_extend_rep_examples():
    assert extend_rep(ROT, ()) == I(2)
    assert extend_rep(ROT, (1, 1)) == ((-1, 0), (0, -1))
    assert extend_rep(ROT, (1, 1, 1, 1)) == I(2)
    assert extend_rep(ROT, (-1,)) == ((0, -1), (1, 0))


def test_extend_rep_multiplicative():
    sigma = Representation(QQ, [[[1, 2], [0, 1]], [[0, 1], [1, 1]]])
    words = ball(3, 2)
    for u in words[::7]:
        for v in words[::5]:
            lhs = extend_rep(sigma, word_mul(u, v))
            A, B = extend_rep(sigma, u), extend_rep(sigma, v)
            rhs = tuple(tuple(sum(A[i][l] * B[l][j] for l in range(2)) for j in range(2)) for i in range(2))
            assert lhs == rhs


def test_validate_rep_examples():
    commuting = Representation(QQ, [[[2, 0], [0, 3]], [[5, 0], [0, 7]]])
    assert validate_rep(commuting, ["abAB"]) == []
    clash = Representation(QQ, [[[1, 1], [0, 1]], [[1, 0], [1, 1]]])
    assert validate_rep(clash, ["abAB"]) == [(1, 2, -1, -2)]
    assert validate_rep(clash, []) == []
    with pytest.raises(RepresentationInvalid):
        require_valid(clash, [(1, 2, -1, -2)])


def test_representation_validation():
    with pytest.raises(RepresentationInvalid):
        Representation(QQ, [[[1, 1], [1, 1]]])
    with pytest.raises(RepresentationInvalid):
        Representation(QQ, [[[1, 0], [0, 1]], [[1]]])


def test_twist_examples():
    lam = Representation(QQ, [[[Fraction(3, 2)]]])
    A = GAMatrix.parse([["1 - a"]], rank=1)
    assert twist_matrix(A, lam) == GAMatrix.parse([["1 - 3/2*a"]], rank=1)
    swap = Representation(QQ, [[[0, 1], [1, 0]]])
    assert twist_matrix(A, swap) == GAMatrix.parse([["1", "-a"], ["-a", "1"]], rank=1)


def test_twist_trivial_rep_is_block_diagonal():
    rng = random.Random(1)
    A = random_matrix(rng, 2, 3)
    T = twist_matrix(A, Representation.trivial(QQ, 2, 2))
    assert T.shape == (4, 6)
    for i in range(4):
        for j in range(6):
            expected = A[i // 2, j // 2] if i % 2 == j % 2 else parse_element("0")
            assert T[i, j] == expected


def test_twist_multiplicative_and_star():
    rng = random.Random(17)
    ortho = Representation(QQ, [[[0, 1], [1, 0]], [[1, 0], [0, -1]]])
    general = Representation(QQ, [[[1, 2], [0, 1]], [[2, 1], [1, 1]]])
    for _ in range(10):
        A, B = random_matrix(rng, 2, 2), random_matrix(rng, 2, 1)
        for sigma in (ortho, general):
            assert twist_matrix(A @ B, sigma) == twist_matrix(A, sigma) @ twist_matrix(B, sigma)
        assert twist_matrix(A.star(), ortho) == twist_matrix(A, ortho).star()


def test_twist_domain_coercion():
    K = NumberField((-2, 0, 1))
    A = GAMatrix.parse([["(w)*a"]], K, rank=1)
    T = twist_matrix(A, Representation(QQ, [[[2]]]))
    assert T == GAMatrix.parse([["(2*w)*a"]], K, rank=1)
    with pytest.raises(DomainMismatch):
        twist_matrix(GAMatrix.parse([["a"]]), Representation(QQ, [[[2]]]))


def test_twisted_rank_on_regular_actions():
    rng = random.Random(33)
    for name in ("S3", "V4", "D4"):
        gens = small_groups()[name]
        X = preset_approximation("finite_regular", {"generators": gens}).fsets[0]
        for _ in range(3):
            sigma = random_rep_through(gens, rng.choice([1, 2]), rng)
            assert stabilizers_act_trivially(X, sigma)
            A = random_matrix(rng, 1, 2)
            twisted = normalized_rank(twist_matrix(A, sigma), X).normalized
            assert twisted == sigma.dim * normalized_rank(A, X).normalized


def test_sign_twist_on_cyclic_groups():
    sign = Representation(QQ, [[[-1]]])
    A = GAMatrix.parse([["1 - a"]], rank=1)
    T = twist_matrix(A, sign)
    for m in range(2, 11):
        X = cyclic_fset(m)
        assert stabilizers_act_trivially(X, sign) == (m % 2 == 0)
        diff = normalized_rank(T, X).normalized - normalized_rank(A, X).normalized
        assert diff == (0 if m % 2 == 0 else Fraction(1, m))


def test_stabilizers_on_zd():
    X = zd_fset(2, 4)
    assert stabilizers_act_trivially(X, Representation(QQ, [[[-1]], [[-1]]]))
    assert not stabilizers_act_trivially(zd_fset(2, 3), Representation(QQ, [[[-1]], [[1]]]))


def test_reduce_representation():
    sigma = Representation(QQ, [[[Fraction(1, 2), 0], [0, 2]]])
    red = sigma.reduce(PrimeIdeal(5))
    assert red.matrices == (((3, 0), (0, 2)),)
    assert red.inverses == (((2, 0), (0, 3)),)
