import random
from fractions import Fraction

import pytest

import oracles
from instances import random_integer_matrix, random_matrix
from soficrank.coeff import QQ, FunctionField, NumberField, PrimeField, PrimeIdeal
from soficrank.errors import DomainMismatch
from soficrank.freealg import GAMatrix, ball
from soficrank.rank import (SparseMatrix, assemble_operator, dense_rank_bareiss, dense_rank_integer,
                            discrepancy_bound, gap_within_bound, normalized_rank, normalized_rank_mod,
                            rank_exact, rank_hint, reduce_gamatrix, reduce_sparse)
from soficrank.sofic import cyclic_fset, preset_approximation, trivial_fset, zd_fset


def test_assemble_examples():
    M = assemble_operator(GAMatrix.parse([["1 - a"]], rank=1), cyclic_fset(3))
    assert M.to_dense() == oracles.circulant_one_minus_shift(3)
    X = zd_fset(2, 3)
    C = assemble_operator(GAMatrix.parse([["7/2"]]), X)
    assert C.to_dense() == [[Fraction(7, 2) if i == j else 0 for j in range(9)] for i in range(9)]
    Z = assemble_operator(GAMatrix.zeros(2, 3), X)
    assert Z.shape == (18, 27) and Z.nnz == 0


def test_assemble_matches_oracle():
    rng = random.Random(8)
    for _ in range(20):
        X = preset_approximation("free_random_perm", {"sizes": [rng.randint(1, 7)], "seed": rng.randrange(999)}).fsets[0]
        B = random_matrix(rng, rng.randint(1, 3), rng.randint(1, 3))
        dense = assemble_operator(B, X).to_dense()
        entries = [[dict(B[i, j].items()) for j in range(B.ncols)] for i in range(B.nrows)]
        perms = [p.tolist() for p in X.perms]
        assert dense == oracles.assemble_dense(entries, perms, X.size)


def test_rank_examples():
    M = assemble_operator(GAMatrix.parse([["1 - a"]], rank=1), cyclic_fset(3))
    assert rank_exact(M) == 2
    X = zd_fset(2, 2)
    assert rank_exact(assemble_operator(GAMatrix.parse([["3"]]), X)) == 4
    assert rank_exact(assemble_operator(GAMatrix.parse([["0"]]), X)) == 0


def test_rank_modp_against_oracle():
    rng = random.Random(4)
    F5 = PrimeField(5)
    for _ in range(30):
        dense = [[rng.choice([0, 0, 1, 2, 3, 4]) for _ in range(20)] for _ in range(20)]
        if rng.random() < 0.5:
            dense[3] = [(a + 2 * b) % 5 for a, b in zip(dense[0], dense[1])]
        M = SparseMatrix.from_dense([[F5.from_int(v) for v in r] for r in dense], F5)
        assert rank_exact(M) == oracles.dense_rank_mod(dense, 5)


def test_rank_rational_against_oracle():
    rng = random.Random(12)
    for _ in range(30):
        n, m = rng.randint(1, 25), rng.randint(1, 25)
        r = rng.randint(0, min(n, m))
        L = [[Fraction(rng.randint(-4, 4), rng.choice([1, 2, 3])) for _ in range(r)] for _ in range(n)]
        R = [[Fraction(rng.randint(-4, 4)) for _ in range(m)] for _ in range(r)]
        dense = [[sum((L[i][k] * R[k][j] for k in range(r)), Fraction(0)) for j in range(m)] for i in range(n)]
        M = SparseMatrix.from_dense(dense, QQ)
        expected = oracles.dense_rank(dense)
        assert rank_exact(M) == expected
        assert rank_exact(M.transpose()) == expected
        rows, cols = list(range(n)), list(range(m))
        rng.shuffle(rows)
        rng.shuffle(cols)
        assert rank_exact(M.permuted(rows, cols)) == expected


def test_dense_integer_kernels_agree():
    rng = random.Random(21)
    for size in (45, 60, 80):
        for deficiency in (0, 3):
            r = size - deficiency
            L = [[rng.randint(-50, 50) for _ in range(r)] for _ in range(size)]
            R = [[rng.randint(-50, 50) for _ in range(size)] for _ in range(r)]
            dense = [[sum(L[i][k] * R[k][j] for k in range(r)) for j in range(size)] for i in range(size)]
            expected = oracles.dense_rank(dense)
            assert dense_rank_integer(dense) == expected
            assert dense_rank_bareiss(dense) == expected


def test_number_field_rank():
    K = NumberField((-2, 0, 1))
    B = GAMatrix.parse([["(w) - a", "2 - (w)*a"]], K, rank=1)
    assert rank_exact(assemble_operator(B, cyclic_fset(4))) == 4
    C = GAMatrix.parse([["(w)", "2"], ["1", "(w)"]], K, rank=1)
    assert rank_exact(assemble_operator(C, cyclic_fset(3))) == 3


def test_function_field_rank():
    T = FunctionField(("t",))
    B = GAMatrix.parse([["1 - (t)*a"]], T, rank=1)
    assert rank_exact(assemble_operator(B, cyclic_fset(5))) == 5


def test_normalized_rank_examples():
    for m in range(2, 12):
        rep = normalized_rank(GAMatrix.parse([["1 - a"]], rank=1), cyclic_fset(m))
        assert rep.normalized == Fraction(m - 1, m)
        assert rep.set_size == m
    assert normalized_rank(GAMatrix.parse([["1"]]), zd_fset(2, 3)).normalized == 1
    rep = normalized_rank(GAMatrix.parse([["1 - a - b"]]), zd_fset(2, 6))
    assert rep.normalized == Fraction(17, 18)
    assert rep.normalized == 1 - Fraction(oracles.count_unit_sums(6), 36)


def test_normalized_rank_mod_examples():
    X = zd_fset(2, 3)
    B = GAMatrix.parse([["5"]])
    assert normalized_rank_mod(B, X, PrimeIdeal(5)).normalized == 0
    assert normalized_rank(B, X).normalized == 1
    C = GAMatrix.parse([["1 - a"]], rank=1)
    assert normalized_rank_mod(C, cyclic_fset(3), PrimeIdeal(7)).normalized == Fraction(2, 3)


def test_reduce_order_commutes():
    rng = random.Random(6)
    words = ball(2, 2)
    for _ in range(10):
        B = random_integer_matrix(rng, 2, 2, words, big=True)
        X = preset_approximation("free_random_perm", {"sizes": [6], "seed": rng.randrange(99)}).fsets[0]
        P = PrimeIdeal(rng.choice([2, 3, 5]))
        a = reduce_sparse(assemble_operator(B, X), P)
        b = assemble_operator(reduce_gamatrix(B, P), X)
        assert a.to_dense() == b.to_dense()


def test_rank_hint_is_lower_bound():
    rng = random.Random(2)
    for _ in range(10):
        M = assemble_operator(random_matrix(rng, 2, 2), zd_fset(2, 3))
        hint, _ = rank_hint(M, seed=rng.randrange(100))
        assert hint <= rank_exact(M)


def test_discrepancy_bound_examples():
    assert discrepancy_bound(GAMatrix.parse([["5"]]), 5) == pytest.approx(1.0)
    assert gap_within_bound(Fraction(1), GAMatrix.parse([["5"]]), 5)
    B = GAMatrix.parse([["8a", "8"]])
    assert discrepancy_bound(B, 2 ** 10) == pytest.approx(0.6)
    assert gap_within_bound(Fraction(3, 5), B, 2 ** 10)
    assert not gap_within_bound(Fraction(61, 100), B, 2 ** 10)
    perm_like = GAMatrix.parse([["a", "0"], ["0", "B"]])
    assert discrepancy_bound(perm_like, 2) == 0
    assert not gap_within_bound(Fraction(1, 100), perm_like, 2)
    with pytest.raises(DomainMismatch):
        discrepancy_bound(reduce_gamatrix(B, PrimeIdeal(3)), 3)


def test_house_one_never_drops():
    rng = random.Random(9)
    B = GAMatrix.parse([["a", "0"], ["0", "B"]])
    for _ in range(10):
        X = preset_approximation("free_random_perm", {"sizes": [rng.randint(2, 9)], "seed": rng.randrange(99)}).fsets[0]
        for p in (2, 3):
            assert normalized_rank_mod(B, X, PrimeIdeal(p)).normalized == normalized_rank(B, X).normalized


def test_rank_errors():
    with pytest.raises(DomainMismatch):
        assemble_operator(GAMatrix.parse([["a"]], rank=1), trivial_fset(2))


def test_sparse_round_trip():
    M = assemble_operator(GAMatrix.parse([["1/2 - 3a", "b"]]), zd_fset(2, 3))
    again = SparseMatrix.loads(M.dumps(), QQ)
    assert again.to_dense() == M.to_dense()
    assert M.transpose().transpose().to_dense() == M.to_dense()
