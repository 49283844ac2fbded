import random
from fractions import Fraction
from math import comb

import pytest

import oracles
from instances import random_matrix
from soficrank.coeff import FunctionField, NumberField
from soficrank.errors import DenominatorVanishes, DomainMismatch, SupportExplosion
from soficrank.freealg import GAMatrix, ball
from soficrank.rank import assemble_operator, normalized_rank, rank_exact
from soficrank.sofic import cyclic_fset, preset_approximation, trivial_fset, zd_fset
from soficrank.spectra import (hankel_psd, moment_convergence_check, moments_finite, moments_free,
                               semicontinuity_check, specialize)

T = FunctionField(("t",))
ONE_MINUS_A = GAMatrix.parse([["1 - a"]], rank=1)


def test_free_moments_of_one_minus_a():
    mu = moments_free(ONE_MINUS_A, 6)
    assert list(mu.values) == [comb(2 * l, l) for l in range(7)]
    poly = {0: Fraction(2), 1: Fraction(-1), -1: Fraction(-1)}
    assert all(mu[l] == oracles.laurent_power_constant_term(poly, l) for l in range(7))


def test_free_moments_zero_matrix():
    mu = moments_free(GAMatrix.zeros(3, 2), 4)
    assert list(mu.values) == [3, 0, 0, 0, 0]
    assert mu.n == 3


def test_free_moments_number_field():
    K = NumberField((-2, 0, 1))
    B = GAMatrix.parse([["1 - (w)*a"]], K, rank=1)
    assert list(moments_free(B, 3).values) == [1, 3, 13, 63]
    assert list(moments_finite(B, cyclic_fset(9), 3).values) == [1, 3, 13, 63]
    with pytest.raises(DomainMismatch):
        moments_free(GAMatrix.parse([["(w)*a"]], NumberField((1, 0, 1)), rank=1), 2)


def test_support_explosion():
    B = GAMatrix.parse([["1 + a + b + A + B"]])
    with pytest.raises(SupportExplosion):
        moments_free(B, 10, max_terms=200)


def test_finite_moments_examples():
    for m in range(2, 14):
        mu = moments_finite(ONE_MINUS_A, cyclic_fset(m), 5)
        assert mu[1] == 2
        if m > 10:
            assert mu.values == moments_free(ONE_MINUS_A, 5).values
    X = zd_fset(2, 3)
    assert list(moments_finite(GAMatrix.parse([["1"]]), X, 4).values) == [1] * 5


def test_finite_moments_against_dense_oracle():
    rng = random.Random(10)
    for _ in range(8):
        X = preset_approximation("free_random_perm", {"sizes": [rng.randint(2, 6)], "seed": rng.randrange(99)}).fsets[0]
        B = random_matrix(rng, 2, 1)
        M = assemble_operator(B, X).to_dense()
        MMt = [[sum(a * b for a, b in zip(r, s)) for s in M] for r in M]
        P = [[Fraction(int(i == j)) for j in range(len(M))] for i in range(len(M))]
        mu = moments_finite(B, X, 4)
        for l in range(5):
            assert mu[l] == sum(P[i][i] for i in range(len(M))) / X.size
            P = [[sum(P[i][k] * MMt[k][j] for k in range(len(M))) for j in range(len(M))] for i in range(len(M))]


def test_hankel():
    assert hankel_psd([1, 2, 6, 20, 70])
    assert hankel_psd([1, 0, 0, 0, 0])
    assert not hankel_psd([1, 0, -1])
    assert not hankel_psd([1, 2, 3])
    assert not hankel_psd([0, 1, 1])


def test_moments_positivity_random():
    rng = random.Random(5)
    for _ in range(10):
        B = random_matrix(rng, 2, 2, words=ball(2, 2))
        mu = moments_free(B, 4)
        assert all(v >= 0 for v in mu.values) and hankel_psd(mu.values)
        nu = moments_finite(B, zd_fset(2, 3), 4)
        assert all(v >= 0 for v in nu.values) and hankel_psd(nu.values)


def test_specialize_examples():
    C = GAMatrix.parse([["(t)*a"]], T, rank=1)
    assert specialize(C, 0).is_zero()
    D = GAMatrix.parse([["(t^2 - 1)*a + (t)*b"]], T)
    assert specialize(D, 1) == GAMatrix.parse([["b"]])
    assert specialize(D, {"t": Fraction(1, 2)}) == GAMatrix.parse([["-3/4*a + 1/2*b"]])
    with pytest.raises(DenominatorVanishes):
        specialize(GAMatrix.parse([["(1/(t - 2))*a"]], T, rank=1), 2)


def test_specialize_is_multiplicative():
    rng = random.Random(3)
    atoms = ["t", "1 - t", "t^2", "2", "1/(t + 3)"]
    words = ["a", "b", "A", "ab", "1"]

    def random_entry():
        return " + ".join(f"({rng.choice(atoms)})*{rng.choice(words)}" for _ in range(rng.randint(1, 3)))

    for _ in range(10):
        C = GAMatrix.parse([[random_entry() for _ in range(2)] for _ in range(2)], T)
        D = GAMatrix.parse([[random_entry()] for _ in range(2)], T)
        s = Fraction(rng.choice([-4, -2, -1, 0, 1, 2, 4]), rng.randint(1, 3))
        assert specialize(C @ D, s) == specialize(C, s) @ specialize(D, s)


def test_semicontinuity_examples():
    X = zd_fset(2, 2)
    rep = semicontinuity_check(GAMatrix.parse([["(t)"]], T), 0, X)
    assert rep.generic.normalized == 1 and rep.special.normalized == 0 and rep.holds
    C = GAMatrix.parse([["1 - (t)*a"]], T, rank=1)
    for m in range(2, 9):
        rep = semicontinuity_check(C, 1, cyclic_fset(m))
        assert rep.generic.normalized == 1
        assert rep.special.normalized == Fraction(m - 1, m)


def test_semicontinuity_random():
    rng = random.Random(19)
    for _ in range(15):
        entries = [[f"({rng.randint(-2, 2)}*t^2 + {rng.randint(-2, 2)}*t + {rng.randint(-1, 1)})*{w}"
                    f" + ({rng.randint(-1, 1)})*{v}" for w, v in [rng.sample(["a", "b", "A", "1"], 2)]]
                   for _ in range(2)]
        C = GAMatrix.parse(entries, T)
        s = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
        assert semicontinuity_check(C, s, zd_fset(2, 3)).holds


def test_rank_kernel_consistency():
    rng = random.Random(4)
    for _ in range(10):
        n, m = rng.randint(1, 2), rng.randint(1, 2)
        B = random_matrix(rng, n, m)
        X = zd_fset(2, 3)
        M = assemble_operator(B, X)
        gram = M.matmul(M.conj_transpose())
        kernel = n * X.size - rank_exact(gram)
        assert normalized_rank(B, X).normalized == n - Fraction(kernel, X.size)


def test_moment_convergence():
    series = [cyclic_fset(m) for m in range(3, 21)]
    rep = moment_convergence_check(ONE_MINUS_A, series, 5)
    assert rep.exact_when_defect_free and rep.monotone
    assert all(s.deviation == 0 for s in rep.steps if s.set_size > 10)
    assert all(isinstance(s.deviation, Fraction) for s in rep.steps)
    base = moment_convergence_check(ONE_MINUS_A, [trivial_fset(1)], 3)
    assert list(base.steps[0].moments.values) == [1, 0, 0, 0]
    assert base.steps[0].deviation > 0
