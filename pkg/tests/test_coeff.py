import math
import random
from fractions import Fraction

import pytest

from soficrank.coeff import (QQ, FiniteField, FunctionField, NumberField, PrimeField, PrimeIdeal,
                             domain_from_descriptor, enumerate_primes, exact_matrix_house, house, house_interval,
                             matrix_house, reduce_mod_prime)
from soficrank.errors import DomainMismatch, PrimeDividesDenominator
from soficrank.freealg import GAMatrix

SQRT2 = NumberField((-2, 0, 1))
SQRT5 = NumberField((-5, 0, 1))


def test_field_ops():
    assert QQ.add(Fraction(2, 3), Fraction(1, 6)) == Fraction(5, 6)
    F5 = PrimeField(5)
    assert F5.inv(F5.from_int(2)) == 3
    w = SQRT2.generator("w")
    assert SQRT2.mul(w, w) == SQRT2.from_int(2)
    x = SQRT2.add(SQRT2.one, w)
    assert SQRT2.mul(x, SQRT2.inv(x)) == SQRT2.one


def test_residue_field_arithmetic():
    F9 = FiniteField(3, (1, 0, 1))
    assert F9.size == 9
    elems = [F9.from_poly([a, b]) for a in range(3) for b in range(3)]
    for x in elems[1:]:
        assert F9.mul(x, F9.inv(x)) == F9.one
        assert F9.pow(x, 8) == F9.one


def test_constructor_validation():
    with pytest.raises(ValueError):
        NumberField((-4, 0, 1))
    with pytest.raises(ValueError):
        FiniteField(3, (2, 0, 1))
    with pytest.raises(ValueError):
        PrimeField(9)
    with pytest.raises(ValueError):
        NumberField((1, 0, 1), conjugation=(0, 2))


def test_reduce_mod_prime_examples():
    assert reduce_mod_prime(Fraction(7, 3), QQ, PrimeIdeal(5)) == 4
    with pytest.raises(PrimeDividesDenominator):
        reduce_mod_prime(Fraction(1, 5), QQ, PrimeIdeal(5))
    P = PrimeIdeal(7, (4, 1))
    assert reduce_mod_prime(SQRT2.generator("w"), SQRT2, P) == 3
    assert reduce_mod_prime(SQRT2.one, SQRT2, P) == 1


def test_reduce_mod_prime_homomorphism():
    rng = random.Random(3)
    P = enumerate_primes(SQRT2, 1, 20)[0]
    F = P.residue_field()
    for _ in range(200):
        x = tuple(Fraction(rng.randint(-9, 9), rng.choice([1, 2, 3])) for _ in range(2))
        y = tuple(Fraction(rng.randint(-9, 9), rng.choice([1, 3, 4])) for _ in range(2))
        rx, ry = reduce_mod_prime(x, SQRT2, P), reduce_mod_prime(y, SQRT2, P)
        assert reduce_mod_prime(SQRT2.mul(x, y), SQRT2, P) == F.mul(rx, ry)
        assert reduce_mod_prime(SQRT2.add(x, y), SQRT2, P) == F.add(rx, ry)


def test_enumerate_primes():
    assert [P.p for P in enumerate_primes(QQ, 3, 2)] == [2, 3, 5]
    first = enumerate_primes(SQRT2, 2, 3)[0]
    assert first == PrimeIdeal(7, (4, 1))
    K = NumberField((-1, -1, 1))
    primes = enumerate_primes(K, 8, 2)
    sizes = [P.size for P in primes]
    assert sizes == sorted(set(sizes))
    assert all(K.discriminant % P.p for P in primes)
    cubic = NumberField((-2, 0, 0, 1))
    for P in enumerate_primes(cubic, 5, 2, max_degree=2):
        assert P.degree <= 2
        P.residue_field()


def test_enumerate_primes_domain():
    with pytest.raises(DomainMismatch):
        enumerate_primes(PrimeField(5), 2)


def test_house_examples():
    assert house(Fraction(3, 2), QQ) == 1.5
    assert math.isclose(house(SQRT2.generator("w"), SQRT2), math.sqrt(2), abs_tol=1e-9)
    golden = SQRT5.scale(SQRT5.add(SQRT5.one, SQRT5.generator("w")), Fraction(1, 2))
    value, err = house_interval(golden, SQRT5)
    assert err <= 1e-9
    assert abs(value - (1 + math.sqrt(5)) / 2) <= 1e-9
    assert house(SQRT5.neg(golden), SQRT5) == pytest.approx(value)


def test_house_cubic():
    cubic = NumberField((-2, 0, 0, 1))
    w = cubic.generator("w")
    assert house(w, cubic) == pytest.approx(2 ** (1 / 3), abs=1e-9)
    assert house(cubic.sub(cubic.one, w), cubic) == pytest.approx(abs(1 - 2 ** (1 / 3) * complex(-0.5, math.sqrt(3) / 2)),
                                                                  abs=1e-9)


def test_matrix_house_examples():
    assert matrix_house(GAMatrix.parse([["1 - a"]])) == 2
    B = GAMatrix.parse([["2a", "3b"], ["1", "1"]])
    assert matrix_house(B) == 4
    assert exact_matrix_house(B) == 4
    assert matrix_house(GAMatrix.zeros(2, 3)) == 0
    C = GAMatrix.parse([["(1+w)*a", "0"]], SQRT2)
    assert matrix_house(C) == pytest.approx(1 + math.sqrt(2), abs=1e-9)


def test_function_field():
    T = FunctionField(("t", "s"))
    x = T.parse("(t^2 - 1)/(t - s)")
    assert T.evaluate(x, [Fraction(3), Fraction(1)]) == 4
    assert T.is_zero(T.sub(T.mul(x, T.inv(x)), T.one))


def test_descriptor_round_trip():
    for d in [QQ, SQRT2, NumberField((1, 0, 1), conjugation=(0, -1)), PrimeField(7), FiniteField(3, (1, 0, 1)),
              FunctionField(("t",))]:
        assert domain_from_descriptor(d.descriptor()).key == d.key


def test_coefficient_parser():
    T = FunctionField(("t",))
    assert T.evaluate(T.parse("2*t + -1"), [Fraction(3)]) == 5
    assert T.evaluate(T.parse("-t^2"), [Fraction(3)]) == -9
    assert QQ.parse("1.5") == Fraction(3, 2)
    assert SQRT2.parse("(1 + w)^2") == SQRT2.parse("3 + 2*w")
