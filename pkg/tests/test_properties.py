from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from soficrank.coeff import QQ, NumberField, PrimeIdeal, reduce_mod_prime
from soficrank.freealg import (GroupAlgebraElement, format_element, ga_mul, ga_star, identity_coefficient,
                               parse_element, reduce_word, word_inv, word_mul)
from soficrank.rank import normalized_rank, normalized_rank_mod
from soficrank.sofic import FiniteFSet, product_action
from soficrank.spectra import hankel_psd, moments_finite
from soficrank.freealg import GAMatrix

RANK = 2
letters = st.sampled_from([1, -1, 2, -2])
words = st.lists(letters, max_size=6).map(lambda w: reduce_word(w, RANK))
fractions = st.builds(Fraction, st.integers(-5, 5), st.integers(1, 4))
elements = st.dictionaries(words, fractions, max_size=4).map(lambda d: GroupAlgebraElement(QQ, RANK, d))


@st.composite
def fsets(draw, max_size=7):
    n = draw(st.integers(1, max_size))
    return FiniteFSet([draw(st.permutations(range(n))) for _ in range(RANK)])


@given(words, words, words)
def test_word_group_laws(u, v, w):
    assert word_mul(word_mul(u, v), w) == word_mul(u, word_mul(v, w))
    assert word_mul(u, ()) == u == word_mul((), u)
    assert word_mul(u, word_inv(u)) == ()


@given(elements, elements, elements)
def test_algebra_laws(x, y, z):
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert ga_star(ga_mul(x, y)) == ga_mul(ga_star(y), ga_star(x))
    assert ga_star(ga_star(x)) == x


@given(elements)
def test_trace_positivity(x):
    assert identity_coefficient(x * ga_star(x)) == sum(c * c for _, c in x.items())


@given(elements)
def test_text_round_trip(x):
    assert parse_element(format_element(x), QQ, RANK) == x


@given(st.integers(-50, 50), st.integers(-50, 50), st.integers(-50, 50), st.integers(-50, 50))
def test_number_field_reduction_is_a_homomorphism(a, b, c, d):
    K = NumberField((-3, 0, 1))
    P = PrimeIdeal(11, (6, 1))
    F = P.residue_field()
    x, y = (Fraction(a), Fraction(b)), (Fraction(c), Fraction(d))
    r = lambda v: reduce_mod_prime(v, K, P)
    assert r(K.mul(x, y)) == F.mul(r(x), r(y))
    assert r(K.add(x, y)) == F.add(r(x), r(y))
    assert r(K.one) == F.one


@given(fsets(), fsets(), words)
def test_product_fixed_points(X, Z, w):
    assert product_action(X, Z).fixed_count(w) == X.fixed_count(w) * Z.fixed_count(w)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(elements, min_size=2, max_size=2), min_size=1, max_size=2), fsets(5),
       st.sampled_from([2, 3, 5]))
def test_rank_mod_p_never_exceeds_rational(rows, X, p):
    B = GAMatrix(rows, QQ, RANK)
    try:
        modp = normalized_rank_mod(B, X, PrimeIdeal(p)).normalized
    except ValueError:
        return
    assert modp <= normalized_rank(B, X).normalized


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(elements, min_size=1, max_size=2), min_size=1, max_size=2).filter(
    lambda rows: len({len(r) for r in rows}) == 1), fsets(5))
def test_finite_moments_positive(rows, X):
    mu = moments_finite(GAMatrix(rows, QQ, RANK), X, 4)
    assert all(v >= 0 for v in mu.values)
    assert hankel_psd(mu.values)
