"""Representations of the free group and the twist ``g -> sigma(g) g``.

Layout of ``twist_matrix(A, sigma)``: entry ``(i, j)`` of ``A`` becomes the
k x k block at rows ``i*k .. i*k+k-1`` and columns ``j*k .. j*k+k-1``; the
``(s, t)`` entry of that block is ``sum_h a_h sigma(h)[s][t] h``.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from ._matrix import mat_eq, mat_identity, mat_inverse, mat_is_identity, mat_map, mat_mul
from .coeff import Domain, PrimeIdeal, reduce_mod_prime
from .errors import DivisionByZero, DomainMismatch, RepresentationInvalid
from .freealg import GAMatrix, GroupAlgebraElement, Word, format_word, parse_word
from .sofic import FiniteFSet


def _entry(domain: Domain, x):
    # plain integers and fractions are accepted for any domain
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return domain.from_fraction(Fraction(x))
    return x


class Representation:
    """``sigma: F -> GL_k``, given by one invertible matrix per free generator."""

    def __init__(self, domain: Domain, matrices: Sequence, inverses: Sequence | None = None):
        self.domain = domain
        mats = [[[_entry(domain, x) for x in r] for r in M] for M in matrices]
        if not mats:
            raise RepresentationInvalid("a representation needs at least one generator")
        k = len(mats[0])
        for M in mats:
            if len(M) != k or any(len(r) != k for r in M):
                raise RepresentationInvalid("generator matrices must all be k x k")
        if inverses is None:
            try:
                inverses = [mat_inverse(domain, M) for M in mats]
            except DivisionByZero:
                raise RepresentationInvalid("a generator matrix is singular") from None
        else:
            inverses = [[[_entry(domain, x) for x in r] for r in M] for M in inverses]
            for M, Mi in zip(mats, inverses):
                if not mat_is_identity(domain, mat_mul(domain, M, Mi)):
                    raise RepresentationInvalid("stored inverse does not invert its generator")
        self.dim = k
        self.rank = len(mats)
        self.matrices = tuple(tuple(tuple(r) for r in M) for M in mats)
        self.inverses = tuple(tuple(tuple(r) for r in M) for M in inverses)
        self._cache: dict[Word, tuple] = {}

    @classmethod
    def trivial(cls, domain: Domain, rank: int, k: int) -> "Representation":
        I = mat_identity(domain, k)
        return cls(domain, [I] * rank, [I] * rank)

    @classmethod
    def parse(cls, matrices: Sequence[Sequence[Sequence[str]]], domain: Domain) -> "Representation":
        return cls(domain, [[[domain.parse(str(x)) for x in r] for r in M] for M in matrices])

    def format(self) -> list:
        d = self.domain
        return [[[d.format(x) for x in r] for r in M] for M in self.matrices]

    def letter(self, x: int):
        return self.matrices[x - 1] if x > 0 else self.inverses[-x - 1]

    def __call__(self, w: Word):
        return extend_rep(self, w)

    def reduce(self, P: PrimeIdeal) -> "Representation":
        """Entrywise reduction modulo ``P``; both the matrices and their inverses must reduce."""
        src = self.domain
        F = P.residue_field()
        red = lambda M: mat_map(lambda v: reduce_mod_prime(v, src, P), M)
        return Representation(F, [red(M) for M in self.matrices], [red(M) for M in self.inverses])

    def coerce(self, domain: Domain) -> "Representation":
        src = self.domain
        f = lambda M: mat_map(lambda v: domain.coerce(v, src), M)
        return Representation(domain, [f(M) for M in self.matrices], [f(M) for M in self.inverses])

    def __eq__(self, other):
        return (isinstance(other, Representation) and self.domain == other.domain
                and self.matrices == other.matrices)

    def __repr__(self):
        return f"Representation(dim={self.dim}, rank={self.rank}, {self.domain.label})"


def extend_rep(sigma: Representation, w: Word):
    """``sigma(w)`` as a tuple of row tuples."""
    w = tuple(w)
    hit = sigma._cache.get(w)
    if hit is not None:
        return hit
    d = sigma.domain
    if not w:
        out = tuple(tuple(r) for r in mat_identity(d, sigma.dim))
    else:
        out = tuple(tuple(r) for r in mat_mul(d, extend_rep(sigma, w[:-1]), sigma.letter(w[-1])))
    if len(sigma._cache) < 65536:
        sigma._cache[w] = out
    return out


def validate_rep(sigma: Representation, relators: Sequence[Word | str]) -> list[Word]:
    """Relators not sent to the identity matrix (empty: sigma factors through F/<<relators>>)."""
    bad = []
    d = sigma.domain
    for r in relators:
        w = parse_word(r, sigma.rank) if isinstance(r, str) else tuple(r)
        if not mat_is_identity(d, extend_rep(sigma, w)):
            bad.append(w)
    return bad


def require_valid(sigma: Representation, relators) -> None:
    bad = validate_rep(sigma, relators)
    if bad:
        raise RepresentationInvalid(
            "representation violates relators " + ", ".join(format_word(w) for w in bad), bad)


def twist_matrix(A: GAMatrix, sigma: Representation) -> GAMatrix:
    """The ``nk x mk`` matrix obtained by replacing each group element ``h`` with ``sigma(h) h``."""
    d = A.domain
    if sigma.domain != d:
        if d.embeds_from(sigma.domain):
            sigma = sigma.coerce(d)
        elif sigma.domain.embeds_from(d):
            A = A.coerce(sigma.domain)
            d = A.domain
        else:
            raise DomainMismatch(f"matrix over {d.label}, representation over {sigma.domain.label}")
    if sigma.rank != A.rank:
        raise DomainMismatch(f"representation has {sigma.rank} generators, matrix alphabet has {A.rank}")
    k = sigma.dim
    n, m = A.shape
    blocks = [[dict() for _ in range(m * k)] for _ in range(n * k)]
    for i in range(n):
        for j in range(m):
            for h, a in A[i, j].items():
                S = extend_rep(sigma, h)
                for s in range(k):
                    row = blocks[i * k + s]
                    for t in range(k):
                        c = S[s][t]
                        if not d.is_zero(c):
                            row[j * k + t][h] = d.mul(a, c)
    entries = [[GroupAlgebraElement._raw(d, A.rank, {w: c for w, c in terms.items() if not d.is_zero(c)})
                for terms in row] for row in blocks]
    return GAMatrix(entries, d, A.rank, (n * k, m * k))


def stabilizers_act_trivially(X: FiniteFSet, sigma: Representation) -> bool:
    """True iff every point stabilizer of ``X`` lies in the kernel of ``sigma``.

    Uses Schreier generators: with ``u_x`` a spanning-tree word from the
    orbit root to ``x``, the stabilizer of the root is generated by
    ``u_x g u_{x.g}^-1``; it suffices that ``sigma(u_x) sigma(g) = sigma(u_{x.g})``
    for every point and generator.  Conjugate stabilizers then follow.
    """
    if X.rank != sigma.rank:
        raise DomainMismatch("F-set and representation over different alphabets")
    d = sigma.domain
    _, words = X.spanning_words()
    mats = [extend_rep(sigma, w) for w in words]
    for g in range(1, X.rank + 1):
        img = X.perms[g - 1].tolist()
        S = sigma.letter(g)
        for x in range(X.size):
            if not mat_eq(mat_mul(d, mats[x], S), mats[img[x]]):
                return False
    return True
