"""Spectral moments of ``T = B B*``, specialization of parameters, and the
finite-level checks built on them.

Moments are computed from half powers: with ``a = ceil(l/2)`` and ``b = l - a``,
``Tr(T^l) = sum_{i,j} <(T^a)_{ij}, (T^b)_{ji}>``, so only ``T^{ceil(L/2)}`` is
ever formed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .caps import default_caps
from .coeff import QQ, Domain, FunctionField, NumberField, Rationals
from .errors import DomainMismatch, SupportExplosion
from .freealg import GAMatrix, word_inv
from .rank import RankReport, SparseMatrix, assemble_operator, normalized_rank
from .sofic import FiniteFSet, Oracle, defect_profile, free_oracle


@dataclass(frozen=True)
class MomentSequence:
    """``values[l] = Tr(T^l)`` for ``l = 0..L`` (normalized by ``|X|`` for finite sources)."""

    values: tuple
    source: str
    n: int

    @property
    def L(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, l):
        return self.values[l]

    def rows(self) -> list[tuple]:
        """``(l, value_num, value_den, source)`` rows for the moments CSV."""
        return [(l, v.numerator, v.denominator, self.source) for l, v in enumerate(self.values)]


def _real_trace(d: Domain):
    """Map a coefficient to the rational number the moments report."""
    if isinstance(d, Rationals):
        return lambda x: x
    if isinstance(d, NumberField):
        # B* conjugates with the identity here, which is complex conjugation only
        # under real embeddings; the average over all of them is Tr_{K/Q}/d.
        if d.conjugation is not None or not d.is_totally_real:
            raise DomainMismatch("moments over a number field need a totally real field "
                                 "with identity conjugation")
        deg = d.degree
        return lambda x: Fraction(d.trace(x)) / deg
    raise DomainMismatch(f"moments need Q or a totally real number field, not {d.label}")


# ---------------------------------------------------------------------------
# free group
# ---------------------------------------------------------------------------

def _count_terms(P: GAMatrix) -> int:
    n, m = P.shape
    return sum(len(P[i, j]) for i in range(n) for j in range(m))


def _pair_trace(d: Domain, P: GAMatrix, Q: GAMatrix):
    """Identity coefficient of ``trace(P Q)``."""
    acc = d.zero
    n = P.shape[0]
    for i in range(n):
        for j in range(n):
            p, q = P[i, j], Q[j, i]
            if not p or not q:
                continue
            small, big, flip = (p, q, False) if len(p) <= len(q) else (q, p, True)
            for w, c in small.items():
                e = big.coefficient(word_inv(w))
                if not d.is_zero(e):
                    acc = d.add(acc, d.mul(e, c) if flip else d.mul(c, e))
    return acc


def moments_free(B: GAMatrix, L: int, max_terms: int | None = None) -> MomentSequence:
    """Exact moments ``Tr_F((BB*)^l)`` on the free group, ``l = 0..L``."""
    if L < 0:
        raise ValueError("L must be non-negative")
    d = B.domain
    to_q = _real_trace(d)
    cap = default_caps().max_terms if max_terms is None else max_terms
    n = B.shape[0]
    T = B @ B.star()
    powers = [GAMatrix.identity(n, d, B.rank)]
    for _ in range((L + 1) // 2):
        P = powers[-1] @ T
        size = _count_terms(P)
        if size > cap:
            raise SupportExplosion(f"T^{len(powers)} has {size} terms, cap is {cap}")
        powers.append(P)
    values = [Fraction(n)]
    for l in range(1, L + 1):
        a = (l + 1) // 2
        values.append(to_q(_pair_trace(d, powers[a], powers[l - a])))
    return MomentSequence(tuple(values), "free", n)


# ---------------------------------------------------------------------------
# finite F-sets
# ---------------------------------------------------------------------------

def _sparse_pair_trace(d: Domain, P: SparseMatrix, Q: SparseMatrix):
    acc = d.zero
    for i, r in enumerate(P.rows):
        for j, v in r.items():
            w = Q.rows[j].get(i)
            if w is not None:
                acc = d.add(acc, d.mul(v, w))
    return acc


def moments_finite(B: GAMatrix, X: FiniteFSet, L: int) -> MomentSequence:
    """``(1/|X|) trace((M M^*)^l)`` with ``M = assemble_operator(B, X)``."""
    if L < 0:
        raise ValueError("L must be non-negative")
    d = B.domain
    to_q = _real_trace(d)
    M = assemble_operator(B, X)
    T = M.matmul(M.conj_transpose())
    N = T.nrows
    I = SparseMatrix.from_triples(N, N, d, [(i, i, d.one) for i in range(N)])
    powers = [I]
    for _ in range((L + 1) // 2):
        powers.append(powers[-1].matmul(T))
    values = [Fraction(B.shape[0])]
    for l in range(1, L + 1):
        a = (l + 1) // 2
        values.append(to_q(_sparse_pair_trace(d, powers[a], powers[l - a])) / X.size)
    return MomentSequence(tuple(values), f"finite:{X.size}", B.shape[0])


def hankel_psd(values: Sequence[Fraction]) -> bool:
    """Exact positive semidefiniteness of ``(mu_{i+j})_{0<=i,j<=floor(L/2)}``.

    Symmetric elimination: a negative pivot fails; a zero pivot is allowed
    only if the rest of its row is zero.
    """
    if any(v < 0 for v in values[::2]):
        return False
    h = (len(values) - 1) // 2
    A = [[Fraction(values[i + j]) for j in range(h + 1)] for i in range(h + 1)]
    for k in range(h + 1):
        p = A[k][k]
        if p < 0:
            return False
        if p == 0:
            if any(A[k][j] for j in range(k + 1, h + 1)):
                return False
            continue
        for i in range(k + 1, h + 1):
            f = A[i][k] / p
            if f:
                for j in range(k + 1, h + 1):
                    A[i][j] -= f * A[k][j]
    return True


# ---------------------------------------------------------------------------
# specialization
# ---------------------------------------------------------------------------

def _point(C: GAMatrix, s) -> tuple:
    d = C.domain
    if not isinstance(d, FunctionField):
        raise DomainMismatch(f"specialize needs a function field, not {d.label}")
    if isinstance(s, dict):
        s = [s[v] for v in d.variables]
    elif not isinstance(s, (list, tuple)):
        s = [s]
    return tuple(Fraction(v) for v in s)


def specialize(C: GAMatrix, s) -> GAMatrix:
    """Evaluate every coefficient at the rational point ``s``."""
    d = C.domain
    pt = _point(C, s)
    return C.map_coefficients(lambda x: d.evaluate(x, pt), QQ)


@dataclass
class SemicontinuityReport:
    generic: RankReport
    special: RankReport
    point: tuple

    @property
    def holds(self) -> bool:
        return self.generic.normalized >= self.special.normalized


def semicontinuity_check(C: GAMatrix, s, X: FiniteFSet) -> SemicontinuityReport:
    """Generic rank over ``Q(t)`` against the rank of ``C(s)`` over ``Q``."""
    pt = _point(C, s)
    special = normalized_rank(specialize(C, pt), X)
    generic = normalized_rank(C, X)
    return SemicontinuityReport(generic, special, pt)


# ---------------------------------------------------------------------------
# moment convergence along a series
# ---------------------------------------------------------------------------

@dataclass
class MomentStep:
    set_size: int
    moments: MomentSequence
    deviation: Fraction
    defect: Fraction


@dataclass
class ConvergenceReport:
    reference: MomentSequence
    radius: int
    steps: list[MomentStep] = field(default_factory=list)

    @property
    def monotone(self) -> bool:
        """Deviation never increases across a step where the measured defect does not."""
        return all(b.deviation <= a.deviation
                   for a, b in zip(self.steps, self.steps[1:]) if b.defect <= a.defect)

    @property
    def exact_when_defect_free(self) -> bool:
        """Zero defect on the radius forces the moments to agree exactly."""
        return all(s.deviation == 0 for s in self.steps if s.defect == 0)


def moment_convergence_check(B: GAMatrix, series: Iterable[FiniteFSet], L: int,
                             oracle: Oracle | None = free_oracle,
                             max_terms: int | None = None) -> ConvergenceReport:
    """Compare finite moments along ``series`` with the free-group moments.

    Defect is measured on the ball of radius ``2 L w_max`` (``w_max`` the
    longest word in ``B``), the range a closed walk of length ``2L`` can reach.
    """
    ref = moments_free(B, L, max_terms)
    radius = 2 * L * max(B.max_word_length(), 1)
    report = ConvergenceReport(ref, radius)
    for X in series:
        mu = moments_finite(B, X, L)
        dev = max(abs(a - b) for a, b in zip(mu.values, ref.values))
        defect = defect_profile(X, radius, oracle).max_deviation
        report.steps.append(MomentStep(X.size, mu, dev, defect))
    return report
