"""Finite operators of group-algebra matrices and their exact ranks.

Row/column layout of ``assemble_operator(B, X)`` is block-major: the point
``x`` of block ``i`` is index ``i * |X| + x``.  The entry at
``(i*|X| + x, j*|X| + y)`` is the sum of the coefficients of those ``h`` in
``B[i, j]`` with ``x . h = y``, so a row vector ``v`` is sent to ``v B``.

Elimination strategy:

* Q: rows are scaled to primitive integer vectors and eliminated
  fraction-free (``v * row_q - a * row_p`` followed by content removal).
* F_p (prime fields and degree-one residue fields): modular elimination on
  machine ints.
* other fields: generic field elimination through the domain operations;
  function fields use fraction-free elimination over the polynomial ring.

Pivots are chosen Markowitz style (shortest rows first, cheapest column
within them).  Once the active block becomes dense the remainder is handed
to a dense kernel (numpy for F_p, Bareiss for Q).
"""
from __future__ import annotations

import math
import random
import time
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .coeff import (
    Domain,
    FiniteField,
    FunctionField,
    NumberField,
    PrimeIdeal,
    Rationals,
    exact_matrix_house,
    matrix_house,
    reduce_mod_prime,
)
from .errors import DomainMismatch, DomainNotField
from .freealg import GAMatrix
from .sofic import FiniteFSet

DENSE_MIN_SIZE = 48
DENSE_FILL = 0.3


class SparseMatrix:
    """Sparse matrix stored as one ``{col: value}`` dict per row, zeros never stored."""

    __slots__ = ("nrows", "ncols", "domain", "rows")

    def __init__(self, nrows: int, ncols: int, domain: Domain, rows: list[dict] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.domain = domain
        self.rows = rows if rows is not None else [dict() for _ in range(nrows)]

    @classmethod
    def from_triples(cls, nrows, ncols, domain, triples: Iterable) -> "SparseMatrix":
        M = cls(nrows, ncols, domain)
        for r, c, v in triples:
            if not (0 <= r < nrows and 0 <= c < ncols):
                raise IndexError(f"position ({r}, {c}) outside {nrows}x{ncols}")
            if (c in M.rows[r]):
                raise ValueError(f"duplicate position ({r}, {c})")
            if not domain.is_zero(v):
                M.rows[r][c] = v
        return M

    @classmethod
    def from_dense(cls, dense, domain: Domain) -> "SparseMatrix":
        n = len(dense)
        m = len(dense[0]) if n else 0
        return cls(n, m, domain, [{j: v for j, v in enumerate(r) if not domain.is_zero(v)} for r in dense])

    @property
    def shape(self):
        return self.nrows, self.ncols

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def triples(self) -> list:
        return [(i, j, r[j]) for i, r in enumerate(self.rows) for j in sorted(r)]

    def transpose(self) -> "SparseMatrix":
        T = SparseMatrix(self.ncols, self.nrows, self.domain)
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                T.rows[j][i] = v
        return T

    def permuted(self, row_perm, col_perm) -> "SparseMatrix":
        """Row ``i`` moves to ``row_perm[i]``, column ``j`` to ``col_perm[j]``."""
        P = SparseMatrix(self.nrows, self.ncols, self.domain)
        for i, r in enumerate(self.rows):
            P.rows[row_perm[i]] = {col_perm[j]: v for j, v in r.items()}
        return P

    def map_values(self, fn, domain: Domain) -> "SparseMatrix":
        out = SparseMatrix(self.nrows, self.ncols, domain)
        for i, r in enumerate(self.rows):
            row = out.rows[i]
            for j, v in r.items():
                w = fn(v)
                if not domain.is_zero(w):
                    row[j] = w
        return out

    def to_dense(self) -> list[list]:
        d = self.domain
        out = [[d.zero] * self.ncols for _ in range(self.nrows)]
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                out[i][j] = v
        return out

    def matmul(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows or self.domain != other.domain:
            raise ValueError("incompatible matrices")
        d = self.domain
        out = SparseMatrix(self.nrows, other.ncols, d)
        for i, r in enumerate(self.rows):
            acc: dict = {}
            for l, a in r.items():
                for j, b in other.rows[l].items():
                    v = d.mul(a, b)
                    acc[j] = d.add(acc[j], v) if j in acc else v
            out.rows[i] = {j: v for j, v in acc.items() if not d.is_zero(v)}
        return out

    def conj_transpose(self) -> "SparseMatrix":
        d = self.domain
        return self.transpose().map_values(d.conj, d)

    def trace(self):
        d = self.domain
        acc = d.zero
        for i in range(min(self.nrows, self.ncols)):
            if i in self.rows[i]:
                acc = d.add(acc, self.rows[i][i])
        return acc

    def __eq__(self, other):
        return (isinstance(other, SparseMatrix) and self.shape == other.shape
                and self.domain == other.domain and self.rows == other.rows)

    def dumps(self) -> str:
        d = self.domain
        trip = self.triples()
        lines = [f"smat {self.nrows} {self.ncols} {len(trip)}"]
        lines += [f"{r} {c} {d.format(v)}" for r, c, v in trip]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str, domain: Domain) -> "SparseMatrix":
        lines = [l for l in text.splitlines() if l.strip()]
        head = lines[0].split()
        if len(head) != 4 or head[0] != "smat":
            raise ValueError("expected header 'smat rows cols k'")
        n, m, k = map(int, head[1:])
        if len(lines) - 1 != k:
            raise ValueError(f"expected {k} entries, found {len(lines) - 1}")
        trip = []
        for l in lines[1:]:
            r, c, v = l.split(None, 2)
            trip.append((int(r), int(c), domain.parse(v)))
        return cls.from_triples(n, m, domain, trip)


@dataclass
class RankReport:
    rank: int
    set_size: int
    n: int
    m: int
    normalized: Fraction
    field: str
    elapsed: float = 0.0

    def __post_init__(self):
        assert 0 <= self.normalized <= min(self.n, self.m)


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

def assemble_operator(B: GAMatrix, X: FiniteFSet) -> SparseMatrix:
    """Matrix of right multiplication by ``B`` on ``F[X]^n`` (see module docstring)."""
    d = B.domain
    if not d.is_field:
        raise DomainNotField(f"{d.label} is not a field")
    if B.rank != X.rank:
        raise DomainMismatch(f"matrix over rank-{B.rank} alphabet, F-set over rank {X.rank}")
    N = X.size
    M = SparseMatrix(B.nrows * N, B.ncols * N, d)
    rows = M.rows
    add, is_zero = d.add, d.is_zero
    for i in range(B.nrows):
        base_r = i * N
        for j in range(B.ncols):
            base_c = j * N
            for h, a in B[i, j].items():
                img = (X.images(h) + base_c).tolist()
                for x in range(N):
                    row = rows[base_r + x]
                    y = img[x]
                    if y in row:
                        v = add(row[y], a)
                        if is_zero(v):
                            del row[y]
                        else:
                            row[y] = v
                    else:
                        row[y] = a
    return M


def reduce_sparse(M: SparseMatrix, P: PrimeIdeal) -> SparseMatrix:
    """Entrywise reduction modulo ``P`` (assemble-then-reduce path)."""
    F = P.residue_field()
    src = M.domain
    return M.map_values(lambda v: reduce_mod_prime(v, src, P), F)


def reduce_gamatrix(B: GAMatrix, P: PrimeIdeal) -> GAMatrix:
    F = P.residue_field()
    src = B.domain
    return B.map_coefficients(lambda v: reduce_mod_prime(v, src, P), F)


# ---------------------------------------------------------------------------
# sparse elimination
# ---------------------------------------------------------------------------

class _Eliminator:
    """Markowitz-ordered sparse elimination; subclasses define the row update."""

    allow_dense = True

    def __init__(self, rows: Iterable[dict]):
        self.rows: dict[int, dict] = {}
        self.cols: dict[int, set] = defaultdict(set)
        self.buckets: dict[int, set] = defaultdict(set)
        self.nnz = 0
        for i, r in enumerate(rows):
            if r:
                self.rows[i] = r
                self.buckets[len(r)].add(i)
                self.nnz += len(r)
                for c in r:
                    self.cols[c].add(i)
        self.rank = 0

    def _pick(self):
        length = min(l for l, b in self.buckets.items() if b)
        cands = self.buckets[length]
        best = None
        for n_seen, i in enumerate(sorted(cands)[:4]):
            for c in self.rows[i]:
                cost = (length - 1) * (len(self.cols[c]) - 1)
                key = (cost, i, c)
                if best is None or key < best:
                    best = key
            if best[0] == 0:
                break
        return best[1], best[2]

    def _set_len(self, i, old, new):
        self.buckets[old].discard(i)
        if new:
            self.buckets[new].add(i)

    def run(self) -> int:
        while self.rows:
            nr = len(self.rows)
            nc = len(self.cols)
            if self.allow_dense and nr * nc >= DENSE_MIN_SIZE * DENSE_MIN_SIZE and self.nnz >= DENSE_FILL * nr * nc:
                return self.rank + self.dense_rank()
            p, c = self._pick()
            prow = self.rows.pop(p)
            self._set_len(p, len(prow), 0)
            self.nnz -= len(prow)
            for col in prow:
                s = self.cols[col]
                s.discard(p)
                if not s:
                    del self.cols[col]
            self.rank += 1
            targets = sorted(self.cols.pop(c, ()))
            if not targets:
                continue
            pv = self.prepare_pivot(prow, c)
            for q in targets:
                qrow = self.rows[q]
                old_len = len(qrow)
                old_cols = set(qrow)
                self.update(qrow, prow, c, pv)
                new_cols = set(qrow)
                for col in old_cols - new_cols:
                    if col == c:
                        continue
                    s = self.cols[col]
                    s.discard(q)
                    if not s:
                        del self.cols[col]
                for col in new_cols - old_cols:
                    self.cols[col].add(q)
                self.nnz += len(qrow) - old_len
                self._set_len(q, old_len, len(qrow))
                if not qrow:
                    del self.rows[q]
        return self.rank

    def remaining_dense(self):
        col_index = {c: k for k, c in enumerate(sorted(self.cols))}
        out = []
        for i in sorted(self.rows):
            r = [0] * len(col_index)
            for c, v in self.rows[i].items():
                r[col_index[c]] = v
            out.append(r)
        return out


class _ModPEliminator(_Eliminator):
    def __init__(self, rows, p):
        self.p = p
        super().__init__(rows)

    def prepare_pivot(self, prow, c):
        return pow(prow[c], -1, self.p)

    def update(self, qrow, prow, c, pinv):
        p = self.p
        f = qrow.pop(c) * pinv % p
        for col, val in prow.items():
            if col == c:
                continue
            old = qrow.get(col)
            if old is None:
                qrow[col] = (-f * val) % p
            else:
                nv = (old - f * val) % p
                if nv:
                    qrow[col] = nv
                else:
                    del qrow[col]

    def dense_rank(self):
        return dense_rank_modp(self.remaining_dense(), self.p)


class _IntegerEliminator(_Eliminator):
    """Fraction-free elimination over Z with primitive rows."""

    def prepare_pivot(self, prow, c):
        return prow[c]

    def update(self, qrow, prow, c, v):
        a = qrow.pop(c)
        g = math.gcd(v, a)
        vs, as_ = v // g, a // g
        if vs != 1:
            for col in qrow:
                qrow[col] *= vs
        for col, val in prow.items():
            if col == c:
                continue
            old = qrow.get(col)
            if old is None:
                qrow[col] = -as_ * val
            else:
                nv = old - as_ * val
                if nv:
                    qrow[col] = nv
                else:
                    del qrow[col]
        if qrow:
            g = math.gcd(*qrow.values())
            if g != 1:
                for col in qrow:
                    qrow[col] //= g

    def dense_rank(self):
        return dense_rank_integer(self.remaining_dense())


class _FieldEliminator(_Eliminator):
    def __init__(self, rows, domain):
        self.d = domain
        super().__init__(rows)

    def prepare_pivot(self, prow, c):
        return self.d.inv(prow[c])

    def update(self, qrow, prow, c, pinv):
        d = self.d
        f = d.mul(qrow.pop(c), pinv)
        for col, val in prow.items():
            if col == c:
                continue
            old = qrow.get(col)
            t = d.mul(f, val)
            if old is None:
                qrow[col] = d.neg(t)
            else:
                nv = d.sub(old, t)
                if d.is_zero(nv):
                    del qrow[col]
                else:
                    qrow[col] = nv

    def dense_rank(self):
        return dense_rank_field(self.remaining_dense(), self.d)


class _PolyEliminator(_Eliminator):
    """Fraction-free elimination over a polynomial ring (sympy PolyElements)."""

    allow_dense = False

    def prepare_pivot(self, prow, c):
        return prow[c]

    def update(self, qrow, prow, c, v):
        a = qrow.pop(c)
        g = v.gcd(a)
        vs, as_ = v.exquo(g), a.exquo(g)
        for col in qrow:
            qrow[col] = qrow[col] * vs
        for col, val in prow.items():
            if col == c:
                continue
            old = qrow.get(col)
            nv = (old if old is not None else 0) - as_ * val
            if nv:
                qrow[col] = nv
            elif old is not None:
                del qrow[col]
        _primitive_poly_row(qrow)

def _primitive_poly_row(row: dict):
    if not row:
        return
    vals = list(row.values())
    g = vals[0]
    for v in vals[1:]:
        if g == 1 or g == -1:
            break
        g = g.gcd(v)
    if g != 1 and g != -1 and not g.is_ground:
        for col in row:
            row[col] = row[col].exquo(g)


# ---------------------------------------------------------------------------
# dense kernels
# ---------------------------------------------------------------------------

def dense_rank_modp(dense, p: int) -> int:
    if not dense or not dense[0]:
        return 0
    if p < 2**31:
        A = np.array(dense, dtype=np.int64) % p
        nr, nc = A.shape
        r = 0
        for c in range(nc):
            if r == nr:
                break
            nz = np.flatnonzero(A[r:, c])
            if nz.size == 0:
                continue
            piv = r + int(nz[0])
            if piv != r:
                A[[r, piv]] = A[[piv, r]]
            inv = pow(int(A[r, c]), -1, p)
            A[r, c:] = A[r, c:] * inv % p
            below = r + 1 + np.flatnonzero(A[r + 1:, c])
            if below.size:
                A[below, c:] = (A[below, c:] - np.outer(A[below, c], A[r, c:])) % p
            r += 1
        return r
    return dense_rank_field([list(row) for row in dense], _IntModP(p))


class _IntModP:
    """Minimal field interface on ints mod a large prime."""

    def __init__(self, p):
        self.p = p
        self.zero = 0

    def is_zero(self, x):
        return x % self.p == 0

    def inv(self, x):
        return pow(x, -1, self.p)

    def mul(self, x, y):
        return x * y % self.p

    def sub(self, x, y):
        return (x - y) % self.p


def dense_rank_bareiss(dense) -> int:
    """Fraction-free (Bareiss) rank of an integer matrix."""
    A = [list(r) for r in dense]
    nr = len(A)
    nc = len(A[0]) if nr else 0
    prev = 1
    r = 0
    for c in range(nc):
        if r == nr:
            break
        piv = next((i for i in range(r, nr) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        pr = A[r]
        pv = pr[c]
        for i in range(r + 1, nr):
            row = A[i]
            a = row[c]
            if a:
                A[i] = row[:c] + [(pv * x - a * y) // prev for x, y in zip(row[c:], pr[c:])]
            elif pv != prev:
                A[i] = row[:c] + [pv * x // prev for x in row[c:]]
        prev = pv
        r += 1
    return r


BAREISS_MAX = 40


def hadamard_log2(dense) -> float:
    """log2 of an upper bound on the absolute value of every minor.

    Any r x r minor is at most the product of the r largest row norms (and of
    the r largest column norms); the smaller of the two full products over
    the ``min(n, m)`` largest norms is returned.
    """
    nr = len(dense)
    nc = len(dense[0]) if nr else 0
    k = min(nr, nc)

    def top_log(norms_sq):
        logs = sorted((math.log2(v) / 2 for v in norms_sq if v), reverse=True)[:k]
        return sum(l for l in logs if l > 0)

    rows = [sum(x * x for x in r) for r in dense]
    cols = [0] * nc
    for r in dense:
        for j, x in enumerate(r):
            if x:
                cols[j] += x * x
    return min(top_log(rows), top_log(cols))


def _certification_primes():
    from sympy import prevprime

    p = 2**31 - 1
    while True:
        yield p
        p = prevprime(p)


def dense_rank_integer(dense) -> int:
    """Exact rank of an integer matrix.

    Small blocks use Bareiss.  Larger ones use ranks modulo word-size primes:
    each is a lower bound, and once the primes' product exceeds the Hadamard
    bound no larger minor can vanish modulo all of them without being zero,
    so the maximum modular rank is the rational rank.
    """
    nr = len(dense)
    nc = len(dense[0]) if nr else 0
    if min(nr, nc) <= BAREISS_MAX:
        return dense_rank_bareiss(dense)
    full = min(nr, nc)
    need = hadamard_log2(dense) + 1
    best = 0
    bits = 0.0
    for p in _certification_primes():
        reduced = [[x % p for x in r] for r in dense]
        best = max(best, dense_rank_modp(reduced, p))
        bits += math.log2(p)
        if best == full or bits > need:
            return best
    raise AssertionError("unreachable")


def dense_rank_field(dense, d) -> int:
    A = [list(r) for r in dense]
    nr = len(A)
    nc = len(A[0]) if nr else 0
    r = 0
    for c in range(nc):
        if r == nr:
            break
        piv = next((i for i in range(r, nr) if not d.is_zero(A[i][c])), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = d.inv(A[r][c])
        pr = A[r]
        for i in range(r + 1, nr):
            a = A[i][c]
            if not d.is_zero(a):
                f = d.mul(a, inv)
                A[i] = [d.sub(x, d.mul(f, y)) for x, y in zip(A[i], pr)]
        r += 1
    return r


# ---------------------------------------------------------------------------
# public rank API
# ---------------------------------------------------------------------------

def _integer_rows(M: SparseMatrix) -> list[dict]:
    out = []
    for r in M.rows:
        if not r:
            out.append({})
            continue
        den = math.lcm(*(v.denominator for v in r.values()))
        ints = {c: v.numerator * (den // v.denominator) for c, v in r.items()}
        g = math.gcd(*ints.values())
        out.append({c: v // g for c, v in ints.items()})
    return out


def _poly_rows(M: SparseMatrix) -> list[dict]:
    out = []
    for r in M.rows:
        if not r:
            out.append({})
            continue
        den = None
        for v in r.values():
            den = v.denom if den is None else den.lcm(v.denom)
        row = {c: v.numer * den.exquo(v.denom) for c, v in r.items()}
        _primitive_poly_row(row)
        out.append(row)
    return out


def rank_exact(M: SparseMatrix) -> int:
    """Exact rank over the matrix's coefficient field."""
    d = M.domain
    if M.nrows == 0 or M.ncols == 0:
        return 0
    if not d.is_field:
        raise DomainNotField(f"{d.label} is not a field")
    if isinstance(d, Rationals):
        elim = _IntegerEliminator(_integer_rows(M))
    elif isinstance(d, FiniteField) and d.degree == 1:
        elim = _ModPEliminator([dict(r) for r in M.rows], d.p)
    elif isinstance(d, FunctionField):
        elim = _PolyEliminator(_poly_rows(M))
    else:
        elim = _FieldEliminator([dict(r) for r in M.rows], d)
    return elim.run()


def rank_hint(M: SparseMatrix, seed: int = 0) -> tuple[int, int]:
    """Rank of an integer-scaled rational matrix modulo a random ~31-bit prime.

    Only a lower bound for the rational rank; callers must confirm with
    :func:`rank_exact` before reporting it.
    """
    from sympy import nextprime

    if not isinstance(M.domain, Rationals):
        raise DomainMismatch("rank_hint is for rational matrices")
    rng = random.Random(seed)
    p = nextprime(rng.randrange(2**30, 2**31 - 2**20))
    rows = _integer_rows(M)
    elim = _ModPEliminator([{c: v % p for c, v in r.items() if v % p} for r in rows], p)
    return elim.run(), p


def _report(M: SparseMatrix, B: GAMatrix, X: FiniteFSet, t0: float) -> RankReport:
    r = rank_exact(M)
    return RankReport(r, X.size, B.nrows, B.ncols, Fraction(r, X.size), M.domain.label,
                      time.perf_counter() - t0)


def normalized_rank(B: GAMatrix, X: FiniteFSet) -> RankReport:
    t0 = time.perf_counter()
    return _report(assemble_operator(B, X), B, X, t0)


def normalized_rank_mod(B: GAMatrix, X: FiniteFSet, P: PrimeIdeal) -> RankReport:
    """Rank of the operator reduced modulo ``P``, normalized by ``|X|``."""
    t0 = time.perf_counter()
    Bp = reduce_gamatrix(B, P)
    return _report(assemble_operator(Bp, X), Bp, X, t0)


def discrepancy_constant(B: GAMatrix) -> float:
    """``m [K:Q] log2 matrix_house(B)``, or 0 when the house is at most 1."""
    if isinstance(B.domain, Rationals):
        h = exact_matrix_house(B)
        if h <= 1:
            return 0.0
        return B.ncols * math.log2(h)
    if isinstance(B.domain, NumberField):
        h = matrix_house(B, upper=True)
        if h <= 1:
            return 0.0
        return B.ncols * B.domain.absolute_degree * math.log2(h)
    raise DomainMismatch(f"discrepancy bound needs Q or a number field, not {B.domain.label}")


# relative slack absorbing floating-point rounding in the logarithms
_LOG_SLACK = 1e-12


def discrepancy_bound(B: GAMatrix, field_size) -> float:
    """Upper bound ``m [K:Q] log2 house(B) / log2 |F|`` for the rank gap modulo a prime.

    ``field_size`` is ``|F|`` or a :class:`PrimeIdeal` / finite field.
    """
    size = getattr(field_size, "size", field_size)
    C = discrepancy_constant(B)
    if C == 0.0:
        return 0.0
    slack = 1.0 if isinstance(B.domain, Rationals) else 1 + _LOG_SLACK
    return C / math.log2(size) * slack


def gap_within_bound(gap: Fraction, B: GAMatrix, field_size) -> bool:
    """Decide ``|gap| <= discrepancy_bound(B, field_size)``.

    Over Q this is the exact integer comparison ``|F|^(a) <= house^(m b)`` for
    ``|gap| = a/b``; over number fields the certified upper house is used.
    """
    size = getattr(field_size, "size", field_size)
    gap = abs(Fraction(gap))
    if gap == 0:
        return True
    if isinstance(B.domain, Rationals):
        h = exact_matrix_house(B)
        if h <= 1:
            return False
        a, b = gap.numerator, gap.denominator
        lhs = Fraction(size) ** a
        return lhs <= h ** (B.ncols * b)
    return gap <= discrepancy_bound(B, size)
