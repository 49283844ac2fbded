"""Small dense matrices over a coefficient domain (lists of lists of raw values)."""
from __future__ import annotations

from .errors import DivisionByZero


def mat_identity(d, k):
    return [[d.one if i == j else d.zero for j in range(k)] for i in range(k)]


def mat_mul(d, A, B):
    n, m, p = len(A), len(B), len(B[0]) if B else 0
    out = []
    for i in range(n):
        row = [d.zero] * p
        Ai = A[i]
        for l in range(m):
            a = Ai[l]
            if d.is_zero(a):
                continue
            Bl = B[l]
            for j in range(p):
                b = Bl[j]
                if not d.is_zero(b):
                    row[j] = d.add(row[j], d.mul(a, b))
        out.append(row)
    return out


def mat_eq(A, B) -> bool:
    return len(A) == len(B) and all(list(r) == list(s) for r, s in zip(A, B))


def mat_is_identity(d, A) -> bool:
    return mat_eq(A, mat_identity(d, len(A)))


def mat_transpose(A):
    return [list(col) for col in zip(*A)] if A else []


def mat_map(fn, A):
    return [[fn(x) for x in r] for r in A]


def mat_inverse(d, A):
    """Gauss-Jordan inverse; raises DivisionByZero for singular input."""
    k = len(A)
    M = [list(r) + [d.one if i == j else d.zero for j in range(k)] for i, r in enumerate(A)]
    for c in range(k):
        piv = next((r for r in range(c, k) if not d.is_zero(M[r][c])), None)
        if piv is None:
            raise DivisionByZero("singular matrix")
        M[c], M[piv] = M[piv], M[c]
        inv = d.inv(M[c][c])
        M[c] = [d.mul(inv, x) for x in M[c]]
        for r in range(k):
            if r != c and not d.is_zero(M[r][c]):
                f = M[r][c]
                M[r] = [d.sub(x, d.mul(f, y)) for x, y in zip(M[r], M[c])]
    return [row[k:] for row in M]
