"""Finite right F-sets, fixed-point statistics and the standard constructions.

A :class:`FiniteFSet` stores one permutation of ``{0, ..., N-1}`` per free
generator (as numpy index arrays) plus its inverse.  The action is on the
right: ``x . (uv) = (x . u) . v``, so a word acts letter by letter from the
left end.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .caps import default_caps
from .errors import BadPreset, ClosureTooLarge, PointOutOfRange, ProductTooLarge
from .freealg import IDENTITY, Word, ball, exponent_sums, word_inv, word_mul

Oracle = Callable[[Word], bool]


class FiniteFSet:
    """A finite set with a right action of the free group of rank ``len(perms)``."""

    __slots__ = ("size", "rank", "perms", "invs", "label", "_cache")

    def __init__(self, perms: Sequence[Sequence[int]], label: str = "", check: bool = True):
        arrays = [np.asarray(p, dtype=np.int64) for p in perms]
        if not arrays:
            raise ValueError("need at least one generator")
        n = arrays[0].shape[0]
        if n < 1:
            raise ValueError("an F-set has at least one point")
        invs = []
        for i, p in enumerate(arrays):
            if p.shape != (n,):
                raise ValueError("all generator permutations must have the same length")
            inv = np.empty_like(p)
            inv[p] = np.arange(n, dtype=np.int64)
            if check and (p.min() < 0 or p.max() >= n or not np.array_equal(p[inv], np.arange(n))):
                raise ValueError(f"generator {i + 1} is not a permutation")
            p.setflags(write=False)
            inv.setflags(write=False)
            invs.append(inv)
        self.size = int(n)
        self.rank = len(arrays)
        self.perms = tuple(arrays)
        self.invs = tuple(invs)
        self.label = label
        self._cache: dict[Word, np.ndarray] = {}

    def __repr__(self):
        return f"FiniteFSet(size={self.size}, rank={self.rank}, label={self.label!r})"

    def __eq__(self, other):
        return (isinstance(other, FiniteFSet) and self.size == other.size and self.rank == other.rank
                and all(np.array_equal(a, b) for a, b in zip(self.perms, other.perms)))

    def __hash__(self):
        return hash((self.size, self.rank, tuple(p.tobytes() for p in self.perms)))

    def letter(self, x: int) -> np.ndarray:
        return self.perms[x - 1] if x > 0 else self.invs[-x - 1]

    def act(self, x: int, w: Word) -> int:
        if not 0 <= x < self.size:
            raise PointOutOfRange(f"point {x} not in 0..{self.size - 1}")
        for l in w:
            x = int(self.letter(l)[x])
        return x

    def images(self, w: Word) -> np.ndarray:
        """Array ``y`` with ``y[x] = x . w`` for every point."""
        w = tuple(w)
        hit = self._cache.get(w)
        if hit is not None:
            return hit
        if not w:
            out = np.arange(self.size, dtype=np.int64)
        else:
            out = self.letter(w[-1])[self.images(w[:-1])]
        out.setflags(write=False)
        if len(self._cache) < 4096:
            self._cache[w] = out
        return out

    def fixed_count(self, w: Word) -> int:
        return int(np.count_nonzero(self.images(w) == np.arange(self.size)))

    def fixed_ratio(self, w: Word) -> Fraction:
        return Fraction(self.fixed_count(w), self.size)

    def relabel(self, perm: Sequence[int]) -> "FiniteFSet":
        """Conjugate copy: point ``x`` is renamed ``perm[x]``."""
        perm = np.asarray(perm, dtype=np.int64)
        inv = np.empty_like(perm)
        inv[perm] = np.arange(self.size)
        return FiniteFSet([perm[p[inv]] for p in self.perms], self.label + "~")

    def orbits(self) -> list[list[int]]:
        seen = np.zeros(self.size, dtype=bool)
        out = []
        for start in range(self.size):
            if seen[start]:
                continue
            orbit = [start]
            seen[start] = True
            k = 0
            while k < len(orbit):
                x = orbit[k]
                k += 1
                for arr in itertools.chain(self.perms, self.invs):
                    y = int(arr[x])
                    if not seen[y]:
                        seen[y] = True
                        orbit.append(y)
            out.append(orbit)
        return out

    def spanning_words(self) -> tuple[list[int], list[Word]]:
        """For each point, its orbit root and a word carrying the root to it."""
        root = [-1] * self.size
        words: list[Word] = [IDENTITY] * self.size
        for orbit in self.orbits():
            r = orbit[0]
            root[r] = r
            queue = [r]
            k = 0
            while k < len(queue):
                x = queue[k]
                k += 1
                for g in range(1, self.rank + 1):
                    for l in (g, -g):
                        y = int(self.letter(l)[x])
                        if root[y] < 0:
                            root[y] = r
                            words[y] = words[x] + (l,)
                            queue.append(y)
        return root, words

    # -- serialization ----------------------------------------------------
    def dumps(self) -> str:
        lines = [f"fset {self.size} {self.rank}"]
        lines += [" ".join(map(str, p.tolist())) for p in self.perms]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str, label: str = "") -> "FiniteFSet":
        lines = [l for l in text.splitlines() if l.strip()]
        head = lines[0].split()
        if len(head) != 3 or head[0] != "fset":
            raise ValueError("expected header 'fset N r'")
        n, r = int(head[1]), int(head[2])
        if len(lines) != r + 1:
            raise ValueError(f"expected {r} permutation lines, found {len(lines) - 1}")
        perms = [[int(v) for v in l.split()] for l in lines[1:]]
        if any(len(p) != n for p in perms):
            raise ValueError(f"each permutation line needs {n} entries")
        return cls(perms, label)


def act(X: FiniteFSet, x: int, w: Word) -> int:
    return X.act(x, w)


def fixed_ratio(X: FiniteFSet, w: Word) -> Fraction:
    return X.fixed_ratio(w)


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------

def free_oracle(w: Word) -> bool:
    """Membership in the trivial normal subgroup (the free group itself)."""
    return len(w) == 0


def abelian_oracle(rank: int) -> Oracle:
    """Membership in the commutator subgroup: all exponent sums vanish."""
    def oracle(w: Word) -> bool:
        return not any(exponent_sums(w, rank))
    return oracle


def action_oracle(X: FiniteFSet) -> Oracle:
    """``w`` is a relator iff it acts trivially on ``X`` (faithful finite quotients)."""
    def oracle(w: Word) -> bool:
        return X.fixed_count(w) == X.size
    return oracle


@dataclass
class DefectProfile:
    radius: int
    ratios: dict
    verdicts: dict | None = None
    deviations: dict | None = None
    max_deviation: Fraction | None = None

    def worst(self) -> list[Word]:
        if self.deviations is None:
            return []
        return [w for w, d in self.deviations.items() if d == self.max_deviation]


def defect_profile(X: FiniteFSet, k: int, oracle: Oracle | None = None, cap: int | None = None) -> DefectProfile:
    """Fixed-point ratio of every word in the radius-``k`` ball, with deviations if an oracle is given.

    The deviation of ``w`` is ``1 - ratio`` for relators and ``ratio`` otherwise.
    """
    words = ball(k, X.rank, cap)
    ratios = {w: X.fixed_ratio(w) for w in words}
    if oracle is None:
        return DefectProfile(k, ratios)
    verdicts = {w: bool(oracle(w)) for w in words}
    devs = {w: (1 - r if verdicts[w] else r) for w, r in ratios.items()}
    return DefectProfile(k, ratios, verdicts, devs, max(devs.values()))


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------

def product_action(X: FiniteFSet, Z: FiniteFSet, cap: int | None = None) -> FiniteFSet:
    """Diagonal action on ``X x Z``; the pair ``(x, z)`` is point ``x * |Z| + z``."""
    if X.rank != Z.rank:
        raise ValueError("F-sets over different alphabets")
    cap = default_caps().max_set_size if cap is None else cap
    n = X.size * Z.size
    if n > cap:
        raise ProductTooLarge(f"product has {n} points, cap is {cap}")
    perms = [(px[:, None] * Z.size + pz[None, :]).reshape(-1) for px, pz in zip(X.perms, Z.perms)]
    return FiniteFSet(perms, f"{X.label}x{Z.label}", check=False)


def cyclic_fset(m: int) -> FiniteFSet:
    """``Z/m`` with the single generator acting by +1."""
    return FiniteFSet([(np.arange(m) + 1) % m], f"Z/{m}")


def trivial_fset(rank: int) -> FiniteFSet:
    return FiniteFSet([[0]] * rank, "pt")


def zd_fset(d: int, m: int) -> FiniteFSet:
    """``(Z/m)^d`` with generator i adding the i-th unit vector."""
    n = m ** d
    idx = np.arange(n)
    perms = []
    for i in range(d):
        stride = m ** (d - 1 - i)
        digit = (idx // stride) % m
        perms.append(idx + (((digit + 1) % m) - digit) * stride)
    return FiniteFSet(perms, f"(Z/{m})^{d}")


def regular_action_of_group(gens: Sequence[Sequence[int]], cap: int | None = None, label: str = "") -> FiniteFSet:
    """Right regular action of the permutation group generated by ``gens``.

    Group elements are permutations composed left to right; generator ``i``
    sends the element ``g`` to ``g * gens[i]``.
    """
    cap = default_caps().max_closure if cap is None else cap
    gens = [tuple(int(v) for v in g) for g in gens]
    d = len(gens[0])
    ident = tuple(range(d))
    return _regular_closure(ident, [lambda g, s=s: tuple(s[v] for v in g) for s in gens], cap, label)


def _regular_closure(ident, right_mults, cap, label) -> FiniteFSet:
    index = {ident: 0}
    elems = [ident]
    k = 0
    while k < len(elems):
        g = elems[k]
        k += 1
        for mul in right_mults:
            h = mul(g)
            if h not in index:
                if len(elems) >= cap:
                    raise ClosureTooLarge(f"group generated has more than {cap} elements")
                index[h] = len(elems)
                elems.append(h)
    perms = [[index[mul(g)] for g in elems] for mul in right_mults]
    return FiniteFSet(perms, label, check=False)


def regular_action_of_image(sigma, cap: int | None = None) -> FiniteFSet:
    """Right regular action of the finite matrix group generated by ``sigma``'s generator images.

    ``sigma`` must be defined over a finite field; points are the elements of
    the image group, identity first.
    """
    from ._matrix import mat_identity, mat_mul

    d = sigma.domain
    if not d.characteristic:
        raise ValueError("regular_action_of_image needs a representation over a finite field")
    cap = default_caps().max_closure if cap is None else cap
    k = sigma.dim

    def freeze(M):
        return tuple(tuple(r) for r in M)

    mults = [lambda g, S=S: freeze(mat_mul(d, g, S)) for S in sigma.matrices]
    return _regular_closure(freeze(mat_identity(d, k)), mults, cap, f"im(sigma) mod {d.label}")


def stabilizer_generators(X: FiniteFSet, point: int = 0) -> list[Word]:
    """Schreier generators ``u_x g u_{x.g}^-1`` of the stabilizer of ``point``.

    ``u_x`` are the spanning-tree words of :meth:`FiniteFSet.spanning_words`;
    trivial generators (tree edges) are dropped.
    """
    root, words = X.spanning_words()
    r = root[point]
    shift = word_inv(words[point])
    out = []
    seen = set()
    for x in range(X.size):
        if root[x] != r:
            continue
        for g in range(1, X.rank + 1):
            y = int(X.perms[g - 1][x])
            w = word_mul(word_mul(words[x], (g,)), word_inv(words[y]))
            # conjugate from the orbit root to ``point``
            w = word_mul(word_mul(shift, w), words[point])
            if w and w not in seen:
                seen.add(w)
                out.append(w)
    return out


def commutator_relators(rank: int) -> list[Word]:
    return [(i, j, -i, -j) for i in range(1, rank + 1) for j in range(i + 1, rank + 1)]


def is_free_action(X: FiniteFSet, oracle: Oracle, radius: int) -> bool:
    """Every word in the ball is either a relator fixing everything or fixes nothing."""
    prof = defect_profile(X, radius, oracle)
    return prof.max_deviation == 0


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

@dataclass
class Approximation:
    """A named family of F-sets together with the relator oracle it approximates."""

    name: str
    rank: int
    fsets: list
    oracle: Oracle | None
    free_action: bool = False
    params: dict = field(default_factory=dict)
    relators: list = field(default_factory=list)
    exact_limit: bool = False


def _int_list(values, what) -> list[int]:
    try:
        return [int(v) for v in values]
    except (TypeError, ValueError):
        raise BadPreset(f"{what} must be a list of integers") from None


def preset_approximation(name: str, params: dict, rank: int | None = None) -> Approximation:
    """Instantiate one of the preset families.

    * ``zd_congruence``: ``d``, ``moduli`` -- ``(Z/m)^d`` for each modulus.
    * ``finite_regular``: ``generators`` (permutation image lists) -- the
      right regular action of the generated finite group.
    * ``free_random_perm``: ``sizes``, ``seed``, ``rank`` -- independent uniform
      permutations per generator.
    * ``finite_quotient``: ``generators`` -- the given permutation action itself.
    """
    caps = default_caps()
    if name == "zd_congruence":
        try:
            d = int(params["d"])
        except (KeyError, ValueError, TypeError):
            raise BadPreset("zd_congruence needs integer 'd'") from None
        moduli = _int_list(params.get("moduli", []), "moduli")
        if d < 1 or not moduli or min(moduli) < 1:
            raise BadPreset("zd_congruence needs d >= 1 and positive moduli")
        for m in moduli:
            if m ** d > caps.max_set_size:
                raise BadPreset(f"(Z/{m})^{d} exceeds the size cap {caps.max_set_size}")
        return Approximation(name, d, [zd_fset(d, m) for m in moduli], abelian_oracle(d), params=params,
                             relators=commutator_relators(d))
    if name in ("finite_regular", "finite_quotient"):
        gens = params.get("generators")
        if not gens:
            raise BadPreset(f"{name} needs 'generators'")
        gens = [_int_list(g, "generator") for g in gens]
        n = len(gens[0])
        if any(len(g) != n or sorted(g) != list(range(n)) for g in gens):
            raise BadPreset("generators must be permutations of one set 0..n-1")
        G = regular_action_of_group(gens, caps.max_closure, "regular")
        relators = stabilizer_generators(G)
        if name == "finite_quotient":
            X = FiniteFSet(gens, "quotient")
            return Approximation(name, len(gens), [X], action_oracle(G), params=params, relators=relators)
        repeats = int(params.get("repeats", 1))
        return Approximation(name, len(gens), [G] * repeats, action_oracle(G), free_action=True,
                             params=params, relators=relators, exact_limit=True)
    if name == "free_random_perm":
        sizes = _int_list(params.get("sizes", []), "sizes")
        if "seed" not in params or params["seed"] is None:
            raise BadPreset("free_random_perm needs an explicit seed")
        r = int(params.get("rank", rank or 2))
        rng = np.random.default_rng(int(params["seed"]))
        fsets = []
        for n in sizes:
            if n < 1 or n > caps.max_set_size:
                raise BadPreset(f"size {n} outside 1..{caps.max_set_size}")
            fsets.append(FiniteFSet([rng.permutation(n) for _ in range(r)], f"rand{n}"))
        return Approximation(name, r, fsets, free_oracle, params=params)
    raise BadPreset(f"unknown preset {name!r}")


# small permutation groups used by tests and examples

def symmetric_group_generators(n: int) -> list[list[int]]:
    """Transposition (0 1) and the n-cycle."""
    t = list(range(n))
    t[0], t[1] = 1, 0
    c = [(i + 1) % n for i in range(n)]
    return [t, c]


def dihedral_group_generators(n: int) -> list[list[int]]:
    """Rotation and reflection of the n-gon."""
    return [[(i + 1) % n for i in range(n)], [(-i) % n for i in range(n)]]
