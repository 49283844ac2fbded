"""Reduced words in a free group and exact group-algebra arithmetic.

Words are tuples of signed generator indices: ``1`` is the first generator
``a``, ``-1`` its inverse ``A``.  The empty tuple is the identity.

Text syntax: lower-case letters are generators, upper-case letters their
inverses, ``x^-1`` / ``x^n`` are powers of a single letter and ``1`` (or ``e``
when the alphabet has fewer than five letters) is the identity.  Elements are
written like ``3/2*a*b^-1 - a``; coefficients that are not plain numbers go in
parentheses, e.g. ``(1+w)/2*a``.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .caps import default_caps
from .coeff import QQ, Domain
from .errors import BallTooLarge, DomainMismatch, IndexOutOfAlphabet, ParseError

Word = tuple
IDENTITY: Word = ()

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def reduce_word(letters: Iterable[int], rank: int | None = None) -> Word:
    stack: list[int] = []
    for x in letters:
        x = int(x)
        if x == 0 or (rank is not None and abs(x) > rank):
            raise IndexOutOfAlphabet(f"letter {x} outside alphabet of rank {rank}")
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


def word_mul(u: Word, v: Word) -> Word:
    """Product of two reduced words."""
    i = 0
    n = min(len(u), len(v))
    while i < n and u[-1 - i] == -v[i]:
        i += 1
    return u[: len(u) - i] + v[i:]


def word_inv(u: Word) -> Word:
    return tuple(-x for x in reversed(u))


def word_pow(u: Word, e: int) -> Word:
    if e < 0:
        u, e = word_inv(u), -e
    out = IDENTITY
    for _ in range(e):
        out = word_mul(out, u)
    return out


def word_key(w: Word):
    """Sort key: shorter first, then a < A < b < B < ... letter by letter."""
    return (len(w), tuple((abs(x), x < 0) for x in w))


def exponent_sums(w: Word, rank: int) -> tuple[int, ...]:
    sums = [0] * rank
    for x in w:
        sums[abs(x) - 1] += 1 if x > 0 else -1
    return tuple(sums)


def ball_size(k: int, r: int) -> int:
    if k < 0 or r < 1:
        raise ValueError("need k >= 0 and r >= 1")
    return 1 + sum(2 * r * (2 * r - 1) ** (j - 1) for j in range(1, k + 1))


def ball(k: int, r: int, cap: int | None = None) -> list[Word]:
    """All reduced words of length at most ``k``, in :func:`word_key` order."""
    cap = default_caps().max_ball if cap is None else cap
    size = ball_size(k, r)
    if size > cap:
        raise BallTooLarge(f"ball({k}, {r}) has {size} elements, cap is {cap}")
    letters = [x for i in range(1, r + 1) for x in (i, -i)]
    out = [IDENTITY]
    layer = [IDENTITY]
    for _ in range(k):
        nxt = []
        for w in layer:
            last = w[-1] if w else 0
            for x in letters:
                if x != -last:
                    nxt.append(w + (x,))
        out.extend(nxt)
        layer = nxt
    return out


def format_word(w: Word) -> str:
    if not w:
        return "1"
    return "".join(_LETTERS[x - 1] if x > 0 else _LETTERS[-x - 1].upper() for x in w)


def parse_word(text: str, rank: int) -> Word:
    """Parse ``abAB``-style words (``*`` and whitespace ignored, ``^n`` allowed)."""
    elem = parse_element(text, QQ, rank)
    items = elem.items()
    if len(items) != 1 or items[0][1] != 1:
        raise ParseError(f"{text!r} is not a single group element")
    return items[0][0]


# ---------------------------------------------------------------------------
# group algebra
# ---------------------------------------------------------------------------

class GroupAlgebraElement:
    """Finitely supported ``sum a_h h`` over a coefficient domain.

    Instances are immutable; all operations return new elements.
    """

    __slots__ = ("domain", "rank", "_terms", "_sorted")

    def __init__(self, domain: Domain, rank: int, terms: Mapping[Sequence[int], object] | None = None):
        self.domain = domain
        self.rank = int(rank)
        acc: dict[Word, object] = {}
        if terms:
            for w, c in terms.items():
                w = reduce_word(w, self.rank)
                acc[w] = domain.add(acc[w], c) if w in acc else c
        self._terms = {w: c for w, c in acc.items() if not domain.is_zero(c)}
        self._sorted = None

    @classmethod
    def _raw(cls, domain, rank, terms: dict) -> "GroupAlgebraElement":
        obj = cls.__new__(cls)
        obj.domain = domain
        obj.rank = rank
        obj._terms = terms
        obj._sorted = None
        return obj

    @classmethod
    def zero(cls, domain: Domain, rank: int) -> "GroupAlgebraElement":
        return cls._raw(domain, rank, {})

    @classmethod
    def constant(cls, c, domain: Domain, rank: int) -> "GroupAlgebraElement":
        return cls._raw(domain, rank, {} if domain.is_zero(c) else {IDENTITY: c})

    @classmethod
    def one(cls, domain: Domain, rank: int) -> "GroupAlgebraElement":
        return cls.constant(domain.one, domain, rank)

    @classmethod
    def from_word(cls, w: Word, domain: Domain, rank: int, coeff=None) -> "GroupAlgebraElement":
        c = domain.one if coeff is None else coeff
        return cls(domain, rank, {tuple(w): c})

    @classmethod
    def parse(cls, text: str, domain: Domain = QQ, rank: int = 2) -> "GroupAlgebraElement":
        return parse_element(text, domain, rank)

    # -- access -------------------------------------------------------------
    def items(self) -> list[tuple[Word, object]]:
        if self._sorted is None:
            self._sorted = sorted(self._terms.items(), key=lambda t: word_key(t[0]))
        return self._sorted

    def __iter__(self) -> Iterator[Word]:
        return (w for w, _ in self.items())

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def coefficient(self, w: Word):
        return self._terms.get(tuple(w), self.domain.zero)

    @property
    def support(self) -> list[Word]:
        return [w for w, _ in self.items()]

    def max_length(self) -> int:
        return max((len(w) for w in self._terms), default=0)

    def identity_coefficient(self):
        return self._terms.get(IDENTITY, self.domain.zero)

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other: "GroupAlgebraElement"):
        if not isinstance(other, GroupAlgebraElement):
            raise TypeError(f"expected a group-algebra element, got {type(other).__name__}")
        if other.domain != self.domain:
            raise DomainMismatch(f"{self.domain.label} vs {other.domain.label}")
        if other.rank != self.rank:
            raise DomainMismatch(f"alphabet rank {self.rank} vs {other.rank}")

    def _coerce(self, other):
        if isinstance(other, (int, Fraction)):
            return GroupAlgebraElement.constant(self.domain.from_fraction(other), self.domain, self.rank)
        self._check(other)
        return other

    def __add__(self, other):
        other = self._coerce(other)
        d = self.domain
        out = dict(self._terms)
        for w, c in other._terms.items():
            if w in out:
                s = d.add(out[w], c)
                if d.is_zero(s):
                    del out[w]
                else:
                    out[w] = s
            else:
                out[w] = c
        return GroupAlgebraElement._raw(d, self.rank, out)

    __radd__ = __add__

    def __neg__(self):
        d = self.domain
        return GroupAlgebraElement._raw(d, self.rank, {w: d.neg(c) for w, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "GroupAlgebraElement":
        d = self.domain
        if d.is_zero(c):
            return GroupAlgebraElement.zero(d, self.rank)
        return GroupAlgebraElement._raw(d, self.rank, {w: d.mul(c, a) for w, a in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(self.domain.from_fraction(other))
        self._check(other)
        d = self.domain
        out: dict[Word, object] = {}
        for u, a in self._terms.items():
            for v, b in other._terms.items():
                w = word_mul(u, v)
                c = d.mul(a, b)
                if w in out:
                    out[w] = d.add(out[w], c)
                else:
                    out[w] = c
        return GroupAlgebraElement._raw(d, self.rank, {w: c for w, c in out.items() if not d.is_zero(c)})

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(self.domain.from_fraction(other))
        return NotImplemented

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not defined in the group algebra")
        result = GroupAlgebraElement.one(self.domain, self.rank)
        for _ in range(e):
            result = result * self
        return result

    def star(self) -> "GroupAlgebraElement":
        """``sum conj(a_h) h^-1``."""
        d = self.domain
        return GroupAlgebraElement._raw(d, self.rank, {word_inv(w): d.conj(c) for w, c in self._terms.items()})

    def map_coefficients(self, fn, domain: Domain) -> "GroupAlgebraElement":
        """Apply ``fn`` to each coefficient, landing in ``domain`` (zeros dropped)."""
        out = {}
        for w, c in self._terms.items():
            v = fn(c)
            if not domain.is_zero(v):
                out[w] = v
        return GroupAlgebraElement._raw(domain, self.rank, out)

    def __eq__(self, other):
        if not isinstance(other, GroupAlgebraElement):
            return NotImplemented
        return self.domain == other.domain and self.rank == other.rank and self._terms == other._terms

    def __hash__(self):
        return hash((self.domain, self.rank, frozenset(self._terms.items())))

    def __repr__(self):
        return f"GroupAlgebraElement({str(self)!r}, {self.domain.label}, rank={self.rank})"

    def __str__(self):
        return format_element(self)


def ga_add(x: GroupAlgebraElement, y: GroupAlgebraElement) -> GroupAlgebraElement:
    return x + y


def ga_mul(x: GroupAlgebraElement, y: GroupAlgebraElement) -> GroupAlgebraElement:
    return x * y


def ga_scale(c, x: GroupAlgebraElement) -> GroupAlgebraElement:
    return x.scale(c)


def ga_star(x: GroupAlgebraElement) -> GroupAlgebraElement:
    return x.star()


def identity_coefficient(x: GroupAlgebraElement):
    return x.identity_coefficient()


def _format_runs(w: Word) -> str:
    parts = []
    i = 0
    while i < len(w):
        j = i
        while j < len(w) and w[j] == w[i]:
            j += 1
        letter = format_word((w[i],))
        parts.append(letter if j - i == 1 else f"{letter}^{j - i}")
        i = j
    return "*".join(parts)


def format_element(x: GroupAlgebraElement) -> str:
    d = x.domain
    parts = []
    for w, c in x.items():
        neg, ctext = d.format_coefficient(c)
        if not w:
            term = ctext
        else:
            word = _format_runs(w)
            term = word if ctext == "1" else f"{ctext}*{word}"
        if not parts:
            parts.append(("-" if neg else "") + term)
        else:
            parts.append(("- " if neg else "+ ") + term)
    return " ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# element parser
# ---------------------------------------------------------------------------

class _ElementParser:
    def __init__(self, text: str, domain: Domain, rank: int):
        self.text = text
        self.domain = domain
        self.rank = rank
        self.pos = 0

    def _skip(self):
        t = self.text
        while self.pos < len(t) and t[self.pos].isspace():
            self.pos += 1

    def _peek(self):
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _err(self, msg, pos=None):
        raise ParseError(msg, self.pos if pos is None else pos, self.text)

    def parse(self) -> GroupAlgebraElement:
        d = self.domain
        terms: dict[Word, object] = {}
        first = True
        while True:
            ch = self._peek()
            if not ch:
                if first:
                    self._err("empty element")
                break
            sign = 1
            if ch in "+-":
                sign = -1 if ch == "-" else 1
                self.pos += 1
            elif not first:
                self._err(f"expected '+' or '-', found {ch!r}")
            coeff, word = self._term()
            if sign < 0:
                coeff = d.neg(coeff)
            terms[word] = d.add(terms[word], coeff) if word in terms else coeff
            first = False
        return GroupAlgebraElement(d, self.rank, terms)

    def _number(self) -> Fraction:
        t = self.text
        start = self.pos
        while self.pos < len(t) and t[self.pos].isdigit():
            self.pos += 1
        return Fraction(int(t[start:self.pos]))

    def _term(self):
        d = self.domain
        coeff = d.one
        word: list[int] = []
        seen = False
        while True:
            ch = self._peek()
            if not ch or ch in "+-":
                if not seen:
                    self._err("expected a term")
                return coeff, reduce_word(word, self.rank)
            if seen:
                if ch == "*":
                    self.pos += 1
                    ch = self._peek()
                elif not ch.isalpha():
                    self._err(f"unexpected {ch!r}")
            start = self.pos
            if ch.isdigit():
                value = d.from_fraction(self._number())
                coeff = d.mul(coeff, self._divisor(value, start))
            elif ch == "(":
                depth, i = 0, self.pos
                while i < len(self.text):
                    if self.text[i] == "(":
                        depth += 1
                    elif self.text[i] == ")":
                        depth -= 1
                        if depth == 0:
                            break
                    i += 1
                else:
                    self._err("unbalanced '('", start)
                value = d.parse(self.text[start + 1:i], offset=start + 1)
                self.pos = i + 1
                coeff = d.mul(coeff, self._divisor(value, start))
            elif ch.isalpha():
                self.pos += 1
                if ch == "e" and self.rank < 5:
                    letter = 0
                else:
                    idx = _LETTERS.index(ch.lower()) + 1
                    if idx > self.rank:
                        raise IndexOutOfAlphabet(f"letter {ch!r} at position {start} outside alphabet of rank {self.rank}")
                    letter = idx if ch.islower() else -idx
                power = self._power()
                if letter:
                    if power < 0:
                        letter, power = -letter, -power
                    word.extend([letter] * power)
            else:
                self._err(f"unexpected {ch!r}")
            seen = True

    def _power(self) -> int:
        if self._peek() != "^":
            return 1
        self.pos += 1
        neg = False
        if self._peek() == "-":
            neg = True
            self.pos += 1
        if not self._peek().isdigit():
            self._err("expected integer exponent")
        e = int(self._number())
        return -e if neg else e

    def _divisor(self, value, start):
        if self._peek() != "/":
            return value
        self.pos += 1
        if not self._peek().isdigit():
            self._err("expected a number after '/'")
        at = self.pos
        q = self._number()
        d = self.domain
        p = d.characteristic
        den = d.zero if p and q % p == 0 else d.from_fraction(q)
        if d.is_zero(den):
            self._err("division by zero", at)
        return d.div(value, den)


def parse_element(text: str, domain: Domain = QQ, rank: int = 2) -> GroupAlgebraElement:
    return _ElementParser(text, domain, rank).parse()


# ---------------------------------------------------------------------------
# matrices over the group algebra
# ---------------------------------------------------------------------------

class GAMatrix:
    """Dense ``n x m`` matrix of group-algebra elements sharing domain and alphabet."""

    __slots__ = ("domain", "rank", "nrows", "ncols", "entries")

    def __init__(self, entries: Sequence[Sequence[GroupAlgebraElement]], domain: Domain | None = None,
                 rank: int | None = None, shape: tuple[int, int] | None = None):
        rows = [list(r) for r in entries]
        if shape is not None:
            n, m = shape
        else:
            n = len(rows)
            m = len(rows[0]) if rows else 0
        if len(rows) != n or any(len(r) != m for r in rows):
            raise ValueError("ragged matrix")
        if rows and m:
            domain = rows[0][0].domain if domain is None else domain
            rank = rows[0][0].rank if rank is None else rank
        if domain is None or rank is None:
            raise ValueError("empty matrix needs explicit domain and rank")
        for r in rows:
            for e in r:
                if e.domain != domain or e.rank != rank:
                    raise DomainMismatch("matrix entries must share domain and alphabet rank")
        self.domain = domain
        self.rank = rank
        self.nrows = n
        self.ncols = m
        self.entries = tuple(tuple(r) for r in rows)

    @classmethod
    def zeros(cls, n: int, m: int, domain: Domain = QQ, rank: int = 2) -> "GAMatrix":
        z = GroupAlgebraElement.zero(domain, rank)
        return cls([[z] * m for _ in range(n)], domain, rank, (n, m))

    @classmethod
    def identity(cls, n: int, domain: Domain = QQ, rank: int = 2) -> "GAMatrix":
        z = GroupAlgebraElement.zero(domain, rank)
        one = GroupAlgebraElement.one(domain, rank)
        return cls([[one if i == j else z for j in range(n)] for i in range(n)], domain, rank, (n, n))

    @classmethod
    def parse(cls, rows: Sequence[Sequence[str]] | str, domain: Domain = QQ, rank: int = 2) -> "GAMatrix":
        if isinstance(rows, str):
            rows = [[rows]]
        return cls([[parse_element(s, domain, rank) for s in r] for r in rows], domain, rank,
                   (len(rows), len(rows[0]) if rows else 0))

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij) -> GroupAlgebraElement:
        i, j = ij
        return self.entries[i][j]

    def rows(self):
        return self.entries

    def _same(self, other: "GAMatrix"):
        if other.domain != self.domain or other.rank != self.rank:
            raise DomainMismatch("matrices over different algebras")

    def __add__(self, other: "GAMatrix") -> "GAMatrix":
        self._same(other)
        if other.shape != self.shape:
            raise ValueError("shape mismatch")
        return GAMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)],
                        self.domain, self.rank, self.shape)

    def __neg__(self):
        return GAMatrix([[-a for a in r] for r in self.entries], self.domain, self.rank, self.shape)

    def __sub__(self, other):
        return self + (-other)

    def __matmul__(self, other: "GAMatrix") -> "GAMatrix":
        self._same(other)
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        zero = GroupAlgebraElement.zero(self.domain, self.rank)
        out = []
        for i in range(self.nrows):
            row = []
            for j in range(other.ncols):
                acc = zero
                for l in range(self.ncols):
                    a = self.entries[i][l]
                    b = other.entries[l][j]
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return GAMatrix(out, self.domain, self.rank, (self.nrows, other.ncols))

    __mul__ = __matmul__

    def scale(self, c) -> "GAMatrix":
        return GAMatrix([[a.scale(c) for a in r] for r in self.entries], self.domain, self.rank, self.shape)

    def star(self) -> "GAMatrix":
        """Conjugate transpose with entrywise ``star``."""
        return GAMatrix([[self.entries[i][j].star() for i in range(self.nrows)] for j in range(self.ncols)],
                        self.domain, self.rank, (self.ncols, self.nrows))

    def map_coefficients(self, fn, domain: Domain) -> "GAMatrix":
        return GAMatrix([[a.map_coefficients(fn, domain) for a in r] for r in self.entries],
                        domain, self.rank, self.shape)

    def coerce(self, domain: Domain) -> "GAMatrix":
        """Embed into a larger coefficient domain (e.g. Q into a number field)."""
        if domain == self.domain:
            return self
        src = self.domain
        return self.map_coefficients(lambda c: domain.coerce(c, src), domain)

    def max_word_length(self) -> int:
        return max((e.max_length() for r in self.entries for e in r), default=0)

    def words(self) -> set:
        return {w for r in self.entries for e in r for w in e}

    def is_zero(self) -> bool:
        return not any(e for r in self.entries for e in r)

    def format(self) -> list[list[str]]:
        return [[str(e) for e in r] for r in self.entries]

    def __eq__(self, other):
        if not isinstance(other, GAMatrix):
            return NotImplemented
        return (self.domain == other.domain and self.rank == other.rank
                and self.shape == other.shape and self.entries == other.entries)

    def __hash__(self):
        return hash((self.domain, self.rank, self.entries))

    def __repr__(self):
        return f"GAMatrix({self.format()!r}, {self.domain.label}, rank={self.rank})"
