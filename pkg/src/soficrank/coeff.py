"""Coefficient domains and the house size functions.

A domain is a small runtime descriptor object that knows how to do exact
arithmetic on *raw* element values.  Raw values are plain Python objects:

===================  ==============================================
domain               raw element
===================  ==============================================
``Rationals``        :class:`fractions.Fraction`
``NumberField``      tuple of ``deg f`` Fractions (coefficients of 1, w, w^2, ...)
``FiniteField``      ``int`` in ``[0, p)`` when the degree is 1, otherwise a
                     tuple of ints (coefficients of 1, w, ...) mod p
``FunctionField``    a sympy ``FracElement`` over QQ
===================  ==============================================

Domains compare equal when their descriptors agree, so two separately
constructed ``NumberField([-2, 0, 1])`` objects are interchangeable.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import (
    DenominatorVanishes,
    DivisionByZero,
    DomainMismatch,
    ParseError,
    PrimeDividesDenominator,
    PrimeSearchExhausted,
    RootIsolationFailed,
)

HOUSE_TOLERANCE = 1e-9


# ---------------------------------------------------------------------------
# dense univariate polynomials, coefficient lists low -> high
# ---------------------------------------------------------------------------

def _trim(c: list) -> list:
    while c and not c[-1]:
        c.pop()
    return c


def _qpoly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _qpoly_divmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(_trim(a)) >= len(b):
        shift = len(a) - len(b)
        factor = a[-1] / lead
        q[shift] = factor
        for i, y in enumerate(b):
            a[shift + i] -= factor * y
        a.pop()
    return _trim(q), _trim(a)


def _qpoly_gcd(a, b):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _qpoly_divmod(a, b)[1]
    if a:
        lead = a[-1]
        a = [x / lead for x in a]
    return a


def _qpoly_deriv(a):
    return _trim([i * a[i] for i in range(1, len(a))])


def _qpoly_eval(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _ppoly_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([v % p for v in out])


def _ppoly_divmod(a, b, p):
    a = [v % p for v in a]
    _trim(a)
    q = [0] * max(len(a) - len(b) + 1, 0)
    inv = pow(b[-1], -1, p)
    while len(a) >= len(b):
        shift = len(a) - len(b)
        factor = a[-1] * inv % p
        q[shift] = factor
        for i, y in enumerate(b):
            a[shift + i] = (a[shift + i] - factor * y) % p
        _trim(a)
    return _trim(q), a


def _ppoly_rem(a, b, p):
    return _ppoly_divmod(a, b, p)[1]


def _format_poly(coeffs, var: str, fmt) -> str:
    parts = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if not c:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        text = fmt(c)
        neg = text.startswith("-")
        if neg:
            text = text[1:]
        if mono:
            text = mono if text == "1" else f"{text}*{mono}"
        if not parts:
            parts.append(("-" if neg else "") + text)
        else:
            parts.append(("- " if neg else "+ ") + text)
    return " ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# expression parser shared by all domains
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([A-Za-z_]\w*)|(.))")


class _ExprParser:
    """Recursive descent over + - * / ^ ( ) with numbers and named generators."""

    def __init__(self, text: str, domain: "Domain", offset: int = 0):
        self.domain = domain
        self.text = text
        self.offset = offset
        self.tokens = []
        for m in _TOKEN.finditer(text):
            if m.group(0).strip() == "":
                continue
            if m.group(1) is not None:
                self.tokens.append(("num", m.group(1), m.start(1)))
            elif m.group(2) is not None:
                self.tokens.append(("name", m.group(2), m.start(2)))
            else:
                self.tokens.append(("op", m.group(3), m.start(3)))
        self.i = 0

    def _peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def _err(self, msg, pos):
        raise ParseError(msg, self.offset + pos, self.text)

    def parse(self):
        if not self.tokens:
            self._err("empty coefficient", 0)
        value = self._expr()
        kind, tok, pos = self._peek()
        if kind is not None:
            self._err(f"unexpected {tok!r}", pos)
        return value

    def _expr(self):
        d = self.domain
        kind, tok, pos = self._peek()
        sign = 1
        if kind == "op" and tok in "+-":
            self.i += 1
            sign = -1 if tok == "-" else 1
        value = self._term()
        if sign < 0:
            value = d.neg(value)
        while True:
            kind, tok, pos = self._peek()
            if kind == "op" and tok in "+-":
                self.i += 1
                rhs = self._term()
                value = d.add(value, rhs) if tok == "+" else d.sub(value, rhs)
            else:
                return value

    def _term(self):
        d = self.domain
        value = self._power()
        while True:
            kind, tok, pos = self._peek()
            if kind == "op" and tok in "*/":
                self.i += 1
                rhs = self._power()
                if tok == "*":
                    value = d.mul(value, rhs)
                else:
                    if d.is_zero(rhs):
                        self._err("division by zero", pos)
                    value = d.div(value, rhs)
            else:
                return value

    def _power(self):
        d = self.domain
        base = self._atom()
        kind, tok, pos = self._peek()
        if kind == "op" and tok == "^":
            self.i += 1
            neg = False
            kind, tok, pos = self._peek()
            if kind == "op" and tok == "-":
                neg = True
                self.i += 1
                kind, tok, pos = self._peek()
            if kind != "num" or not tok.isdigit():
                self._err("expected integer exponent", pos)
            self.i += 1
            e = int(tok)
            if neg:
                if d.is_zero(base):
                    self._err("division by zero", pos)
                base = d.inv(base)
            return d.pow(base, e)
        return base

    def _atom(self):
        d = self.domain
        kind, tok, pos = self._peek()
        if kind == "num":
            self.i += 1
            return d.from_fraction(Fraction(tok))
        if kind == "name":
            self.i += 1
            try:
                return d.generator(tok)
            except KeyError:
                self._err(f"unknown symbol {tok!r} for {d.label}", pos)
        if kind == "op" and tok == "(":
            self.i += 1
            value = self._expr()
            kind, tok2, pos2 = self._peek()
            if tok2 != ")":
                self._err("expected ')'", pos2)
            self.i += 1
            return value
        if kind == "op" and tok in "+-":
            # unary sign after an operator, as in "t + -1"
            self.i += 1
            value = self._power()
            return d.neg(value) if tok == "-" else value
        self._err("unexpected end of coefficient" if kind is None else f"unexpected {tok!r}", pos)


_ATOM = re.compile(r"^\d+(/\d+)?$")


# ---------------------------------------------------------------------------
# domains
# ---------------------------------------------------------------------------

class Domain:
    """Common interface; subclasses implement the arithmetic."""

    kind = "abstract"
    is_field = True
    characteristic = 0
    generators: tuple = ()

    @property
    def key(self):
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, Domain) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"<{self.label}>"

    # arithmetic defaults in terms of primitives
    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def div(self, x, y):
        return self.mul(x, self.inv(y))

    def pow(self, x, e: int):
        result = self.one
        base = x
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def from_int(self, n: int):
        return self.from_fraction(Fraction(n))

    def is_one(self, x) -> bool:
        return x == self.one

    def eq(self, x, y) -> bool:
        return x == y

    def conj(self, x):
        return x

    def generator(self, name):
        raise KeyError(name)

    def parse(self, text: str, offset: int = 0):
        return _ExprParser(text, self, offset).parse()

    def coerce(self, x, source: "Domain"):
        """Map ``x`` from ``source`` into this domain along the natural embedding."""
        if source == self:
            return x
        if isinstance(source, Rationals):
            return self.from_fraction(x)
        raise DomainMismatch(f"no embedding {source.label} -> {self.label}")

    def embeds_from(self, source: "Domain") -> bool:
        return source == self or (isinstance(source, Rationals) and self.characteristic == 0)

    def format_coefficient(self, x) -> tuple[bool, str]:
        """Return (negative, text) with text an atom or parenthesised."""
        text = self.format(x)
        neg = False
        if text.startswith("-") and _ATOM.match(text[1:]):
            neg, text = True, text[1:]
        if not _ATOM.match(text):
            text = f"({text})"
        return neg, text


class Rationals(Domain):
    kind = "rationals"
    label = "Q"
    zero = Fraction(0)
    one = Fraction(1)
    absolute_degree = 1

    @property
    def key(self):
        return ("Q",)

    def descriptor(self):
        return {"kind": "rationals"}

    def from_fraction(self, q):
        return Fraction(q)

    def add(self, x, y):
        return x + y

    def sub(self, x, y):
        return x - y

    def neg(self, x):
        return -x

    def mul(self, x, y):
        return x * y

    def inv(self, x):
        if not x:
            raise DivisionByZero("inverse of 0")
        return 1 / x

    def div(self, x, y):
        if not y:
            raise DivisionByZero("division by 0")
        return x / y

    def is_zero(self, x):
        return not x

    def format(self, x):
        return str(x)


QQ = Rationals()


@dataclass(frozen=True, eq=False)
class NumberField(Domain):
    """``Q[w]/(f)`` for a monic irreducible integer polynomial ``f``.

    ``minpoly`` lists coefficients from the constant term up, so
    ``NumberField([-2, 0, 1])`` is ``Q(sqrt 2)``.  ``conjugation`` optionally
    gives the image of ``w`` under an involution used by ``star``.
    """

    minpoly: tuple
    conjugation: tuple | None = None
    kind = "number_field"
    is_field = True

    def __post_init__(self):
        f = tuple(int(c) for c in self.minpoly)
        if len(f) < 2 or f[-1] != 1:
            raise ValueError("minimal polynomial must be monic of degree >= 1")
        object.__setattr__(self, "minpoly", f)
        if not _is_irreducible_over_q(f):
            raise ValueError(f"{_format_poly(list(f), 'w', str)} is reducible over Q")
        if self.conjugation is not None:
            tau = tuple(Fraction(c) for c in self.conjugation)
            tau = tau + (Fraction(0),) * (self.degree - len(tau))
            if len(tau) != self.degree:
                raise ValueError("conjugation image has too many coefficients")
            object.__setattr__(self, "conjugation", tau)
            fw = self.zero
            for c in reversed(f):
                fw = self.add(self.mul(fw, tau), self.from_int(c))
            if not self.is_zero(fw):
                raise ValueError("conjugation image of w is not a root of the minimal polynomial")
            if self._apply_conj(tau) != self.generator("w"):
                raise ValueError("conjugation is not an involution")

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1

    @property
    def absolute_degree(self) -> int:
        return self.degree

    @property
    def key(self):
        return ("K", self.minpoly, self.conjugation)

    @cached_property
    def label(self):
        return f"Q[w]/({_format_poly(list(self.minpoly), 'w', str)})"

    def descriptor(self):
        d = {"kind": "number_field", "minpoly": [str(c) for c in self.minpoly]}
        if self.conjugation is not None:
            d["conjugation"] = [str(c) for c in _trim(list(self.conjugation))]
        return d

    @cached_property
    def zero(self):
        return (Fraction(0),) * self.degree

    @cached_property
    def one(self):
        return (Fraction(1),) + (Fraction(0),) * (self.degree - 1)

    generators = ("w",)

    def generator(self, name):
        if name != "w":
            raise KeyError(name)
        c = [Fraction(0)] * self.degree
        if self.degree == 1:
            c[0] = Fraction(-self.minpoly[0])
        else:
            c[1] = Fraction(1)
        return tuple(c)

    def from_fraction(self, q):
        return (Fraction(q),) + (Fraction(0),) * (self.degree - 1)

    def _canon(self, coeffs):
        """Reduce a coefficient list modulo f and pad to the fixed length."""
        c = list(coeffs)
        f = self.minpoly
        d = self.degree
        for top in range(len(c) - 1, d - 1, -1):
            lead = c[top]
            if lead:
                for i in range(d):
                    c[top - d + i] -= lead * f[i]
        c = c[:d]
        c += [Fraction(0)] * (d - len(c))
        return tuple(c)

    def add(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def sub(self, x, y):
        return tuple(a - b for a, b in zip(x, y))

    def neg(self, x):
        return tuple(-a for a in x)

    def mul(self, x, y):
        d = self.degree
        out = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(x):
            if a:
                for j, b in enumerate(y):
                    if b:
                        out[i + j] += a * b
        return self._canon(out)

    def inv(self, x):
        if self.is_zero(x):
            raise DivisionByZero("inverse of 0")
        # extended Euclid in Q[w]
        r0, r1 = [Fraction(c) for c in self.minpoly], _trim(list(x))
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = _qpoly_divmod(r0, r1)
            r0, r1 = r1, r
            qs = _qpoly_mul(q, s1)
            s_new = [Fraction(0)] * max(len(s0), len(qs))
            for i, v in enumerate(s0):
                s_new[i] += v
            for i, v in enumerate(qs):
                s_new[i] -= v
            s0, s1 = s1, _trim(s_new)
        c = r1[0]
        return self._canon([v / c for v in s1])

    def is_zero(self, x):
        return not any(x)

    def scale(self, x, q: Fraction):
        return tuple(a * q for a in x)

    def _apply_conj(self, x):
        tau = self.conjugation
        acc = self.zero
        for c in reversed(x):
            acc = self.add(self.mul(acc, tau), self.from_fraction(c))
        return acc

    def conj(self, x):
        if self.conjugation is None:
            return x
        return self._apply_conj(x)

    def format(self, x):
        return _format_poly(list(x), "w", str)

    def rational_value(self, x):
        """The element as a Fraction if it lies in Q, else None."""
        if any(x[1:]):
            return None
        return x[0]

    def multiplication_matrix(self, x):
        """Row i holds the coordinates of x * w^i."""
        rows = []
        wi = self.one
        w = self.generator("w")
        for _ in range(self.degree):
            rows.append(list(self.mul(x, wi)))
            wi = self.mul(wi, w)
        return rows

    def charpoly(self, x) -> list:
        return _charpoly(self.multiplication_matrix(x))

    def minimal_polynomial(self, x) -> list:
        cp = self.charpoly(x)
        g = _qpoly_gcd(cp, _qpoly_deriv(cp))
        return _qpoly_divmod(cp, g)[0] if len(g) > 1 else cp

    def trace(self, x) -> Fraction:
        return sum(self.multiplication_matrix(x)[i][i] for i in range(self.degree))

    @cached_property
    def discriminant(self) -> int:
        import sympy

        w = sympy.Symbol("w")
        return int(sympy.Poly(list(reversed(self.minpoly)), w).discriminant())

    @cached_property
    def is_totally_real(self) -> bool:
        import sympy

        w = sympy.Symbol("w")
        return sympy.Poly(list(reversed(self.minpoly)), w).count_roots() == self.degree

    def prime_ideal(self, p: int, gbar: Sequence[int]) -> "PrimeIdeal":
        P = PrimeIdeal(p, tuple(int(c) % p for c in gbar))
        fp = [c % p for c in self.minpoly]
        if _ppoly_rem(fp, list(P.gbar), p):
            raise ValueError(f"gbar does not divide the minimal polynomial mod {p}")
        return P


def _is_irreducible_over_q(f) -> bool:
    import sympy

    w = sympy.Symbol("w")
    return bool(sympy.Poly(list(reversed(f)), w, domain="QQ").is_irreducible)


def _charpoly(M) -> list:
    """Faddeev-LeVerrier; returns coefficients low -> high, monic."""
    n = len(M)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    Mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        c_prev = coeffs[n - k + 1]
        for i in range(n):
            Mk[i][i] += c_prev
        AM = [[sum(M[i][l] * Mk[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        coeffs[n - k] = -sum(AM[i][i] for i in range(n)) / k
        Mk = AM
    return coeffs


@dataclass(frozen=True, eq=False)
class FiniteField(Domain):
    """``F_p[w]/(gbar)``; with ``gbar`` of degree one the field is F_p itself.

    ``gbar`` lists coefficients mod p from the constant term up and must be
    monic and irreducible.  ``PrimeField(p)`` is the case ``gbar = w``.
    """

    p: int
    gbar: tuple = (0, 1)
    prime_only: bool = False

    is_field = True

    def __post_init__(self):
        from sympy import isprime

        p = int(self.p)
        if not isprime(p):
            raise ValueError(f"{p} is not prime")
        g = tuple(int(c) % p for c in self.gbar)
        if len(g) < 2 or g[-1] != 1:
            raise ValueError("gbar must be monic of degree >= 1")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "gbar", g)
        if len(g) > 2 and not _gf_irreducible(g, p):
            raise ValueError(f"gbar is reducible mod {p}")

    @property
    def kind(self):
        return "prime_field" if self.prime_only else "residue_field"

    @property
    def characteristic(self):
        return self.p

    @property
    def degree(self) -> int:
        return len(self.gbar) - 1

    @property
    def size(self) -> int:
        return self.p ** self.degree

    @property
    def key(self):
        return ("F", self.p, None if self.prime_only else self.gbar)

    @cached_property
    def label(self):
        if self.prime_only:
            return f"F_{self.p}"
        return f"F_{self.p}[w]/({_format_poly(list(self.gbar), 'w', str)})"

    def descriptor(self):
        if self.prime_only:
            return {"kind": "prime_field", "p": str(self.p)}
        return {"kind": "residue_field", "p": str(self.p), "gbar": [str(c) for c in self.gbar]}

    @cached_property
    def zero(self):
        return 0 if self.degree == 1 else (0,) * self.degree

    @cached_property
    def one(self):
        return 1 if self.degree == 1 else (1,) + (0,) * (self.degree - 1)

    @property
    def generators(self):
        return () if self.prime_only else ("w",)

    def generator(self, name):
        if name != "w" or self.prime_only:
            raise KeyError(name)
        if self.degree == 1:
            return (-self.gbar[0]) % self.p
        return (0, 1) + (0,) * (self.degree - 2)

    def from_fraction(self, q):
        q = Fraction(q)
        p = self.p
        if q.denominator % p == 0:
            raise DivisionByZero(f"denominator of {q} vanishes mod {p}")
        v = q.numerator * pow(q.denominator, -1, p) % p
        return v if self.degree == 1 else (v,) + (0,) * (self.degree - 1)

    def from_int(self, n):
        v = int(n) % self.p
        return v if self.degree == 1 else (v,) + (0,) * (self.degree - 1)

    def from_poly(self, coeffs):
        """Element represented by an integer polynomial in w (reduced mod gbar)."""
        p = self.p
        if self.degree == 1:
            r = self.generator_value
            acc = 0
            for c in reversed(coeffs):
                acc = (acc * r + c) % p
            return acc
        rem = _ppoly_rem([int(c) % p for c in coeffs], list(self.gbar), p)
        return tuple(rem) + (0,) * (self.degree - len(rem))

    @cached_property
    def generator_value(self):
        return (-self.gbar[0]) % self.p

    def add(self, x, y):
        p = self.p
        if self.degree == 1:
            return (x + y) % p
        return tuple((a + b) % p for a, b in zip(x, y))

    def sub(self, x, y):
        p = self.p
        if self.degree == 1:
            return (x - y) % p
        return tuple((a - b) % p for a, b in zip(x, y))

    def neg(self, x):
        p = self.p
        if self.degree == 1:
            return (-x) % p
        return tuple((-a) % p for a in x)

    def mul(self, x, y):
        p = self.p
        if self.degree == 1:
            return x * y % p
        return self.from_poly(_ppoly_mul(list(x), list(y), p))

    def inv(self, x):
        if self.is_zero(x):
            raise DivisionByZero("inverse of 0")
        p = self.p
        if self.degree == 1:
            return pow(x, -1, p)
        return self.pow(x, self.size - 2)

    def is_zero(self, x):
        return x == 0 if self.degree == 1 else not any(x)

    def format(self, x):
        if self.degree == 1:
            return str(x)
        return _format_poly(list(x), "w", str)


def PrimeField(p: int) -> FiniteField:
    return FiniteField(p, (0, 1), prime_only=True)


def _gf_irreducible(g, p) -> bool:
    from sympy.polys.domains import ZZ
    from sympy.polys.galoistools import gf_irreducible_p

    return bool(gf_irreducible_p([ZZ(c) for c in reversed(g)], p, ZZ))


def _gf_factor(f, p):
    """Distinct monic irreducible factors of ``f`` mod p, coefficient lists low -> high."""
    from sympy.polys.domains import ZZ
    from sympy.polys.galoistools import gf_factor

    _, factors = gf_factor([ZZ(c % p) for c in reversed(f)], p, ZZ)
    return [tuple(int(c) % p for c in reversed(g)) for g, _ in factors]


class FunctionField(Domain):
    """Rational functions ``Q(t_1, ..., t_l)`` backed by sympy's sparse fraction field."""

    kind = "function_field"
    is_field = True

    def __init__(self, variables: Iterable[str] = ("t",)):
        from sympy import QQ as SQQ
        from sympy.polys.fields import field

        self.variables = tuple(variables)
        if not self.variables:
            raise ValueError("function field needs at least one variable")
        for v in self.variables:
            if not re.fullmatch(r"[A-Za-z_]\w*", v):
                raise ValueError(f"bad variable name {v!r}")
        self._field, *self._gens = field(",".join(self.variables), SQQ)
        self._ring = self._field.ring
        self.zero = self._field.zero
        self.one = self._field.one

    @property
    def key(self):
        return ("QT", self.variables)

    @property
    def label(self):
        return f"Q({','.join(self.variables)})"

    def descriptor(self):
        return {"kind": "function_field", "variables": list(self.variables)}

    @property
    def generators(self):
        return self.variables

    @property
    def ring(self):
        return self._ring

    def generator(self, name):
        try:
            return self._gens[self.variables.index(name)]
        except ValueError:
            raise KeyError(name) from None

    def from_fraction(self, q):
        from sympy import QQ as SQQ

        q = Fraction(q)
        return self._field.ground_new(SQQ(q.numerator, q.denominator))

    def add(self, x, y):
        return x + y

    def sub(self, x, y):
        return x - y

    def neg(self, x):
        return -x

    def mul(self, x, y):
        return x * y

    def inv(self, x):
        if not x:
            raise DivisionByZero("inverse of 0")
        return 1 / x

    def div(self, x, y):
        if not y:
            raise DivisionByZero("division by 0")
        return x / y

    def is_zero(self, x):
        return not x

    def format(self, x):
        return str(x).replace("**", "^")

    def parse(self, text, offset=0):
        return _ExprParser(text, self, offset).parse()

    def evaluate(self, x, point: Sequence) -> Fraction:
        """Evaluate the rational function at a rational point."""
        from sympy import QQ as SQQ

        vals = [SQQ(Fraction(v).numerator, Fraction(v).denominator) for v in point]
        if len(vals) != len(self.variables):
            raise ValueError("point has the wrong number of coordinates")
        subs = list(zip(self._ring.gens, vals))
        den = x.denom.evaluate(subs)
        if not den:
            raise DenominatorVanishes(f"denominator of {self.format(x)} vanishes at {tuple(point)}")
        num = x.numer.evaluate(subs)
        q = num / den
        return Fraction(int(q.numerator), int(q.denominator))


def domain_from_descriptor(desc: dict) -> Domain:
    kind = desc.get("kind")
    if kind == "rationals":
        return QQ
    if kind == "number_field":
        conj = desc.get("conjugation")
        return NumberField(tuple(int(c) for c in desc["minpoly"]),
                           tuple(Fraction(c) for c in conj) if conj is not None else None)
    if kind == "prime_field":
        return PrimeField(int(desc["p"]))
    if kind == "residue_field":
        return FiniteField(int(desc["p"]), tuple(int(c) for c in desc["gbar"]))
    if kind == "function_field":
        return FunctionField(tuple(desc.get("variables", ["t"])))
    raise ValueError(f"unknown field kind {kind!r}")


# ---------------------------------------------------------------------------
# prime ideals and reduction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PrimeIdeal:
    """A maximal ideal (p, gbar) of an order; ``gbar`` is None over Q."""

    p: int
    gbar: tuple | None = None

    @property
    def degree(self) -> int:
        return 1 if self.gbar is None else len(self.gbar) - 1

    @property
    def size(self) -> int:
        return self.p ** self.degree

    def residue_field(self) -> FiniteField:
        if self.gbar is None:
            return PrimeField(self.p)
        return FiniteField(self.p, self.gbar)

    def to_dict(self):
        return {"p": str(self.p), "gbar": None if self.gbar is None else [str(c) for c in self.gbar]}

    @classmethod
    def from_dict(cls, d):
        g = d.get("gbar")
        return cls(int(d["p"]), None if g is None else tuple(int(c) for c in g))


def reduce_mod_prime(x, domain: Domain, P: PrimeIdeal):
    """Image of ``x`` in the residue field of ``P``.

    Raises :class:`PrimeDividesDenominator` when ``p`` divides the common
    denominator of ``x``'s coefficients; such primes belong to the excluded set.
    """
    p = P.p
    F = P.residue_field()
    if isinstance(domain, Rationals):
        if x.denominator % p == 0:
            raise PrimeDividesDenominator(f"{p} divides the denominator of {x}")
        return F.from_int(x.numerator * pow(x.denominator, -1, p))
    if isinstance(domain, NumberField):
        if P.gbar is None:
            raise DomainMismatch("number-field reduction needs a residue polynomial gbar")
        den = math.lcm(*(c.denominator for c in x))
        if den % p == 0:
            raise PrimeDividesDenominator(f"{p} divides the denominator of {domain.format(x)}")
        ints = [c.numerator * (den // c.denominator) for c in x]
        return F.mul(F.from_poly(ints), F.from_int(pow(den, -1, p)))
    if isinstance(domain, FiniteField) and domain == F:
        return x
    raise DomainMismatch(f"cannot reduce elements of {domain.label} modulo a prime")


def enumerate_primes(domain: Domain, count: int, min_p: int = 2, max_degree: int = 1,
                     exclude: Iterable[int] = (), search_cap: int = 10**7) -> list[PrimeIdeal]:
    """``count`` prime ideals with strictly increasing residue-field sizes.

    Over a number field, primes dividing the discriminant of the minimal
    polynomial or any integer in ``exclude`` are skipped, and for each
    remaining p the factor of f mod p of least degree (then least
    coefficients) is used, provided its degree is at most ``max_degree``.
    """
    from sympy import nextprime

    excluded = [abs(int(e)) for e in exclude if int(e) not in (0, 1, -1)]
    out: list[PrimeIdeal] = []
    last_size = 0
    p = nextprime(max(int(min_p), 2) - 1)
    if isinstance(domain, NumberField):
        excluded.append(abs(domain.discriminant))
    elif not isinstance(domain, Rationals):
        raise DomainMismatch(f"enumerate_primes needs Q or a number field, got {domain.label}")
    while len(out) < count:
        if p > search_cap:
            raise PrimeSearchExhausted(f"found only {len(out)} of {count} primes below {search_cap}")
        if any(e % p == 0 for e in excluded):
            p = nextprime(p)
            continue
        if isinstance(domain, Rationals):
            P = PrimeIdeal(p)
        else:
            factors = [g for g in _gf_factor(domain.minpoly, p) if len(g) - 1 <= max_degree]
            P = None
            if factors:
                g = min(factors, key=lambda g: (len(g), tuple(reversed(g))))
                if len(g) == 2:
                    # prefer the smallest root r, i.e. gbar = w - r
                    roots = sorted((-h[0]) % p for h in factors if len(h) == 2)
                    g = ((-roots[0]) % p, 1)
                P = PrimeIdeal(p, g)
        if P is not None and P.size > last_size:
            out.append(P)
            last_size = P.size
        p = nextprime(p)
    return out


# ---------------------------------------------------------------------------
# house
# ---------------------------------------------------------------------------

def _certified_max_modulus(poly: list) -> tuple[float, float]:
    """Max modulus of the roots of a squarefree rational polynomial (low -> high).

    Roots are refined with mpmath's Durand-Kerner iteration and certified by
    Weierstrass inclusion discs: for monic p of degree n the discs
    D(z_i, n |p(z_i) / prod_{j != i}(z_i - z_j)|) cover all roots, and when they
    are pairwise disjoint each contains exactly one.
    """
    import mpmath

    lead = poly[-1]
    monic = [c / lead for c in poly]
    n = len(monic) - 1
    if n == 1:
        v = abs(monic[0])
        return float(v), 0.0
    for dps in (40, 80, 160, 320):
        with mpmath.workdps(dps):
            coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(monic)]
            try:
                roots = mpmath.polyroots(coeffs, maxsteps=400, extraprec=dps)
            except mpmath.libmp.libhyper.NoConvergence:
                continue
            eps = mpmath.mpf(2) ** (-mpmath.mp.prec + 8)
            radii = []
            for i, z in enumerate(roots):
                val = mpmath.polyval(coeffs, z)
                scale = sum(abs(c) * abs(z) ** k for k, c in enumerate(reversed(coeffs)))
                denom = mpmath.mpf(1)
                for j, u in enumerate(roots):
                    if j != i:
                        denom *= z - u
                if denom == 0:
                    break
                radii.append(n * (abs(val) + eps * scale) / abs(denom))
            else:
                disjoint = all(abs(roots[i] - roots[j]) > radii[i] + radii[j]
                               for i in range(n) for j in range(i + 1, n))
                err = max(radii)
                if disjoint and err <= HOUSE_TOLERANCE * 1e-3:
                    value = max(abs(z) for z in roots)
                    return float(value), float(err) + 4e-16 * float(value)
    raise RootIsolationFailed(f"could not certify roots of degree-{n} polynomial")


def house_interval(x, domain: Domain) -> tuple[float, float]:
    """``(value, error)`` with the house certified to lie within ``error`` of ``value``."""
    if isinstance(domain, Rationals):
        return float(abs(x)), 0.0
    if isinstance(domain, NumberField):
        if domain.is_zero(x):
            return 0.0, 0.0
        q = domain.rational_value(x)
        if q is not None:
            return float(abs(q)), 0.0
        return _certified_max_modulus(domain.minimal_polynomial(x))
    raise DomainMismatch(f"house is defined over Q or a number field, not {domain.label}")


def house(x, domain: Domain) -> float:
    """Largest modulus among the conjugates of ``x``."""
    return house_interval(x, domain)[0]


def element_house(b, upper: bool = False) -> float:
    """Sum of the houses of the coefficients of a group-algebra element."""
    total = 0.0
    err = 0.0
    for _, a in b.items():
        v, e = house_interval(a, b.domain)
        total += v
        err += e
    return total + err if upper else total


def matrix_house(B, upper: bool = False) -> float:
    """max over columns j of sum over rows i of the element house of ``B[i, j]``.

    With ``upper=True`` the certified root-isolation error is added so the
    value is a guaranteed upper bound.
    """
    best = 0.0
    for j in range(B.ncols):
        col = sum(element_house(B[i, j], upper) for i in range(B.nrows))
        best = max(best, col)
    return best


def exact_matrix_house(B) -> Fraction:
    """Exact ``matrix_house`` for rational matrices."""
    if not isinstance(B.domain, Rationals):
        raise DomainMismatch("exact house only over Q")
    best = Fraction(0)
    for j in range(B.ncols):
        col = sum((abs(a) for i in range(B.nrows) for _, a in B[i, j].items()), Fraction(0))
        best = max(best, col)
    return best
