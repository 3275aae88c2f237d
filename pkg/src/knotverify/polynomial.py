"""Exact Laurent polynomials in one variable with integer coefficients.

Values are immutable and hashable. The variable name is contextual: the
bracket engine uses ``A`` and the Jones normalisation ``t``; only the text
format carries the name.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping

__all__ = [
    "LaurentPolynomial",
    "poly_add",
    "poly_mul",
    "poly_eval_int",
    "is_unit_monomial",
    "parse_poly",
    "ZERO",
    "ONE",
    "A",
    "DELTA",
]


class LaurentPolynomial:
    """Sparse map exponent -> nonzero coefficient."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[int, int] = {}
        for e, c in items:
            if not isinstance(e, int) or not isinstance(c, int):
                raise TypeError("exponents and coefficients must be int")
            c = clean.get(e, 0) + c
            if c:
                clean[e] = c
            else:
                clean.pop(e, None)
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict[int, int]) -> "LaurentPolynomial":
        # caller guarantees normal form
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def monomial(cls, coeff: int, exp: int) -> "LaurentPolynomial":
        return cls._raw({exp: coeff} if coeff else {})

    @property
    def terms(self) -> dict[int, int]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = LaurentPolynomial.monomial(other, 0)
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def min_exp(self) -> int:
        return min(self._terms)

    def max_exp(self) -> int:
        return max(self._terms)

    def coeff(self, exp: int) -> int:
        return self._terms.get(exp, 0)

    def __neg__(self) -> "LaurentPolynomial":
        return LaurentPolynomial._raw({e: -c for e, c in self._terms.items()})

    def __add__(self, other) -> "LaurentPolynomial":
        if isinstance(other, int):
            other = LaurentPolynomial.monomial(other, 0)
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        if len(self._terms) < len(other._terms):
            self, other = other, self
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                del out[e]
        return LaurentPolynomial._raw(out)

    __radd__ = __add__

    def __sub__(self, other) -> "LaurentPolynomial":
        if isinstance(other, int):
            other = LaurentPolynomial.monomial(other, 0)
        return self + (-other)

    def __rsub__(self, other) -> "LaurentPolynomial":
        return (-self) + other

    def __mul__(self, other) -> "LaurentPolynomial":
        if isinstance(other, int):
            if other == 0:
                return ZERO
            return LaurentPolynomial._raw({e: c * other for e, c in self._terms.items()})
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        a, b = self._terms, other._terms
        if len(b) == 1:
            ((eb, cb),) = b.items()
            return LaurentPolynomial._raw({e + eb: c * cb for e, c in a.items()})
        if len(a) == 1:
            ((ea, ca),) = a.items()
            return LaurentPolynomial._raw({e + ea: c * ca for e, c in b.items()})
        out: dict[int, int] = {}
        get = out.get
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = ea + eb
                out[e] = get(e, 0) + ca * cb
        return LaurentPolynomial._raw({e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentPolynomial":
        if k < 0:
            if len(self._terms) == 1:
                ((e, c),) = self._terms.items()
                if c in (1, -1):
                    return LaurentPolynomial._raw({-e * -k: c ** -k})
            raise ValueError("negative power of a non-unit")
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shift(self, k: int) -> "LaurentPolynomial":
        """Multiply by the monomial x**k."""
        if not k:
            return self
        return LaurentPolynomial._raw({e + k: c for e, c in self._terms.items()})

    def substitute_power(self, k: int) -> "LaurentPolynomial":
        """Return p(x**k); k may be negative."""
        return LaurentPolynomial._raw({e * k: c for e, c in self._terms.items()})

    def exact_div(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        """Divide exactly by ``other``; raise ValueError on a nonzero remainder."""
        if not other:
            raise ZeroDivisionError("division by the zero polynomial")
        rem = dict(self._terms)
        dlo, dhi = other.min_exp(), other.max_exp()
        lead = other._terms[dhi]
        quot: dict[int, int] = {}
        while rem:
            hi = max(rem)
            if hi - dhi < min(rem) - dlo:
                raise ValueError("polynomial division is not exact")
            q, r = divmod(rem[hi], lead)
            if r:
                raise ValueError("polynomial division is not exact")
            shift = hi - dhi
            quot[shift] = q
            for e, c in other._terms.items():
                v = rem.get(e + shift, 0) - q * c
                if v:
                    rem[e + shift] = v
                else:
                    rem.pop(e + shift, None)
        return LaurentPolynomial._raw(quot)

    def evaluate(self, x: int) -> int | Fraction:
        return poly_eval_int(self, x)

    def format(self, var: str = "A") -> str:
        if not self._terms:
            return "0"
        parts = []
        for i, (e, c) in enumerate(self.items()):
            body = f"{abs(c)}*{var}^{e}"
            if i == 0:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append(("+ " if c > 0 else "- ") + body)
        return " ".join(parts)

    def __str__(self) -> str:
        return self.format("A")

    def __repr__(self) -> str:
        return f"LaurentPolynomial({self.format('A')!r})"


ZERO = LaurentPolynomial._raw({})
ONE = LaurentPolynomial._raw({0: 1})
A = LaurentPolynomial._raw({1: 1})
#: loop value of the bracket, -A^2 - A^-2
DELTA = LaurentPolynomial._raw({-2: -1, 2: -1})


def poly_add(p: LaurentPolynomial, q: LaurentPolynomial) -> LaurentPolynomial:
    return p + q


def poly_mul(p: LaurentPolynomial, q: LaurentPolynomial) -> LaurentPolynomial:
    return p * q


def poly_eval_int(p: LaurentPolynomial, x: int) -> int | Fraction:
    """Exact value of ``p`` at the nonzero integer ``x``.

    Returns an int when the value is integral (always the case for x = +-1 or
    when no exponent is negative), otherwise a Fraction.
    """
    if x == 0:
        raise ValueError("cannot evaluate a Laurent polynomial at 0")
    if x in (1, -1):
        if x == 1:
            return sum(p._terms.values())
        return sum(c if e % 2 == 0 else -c for e, c in p._terms.items())
    total = Fraction(0)
    for e, c in p._terms.items():
        total += c * Fraction(x) ** e
    return int(total) if total.denominator == 1 else total


def is_unit_monomial(p: LaurentPolynomial) -> bool:
    if len(p._terms) != 1:
        return False
    (c,) = p._terms.values()
    return c in (1, -1)


_TERM = re.compile(
    r"""\s*([+-])?\s*           # sign
        (\d+)?\s*(\*)?\s*       # coefficient
        ([A-Za-z]\w*)?          # variable
        (?:\s*\^\s*\(?\s*([+-]?\d+)\s*\)?)?  # exponent
    """,
    re.X,
)


def parse_poly(text: str, var: str | None = None) -> LaurentPolynomial:
    """Parse ``c*A^e`` style text; accepts the output of :meth:`format`.

    Bare forms such as ``A^-7 - A^-3 - A^5``, ``-t^4+t^3+t`` and ``1`` are
    accepted too. If ``var`` is given, any other variable name is rejected.
    """
    s = text.strip()
    if not s:
        raise ValueError("empty polynomial text")
    terms: dict[int, int] = {}
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial at {s[pos:]!r}")
        sign, coeff, star, name, exp = m.groups()
        if sign is None and not first:
            raise ValueError(f"missing operator before {s[pos:]!r}")
        if coeff is None and name is None:
            raise ValueError(f"empty term in {text!r}")
        if star and (coeff is None or name is None):
            raise ValueError(f"dangling '*' in {text!r}")
        if name is None and exp is not None:
            raise ValueError(f"exponent without variable in {text!r}")
        if name is not None:
            if var is not None and name != var:
                raise ValueError(f"unexpected variable {name!r}, expected {var!r}")
            var = name
        c = int(coeff) if coeff is not None else 1
        if sign == "-":
            c = -c
        e = 0 if name is None else (int(exp) if exp is not None else 1)
        terms[e] = terms.get(e, 0) + c
        pos = m.end()
        first = False
    return LaurentPolynomial(terms)
