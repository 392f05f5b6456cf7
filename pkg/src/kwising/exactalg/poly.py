"""Sparse multivariate polynomials with Gaussian-rational coefficients.

Monomials are packed into Python ints: variable ``k`` (in interning order)
owns the bit field ``[k*BITS, (k+1)*BITS)``, so multiplying monomials is
integer addition.  The top bit of every field is a guard used to detect
borrows when testing divisibility.  Coefficients live in two dicts (real and
imaginary parts) whose values are ``int`` or ``Fraction``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

from .gaussrat import GaussRat

BITS = 12
_FIELD = (1 << BITS) - 1
_MAX_EXP = (1 << (BITS - 1)) - 1

_VAR_INDEX: Dict[str, int] = {}
_VAR_NAMES: List[str] = []
_GUARD = 0
_DEG_CACHE: Dict[int, int] = {}


def var_index(name: str) -> int:
    global _GUARD
    idx = _VAR_INDEX.get(name)
    if idx is None:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", name):
            raise ValueError(f"bad variable name {name!r}")
        idx = len(_VAR_NAMES)
        _VAR_INDEX[name] = idx
        _VAR_NAMES.append(name)
        _GUARD |= 1 << (idx * BITS + BITS - 1)
    return idx


def _natural_key(name: str):
    return tuple(int(t) if t.isdigit() else t for t in re.split(r"(\d+)", name))


def unpack(mono: int) -> Dict[str, int]:
    out = {}
    k = 0
    while mono:
        e = mono & _FIELD
        if e:
            out[_VAR_NAMES[k]] = e
        mono >>= BITS
        k += 1
    return out


def pack(exps: Mapping[str, int]) -> int:
    m = 0
    for name, e in exps.items():
        if e < 0 or e > _MAX_EXP:
            raise ValueError(f"exponent {e} out of range")
        if e:
            m += e << (var_index(name) * BITS)
    return m


def mono_degree(mono: int) -> int:
    d = _DEG_CACHE.get(mono)
    if d is None:
        d, m = 0, mono
        while m:
            d += m & _FIELD
            m >>= BITS
        if len(_DEG_CACHE) < 1_000_000:
            _DEG_CACHE[mono] = d
    return d


def mono_divides(small: int, big: int) -> bool:
    return ((big | _GUARD) - small) & _GUARD == _GUARD


def _mul_dicts(a: dict, b: dict, acc: dict, sign: int, cutoff: Optional[int]) -> None:
    if cutoff is None:
        for ma, ca in a.items():
            for mb, cb in b.items():
                k = ma + mb
                v = acc.get(k, 0) + sign * ca * cb
                if v:
                    acc[k] = v
                else:
                    acc.pop(k, None)
        return
    deg = mono_degree
    bd = [(mb, cb, deg(mb)) for mb, cb in b.items()]
    for ma, ca in a.items():
        room = cutoff - deg(ma)
        if room < 0:
            continue
        for mb, cb, db in bd:
            if db > room:
                continue
            k = ma + mb
            v = acc.get(k, 0) + sign * ca * cb
            if v:
                acc[k] = v
            else:
                acc.pop(k, None)


def _norm(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


class GPoly:
    """Polynomial in named variables over Q(i).  Treat as immutable."""

    __slots__ = ("re", "im")

    def __init__(self, re: Optional[dict] = None, im: Optional[dict] = None):
        self.re = {k: _norm(v) for k, v in (re or {}).items() if v}
        self.im = {k: _norm(v) for k, v in (im or {}).items() if v}

    @classmethod
    def _raw(cls, re: dict, im: dict) -> "GPoly":
        p = cls.__new__(cls)
        p.re = re
        p.im = im
        return p

    # constructors ---------------------------------------------------------
    @classmethod
    def const(cls, c) -> "GPoly":
        c = GaussRat.coerce(c)
        return cls({0: c.re}, {0: c.im})

    @classmethod
    def var(cls, name: str) -> "GPoly":
        return cls._raw({1 << (var_index(name) * BITS): 1}, {})

    @classmethod
    def monomial(cls, exps: Mapping[str, int], coeff=1) -> "GPoly":
        c = GaussRat.coerce(coeff)
        m = pack(exps)
        return cls({m: c.re}, {m: c.im})

    @classmethod
    def from_terms(cls, terms: Iterable[Tuple[Mapping[str, int], object]]) -> "GPoly":
        out = cls.zero()
        for exps, c in terms:
            out = out + cls.monomial(exps, c)
        return out

    @classmethod
    def zero(cls) -> "GPoly":
        return cls._raw({}, {})

    @classmethod
    def one(cls) -> "GPoly":
        return cls._raw({0: 1}, {})

    @staticmethod
    def lift(x) -> "GPoly":
        if isinstance(x, GPoly):
            return x
        return GPoly.const(x)

    # queries ---------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.re and not self.im

    def __bool__(self):
        return not self.is_zero()

    def monomials(self) -> set:
        return set(self.re) | set(self.im)

    def coeff(self, mono: int) -> GaussRat:
        return GaussRat(self.re.get(mono, 0), self.im.get(mono, 0))

    def coefficient(self, exps: Mapping[str, int]) -> GaussRat:
        return self.coeff(pack(exps))

    def constant_term(self) -> GaussRat:
        return self.coeff(0)

    def nterms(self) -> int:
        return len(self.monomials())

    def total_degree(self) -> int:
        ms = self.monomials()
        return max((mono_degree(m) for m in ms), default=-1)

    def min_degree(self) -> int:
        ms = self.monomials()
        return min((mono_degree(m) for m in ms), default=-1)

    def variables(self) -> List[str]:
        names = set()
        for m in self.monomials():
            names.update(unpack(m))
        return sorted(names, key=_natural_key)

    def is_multilinear(self) -> bool:
        return all(e <= 1 for m in self.monomials() for e in unpack(m).values())

    def is_real(self) -> bool:
        return not self.im

    def terms(self) -> Iterator[Tuple[Dict[str, int], GaussRat]]:
        """Terms in graded lexicographic order, variables in natural order."""
        for m in sorted(self.monomials(), key=_order_key):
            yield unpack(m), self.coeff(m)

    # arithmetic --------------------------------------------------------------
    def __add__(self, other):
        o = GPoly.lift(other)
        re = dict(self.re)
        for k, v in o.re.items():
            s = re.get(k, 0) + v
            if s:
                re[k] = s
            else:
                re.pop(k, None)
        im = dict(self.im)
        for k, v in o.im.items():
            s = im.get(k, 0) + v
            if s:
                im[k] = s
            else:
                im.pop(k, None)
        return GPoly._raw(re, im)

    __radd__ = __add__

    def __neg__(self):
        return GPoly._raw({k: -v for k, v in self.re.items()}, {k: -v for k, v in self.im.items()})

    def __sub__(self, other):
        return self + (-GPoly.lift(other))

    def __rsub__(self, other):
        return GPoly.lift(other) - self

    def mul(self, other, cutoff: Optional[int] = None) -> "GPoly":
        """Product, optionally dropping monomials of total degree > cutoff."""
        o = GPoly.lift(other)
        re: dict = {}
        im: dict = {}
        if self.re and o.re:
            _mul_dicts(self.re, o.re, re, 1, cutoff)
        if self.im and o.im:
            _mul_dicts(self.im, o.im, re, -1, cutoff)
        if self.re and o.im:
            _mul_dicts(self.re, o.im, im, 1, cutoff)
        if self.im and o.re:
            _mul_dicts(self.im, o.re, im, 1, cutoff)
        return GPoly._raw(re, im)

    def square(self) -> "GPoly":
        """self * self, using symmetry for real polynomials."""
        if self.im:
            return self * self
        items = list(self.re.items())
        acc: Dict[int, object] = {}
        for k, (ma, ca) in enumerate(items):
            t = 2 * ca
            for mb, cb in items[k + 1:]:
                m = ma + mb
                v = acc.get(m, 0) + t * cb
                if v:
                    acc[m] = v
                else:
                    acc.pop(m, None)
            m = ma + ma
            v = acc.get(m, 0) + ca * ca
            if v:
                acc[m] = v
            else:
                acc.pop(m, None)
        return GPoly._raw(acc, {})

    def __mul__(self, other):
        if isinstance(other, GPoly):
            return self.mul(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c) -> "GPoly":
        c = GaussRat.coerce(c)
        a, b = _norm(c.re), _norm(c.im)
        re: dict = {}
        im: dict = {}
        for k, v in self.re.items():
            if a:
                re[k] = a * v
            if b:
                im[k] = b * v
        for k, v in self.im.items():
            if b:
                s = re.get(k, 0) - b * v
                if s:
                    re[k] = s
                else:
                    re.pop(k, None)
            if a:
                s = im.get(k, 0) + a * v
                if s:
                    im[k] = s
                else:
                    im.pop(k, None)
        return GPoly(re, im)

    def __pow__(self, k: int) -> "GPoly":
        out = GPoly.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def truncate(self, cutoff: int) -> "GPoly":
        keep = lambda d: {m: v for m, v in d.items() if mono_degree(m) <= cutoff}
        return GPoly._raw(keep(self.re), keep(self.im))

    def homogeneous_part(self, degree: int) -> "GPoly":
        keep = lambda d: {m: v for m, v in d.items() if mono_degree(m) == degree}
        return GPoly._raw(keep(self.re), keep(self.im))

    def exact_div(self, other: "GPoly") -> "GPoly":
        """Quotient of an exact division; raises ``ArithmeticError`` otherwise."""
        o = GPoly.lift(other)
        if o.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if len(o.monomials()) == 1:
            (m,) = o.monomials()
            inv = o.coeff(m).inverse()
            return _shift_down(self, m).scale(inv)
        lead = max(o.monomials(), key=_lead_key)
        inv = o.coeff(lead).inverse()
        rem = self
        quot_re: dict = {}
        quot_im: dict = {}
        while not rem.is_zero():
            m = max(rem.monomials(), key=_lead_key)
            if not mono_divides(lead, m):
                raise ArithmeticError("polynomial division is not exact")
            c = rem.coeff(m) * inv
            shift = m - lead
            if c.re:
                quot_re[shift] = c.re
            if c.im:
                quot_im[shift] = c.im
            rem = rem - _shift_up(o, shift).scale(c)
        return GPoly(quot_re, quot_im)

    # substitution ----------------------------------------------------------
    def substitute(self, values: Mapping[str, object]) -> "GPoly":
        """Replace variables by scalars or polynomials; others stay symbolic."""
        vals = {var_index(k): GPoly.lift(v) for k, v in values.items()}
        if all(v.nterms() == 1 for v in vals.values()):
            return self._substitute_terms(vals)
        cache: Dict[Tuple[int, int], GPoly] = {}
        out = GPoly.zero()
        for m in self.monomials():
            term = GPoly.const(self.coeff(m))
            rest = 0
            k = 0
            mm = m
            while mm:
                e = mm & _FIELD
                if e:
                    if k in vals:
                        key = (k, e)
                        if key not in cache:
                            cache[key] = vals[k] ** e
                        term = term * cache[key]
                    else:
                        rest += e << (k * BITS)
                mm >>= BITS
                k += 1
            if rest:
                term = _shift_up(term, rest)
            out = out + term
        return out

    def _substitute_terms(self, vals: Dict[int, "GPoly"]) -> "GPoly":
        # every value is c * monomial: map terms one to one, raw re/im arithmetic
        single = {}
        for k, v in vals.items():
            (m,) = v.monomials()
            single[k] = (m, v.re.get(m, 0), v.im.get(m, 0))
        powers: Dict[Tuple[int, int], Tuple[object, object]] = {}
        re: Dict[int, object] = {}
        im: Dict[int, object] = {}
        for m in self.monomials():
            cr, ci = self.re.get(m, 0), self.im.get(m, 0)
            out_m = 0
            k = 0
            mm = m
            while mm:
                e = mm & _FIELD
                if e:
                    if k in single:
                        vm, vr, vi = single[k]
                        key = (k, e)
                        pw = powers.get(key)
                        if pw is None:
                            pr, pi = 1, 0
                            for _ in range(e):
                                pr, pi = pr * vr - pi * vi, pr * vi + pi * vr
                            pw = powers[key] = (pr, pi)
                        pr, pi = pw
                        if pi == 0:
                            if pr != 1:
                                cr, ci = cr * pr, ci * pr
                        else:
                            cr, ci = cr * pr - ci * pi, cr * pi + ci * pr
                        out_m += vm * e
                    else:
                        out_m += e << (k * BITS)
                mm >>= BITS
                k += 1
            if cr:
                re[out_m] = re.get(out_m, 0) + cr
            if ci:
                im[out_m] = im.get(out_m, 0) + ci
        return GPoly(re, im)

    def evaluate(self, point: Mapping[str, object]) -> GaussRat:
        vals = {var_index(k): GaussRat.coerce(v) for k, v in point.items()}
        total = GaussRat(0)
        for m in self.monomials():
            term = self.coeff(m)
            k = 0
            mm = m
            while mm:
                e = mm & _FIELD
                if e:
                    if k not in vals:
                        raise KeyError(f"no value for variable {_VAR_NAMES[k]}")
                    term = term * vals[k] ** e
                mm >>= BITS
                k += 1
            total = total + term
        return total

    def evaluate_complex(self, point: Mapping[str, complex]) -> complex:
        vals = {var_index(k): complex(v) for k, v in point.items()}
        total = 0j
        for m in self.monomials():
            c = self.coeff(m)
            term = complex(float(c.re), float(c.im))
            k = 0
            mm = m
            while mm:
                e = mm & _FIELD
                if e:
                    term *= vals[k] ** e
                mm >>= BITS
                k += 1
            total += term
        return total

    # comparison / display ------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, GPoly):
            try:
                other = GPoly.lift(other)
            except TypeError:
                return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((frozenset(self.re.items()), frozenset(self.im.items())))

    def __repr__(self):
        return f"GPoly({self})"

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for exps, c in self.terms():
            mono = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in sorted(exps.items(), key=lambda t: _natural_key(t[0]))
            )
            parts.append(_term_str(c, mono))
        s = " + ".join(parts)
        return s.replace("+ -", "- ")

    def term_list(self) -> List[Tuple[Dict[str, int], str]]:
        """JSON-friendly ``[(exponents, coefficient string), ...]``."""
        return [(exps, str(c)) for exps, c in self.terms()]


def _term_str(c: GaussRat, mono: str) -> str:
    if not mono:
        return str(c)
    if c == 1:
        return mono
    if c == -1:
        return "-" + mono
    if c.im == 0:
        return f"{c.re}*{mono}"
    if c.re == 0:
        return f"{c}*{mono}"
    return f"({c})*{mono}"


def _order_key(m: int):
    exps = unpack(m)
    names = sorted(_VAR_NAMES, key=_natural_key)
    return (mono_degree(m), tuple(-exps.get(n, 0) for n in names))


def _lead_key(m: int):
    return (mono_degree(m), m)


def _shift_up(p: GPoly, m: int) -> GPoly:
    return GPoly._raw({k + m: v for k, v in p.re.items()}, {k + m: v for k, v in p.im.items()})


def _shift_down(p: GPoly, m: int) -> GPoly:
    for k in p.monomials():
        if not mono_divides(m, k):
            raise ArithmeticError("polynomial division is not exact")
    return GPoly._raw({k - m: v for k, v in p.re.items()}, {k - m: v for k, v in p.im.items()})


def variables(*names: str) -> List[GPoly]:
    return [GPoly.var(n) for n in names]


def parse_poly(text: str) -> GPoly:
    """Parse the output format of ``str(GPoly)`` (and simple hand-written forms)."""
    s = text.replace(" ", "").replace("**", "^")
    if not s:
        raise ValueError("empty polynomial")
    tokens = re.findall(r"[+-]?[^+-]+", _protect(s))
    out = GPoly.zero()
    for tok in tokens:
        tok = _unprotect(tok)
        sign = -1 if tok.startswith("-") else 1
        tok = tok.lstrip("+-")
        coeff = GaussRat(sign)
        exps: Dict[str, int] = {}
        for fac in _split_factors(tok):
            if fac.startswith("("):
                coeff = coeff * GaussRat.parse(fac[1:-1])
            elif fac == "I" or re.fullmatch(r"\d+(/\d+)?", fac):
                coeff = coeff * GaussRat.parse(fac)
            else:
                name, _, e = fac.partition("^")
                exps[name] = exps.get(name, 0) + (int(e) if e else 1)
        out = out + GPoly.monomial(exps, coeff)
    return out


def _protect(s: str) -> str:
    # hide signs inside parentheses from the term splitter
    out, depth = [], 0
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth and ch in "+-":
            out.append({"+": "\x01", "-": "\x02"}[ch])
        else:
            out.append(ch)
    return "".join(out)


def _unprotect(s: str) -> str:
    return s.replace("\x01", "+").replace("\x02", "-")


def _split_factors(tok: str) -> List[str]:
    out, cur, depth = [], "", 0
    for ch in tok:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "*" and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return [f for f in out if f]
