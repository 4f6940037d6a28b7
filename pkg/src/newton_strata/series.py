"""Exact truncated Laurent series over prime finite fields.

A :class:`TruncatedSeries` stores a Laurent series in the uniformizer pi
with coefficients in GF(p), known at every exponent below an absolute
precision bound ``prec``.  Coefficients at exponents >= prec are unknown,
not zero.  All arithmetic tracks how far the result is determined by the
inputs and never reports a coefficient beyond that range.

The Frobenius sigma raises coefficients to the q-th power.  With q = p the
coefficient map is the identity (Fermat), but it is still applied
structurally wherever the formulas demand it.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

import numpy as np

__all__ = [
    "InsufficientPrecision",
    "FieldElem",
    "TruncatedSeries",
    "ts_add",
    "ts_mul",
    "ts_inv",
    "ts_frobenius",
    "ts_valuation",
    "ceil_q",
]

INF = math.inf


class InsufficientPrecision(ArithmeticError):
    """The answer is not determined by the stored coefficients."""


def ceil_q(x) -> int:
    """Exact ceiling of an int, Fraction, or float-free rational."""
    if isinstance(x, int):
        return x
    f = Fraction(x)
    return -((-f.numerator) // f.denominator)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


class FieldElem:
    """A residue in GF(p)."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        if not _is_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        self.value = value % p
        self.p = p

    def _check(self, other: "FieldElem") -> None:
        if self.p != other.p:
            raise ValueError(f"modulus mismatch: {self.p} != {other.p}")

    def __add__(self, other):
        self._check(other)
        return FieldElem(self.value + other.value, self.p)

    def __sub__(self, other):
        self._check(other)
        return FieldElem(self.value - other.value, self.p)

    def __neg__(self):
        return FieldElem(-self.value, self.p)

    def __mul__(self, other):
        self._check(other)
        return FieldElem(self.value * other.value, self.p)

    def inverse(self) -> "FieldElem":
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse in GF(p)")
        return FieldElem(pow(self.value, self.p - 2, self.p), self.p)

    def frobenius(self, e: int = 1) -> "FieldElem":
        # x -> x^q fixes GF(p) pointwise when q = p.
        return self

    def __eq__(self, other):
        return (
            isinstance(other, FieldElem)
            and self.p == other.p
            and self.value == other.value
        )

    def __hash__(self):
        return hash((self.value, self.p))

    def __repr__(self):
        return f"FieldElem({self.value}, p={self.p})"


class TruncatedSeries:
    """Laurent series over GF(p), exact at all exponents below ``prec``.

    The coefficient of pi^(off + j) is ``coeffs[j]``; the array is trimmed
    so that, when nonempty, both ends are nonzero.  ``prec`` is an integer
    or ``math.inf`` for exactly known series (finitely many terms, all of
    them stored).
    """

    __slots__ = ("p", "off", "coeffs", "prec")

    def __init__(self, p: int, off: int, coeffs, prec):
        # canonicalize so that prec is either the int value or math.inf itself
        prec = INF if (isinstance(prec, float) and math.isinf(prec)) else int(prec)
        arr = np.asarray(coeffs, dtype=np.int64) % p
        # drop anything at or beyond the precision bound
        if prec is not INF and arr.size and off + arr.size > prec:
            arr = arr[: max(0, prec - off)]
        nz = np.flatnonzero(arr)
        if nz.size:
            arr = arr[nz[0] : nz[-1] + 1]
            off = off + int(nz[0])
        else:
            arr = arr[:0]
            off = 0
        arr.flags.writeable = False
        self.p = p
        self.off = off
        self.coeffs = arr
        self.prec = prec

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_terms(cls, p: int, terms, prec=INF) -> "TruncatedSeries":
        """Build from {exponent: coefficient} or [(exponent, coefficient)]."""
        pairs = list(terms.items()) if isinstance(terms, dict) else list(terms)
        pairs = [(e, c % p) for e, c in pairs if c % p]
        if prec is not INF:
            pairs = [(e, c) for e, c in pairs if e < prec]
        if not pairs:
            return cls(p, 0, [], prec)
        lo = min(e for e, _ in pairs)
        hi = max(e for e, _ in pairs)
        arr = np.zeros(hi - lo + 1, dtype=np.int64)
        for e, c in pairs:
            arr[e - lo] = (arr[e - lo] + c) % p
        return cls(p, lo, arr, prec)

    @classmethod
    def zero(cls, p: int, prec=INF) -> "TruncatedSeries":
        return cls(p, 0, [], prec)

    @classmethod
    def one(cls, p: int, prec=INF) -> "TruncatedSeries":
        return cls(p, 0, [1], prec)

    @classmethod
    def pi_power(cls, p: int, k: int, prec=INF, coeff: int = 1) -> "TruncatedSeries":
        """coeff * pi^k, exact by default."""
        return cls(p, k, [coeff], prec)

    @classmethod
    def constant(cls, p: int, c: int, prec=INF) -> "TruncatedSeries":
        return cls(p, 0, [c], prec)

    # -- basic queries ----------------------------------------------------

    def is_zero_to_precision(self) -> bool:
        return self.coeffs.size == 0

    def is_exact(self) -> bool:
        return self.prec is INF

    def is_exact_zero(self) -> bool:
        return self.prec is INF and self.coeffs.size == 0

    def valuation(self):
        """Least exponent with a nonzero coefficient, or None for ">= prec".

        None means every stored coefficient vanishes: the valuation is only
        known to be >= prec (or the series is exactly zero when prec = inf).
        """
        if self.coeffs.size:
            return self.off
        return None

    def val_lower_bound(self):
        """A bound v with val(self) >= v, always available."""
        if self.coeffs.size:
            return self.off
        return self.prec

    def coeff(self, e: int) -> int:
        """Coefficient at exponent e; raises beyond the precision bound."""
        if self.prec is not INF and e >= self.prec:
            raise InsufficientPrecision(f"coefficient at pi^{e} unknown (prec={self.prec})")
        j = e - self.off
        if 0 <= j < self.coeffs.size:
            return int(self.coeffs[j])
        return 0

    def leading_coeff(self) -> int:
        if not self.coeffs.size:
            raise InsufficientPrecision("series is zero to precision; no leading term")
        return int(self.coeffs[0])

    def in_P(self, k) -> bool:
        """Membership in P^k = pi^ceil(k) * O (P^l := P^ceil(l) for rational l).

        Decidable when the threshold is covered by the precision, or when a
        violating term is already visible; otherwise raises.
        """
        t = ceil_q(k)
        v = self.valuation()
        if v is not None and v < t:
            return False
        if t <= self.prec:
            return True
        raise InsufficientPrecision(f"membership in P^{t} needs precision {t} > {self.prec}")

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "TruncatedSeries") -> None:
        if self.p != other.p:
            raise ValueError(f"modulus mismatch: {self.p} != {other.p}")

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        prec = min(self.prec, other.prec)
        if not self.coeffs.size:
            return TruncatedSeries(other.p, other.off, other.coeffs, prec)
        if not other.coeffs.size:
            return TruncatedSeries(self.p, self.off, self.coeffs, prec)
        lo = min(self.off, other.off)
        hi = max(self.off + self.coeffs.size, other.off + other.coeffs.size)
        arr = np.zeros(hi - lo, dtype=np.int64)
        arr[self.off - lo : self.off - lo + self.coeffs.size] += self.coeffs
        arr[other.off - lo : other.off - lo + other.coeffs.size] += other.coeffs
        return TruncatedSeries(self.p, lo, arr, prec)

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(self.p, self.off, (-self.coeffs) % self.p, self.prec)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + (-other)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        # prec = min(a.prec + val(b), b.prec + val(a)), valuations replaced
        # by their lower bounds when undetermined
        prec = min(self.prec + other.val_lower_bound(), other.prec + self.val_lower_bound())
        if not self.coeffs.size or not other.coeffs.size:
            return TruncatedSeries(self.p, 0, [], prec)
        conv = np.convolve(self.coeffs, other.coeffs) % self.p
        return TruncatedSeries(self.p, self.off + other.off, conv, prec)

    def scale(self, c: int) -> "TruncatedSeries":
        return TruncatedSeries(self.p, self.off, (self.coeffs * (c % self.p)) % self.p, self.prec)

    def shift(self, k: int) -> "TruncatedSeries":
        """Multiply by pi^k."""
        return TruncatedSeries(self.p, self.off + k, self.coeffs, self.prec + k)

    def inverse(self) -> "TruncatedSeries":
        """Multiplicative inverse to the provable precision.

        Writing self = u * pi^v with u a unit known at relative precision
        r = prec - v, the inverse is known at absolute precision r - v.
        Exact inputs must be monomials (anything else has an infinite
        expansion).
        """
        if not self.coeffs.size:
            raise InsufficientPrecision("series is zero to precision; cannot invert")
        v = self.off
        if self.prec is INF:
            if self.coeffs.size == 1:
                c = pow(int(self.coeffs[0]), self.p - 2, self.p)
                return TruncatedSeries(self.p, -v, [c], INF)
            raise ValueError("exact non-monomial series has no finite inverse; truncate first")
        n = int(self.prec - v)  # relative precision of the unit part
        u = np.zeros(n, dtype=np.int64)
        m = min(n, self.coeffs.size)
        u[:m] = self.coeffs[:m]
        inv0 = pow(int(u[0]), self.p - 2, self.p)
        # Newton iteration x -> x(2 - ux), doubling the correct length
        x = np.array([inv0], dtype=np.int64)
        while x.size < n:
            k = min(2 * x.size, n)
            ux = np.convolve(u[:k], x)[:k] % self.p
            ux = (-ux) % self.p
            ux[0] = (ux[0] + 2) % self.p
            x = np.convolve(x, ux)[:k] % self.p
        return TruncatedSeries(self.p, -v, x, self.prec - 2 * v)

    def frobenius(self, e: int = 1) -> "TruncatedSeries":
        """sigma^e: coefficients to the q^e-th power; exponents unchanged.

        With q = p the coefficient map is the identity, so the series is
        returned unchanged (values are immutable).
        """
        return self

    def truncate(self, new_prec) -> "TruncatedSeries":
        if new_prec >= self.prec:
            return self
        return TruncatedSeries(self.p, self.off, self.coeffs, new_prec)

    # -- comparisons and serialization --------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, TruncatedSeries)
            and self.p == other.p
            and self.prec == other.prec
            and self.off == other.off
            and self.coeffs.size == other.coeffs.size
            and bool(np.all(self.coeffs == other.coeffs))
        )

    def __hash__(self):
        return hash((self.p, self.prec, self.off, self.coeffs.tobytes()))

    def terms(self):
        """Sorted list of (exponent, coefficient) pairs with nonzero coefficient."""
        return [(self.off + j, int(c)) for j, c in enumerate(self.coeffs) if c]

    def to_text(self) -> str:
        """Render like "3*t^-2 + 1*t^0 + 10*t^4"; the zero series prints "0"."""
        if not self.coeffs.size:
            return "0"
        return " + ".join(f"{c}*t^{e}" for e, c in self.terms())

    @classmethod
    def from_text(cls, p: int, text: str, prec=INF) -> "TruncatedSeries":
        """Parse the to_text format; accepts bare constants and "t^k" terms.

        A trailing "prec=N" token overrides the prec argument.
        """
        text = text.strip()
        m = re.search(r"prec\s*=\s*(-?\d+|inf)", text)
        if m:
            prec = INF if m.group(1) == "inf" else int(m.group(1))
            text = text[: m.start()].strip().rstrip(",;")
        if text in ("", "0"):
            return cls(p, 0, [], prec)
        terms = []
        for part in re.split(r"(?<=[\w\)])\s*\+\s*", text):
            part = part.strip()
            m = re.fullmatch(r"(-?\d+)(?:\s*\*\s*t(?:\^(-?\d+))?)?", part)
            if m:
                c = int(m.group(1))
                e = int(m.group(2)) if m.group(2) is not None else (1 if "t" in part else 0)
                terms.append((e, c))
                continue
            m = re.fullmatch(r"(-?)t(?:\^(-?\d+))?", part)
            if m:
                c = -1 if m.group(1) else 1
                e = int(m.group(2)) if m.group(2) is not None else 1
                terms.append((e, c))
                continue
            raise ValueError(f"cannot parse series term {part!r}")
        return cls.from_terms(p, terms, prec)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "prec": None if self.prec is INF else int(self.prec),
            "terms": [[e, c] for e, c in self.terms()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TruncatedSeries":
        prec = INF if obj.get("prec") is None else int(obj["prec"])
        return cls.from_terms(int(obj["p"]), [(int(e), int(c)) for e, c in obj["terms"]], prec)

    def __repr__(self):
        prec = "inf" if self.prec is INF else self.prec
        return f"TruncatedSeries({self.to_text()}, p={self.p}, prec={prec})"


# -- module-level operation aliases ---------------------------------------


def ts_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a + b


def ts_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a * b


def ts_inv(a: TruncatedSeries) -> TruncatedSeries:
    return a.inverse()


def ts_frobenius(a: TruncatedSeries, e: int = 1) -> TruncatedSeries:
    return a.frobenius(e)


def ts_valuation(a: TruncatedSeries):
    """Valuation, or the string ">= N" when undetermined at precision N."""
    v = a.valuation()
    if v is None:
        return f">= {a.prec}"
    return v
