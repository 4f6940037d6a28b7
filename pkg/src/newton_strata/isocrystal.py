"""Slope sequences of sigma-linear maps Phi = A*sigma on F^3.

The characteristic polynomial sigma^3 + alpha*sigma^2 + beta*sigma + gamma is
computed with respect to a cyclic vector: alpha and beta from the explicit
wedge formulas (with the volume factor D), gamma from the wedge identity
gamma = -(sigma(D)/D) det A.  The slope sequence is read off the upper convex
hull of the points (i, -val(coefficient)).

Exactly block-triangular inputs (entries that are exactly zero by
construction, as in the witness matrices) bypass the cyclic search: a short
exact sequence of isocrystals splits, so the slopes are the merged slopes of
the diagonal blocks.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .series import (
    INF,
    InsufficientPrecision,
    TruncatedSeries,
    ceil_q,
)

__all__ = [
    "NoCyclicVectorFound",
    "NotCyclic",
    "SlopeSeq",
    "IsoMatrix",
    "CharPoly3",
    "wedge_D",
    "charpoly3",
    "charpoly2",
    "newton_polygon",
    "slope_sequence",
    "slope_leq",
    "order_criterion",
    "split_slopes",
]


class NoCyclicVectorFound(ArithmeticError):
    """The bounded cyclic-vector search failed (degenerate input)."""


class NotCyclic(ArithmeticError):
    """e1 is not cyclic for the 2x2 input (lower-left entry vanishes)."""


# -- slope sequences --------------------------------------------------------


def _as_fraction(x) -> Fraction:
    f = Fraction(x)
    return f


@dataclass(frozen=True)
class SlopeSeq:
    """A dominant rational triple (lam1 >= lam2 >= lam3, sum 0).

    Newton polygons of cubics only produce denominators 1, 2, 3, and every
    maximal run of equal slopes has an integral sum (the polygon's vertices
    are lattice points); the constructor rejects anything else.
    """

    lam1: Fraction
    lam2: Fraction
    lam3: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lam1", _as_fraction(self.lam1))
        object.__setattr__(self, "lam2", _as_fraction(self.lam2))
        object.__setattr__(self, "lam3", _as_fraction(self.lam3))
        l1, l2, l3 = self.lam1, self.lam2, self.lam3
        if not (l1 >= l2 >= l3):
            raise ValueError(f"slopes not sorted: {(l1, l2, l3)}")
        if l1 + l2 + l3 != 0:
            raise ValueError(f"slopes do not sum to 0: {(l1, l2, l3)}")
        for lam in (l1, l2, l3):
            if lam.denominator not in (1, 2, 3):
                raise ValueError(f"slope denominator {lam.denominator} impossible for a cubic")
        # partial sums at the boundaries of maximal runs of equal slopes
        # are integers (hull vertices are lattice points)
        run_sum = l1
        for prev, cur in ((l1, l2), (l2, l3)):
            if cur == prev:
                run_sum += cur
            else:
                if run_sum.denominator != 1:
                    raise ValueError(f"non-integral run sum in {(l1, l2, l3)}")
                run_sum += cur
        # total sum is 0, already checked integral

    def as_tuple(self):
        return (self.lam1, self.lam2, self.lam3)

    def __iter__(self):
        return iter(self.as_tuple())

    def __getitem__(self, i):
        return self.as_tuple()[i]

    def __str__(self):
        return ",".join(str(l) for l in self.as_tuple())

    def to_json(self):
        return [f"{l.numerator}/{l.denominator}" for l in self.as_tuple()]

    @classmethod
    def from_json(cls, obj) -> "SlopeSeq":
        return cls(*(Fraction(s) for s in obj))

    @classmethod
    def parse(cls, text: str) -> "SlopeSeq":
        """Parse "1,0,-1" or "1/2,1/2,-1" (parentheses and spaces allowed)."""
        parts = [t for t in re.split(r"[,\s()]+", text.strip()) if t]
        if len(parts) != 3:
            raise ValueError(f"expected three slopes, got {text!r}")
        return cls(*(Fraction(t) for t in parts))


def slope_leq(nu: SlopeSeq, lam: SlopeSeq) -> bool:
    """Partial order: nu <= lam iff <omega_i, lam - nu> >= 0 for i = 1, 2."""
    return nu.lam1 <= lam.lam1 and nu.lam1 + nu.lam2 <= lam.lam1 + lam.lam2


def dominant_rep(triple) -> SlopeSeq:
    """The dominant (descending) representative of the S3-orbit of a triple."""
    vals = sorted((Fraction(t) for t in triple), reverse=True)
    return SlopeSeq(*vals)


# -- matrices ---------------------------------------------------------------

_ENTRY_NAMES_3 = ("a", "b", "c", "d", "e", "f", "g", "h", "i")


class IsoMatrix:
    """A 2x2 or 3x3 matrix of truncated series, representing Phi = A*sigma.

    Entry names a..i follow the row-major 3x3 layout of the explicit
    characteristic-polynomial formulas.
    """

    __slots__ = ("n", "p", "entries")

    def __init__(self, entries):
        rows = tuple(tuple(row) for row in entries)
        n = len(rows)
        if n not in (2, 3) or any(len(r) != n for r in rows):
            raise ValueError("IsoMatrix must be 2x2 or 3x3")
        p = rows[0][0].p
        for row in rows:
            for ts in row:
                if ts.p != p:
                    raise ValueError("mixed moduli in IsoMatrix")
        self.n = n
        self.p = p
        self.entries = rows

    # construction helpers

    @classmethod
    def identity(cls, p: int, n: int = 3, prec=INF) -> "IsoMatrix":
        return cls(
            [
                [
                    TruncatedSeries.one(p, prec) if i == j else TruncatedSeries.zero(p, prec)
                    for j in range(n)
                ]
                for i in range(n)
            ]
        )

    @classmethod
    def from_int_matrix(cls, p: int, rows, prec=INF) -> "IsoMatrix":
        """Matrix of scalars (degree-0 series), exact by default."""
        return cls(
            [[TruncatedSeries.constant(p, int(c), prec) for c in row] for row in rows]
        )

    @classmethod
    def diag(cls, p: int, series_list) -> "IsoMatrix":
        n = len(series_list)
        z = TruncatedSeries.zero(p)
        return cls([[series_list[i] if i == j else z for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def named(self, name: str) -> TruncatedSeries:
        k = _ENTRY_NAMES_3.index(name)
        return self.entries[k // 3][k % 3]

    def __matmul__(self, other: "IsoMatrix") -> "IsoMatrix":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        n = self.n
        return IsoMatrix(
            [
                [
                    _sum_series([self.entries[i][k] * other.entries[k][j] for k in range(n)])
                    for j in range(n)
                ]
                for i in range(n)
            ]
        )

    def frobenius(self, e: int = 1) -> "IsoMatrix":
        return IsoMatrix([[ts.frobenius(e) for ts in row] for row in self.entries])

    def transpose(self) -> "IsoMatrix":
        return IsoMatrix([[self.entries[j][i] for j in range(self.n)] for i in range(self.n)])

    def scale(self, u: TruncatedSeries) -> "IsoMatrix":
        return IsoMatrix([[ts * u for ts in row] for row in self.entries])

    def det(self) -> TruncatedSeries:
        e = self.entries
        if self.n == 2:
            return e[0][0] * e[1][1] - e[0][1] * e[1][0]
        return _sum_series(
            [
                e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1]),
                -(e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0])),
                e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0]),
            ]
        )

    def adjugate(self) -> "IsoMatrix":
        e = self.entries
        if self.n == 2:
            return IsoMatrix([[e[1][1], -e[0][1]], [-e[1][0], e[0][0]]])
        cof = [
            [
                (e[(i + 1) % 3][(j + 1) % 3] * e[(i + 2) % 3][(j + 2) % 3])
                - (e[(i + 1) % 3][(j + 2) % 3] * e[(i + 2) % 3][(j + 1) % 3])
                for j in range(3)
            ]
            for i in range(3)
        ]
        return IsoMatrix([[cof[j][i] for j in range(3)] for i in range(3)])

    def inverse(self) -> "IsoMatrix":
        dinv = self.det().inverse()
        return self.adjugate().scale(dinv)

    def truncate(self, new_prec) -> "IsoMatrix":
        return IsoMatrix([[ts.truncate(new_prec) for ts in row] for row in self.entries])

    def is_exact(self) -> bool:
        return all(ts.is_exact() for row in self.entries for ts in row)

    def min_prec(self):
        return min(ts.prec for row in self.entries for ts in row)

    def val_scale(self) -> int:
        """Max |valuation| over entries with determined valuation (>= 1)."""
        m = 1
        for row in self.entries:
            for ts in row:
                v = ts.valuation()
                if v is not None:
                    m = max(m, abs(v), abs(v + ts.coeffs.size - 1))
        return m

    def to_json(self) -> dict:
        mp = self.min_prec()
        return {
            "p": self.p,
            "prec": None if mp is INF or math.isinf(mp) else int(mp),
            "entries": [[ts.to_json() for ts in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "IsoMatrix":
        return cls([[TruncatedSeries.from_json(t) for t in row] for row in obj["entries"]])

    def __repr__(self):
        rows = "; ".join(
            "[" + ", ".join(ts.to_text() for ts in row) + "]" for row in self.entries
        )
        return f"IsoMatrix({rows})"


def _sum_series(terms):
    acc = terms[0]
    for t in terms[1:]:
        acc = acc + t
    return acc


# -- characteristic polynomials ---------------------------------------------


@dataclass(frozen=True)
class CharPoly3:
    """sigma^3 + alpha*sigma^2 + beta*sigma + gamma, with the search record."""

    alpha: TruncatedSeries
    beta: TruncatedSeries
    gamma: TruncatedSeries
    cyclic_vector: str


def wedge_D(A: IsoMatrix) -> TruncatedSeries:
    """Volume e1 ^ Phi(e1) ^ Phi^2(e1) = D * (e1 ^ e2 ^ e3).

    D = sigma(d)(dh - eg) + sigma(g)(di - fg); e1 is cyclic iff D != 0.
    """
    a, b, c, d, e, f, g, h, i = (A.named(n) for n in _ENTRY_NAMES_3)
    s = TruncatedSeries.frobenius
    return s(d) * (d * h - e * g) + s(g) * (d * i - f * g)


def _charpoly3_at(A: IsoMatrix, D: TruncatedSeries) -> tuple:
    """alpha, beta, gamma for e1 cyclic, from the explicit formulas."""
    a, b, c, d, e, f, g, h, i = (A.named(n) for n in _ENTRY_NAMES_3)

    def s(x, k=1):
        return x.frobenius(k)

    dh_eg = d * h - e * g
    di_fg = d * i - f * g
    Dinv = D.inverse()
    alpha = -s(a, 2) - Dinv * ((s(d, 2) * s(e) + s(g, 2) * s(f)) * dh_eg
                               + (s(d, 2) * s(h) + s(g, 2) * s(i)) * di_fg)
    sD_over_D = s(D) * Dinv
    beta = -(s(a) * alpha + s(a, 2) * s(a) + s(d, 2) * s(b) + s(g, 2) * s(c)) \
        + sD_over_D * (e * i - f * h)
    gamma = -(sD_over_D * A.det())
    return alpha, beta, gamma


_RANDOM_DIRECTIONS = 32
_SEARCH_SEED = 0xA11CE


def _cyclic_candidates(p: int):
    """Basis-change matrices B with B e1 = candidate vector, and inverses."""
    yield "e1", None, None
    yield "e2", ((0, 1, 0), (1, 0, 0), (0, 0, 1)), ((0, 1, 0), (1, 0, 0), (0, 0, 1))
    yield "e3", ((0, 0, 1), (0, 1, 0), (1, 0, 0)), ((0, 0, 1), (0, 1, 0), (1, 0, 0))
    rng = np.random.default_rng(_SEARCH_SEED)
    for _ in range(_RANDOM_DIRECTIONS):
        v1, v2, v3 = (int(x) for x in rng.integers(1, p, size=3))
        inv1 = pow(v1, p - 2, p)
        B = ((v1, 0, 0), (v2, 1, 0), (v3, 0, 1))
        Binv = ((inv1, 0, 0), ((-v2 * inv1) % p, 1, 0), ((-v3 * inv1) % p, 0, 1))
        yield f"random({v1},{v2},{v3})", B, Binv


def charpoly3(A: IsoMatrix) -> CharPoly3:
    """Characteristic sigma-polynomial of Phi = A*sigma on F^3.

    Searches e1, e2, e3, then random unit-coordinate vectors for a cyclic
    vector (basis change by an exact scalar matrix, which sigma fixes).  If
    every candidate volume D vanishes exactly, the input is a degenerate
    exact matrix; since sigma fixes the coefficient field here, Phi is an
    ordinary linear map and the ordinary characteristic polynomial
    (-trace, trace of adjugate, -det) is returned instead.
    """
    if A.n != 3:
        raise ValueError("charpoly3 needs a 3x3 matrix")
    saw_undetermined = False
    for name, B, Binv in _cyclic_candidates(A.p):
        if B is None:
            Ab = A
        else:
            mB = IsoMatrix.from_int_matrix(A.p, B)
            mBinv = IsoMatrix.from_int_matrix(A.p, Binv)
            Ab = mBinv @ A @ mB.frobenius()
        D = wedge_D(Ab)
        if D.valuation() is None:
            if not D.is_exact_zero():
                saw_undetermined = True
            continue
        alpha, beta, gamma = _charpoly3_at(Ab, D)
        return CharPoly3(alpha, beta, gamma, name)
    if saw_undetermined:
        raise InsufficientPrecision(
            "every candidate cyclic volume D is zero to working precision"
        )
    if A.is_exact():
        tr = _sum_series([A.entries[k][k] for k in range(3)])
        adj = A.adjugate()
        tr_adj = _sum_series([adj.entries[k][k] for k in range(3)])
        return CharPoly3(-tr, tr_adj, -A.det(), "none (ordinary charpoly; degenerate exact input)")
    raise NoCyclicVectorFound("no cyclic vector among e1, e2, e3 and random directions")


def charpoly2(A: IsoMatrix):
    """(alpha1, gamma1) with f = sigma^2 + alpha1*sigma + gamma1, e1 cyclic.

    alpha1 = -(sigma(a) + (sigma(c)/c) d), gamma1 = (sigma(c)/c) det.
    """
    if A.n != 2:
        raise ValueError("charpoly2 needs a 2x2 matrix")
    (a, b), (c, d) = A.entries
    if c.valuation() is None:
        raise NotCyclic("lower-left entry is zero to precision; e1 not cyclic")
    ratio = c.frobenius() * c.inverse()
    alpha1 = -(a.frobenius() + ratio * d)
    gamma1 = ratio * (a * d - b * c)
    return alpha1, gamma1


# -- Newton polygons --------------------------------------------------------


def _val_info(ts: TruncatedSeries):
    """int valuation, INF for an exact zero, or ("ge", prec) when unknown."""
    v = ts.valuation()
    if v is not None:
        return v
    if ts.is_exact_zero():
        return INF
    return ("ge", ts.prec)


def _hull_slopes(points, n):
    """Slopes of the upper convex hull, left to right (descending).

    points: list of (index, val) with val int/Fraction (known), INF (exact
    zero coefficient, point absent), or ("ge", L) (absent unless it could
    rise above the hull, in which case the answer is undetermined).
    """
    known = []
    unknown = []
    for i, v in points:
        if isinstance(v, tuple):
            unknown.append((i, v[1]))
        elif v is INF or (isinstance(v, float) and math.isinf(v)):
            continue
        else:
            known.append((i, -Fraction(v)))
    if not known or known[0][0] != 0 or known[-1][0] != n:
        raise InsufficientPrecision("polygon endpoints must have known valuations")
    # upper hull by monotone scan (points already sorted by index)
    hull = []
    for pt in known:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x2) <= (pt[1] - y2) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)

    def hull_height(x):
        for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
            if x1 <= x <= x2:
                return y1 + Fraction(y2 - y1, x2 - x1) * (x - x1)
        raise AssertionError

    for i, L in unknown:
        if -L > hull_height(i):
            raise InsufficientPrecision(
                f"valuation >= {L} at index {i} is not dominated by the hull"
            )
    slopes = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        s = Fraction(y2 - y1, x2 - x1)
        slopes.extend([s] * (x2 - x1))
    return slopes


def newton_polygon(points) -> SlopeSeq:
    """SlopeSeq from hull points (i, valuation) for i = 0..3.

    Valuations are ints, INF for exactly-zero coefficients (point absent),
    or ("ge", L) for coefficients only known to vanish below precision L.
    """
    return SlopeSeq(*_hull_slopes(points, 3))


def polygon_vertices(points):
    """The hull's vertex list [(i, height)] for reporting."""
    slopes = _hull_slopes(points, 3)
    verts = [(0, Fraction(0))]
    h = Fraction(0)
    for k, s in enumerate(slopes, start=1):
        h += s
        if k == 3 or slopes[k] != s:
            verts.append((k, h))
    return verts


# -- slope sequences of matrices --------------------------------------------


def _exact_split(A: IsoMatrix):
    """A 2-block partition (S, T) with span{e_s : s in S} exactly invariant."""
    n = A.n
    idx = range(n)
    subsets = [(k,) for k in idx] + ([tuple(sorted(set(idx) - {k})) for k in idx] if n == 3 else [])
    for S in subsets:
        T = tuple(k for k in idx if k not in S)
        if not T:
            continue
        if all(A.entries[t][s].is_exact_zero() for t in T for s in S):
            return (S, T)
    return None


def _submatrix(A: IsoMatrix, S):
    if len(S) == 1:
        return A.entries[S[0]][S[0]]
    return IsoMatrix([[A.entries[i][j] for j in S] for i in S])


def _block_slopes(block) -> list:
    """Slopes of a 1x1 (series) or 2x2 (IsoMatrix) diagonal block."""
    if isinstance(block, TruncatedSeries):
        v = block.valuation()
        if v is None:
            raise InsufficientPrecision("1-dim block entry is zero to precision")
        return [Fraction(-v)]
    # 2x2: exactly triangular inputs split into diagonal valuations
    (a, b), (c, d) = block.entries
    if c.is_exact_zero() or b.is_exact_zero():
        va, vd = a.valuation(), d.valuation()
        if va is None or vd is None:
            raise InsufficientPrecision("triangular 2x2 block with undetermined diagonal")
        return sorted([Fraction(-va), Fraction(-vd)], reverse=True)
    try:
        alpha1, gamma1 = charpoly2(block)
    except ValueError:
        # exact non-monomial inversion: recompute at a finite working precision
        N = 8 * (block.val_scale() + 2)
        alpha1, gamma1 = charpoly2(block.truncate(N))
    vg = gamma1.valuation()
    if vg is None:
        raise InsufficientPrecision("2x2 block determinant is zero to precision")
    return _hull_slopes([(0, 0), (1, _val_info(alpha1)), (2, vg)], 2)


def split_slopes(A: IsoMatrix, block_shape) -> SlopeSeq:
    """Merged block slopes for an exactly block-triangular matrix.

    block_shape is an ordered partition of the indices, e.g. ((1,), (0, 2));
    every column set union of a prefix must be exactly invariant (a short
    exact sequence of isocrystals splits, so only the diagonal blocks
    contribute).
    """
    seen = []
    for S in block_shape:
        inside = set(seen) | set(S)
        for s in list(inside):
            for t in range(A.n):
                if t not in inside and not A.entries[t][s].is_exact_zero():
                    raise ValueError(f"block shape {block_shape} does not match zero pattern")
        seen.extend(S)
    if sorted(seen) != list(range(A.n)):
        raise ValueError("block shape must partition the indices")
    slopes = []
    for S in block_shape:
        slopes.extend(_block_slopes(_submatrix(A, S)))
    slopes.sort(reverse=True)
    if A.n == 3:
        return SlopeSeq(*slopes)
    return slopes


def _slope_sequence_once(A: IsoMatrix) -> SlopeSeq:
    cp = charpoly3(A)
    vg = cp.gamma.valuation()
    if vg is None:
        raise InsufficientPrecision("gamma is zero to precision")
    return newton_polygon([(0, 0), (1, _val_info(cp.alpha)), (2, _val_info(cp.beta)), (3, vg)])


_MAX_RETRIES = 3


def default_working_precision(A: IsoMatrix) -> int:
    return 8 * (A.val_scale() + 2)


def slope_sequence(A: IsoMatrix) -> SlopeSeq:
    """The slope sequence nu-bar(A) of the isocrystal (F^3, A*sigma).

    Requires val(det A) = 0.  Exactly block-triangular inputs use the split
    path; exact inputs are truncated to a working precision that doubles on
    demand (bounded retries); finite-precision inputs propagate
    InsufficientPrecision to the caller (who controls resampling).
    """
    if A.n != 3:
        raise ValueError("slope_sequence needs a 3x3 matrix")
    dv = A.det().valuation()
    if dv is None:
        raise InsufficientPrecision("det is zero to precision")
    if dv != 0:
        raise ValueError(f"val(det) = {dv}; slope_sequence requires an SL-type input")
    split = _exact_split(A)
    if split is not None:
        S, T = split
        return split_slopes(A, (S, T))
    if A.is_exact():
        N = default_working_precision(A)
        last = None
        for _ in range(_MAX_RETRIES + 1):
            try:
                return _slope_sequence_once(A.truncate(N))
            except InsufficientPrecision as exc:
                last = exc
                N *= 2
        raise last
    return _slope_sequence_once(A)


def order_criterion(cp: CharPoly3, lam: SlopeSeq) -> bool:
    """nu <= lam iff alpha in P^(-lam1) and beta in P^(lam3) (val gamma = 0)."""
    vg = cp.gamma.valuation()
    if vg is None:
        raise InsufficientPrecision("gamma is zero to precision")
    if vg != 0:
        raise ValueError("order criterion requires val(gamma) = 0")
    return cp.alpha.in_P(-lam.lam1) and cp.beta.in_P(lam.lam3)
