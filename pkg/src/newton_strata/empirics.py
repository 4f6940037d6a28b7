"""Monte-Carlo sampling over Iwahori coset valuation patterns.

Samples random matrices from entrywise valuation patterns (finite
truncations of the cosets), computes their slope sequences in bulk, and
compares the resulting histograms, frequencies, and stratum memberships
against the closed-form predictions.

The bulk kernel works on blocks of samples at once: every entry of every
sampled matrix is a coefficient row on a shared exponent window, and the
characteristic polynomial coefficients (trace, principal 2x2 minor sum,
determinant) are computed by batched FFT convolution mod p.  The slope
sequence is read off the valuations of those coefficients.  A sample is
"resolved" when the truncated window provably pins the slopes of every
lift of the truncation; otherwise it is retried at doubled precision.

Coefficients are drawn by a counter-based hash of (seed, trial, entry
slot, exponent), so a sample is a pure function of its trial index:
raising the precision extends the same matrix with further terms, and
histograms do not depend on how trials are split across workers.
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .series import InsufficientPrecision, TruncatedSeries
from .isocrystal import IsoMatrix, SlopeSeq, dominant_rep, slope_leq, slope_sequence
from .affine_weyl import AffineWeylElt, ValuationPattern, coset_pattern, enumerate_grid
from .strata import (
    CaseNotApplicable,
    poset_of,
    predicate_case,
    predicate_poset,
    stratum_predicate,
)

__all__ = [
    "SampleConfig",
    "StratumHistogram",
    "CodimEstimate",
    "KappaReport",
    "CampaignReport",
    "ZeroCount",
    "MAX_RETRIES",
    "MAX_UNRESOLVED_RATE",
    "make_config",
    "sample_pattern",
    "sample_ixi",
    "empirical_poset",
    "estimate_codim",
    "kappa_check",
    "predicate_campaign",
    "mazur_bound",
]

BLOCK = 4096
MAX_RETRIES = 3
MAX_UNRESOLVED_RATE = 1e-3

_MASK64 = (1 << 64) - 1
_SEED_MULT = 0x9E3779B97F4A7C15
_SLOT_MULT = 0xD1342543DE82EF95
_TRIAL_MULT = 0xA0761D6478BD642F
_EXP_MULT = 0xE7037ED1A0B428DB


class ZeroCount(ArithmeticError):
    """No sampled slope fell inside the target stratum; increase trials."""


# -- counter-based coefficient generator ---------------------------------------


def _mix64(z):
    """splitmix64 finalizer on uint64 arrays."""
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(0xBF58476D1CE4E5B9)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _raw_hash(seed: int, slot: int, trials, exps):
    """uint64 hash array indexed by (seed, slot, trial, exponent).

    trials and exps are uint64 arrays shaped to broadcast, e.g. (B, 1)
    against (1, L).  The value at a given index tuple never depends on the
    window, so re-sampling at higher precision extends the same series.
    """
    base = (seed * _SEED_MULT + (slot + 1) * _SLOT_MULT) & _MASK64
    with np.errstate(over="ignore"):
        h = _mix64(np.uint64(base) ^ (trials * np.uint64(_TRIAL_MULT)))
        h = _mix64(h ^ (exps * np.uint64(_EXP_MULT)))
    return h


def _as_u64(arr) -> np.ndarray:
    return np.ascontiguousarray(arr, dtype=np.int64).view(np.uint64)


# -- configuration --------------------------------------------------------------


@dataclass
class SampleConfig:
    """Parameters of one sampling run over a fixed valuation pattern.

    prec defaults to 4 * max_abs_k + 8, enough window below every exact
    and threshold exponent that first-attempt resolution is the norm.
    """

    pattern: ValuationPattern
    p: int = 11
    prec: int = None
    trials: int = 10_000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.p < 2 or any(self.p % r == 0 for r in range(2, int(self.p**0.5) + 1)):
            raise ValueError(f"p must be prime, got {self.p}")
        if self.trials < 0:
            raise ValueError("trials must be nonnegative")
        if self.workers < 1:
            raise ValueError("workers must be positive")
        floor = 4 * self.pattern.max_abs_k() + 8
        if self.prec is None:
            self.prec = floor
        elif self.prec < floor:
            raise ValueError(f"prec {self.prec} below required floor {floor}")


def make_config(x: AffineWeylElt, which: str = "xI", **kw) -> SampleConfig:
    """SampleConfig over the named coset pattern of x."""
    return SampleConfig(pattern=coset_pattern(x, which), **kw)


# -- scalar sampling -------------------------------------------------------------


def _scalar_entry(p, entry, prec, seed, index, slot) -> TruncatedSeries:
    if entry.kind == "zero":
        return TruncatedSeries.zero(p, prec)
    exps = np.arange(entry.k, prec, dtype=np.int64)
    raw = _raw_hash(seed, slot, _as_u64([index]).reshape(1, 1), _as_u64(exps).reshape(1, -1))[0]
    coeffs = (raw % np.uint64(p)).astype(np.int64)
    if entry.kind == "exact":
        coeffs[0] = 1 + int(raw[0] % np.uint64(p - 1))
    return TruncatedSeries(p, entry.k, coeffs, prec)


def sample_pattern(cfg: SampleConfig, index: int = 0, slot_base: int = 0) -> IsoMatrix:
    """The index-th sample of cfg.pattern, one exact series per entry.

    Exact-valuation entries get a unit leading coefficient at pi^k plus
    uniform higher terms up to prec; min-valuation entries get uniform
    coefficients from pi^k; zero entries stay zero.  Deterministic in
    (seed, index), and refined in place by raising prec.
    """
    rows = []
    for i in range(3):
        row = []
        for j in range(3):
            entry = cfg.pattern.entries[i][j]
            row.append(_scalar_entry(cfg.p, entry, cfg.prec, cfg.seed, index, slot_base + 3 * i + j))
        rows.append(row)
    return IsoMatrix(rows)


def sample_ixi(cfg: SampleConfig, index: int = 0):
    """(u, m, u @ m) with u from the Iwahori pattern and m from cfg.pattern.

    Cross-check mode: products sample the full double coset rather than
    the single coset slice.  Slot numbering matches the bulk kernel, so
    scalar and batched draws agree coefficient by coefficient.
    """
    icfg = SampleConfig(
        pattern=_identity_pattern(), p=cfg.p, prec=cfg.prec,
        trials=cfg.trials, seed=cfg.seed, workers=1,
    )
    u = sample_pattern(icfg, index, slot_base=0)
    m = sample_pattern(cfg, index, slot_base=9)
    return u, m, u @ m


def _identity_pattern() -> ValuationPattern:
    one = AffineWeylElt.parse("mu=0,0,0;w=1")
    return coset_pattern(one, "I")


# -- batched sampling and slope kernel -------------------------------------------


def _pattern_blocks(pattern, p, seed, ids, prec, slot_base=0):
    """Coefficient blocks for all 9 entries on a shared exponent window.

    Returns (entries, g, L) where entries[3*i+j] has shape (len(ids), L)
    and column t holds the coefficient of pi^(g + t); the window covers
    [g, prec) with g the least onset among nonzero entries.
    """
    onsets = [e.k for row in pattern.entries for e in row if e.kind != "zero"]
    g = min(onsets)
    L = prec - g
    trials = _as_u64(ids).reshape(-1, 1)
    exps = _as_u64(np.arange(g, prec, dtype=np.int64)).reshape(1, -1)
    pu = np.uint64(p)
    out = []
    for i in range(3):
        for j in range(3):
            entry = pattern.entries[i][j]
            if entry.kind == "zero":
                out.append(np.zeros((len(ids), L), dtype=np.int64))
                continue
            raw = _raw_hash(seed, slot_base + 3 * i + j, trials, exps)
            arr = (raw % pu).astype(np.int64)
            onset = entry.k - g
            if onset:
                arr[:, :onset] = 0
            if entry.kind == "exact":
                arr[:, onset] = 1 + (raw[:, onset] % np.uint64(p - 1)).astype(np.int64)
            out.append(arr)
    return out, g, L


def _product_blocks(left_pattern, right_pattern, p, seed, ids, prec):
    """Entry blocks of (left sample) @ (right sample), truncated to the
    provable window [gl + gr, gl + gr + min(Ll, Lr))."""
    U, gl, Ll = _pattern_blocks(left_pattern, p, seed, ids, prec, slot_base=0)
    M, gr, Lr = _pattern_blocks(right_pattern, p, seed, ids, prec, slot_base=9)
    L = min(Ll, Lr)
    nfft = 1 << (Ll + Lr - 2).bit_length()
    FU = [np.fft.rfft(u, nfft, axis=1) for u in U]
    FM = [np.fft.rfft(m, nfft, axis=1) for m in M]
    out = []
    for i in range(3):
        for j in range(3):
            acc = FU[3 * i] * FM[j]
            for k in (1, 2):
                acc = acc + FU[3 * i + k] * FM[3 * k + j]
            conv = np.rint(np.fft.irfft(acc, nfft, axis=1)[:, :L]).astype(np.int64)
            out.append(conv % p)
    return out, gl + gr, L


def _lead_val(arr, base):
    """(valuation, found) per row; unfound rows sit at the horizon base+L."""
    nz = arr != 0
    found = nz.any(axis=1)
    idx = np.argmax(nz, axis=1)
    val = base + np.where(found, idx, arr.shape[1]).astype(np.int64)
    return val, found


def _slopes_block(entries, g, L, p):
    """Doubled slope triples (2*lam) and a resolution mask for one block.

    The polygon of the characteristic polynomial gives, with v2 = val(trace)
    and v1 = val(sum of principal 2x2 minors) and val(det) = 0:
        2*lam1    = max(-2*v2, -v1, 0)
        2*(-lam3) = max(-2*v1, -v2, 0)
    A row is resolved when the formulas agree whether an unseen valuation
    is at its window horizon or beyond it entirely.
    """
    nfft = 1 << (2 * L - 2).bit_length() if L > 1 else 2
    spec = [np.fft.rfft(m, nfft, axis=1) for m in entries]

    def mul_spec(fx, fy):
        conv = np.rint(np.fft.irfft(fx * fy, nfft, axis=1)[:, :L]).astype(np.int64)
        return conv % p

    trace = (entries[0] + entries[4] + entries[8]) % p
    m_ei, m_fh = mul_spec(spec[4], spec[8]), mul_spec(spec[5], spec[7])
    m_di, m_fg = mul_spec(spec[3], spec[8]), mul_spec(spec[5], spec[6])
    m_dh, m_eg = mul_spec(spec[3], spec[7]), mul_spec(spec[4], spec[6])
    minors = (
        mul_spec(spec[0], spec[4]) - mul_spec(spec[1], spec[3])
        + mul_spec(spec[0], spec[8]) - mul_spec(spec[2], spec[6])
        + m_ei - m_fh
    ) % p
    cof_a = (m_ei - m_fh) % p
    cof_b = (m_di - m_fg) % p
    cof_c = (m_dh - m_eg) % p
    fa, fb, fc = (np.fft.rfft(m, nfft, axis=1) for m in (cof_a, cof_b, cof_c))
    det = (mul_spec(spec[0], fa) - mul_spec(spec[1], fb) + mul_spec(spec[2], fc)) % p

    v_tr, f_tr = _lead_val(trace, g)
    v_mi, f_mi = _lead_val(minors, 2 * g)
    v_dt, f_dt = _lead_val(det, 3 * g)
    if not bool(np.all(f_dt & (v_dt == 0))):
        raise ArithmeticError("sampled determinant is not a unit; kernel inconsistency")

    big = np.int64(1) << np.int64(40)
    zero = np.int64(0)

    def polygon(vt, vm):
        two_l1 = np.maximum(np.maximum(-2 * vt, -vm), zero)
        two_l3n = np.maximum(np.maximum(-2 * vm, -vt), zero)
        return two_l1, two_l3n

    l1_h, l3n_h = polygon(v_tr, v_mi)
    l1, l3n = polygon(np.where(f_tr, v_tr, big), np.where(f_mi, v_mi, big))
    resolved = (l1 == l1_h) & (l3n == l3n_h)
    two_l1, two_l3 = l1, -l3n
    two_l2 = l3n - l1
    return two_l1, two_l2, two_l3, resolved


def _encode(t1, t2, t3):
    return ((t1 + 512) << np.int64(20)) | ((t2 + 512) << np.int64(10)) | (t3 + 512)


def _decode(code: int):
    return (code >> 20) - 512, ((code >> 10) & 1023) - 512, (code & 1023) - 512


def _poset_range(x: AffineWeylElt, mode, p, prec, seed, lo, hi):
    """Histogram of encoded doubled slopes for trial ids in [lo, hi)."""
    xpat = coset_pattern(x, "xI")
    ipat = _identity_pattern() if mode == "IxI" else None
    counts = {}
    unresolved = 0
    errors = 0
    ids = np.arange(lo, hi, dtype=np.int64)
    for start in range(0, ids.size, BLOCK):
        pending = ids[start : start + BLOCK]
        for attempt in range(MAX_RETRIES + 1):
            q = prec << attempt
            if mode == "IxI":
                entries, g, L = _product_blocks(ipat, xpat, p, seed, pending, q)
            else:
                entries, g, L = _pattern_blocks(xpat, p, seed, pending, q)
            t1, t2, t3, ok = _slopes_block(entries, g, L, p)
            codes, n = np.unique(_encode(t1[ok], t2[ok], t3[ok]), return_counts=True)
            for code, cnt in zip(codes.tolist(), n.tolist()):
                counts[code] = counts.get(code, 0) + cnt
            pending = pending[~ok]
            if not pending.size:
                break
            if attempt < MAX_RETRIES:
                errors += pending.size
        unresolved += pending.size
    return counts, unresolved, errors


def _poset_worker(args):
    x_text, mode, p, prec, seed, lo, hi = args
    return _poset_range(AffineWeylElt.parse(x_text), mode, p, prec, seed, lo, hi)


# -- histograms ------------------------------------------------------------------


@dataclass
class StratumHistogram:
    """Empirical distribution of slope sequences over one sampled coset."""

    x: str
    p: int
    trials: int
    counts: dict
    unresolved: int = 0
    errors: int = 0
    elapsed_ms: float = 0.0

    def support(self):
        return tuple(sorted(self.counts, key=lambda s: s.as_tuple(), reverse=True))

    def mode(self) -> SlopeSeq:
        if not self.counts:
            raise ZeroCount("empty histogram")
        return max(self.counts, key=lambda s: (self.counts[s], s.as_tuple()))

    @property
    def unresolved_rate(self) -> float:
        return self.unresolved / self.trials if self.trials else 0.0

    def frequency(self, lam: SlopeSeq) -> float:
        """Fraction of resolved samples with slope sequence <= lam."""
        resolved = self.trials - self.unresolved
        if resolved <= 0:
            return 0.0
        return sum(n for s, n in self.counts.items() if slope_leq(s, lam)) / resolved

    def to_json(self) -> dict:
        return {
            "x": self.x,
            "p": self.p,
            "trials": self.trials,
            "histogram": {str(s): n for s, n in sorted(self.counts.items(), key=lambda kv: kv[0].as_tuple(), reverse=True)},
            "unresolved": self.unresolved,
            "errors": self.errors,
            "elapsed_ms": round(self.elapsed_ms, 3),
        }

    def to_csv(self) -> str:
        lines = ["lam1,lam2,lam3,count"]
        for s in self.support():
            lines.append(f"{s.lam1},{s.lam2},{s.lam3},{self.counts[s]}")
        return "\n".join(lines) + "\n"


def empirical_poset(x: AffineWeylElt, cfg: SampleConfig = None, mode: str = "xI") -> StratumHistogram:
    """Histogram of slope sequences over sampled xI (or I * xI products).

    Unresolved samples (window never pinned the polygon after retries) are
    counted separately, never silently dropped.
    """
    if mode not in ("xI", "IxI"):
        raise ValueError(f"unknown sampling mode {mode!r}")
    if cfg is None:
        cfg = make_config(x)
    t0 = time.perf_counter()
    chunks = []
    step = max(1, -(-cfg.trials // cfg.workers))
    for lo in range(0, cfg.trials, step):
        chunks.append((str(x), mode, cfg.p, cfg.prec, cfg.seed, lo, min(lo + step, cfg.trials)))
    if cfg.workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(_poset_worker, chunks))
    else:
        parts = [_poset_worker(c) for c in chunks]
    counts = {}
    unresolved = 0
    errors = 0
    for part_counts, part_unres, part_err in parts:
        for code, n in part_counts.items():
            counts[code] = counts.get(code, 0) + n
        unresolved += part_unres
        errors += part_err
    slopes = {}
    for code, n in counts.items():
        t1, t2, t3 = _decode(code)
        slopes[SlopeSeq(Fraction(t1, 2), Fraction(t2, 2), Fraction(t3, 2))] = n
    return StratumHistogram(
        x=str(x), p=cfg.p, trials=cfg.trials, counts=slopes,
        unresolved=unresolved, errors=errors,
        elapsed_ms=(time.perf_counter() - t0) * 1e3,
    )


def mazur_bound(x: AffineWeylElt) -> SlopeSeq:
    """Upper bound for every slope sequence on IxI: the dominant rep of -mu."""
    return dominant_rep(tuple(-m for m in x.mu))


# -- codimension estimation -------------------------------------------------------


@dataclass
class CodimEstimate:
    """Two-prime frequency-scaling estimate of a stratum codimension.

    The closed stratum cuts a codimension-d locus, so its sampling
    frequency scales like p**(-d) up to bounded unit factors; comparing
    two primes isolates the exponent.
    """

    x: str
    lam: SlopeSeq
    trials: int
    counts: dict  # p -> (hits, resolved)
    estimate: float
    stderr: float
    ci95: tuple

    def to_json(self) -> dict:
        return {
            "x": self.x,
            "lam": str(self.lam),
            "trials": self.trials,
            "counts": {str(p): list(cn) for p, cn in self.counts.items()},
            "estimate": self.estimate,
            "stderr": self.stderr,
            "ci95": list(self.ci95),
        }


def estimate_codim(
    x: AffineWeylElt,
    lam: SlopeSeq,
    p1: int = 11,
    p2: int = 31,
    trials: int = 10**6,
    seed: int = 0,
    prec: int = None,
    workers: int = 1,
) -> CodimEstimate:
    """Estimate codim of the closed stratum at lam from two sampling primes.

    With f(p) the frequency of {slope sequence <= lam} over sampled xI,
    the estimate is log(f(p1)/f(p2)) / log(p2/p1), with a binomial 95%
    interval propagated through the logs.
    """
    poset = poset_of(x)
    if lam not in poset:
        raise ValueError(f"{lam} is not a Newton slope of x = {x}")
    if lam == poset.nu_x:
        raise ValueError("lam equals the generic slope; nothing to estimate")
    stats = {}
    for p in (p1, p2):
        cfg = make_config(x, p=p, trials=trials, seed=seed, prec=prec, workers=workers)
        hist = empirical_poset(x, cfg)
        resolved = hist.trials - hist.unresolved
        hits = sum(n for s, n in hist.counts.items() if slope_leq(s, lam))
        if hits == 0:
            raise ZeroCount(f"no hits at lam = {lam} for p = {p}; increase trials")
        stats[p] = (hits, resolved)
    (c1, n1), (c2, n2) = stats[p1], stats[p2]
    f1, f2 = c1 / n1, c2 / n2
    scale = math.log(p2 / p1)
    d_hat = math.log(f1 / f2) / scale
    stderr = math.sqrt((1 - f1) / c1 + (1 - f2) / c2) / scale
    return CodimEstimate(
        x=str(x), lam=lam, trials=trials, counts=stats,
        estimate=d_hat, stderr=stderr,
        ci95=(d_hat - 1.96 * stderr, d_hat + 1.96 * stderr),
    )


# -- sigma-conjugation transport checks --------------------------------------------


def _unipotent_rows(x: AffineWeylElt, which: str):
    """Lower-unipotent sampling spec ("one" | "zero" | min-valuation k)."""
    m1, m2, m3 = x.mu
    if which == "K1":
        return (
            ("one", "zero", "zero"),
            (m2 - m1, "one", "zero"),
            (m3 - m1, m3 - m2, "one"),
        )
    if which == "K2":
        return (
            ("one", "zero", "zero"),
            (m2 - m1, "one", "zero"),
            (m3 - m1 + 1, "zero", "one"),
        )
    if which == "K3":
        return (
            ("one", "zero", "zero"),
            ("zero", "one", "zero"),
            (m3 - m1 + 1, m3 - m2, "one"),
        )
    raise ValueError(f"no unipotent complement recorded for {which!r}")


def _sample_unipotent(p, rows, prec, seed, index, slot_base) -> IsoMatrix:
    out = []
    for i in range(3):
        row = []
        for j in range(3):
            spec = rows[i][j]
            if spec == "one":
                row.append(TruncatedSeries.one(p))
            elif spec == "zero":
                row.append(TruncatedSeries.zero(p))
            else:
                exps = np.arange(spec, prec, dtype=np.int64)
                raw = _raw_hash(seed, slot_base + 3 * i + j, _as_u64([index]).reshape(1, 1), _as_u64(exps).reshape(1, -1))[0]
                row.append(TruncatedSeries(p, spec, (raw % np.uint64(p)).astype(np.int64), prec))
        out.append(row)
    return IsoMatrix(out)


@dataclass
class KappaReport:
    """Sampled verification that (j, k) -> j^-1 k sigma(j) lands in xI,
    preserves slopes, and (for the first complement) can be inverted."""

    x: str
    which: str
    trials: int
    passes: int = 0
    identity_ok: int = 0
    inverse_passes: int = 0
    inverse_trials: int = 0
    unresolved: int = 0
    failures: list = field(default_factory=list)
    elapsed_ms: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures and self.unresolved <= max(1, self.trials) * MAX_UNRESOLVED_RATE

    def to_json(self) -> dict:
        return {
            "x": self.x,
            "which": self.which,
            "trials": self.trials,
            "passes": self.passes,
            "identity_ok": self.identity_ok,
            "inverse_passes": self.inverse_passes,
            "inverse_trials": self.inverse_trials,
            "unresolved": self.unresolved,
            "failures": self.failures[:10],
            "elapsed_ms": round(self.elapsed_ms, 3),
        }


def _matrix_text(A: IsoMatrix):
    return [[A[i, j].to_text() for j in range(3)] for i in range(3)]


def _same_matrix(A: IsoMatrix, B: IsoMatrix) -> bool:
    return all(A[i, j] == B[i, j] for i in range(3) for j in range(3))


def kappa_check(
    x: AffineWeylElt,
    which: str,
    trials: int = 1000,
    p: int = 11,
    seed: int = 0,
    prec: int = None,
) -> KappaReport:
    """Sampled check of the twisted-conjugation parametrization of xI.

    For j in the unipotent complement and k in the reduced pattern, the
    element j^-1 k sigma(j) must lie in the xI pattern with the same slope
    sequence as k.  For K1 the explicit inverse (d' = -f/c,
    h' = (bi - ch)/(ce - bf), g' = -((i + f h')/c)) is exercised as well:
    it must produce a complement element j with j A sigma(j)^-1 back in
    the reduced pattern.
    """
    kpat = coset_pattern(x, which)
    xpat = coset_pattern(x, "xI")
    jrows = _unipotent_rows(x, which)
    jmax = max(abs(s) for row in jrows for s in row if isinstance(s, int))
    base_prec = prec if prec is not None else 4 * max(kpat.max_abs_k(), jmax) + 8
    report = KappaReport(x=str(x), which=which, trials=trials)
    t0 = time.perf_counter()

    for t in range(trials):
        for attempt in range(MAX_RETRIES + 1):
            q = base_prec << attempt
            kcfg = SampleConfig(pattern=kpat, p=p, prec=q, trials=1, seed=seed)
            k = sample_pattern(kcfg, t)
            j = _sample_unipotent(p, jrows, q, seed, t, slot_base=9)
            try:
                kappa = j.inverse() @ k @ j.frobenius()
                good = xpat.contains(kappa) and slope_sequence(kappa) == slope_sequence(k)
            except InsufficientPrecision:
                continue
            if good:
                report.passes += 1
            elif len(report.failures) < 10:
                report.failures.append(
                    {"kind": "forward", "index": t, "k": _matrix_text(k), "j": _matrix_text(j)}
                )
            if t < 32:
                ident = IsoMatrix.identity(p)
                if _same_matrix(ident.inverse() @ k @ ident.frobenius(), k):
                    report.identity_ok += 1
                elif len(report.failures) < 10:
                    report.failures.append({"kind": "identity", "index": t})
            break
        else:
            report.unresolved += 1

    if which == "K1":
        inv_seed = seed ^ 0x5DEECE66D
        report.inverse_trials = trials
        for t in range(trials):
            for attempt in range(MAX_RETRIES + 1):
                q = base_prec << attempt
                acfg = SampleConfig(pattern=xpat, p=p, prec=q, trials=1, seed=inv_seed)
                A = sample_pattern(acfg, t)
                b, c, f = A[0, 1], A[0, 2], A[1, 2]
                e, h, i = A[1, 1], A[2, 1], A[2, 2]
                try:
                    c_inv = c.inverse()
                    d_p = -(f * c_inv)
                    h_p = (b * i - c * h) * (c * e - b * f).inverse()
                    g_p = -((i + f * h_p) * c_inv)
                    m1, m2, m3 = x.mu
                    j = IsoMatrix(
                        [
                            [TruncatedSeries.one(p), TruncatedSeries.zero(p), TruncatedSeries.zero(p)],
                            [d_p, TruncatedSeries.one(p), TruncatedSeries.zero(p)],
                            [g_p, h_p, TruncatedSeries.one(p)],
                        ]
                    )
                    good = (
                        d_p.in_P(m2 - m1)
                        and h_p.in_P(m3 - m2)
                        and g_p.in_P(m3 - m1)
                        and kpat.contains(j @ A @ j.frobenius().inverse())
                    )
                except InsufficientPrecision:
                    continue
                if good:
                    report.inverse_passes += 1
                elif len(report.failures) < 10:
                    report.failures.append({"kind": "inverse", "index": t, "A": _matrix_text(A)})
                break
            else:
                report.unresolved += 1

    report.elapsed_ms = (time.perf_counter() - t0) * 1e3
    return report


# -- closed-form predicate campaign -------------------------------------------------


def _subcase_tag(case: str, x: AffineWeylElt, lam: SlopeSeq) -> str:
    """Case tag refined by which branch of the closed-form test fires."""
    mu = x.mu
    if case in ("VIA", "IVA"):
        return case
    if case == "VA":
        return case + ("-i" if mu[1] + 1 == mu[2] else "-ii")
    threshold = {"IA": -mu[1] + 1, "IIA": -mu[1], "IIIA": -mu[1], "IIB": -mu[0]}[case]
    return case + ("-i" if lam.lam3 <= threshold else "-ii")


@dataclass
class CampaignReport:
    """Aggregate comparison of stratum_predicate against sampled slopes."""

    bound: int
    p: int
    trials_per_case: int
    cases: dict = field(default_factory=dict)  # tag -> stats dict
    mismatches: list = field(default_factory=list)
    trials_total: int = 0
    unresolved_total: int = 0
    elapsed_ms: float = 0.0

    @property
    def ok(self) -> bool:
        if any(st["mismatches"] for st in self.cases.values()):
            return False
        return self.unresolved_total <= max(1, self.trials_total) * MAX_UNRESOLVED_RATE

    def to_json(self) -> dict:
        return {
            "bound": self.bound,
            "p": self.p,
            "trials_per_case": self.trials_per_case,
            "cases": self.cases,
            "mismatches": self.mismatches[:20],
            "trials_total": self.trials_total,
            "unresolved_total": self.unresolved_total,
            "ok": self.ok,
            "elapsed_ms": round(self.elapsed_ms, 3),
        }


def predicate_campaign(
    bound: int = 4,
    trials_per_case: int = 1000,
    p: int = 11,
    seed: int = 0,
    cases=None,
    max_mismatches: int = 20,
) -> CampaignReport:
    """Compare every covered closed-form stratum test with sampled truth.

    For each grid element with a direct case, each slope in its described
    poset, and each sampled matrix from the case pattern, asserts
    stratum_predicate(x, lam, A) == slope_leq(slope_sequence(A), lam).
    Mismatching matrices are reported verbatim.
    """
    groups = {}
    for x in enumerate_grid(bound):
        try:
            case, pattern_name = predicate_case(x)
        except CaseNotApplicable:
            continue
        if cases is not None and case not in cases:
            continue
        pat = coset_pattern(x, pattern_name)
        for lam in predicate_poset(x).elements:
            tag = _subcase_tag(case, x, lam)
            groups.setdefault(tag, []).append((x, lam, pat))

    report = CampaignReport(bound=bound, p=p, trials_per_case=trials_per_case)
    t0 = time.perf_counter()
    for tag in sorted(groups):
        pairs = groups[tag]
        share = max(1, trials_per_case // len(pairs))
        stats = {"pairs": len(pairs), "trials": 0, "mismatches": 0, "unresolved": 0}
        for x, lam, pat in pairs:
            base_prec = 4 * pat.max_abs_k() + 8
            for rep in range(share):
                stats["trials"] += 1
                for attempt in range(MAX_RETRIES + 1):
                    cfg = SampleConfig(pattern=pat, p=p, prec=base_prec << attempt, trials=1, seed=seed)
                    A = sample_pattern(cfg, rep)
                    try:
                        predicted = stratum_predicate(x, lam, A)
                        actual = slope_leq(slope_sequence(A), lam)
                    except InsufficientPrecision:
                        continue
                    if predicted != actual:
                        stats["mismatches"] += 1
                        if len(report.mismatches) < max_mismatches:
                            report.mismatches.append(
                                {
                                    "x": str(x), "lam": str(lam), "index": rep,
                                    "predicate": predicted, "sampled": str(actual),
                                    "matrix": _matrix_text(A),
                                }
                            )
                    break
                else:
                    stats["unresolved"] += 1
        report.cases[tag] = stats
        report.trials_total += stats["trials"]
        report.unresolved_total += stats["unresolved"]
    report.elapsed_ms = (time.perf_counter() - t0) * 1e3
    return report
