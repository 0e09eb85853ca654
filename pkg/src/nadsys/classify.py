"""System-level classification over finite grids of open sets.

"For all non-empty open U, V" is replaced by all ordered pairs of dyadic
cells at a fixed depth. Negative verdicts are absolute (one certified pair
refutes the property for the real system); positive ones are relative to the
grid and horizon and are labelled as such.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import lcm
from typing import Iterable, Optional, Sequence

from .family import (
    DEFAULT_DENSITY_THRESHOLD,
    Decision,
    Family,
    FamilyLike,
    member,
    upper_density,
)
from .ndsys import (
    CertificateKind,
    Cycle,
    HitSetReport,
    MapSequence,
    OrbitCache,
    TailCertificate,
    constant_system,
    hit_set,
    orbit_images,
    shift_system,
)
from .plmap import (
    Interval,
    IntervalSet,
    PLMap,
    as_rational,
    compose,
    sup_distance,
)

__all__ = [
    "ClassificationReport",
    "FiniteSubset",
    "OpenSetGrid",
    "PairResult",
    "PreconditionError",
    "Verdict",
    "VietorisOpen",
    "check_finite_family_prop",
    "check_shift_relation",
    "check_uniform_limit",
    "classify_ergodic",
    "classify_mixing",
    "classify_transitive",
    "hyper_hit",
    "product_hit_set",
]


class PreconditionError(ValueError):
    """An instance checker's hypothesis does not hold for the given input."""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class OpenSetGrid:
    """All dyadic open cells ``(i/2^d, (i+1)/2^d)`` at depth ``d``."""

    depth: int

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("grid depth must be >= 1")

    def cells(self) -> list[IntervalSet]:
        n = 2 ** self.depth
        return [IntervalSet.open(Fraction(i, n), Fraction(i + 1, n)) for i in range(n)]


class Verdict(enum.Enum):
    PROVEN_NO = "ProvenNo"
    SUPPORTED_YES = "SupportedYes"
    CERTIFIED_YES = "CertifiedYes"
    INCONCLUSIVE = "Inconclusive"

    @property
    def positive(self) -> bool:
        return self in (Verdict.SUPPORTED_YES, Verdict.CERTIFIED_YES)


@dataclass(frozen=True)
class PairResult:
    U: tuple[IntervalSet, ...]
    V: tuple[IntervalSet, ...]
    decision: Decision
    hit_count: int
    certificate: CertificateKind
    evidence: dict = field(default_factory=dict, compare=False)


@dataclass
class ClassificationReport:
    property: str
    verdict: Verdict
    depth: int
    horizon: int
    pairs: list[PairResult]
    witness: Optional[PairResult] = None
    witness_report: Optional[HitSetReport] = None
    evidence: dict = field(default_factory=dict)

    @property
    def refuting_pairs(self) -> list[PairResult]:
        return [p for p in self.pairs if p.decision is Decision.NO_CERTIFIED]

    @property
    def all_pairs_hit(self) -> bool:
        return all(p.hit_count > 0 for p in self.pairs)


def _summarize(prop, results, reports, grid, horizon, evidence=None) -> ClassificationReport:
    decisions = [r.decision for r in results]
    witness = witness_report = None
    if Decision.NO_CERTIFIED in decisions:
        i = decisions.index(Decision.NO_CERTIFIED)
        verdict, witness, witness_report = Verdict.PROVEN_NO, results[i], reports[i]
    elif all(d is Decision.YES_CERTIFIED for d in decisions):
        verdict = Verdict.CERTIFIED_YES
    elif all(d.is_yes for d in decisions):
        verdict = Verdict.SUPPORTED_YES
    else:
        verdict = Verdict.INCONCLUSIVE
    return ClassificationReport(prop, verdict, grid.depth, horizon, results, witness,
                                witness_report, evidence or {})


def _fam_name(fam: FamilyLike) -> str:
    return fam.value if isinstance(fam, Family) else fam.name


def classify_transitive(
    seq: MapSequence,
    fam: FamilyLike,
    grid: OpenSetGrid,
    horizon: int,
    density_threshold: Fraction = DEFAULT_DENSITY_THRESHOLD,
) -> ClassificationReport:
    """F-transitivity over all ordered grid pairs, in lexicographic order."""
    cache = OrbitCache(seq)
    cells = grid.cells()
    results, reports = [], []
    for U, V in product(cells, cells):
        rep = cache.report(U, V, horizon)
        v = member(rep, fam, density_threshold)
        results.append(PairResult((U,), (V,), v.decision, len(rep.hits),
                                  rep.certificate.kind, v.evidence))
        reports.append(rep)
    return _summarize(f"transitive[{_fam_name(fam)}]", results, reports, grid, horizon)


def _combine(c1: TailCertificate, c2: TailCertificate) -> TailCertificate:
    empties = [c for c in (c1, c2) if c.is_empty]
    if empties:
        first = min(empties, key=lambda c: c.base_index)
        return TailCertificate(CertificateKind.EVENTUALLY_EMPTY, first.base_index,
                               first.period, method="product")
    if c1.is_full and c2.is_full:
        return TailCertificate(CertificateKind.EVENTUALLY_FULL,
                               max(c1.base_index, c2.base_index),
                               lcm(c1.period, c2.period), method="product")
    return TailCertificate.unknown()


def _product_report(r1: HitSetReport, r2: HitSetReport) -> HitSetReport:
    common = tuple(sorted(set(r1.hits) & set(r2.hits)))
    return HitSetReport(common, r1.horizon, _combine(r1.certificate, r2.certificate))


def product_hit_set(
    seq: MapSequence,
    U1: IntervalSet,
    V1: IntervalSet,
    U2: IntervalSet,
    V2: IntervalSet,
    horizon: int,
) -> HitSetReport:
    """Hit set of the rectangle pair ``(U1×U2, V1×V2)`` under ``f_{1,∞}×f_{1,∞}``.

    Images of rectangles are rectangles, so the hit set is the intersection
    of the two coordinate hit sets.
    """
    r1 = hit_set(seq, U1, V1, horizon)
    r2 = hit_set(seq, U2, V2, horizon)
    return _product_report(r1, r2)


def classify_mixing(
    seq: MapSequence,
    fam: FamilyLike,
    grid: OpenSetGrid,
    horizon: int,
    density_threshold: Fraction = DEFAULT_DENSITY_THRESHOLD,
) -> ClassificationReport:
    """F-mixing: F-transitivity of the product over rectangles of grid cells."""
    cache = OrbitCache(seq)
    cells = grid.cells()
    results, reports = [], []
    for U1, U2, V1, V2 in product(cells, repeat=4):
        rep = _product_report(cache.report(U1, V1, horizon), cache.report(U2, V2, horizon))
        v = member(rep, fam, density_threshold)
        results.append(PairResult((U1, U2), (V1, V2), v.decision, len(rep.hits),
                                  rep.certificate.kind, v.evidence))
        reports.append(rep)
    return _summarize(f"mixing[{_fam_name(fam)}]", results, reports, grid, horizon)


def classify_ergodic(
    seq: MapSequence,
    grid: OpenSetGrid,
    horizon: int,
    density_threshold: Fraction = DEFAULT_DENSITY_THRESHOLD,
) -> ClassificationReport:
    """Topological ergodicity: every grid pair has positive upper density."""
    cache = OrbitCache(seq)
    cells = grid.cells()
    results, reports = [], []
    estimates = []
    for U, V in product(cells, cells):
        rep = cache.report(U, V, horizon)
        v = member(rep, Family.POSITIVE_UPPER_DENSITY, density_threshold)
        ud = upper_density(rep)
        estimates.append(ud.estimate)
        ev = dict(v.evidence, estimate=ud.estimate, exact=ud.exact)
        results.append(PairResult((U,), (V,), v.decision, len(rep.hits),
                                  rep.certificate.kind, ev))
        reports.append(rep)
    return _summarize("ergodic", results, reports, grid, horizon,
                      {"min_estimate": min(estimates)})


# --------------------------------------------------------------------------
# Hyperspace of finite subsets
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteSubset:
    points: tuple[Fraction, ...]

    def __init__(self, points: Iterable):
        pts = tuple(sorted(set(as_rational(p) for p in points)))
        if not pts:
            raise ValueError("a finite subset must be non-empty")
        if pts[0] < 0 or pts[-1] > 1:
            raise ValueError("points must lie in [0,1]")
        object.__setattr__(self, "points", pts)

    def image(self, seq: MapSequence, n: int) -> "FiniteSubset":
        """``f̄_1^n(K)``: the pointwise image under the first n maps."""
        pts = self.points
        for i in range(1, n + 1):
            f = seq[i]
            pts = [f(x) for x in pts]
        return FiniteSubset(pts)


@dataclass(frozen=True)
class VietorisOpen:
    """Basic Vietoris open set ``<U_1, ..., U_k>``."""

    parts: tuple[IntervalSet, ...]

    def __init__(self, parts: Sequence[IntervalSet]):
        parts = tuple(parts)
        if not parts or any(p.is_empty for p in parts):
            raise ValueError("Vietoris parts must be non-empty sets")
        object.__setattr__(self, "parts", parts)

    def __contains__(self, K: FiniteSubset) -> bool:
        pts = K.points
        if not all(any(x in U for U in self.parts) for x in pts):
            return False
        return all(any(x in U for x in pts) for U in self.parts)


def hyper_hit(seq: MapSequence, K: FiniteSubset, n: int, V: VietorisOpen) -> bool:
    """Whether the induced map ``f̄_1^n`` sends K into the Vietoris set V."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return K.image(seq, n) in V


# --------------------------------------------------------------------------
# Instance checkers for the uniform-limit, shift and finite-family results
# --------------------------------------------------------------------------


@dataclass
class UniformLimitReport:
    distance_sum: Fraction
    distances: list[Fraction]
    prefix_violations: list[tuple]
    shifted_violations: list[tuple]
    fixed_index_violations: list[tuple]
    checked_points: int
    seq_verdict: Optional[Verdict] = None
    limit_verdict: Optional[Verdict] = None

    @property
    def bounds_hold(self) -> bool:
        return not (self.prefix_violations or self.shifted_violations)

    @property
    def classifications_agree(self) -> Optional[bool]:
        if self.seq_verdict is None:
            return None
        return self.seq_verdict == self.limit_verdict


def _orbit_point(seq: MapSequence, x: Fraction, start: int, steps: int) -> Fraction:
    for i in range(start, start + steps):
        x = seq[i](x)
    return x


def check_uniform_limit(
    seq: MapSequence,
    f: PLMap,
    x_grid: Iterable,
    k_max: int,
    grid: Optional[OpenSetGrid] = None,
    horizon: Optional[int] = None,
    fam: FamilyLike = Family.INFINITE,
    n_max: Optional[int] = None,
) -> UniformLimitReport:
    """Check the uniform-limit hypotheses and distance bounds on one instance.

    Requires every ``f_i`` to commute with ``f`` and the sequence to be
    eventually constant at ``f``, so that ``Σ D(f_i, f)`` is a finite sum.
    Checks, for grid points x and ``k <= k_max``::

        d(f_1^k(x), f^k(x))               <= Σ_{i=1..k} D(f_i, f)
        d(f_1^{n+k}(x), f^k(f_1^n(x)))    <= Σ_{i=1..k} D(f_{n+i}, f)

    for ``n`` in ``1..n_max``. The second bound with ``D(f_{i+1}, f)`` is the
    ``n = 1`` case; violations of that fixed-index form at other ``n`` are
    recorded separately in ``fixed_index_violations`` and do not fail the
    check.
    """
    if seq.period != 1 or seq[seq.preperiod] != f:
        raise PreconditionError("sequence is not eventually constant at f")
    for i, fi in enumerate(seq.maps(), start=1):
        if compose(fi, f) != compose(f, fi):
            raise PreconditionError(f"f_{i} does not commute with f", index=i)
    xs = [as_rational(x) for x in x_grid]
    pre = seq.preperiod
    n_max = pre + 1 if n_max is None else n_max
    last = k_max + n_max + 1
    dists = [sup_distance(seq[i], f) for i in range(1, max(last, pre) + 1)]

    def D(i):  # 1-based, zero past the prefix
        return dists[i - 1] if i <= len(dists) else Fraction(0)

    prop, cor, printed = [], [], []
    for x in xs:
        a, b = x, x
        total = Fraction(0)
        for k in range(1, k_max + 1):
            a, b = seq[k](a), f(b)
            total += D(k)
            if abs(a - b) > total:
                prop.append((x, k, abs(a - b), total))
        for n in range(1, n_max + 1):
            y = _orbit_point(seq, x, 1, n)
            a, b = y, y
            shifted = printed_sum = Fraction(0)
            for k in range(1, k_max + 1):
                a, b = seq[n + k](a), f(b)
                shifted += D(n + k)
                printed_sum += D(k + 1)
                d = abs(a - b)
                if d > shifted:
                    cor.append((x, n, k, d, shifted))
                if d > printed_sum:
                    printed.append((x, n, k, d, printed_sum))
    report = UniformLimitReport(sum(dists[: pre - 1], Fraction(0)), dists[: pre - 1],
                         prop, cor, printed, len(xs))
    if grid is not None and horizon is not None:
        report.seq_verdict = classify_transitive(seq, fam, grid, horizon).verdict
        report.limit_verdict = classify_transitive(constant_system(f), fam, grid, horizon).verdict
    return report


@dataclass
class ShiftRelationReport:
    status: str  # "ok", "violation" or "hypothesis-failure"
    k: int
    U_star: IntervalSet
    shifted_hits: tuple[int, ...] = ()
    hits: tuple[int, ...] = ()
    violations: list[int] = field(default_factory=list)


def check_shift_relation(
    seq: MapSequence, U: IntervalSet, V: IntervalSet, k: int, horizon: int
) -> ShiftRelationReport:
    """Compare hit sets of ``f_{k,∞}`` on ``(U*, V)`` and of ``f_{1,∞}`` on ``(U, V)``.

    ``U*`` is the interior of ``f_1^{k-1}(U)``. Since ``f_k^m(U*)`` lies inside
    ``f_1^{m+k-1}(U)``, every shifted hit ``m`` must reappear as the hit
    ``m + k - 1`` of the original system; any exception is reported.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    A = U if k == 1 else orbit_images(seq, U, k - 1)[-1]
    U_star = A.interior()
    if U_star.is_empty:
        return ShiftRelationReport("hypothesis-failure", k, U_star)
    shifted = shift_system(seq, k)
    limit = horizon - (k - 1)
    sh = hit_set(shifted, U_star, V, limit).hits if limit >= 1 else ()
    base = hit_set(seq, U, V, horizon).hits
    base_set = set(base)
    bad = [m for m in sh if m + k - 1 not in base_set]
    return ShiftRelationReport("violation" if bad else "ok", k, U_star, sh, base, bad)


@dataclass
class FiniteFamilyReport:
    property: str
    composition: PLMap
    composition_verdict: Verdict
    cycle_verdict: Verdict
    index_violations: list[tuple] = field(default_factory=list)

    @property
    def implication_holds(self) -> bool:
        return not self.composition_verdict.positive or self.cycle_verdict.positive


def check_finite_family_prop(
    seq: Cycle,
    grid: OpenSetGrid,
    horizon: int,
    prop: str = "transitive",
    fam: FamilyLike = Family.INFINITE,
) -> FiniteFamilyReport:
    """Classify ``F = f_k∘...∘f_1`` and the cycle system, and check ``N_F·k ⊆ N_seq``.

    ``prop`` is one of ``"transitive"``, ``"mixing"`` or ``"ergodic"``.
    """
    if not isinstance(seq, Cycle):
        raise TypeError("finite-family check needs a Cycle system")
    k = len(seq.maps_)
    F = seq.maps_[0]
    for g in seq.maps_[1:]:
        F = compose(g, F)
    comp = constant_system(F)

    def run(s, h):
        if prop == "transitive":
            return classify_transitive(s, fam, grid, h)
        if prop == "mixing":
            return classify_mixing(s, fam, grid, h)
        if prop == "ergodic":
            return classify_ergodic(s, grid, h)
        raise ValueError(f"unknown property {prop!r}")

    comp_report = run(comp, horizon)
    cycle_report = run(seq, horizon)

    violations = []
    comp_cache, cyc_cache = OrbitCache(comp), OrbitCache(seq)
    cells = grid.cells()
    for U, V in product(cells, cells):
        nf = comp_cache.report(U, V, horizon).hits
        ns = set(cyc_cache.report(U, V, horizon).hits)
        violations.extend((U, V, n) for n in nf if n * k <= horizon and n * k not in ns)
    return FiniteFamilyReport(prop, F, comp_report.verdict, cycle_report.verdict, violations)
