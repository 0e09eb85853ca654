"""Furstenberg-family membership for hit sets.

A hit set is only ever known up to a horizon, so a verdict is either
certified (the tail certificate forces the answer for the infinite set) or
horizon-limited, in which case it carries the numbers it was based on.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple, Optional, Union

from .ndsys import CertificateKind, HitSetReport, TailCertificate

__all__ = [
    "Decision",
    "Family",
    "CustomFamily",
    "FamilyVerdict",
    "UpperDensity",
    "DEFAULT_DENSITY_THRESHOLD",
    "dual_check",
    "member",
    "prefix_densities",
    "translate",
    "upper_density",
]

DEFAULT_DENSITY_THRESHOLD = Fraction(1, 100)


class Family(enum.Enum):
    INFINITE = "infinite"
    COFINITE = "cofinite"
    SYNDETIC = "syndetic"
    THICK = "thick"
    POSITIVE_UPPER_DENSITY = "density"

    @property
    def translation_invariant(self) -> bool:
        return self in (Family.INFINITE, Family.COFINITE, Family.SYNDETIC, Family.THICK,
                        Family.POSITIVE_UPPER_DENSITY)

    @property
    def filterdual(self) -> bool:
        # kF·kF ⊆ kF: the dual of the infinite sets is the cofinite filter;
        # the other duals (infinite, thick, syndetic) are not closed under ∩
        return self is Family.INFINITE

    @property
    def dual(self) -> "Family":
        if self is Family.INFINITE:
            return Family.COFINITE
        if self is Family.COFINITE:
            return Family.INFINITE
        raise NotImplementedError(f"dual of {self.value} is not supported")

    @classmethod
    def parse(cls, name: str) -> "Family":
        aliases = {"pud": cls.POSITIVE_UPPER_DENSITY, "positive-upper-density":
                   cls.POSITIVE_UPPER_DENSITY, "ergodic": cls.POSITIVE_UPPER_DENSITY}
        key = name.strip().lower()
        if key in aliases:
            return aliases[key]
        return cls(key)


class Decision(enum.Enum):
    YES_CERTIFIED = "YesCertified"
    NO_CERTIFIED = "NoCertified"
    YES_AT_HORIZON = "YesAtHorizon"
    NO_AT_HORIZON = "NoAtHorizon"
    INCONCLUSIVE = "Inconclusive"

    @property
    def is_yes(self) -> bool:
        return self in (Decision.YES_CERTIFIED, Decision.YES_AT_HORIZON)

    @property
    def certified(self) -> bool:
        return self in (Decision.YES_CERTIFIED, Decision.NO_CERTIFIED)


@dataclass(frozen=True)
class FamilyVerdict:
    decision: Decision
    family: str
    evidence: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class CustomFamily:
    """A user family: a prefix rule for horizon verdicts and a certificate rule.

    ``prefix_predicate(hits, horizon)`` returns a (Decision, evidence) pair and
    must only use horizon-level decisions. ``certificate_handler(cert, hits)``
    returns a certified Decision or None; the library never infers tails for
    custom families on its own.
    """

    name: str
    prefix_predicate: Callable[[tuple, int], tuple]
    certificate_handler: Callable[[TailCertificate, tuple], Optional[Decision]] = (
        lambda cert, hits: None
    )


FamilyLike = Union[Family, CustomFamily]


def _gaps(hits: tuple[int, ...], horizon: int) -> int:
    """Largest gap between consecutive elements of {0} ∪ hits ∪ {horizon+1}."""
    prev, worst = 0, 0
    for n in hits:
        worst = max(worst, n - prev)
        prev = n
    return max(worst, horizon + 1 - prev)


def _longest_run(hits: tuple[int, ...]) -> int:
    best = run = 0
    prev = None
    for n in hits:
        run = run + 1 if prev is not None and n == prev + 1 else 1
        best = max(best, run)
        prev = n
    return best


def _first_miss(hits: tuple[int, ...], horizon: int) -> Optional[int]:
    for i, n in enumerate(hits, start=1):
        if n != i:
            return i
    return len(hits) + 1 if len(hits) < horizon else None


def prefix_densities(report: HitSetReport) -> list[Fraction]:
    """``|hits ∩ [1, n]| / n`` for n = 1..horizon."""
    out, count = [], 0
    hs = set(report.hits)
    for n in range(1, report.horizon + 1):
        count += n in hs
        out.append(Fraction(count, n))
    return out


class UpperDensity(NamedTuple):
    estimate: Fraction
    exact: Optional[Fraction]
    final: Fraction


def upper_density(report: HitSetReport) -> UpperDensity:
    """Prefix-maximum density proxy, plus the exact value when certified.

    ``final`` is the density of the whole prefix ``[1, horizon]``; unlike the
    running maximum it converges to the exact value for certified reports.
    """
    dens = prefix_densities(report)
    cert = report.certificate
    exact = None
    if cert.is_empty:
        exact = Fraction(0)
    elif cert.is_full:
        exact = Fraction(1)
    return UpperDensity(max(dens), exact, dens[-1])


def translate(hits: Iterable[int], i: int) -> set[int]:
    """``{n + i : n ∈ hits, n + i >= 1}``."""
    return {n + i for n in hits if n + i >= 1}


def _horizon_verdict(report: HitSetReport, fam: Family, threshold: Fraction):
    hits, h = report.hits, report.horizon
    half = (h + 1) // 2
    if fam is Family.INFINITE:
        ev = {"count": len(hits), "last_hit": hits[-1] if hits else None}
        if not hits:
            return Decision.NO_AT_HORIZON, ev
        return (Decision.YES_AT_HORIZON if hits[-1] > half else Decision.INCONCLUSIVE), ev
    if fam is Family.COFINITE:
        first = _first_miss(hits, h)
        hs = set(hits)
        last_miss = next((n for n in range(h, 0, -1) if n not in hs), None)
        ev = {"first_miss": first, "last_miss": last_miss}
        if last_miss is None or last_miss <= half:
            return Decision.YES_AT_HORIZON, ev
        return Decision.INCONCLUSIVE, ev
    if fam is Family.SYNDETIC:
        gap = _gaps(hits, h)
        ev = {"max_gap": gap}
        ok = bool(hits) and gap <= max(1, h // 4)
        return (Decision.YES_AT_HORIZON if ok else Decision.NO_AT_HORIZON), ev
    if fam is Family.THICK:
        run = _longest_run(hits)
        ev = {"longest_run": run}
        ok = run >= max(2, h // 4)
        return (Decision.YES_AT_HORIZON if ok else Decision.NO_AT_HORIZON), ev
    if fam is Family.POSITIVE_UPPER_DENSITY:
        dens = prefix_densities(report)
        tail = dens[half - 1:] if half >= 1 else dens
        lo = min(tail)
        ev = {"estimate": max(dens), "last_half_min": lo, "final": dens[-1],
              "threshold": threshold}
        return (Decision.YES_AT_HORIZON if lo > threshold else Decision.NO_AT_HORIZON), ev
    raise TypeError(f"unknown family {fam!r}")


def member(
    report: HitSetReport,
    fam: FamilyLike,
    density_threshold: Fraction = DEFAULT_DENSITY_THRESHOLD,
) -> FamilyVerdict:
    """Decide whether the hit set in ``report`` belongs to ``fam``.

    An EventuallyEmpty certificate means the hit set is finite, which rules
    out every built-in family. EventuallyFull(n, p) means the hit set contains
    ``[n, ∞)``, which puts it in every built-in family. Anything else gets a
    horizon verdict with evidence:

    * infinite: yes if some hit lies in the second half of the horizon
    * cofinite: yes if the second half has no misses; never refuted
    * syndetic: yes if the largest gap is at most horizon/4
    * thick: yes if the longest run is at least horizon/4
    * density: yes if every prefix density over the second half exceeds
      ``density_threshold``
    """
    if isinstance(fam, CustomFamily):
        dec = fam.certificate_handler(report.certificate, report.hits)
        if dec is not None:
            return FamilyVerdict(dec, fam.name, {"certificate": report.certificate.kind.value})
        dec, ev = fam.prefix_predicate(report.hits, report.horizon)
        if dec.certified:
            raise ValueError("custom prefix predicates may not emit certified decisions")
        return FamilyVerdict(dec, fam.name, ev)

    cert = report.certificate
    if cert.kind is CertificateKind.EVENTUALLY_EMPTY:
        return FamilyVerdict(
            Decision.NO_CERTIFIED, fam.value,
            {"finite": True, "base_index": cert.base_index, "count": len(report.hits)},
        )
    if cert.kind is CertificateKind.EVENTUALLY_FULL:
        n = cert.base_index
        prefix = tuple(m for m in report.hits if m < n)
        ev = {"contains_from": n}
        if fam is Family.SYNDETIC:
            prev, gap = 0, 0
            for m in prefix + (n,):
                gap, prev = max(gap, m - prev), m
            ev["gap_bound"] = gap
        elif fam is Family.COFINITE:
            ev["first_miss"] = _first_miss(report.hits, report.horizon)
        return FamilyVerdict(Decision.YES_CERTIFIED, fam.value, ev)
    dec, ev = _horizon_verdict(report, fam, density_threshold)
    return FamilyVerdict(dec, fam.value, ev)


def dual_check(fam: Family, report: HitSetReport) -> FamilyVerdict:
    """Membership of the hit set in the dual family kF (infinite ↔ cofinite only)."""
    if not isinstance(fam, Family) or fam not in (Family.INFINITE, Family.COFINITE):
        raise NotImplementedError(
            f"dual membership is only decidable for infinite/cofinite, not {fam!r}"
        )
    return member(report, fam.dual)
