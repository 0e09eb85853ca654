"""Non-autonomous map sequences, orbits of sets, and hit sets.

A system is a sequence ``f_1, f_2, ...`` of PL maps. The ``n``-step action is
``f_1^n = f_n ∘ ... ∘ f_1`` and the hit set of a pair ``(U, V)`` is the set
of ``n >= 1`` with ``f_1^n(U) ∩ V`` non-empty. All supported sequences are
eventually periodic, which is what makes finite tail certificates possible.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .plmap import (
    Interval,
    IntervalSet,
    PLMap,
    compose,
    identity,
    image,
)

__all__ = [
    "Cycle",
    "EventuallyConstant",
    "Explicit",
    "MapSequence",
    "CertificateKind",
    "TailCertificate",
    "HitSetReport",
    "NodeCapExceeded",
    "certify_tail",
    "compose_prefix",
    "constant_system",
    "hit_set",
    "orbit_images",
    "resolve",
    "shift_system",
]

NODE_CAP_ENV = "NADSYS_COMPOSE_NODE_CAP"
DEFAULT_NODE_CAP = 100_000
DEFAULT_SEARCH_BOUND = 64


class NodeCapExceeded(OverflowError):
    """compose_prefix would produce more nodes than the configured cap."""


# --------------------------------------------------------------------------
# Map sequences
# --------------------------------------------------------------------------


class MapSequence:
    """Base for eventually periodic sequences of maps (1-based indices).

    Subclasses expose ``preperiod`` (first index from which the sequence is
    periodic) and ``period``; ``f_{n+period} == f_n`` for all n >= preperiod.
    """

    preperiod: int
    period: int

    def __getitem__(self, n: int) -> PLMap:
        raise NotImplementedError

    def phase(self, n: int):
        """Hashable tag such that equal tags mean equal tails from index n."""
        if n < self.preperiod:
            return ("pre", n)
        return ("cyc", (n - self.preperiod) % self.period)

    def maps(self) -> tuple[PLMap, ...]:
        """All distinct positions: prefix maps followed by one period."""
        return tuple(self[n] for n in range(1, self.preperiod + self.period))


@dataclass(frozen=True)
class Cycle(MapSequence):
    """``f_n = maps[(n - 1) mod k]``: the system generated by a finite family."""

    maps_: tuple[PLMap, ...]

    def __init__(self, maps: Sequence[PLMap]):
        maps = tuple(maps)
        if not maps:
            raise ValueError("Cycle needs at least one map")
        object.__setattr__(self, "maps_", maps)

    preperiod = 1

    @property
    def period(self) -> int:
        return len(self.maps_)

    def __getitem__(self, n: int) -> PLMap:
        if n < 1:
            raise IndexError("map indices start at 1")
        return self.maps_[(n - 1) % len(self.maps_)]


@dataclass(frozen=True)
class EventuallyConstant(MapSequence):
    """``f_n = prefix[n-1]`` for ``n <= len(prefix)``, then ``tail`` forever."""

    prefix: tuple[PLMap, ...]
    tail: PLMap

    def __init__(self, prefix: Sequence[PLMap], tail: PLMap):
        object.__setattr__(self, "prefix", tuple(prefix))
        object.__setattr__(self, "tail", tail)

    period = 1

    @property
    def preperiod(self) -> int:
        return len(self.prefix) + 1

    def __getitem__(self, n: int) -> PLMap:
        if n < 1:
            raise IndexError("map indices start at 1")
        return self.prefix[n - 1] if n <= len(self.prefix) else self.tail


@dataclass(frozen=True)
class Explicit(MapSequence):
    """A finite prefix followed by another rule (Cycle or EventuallyConstant)."""

    prefix: tuple[PLMap, ...]
    tail_rule: Union[Cycle, EventuallyConstant]

    def __init__(self, prefix: Sequence[PLMap], tail_rule):
        if not isinstance(tail_rule, (Cycle, EventuallyConstant)):
            raise TypeError("tail_rule must be a Cycle or EventuallyConstant")
        object.__setattr__(self, "prefix", tuple(prefix))
        object.__setattr__(self, "tail_rule", tail_rule)

    @property
    def preperiod(self) -> int:
        return len(self.prefix) + self.tail_rule.preperiod

    @property
    def period(self) -> int:
        return self.tail_rule.period

    def __getitem__(self, n: int) -> PLMap:
        if n < 1:
            raise IndexError("map indices start at 1")
        if n <= len(self.prefix):
            return self.prefix[n - 1]
        return self.tail_rule[n - len(self.prefix)]


def constant_system(f: PLMap) -> EventuallyConstant:
    """The autonomous system generated by ``f``."""
    return EventuallyConstant((), f)


def resolve(seq: MapSequence, n: int) -> PLMap:
    """The map ``f_n`` (n >= 1)."""
    return seq[n]


def shift_system(seq: MapSequence, k: int) -> MapSequence:
    """The system ``f_{k,∞}`` whose n-th map is ``f_{n+k-1}``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    drop = k - 1
    if drop == 0:
        return seq
    if isinstance(seq, Cycle):
        r = drop % len(seq.maps_)
        return Cycle(seq.maps_[r:] + seq.maps_[:r])
    if isinstance(seq, EventuallyConstant):
        return EventuallyConstant(seq.prefix[drop:], seq.tail)
    if isinstance(seq, Explicit):
        if drop < len(seq.prefix):
            return Explicit(seq.prefix[drop:], seq.tail_rule)
        return shift_system(seq.tail_rule, drop - len(seq.prefix) + 1)
    raise TypeError(f"unsupported sequence {type(seq).__name__}")


def _node_cap() -> int:
    raw = os.environ.get(NODE_CAP_ENV)
    return int(raw) if raw else DEFAULT_NODE_CAP


def compose_prefix(seq: MapSequence, n: int, node_cap: Optional[int] = None) -> PLMap:
    """Exact ``f_n ∘ ... ∘ f_1`` (identity for n = 0).

    Node counts can grow geometrically with n; this is a cross-check tool for
    small n. Raises NodeCapExceeded rather than truncating.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    cap = _node_cap() if node_cap is None else node_cap
    acc = identity()
    for i in range(1, n + 1):
        acc = compose(seq[i], acc)
        if len(acc.nodes) > cap:
            raise NodeCapExceeded(
                f"f_1^{i} has {len(acc.nodes)} nodes, over the cap of {cap} "
                f"(set {NODE_CAP_ENV} to raise it)"
            )
    return acc


# --------------------------------------------------------------------------
# Orbits
# --------------------------------------------------------------------------


@dataclass
class _Orbit:
    """Images ``A_0 = U, A_1, ...`` with exact cycle detection.

    When ``A_{s+p} == A_s`` at matching sequence phase, every later image
    repeats, so ``at(n)`` answers for arbitrarily large n without iterating.
    """

    seq: MapSequence
    sets: list = field(default_factory=list)
    cycle: Optional[tuple[int, int]] = None  # (start, period) in image indices
    _seen: dict = field(default_factory=dict)

    @classmethod
    def start(cls, seq: MapSequence, U: IntervalSet) -> "_Orbit":
        orb = cls(seq, [U])
        orb._seen[(U, seq.phase(1))] = 0
        return orb

    def extend(self, n: int) -> None:
        while self.cycle is None and len(self.sets) <= n:
            k = len(self.sets)
            nxt = image(self.seq[k], self.sets[-1])
            self.sets.append(nxt)
            key = (nxt, self.seq.phase(k + 1))
            if key in self._seen:
                s = self._seen[key]
                self.cycle = (s, k - s)
            else:
                self._seen[key] = k

    def at(self, n: int) -> IntervalSet:
        self.extend(n)
        if n < len(self.sets):
            return self.sets[n]
        s, p = self.cycle
        return self.sets[s + (n - s) % p]


def orbit_images(seq: MapSequence, U: IntervalSet, horizon: int) -> list[IntervalSet]:
    """``[A_1, ..., A_horizon]`` with ``A_n = f_n(A_{n-1})`` and ``A_0 = U``."""
    if U.is_empty:
        raise ValueError("U must be non-empty")
    orb = _Orbit.start(seq, U)
    return [orb.at(n) for n in range(1, horizon + 1)]


# --------------------------------------------------------------------------
# Certificates and hit sets
# --------------------------------------------------------------------------


class CertificateKind(enum.Enum):
    EVENTUALLY_EMPTY = "EventuallyEmpty"
    EVENTUALLY_FULL = "EventuallyFull"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class TailCertificate:
    """Finite witness for the tail of a hit set.

    ``witness`` holds the window of sets ``T_0..T_{p-1}`` that the orbit is
    trapped in (``nesting == "subset"``, for EventuallyEmpty) or that it
    dominates (``nesting == "superset"``, for EventuallyFull). ``method`` is
    ``"nesting"`` when the window is the orbit itself, ``"trap"`` when it is a
    widened forward-invariant hull, and ``"product"`` when it combines the two
    coordinate certificates of a rectangle pair (no witness is kept then).
    """

    kind: CertificateKind
    base_index: Optional[int] = None
    period: Optional[int] = None
    witness: tuple[IntervalSet, ...] = ()
    nesting: Optional[str] = None
    method: Optional[str] = None

    @classmethod
    def unknown(cls) -> "TailCertificate":
        return cls(CertificateKind.UNKNOWN)

    @property
    def is_empty(self) -> bool:
        return self.kind is CertificateKind.EVENTUALLY_EMPTY

    @property
    def is_full(self) -> bool:
        return self.kind is CertificateKind.EVENTUALLY_FULL


@dataclass(frozen=True)
class HitSetReport:
    hits: tuple[int, ...]
    horizon: int
    certificate: TailCertificate
    U: Optional[IntervalSet] = None
    V: Optional[IntervalSet] = None
    seq: Optional[MapSequence] = field(default=None, compare=False, repr=False)

    def __contains__(self, n: int) -> bool:
        return n in self._hitset

    @property
    def _hitset(self) -> frozenset:
        cached = self.__dict__.get("_hs")
        if cached is None:
            cached = frozenset(self.hits)
            object.__setattr__(self, "_hs", cached)
        return cached

    def flags(self) -> list[bool]:
        """``flags()[n-1]`` is True iff n is a hit, for n = 1..horizon."""
        hs = self._hitset
        return [n in hs for n in range(1, self.horizon + 1)]


def _landmarks(F: PLMap) -> list[Fraction]:
    pts = {Fraction(0), Fraction(1)}
    for x0, y0, x1, y1 in F.segments():
        # fixed points: y0 + s (x - x0) = x on [x0, x1]
        s = (y1 - y0) / (x1 - x0)
        if s == 1:
            if y0 == x0:
                pts.update((x0, x1))
            continue
        x = (y0 - s * x0) / (1 - s)
        if x0 <= x <= x1:
            pts.add(x)
    return sorted(pts)


def _trap_windows(A: IntervalSet, landmarks: list[Fraction]):
    """Candidate forward-invariant hulls containing ``A``, tightest first."""
    h = A.hull()
    lows = [(h.lo, h.lo_closed)] + [(x, True) for x in reversed(landmarks) if x < h.lo]
    highs = [(h.hi, h.hi_closed)] + [(x, True) for x in landmarks if x > h.hi]
    for lo in lows[:3]:
        for hi in highs[:3]:
            yield IntervalSet((Interval(lo[0], hi[0], lo[1], hi[1]),))


def _period_map(seq: MapSequence, n: int, p: int, cache: dict, node_cap: int):
    key = (seq.phase(n + 1), p)
    if key not in cache:
        F = identity()
        for i in range(n + 1, n + p + 1):
            F = compose(seq[i], F)
            if len(F.nodes) > node_cap:
                F = None
                break
        cache[key] = F
    return cache[key]


def _try_trap(orb: _Orbit, V: IntervalSet, n: int, p: int, F: PLMap):
    """Widening certificate: a hull T ⊇ A_n with F(T) ⊆ T whose window misses V."""
    seq = orb.seq
    for T in _trap_windows(orb.at(n), _landmarks(F)):
        if not image(F, T).issubset(T):
            continue
        window = [T]
        for i in range(n + 1, n + p):
            window.append(image(seq[i], window[-1]))
        if not any(W.meets(V) for W in window):
            return TailCertificate(
                CertificateKind.EVENTUALLY_EMPTY, n, p, tuple(window), "subset", "trap"
            )
    return None


def _certify(orb: _Orbit, V: IntervalSet, search_bound: int) -> TailCertificate:
    seq = orb.seq
    P = seq.period
    n0 = seq.preperiod
    hit = [None] + [orb.at(n).meets(V) for n in range(1, search_bound + 1)]
    cap = min(_node_cap(), 2000)
    period_maps: dict = {}
    for n in range(n0, search_bound + 1):
        p = P
        while n + p <= search_bound:
            window = hit[n:n + p]
            A_n, A_np = orb.at(n), orb.at(n + p)
            if not any(window):
                if A_np.issubset(A_n):
                    return TailCertificate(
                        CertificateKind.EVENTUALLY_EMPTY, n, p,
                        tuple(orb.at(j) for j in range(n, n + p)), "subset", "nesting",
                    )
            elif all(window):
                if A_n.issubset(A_np):
                    return TailCertificate(
                        CertificateKind.EVENTUALLY_FULL, n, p,
                        tuple(orb.at(j) for j in range(n, n + p)), "superset", "nesting",
                    )
            p += P
        if not any(hit[n:n + P]) and n + P <= search_bound:
            F = _period_map(seq, n, P, period_maps, cap)
            cert = _try_trap(orb, V, n, P, F) if F is not None else None
            if cert is not None:
                return cert
    return TailCertificate.unknown()


def certify_tail(
    seq: MapSequence, U: IntervalSet, V: IntervalSet, search_bound: int = DEFAULT_SEARCH_BOUND
) -> TailCertificate:
    """Search for a sound EventuallyEmpty / EventuallyFull certificate.

    Base indices start at the sequence preperiod and periods are multiples of
    the sequence period, so map periodicity from the base index is structural.
    If ``A_{n+p} ⊆ A_n`` and ``A_n..A_{n+p-1}`` all miss V then, by induction
    on image monotonicity, every later image misses V; dually for ``⊇`` and
    hits. When plain nesting fails, a hull of ``A_n`` widened to fixed points
    of the period map is tried as a trapping region. Returns Unknown when
    nothing is found below ``search_bound``; it never guesses.
    """
    if search_bound < seq.preperiod:
        raise ValueError("search_bound must be at least the sequence preperiod")
    return _certify(_Orbit.start(seq, U), V, search_bound)


def _report_from_orbit(orb, U, V, horizon, search_bound) -> HitSetReport:
    hits = tuple(n for n in range(1, horizon + 1) if orb.at(n).meets(V))
    bound = max(min(horizon, search_bound), orb.seq.preperiod)
    cert = _certify(orb, V, bound)
    return HitSetReport(hits, horizon, cert, U, V, orb.seq)


def hit_set(
    seq: MapSequence,
    U: IntervalSet,
    V: IntervalSet,
    horizon: int,
    search_bound: int = DEFAULT_SEARCH_BOUND,
) -> HitSetReport:
    """Exact hits ``n <= horizon`` of ``f_1^n(U) ∩ V`` plus a tail certificate."""
    if U.is_empty or V.is_empty:
        raise ValueError("U and V must be non-empty")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    return _report_from_orbit(_Orbit.start(seq, U), U, V, horizon, search_bound)


class OrbitCache:
    """Shares one orbit per U across many V queries (used by classification)."""

    def __init__(self, seq: MapSequence):
        self.seq = seq
        self._orbits: dict = {}
        self._reports: dict = {}

    def orbit(self, U: IntervalSet) -> _Orbit:
        orb = self._orbits.get(U)
        if orb is None:
            orb = self._orbits[U] = _Orbit.start(self.seq, U)
        return orb

    def report(self, U, V, horizon, search_bound=DEFAULT_SEARCH_BOUND) -> HitSetReport:
        key = (U, V, horizon, search_bound)
        rep = self._reports.get(key)
        if rep is None:
            rep = _report_from_orbit(self.orbit(U), U, V, horizon, search_bound)
            self._reports[key] = rep
        return rep
