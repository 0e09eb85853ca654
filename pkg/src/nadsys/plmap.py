"""Exact piecewise-linear self-maps of [0, 1] and finite unions of intervals.

Everything here works on :class:`fractions.Fraction`; floats are refused at
the boundary so that no rounding can sneak into compositions or images.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import chain
from typing import Iterable, Iterator, Sequence, Union

__all__ = [
    "DomainError",
    "Interval",
    "IntervalSet",
    "PLMap",
    "as_rational",
    "compose",
    "evaluate",
    "hausdorff_distance",
    "identity",
    "image",
    "is_feeble_open",
    "is_invariant",
    "preimage",
    "sup_distance",
    "validate_nodes",
    "validate_pieces",
]

ZERO = Fraction(0)
ONE = Fraction(1)

RationalLike = Union[int, Fraction, str]


class DomainError(ValueError):
    """Raised when an argument lies outside the unit interval or is empty."""


def as_rational(value: RationalLike) -> Fraction:
    """Coerce ``value`` to a Fraction; floats are rejected."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"refusing inexact value {value!r}; use Fraction or 'p/q'")
    if isinstance(value, (int, str)):
        return Fraction(value)
    # numbers.Rational subclasses (e.g. gmpy2.mpq)
    try:
        return Fraction(value.numerator, value.denominator)
    except AttributeError:
        raise TypeError(f"cannot interpret {value!r} as a rational") from None


def fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# --------------------------------------------------------------------------
# Intervals
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    """A non-empty interval with exact endpoints and per-endpoint inclusivity."""

    lo: Fraction
    hi: Fraction
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        lo, hi = as_rational(self.lo), as_rational(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo > hi:
            raise ValueError(f"empty interval: lo={lo} > hi={hi}")
        if lo == hi and not (self.lo_closed and self.hi_closed):
            raise ValueError(f"degenerate interval at {lo} must be closed on both ends")

    @classmethod
    def open(cls, lo: RationalLike, hi: RationalLike) -> "Interval":
        return cls(lo, hi, False, False)

    @classmethod
    def closed(cls, lo: RationalLike, hi: RationalLike) -> "Interval":
        return cls(lo, hi, True, True)

    @classmethod
    def point(cls, x: RationalLike) -> "Interval":
        return cls(x, x, True, True)

    @classmethod
    def build(cls, lo, hi, lo_closed, hi_closed) -> "Interval | None":
        """Like the constructor, but returns None for an empty result."""
        if lo > hi or (lo == hi and not (lo_closed and hi_closed)):
            return None
        return cls(lo, hi, lo_closed, hi_closed)

    @property
    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        x = as_rational(x)
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.lo_closed:
            return False
        if x == self.hi and not self.hi_closed:
            return False
        return True

    def intersect(self, other: "Interval") -> "Interval | None":
        if self.lo > other.lo:
            lo, lo_c = self.lo, self.lo_closed
        elif self.lo < other.lo:
            lo, lo_c = other.lo, other.lo_closed
        else:
            lo, lo_c = self.lo, self.lo_closed and other.lo_closed
        if self.hi < other.hi:
            hi, hi_c = self.hi, self.hi_closed
        elif self.hi > other.hi:
            hi, hi_c = other.hi, other.hi_closed
        else:
            hi, hi_c = self.hi, self.hi_closed and other.hi_closed
        return Interval.build(lo, hi, lo_c, hi_c)

    def interior(self) -> "Interval | None":
        if self.is_degenerate:
            return None
        return Interval(self.lo, self.hi, False, False)

    def __str__(self):
        if self.is_degenerate:
            return "{" + fmt_rational(self.lo) + "}"
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{fmt_rational(self.lo)},{fmt_rational(self.hi)}{right}"


def _canonical_parts(parts: Iterable[Interval]) -> tuple[Interval, ...]:
    ordered = sorted(parts, key=lambda iv: (iv.lo, not iv.lo_closed))
    merged: list[list] = []
    for iv in ordered:
        if merged:
            cur = merged[-1]
            # cur = [lo, hi, lo_closed, hi_closed]
            touches = iv.lo < cur[1] or (iv.lo == cur[1] and (cur[3] or iv.lo_closed))
            if touches:
                if iv.hi > cur[1]:
                    cur[1], cur[3] = iv.hi, iv.hi_closed
                elif iv.hi == cur[1]:
                    cur[3] = cur[3] or iv.hi_closed
                if iv.lo == cur[0]:
                    cur[2] = cur[2] or iv.lo_closed
                continue
        merged.append([iv.lo, iv.hi, iv.lo_closed, iv.hi_closed])
    return tuple(Interval(*m) for m in merged)


@dataclass(frozen=True)
class IntervalSet:
    """Finite union of intervals kept in canonical (sorted, merged) form.

    Two IntervalSets compare equal iff they denote the same subset of the
    line, so the value can be used as a dictionary key for orbit caching.
    """

    parts: tuple[Interval, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "parts", _canonical_parts(self.parts))

    @classmethod
    def of(cls, *parts: Interval) -> "IntervalSet":
        return cls(tuple(parts))

    @classmethod
    def open(cls, lo, hi) -> "IntervalSet":
        return cls((Interval.open(lo, hi),))

    @classmethod
    def closed(cls, lo, hi) -> "IntervalSet":
        return cls((Interval.closed(lo, hi),))

    @classmethod
    def points(cls, xs: Iterable[RationalLike]) -> "IntervalSet":
        return cls(tuple(Interval.point(x) for x in xs))

    @classmethod
    def unit(cls) -> "IntervalSet":
        return cls.closed(0, 1)

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    @property
    def is_empty(self) -> bool:
        return not self.parts

    def __contains__(self, x) -> bool:
        return any(x in p for p in self.parts)

    @property
    def inf(self) -> Fraction:
        return self.parts[0].lo

    @property
    def sup(self) -> Fraction:
        return self.parts[-1].hi

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self.parts + other.parts)

    __or__ = union

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        for a in self.parts:
            for b in other.parts:
                c = a.intersect(b)
                if c is not None:
                    out.append(c)
        return IntervalSet(tuple(out))

    __and__ = intersect

    def meets(self, other: "IntervalSet") -> bool:
        """True iff the intersection is non-empty (linear merge, no allocation)."""
        a, b = self.parts, other.parts
        i = j = 0
        while i < len(a) and j < len(b):
            if a[i].intersect(b[j]) is not None:
                return True
            if (a[i].hi, a[i].hi_closed) < (b[j].hi, b[j].hi_closed):
                i += 1
            else:
                j += 1
        return False

    def issubset(self, other: "IntervalSet") -> bool:
        # canonical parts of `other` are maximal intervals, so each part of
        # self must sit inside a single part of other
        for p in self.parts:
            if not any(p.intersect(q) == p for q in other.parts):
                return False
        return True

    def __le__(self, other: "IntervalSet") -> bool:
        return self.issubset(other)

    def __ge__(self, other: "IntervalSet") -> bool:
        return other.issubset(self)

    def interior(self) -> "IntervalSet":
        return IntervalSet(tuple(i for p in self.parts if (i := p.interior()) is not None))

    def hull(self) -> Interval:
        if self.is_empty:
            raise DomainError("hull of an empty set")
        first, last = self.parts[0], self.parts[-1]
        return Interval(first.lo, last.hi, first.lo_closed, last.hi_closed)

    def __str__(self):
        if not self.parts:
            return "{}"
        return " | ".join(str(p) for p in self.parts)


def _as_set(s: "IntervalSet | Interval") -> IntervalSet:
    return IntervalSet((s,)) if isinstance(s, Interval) else s


# --------------------------------------------------------------------------
# Piecewise-linear maps
# --------------------------------------------------------------------------


def validate_nodes(nodes: Sequence[tuple]) -> list[tuple[int, str]]:
    """Return ``(node_index, message)`` problems for a node list; empty if valid."""
    problems = []
    if len(nodes) < 2:
        return [(0, "a map needs at least the two endpoint nodes x=0 and x=1")]
    if nodes[0][0] != 0:
        problems.append((0, f"first node must have x=0, got x={fmt_rational(nodes[0][0])}"))
    if nodes[-1][0] != 1:
        problems.append(
            (len(nodes) - 1, f"last node must have x=1, got x={fmt_rational(nodes[-1][0])}")
        )
    for i in range(1, len(nodes)):
        if nodes[i][0] <= nodes[i - 1][0]:
            problems.append(
                (i, f"node x-coordinates must increase strictly: "
                    f"{fmt_rational(nodes[i][0])} follows {fmt_rational(nodes[i - 1][0])}")
            )
    for i, (x, y) in enumerate(nodes):
        if y < 0 or y > 1:
            problems.append((i, f"value {fmt_rational(y)} at x={fmt_rational(x)} outside [0,1]"))
    return problems


def validate_pieces(pieces: Sequence[tuple]) -> list[tuple[int, str]]:
    """Check affine pieces ``(lo, hi, slope, intercept)`` describe a continuous self-map.

    One problem is reported per offending piece (domain defect first, then
    range), and continuity is only checked between pieces that are otherwise
    sound, so a single typo produces a single message.
    """
    problems = []
    if not pieces:
        return [(0, "a piecewise map needs at least one piece")]
    bad = set()
    prev_hi = None
    for i, (lo, hi, a, b) in enumerate(pieces):
        if lo >= hi:
            problems.append((i, f"piece domain [{fmt_rational(lo)},{fmt_rational(hi)}] is empty"))
            bad.add(i)
        elif i == 0 and lo != 0:
            problems.append((i, f"first piece must start at 0, starts at {fmt_rational(lo)}"))
            bad.add(i)
        elif prev_hi is not None and lo != prev_hi:
            kind = "overlaps" if lo < prev_hi else "leaves a gap after"
            problems.append(
                (i, f"piece domain starts at {fmt_rational(lo)} but previous piece ends at "
                    f"{fmt_rational(prev_hi)} ({kind} it)")
            )
            bad.add(i)
        elif i == len(pieces) - 1 and hi != 1:
            problems.append((i, f"last piece must end at 1, ends at {fmt_rational(hi)}"))
            bad.add(i)
        prev_hi = hi
        if i in bad:
            continue
        for x in (lo, hi):
            y = a * x + b
            if y < 0 or y > 1:
                problems.append((i, f"value {fmt_rational(y)} at x={fmt_rational(x)} outside [0,1]"))
                bad.add(i)
                break
    for i in range(1, len(pieces)):
        if i in bad or i - 1 in bad:
            continue
        x = pieces[i][0]
        left = pieces[i - 1][2] * x + pieces[i - 1][3]
        right = pieces[i][2] * x + pieces[i][3]
        if left != right:
            problems.append(
                (i, f"discontinuity at x={fmt_rational(x)}: "
                    f"{fmt_rational(left)} from the left, {fmt_rational(right)} from the right")
            )
    return problems


def _canonical_nodes(nodes):
    out = [nodes[0]]
    for k in range(1, len(nodes) - 1):
        (x0, y0), (x1, y1), (x2, y2) = out[-1], nodes[k], nodes[k + 1]
        if (y1 - y0) * (x2 - x1) != (y2 - y1) * (x1 - x0):
            out.append(nodes[k])
    out.append(nodes[-1])
    return tuple(out)


@dataclass(frozen=True)
class PLMap:
    """Continuous piecewise-linear self-map of [0, 1] given by its nodes.

    The map is the affine interpolation between consecutive nodes. Nodes are
    stored in canonical form (interior collinear nodes dropped), so ``==``
    is equality of functions.
    """

    nodes: tuple[tuple[Fraction, Fraction], ...]
    _xs: tuple[Fraction, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        nodes = tuple((as_rational(x), as_rational(y)) for x, y in self.nodes)
        problems = validate_nodes(nodes)
        if problems:
            raise ValueError("invalid PL map: " + "; ".join(m for _, m in problems))
        nodes = _canonical_nodes(nodes)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "_xs", tuple(x for x, _ in nodes))

    @classmethod
    def from_pieces(cls, pieces: Iterable[tuple]) -> "PLMap":
        """Build from affine pieces ``(lo, hi, slope, intercept)`` covering [0, 1]."""
        pieces = [tuple(as_rational(v) for v in p) for p in pieces]
        problems = validate_pieces(pieces)
        if problems:
            raise ValueError("invalid piecewise map: " + "; ".join(m for _, m in problems))
        nodes = [(lo, a * lo + b) for lo, _, a, b in pieces]
        lo, hi, a, b = pieces[-1]
        nodes.append((hi, a * hi + b))
        return cls(tuple(nodes))

    @property
    def breakpoints(self) -> tuple[Fraction, ...]:
        return self._xs

    def segments(self) -> Iterator[tuple[Fraction, Fraction, Fraction, Fraction]]:
        """Yield ``(x0, y0, x1, y1)`` for each affine piece."""
        for (x0, y0), (x1, y1) in zip(self.nodes, self.nodes[1:]):
            yield x0, y0, x1, y1

    def pieces(self) -> list[tuple[Fraction, Fraction, Fraction, Fraction]]:
        """Affine pieces as ``(lo, hi, slope, intercept)``."""
        out = []
        for x0, y0, x1, y1 in self.segments():
            a = (y1 - y0) / (x1 - x0)
            out.append((x0, x1, a, y0 - a * x0))
        return out

    @property
    def slopes(self) -> tuple[Fraction, ...]:
        return tuple((y1 - y0) / (x1 - x0) for x0, y0, x1, y1 in self.segments())

    def __call__(self, x) -> Fraction:
        x = as_rational(x)
        if x < 0 or x > 1:
            raise DomainError(f"x={x} outside [0,1]")
        xs = self._xs
        i = bisect.bisect_right(xs, x) - 1
        if i >= len(xs) - 1:
            return self.nodes[-1][1]
        x0, y0 = self.nodes[i]
        x1, y1 = self.nodes[i + 1]
        if x == x0:
            return y0
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def __str__(self):
        inner = ",".join(f"({fmt_rational(x)},{fmt_rational(y)})" for x, y in self.nodes)
        return f"pl [{inner}]"


def identity() -> PLMap:
    return PLMap(((ZERO, ZERO), (ONE, ONE)))


def constant(c: RationalLike) -> PLMap:
    c = as_rational(c)
    return PLMap(((ZERO, c), (ONE, c)))


def evaluate(m: PLMap, x: RationalLike) -> Fraction:
    """Value of ``m`` at ``x``; raises DomainError outside [0, 1]."""
    return m(x)


def compose(outer: PLMap, inner: PLMap) -> PLMap:
    """Exact PL representation of ``outer ∘ inner``."""
    xs = set(inner.breakpoints)
    cuts = outer.breakpoints[1:-1]
    for x0, y0, x1, y1 in inner.segments():
        if y0 == y1:
            continue
        lo, hi = min(y0, y1), max(y0, y1)
        i = bisect.bisect_right(cuts, lo)
        j = bisect.bisect_left(cuts, hi)
        for c in cuts[i:j]:
            xs.add(x0 + (c - y0) * (x1 - x0) / (y1 - y0))
    return PLMap(tuple((x, outer(inner(x))) for x in sorted(xs)))


def _affine(x0, y0, x1, y1, x):
    if x == x0:
        return y0
    if x == x1:
        return y1
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


def image(m: PLMap, s: "IntervalSet | Interval") -> IntervalSet:
    """Exact image of ``s`` under ``m``, tracking endpoint inclusivity."""
    s = _as_set(s)
    xs = m.breakpoints
    nodes = m.nodes
    out = []
    for p in s.parts:
        if p.lo < 0 or p.hi > 1:
            raise DomainError(f"set part {p} not inside [0,1]")
        first = min(max(bisect.bisect_right(xs, p.lo) - 1, 0), len(xs) - 2)
        for k in range(first, len(xs) - 1):
            x0, y0 = nodes[k]
            x1, y1 = nodes[k + 1]
            if x0 > p.hi:
                break
            sub = p.intersect(Interval(x0, x1))
            if sub is None:
                continue
            ya = _affine(x0, y0, x1, y1, sub.lo)
            yb = _affine(x0, y0, x1, y1, sub.hi)
            if sub.is_degenerate or y0 == y1:
                out.append(Interval.point(ya))
            elif y1 > y0:
                out.append(Interval(ya, yb, sub.lo_closed, sub.hi_closed))
            else:
                out.append(Interval(yb, ya, sub.hi_closed, sub.lo_closed))
    return IntervalSet(tuple(out))


def preimage(m: PLMap, s: "IntervalSet | Interval") -> IntervalSet:
    """Exact preimage of ``s`` under ``m`` as a finite interval union."""
    s = _as_set(s)
    out = []
    for x0, y0, x1, y1 in m.segments():
        if y0 == y1:
            if y0 in s:
                out.append(Interval(x0, x1))
            continue
        rng = Interval(min(y0, y1), max(y0, y1))
        dx_dy = (x1 - x0) / (y1 - y0)
        for p in s.parts:
            q = p.intersect(rng)
            if q is None:
                continue
            xa = x0 + (q.lo - y0) * dx_dy
            xb = x0 + (q.hi - y0) * dx_dy
            if y1 > y0:
                out.append(Interval(xa, xb, q.lo_closed, q.hi_closed))
            else:
                out.append(Interval(xb, xa, q.hi_closed, q.lo_closed))
    return IntervalSet(tuple(out))


def sup_distance(f: PLMap, g: PLMap) -> Fraction:
    """Supremum metric max |f(x) - g(x)|, attained on the merged node set."""
    xs = sorted(set(f.breakpoints) | set(g.breakpoints))
    return max(abs(f(x) - g(x)) for x in xs)


def is_feeble_open(m: PLMap) -> bool:
    """A PL interval map is feeble open iff none of its pieces is flat."""
    return all(y0 != y1 for _, y0, _, y1 in m.segments())


def is_invariant(m: PLMap, iv: "Interval | IntervalSet") -> bool:
    s = _as_set(iv)
    return image(m, s).issubset(s)


def _closed_parts(a) -> list[tuple[Fraction, Fraction]]:
    if isinstance(a, IntervalSet):
        parts = [(p.lo, p.hi) for p in a.parts]
    elif isinstance(a, Interval):
        parts = [(a.lo, a.hi)]
    else:
        pts = getattr(a, "points", a)
        parts = [(q, q) for q in sorted(set(as_rational(x) for x in pts))]
    if not parts:
        raise DomainError("Hausdorff distance of an empty set")
    # closures of touching parts merge, e.g. (0,1/2) | (1/2,1)
    merged = [list(parts[0])]
    for lo, hi in parts[1:]:
        if lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [tuple(p) for p in merged]


def _dist_to(x, parts) -> Fraction:
    best = None
    for lo, hi in parts:
        d = lo - x if x < lo else (x - hi if x > hi else ZERO)
        if best is None or d < best:
            best = d
    return best


def _directed(a_parts, b_parts) -> Fraction:
    candidates = list(chain.from_iterable(a_parts))
    gaps = [(b_parts[i][1] + b_parts[i + 1][0]) / 2 for i in range(len(b_parts) - 1)]
    for mid in gaps:
        if any(lo <= mid <= hi for lo, hi in a_parts):
            candidates.append(mid)
    return max(_dist_to(x, b_parts) for x in candidates)


def hausdorff_distance(a, b) -> Fraction:
    """Hausdorff distance between the closures of two non-empty sets.

    ``a`` and ``b`` may be IntervalSets, Intervals, or finite collections of
    points (anything with a ``points`` attribute or an iterable of rationals).
    """
    pa, pb = _closed_parts(a), _closed_parts(b)
    return max(_directed(pa, pb), _directed(pb, pa))
