from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

from nadsys import Interval, IntervalSet, PLMap

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def pl(*nodes) -> PLMap:
    return PLMap(tuple((Fraction(x), Fraction(y)) for x, y in nodes))


TENT = pl((0, 0), ("1/2", 1), (1, 0))


@st.composite
def unit_rationals(draw, max_den=16):
    q = draw(st.integers(1, max_den))
    return Fraction(draw(st.integers(0, q)), q)


@st.composite
def pl_maps(draw, max_nodes=6, max_den=12, feeble_open=False):
    """Random continuous PL self-maps with small denominators."""
    k = draw(st.integers(0, max_nodes - 2))
    inner = draw(st.sets(st.fractions(0, 1, max_denominator=max_den)
                         .filter(lambda x: 0 < x < 1), max_size=k))
    xs = [Fraction(0), *sorted(inner), Fraction(1)]
    ys = []
    for _ in xs:
        y = draw(unit_rationals(max_den=max_den))
        if feeble_open:
            while ys and y == ys[-1]:
                y = draw(unit_rationals(max_den=max_den))
        ys.append(y)
    return PLMap(tuple(zip(xs, ys)))


@st.composite
def dyadic_open(draw, max_depth=4):
    d = draw(st.integers(1, max_depth))
    n = 2 ** d
    i = draw(st.integers(0, n - 1))
    j = draw(st.integers(i + 1, n))
    return IntervalSet.open(Fraction(i, n), Fraction(j, n))


@st.composite
def intervals(draw, max_den=12):
    a = draw(unit_rationals(max_den))
    b = draw(unit_rationals(max_den))
    lo, hi = min(a, b), max(a, b)
    if lo == hi:
        return Interval.point(lo)
    return Interval(lo, hi, draw(st.booleans()), draw(st.booleans()))


@st.composite
def interval_sets(draw, max_parts=3, max_den=12):
    parts = draw(st.lists(intervals(max_den), min_size=1, max_size=max_parts))
    return IntervalSet(tuple(parts))


def grid(n: int):
    """n equally spaced rationals covering [0,1]."""
    return [Fraction(k, n - 1) for k in range(n)]


# --- acceptance reporting ----------------------------------------------------

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): numbered acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    n, title = crit
    entry = _CRITERIA.setdefault(n, {"title": title, "failed": [], "ran": 0})
    entry["ran"] += 1
    if report.failed:
        entry["failed"].append(report.nodeid.split("::")[-1])


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            item.user_properties.append(("criterion", tuple(mark.args)))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        e = _CRITERIA[n]
        status = "FAIL" if e["failed"] else "PASS"
        extra = f" (failed: {', '.join(e['failed'])})" if e["failed"] else ""
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {e['title']}{extra}")
