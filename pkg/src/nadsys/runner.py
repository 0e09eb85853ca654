"""Execute DSL queries and serialize the results.

Reports are plain dicts of JSON-ready values. Rationals are rendered as
``"p/q"`` strings (integers without a denominator) so output is exact and
byte-stable; :func:`to_json` sorts keys.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Any, Optional

from .classify import (
    ClassificationReport,
    OpenSetGrid,
    PairResult,
    classify_ergodic,
    classify_mixing,
    classify_transitive,
)
from .dsl import Query, SystemSpec
from .family import DEFAULT_DENSITY_THRESHOLD, Family, member, prefix_densities, upper_density
from .ndsys import (
    DEFAULT_SEARCH_BOUND,
    Cycle,
    EventuallyConstant,
    Explicit,
    HitSetReport,
    MapSequence,
    NodeCapExceeded,
    TailCertificate,
    compose_prefix,
    hit_set,
)
from .plmap import IntervalSet, PLMap, compose, fmt_rational, image, is_invariant

__all__ = [
    "DEFAULTS",
    "QueryError",
    "build_sequence",
    "certificate_json",
    "map_json",
    "run",
    "run_query",
    "to_csv",
    "to_json",
]

DEFAULTS = {
    "horizon": 2000,
    "depth": 3,
    "family": "infinite",
    "threshold": DEFAULT_DENSITY_THRESHOLD,
    "search_bound": DEFAULT_SEARCH_BOUND,
}


class QueryError(RuntimeError):
    """A query failed at run time; the message names the query and its line."""

    def __init__(self, query: Query, cause: BaseException):
        self.query = query
        self.cause = cause
        super().__init__(f"line {query.line}: query {query.kind} "
                         f"{' '.join(query.args)}: {cause}")


# --------------------------------------------------------------------------
# Serialization helpers
# --------------------------------------------------------------------------


def _q(x: Fraction) -> str:
    return fmt_rational(x)


def map_json(m: PLMap) -> dict:
    return {
        "nodes": [[_q(x), _q(y)] for x, y in m.nodes],
        "pieces": [
            {"lo": _q(lo), "hi": _q(hi), "slope": _q(a), "intercept": _q(b)}
            for lo, hi, a, b in m.pieces()
        ],
    }


def _set_json(s: IntervalSet) -> str:
    return str(s)


def certificate_json(c: TailCertificate) -> dict:
    return {
        "kind": c.kind.value,
        "base_index": c.base_index,
        "period": c.period,
        "nesting": c.nesting,
        "method": c.method,
        "witness": [_set_json(w) for w in c.witness],
    }


def _jsonable(v: Any):
    if isinstance(v, Fraction):
        return _q(v)
    if isinstance(v, IntervalSet):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "value") and not isinstance(v, (int, str, bool)):
        return v.value
    return v


def _pair_json(p: PairResult) -> dict:
    return {
        "U": [str(u) for u in p.U],
        "V": [str(v) for v in p.V],
        "decision": p.decision.value,
        "hits": p.hit_count,
        "certificate": p.certificate.value,
    }


# --------------------------------------------------------------------------
# Evaluation
# --------------------------------------------------------------------------


def _rule_sequence(spec: SystemSpec, rule: tuple) -> MapSequence:
    kind = rule[0]
    if kind == "cycle":
        return Cycle([spec.map(n) for n in rule[1]])
    if kind == "eventually":
        return EventuallyConstant([spec.map(n) for n in rule[1]], spec.map(rule[2]))
    return Explicit([spec.map(n) for n in rule[1]], _rule_sequence(spec, rule[2]))


def build_sequence(spec: SystemSpec, name: str) -> MapSequence:
    return _rule_sequence(spec, spec.seq_rule(name))


def _options(spec: SystemSpec, q: Query, overrides: Optional[dict]) -> dict:
    opts = dict(DEFAULTS)
    opts.update(spec.option_dict())
    opts.update(q.opts())
    if overrides:
        opts.update({k: v for k, v in overrides.items() if v is not None})
    return opts


def _hitset(spec, q, opts) -> tuple[dict, HitSetReport]:
    seq = build_sequence(spec, q.args[0])
    U, V = spec.set(q.args[1]), spec.set(q.args[2])
    rep = hit_set(seq, U, V, opts["horizon"], opts["search_bound"])
    fam = Family.parse(opts["family"])
    verdict = member(rep, fam, opts["threshold"])
    ud = upper_density(rep)
    result = {
        "hits": list(rep.hits),
        "horizon": rep.horizon,
        "certificate": certificate_json(rep.certificate),
        "family": {"name": fam.value, "decision": verdict.decision.value,
                   "evidence": _jsonable(verdict.evidence)},
        "upper_density": {"estimate": _q(ud.estimate),
                          "exact": None if ud.exact is None else _q(ud.exact),
                          "final": _q(ud.final)},
    }
    return result, rep


def _classify(spec, q, opts) -> dict:
    prop, name = q.args
    seq = build_sequence(spec, name)
    grid = OpenSetGrid(opts["depth"])
    fam = Family.parse(opts["family"])
    if prop == "transitive":
        rep = classify_transitive(seq, fam, grid, opts["horizon"], opts["threshold"])
    elif prop == "mixing":
        rep = classify_mixing(seq, fam, grid, opts["horizon"], opts["threshold"])
    else:
        rep = classify_ergodic(seq, grid, opts["horizon"], opts["threshold"])
    return classification_json(rep)


def classification_json(rep: ClassificationReport) -> dict:
    out = {
        "property": rep.property,
        "verdict": rep.verdict.value,
        "depth": rep.depth,
        "horizon": rep.horizon,
        "all_pairs_hit": rep.all_pairs_hit,
        "pair_count": len(rep.pairs),
        "refuting_pairs": len(rep.refuting_pairs),
        "evidence": _jsonable(rep.evidence),
        "witness": None,
        "pairs": [_pair_json(p) for p in rep.pairs],
    }
    if rep.witness is not None:
        w = _pair_json(rep.witness)
        if rep.witness_report is not None:
            w["certificate"] = certificate_json(rep.witness_report.certificate)
            w["hit_list"] = list(rep.witness_report.hits)
        out["witness"] = w
    return out


def _compose(spec, q, opts) -> dict:
    if len(q.args) == 1:
        seq = build_sequence(spec, q.args[0])
        m = compose_prefix(seq, opts["n"])
        return dict(map_json(m), n=opts["n"])
    maps = [spec.map(n) for n in q.args]
    acc = maps[-1]
    for outer in reversed(maps[:-1]):
        acc = compose(outer, acc)
    return map_json(acc)


def _invariant(spec, q, opts) -> dict:
    m, s = spec.map(q.args[0]), spec.set(q.args[1])
    return {"invariant": is_invariant(m, s), "image": str(image(m, s)), "set": str(s)}


def _echo(q: Query) -> dict:
    return {
        "kind": q.kind,
        "args": list(q.args),
        "options": {k: _jsonable(v) for k, v in q.options},
        "line": q.line,
    }


def run_query(spec: SystemSpec, q: Query, overrides: Optional[dict] = None) -> dict:
    """Execute one query. Library errors are wrapped in QueryError."""
    opts = _options(spec, q, overrides)
    report = {"query": _echo(q)}
    try:
        if q.kind == "hitset":
            result, rep = _hitset(spec, q, opts)
            report["result"] = result
            report["_series"] = rep
        elif q.kind == "classify":
            report["result"] = _classify(spec, q, opts)
        elif q.kind == "compose":
            report["result"] = _compose(spec, q, opts)
        elif q.kind == "invariant":
            report["result"] = _invariant(spec, q, opts)
        elif q.kind == "verify-paper":
            from .fixtures import verify_paper

            report["result"] = verify_paper().to_json()
        else:
            raise ValueError(f"unknown query kind {q.kind!r}")
    except (NodeCapExceeded, ValueError, KeyError, StopIteration) as exc:
        raise QueryError(q, exc) from exc
    return report


def run(spec: SystemSpec, overrides: Optional[dict] = None) -> list[dict]:
    """Run every query of ``spec`` in order.

    ``overrides`` (horizon, depth, family, threshold) take precedence over
    ``option`` lines and per-query settings.
    """
    return [run_query(spec, q, overrides) for q in spec.queries]


def _public(report: dict) -> dict:
    return {k: v for k, v in report.items() if not k.startswith("_")}


def to_json(reports: list[dict]) -> str:
    return json.dumps([_public(r) for r in reports], sort_keys=True, indent=2) + "\n"


def to_csv(reports: list[dict]) -> str:
    """Hit-set queries as ``n,hit,prefix_density`` rows.

    Each hit-set block is preceded by a ``# query`` comment line. Other
    queries are summarized in one comment line each, since they have no
    per-n series.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for r in reports:
        q = r["query"]
        head = f"# query {q['kind']} {' '.join(q['args'])} (line {q['line']})"
        rep = r.get("_series")
        if rep is None:
            buf.write(head + ": " + json.dumps(_summary(r), sort_keys=True) + "\n")
            continue
        buf.write(head + "\n")
        w.writerow(["n", "hit", "prefix_density"])
        dens = prefix_densities(rep)
        for n, (flag, d) in enumerate(zip(rep.flags(), dens), start=1):
            w.writerow([n, int(flag), _q(d)])
    return buf.getvalue()


def _summary(report: dict) -> dict:
    res = report["result"]
    if report["query"]["kind"] == "classify":
        return {"verdict": res["verdict"], "all_pairs_hit": res["all_pairs_hit"]}
    if report["query"]["kind"] == "compose":
        return {"nodes": res["nodes"]}
    if report["query"]["kind"] == "verify-paper":
        return {"passed": res["passed"], "failed": res["failed"]}
    return res
