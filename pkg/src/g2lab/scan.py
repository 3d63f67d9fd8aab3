"""Scans over families y^2 = x^5 + a3 x^3 + a2 x^2 + a1 x + a0.

Every (curve, ell) pair with ell | |J(F_q)| is a candidate and ends up in
the summary as analyzed, out_of_scope(reason) or errored(reason).
"""

import itertools
import json
from collections import Counter

from . import cm, config
from .analysis import VERDICT_KEYS, analyze, is_counterexample
from .curve import CurveError, FieldTooLarge, NotWeilPolynomial, build_curve, check_weil_bounds, frobenius_profile
from .torsion import (
    KappaTooLarge,
    SamplingExhausted,
    TorsionError,
    ell_torsion_basis,
    hypothesis_flags,
    out_of_scope_reasons,
)

DEFAULT_MANIFEST = {
    "p": [31, 41, 53, 61, 71],
    "widen_p": [43, 47, 59, 67, 73, 79, 83],
    "ells": [3, 5, 7, 11, 13],
    "strategy": "random",
    "curves_per_p": 30,
    "cm_curves_per_p": 1500,
    "trials": 100,
    "seed": 2026,
    "min_in_hypothesis": 30,
    "budgets": {},
}

BUDGET_ERRORS = (KappaTooLarge, SamplingExhausted, FieldTooLarge)


class ManifestError(ValueError):
    pass


def load_manifest(obj):
    """Merge a manifest dict over the defaults and validate it."""
    if not isinstance(obj, dict):
        raise ManifestError("manifest must be a JSON object")
    unknown = set(obj) - set(DEFAULT_MANIFEST)
    if unknown:
        raise ManifestError("unknown manifest keys: %s" % ", ".join(sorted(unknown)))
    m = dict(DEFAULT_MANIFEST)
    m.update(obj)
    p = m["p"]
    if isinstance(p, dict):
        try:
            p = list(range(int(p["from"]), int(p["to"]) + 1))
        except (KeyError, TypeError, ValueError):
            raise ManifestError("p range must be a list or {'from': a, 'to': b}")
    from sympy import isprime
    m["p"] = [int(x) for x in p if isprime(int(x)) and int(x) > 2]
    m["widen_p"] = [int(x) for x in m["widen_p"] if isprime(int(x)) and int(x) > 2]
    m["ells"] = sorted(int(x) for x in m["ells"])
    if m["strategy"] not in ("random", "lex"):
        raise ManifestError("strategy must be 'random' or 'lex'")
    for key in ("curves_per_p", "cm_curves_per_p", "trials", "min_in_hypothesis", "seed"):
        try:
            m[key] = int(m[key])
        except (TypeError, ValueError):
            raise ManifestError("%s must be an integer" % key)
    if not isinstance(m["budgets"], dict):
        raise ManifestError("budgets must be an object")
    return m


def _coefficient_stream(p, strategy, seed):
    """(a0, a1, a2, a3) tuples without repetition."""
    if strategy == "lex":
        for a3, a2, a1, a0 in itertools.product(range(p), repeat=4):
            yield (a0, a1, a2, a3)
        return
    rng = config.derive_rng(seed, "curves", p)
    seen = set()
    total = p ** 4
    while len(seen) < total:
        c = tuple(rng.randrange(p) for _ in range(4))
        if c in seen:
            continue
        seen.add(c)
        yield c


def enumerate_curves(p, count, strategy="random", seed=0):
    """The first count nonsingular curves of the family and the number of singular ones skipped."""
    out = []
    singular = 0
    for a0, a1, a2, a3 in _coefficient_stream(p, strategy, seed):
        if len(out) >= count:
            break
        try:
            out.append(build_curve([], [a0, a1, a2, a3, 0, 1], p))
        except CurveError:
            singular += 1
    return out, singular


_PROFILES = {}


def _profile(curve):
    """frobenius_profile memoized per curve for the duration of a scan."""
    key = (curve.p, tuple(curve.h))
    prof = _PROFILES.get(key)
    if prof is None:
        prof = _PROFILES[key] = frobenius_profile(curve)
    return prof


def _candidate(curve, ell, manifest, within):
    """One pipeline candidate; returns the entry recorded in the scan."""
    entry = {"curve": curve.to_json(), "ell": ell}
    prof = _profile(curve)
    reasons = out_of_scope_reasons(hypothesis_flags(prof, ell))
    if reasons:
        entry["status"] = "out_of_scope(%s)" % "; ".join(reasons)
        return entry, None
    try:
        rep = analyze(curve, ell, seed=manifest["seed"], trials=manifest["trials"])
    except BUDGET_ERRORS as exc:
        entry["status"] = "errored(%s: %s)" % (type(exc).__name__, _short(exc))
        return entry, None
    except (TorsionError, CurveError) as exc:
        entry["status"] = "errored(%s: %s)" % (type(exc).__name__, _short(exc))
        return entry, None
    entry["status"] = "analyzed"
    return entry, rep


def _short(exc, n=120):
    s = str(exc)
    return s if len(s) <= n else s[: n - 3] + "..."


def _cm_cross_validation(curves, ells, seed):
    """Match curves to eta-integers by their Frobenius polynomial and test predictions."""
    stats = Counter()
    preconditions = Counter()
    matches = []
    for curve in curves:
        prof = _profile(curve)
        w = cm.eta_from_frobenius_poly(prof.q, prof.s1, prof.s2)
        if w is None:
            stats["no_eta_integer"] += 1
            continue
        stats["eta_integer"] += 1
        for ell in ells:
            try:
                pred = cm.predict_rationality(w, ell)
            except cm.HypothesisViolated as exc:
                preconditions[exc.precondition] += 1
                continue
            if not pred.predicted_rationality:
                stats["no_prediction"] += 1
                continue
            stats["predictions"] += 1
            rec = {"curve": curve.to_json(), "ell": ell, "P": list(prof.P), "eta": w.to_json(), "k": pred.k}
            try:
                ctx = ell_torsion_basis(curve, prof, ell, config.derive_rng(seed, "cm", curve.label(), ell))
            except (TorsionError, FieldTooLarge) as exc:
                rec["status"] = "errored(%s: %s)" % (type(exc).__name__, _short(exc))
                stats["errored"] += 1
                matches.append(rec)
                continue
            res = cm.cross_validate(pred, ctx)
            rec.update(res)
            stats[res["status"]] += 1
            matches.append(rec)
    return {"stats": dict(sorted(stats.items())), "failed_preconditions": dict(sorted(preconditions.items())),
            "matches": matches}


def run_scan(manifest):
    """Run the scan and return (result dict, exit code)."""
    m = load_manifest(manifest)
    _PROFILES.clear()
    try:
        with config.overrides(m["budgets"]):
            return _run(m)
    finally:
        _PROFILES.clear()


def _run(m):
    entries = []
    reports = []
    weil = Counter()
    singular_total = 0
    primes_used = []
    cm_curves = []
    queue = list(m["p"])
    widen = list(m["widen_p"])
    while queue:
        p = queue.pop(0)
        primes_used.append(p)
        n = max(m["curves_per_p"], m["cm_curves_per_p"])
        curves, singular = enumerate_curves(p, n, m["strategy"], m["seed"])
        singular_total += singular
        for curve in curves:
            try:
                check_weil_bounds(_profile(curve))
                weil["passed"] += 1
            except NotWeilPolynomial:
                weil["failed"] += 1
        cm_curves.extend(curves[: m["cm_curves_per_p"]])
        for curve in curves[: m["curves_per_p"]]:
            N1 = _profile(curve).jacobian_order(1)
            for ell in m["ells"]:
                if N1 % ell or ell == p:
                    continue
                entry, rep = _candidate(curve, ell, m, None)
                entries.append(entry)
                if rep is not None:
                    reports.append(rep)
        analyzed = sum(1 for r in reports if r.get("in_hypothesis"))
        if not queue and analyzed < m["min_in_hypothesis"] and widen:
            queue.append(widen.pop(0))
    entries.sort(key=lambda e: (e["curve"]["p"], tuple(e["curve"]["h"]), e["ell"]))
    reports.sort(key=lambda r: (r["curve"]["p"], tuple(r["curve"]["h"]), r["ell"]))
    cmres = _cm_cross_validation(cm_curves, m["ells"], m["seed"])
    summary = summarize(entries, reports, m)
    summary["singular_curves_skipped"] = singular_total
    summary["primes_used"] = primes_used
    summary["weil_bounds"] = {"passed": weil["passed"], "failed": weil["failed"]}
    summary["cm"] = {"curves": len(cm_curves), **cmres["stats"],
                     "failed_preconditions": cmres["failed_preconditions"]}
    refuted = [x for x in cmres["matches"] if x.get("status") == "refuted"]
    for x in refuted:
        summary["counterexamples"].append({"curve": x["curve"], "ell": x["ell"], "check": "cm_rationality",
                                           "verdict": "COUNTEREXAMPLE(kappa = %d, k = %d)" % (x["kappa"], x["k"])})
    result = {"manifest": m, "summary": summary, "instances": entries, "reports": reports,
              "cm_matches": cmres["matches"]}
    if summary["counterexamples"] or weil["failed"]:
        code = 1
    elif not summary["quota"]["met"]:
        code = 4
    else:
        code = 0
    return result, code


def summarize(entries, reports, m):
    status = Counter()
    reasons = Counter()
    errors = Counter()
    for e in entries:
        s = e["status"]
        if s == "analyzed":
            status["analyzed"] += 1
        elif s.startswith("out_of_scope"):
            status["out_of_scope"] += 1
            for r in s[len("out_of_scope("):-1].split("; "):
                reasons[r] += 1
        else:
            status["errored"] += 1
            errors[s[len("errored("):].split(":")[0]] += 1
    kinds = Counter()
    verdicts = {k: Counter() for k in VERDICT_KEYS}
    cex = []
    in_hyp = 0
    for r in reports:
        if r.get("in_hypothesis"):
            in_hyp += 1
            kind = r.get("classification", {}).get("kind", "none")
            kinds[kind] += 1
        for key, v in r["verdicts"].items():
            if v == "verified":
                verdicts[key]["verified"] += 1
            elif is_counterexample(v):
                verdicts[key]["COUNTEREXAMPLE"] += 1
                cex.append({"curve": r["curve"], "ell": r["ell"], "check": key, "verdict": v})
            else:
                verdicts[key]["out_of_scope"] += 1
    return {
        "candidates": len(entries),
        "status": {k: status[k] for k in ("analyzed", "out_of_scope", "errored")},
        "out_of_scope_reasons": dict(sorted(reasons.items())),
        "errors": dict(sorted(errors.items())),
        "in_hypothesis_analyzed": in_hyp,
        "classification": dict(sorted(kinds.items())),
        "verdicts": {k: {c: verdicts[k][c] for c in ("verified", "out_of_scope", "COUNTEREXAMPLE")}
                     for k in VERDICT_KEYS},
        "counterexamples": cex,
        "quota": {"min_in_hypothesis": m["min_in_hypothesis"], "met": in_hyp >= m["min_in_hypothesis"]},
    }


def dumps(obj):
    return json.dumps(obj, indent=1, sort_keys=False)
