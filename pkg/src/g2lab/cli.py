"""Command-line front end.

Exit codes: 0 ok, 1 counterexample, 2 input error, 3 budget exceeded,
4 scan quota unmet.  Reports go to stdout as JSON; timings only go to
stderr, and only with --timings, so that stdout is reproducible.
"""

import argparse
import json
import sys
import time

from . import cm, config
from .analysis import analyze, is_counterexample
from .curve import CurveError, FieldTooLarge, curve_from_json, frobenius_profile
from .scan import DEFAULT_MANIFEST, ManifestError, dumps, run_scan
from .selftest import run_selftest
from .torsion import InvalidEll, KappaTooLarge, SamplingExhausted, TorsionError, ell_torsion_basis

EXIT_OK = 0
EXIT_COUNTEREXAMPLE = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_QUOTA = 4

BUDGET_ERRORS = (KappaTooLarge, SamplingExhausted, FieldTooLarge)


def _emit(obj):
    sys.stdout.write(dumps(obj) + "\n")


def _error(kind, exc, code):
    _emit({"error": kind, "type": type(exc).__name__, "message": str(exc)})
    sys.stderr.write("%s: %s\n" % (type(exc).__name__, exc))
    return code


def _read_json(path):
    with open(path) as fh:
        return json.load(fh)


class _Timer:
    def __init__(self, enabled):
        self.enabled = enabled
        self.t0 = time.perf_counter()

    def done(self, label):
        if self.enabled:
            sys.stderr.write("%s: %.2f s\n" % (label, time.perf_counter() - self.t0))


def cmd_analyze(args):
    timer = _Timer(args.timings)
    try:
        curve = curve_from_json(_read_json(args.curve))
    except (OSError, ValueError) as exc:
        return _error("input", exc, EXIT_INPUT)
    try:
        rep = analyze(curve, args.ell, seed=args.seed, trials=args.trials)
    except (InvalidEll, CurveError) as exc:
        return _error("input", exc, EXIT_INPUT)
    except BUDGET_ERRORS as exc:
        return _error("budget", exc, EXIT_BUDGET)
    _emit(rep)
    timer.done("analyze")
    if any(is_counterexample(v) for v in rep["verdicts"].values()):
        return EXIT_COUNTEREXAMPLE
    return EXIT_OK


def cmd_scan(args):
    timer = _Timer(args.timings)
    if args.manifest:
        try:
            manifest = _read_json(args.manifest)
        except (OSError, ValueError) as exc:
            return _error("input", exc, EXIT_INPUT)
    else:
        manifest = {}
    try:
        result, code = run_scan(manifest)
    except (ManifestError, KeyError) as exc:
        return _error("input", exc, EXIT_INPUT)
    if args.summary_only:
        result = {"manifest": result["manifest"], "summary": result["summary"]}
    _emit(result)
    timer.done("scan")
    return code


def _corpus_matches(corpus, pred, seed):
    """Cross-validate every curve of a saved scan that has the predicted Frobenius polynomial."""
    from .curve import build_curve

    want = list(pred.P)
    seen = set()
    out = []
    for rec in corpus.get("reports", []) + corpus.get("cm_matches", []):
        c = rec["curve"]
        key = (c["p"], tuple(c["model_h"]))
        if key in seen or c["p"] != pred.eta.q:
            continue
        seen.add(key)
        curve = build_curve([], c["model_h"], c["p"])
        prof = frobenius_profile(curve)
        if list(prof.P) != want:
            continue
        try:
            ctx = ell_torsion_basis(curve, prof, pred.ell, config.derive_rng(seed, "cm-check", curve.label()))
        except (TorsionError, FieldTooLarge) as exc:
            out.append({"status": "errored", "reason": "%s: %s" % (type(exc).__name__, exc), "curve": c})
            continue
        res = cm.cross_validate(pred, ctx)
        res["curve"] = c
        out.append(res)
    return out


def cmd_cm_check(args):
    try:
        obj = _read_json(args.spec)
        w = cm.eta_from_json(obj)
        ell = int(obj["ell"])
    except (OSError, ValueError, KeyError, TypeError) as exc:
        return _error("input", exc, EXIT_INPUT)
    report = {"input": obj, "galois": cm.classify_galois(w.field), "primitive": cm.is_primitive(w.field)}
    try:
        P = cm.char_poly_from_eta(w)
    except cm.NotWeilNumber as exc:
        return _error("input", exc, EXIT_INPUT)
    except cm.FormulaMismatch as exc:
        report["char_poly"] = "COUNTEREXAMPLE(%s)" % exc
        _emit(report)
        return EXIT_COUNTEREXAMPLE
    report["P"] = list(P)
    report["P_at_1"] = cm.p_at_one(P)
    code = EXIT_OK
    try:
        lem = cm.check_splitting_congruences(w, ell)
        report["splitting_congruences"] = lem
        if not (lem["identity"] and lem["congruence"] and lem["claim"]):
            code = EXIT_COUNTEREXAMPLE
    except cm.HypothesisViolated as exc:
        report["splitting_congruences"] = "out_of_scope(%s)" % exc
    if not report["primitive"]:
        report["rationality"] = "out_of_scope(K/Q is bicyclic, theorem suite skipped)"
        _emit(report)
        return code
    try:
        pred = cm.predict_rationality(w, ell)
    except cm.HypothesisViolated as exc:
        report["rationality"] = "out_of_scope(%s)" % exc
        _emit(report)
        return code
    report["rationality"] = pred.to_json()
    report["predicted_kappa_equals_k"] = pred.predicted_rationality
    if pred.predicted_rationality:
        results = []
        if args.corpus:
            try:
                results = _corpus_matches(_read_json(args.corpus), pred, args.seed)
            except (OSError, ValueError, KeyError) as exc:
                return _error("input", exc, EXIT_INPUT)
        if not results:
            results = [cm.synthetic_cross_validate(pred, config.derive_rng(args.seed, "cm-check"))]
        report["cross_validation"] = results
        if any(r["status"] in ("refuted", "refuted_synthetic") for r in results):
            code = EXIT_COUNTEREXAMPLE
    _emit(report)
    return code


def cmd_selftest(args):
    timer = _Timer(args.timings)
    out = run_selftest(args.seed)
    _emit(out)
    timer.done("selftest")
    return EXIT_OK if out["ok"] else EXIT_COUNTEREXAMPLE


def build_parser():
    ap = argparse.ArgumentParser(prog="g2lab", description="Genus-2 Jacobian torsion and pairing laboratory.")
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="run every check on one (curve, ell)")
    a.add_argument("--curve", required=True, help='curve JSON: {"p": .., "g": [..], "h": [..]}')
    a.add_argument("--ell", required=True, type=int)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--trials", type=int, default=100, help="random pairs per pairing check")
    a.add_argument("--timings", action="store_true", help="print elapsed time to stderr")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("scan", help="scan a curve family")
    s.add_argument("--manifest", help="manifest JSON; defaults are used for missing keys")
    s.add_argument("--summary-only", action="store_true", help="omit per-instance reports")
    s.add_argument("--timings", action="store_true")
    s.set_defaults(func=cmd_scan)

    c = sub.add_parser("cm-check", help="check an eta-integer Frobenius element")
    c.add_argument("--spec", required=True, help='JSON: {"D", "a", "b", "c": [c1..c4], "q", "ell"}')
    c.add_argument("--corpus", help="saved scan output used to find curves with the same P")
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_cm_check)

    t = sub.add_parser("selftest", help="reduced property suites")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--timings", action="store_true")
    t.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
