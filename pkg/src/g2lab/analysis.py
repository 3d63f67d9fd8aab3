"""End-to-end verification of one (curve, ell) instance.

Each structural statement gets a verdict string: "verified",
"out_of_scope(reason)" or "COUNTEREXAMPLE(details)".  Input errors and
budget errors propagate as exceptions so the caller can map them to exit
codes.
"""

from . import config
from .algebra import linalg as la
from .algebra.numtheory import factor_shape_mod_l
from .curve import Jacobian, check_weil_bounds, frobenius_profile
from .algebra.fields import ExtensionField
from .pairing import (
    PairingEngine,
    PairingError,
    ShapeViolation,
    DichotomyViolation,
    classify_tate_matrix,
    classify_weil_matrix,
    pairing_matrix,
    self_pairing_scan,
    weil_normalized_basis,
)
from .torsion import (
    CharPolyMismatch,
    HypothesisViolated,
    OutOfScope,
    check_diagonal_iff_splits,
    classify_matrix,
    ell_torsion_basis,
    out_of_scope_reasons,
    rational_torsion_rank,
    transformed_basis,
    _check_ell,
)

VERIFIED = "verified"

# verdict keys in report order
VERDICT_KEYS = [
    "frobenius_charpoly",
    "frobenius_matrix_charpoly",
    "kappa_order",
    "diagonalizable_iff_splits",
    "frobenius_normal_form",
    "rank_at_k_in_2_4",
    "weil_alternating",
    "weil_antisymmetric",
    "weil_bilinear",
    "weil_nondegenerate",
    "weil_galois_invariant",
    "weil_block_shape",
    "tate_nondegenerate_over_Fqk",
    "tate_bilinear",
    "tate_representative_independent",
    "tate_galois_invariant",
    "weil_tate_ratio",
    "tate_block_shape",
    "tate_nondiagonal_relations",
    "tate_diagonal_vanishing",
    "tate_a1_not_0_or_1",
    "tate_a1_zero",
    "self_pairing_dichotomy",
]


def out_of_scope(reason):
    return "out_of_scope(%s)" % reason


def counterexample(detail):
    return "COUNTEREXAMPLE(%s)" % detail


def is_counterexample(verdict):
    return verdict.startswith("COUNTEREXAMPLE")


class _Verdicts:
    def __init__(self):
        self.v = {}

    def set(self, key, ok, detail=""):
        self.v[key] = VERIFIED if ok else counterexample(detail or "check failed")

    def skip(self, key, reason):
        self.v.setdefault(key, out_of_scope(reason))

    def skip_all(self, keys, reason):
        for key in keys:
            self.skip(key, reason)

    def ordered(self):
        return {k: self.v.get(k, out_of_scope("not evaluated")) for k in VERDICT_KEYS}


def _poly_frobenius_kills(jac, P, D):
    """P(phi)(D) for an integer polynomial P, as a class."""
    acc = jac.identity
    img = D
    for i, c in enumerate(P):
        if i:
            img = jac.frobenius(img)
        if c:
            acc = jac.add(acc, jac.mul(c, img))
    return acc


def check_frobenius_charpoly(curve, prof, rng, count=10, degree=3):
    """Weil bounds and P(phi) = 0 on random classes over F_{q^degree}."""
    check_weil_bounds(prof)
    jac = Jacobian(curve, ExtensionField(curve.p, degree))
    for _ in range(count):
        D = jac.random(rng)
        if not jac.is_identity(_poly_frobenius_kills(jac, prof.P, D)):
            return False, "P(phi) does not kill %s" % (D,)
        N = prof.jacobian_order(degree)
        if not jac.is_identity(jac.mul(N, D)):
            return False, "|J(F_q^%d)| does not kill %s" % (degree, D)
    return True, ""


def _vec_add(a, b, ell):
    return [(x + y) % ell for x, y in zip(a, b)]


def _bil(u, E, v, ell):
    return sum(u[i] * E[i][j] * v[j] for i in range(4) for j in range(4)) % ell


def analyze(curve, ell, seed=0, trials=100, charpoly_divisors=10):
    """Run the whole pipeline on (curve, ell) and return the report dict."""
    rng = config.derive_rng(seed, curve.label(), ell)
    prof = frobenius_profile(curve)
    report = {
        "curve": curve.to_json(),
        "ell": ell,
        "seed": seed,
        "budgets": config.budgets(),
        "profile": prof.to_json(),
    }
    vd = _Verdicts()
    try:
        ok, why = check_frobenius_charpoly(curve, prof, config.derive_rng(seed, "charpoly", curve.label()),
                                           count=charpoly_divisors)
        vd.set("frobenius_charpoly", ok, why)
    except AssertionError as exc:
        vd.set("frobenius_charpoly", False, str(exc))
    _check_ell(prof, ell, config.budget("max_ell"))
    report["P_mod_ell"] = [c % ell for c in prof.P]
    report["P_factorization_mod_ell"] = [[f, m] for f, m in factor_shape_mod_l(list(prof.P), ell)]
    from .torsion import hypothesis_flags, embedding_degree
    flags = hypothesis_flags(prof, ell)
    reasons = out_of_scope_reasons(flags)
    report["hypothesis_flags"] = flags
    report["in_hypothesis"] = not reasons
    report["out_of_scope_reasons"] = reasons
    report["k"] = embedding_degree(prof.q, ell)
    try:
        ctx = ell_torsion_basis(curve, prof, ell, rng)
    except CharPolyMismatch as exc:
        vd.set("frobenius_matrix_charpoly", False, str(exc))
        vd.skip_all(VERDICT_KEYS, "no torsion basis")
        report["verdicts"] = vd.ordered()
        return report
    except HypothesisViolated as exc:
        vd.set("kappa_order", False, str(exc))
        vd.skip_all(VERDICT_KEYS, "no torsion basis")
        report["verdicts"] = vd.ordered()
        return report
    report["kappa"] = ctx.kappa
    report["frobenius_matrix"] = ctx.M
    report["sampling"] = ctx.sampling
    _torsion_checks(ctx, vd, reasons, report)
    _pairing_checks(ctx, vd, reasons, report, rng, trials)
    report["verdicts"] = vd.ordered()
    return report


def _torsion_checks(ctx, vd, reasons, report):
    ell, q = ctx.ell, ctx.q % ctx.ell
    M = ctx.M
    cp = la.char_poly(M, ell)
    det = la.det(M, ell)
    ok = cp == [c % ell for c in ctx.profile.P] and det == q * q % ell
    vd.set("frobenius_matrix_charpoly", ok, "char poly %s, det %d" % (cp, det))
    order = la.mat_order(M, ell, ctx.kappa)
    ok = order == ctx.kappa and ctx.kappa % ctx.k == 0
    vd.set("kappa_order", ok, "order(M) = %s, kappa = %d, k = %d" % (order, ctx.kappa, ctx.k))
    # divisor-level check that the basis is l-torsion defined over F_{q^kappa}
    for b in ctx.basis:
        if not ctx.jac.is_identity(ctx.jac.mul(ell, b)) or ctx.frobenius(b, ctx.kappa) != b:
            vd.set("kappa_order", False, "basis element %s is not rational l-torsion" % (b,))
    cls = classify_matrix(M, ctx.q, ell)
    report["classification"] = cls.to_json()
    ctx_cls = None
    if reasons:
        why = "; ".join(reasons)
        vd.skip_all(["diagonalizable_iff_splits", "frobenius_normal_form", "rank_at_k_in_2_4"], why)
    else:
        dis = check_diagonal_iff_splits(ctx)
        report["diagonal_vs_splitting"] = dis
        vd.set("diagonalizable_iff_splits", dis["agree"],
               "diagonalizable=%s splits=%s" % (dis["diagonalizable"], dis["splits"]))
        if cls.kind == "Other":
            vd.set("frobenius_normal_form", False, cls.detail)
        else:
            ok, why = _check_normal_form_on_divisors(ctx, cls)
            vd.set("frobenius_normal_form", ok, why)
            ctx_cls = cls
        rank = rational_torsion_rank(ctx, ctx.k)
        Nk = ctx.profile.jacobian_order(ctx.k)
        ok = rank in (2, 4) and Nk % ell ** rank == 0
        vd.set("rank_at_k_in_2_4", ok, "rank %d at degree k = %d" % (rank, ctx.k))
        report["rank_at_k"] = rank
    report["_cls"] = ctx_cls
    report["_cls_any"] = cls


def _check_normal_form_on_divisors(ctx, cls):
    """Frobenius on the transformed basis, checked on divisor classes."""
    jac = ctx.jac
    ell = ctx.ell
    q = ctx.q % ell
    xs = transformed_basis(ctx, cls.S)
    phi = [ctx.frobenius(x) for x in xs]
    if cls.kind == "Diagonal":
        for x, y, lam in zip(xs, phi, cls.eigenvalues):
            if y != jac.mul(lam, x):
                return False, "phi(x) != %d x" % lam
        return True, ""
    c = cls.c
    if c % ell == (q + 1) % ell:
        return False, "trailing block has c = q + 1"
    if phi[0] != xs[0] or phi[1] != jac.mul(q, xs[1]) or phi[2] != xs[3]:
        return False, "block form fails on x1, x2 or x3"
    if phi[3] != jac.add(jac.mul(-q % ell, xs[2]), jac.mul(c, xs[3])):
        return False, "phi(x4) != -q x3 + c x4"
    return True, ""


def _pairing_checks(ctx, vd, reasons, report, rng, trials):
    cls = report.pop("_cls")
    cls_any = report.pop("_cls_any")
    ell = ctx.ell
    q = ctx.q % ell
    jac = ctx.jac
    eng = PairingEngine(ctx, rng)
    report["tate_normalized"] = eng.normalized
    try:
        _run_pairings(ctx, vd, reasons, report, rng, trials, eng, cls, cls_any)
    except PairingError as exc:
        # a budget problem in evaluation is reported, not hidden
        report["pairing_error"] = "%s: %s" % (type(exc).__name__, exc)
        vd.skip_all(VERDICT_KEYS, "pairing evaluation failed: %s" % type(exc).__name__)
    report["pairing_retries"] = eng.retries


def _run_pairings(ctx, vd, reasons, report, rng, trials, eng, cls, cls_any):
    ell = ctx.ell
    q = ctx.q % ell
    jac = ctx.jac
    basis = ctx.basis
    M = ctx.M
    # matrices on the sampled basis
    try:
        E = pairing_matrix(eng, "weil", basis, M)
        vd.set("weil_galois_invariant", True)
    except ShapeViolation as exc:
        vd.set("weil_galois_invariant", False, str(exc))
        E = eng.weil_many(basis, basis)
    report["weil_matrix"] = E
    ok = all(E[i][i] == 0 for i in range(4))
    vd.set("weil_alternating", ok, "diagonal of the Weil matrix is %s" % [E[i][i] for i in range(4)])
    ok = all((E[i][j] + E[j][i]) % ell == 0 for i in range(4) for j in range(4))
    vd.set("weil_antisymmetric", ok, "Weil matrix is not antisymmetric")
    detE = la.det(E, ell)
    vd.set("weil_nondegenerate", detE != 0, "det of the Weil matrix is 0")
    try:
        T = pairing_matrix(eng, "tate", basis, M)
        vd.set("tate_galois_invariant", True)
    except ShapeViolation as exc:
        vd.set("tate_galois_invariant", False, str(exc))
        T = eng.tate_many(basis, basis)
    report["tate_matrix"] = T
    T2 = eng.tate_many(basis, basis)
    vd.set("tate_representative_independent", T2 == T, "recomputed tame Tate matrix differs")
    if eng.normalized:
        diff = la.mat_sub(T, la.transpose(T), ell)
        vd.set("weil_tate_ratio", diff == E, "T - T^t = %s but E = %s" % (diff, E))
    else:
        vd.skip("weil_tate_ratio", "l^2 divides q^kappa - 1, the tame Tate pairing is symmetric")

    # random trials on divisor classes
    _trials(ctx, vd, eng, rng, trials, E, T)

    # non-degeneracy over F_{q^k}
    _tate_nondegenerate_k(ctx, vd, eng)

    # block shapes on the Frobenius-adapted bases
    shape_keys = ["weil_block_shape", "tate_block_shape", "tate_nondiagonal_relations",
                  "tate_diagonal_vanishing", "tate_a1_not_0_or_1", "tate_a1_zero",
                  "self_pairing_dichotomy"]
    if reasons:
        vd.skip_all(shape_keys, "; ".join(reasons))
        return
    if cls is None:
        vd.skip_all(shape_keys, "Frobenius normal form unavailable")
        return
    if rational_torsion_rank(ctx, 1) != 1:
        vd.skip_all(shape_keys, "J(F_q)[l] is not cyclic")
        return
    can = transformed_basis(ctx, cls.S)
    Mc = cls.conjugated
    try:
        Ec = pairing_matrix(eng, "weil", can, Mc)
        shape = classify_weil_matrix(Ec, ctx)
        vd.set("weil_block_shape", True)
        report["weil_shape"] = {"matrix": Ec, "a": shape.a, "b": shape.b}
    except (ShapeViolation, OutOfScope) as exc:
        vd.set("weil_block_shape", False, str(exc))
        vd.skip_all(shape_keys, "Weil matrix has no block shape")
        return
    if not eng.normalized:
        vd.skip_all(shape_keys[1:], "l^2 divides q^kappa - 1, the tame Tate pairing is symmetric")
        return
    wb, uv = weil_normalized_basis(ctx, cls, can, shape)
    S = la.transpose([ctx.coords(b) for b in wb])
    Mw = la.conjugate(M, S, ell)
    W = pairing_matrix(eng, "weil", wb, Mw)
    want = [[0, 1, 0, 0], [ell - 1, 0, 0, 0], [0, 0, 0, 1], [0, 0, ell - 1, 0]]
    if W != want:
        vd.set("tate_block_shape", False, "Weil-normalized basis has Weil matrix %s" % W)
        return
    Tw = pairing_matrix(eng, "tate", wb, Mw)
    try:
        tshape = classify_tate_matrix(Tw, ctx, cls)
    except ShapeViolation as exc:
        vd.set("tate_block_shape", False, str(exc))
        vd.skip_all(shape_keys, "Tate matrix has no block shape")
        return
    vd.set("tate_block_shape", True)
    report["tate_shape"] = dict(tshape.to_json(), matrix=Tw)
    for label, key in [("nondiagonal_relations", "tate_nondiagonal_relations"),
                       ("diagonal_vanishing", "tate_diagonal_vanishing"),
                       ("a1_not_0_or_1", "tate_a1_not_0_or_1"),
                       ("a1_zero", "tate_a1_zero")]:
        status = tshape.subcases[label]
        if status == "not_applicable":
            vd.skip(key, "premise does not hold")
        else:
            vd.set(key, status == VERIFIED, status)
    Nk = ctx.profile.jacobian_order(ctx.k)
    if cls.kind != "NonDiagonalizable":
        vd.skip("self_pairing_dichotomy", "Frobenius is diagonalizable")
    elif Nk % ell ** 3 == 0:
        vd.skip("self_pairing_dichotomy", "l^3 divides |J(F_q^k)|")
    else:
        try:
            rep = self_pairing_scan(eng, ctx, wb, Tw)
            report["dichotomy"] = rep.to_json()
            # d3 != 0 makes x3 a self-pairing witness; d3 = 0 forces 2 a6 = 1
            # and a non-singular matrix
            if tshape.d3:
                ok = rep.branch == "self_pairing" and rep.witness == [0, 0, 1, 0]
            else:
                ok = (2 * tshape.a6) % ell == 1 and la.det(Tw, ell) != 0
            vd.set("self_pairing_dichotomy", ok, "branch %s with d3 = %d, a6 = %d" % (
                rep.branch, tshape.d3, tshape.a6))
        except DichotomyViolation as exc:
            vd.set("self_pairing_dichotomy", False, str(exc))


def _trials(ctx, vd, eng, rng, trials, E, T, side_trials=20):
    """Random-triple checks on divisor classes.

    Every trial draws x, x', y and evaluates e on (x, x', x + x') x (y) and
    t on (x, y) x (y, x), which covers Weil bilinearity and the Weil-Tate
    ratio.  The first side_trials trials also check alternation,
    antisymmetry, Tate bilinearity in both arguments and values at
    Frobenius images.
    """
    ell = ctx.ell
    q = ctx.q % ell
    jac = ctx.jac
    bad = {"weil_bilinear": None, "weil_alternating": None, "weil_antisymmetric": None,
           "weil_galois_invariant": None, "tate_bilinear": None, "weil_tate_ratio": None,
           "tate_galois_invariant": None}

    def fail(key, msg):
        if bad[key] is None:
            bad[key] = msg

    for t in range(trials):
        a, b, c = (ctx.random_vector(rng) for _ in range(3))
        x, x2, y = (ctx.combine(v) for v in (a, b, c))
        xx = jac.add(x, x2)
        w = eng.weil_many([x, x2, xx], [y])
        exy = w[0][0]
        if w[2][0] != (w[0][0] + w[1][0]) % ell:
            fail("weil_bilinear", "trial %d: e(x+x',y)=%d, e(x,y)+e(x',y)=%d" % (
                t, w[2][0], (w[0][0] + w[1][0]) % ell))
        if exy != _bil(a, E, c, ell):
            fail("weil_bilinear", "trial %d: e(x,y)=%d disagrees with the Weil matrix" % (t, exy))
        tv = eng.tate_many([x, y], [y, x])
        txy, tyx = tv[0][0], tv[1][1]
        if txy != _bil(a, T, c, ell):
            fail("tate_bilinear", "trial %d: t(x,y)=%d disagrees with the Tate matrix" % (t, txy))
        if eng.normalized and (txy - tyx) % ell != exy:
            fail("weil_tate_ratio", "trial %d: t(x,y)-t(y,x)=%d, e(x,y)=%d" % (t, (txy - tyx) % ell, exy))
        if t >= side_trials:
            continue
        y2 = ctx.combine(ctx.random_vector(rng))
        yy = jac.add(y, y2)
        w2 = eng.weil_many([y, x], [y, x])
        if w2[0][0] or w2[1][1]:
            fail("weil_alternating", "trial %d: e(y,y)=%d e(x,x)=%d" % (t, w2[0][0], w2[1][1]))
        if (w2[0][1] + w2[1][0]) % ell or w2[1][0] != exy:
            fail("weil_antisymmetric", "trial %d: e(x,y)=%d e(y,x)=%d" % (t, w2[1][0], w2[0][1]))
        t2 = eng.tate_many([x, x2, xx], [y, y2, yy])
        if t2[2][0] != (t2[0][0] + t2[1][0]) % ell or t2[0][2] != (t2[0][0] + t2[0][1]) % ell:
            fail("tate_bilinear", "trial %d: linearity fails" % t)
        px, py = ctx.frobenius(x), ctx.frobenius(y)
        ew = eng.weil(px, py)
        if ew != q * exy % ell:
            fail("weil_galois_invariant", "trial %d: e(phi x, phi y)=%d, q e(x,y)=%d" % (t, ew, q * exy % ell))
        et = eng.tate(px, py)
        if et != q * txy % ell:
            fail("tate_galois_invariant", "trial %d: t(phi x, phi y)=%d, q t(x,y)=%d" % (t, et, q * txy % ell))
    for key, why in bad.items():
        if key == "weil_tate_ratio" and not eng.normalized:
            continue
        if why is not None:
            vd.set(key, False, why)
        else:
            vd.v.setdefault(key, VERIFIED)


def _tate_nondegenerate_k(ctx, vd, eng, tries=8):
    """Each basis vector of J(F_{q^k})[l] pairs non-trivially with some class of J(F_{q^k})."""
    ell = ctx.ell
    k = ctx.k
    A = la.mat_sub(la.mat_pow(ctx.M, k, ell), la.identity(4), ell)
    vecs = la.kernel(A, ell)
    if not vecs:
        vd.set("tate_nondegenerate_over_Fqk", False, "J(F_q^k)[l] is trivial")
        return
    xs = [ctx.combine(v) for v in vecs]
    ys = [eng.random_class(k) for _ in range(tries)]
    raw = eng.tate_raw_values(xs, ys, k)
    # the left kernel is trivial exactly when the value matrix has full row rank
    r = la.rank(raw, ell)
    vd.set("tate_nondegenerate_over_Fqk", r == len(vecs),
           "pairing values on J(F_q^k)[l] x %d random classes have rank %d < %d" % (tries, r, len(vecs)))
