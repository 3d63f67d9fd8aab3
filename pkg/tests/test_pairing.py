import random

import pytest

from g2lab import config
from g2lab.algebra import linalg as la
from g2lab.curve import build_curve, frobenius_profile
from g2lab.pairing import (
    FieldMismatch,
    PairingEngine,
    ShapeViolation,
    classify_weil_matrix,
    pairing_matrix,
    tate_tame_pairing,
    weil_pairing,
)

CASES = {
    "nondiagonal": (41, (29, 19, 19, 0, 0, 1), 3),
    "diagonal_k2": (41, (11, 19, 3, 12, 0, 1), 7),
}


@pytest.fixture(scope="module", params=sorted(CASES))
def ctx(request):
    from g2lab.torsion import ell_torsion_basis

    p, h, ell = CASES[request.param]
    curve = build_curve([], list(h), p)
    return ell_torsion_basis(curve, frobenius_profile(curve), ell, config.derive_rng(0, "pairing", request.param))


def _engine(ctx, seed):
    return PairingEngine(ctx, random.Random(seed))


def test_weil_is_alternating_and_bilinear(ctx):
    eng = _engine(ctx, 1)
    rng = random.Random(2)
    ell = ctx.ell
    jac = ctx.jac
    for _ in range(6):
        x, x2, y = ctx.random_torsion(rng), ctx.random_torsion(rng), ctx.random_torsion(rng)
        assert weil_pairing(eng, x, x) == 0
        assert (weil_pairing(eng, x, y) + weil_pairing(eng, y, x)) % ell == 0
        lhs = weil_pairing(eng, jac.add(x, x2), y)
        assert lhs == (weil_pairing(eng, x, y) + weil_pairing(eng, x2, y)) % ell
        assert weil_pairing(eng, jac.mul(2, x), y) == 2 * weil_pairing(eng, x, y) % ell


def test_weil_is_independent_of_randomizers(ctx):
    a, b = _engine(ctx, 3), _engine(ctx, 4)
    assert a.weil_many(ctx.basis, ctx.basis) == b.weil_many(ctx.basis, ctx.basis)


def test_weil_matrix_invariants(ctx):
    eng = _engine(ctx, 5)
    ell = ctx.ell
    E = pairing_matrix(eng, "weil", ctx.basis, ctx.M)
    assert la.det(E, ell) != 0
    assert la.transpose(E) == la.mat_scale(E, -1, ell)
    lhs = la.mat_mul(la.mat_mul(la.transpose(ctx.M), E, ell), ctx.M, ell)
    assert lhs == la.mat_scale(E, ctx.q, ell)
    # value-level Galois invariance: e(F x, F y) = q e(x, y)
    rng = random.Random(6)
    x, y = ctx.random_torsion(rng), ctx.random_torsion(rng)
    assert weil_pairing(eng, ctx.frobenius(x), ctx.frobenius(y)) == ctx.q * weil_pairing(eng, x, y) % ell


def test_weil_equals_tate_difference(ctx):
    eng = _engine(ctx, 7)
    if not eng.normalized:
        pytest.skip("tame Tate values are not normalizable when l^2 divides q^kappa - 1")
    rng = random.Random(8)
    ell = ctx.ell
    for _ in range(5):
        x, y = ctx.random_torsion(rng), ctx.random_torsion(rng)
        t = (tate_tame_pairing(eng, x, y, ctx.kappa) - tate_tame_pairing(eng, y, x, ctx.kappa)) % ell
        assert t == weil_pairing(eng, x, y)


def test_tate_bilinear_and_representative_independent(ctx):
    a, b = _engine(ctx, 9), _engine(ctx, 10)
    rng = random.Random(11)
    jac = ctx.jac
    ell = ctx.ell
    for _ in range(4):
        x, y, y2 = ctx.random_torsion(rng), ctx.random_torsion(rng), ctx.random_torsion(rng)
        assert a.tate(x, y) == b.tate(x, y)
        assert a.tate(x, jac.add(y, y2)) == (a.tate(x, y) + a.tate(x, y2)) % ell
        assert a.tate(jac.add(y, y2), x) == (a.tate(y, x) + a.tate(y2, x)) % ell


def test_tate_matrix_galois_invariant(ctx):
    eng = _engine(ctx, 12)
    T = pairing_matrix(eng, "tate", ctx.basis, ctx.M)
    ell = ctx.ell
    lhs = la.mat_mul(la.mat_mul(la.transpose(ctx.M), T, ell), ctx.M, ell)
    assert lhs == la.mat_scale(T, ctx.q, ell)


def test_pairing_matrix_rejects_wrong_frobenius(ctx):
    eng = _engine(ctx, 13)
    bad = la.mat_scale(la.identity(4), 2, ctx.ell)
    with pytest.raises(ShapeViolation):
        pairing_matrix(eng, "weil", ctx.basis, bad)
    with pytest.raises(ValueError):
        pairing_matrix(eng, "other", ctx.basis, ctx.M)


def test_tate_over_wrong_field(ctx):
    eng = _engine(ctx, 14)
    if ctx.k == ctx.kappa:
        pytest.skip("k equals kappa")
    rng = random.Random(15)
    x = ctx.random_torsion(rng)
    bad = next(d for d in range(1, ctx.kappa) if d not in (ctx.k,))
    with pytest.raises(FieldMismatch):
        eng.tate_raw_values([x], [x], bad)


def test_weil_shape_on_canonical_basis(ctx):
    from g2lab.torsion import classify_frobenius, rational_torsion_rank, transformed_basis

    if rational_torsion_rank(ctx, 1) != 1:
        pytest.skip("J(F_q)[l] is not cyclic")
    cls = classify_frobenius(ctx)
    B = transformed_basis(ctx, cls.S)
    E = _engine(ctx, 16).weil_many(B, B)
    shape = classify_weil_matrix(E, ctx)
    assert shape.a and shape.b
