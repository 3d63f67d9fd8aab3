"""Genus-2 curves y^2 = h(x), deg h = 5, and arithmetic on their Jacobians.

Divisor classes are Mumford pairs (u, v): u monic of degree <= 2 and
u | v^2 - h.  The identity is (1, 0).  Composition and reduction follow
Cantor; add_with_functions also returns the factors of the function whose
divisor is D1 + D2 - D3, which is what a Miller loop needs.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .algebra.fields import ExtensionField, FieldTooLarge, PrimeField, find_irreducible, make_field
from .algebra.numtheory import (
    companion,
    discriminant,
    int_det,
    int_matpow,
    int_poly_eval,
    monic_quartic_is_irreducible,
)
from .algebra.poly import PolyRing


class CurveError(ValueError):
    pass


class SingularCurve(CurveError):
    pass


class WrongGenus(CurveError):
    pass


class NoDegree5Model(CurveError):
    pass


class NotWeilPolynomial(AssertionError):
    pass


POINT_COUNT_LIMIT = 10 ** 6


def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _fp_poly_gcd_is_one(a, b, p):
    a, b = _trim([x % p for x in a]), _trim([x % p for x in b])
    while b:
        inv = pow(b[-1], -1, p)
        while len(a) >= len(b):
            c = a[-1] * inv % p
            s = len(a) - len(b)
            for j, y in enumerate(b):
                a[s + j] = (a[s + j] - c * y) % p
            a = _trim(a)
            if not a:
                break
        a, b = b, a
    return len(a) == 1


def _fp_derivative(f, p):
    return [(i * c) % p for i, c in enumerate(f)][1:]


def _fp_eval(f, x, p):
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % p
    return acc


@dataclass
class HyperellipticCurve:
    """Imaginary model y^2 = h(x) over F_p, h of degree 5 (ascending ints)."""

    p: int
    h: tuple
    source_g: tuple = ()
    source_h: tuple = ()

    def to_json(self):
        return {"p": self.p, "g": list(self.source_g), "h": list(self.source_h), "model_h": list(self.h)}

    def label(self):
        return "p=%d h=%s" % (self.p, list(self.h))


def build_curve(g, h, p):
    """Normalize y^2 + g(x) y = h(x) over F_p to y^2 = h'(x) with deg h' = 5.

    Completing the square gives y^2 = h + g^2/4.  A degree-6 right side is
    moved to degree 5 by sending a rational root to infinity.
    """
    PrimeField(p)  # validates p
    g = [c % p for c in g]
    h = [c % p for c in h]
    inv4 = pow(4, -1, p)
    n = max(len(h), 2 * len(g) - 1 if g else 0)
    f = [0] * max(n, 1)
    for i, c in enumerate(h):
        f[i] = (f[i] + c) % p
    for i, a in enumerate(g):
        for j, b in enumerate(g):
            f[i + j] = (f[i + j] + a * b * inv4) % p
    f = _trim(f)
    deg = len(f) - 1
    if deg not in (5, 6):
        raise WrongGenus("right-hand side has degree %d, genus 2 needs 5 or 6" % deg)
    if not _fp_poly_gcd_is_one(f, _fp_derivative(f, p), p):
        raise SingularCurve("h has a repeated root over the algebraic closure")
    if deg == 6:
        root = next((r for r in range(p) if _fp_eval(f, r, p) == 0), None)
        if root is None:
            raise NoDegree5Model("degree-6 model without a rational root")
        # x = root + 1/t, y = Y / t^3 gives Y^2 = t^6 f(root + 1/t)
        shifted = _taylor_shift(f, root, p)
        f = _trim(list(reversed(shifted)))
    f = tuple(c % p for c in f)
    if len(f) != 6:
        raise WrongGenus("normalized model does not have degree 5")
    if not _fp_poly_gcd_is_one(list(f), _fp_derivative(list(f), p), p):
        raise SingularCurve("h has a repeated root over the algebraic closure")
    return HyperellipticCurve(p, f, tuple(g), tuple(h))


def _taylor_shift(f, r, p):
    """Coefficients of f(x + r)."""
    c = list(f)
    n = len(c)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            c[j] = (c[j] + r * c[j + 1]) % p
    return c


def curve_from_json(obj):
    try:
        p = int(obj["p"])
        g = [int(c) for c in obj.get("g", [])]
        h = [int(c) for c in obj["h"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise CurveError("malformed curve JSON: %s" % exc)
    return build_curve(g, h, p)


def load_curve(path):
    with open(path) as fh:
        return curve_from_json(json.load(fh))


@dataclass(frozen=True)
class Divisor:
    u: tuple
    v: tuple


class Jacobian:
    """The Jacobian of a curve over F_p, read over a fixed extension field."""

    def __init__(self, curve, F=None):
        self.curve = curve
        self.F = F if F is not None else PrimeField(curve.p)
        self.R = PolyRing(self.F)
        self.f = self.R.from_ints(curve.h)
        self.identity = Divisor(self.R.one, ())
        self.degree = self.F.degree

    def __repr__(self):
        return "Jacobian(%s over F_%d^%d)" % (list(self.curve.h), self.curve.p, self.degree)

    def is_identity(self, D):
        return D.u == self.R.one

    def is_valid(self, D):
        R = self.R
        if not D.u or not self.F.is_one(D.u[-1]) or R.deg(D.u) > 2:
            return False
        if len(D.v) >= len(D.u):
            return False
        return not R.mod(R.sub(R.sqr(D.v), self.f), D.u)

    def neg(self, D):
        return Divisor(D.u, self.R.neg(D.v))

    def point(self, x, y):
        """Class of P - infinity for an affine point P = (x, y)."""
        R = self.R
        return Divisor((self.F.neg(x), self.F.one), R.const(y))

    def _compose(self, D1, D2):
        R = self.R
        u1, v1 = D1.u, D1.v
        u2, v2 = D2.u, D2.v
        d1, e1, e2 = R.xgcd(u1, u2)
        if len(d1) == 1:
            u = R.mul(u1, u2)
            v = R.add(R.mul(R.mul(e1, u1), v2), R.mul(R.mul(e2, u2), v1))
            return u, R.mod(v, u), R.one
        d, c1, c2 = R.xgcd(d1, R.add(v1, v2))
        s1 = R.mul(c1, e1)
        s2 = R.mul(c1, e2)
        if not d:
            # both zero: D2 = D1 = identity handled elsewhere
            d = d1
        u = R.exact_div(R.mul(u1, u2), R.sqr(d))
        num = R.add(R.add(R.mul(R.mul(s1, u1), v2), R.mul(R.mul(s2, u2), v1)),
                    R.mul(c2, R.add(R.mul(v1, v2), self.f)))
        v = R.exact_div(num, d)
        return u, R.mod(v, u), d

    def _fast(self, D1, D2):
        """Generic-position addition or doubling of two degree-2 classes.

        Returns (u3, v3, l) where y - l(x) is the cubic through the four
        points involved and u3 is the residual intersection, or None when
        the inputs are in special position.
        """
        u1, v1 = D1.u, D1.v
        u2, v2 = D2.u, D2.v
        if len(u1) != 3 or len(u2) != 3:
            return None
        F = self.F
        mul, add, sub = F.mul, F.add, F.sub
        zero = F.zero
        a0, a1 = u1[0], u1[1]
        p0 = v1[0] if v1 else zero
        p1 = v1[1] if len(v1) > 1 else zero
        f = self.f
        f4 = f[4]
        f5 = f[5]
        if D1 == D2:
            # l = v + s u with l^2 = f mod u^2
            # k = (f - v^2) / u, only k mod u is needed
            vv = self.R.sqr(v1)
            g = [sub(f[i], vv[i]) if i < len(vv) else f[i] for i in range(6)]
            k3 = g[5]
            k2 = sub(g[4], mul(a1, k3))
            k1 = sub(sub(g[3], mul(a1, k2)), mul(a0, k3))
            k0 = sub(sub(g[2], mul(a1, k1)), mul(a0, k2))
            # reduce k3 x^3 + k2 x^2 + k1 x + k0 mod u
            m2 = sub(k2, mul(a1, k3))
            w1 = sub(sub(k1, mul(a0, k3)), mul(a1, m2))
            w0 = sub(k0, mul(a0, m2))
            z1 = add(p1, p1)
            z0 = add(p0, p0)
            b0, b1 = a0, a1
            U3 = add(a1, a1)
            U2 = add(mul(a1, a1), add(a0, a0))
        else:
            if u1 == u2:
                return None
            b0, b1 = u2[0], u2[1]
            q0 = v2[0] if v2 else zero
            q1 = v2[1] if len(v2) > 1 else zero
            z1 = sub(a1, b1)
            z0 = sub(a0, b0)
            w1 = sub(q1, p1)
            w0 = sub(q0, p0)
            U3 = add(a1, b1)
            U2 = add(add(a0, b0), mul(a1, b1))
        # inverse of z1 x + z0 modulo x^2 + b1 x + b0 is (z1 x + c) / r
        c = sub(mul(z1, b1), z0)
        r = sub(mul(z0, c), mul(mul(z1, z1), b0))
        if F.is_zero(r):
            return None
        wz = mul(w1, z1)
        t1 = sub(add(mul(w1, c), mul(w0, z1)), mul(wz, b1))
        t0 = sub(mul(w0, c), mul(wz, b0))
        if F.is_zero(t1):
            return None
        winv = F.inv(mul(r, t1))
        rinv = mul(t1, winv)
        s1 = mul(t1, rinv)
        s0 = mul(t0, rinv)
        s1inv = mul(mul(r, r), winv)
        # l = s u1 + v1
        l3 = s1
        l2 = add(mul(s1, a1), s0)
        l1 = add(add(mul(s1, a0), mul(s0, a1)), p1)
        l0 = add(mul(s0, a0), p0)
        # quotient of f - l^2 by U = x^4 + U3 x^3 + U2 x^2 + ...
        c6 = F.neg(mul(l3, l3))
        c5 = sub(f5, add(mul(l3, l2), mul(l3, l2)))
        c4 = sub(sub(f4, mul(l2, l2)), add(mul(l3, l1), mul(l3, l1)))
        q1 = sub(c5, mul(c6, U3))
        q0 = sub(sub(c4, mul(q1, U3)), mul(c6, U2))
        lead = F.neg(mul(s1inv, s1inv))  # 1 / c6
        e1 = mul(q1, lead)
        e0 = mul(q0, lead)
        # v3 = -(l mod x^2 + e1 x + e0)
        r1 = add(sub(mul(l3, sub(mul(e1, e1), e0)), mul(l2, e1)), l1)
        r0 = add(sub(mul(l3, mul(e1, e0)), mul(l2, e0)), l0)
        R = self.R
        u3 = (e0, e1, F.one)
        v3 = R.normalize([F.neg(r0), F.neg(r1)])
        l = R.normalize([l0, l1, l2, l3])
        return u3, v3, l

    def add_with_functions(self, D1, D2):
        """(D3, factors) with D1 + D2 = D3 + div(prod of factors).

        Each factor is (kind, poly, sign): kind 'x' means poly(x), kind 'y'
        means y - poly(x); sign is +1 for numerator and -1 for denominator.
        """
        R = self.R
        fast = self._fast(D1, D2)
        if fast is not None:
            u3, v3, l = fast
            return Divisor(u3, v3), [("y", l, 1), ("x", u3, -1)]
        u, v, d = self._compose(D1, D2)
        factors = []
        if len(d) > 1:
            factors.append(("x", d, 1))
        while R.deg(u) > 2:
            u2 = R.monic(R.exact_div(R.sub(self.f, R.sqr(v)), u))
            factors.append(("y", v, 1))
            factors.append(("x", u2, -1))
            v = R.mod(R.neg(v), u2)
            u = u2
        return Divisor(u, v), factors

    def add(self, D1, D2):
        if D1.u == self.R.one:
            return D2
        if D2.u == self.R.one:
            return D1
        fast = self._fast(D1, D2)
        if fast is not None:
            return Divisor(fast[0], fast[1])
        return self.add_generic(D1, D2)

    def add_generic(self, D1, D2):
        R = self.R
        u, v, _ = self._compose(D1, D2)
        while R.deg(u) > 2:
            u2 = R.monic(R.exact_div(R.sub(self.f, R.sqr(v)), u))
            v = R.mod(R.neg(v), u2)
            u = u2
        return Divisor(u, v)

    def sub(self, D1, D2):
        return self.add(D1, self.neg(D2))

    def double(self, D):
        return self.add(D, D)

    def mul(self, n, D):
        if n < 0:
            n, D = -n, self.neg(D)
        result = self.identity
        if n == 0:
            return result
        for bit in bin(n)[2:]:
            result = self.add(result, result)
            if bit == "1":
                result = self.add(result, D)
        return result

    def frobenius(self, D, e=1):
        R = self.R
        return Divisor(R.frobenius(D.u, e), R.frobenius(D.v, e))

    def is_rational_over(self, D, e):
        """Whether D is fixed by the e-th power of Frobenius."""
        return self.frobenius(D, e) == D

    def random_point(self, rng, tries=1000):
        F = self.F
        for _ in range(tries):
            x = F.random(rng)
            y = F.sqrt(self.R.eval(self.f, x))
            if y is None:
                continue
            if rng.randrange(2):
                y = F.neg(y)
            return x, y
        raise RuntimeError("no affine point found")

    def random(self, rng):
        """A random class in J(F).

        Draws a monic u of degree <= 2 and, when possible, a v with
        u | v^2 - h.  Split u gives a sum of two affine points; irreducible u
        gives a conjugate pair of points over the quadratic extension.  The
        distribution is not uniform but reaches every class.
        """
        F = self.F
        R = self.R
        Q = F.order
        while True:
            r = rng.randrange(Q * Q + Q + 1)
            if r == Q * Q + Q:
                return self.identity
            if r >= Q * Q:
                x0 = F.from_index(r - Q * Q)
                y = F.sqrt(R.eval(self.f, x0))
                if y is None:
                    continue
                if rng.randrange(2):
                    y = F.neg(y)
                return self.point(x0, y)
            u1 = F.from_index(r // Q)
            u0 = F.from_index(r % Q)
            disc = F.sub(F.sqr(u1), F.smul(4, u0))
            if F.is_zero(disc):
                continue
            s = F.sqrt(disc)
            if s is not None:
                inv2 = F.inv(F.from_int(2))
                x1 = F.mul(F.sub(s, u1), inv2)
                x2 = F.mul(F.sub(F.neg(s), u1), inv2)
                y1 = F.sqrt(R.eval(self.f, x1))
                y2 = F.sqrt(R.eval(self.f, x2))
                if y1 is None or y2 is None:
                    continue
                if rng.randrange(2):
                    y1 = F.neg(y1)
                if rng.randrange(2):
                    y2 = F.neg(y2)
                return self.add(self.point(x1, y1), self.point(x2, y2))
            K = _QuotientField(F, u1, u0)
            hv = K.reduce(self.f)
            w = K.sqrt(hv, rng)
            if w is None:
                continue
            if rng.randrange(2):
                w = K.neg(w)
            return Divisor((u0, u1, F.one), R.normalize(list(w)))


class _QuotientField:
    """F[t]/(t^2 + u1 t + u0) for an irreducible quadratic."""

    def __init__(self, F, u1, u0):
        self.F = F
        self.u1 = u1
        self.u0 = u0
        self.order = F.order ** 2

    def reduce(self, poly):
        F = self.F
        a0, a1 = F.zero, F.zero
        for c in reversed(poly):
            # (a0 + a1 t) * t + c
            n0 = F.sub(c, F.mul(a1, self.u0))
            n1 = F.sub(a0, F.mul(a1, self.u1))
            a0, a1 = n0, n1
        return (a0, a1)

    def mul(self, a, b):
        F = self.F
        t = F.mul(a[1], b[1])
        c0 = F.sub(F.mul(a[0], b[0]), F.mul(self.u0, t))
        c1 = F.sub(F.add(F.mul(a[0], b[1]), F.mul(a[1], b[0])), F.mul(self.u1, t))
        return (c0, c1)

    def neg(self, a):
        F = self.F
        return (F.neg(a[0]), F.neg(a[1]))

    def pow(self, a, e):
        r = (self.F.one, self.F.zero)
        while e:
            if e & 1:
                r = self.mul(r, a)
            e >>= 1
            if e:
                a = self.mul(a, a)
        return r

    def is_one(self, a):
        return self.F.is_one(a[0]) and self.F.is_zero(a[1])

    def sqrt(self, a, rng):
        F = self.F
        if F.is_zero(a[0]) and F.is_zero(a[1]):
            return a
        Q = self.order
        if not self.is_one(self.pow(a, (Q - 1) // 2)):
            return None
        s, t = 0, Q - 1
        while t % 2 == 0:
            s += 1
            t //= 2
        while True:
            z = (F.random(rng), F.random(rng))
            if F.is_zero(z[0]) and F.is_zero(z[1]):
                continue
            if not self.is_one(self.pow(z, (Q - 1) // 2)):
                break
        m = s
        c = self.pow(z, t)
        x = self.pow(a, (t + 1) // 2)
        b = self.pow(a, t)
        while not self.is_one(b):
            i, b2 = 0, b
            while not self.is_one(b2):
                b2 = self.mul(b2, b2)
                i += 1
            w = c
            for _ in range(m - i - 1):
                w = self.mul(w, w)
            x = self.mul(x, w)
            c = self.mul(w, w)
            b = self.mul(b, c)
            m = i
        return x


def random_divisor(curve, d, rng, F=None):
    if F is None:
        F = make_field(curve.p, d)
    return Jacobian(curve, F).random(rng)


def cantor_add(jac, D1, D2):
    return jac.add(D1, D2)


def scalar_mul(jac, n, D):
    return jac.mul(n, D)


def divisor_frobenius(jac, D, e=1):
    return jac.frobenius(D, e)


# point counting

def _vec_mul(a, b, mod, p):
    """Multiply arrays of field elements (shape (N, d)) modulo a monic mod."""
    d = a.shape[1]
    c = np.zeros((a.shape[0], 2 * d - 1), dtype=np.int64)
    for i in range(d):
        for j in range(d):
            c[:, i + j] += a[:, i] * b[:, j]
    c %= p
    for k in range(2 * d - 2, d - 1, -1):
        ck = c[:, k]
        for i in range(d):
            if mod[i]:
                c[:, k - d + i] = (c[:, k - d + i] - ck * mod[i]) % p
    return c[:, :d] % p


def enumerate_classes(jac):
    """All reduced divisor classes of J(F) by listing Mumford pairs.

    u runs over monic polynomials of degree <= 2 and v over polynomials of
    degree < deg u with u | v^2 - h.  Intended for tiny fields only.
    """
    F = jac.F
    R = jac.R
    if F.order > 50:
        raise FieldTooLarge("class enumeration is limited to fields with at most 50 elements")
    elems = list(F.elements())
    h = jac.f
    out = [jac.identity]
    for a in elems:
        u = (a, F.one)
        for b in elems:
            v = R.normalize((b,))
            if not R.mod(R.sub(R.sqr(v), h), u):
                out.append(Divisor(u, v))
    for a0 in elems:
        for a1 in elems:
            u = (a0, a1, F.one)
            for b0 in elems:
                for b1 in elems:
                    v = R.normalize((b0, b1))
                    if not R.mod(R.sub(R.sqr(v), h), u):
                        out.append(Divisor(u, v))
    return out


def count_points(curve, d):
    """Number of points of the curve over F_{p^d}, one point at infinity."""
    p = curve.p
    Q = p ** d
    if Q > POINT_COUNT_LIMIT:
        raise FieldTooLarge("F_%d^%d has more than %d elements" % (p, d, POINT_COUNT_LIMIT))
    idx = np.arange(Q, dtype=np.int64)
    digits = np.empty((Q, d), dtype=np.int64)
    rest = idx.copy()
    for i in range(d):
        digits[:, i] = rest % p
        rest //= p
    mod = list(find_irreducible(p, d)) if d > 1 else [0, 1]
    if d == 1:
        sq = (idx * idx) % p
        val = np.zeros(Q, dtype=np.int64)
        for c in reversed(curve.h):
            val = (val * idx + c) % p
        vidx = val
    else:
        sqd = _vec_mul(digits, digits, mod, p)
        val = np.zeros((Q, d), dtype=np.int64)
        for c in reversed(curve.h):
            val = _vec_mul(val, digits, mod, p)
            val[:, 0] = (val[:, 0] + c) % p
        weights = p ** np.arange(d, dtype=np.int64)
        sq = sqd @ weights
        vidx = val @ weights
    roots = np.bincount(sq, minlength=Q)
    return 1 + int(roots[vidx].sum())


@dataclass
class FrobeniusProfile:
    q: int
    N1: int
    N2: int
    s1: int
    s2: int
    P: tuple  # ascending integer coefficients of the Frobenius polynomial
    _orders: dict = field(default_factory=dict, repr=False)

    def jacobian_order(self, d):
        """|J(F_{q^d})| = det(C^d - I) for the companion matrix C of P."""
        if d not in self._orders:
            C = int_matpow(companion(list(self.P)), d)
            for i in range(4):
                C[i][i] -= 1
            self._orders[d] = int_det(C)
        return self._orders[d]

    @property
    def jacobian_orders(self):
        return {d: self.jacobian_order(d) for d in (1, 2, 3, 4)}

    def is_irreducible(self):
        return monic_quartic_is_irreducible(list(self.P))

    def discriminant(self):
        return discriminant(list(self.P))

    def to_json(self):
        return {
            "q": self.q,
            "N1": self.N1,
            "N2": self.N2,
            "s1": self.s1,
            "s2": self.s2,
            "P": list(self.P),
            "jacobian_order": self.jacobian_order(1),
        }


def frobenius_poly(q, s1, s2):
    return (q * q, -q * s1, s2, -s1, 1)


def frobenius_profile(curve):
    q = curve.p
    N1 = count_points(curve, 1)
    N2 = count_points(curve, 2)
    s1 = q + 1 - N1
    two_s2 = N2 - q * q - 1 + s1 * s1
    if two_s2 % 2:
        raise NotWeilPolynomial("second symmetric function is not an integer")
    s2 = two_s2 // 2
    P = frobenius_poly(q, s1, s2)
    prof = FrobeniusProfile(q, N1, N2, s1, s2, P)
    check_weil_bounds(prof)
    return prof


def check_weil_bounds(prof):
    q = prof.q
    if abs(prof.s1) > 4 * math.sqrt(q) or abs(prof.s2) > 6 * q:
        raise NotWeilPolynomial("coefficients exceed the Weil bounds")
    roots = np.roots(list(reversed(prof.P)))
    if np.max(np.abs(np.abs(roots) - math.sqrt(q))) > 1e-6:
        raise NotWeilPolynomial("roots do not all have absolute value sqrt(q)")
    if int_poly_eval(list(prof.P), 1) != prof.jacobian_order(1):
        raise NotWeilPolynomial("P(1) differs from the companion-matrix order")
    return True
