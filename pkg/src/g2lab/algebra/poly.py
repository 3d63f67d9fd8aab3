"""Dense univariate polynomials over a field object.

Polynomials are tuples of field elements in ascending order with no trailing
zeros; the zero polynomial is the empty tuple.
"""


class PolyRing:
    def __init__(self, field):
        self.F = field
        self.zero = ()
        self.one = (field.one,)
        self.x = (field.zero, field.one)

    def normalize(self, coeffs):
        F = self.F
        c = list(coeffs)
        while c and F.is_zero(c[-1]):
            c.pop()
        return tuple(c)

    def from_ints(self, ints):
        F = self.F
        return self.normalize([F.from_int(c) for c in ints])

    def const(self, c):
        return () if self.F.is_zero(c) else (c,)

    def deg(self, a):
        return len(a) - 1

    def lc(self, a):
        return a[-1]

    def add(self, a, b):
        F = self.F
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, y in enumerate(b):
            out[i] = F.add(out[i], y)
        return self.normalize(out) if len(a) == len(b) else tuple(out)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def neg(self, a):
        F = self.F
        return tuple([F.neg(c) for c in a])

    def scale(self, a, c):
        F = self.F
        if F.is_zero(c):
            return ()
        return tuple([F.mul(x, c) for x in a])

    def mul(self, a, b):
        if not a or not b:
            return ()
        F = self.F
        mul, add = F.mul, F.add
        out = [F.zero] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if F.is_zero(x):
                continue
            for j, y in enumerate(b):
                out[i + j] = add(out[i + j], mul(x, y))
        return self.normalize(out)

    def sqr(self, a):
        return self.mul(a, a)

    def divmod(self, a, b):
        if not b:
            raise ZeroDivisionError("polynomial division by zero")
        F = self.F
        db = len(b) - 1
        if len(a) - 1 < db:
            return (), a
        r = list(a)
        monic = F.is_one(b[-1])
        inv = None if monic else F.inv(b[-1])
        q = [F.zero] * (len(a) - db)
        for k in range(len(a) - 1, db - 1, -1):
            c = r[k] if monic else F.mul(r[k], inv)
            if F.is_zero(c):
                continue
            q[k - db] = c
            for j in range(db):
                r[k - db + j] = F.sub(r[k - db + j], F.mul(c, b[j]))
            r[k] = F.zero
        return self.normalize(q), self.normalize(r[:db])

    def mod(self, a, b):
        if len(a) < len(b):
            return a
        return self.divmod(a, b)[1]

    def exact_div(self, a, b):
        q, r = self.divmod(a, b)
        if r:
            raise ArithmeticError("inexact polynomial division")
        return q

    def monic(self, a):
        if not a:
            return a
        F = self.F
        if F.is_one(a[-1]):
            return a
        return self.scale(a, F.inv(a[-1]))

    def xgcd(self, a, b):
        """(g, s, t) with g = s*a + t*b monic (or zero if both are zero)."""
        F = self.F
        r0, r1 = a, b
        s0, s1 = self.one, ()
        t0, t1 = (), self.one
        while r1:
            q, r = self.divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, self.sub(s0, self.mul(q, s1))
            t0, t1 = t1, self.sub(t0, self.mul(q, t1))
        if not r0:
            return (), (), ()
        c = F.inv(r0[-1])
        return self.scale(r0, c), self.scale(s0, c), self.scale(t0, c)

    def gcd(self, a, b):
        while b:
            a, b = b, self.mod(a, b)
        return self.monic(a)

    def eval(self, a, x):
        F = self.F
        acc = F.zero
        for c in reversed(a):
            acc = F.add(F.mul(acc, x), c)
        return acc

    def derivative(self, a):
        F = self.F
        return self.normalize([F.smul(i, c) for i, c in enumerate(a)][1:])

    def frobenius(self, a, e=1):
        F = self.F
        return tuple([F.frobenius(c, e) for c in a])

    def to_json(self, a):
        return [self.F.to_json(c) for c in a]
