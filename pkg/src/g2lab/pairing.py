"""Weil and tame Tate pairings on J[l] via Miller loops, and their matrices.

Pairing values are returned as exponents in Z/l with respect to one fixed
primitive l-th root of unity zeta = g^((Q-1)/l), g the least generator of
F_Q^* with Q = q^kappa.

Functions are evaluated on degree-zero divisors E1 - E2 with E1, E2
effective of degree 2 and affine, built as E_{y+z} - E_z for a random
class z.  A Miller function f with div(f) = n D - D_n is evaluated
factor by factor through norms from F_Q[x]/(U) for each target (U, V).
"""

from dataclasses import dataclass

from . import config
from .algebra import linalg as la
from .torsion import OutOfScope, rational_torsion_rank


class PairingError(Exception):
    pass


class SupportCollision(PairingError):
    pass


class ZeroEvaluation(PairingError):
    pass


class FieldMismatch(PairingError):
    pass


class ShapeViolation(PairingError):
    pass


class DichotomyViolation(PairingError):
    pass


def _norm_linear(F, U, a0, a1):
    """Product of a0 + a1 x over the roots of the monic U (degree 1 or 2)."""
    if len(U) == 3:
        u0, u1 = U[0], U[1]
        t = F.sub(F.add(F.sqr(a0), F.mul(u0, F.sqr(a1))), F.mul(u1, F.mul(a0, a1)))
        return t
    if len(U) == 2:
        return F.sub(a0, F.mul(a1, U[0]))
    return F.one


def _reduce_quadratic(F, c, u0, u1):
    """c mod x^2 + u1 x + u0 as (a0, a1); c is a coefficient list."""
    c = list(c)
    for k in range(len(c) - 1, 1, -1):
        t = c[k]
        if F.is_zero(t):
            continue
        c[k - 1] = F.sub(c[k - 1], F.mul(t, u1))
        c[k - 2] = F.sub(c[k - 2], F.mul(t, u0))
    a0 = c[0] if c else F.zero
    a1 = c[1] if len(c) > 1 else F.zero
    return a0, a1


def evaluate_factor(jac, kind, poly, target):
    """Product of the factor over the points of the effective divisor target."""
    R = jac.R
    F = jac.F
    U, V = target.u, target.v
    if len(U) == 3 and F.is_one(U[2]):
        if kind == "x":
            a0, a1 = _reduce_quadratic(F, poly, U[0], U[1])
        else:
            a0, a1 = _reduce_quadratic(F, R.sub(V, poly), U[0], U[1])
        return _norm_linear(F, U, a0, a1)
    if kind == "x":
        r = R.mod(poly, U)
    else:
        r = R.mod(R.sub(V, poly), U)
    a0 = r[0] if r else F.zero
    a1 = r[1] if len(r) > 1 else F.zero
    return _norm_linear(F, U, a0, a1)


def miller_function_eval(jac, D, n, targets):
    """Values of f_{n,D} at each target, with div f_{n,D} = n D - (nD reduced).

    Returns (values, nD).  Raises SupportCollision if a target meets the
    support of one of the intermediate line functions.
    """
    F = jac.F
    nums = [F.one] * len(targets)
    dens = [F.one] * len(targets)

    def apply(factors):
        for kind, poly, sign in factors:
            for t, E in enumerate(targets):
                val = evaluate_factor(jac, kind, poly, E)
                if F.is_zero(val):
                    raise SupportCollision("target meets the support of a Miller factor")
                if sign > 0:
                    nums[t] = F.mul(nums[t], val)
                else:
                    dens[t] = F.mul(dens[t], val)

    if n <= 0:
        raise ValueError("Miller loop needs n >= 1")
    A = D
    for bit in bin(n)[3:]:
        nums = [F.sqr(x) for x in nums]
        dens = [F.sqr(x) for x in dens]
        A, factors = jac.add_with_functions(A, A)
        apply(factors)
        if bit == "1":
            A, factors = jac.add_with_functions(A, D)
            apply(factors)
    return [F.div(a, b) for a, b in zip(nums, dens)], A


POOL_SIZE = 12


@dataclass
class _Rep:
    """A degree-zero divisor E1 - E2 in the class of some torsion element."""
    shifted: object
    base: object


class PairingEngine:
    def __init__(self, ctx, rng, retry_budget=None):
        self.ctx = ctx
        self.jac = ctx.jac
        self.F = ctx.jac.F
        self.ell = ctx.ell
        self.q = ctx.q
        self.rng = rng
        self.retry_budget = retry_budget or config.budget("retry_budget")
        F = self.F
        g = F.primitive_element()
        self.zeta = F.pow(g, (F.order - 1) // self.ell)
        self._dlog = {}
        acc = F.one
        for e in range(self.ell):
            self._dlog[acc] = e
            acc = F.mul(acc, self.zeta)
        # (q^d - 1)/l mod l relates raw tame Tate values over F_{q^d} to the Weil pairing
        self.final_exp = {}
        self.scale = {}
        for d in sorted({ctx.k, ctx.kappa}):
            m = (self.q ** d - 1) // self.ell
            self.final_exp[d] = m
            self.scale[d] = m % self.ell
        self.normalized = self.scale[ctx.kappa] != 0
        self.retries = 0
        self._pool = {}

    # utilities
    def dlog(self, z):
        e = self._dlog.get(z)
        if e is None:
            raise PairingError("value is not an l-th root of unity")
        return e

    def random_class(self, d):
        """A random class in J(F_{q^d}), d dividing kappa."""
        jac = self.jac
        kappa = self.ctx.kappa
        w = jac.random(self.rng)
        if d == kappa:
            return w
        if kappa % d:
            raise FieldMismatch("degree %d does not divide kappa = %d" % (d, kappa))
        acc = w
        conj = w
        for _ in range(kappa // d - 1):
            conj = jac.frobenius(conj, d)
            acc = jac.add(acc, conj)
        return acc

    def _randomizer(self, d):
        """Sum of two members of a pool of random classes of J(F_{q^d}).

        Fresh random classes are expensive over large fields; a pool of
        POOL_SIZE classes gives POOL_SIZE^2 cheap randomizers.
        """
        pool = self._pool.get(d)
        if pool is None:
            pool = self._pool[d] = [self.random_class(d) for _ in range(POOL_SIZE)]
        i = self.rng.randrange(POOL_SIZE)
        j = self.rng.randrange(POOL_SIZE)
        return self.jac.add(pool[i], pool[j])

    def _reps(self, ys, d):
        """Representatives E_{y+z} - E_z sharing one randomizer z."""
        jac = self.jac
        for _ in range(self.retry_budget):
            z = self._randomizer(d)
            if len(z.u) != 3:
                self.retries += 1
                continue
            shifted = [jac.add(y, z) for y in ys]
            if all(len(s.u) == 3 for s in shifted):
                return shifted, z
            self.retries += 1
        raise SupportCollision("no generic representative within the retry budget")

    def _rep(self, y, d):
        shifted, z = self._reps([y], d)
        return _Rep(shifted[0], z)

    def _function_values(self, shifted, base, targets, what):
        """Values of f_{l,s}/f_{l,base} at every target, for each s in shifted."""
        jac = self.jac
        F = self.F
        b, end_b = miller_function_eval(jac, base, self.ell, targets)
        out = []
        for s in shifted:
            a, end_a = miller_function_eval(jac, s, self.ell, targets)
            if end_a != end_b:
                raise PairingError("%s argument is not l-torsion" % what)
            out.append([F.div(x, y) for x, y in zip(a, b)])
        return out

    def _check_rational(self, D, d):
        if d != self.ctx.kappa and self.jac.frobenius(D, d) != D:
            raise FieldMismatch("class is not defined over F_q^%d" % d)

    # tame Tate pairing
    def tate_raw_values(self, xs, ys, d):
        """Raw exponents of (f_x(D_y))^((q^d-1)/l) for all pairs."""
        if d not in self.final_exp:
            raise FieldMismatch("tame Tate pairing is computed over F_q^k or F_q^kappa only")
        for D in list(xs) + list(ys):
            self._check_rational(D, d)
        F = self.F
        jac = self.jac
        for _ in range(self.retry_budget):
            shifted, z = self._reps(ys, d)
            targets = shifted + [z]
            try:
                out = []
                for x in xs:
                    if jac.is_identity(x):
                        out.append([0] * len(ys))
                        continue
                    vals, end = miller_function_eval(jac, x, self.ell, targets)
                    if not jac.is_identity(end):
                        raise PairingError("first argument is not l-torsion")
                    base = F.inv(vals[-1])
                    row = []
                    for j in range(len(ys)):
                        t = F.pow(F.mul(vals[j], base), self.final_exp[d])
                        row.append(self.dlog(t))
                    out.append(row)
                return out
            except SupportCollision:
                self.retries += 1
                continue
        raise SupportCollision("retry budget exhausted in tame Tate evaluation")

    def tate_many(self, xs, ys, d=None):
        """Tame Tate exponents scaled so that tate(x, y) - tate(y, x) = weil(x, y)."""
        d = d or self.ctx.kappa
        raw = self.tate_raw_values(xs, ys, d)
        s = self.scale[d]
        if not s:
            return raw
        inv = pow(s, -1, self.ell)
        return [[v * inv % self.ell for v in row] for row in raw]

    def tate(self, x, y, d=None):
        return self.tate_many([x], [y], d)[0][0]

    # Weil pairing
    def weil_many(self, xs, ys):
        """Weil exponents e(x_i, y_j) = f_{D_x}(D_y) / f_{D_y}(D_x)."""
        F = self.F
        kappa = self.ctx.kappa
        jac = self.jac
        for _ in range(self.retry_budget):
            try:
                lshift, lz = self._reps(xs, kappa)
                rshift, rz = self._reps(ys, kappa)
                lt = lshift + [lz]
                rt = rshift + [rz]
                left_vals = self._function_values(lshift, lz, rt, "first")
                right_vals = self._function_values(rshift, rz, lt, "second")
                out = []
                for i in range(len(xs)):
                    fli = left_vals[i]
                    row = []
                    for j in range(len(ys)):
                        frj = right_vals[j]
                        fx = F.div(fli[j], fli[-1])
                        fy = F.div(frj[i], frj[-1])
                        row.append(self.dlog(F.div(fx, fy)))
                    out.append(row)
                return out
            except SupportCollision:
                self.retries += 1
                continue
        raise SupportCollision("retry budget exhausted in Weil evaluation")

    def weil(self, x, y):
        return self.weil_many([x], [y])[0][0]


def weil_pairing(engine, x, y):
    return engine.weil(x, y)


def tate_tame_pairing(engine, x, y, d):
    return engine.tate(x, y, d)


def pairing_matrix(engine, kind, basis, M):
    """Matrix of the pairing on basis; checks M^T E M = q E."""
    if kind == "weil":
        E = engine.weil_many(basis, basis)
    elif kind == "tate":
        E = engine.tate_many(basis, basis)
    else:
        raise ValueError("kind must be 'weil' or 'tate'")
    ell = engine.ell
    lhs = la.mat_mul(la.mat_mul(la.transpose(M), E, ell), M, ell)
    rhs = la.mat_scale(E, engine.q, ell)
    if lhs != rhs:
        raise ShapeViolation("pairing matrix is not Galois invariant: M^T E M != q E")
    return E


@dataclass
class WeilShape:
    a: int
    b: int


def classify_weil_matrix(E, ctx):
    """E must be E_{a,b} on the canonical basis when J(F_q)[l] is cyclic."""
    if rational_torsion_rank(ctx, 1) != 1:
        raise OutOfScope("J(F_q)[l] is not cyclic")
    ell = ctx.ell
    a, b = E[0][1] % ell, E[2][3] % ell
    expected = [[0, a, 0, 0], [-a % ell, 0, 0, 0], [0, 0, 0, b], [0, 0, -b % ell, 0]]
    if E != expected or a == 0 or b == 0:
        raise ShapeViolation("Weil matrix %s is not of the form E_(a,b)" % E)
    return WeilShape(a, b)


def weil_normalized_basis(ctx, cls, canonical, shape):
    """Basis on which the Weil matrix is [[0,1],[-1,0]] in both blocks.

    In the diagonal case the second and fourth vectors are rescaled.  In the
    non-diagonal case x3 is replaced by u x3 + v x4 with
    b (u^2 + c u v + q v^2) = 1 and x4 by its Frobenius image, which keeps
    the block form of Frobenius.
    """
    ell = ctx.ell
    q = ctx.q % ell
    x1, x2, x3, x4 = canonical
    jac = ctx.jac
    ainv = pow(shape.a, -1, ell)
    y2 = jac.mul(ainv, x2)
    if cls.kind == "Diagonal":
        binv = pow(shape.b, -1, ell)
        return [x1, y2, x3, jac.mul(binv, x4)], None
    c = cls.c
    for u in range(ell):
        for v in range(ell):
            if shape.b * (u * u + c * u * v + q * v * v) % ell == 1:
                y3 = jac.add(jac.mul(u, x3), jac.mul(v, x4))
                return [x1, y2, y3, jac.frobenius(y3)], (u, v)
    raise ShapeViolation("norm form does not represent 1/b")


@dataclass
class TateShape:
    a1: int
    a6: int
    d3: int
    d4: int
    subcases: dict

    def to_json(self):
        return {"a1": self.a1, "a6": self.a6, "d3": self.d3, "d4": self.d4, "subcases": self.subcases}


def classify_tate_matrix(T, ctx, cls):
    """Check the block shape of the tame Tate matrix on a Weil-normalized basis
    and evaluate each conditional statement whose premise holds.

    subcases maps a label to "verified", "not_applicable" or a failure message.
    """
    ell = ctx.ell
    q = ctx.q % ell
    a1, a6 = T[0][1], T[2][3]
    d3, d4 = T[2][2], T[3][3]
    expected = [[0, a1, 0, 0],
                [(a1 - 1) % ell, 0, 0, 0],
                [0, 0, d3, a6],
                [0, 0, (a6 - 1) % ell, d4]]
    if T != expected:
        raise ShapeViolation("tame Tate matrix %s is not block anti-diagonal" % T)
    prof = ctx.profile
    Nk = prof.jacobian_order(ctx.k)
    N1 = prof.jacobian_order(1)
    sub = {}
    if cls.kind == "NonDiagonalizable":
        c = cls.c
        ok = d4 == q * d3 % ell and (2 * a6) % ell == (d3 * c + 1) % ell
        sub["nondiagonal_relations"] = "verified" if ok else "failed: d4=%d q*d3=%d 2a6=%d d3*c+1=%d" % (
            d4, q * d3 % ell, 2 * a6 % ell, (d3 * c + 1) % ell)
    else:
        sub["nondiagonal_relations"] = "not_applicable"
    if cls.kind == "Diagonal" and (2 * ctx.k) % ctx.kappa != 0:
        sub["diagonal_vanishing"] = "verified" if d3 == 0 and d4 == 0 else "failed: d3=%d d4=%d" % (d3, d4)
    else:
        sub["diagonal_vanishing"] = "not_applicable"
    bicyclic = rational_torsion_rank(ctx, ctx.k) == 2
    if bicyclic and Nk % ell ** 3:
        sub["a1_not_0_or_1"] = "verified" if a1 not in (0, 1) else "failed: a1=%d" % a1
    else:
        sub["a1_not_0_or_1"] = "not_applicable"
    if bicyclic and Nk % ell ** 3 == 0 and N1 % ell ** 2:
        sub["a1_zero"] = "verified" if a1 == 0 else "failed: a1=%d" % a1
    else:
        sub["a1_zero"] = "not_applicable"
    return TateShape(a1, a6, d3, d4, sub)


@dataclass
class DichotomyReport:
    branch: str
    witness: list = None
    self_pairing: int = None
    determinant: int = None

    def to_json(self):
        return {"branch": self.branch, "witness": self.witness, "self_pairing": self.self_pairing,
                "determinant": self.determinant}


def self_pairing_scan(engine, ctx, basis, T, extra=8):
    """Either some x with tau(x, x) != 1 or a non-degenerate tau.

    The self-pairing is evaluated directly on divisors: first on the third
    basis vector, then on random combinations.
    """
    ell = ctx.ell
    index_vecs = [[0, 0, 1, 0]]
    for _ in range(extra):
        index_vecs.append([engine.rng.randrange(ell) for _ in range(4)])
    jac = ctx.jac
    for vec in index_vecs:
        x = jac.identity
        for c, b in zip(vec, basis):
            if c:
                x = jac.add(x, jac.mul(c, b))
        if jac.is_identity(x):
            continue
        t = engine.tate(x, x)
        if t:
            return DichotomyReport("self_pairing", witness=vec, self_pairing=t)
    det = la.det(T, ell)
    if det:
        return DichotomyReport("non_degenerate", determinant=det)
    raise DichotomyViolation("no self-pairing found and the tame Tate matrix is singular")
