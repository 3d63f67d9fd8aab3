"""The l-torsion of the Jacobian as an F_l[Frobenius]-module.

A TorsionContext holds a basis of J[l] over the field F_{q^kappa} of
definition of all l-torsion, the matrix of Frobenius on that basis, and
the hypothesis flags that decide which structural statements apply.
"""

import math
from dataclasses import dataclass, field

from sympy import isprime

from . import config
from .algebra import linalg as la
from .algebra.fields import ExtensionField, PrimeField
from .algebra.numtheory import (
    companion,
    factor_shape_mod_l,
    mult_order,
    poly_divmod_mod,
    poly_mod,
    poly_roots_mod_l,
)
from .curve import Jacobian


class TorsionError(Exception):
    pass


class InvalidEll(TorsionError, ValueError):
    pass


class EllDoesNotDivide(InvalidEll):
    pass


class KappaTooLarge(TorsionError):
    pass


class SamplingExhausted(TorsionError):
    pass


class CoordinateNotFound(TorsionError):
    pass


class CharPolyMismatch(TorsionError, AssertionError):
    pass


class OutOfScope(TorsionError):
    def __init__(self, reason):
        super().__init__(reason)
        self.reason = reason


class HypothesisViolated(TorsionError):
    pass


def embedding_degree(q, ell):
    """Order of q in F_ell^*."""
    return mult_order(q, ell)


def _valuation(n, ell):
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % ell == 0:
        n //= ell
        v += 1
    return v


def frobenius_poly_mod(prof, ell):
    return [c % ell for c in prof.P]


def _unipotent_power(prof, ell, d):
    """Whether every root of P mod ell has d-th power 1 (charpoly of C^d is (X-1)^4)."""
    C = la.mat_pow(la.mat([list(r) for r in companion(list(prof.P))], ell), d, ell)
    return la.char_poly(C, ell) == poly_mod([1, -4, 6, -4, 1], ell)


def kappa_lower_bound(prof, ell, limit):
    """Least d <= limit with l^4 | |J(F_{q^d})| and all Frobenius roots of order dividing d."""
    for d in range(1, limit + 1):
        if prof.jacobian_order(d) % ell ** 4 == 0 and _unipotent_power(prof, ell, d):
            return d
    return None


def hypothesis_flags(prof, ell):
    q = prof.q
    N1 = prof.jacobian_order(1)
    k = embedding_degree(q, ell)
    Nk = prof.jacobian_order(k)
    disc = prof.discriminant()
    return {
        "ell_divides_N1": N1 % ell == 0,
        "ell_not_dividing_q_minus_1": (q - 1) % ell != 0,
        "embedding_degree_gt_1": k > 1,
        "unramified_proxy": disc % ell != 0,
        "P_irreducible": prof.is_irreducible(),
        "ell_sq_divides_N1": N1 % ell ** 2 == 0,
        "ell_sq_divides_Nk": Nk % ell ** 2 == 0,
        "ell_cubed_divides_Nk": Nk % ell ** 3 == 0,
    }


def out_of_scope_reasons(flags):
    reasons = []
    if not flags["ell_divides_N1"]:
        reasons.append("ell does not divide |J(F_q)|")
    if not flags["ell_not_dividing_q_minus_1"]:
        reasons.append("ell divides q - 1")
    if not flags["unramified_proxy"]:
        reasons.append("ell divides disc(P) (ramification proxy)")
    if not flags["P_irreducible"]:
        reasons.append("P is reducible over Q")
    return reasons


class SpanIndex:
    """Exhaustive coordinate lookup in the span of up to four classes.

    The span of the first two generators is tabulated; the remaining
    coefficients are enumerated, so a lookup costs l^(r-2) group operations.
    """

    def __init__(self, jac, gens, ell):
        self.jac = jac
        self.ell = ell
        self.gens = list(gens)
        self.multiples = []
        for g in self.gens:
            row = [jac.identity]
            for _ in range(ell - 1):
                row.append(jac.add(row[-1], g))
            self.multiples.append(row)
        r = len(self.gens)
        self.split = min(r, 2)
        self.table = {}
        if self.split == 0:
            self.table[jac.identity] = ()
        elif self.split == 1:
            for a, D in enumerate(self.multiples[0]):
                self.table[D] = (a,)
        else:
            for a in range(ell):
                A = self.multiples[0][a]
                for b in range(ell):
                    self.table[jac.add(A, self.multiples[1][b])] = (a, b)
        # enumerate the remaining generators
        self.tail = [((), jac.identity)]
        for i in range(self.split, r):
            new = []
            for coeffs, D in self.tail:
                for c in range(ell):
                    new.append((coeffs + (c,), jac.add(D, self.multiples[i][c])))
            self.tail = new

    def coords(self, D):
        jac = self.jac
        for coeffs, T in self.tail:
            target = jac.sub(D, T) if coeffs and any(coeffs) else D
            hit = self.table.get(target)
            if hit is not None:
                return list(hit) + list(coeffs)
        raise CoordinateNotFound("class is not in the span of the given generators")

    def contains(self, D):
        try:
            self.coords(D)
            return True
        except CoordinateNotFound:
            return False

    def combine(self, vec):
        jac = self.jac
        acc = jac.identity
        for c, row in zip(vec, self.multiples):
            acc = jac.add(acc, row[c % self.ell])
        return acc


@dataclass
class TorsionContext:
    curve: object
    profile: object
    ell: int
    k: int
    kappa: int
    jac: Jacobian
    basis: list
    M: list
    Pbar: list
    hypothesis_flags: dict
    index: SpanIndex = field(repr=False, default=None)
    sampling: dict = field(default_factory=dict)

    @property
    def q(self):
        return self.profile.q

    @property
    def in_hypothesis(self):
        return not out_of_scope_reasons(self.hypothesis_flags)

    def coords(self, D):
        return self.index.coords(D)

    def combine(self, vec):
        return self.index.combine(vec)

    def frobenius(self, D, e=1):
        return self.jac.frobenius(D, e)

    def random_torsion(self, rng):
        return self.combine([rng.randrange(self.ell) for _ in range(4)])

    def random_vector(self, rng):
        return [rng.randrange(self.ell) for _ in range(4)]


def _check_ell(prof, ell, max_ell):
    if not isinstance(ell, int) or ell < 3 or not isprime(ell):
        raise InvalidEll("ell must be an odd prime")
    if ell == prof.q:
        raise InvalidEll("ell must differ from the characteristic")
    if prof.jacobian_order(1) % ell:
        raise EllDoesNotDivide("ell does not divide the group order |J(F_q)| = %d" % prof.jacobian_order(1))
    if ell > max_ell:
        raise InvalidEll("ell = %d exceeds the exhaustive-search cap %d" % (ell, max_ell))


def _sample_basis(jac, N, ell, rng, budget):
    """Four independent classes of order ell in J(F), or SamplingExhausted.

    Each draw is pushed into the l-Sylow subgroup.  Its order-l multiple is
    kept when independent; otherwise the draw is corrected by Sylow parents
    of the dependent basis elements, which lowers its order, and retried.
    """
    v = _valuation(N, ell)
    cof = N // ell ** v
    basis = []   # (torsion element, sylow parent, exponent)
    index = SpanIndex(jac, [], ell)
    draws = 0
    while len(basis) < 4:
        if draws >= budget:
            raise SamplingExhausted("found %d of 4 independent %d-torsion classes in %d draws"
                                    % (len(basis), ell, draws))
        draws += 1
        S = jac.mul(cof, jac.random(rng))
        while not jac.is_identity(S):
            # order of S is ell^e, T = ell^(e-1) S
            T, e = S, 0
            nxt = S
            while not jac.is_identity(nxt):
                T = nxt
                nxt = jac.mul(ell, nxt)
                e += 1
            try:
                a = index.coords(T)
            except CoordinateNotFound:
                basis.append((T, S, e))
                index = SpanIndex(jac, [b[0] for b in basis], ell)
                break
            if any(c and basis[i][2] < e for i, c in enumerate(a)):
                break
            for i, c in enumerate(a):
                if c:
                    T_i, S_i, e_i = basis[i]
                    S = jac.sub(S, jac.mul(c * ell ** (e_i - e), S_i))
    return [b[0] for b in basis], draws


def frobenius_matrix(jac, index, ell):
    """Column i holds the coordinates of Frobenius applied to basis element i."""
    cols = []
    for g in index.gens:
        cols.append(index.coords(jac.frobenius(g)))
    return la.transpose(cols)


def ell_torsion_basis(curve, prof, ell, rng, sample_budget=None, kappa_bits=None, max_ell=None):
    """Build the TorsionContext of (curve, ell)."""
    sample_budget = sample_budget or config.budget("sample_budget")
    kappa_bits = kappa_bits or config.budget("kappa_bits")
    max_ell = max_ell or config.budget("max_ell")
    _check_ell(prof, ell, max_ell)
    q = prof.q
    k = embedding_degree(q, ell)
    limit = int(kappa_bits // math.log2(q))
    d0 = kappa_lower_bound(prof, ell, limit)
    if d0 is None:
        raise KappaTooLarge("no field F_%d^d with d*log2(q) <= %d bits contains J[%d]" % (q, kappa_bits, ell))
    Pbar = frobenius_poly_mod(prof, ell)
    flags = hypothesis_flags(prof, ell)
    attempts = []
    d = d0
    while d <= limit:
        if prof.jacobian_order(d) % ell ** 4 or not _unipotent_power(prof, ell, d):
            d += 1
            continue
        F = PrimeField(q) if d == 1 else ExtensionField(q, d)
        jac = Jacobian(curve, F)
        try:
            basis, draws = _sample_basis(jac, prof.jacobian_order(d), ell, rng, sample_budget)
        except SamplingExhausted as exc:
            attempts.append({"degree": d, "result": str(exc)})
            d += 1
            continue
        index = SpanIndex(jac, basis, ell)
        M = frobenius_matrix(jac, index, ell)
        order = la.mat_order(M, ell, d)
        if order != d:
            # all l-torsion is already defined over a smaller field
            attempts.append({"degree": d, "result": "Frobenius order %s" % order})
            if order is None or order >= d:
                raise HypothesisViolated("Frobenius matrix order %s inconsistent with field degree %d" % (order, d))
            d = order
            sample_budget *= 2
            continue
        cp = la.char_poly(M, ell)
        if cp != poly_mod(Pbar, ell):
            raise CharPolyMismatch("char poly of M is %s, P mod ell is %s" % (cp, Pbar))
        attempts.append({"degree": d, "result": "basis found", "draws": draws})
        ctx = TorsionContext(curve, prof, ell, k, d, jac, basis, M, Pbar, flags, index,
                             {"attempts": attempts})
        return ctx
    raise KappaTooLarge("J[%d] not found over F_%d^d for d <= %d (%s)" % (ell, q, limit, attempts))


def total_embedding_degree(ctx, kappa_bits=None):
    kappa_bits = kappa_bits or config.budget("kappa_bits")
    if ctx.kappa * math.log2(ctx.q) > kappa_bits:
        raise KappaTooLarge("kappa * log2(q) exceeds %d bits" % kappa_bits)
    order = la.mat_order(ctx.M, ctx.ell, ctx.kappa)
    assert order == ctx.kappa
    return ctx.kappa


def rational_torsion_rank(ctx, d):
    """dim J(F_{q^d})[l] = nullity of M^d - I."""
    A = la.mat_sub(la.mat_pow(ctx.M, d, ctx.ell), la.identity(4), ctx.ell)
    return la.nullity(A, ctx.ell)


# classification of the Frobenius action

@dataclass
class FrobeniusClassification:
    kind: str                # "Diagonal", "NonDiagonalizable" or "Other"
    eigenvalues: list = None
    c: int = None
    S: list = None           # columns are the new basis in old coordinates
    conjugated: list = None  # S^-1 M S
    detail: str = ""

    def to_json(self):
        out = {"kind": self.kind}
        if self.eigenvalues is not None:
            out["eigenvalues"] = self.eigenvalues
        if self.c is not None:
            out["c"] = self.c
        if self.S is not None:
            out["transform"] = self.S
            out["conjugated"] = self.conjugated
        if self.detail:
            out["detail"] = self.detail
        return out


def _eigen_key(lam, q):
    if lam == 1:
        return (0, lam)
    if lam == q:
        return (1, lam)
    return (2, lam)


def classify_matrix(M, q, ell):
    """Normal form of a Frobenius matrix under change of basis."""
    q %= ell
    n = len(M)
    cp = la.char_poly(M, ell)
    roots, splits = poly_roots_mod_l(cp, ell)
    ok, _ = la.is_diagonalizable(M, ell)
    if ok:
        cols, eig = [], []
        for lam in sorted(roots, key=lambda x: _eigen_key(x, q)):
            K = la.kernel(la.mat_sub(M, la.mat_scale(la.identity(n), lam, ell), ell), ell)
            for v in K:
                cols.append(la.normalize_vector(v, ell))
                eig.append(lam)
        S = la.transpose(cols)
        return FrobeniusClassification("Diagonal", eigenvalues=eig, S=S, conjugated=la.conjugate(M, S, ell))
    # expected shape: simple roots 1 and q and an irreducible quadratic cofactor
    if q == 1 or roots.get(1) != 1 or roots.get(q) != 1 or len(roots) != 2:
        return FrobeniusClassification("Other", detail="char poly %s has roots %s" % (cp, roots))
    rest, rem = poly_divmod_mod(cp, [q, (-1 - q) % ell, 1], ell)
    assert not rem
    I = la.identity(n)
    x1 = la.normalize_vector(la.kernel(la.mat_sub(M, I, ell), ell)[0], ell)
    x2 = la.normalize_vector(la.kernel(la.mat_sub(M, la.mat_scale(I, q, ell), ell), ell)[0], ell)
    W = la.kernel(la.poly_at_matrix(rest, M, ell), ell)
    if len(W) != 2:
        return FrobeniusClassification("Other", detail="invariant complement has dimension %d" % len(W))
    x3 = None
    for w in W:
        Mw = la.mat_vec(M, w, ell)
        if la.rank([w, Mw], ell) == 2:
            x3 = w
            break
    if x3 is None:
        return FrobeniusClassification("Other", detail="no cyclic vector in the complement")
    x4 = la.mat_vec(M, x3, ell)
    S = la.transpose([x1, x2, x3, x4])
    B = la.conjugate(M, S, ell)
    c = B[3][3]
    expected = [[1, 0, 0, 0], [0, q, 0, 0], [0, 0, 0, -q % ell], [0, 0, 1, c]]
    if B != expected:
        return FrobeniusClassification("Other", detail="block form failed: %s" % B)
    return FrobeniusClassification("NonDiagonalizable", c=c, S=S, conjugated=B,
                                   detail="trailing block companion of %s" % rest)


def classify_frobenius(ctx):
    reasons = out_of_scope_reasons(ctx.hypothesis_flags)
    if reasons:
        raise OutOfScope("; ".join(reasons))
    cls = classify_matrix(ctx.M, ctx.q, ctx.ell)
    if cls.kind == "Other":
        raise HypothesisViolated(cls.detail)
    return cls


def transformed_basis(ctx, S):
    """Classes whose coordinates are the columns of S."""
    return [ctx.combine(col) for col in la.transpose(S)]


def check_diagonal_iff_splits(ctx):
    """Compare diagonalizability of M with splitting of P mod ell."""
    ell = ctx.ell
    _, splits = poly_roots_mod_l(ctx.Pbar, ell)
    diag, _ = la.is_diagonalizable(ctx.M, ell)
    return {"diagonalizable": diag, "splits": splits, "agree": diag == splits,
            "factorization": [[f, m] for f, m in factor_shape_mod_l(ctx.Pbar, ell)]}


def synthetic_nondiagonal_matrix(q, c, ell, rng):
    """S B S^-1 for B = [[1,0,0,0],[0,q,0,0],[0,0,0,-q],[0,0,1,c]] and random invertible S."""
    q %= ell
    B = [[1, 0, 0, 0], [0, q, 0, 0], [0, 0, 0, -q % ell], [0, 0, 1, c % ell]]
    while True:
        S = [[rng.randrange(ell) for _ in range(4)] for _ in range(4)]
        if la.det(S, ell):
            break
    return la.mat_mul(la.mat_mul(S, B, ell), la.inverse(S, ell), ell)


def irreducible_trace_values(q, ell):
    """Traces c with X^2 - c X + q irreducible over F_ell."""
    out = []
    for c in range(ell):
        disc = (c * c - 4 * q) % ell
        if disc and pow(disc, (ell - 1) // 2, ell) == ell - 1:
            out.append(c)
    return out
