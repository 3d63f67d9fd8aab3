"""Small number theory over Z and F_l: orders, residues, roots, integer polynomials."""

from math import gcd, isqrt

from sympy import factorint, isprime


class NotInSubgroup(ValueError):
    pass


def legendre(D, ell):
    """Legendre symbol (D/ell) by Euler's criterion, returned as -1, 0 or 1."""
    if ell < 3 or not isprime(ell):
        raise ValueError("ell must be an odd prime")
    t = pow(D % ell, (ell - 1) // 2, ell)
    return -1 if t == ell - 1 else t


def mult_order(a, m):
    """Least k >= 1 with a^k = 1 (mod m)."""
    if m < 2:
        raise ValueError("modulus must be at least 2")
    a %= m
    if gcd(a, m) != 1:
        raise ValueError("%d is not a unit mod %d" % (a, m))
    # order divides the Carmichael exponent; peel prime factors off phi(m)
    phi = 1
    for r, e in factorint(m).items():
        phi *= (r - 1) * r ** (e - 1)
    k = phi
    for r, e in factorint(phi).items():
        for _ in range(e):
            if pow(a, k // r, m) == 1:
                k //= r
            else:
                break
    return k


def dlog_mu_l(z, zeta, ell, field):
    """Exponent e in [0, ell) with zeta^e = z in field, by exhaustive search."""
    acc = field.one
    for e in range(ell):
        if acc == z:
            return e
        acc = field.mul(acc, zeta)
    raise NotInSubgroup("element is not in the subgroup generated by zeta")


def is_square_int(n):
    return n >= 0 and isqrt(n) ** 2 == n


def squarefree_part(n):
    """Signed squarefree part of a nonzero integer."""
    if n == 0:
        raise ValueError("zero has no squarefree part")
    s = -1 if n < 0 else 1
    for r, e in factorint(abs(n)).items():
        if e % 2:
            s *= r
    return s


# polynomials over F_l on ascending int lists

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mod(f, ell):
    return _trim([c % ell for c in f])


def poly_eval_mod(f, x, ell):
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % ell
    return acc


def poly_mul_mod(a, b, ell):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return poly_mod(out, ell)


def poly_divmod_mod(a, b, ell):
    a = poly_mod(a, ell)
    b = poly_mod(b, ell)
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    db = len(b) - 1
    inv = pow(b[-1], -1, ell)
    if len(a) - 1 < db:
        return [], a
    q = [0] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k] * inv % ell
        q[k - db] = c
        if c:
            for j in range(db + 1):
                a[k - db + j] = (a[k - db + j] - c * b[j]) % ell
    return _trim(q), _trim(a[:db])


def poly_roots_mod_l(f, ell):
    """Roots of f over F_ell with multiplicities.

    Returns (roots, splits) where roots maps each root to its multiplicity and
    splits tells whether f is a product of linear factors over F_ell.
    """
    if ell > 997:
        raise ValueError("exhaustive root finding is limited to ell <= 997")
    f = poly_mod(f, ell)
    if not f:
        raise ValueError("zero polynomial")
    roots = {}
    rest = f
    for r in range(ell):
        while len(rest) > 1 and poly_eval_mod(rest, r, ell) == 0:
            rest, _ = poly_divmod_mod(rest, [-r % ell, 1], ell)
            roots[r] = roots.get(r, 0) + 1
    return roots, len(rest) == 1


def factor_shape_mod_l(f, ell):
    """Factorization of a polynomial of degree <= 4 over F_ell.

    Returns a sorted list of (monic factor, multiplicity).  Rootless quotients
    of degree 4 are split by trial division by monic quadratics.
    """
    f = poly_mod(f, ell)
    lead = f[-1]
    roots, _ = poly_roots_mod_l(f, ell)
    rest = f
    factors = []
    for r, m in sorted(roots.items()):
        for _ in range(m):
            rest, _ = poly_divmod_mod(rest, [-r % ell, 1], ell)
        factors.append(([-r % ell, 1], m))
    inv = pow(lead, -1, ell)
    rest = [c * inv % ell for c in rest]
    deg = len(rest) - 1
    if deg > 4:
        raise ValueError("only degree <= 4 is supported")
    if deg == 4:
        for b in range(ell):
            for c in range(ell):
                qd = [c, b, 1]
                quo, rem = poly_divmod_mod(rest, qd, ell)
                if not rem:
                    if quo == qd:
                        factors.append((qd, 2))
                    else:
                        factors.extend(sorted([(qd, 1), (quo, 1)]))
                    return factors
        factors.append((rest, 1))
    elif deg > 0:
        factors.append((rest, 1))
    return factors


# integer polynomials and matrices

def int_det(M):
    """Exact determinant of a square integer matrix (fraction-free Bareiss)."""
    n = len(M)
    A = [list(r) for r in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1] if n else 1


def int_matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def int_matpow(A, e):
    n = len(A)
    R = [[int(i == j) for j in range(n)] for i in range(n)]
    while e:
        if e & 1:
            R = int_matmul(R, A)
        e >>= 1
        if e:
            A = int_matmul(A, A)
    return R


def companion(f):
    """Companion matrix of a monic ascending coefficient list."""
    n = len(f) - 1
    C = [[0] * n for _ in range(n)]
    for i in range(1, n):
        C[i][i - 1] = 1
    for i in range(n):
        C[i][n - 1] = -f[i]
    return C


def int_poly_eval(f, x):
    acc = 0
    for c in reversed(f):
        acc = acc * x + c
    return acc


def int_poly_derivative(f):
    return [i * c for i, c in enumerate(f)][1:]


def resultant(f, g):
    """Resultant of two integer polynomials via the Sylvester determinant."""
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    rows = []
    fd = list(reversed(f))
    gd = list(reversed(g))
    for i in range(n):
        rows.append([0] * i + fd + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + gd + [0] * (size - n - 1 - i))
    return int_det(rows)


def discriminant(f):
    """Discriminant of an integer polynomial of degree n >= 1."""
    n = len(f) - 1
    lead = f[-1]
    r = resultant(f, int_poly_derivative(f))
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    q, rem = divmod(sign * r, lead)
    assert rem == 0
    return q


def _divisors(n):
    n = abs(n)
    out = [1]
    for r, e in factorint(n).items():
        out = [d * r ** k for d in out for k in range(e + 1)]
    return sorted(out)


def monic_quartic_is_irreducible(f):
    """Irreducibility over Q of a monic integer quartic.

    Rational roots are integer divisors of f(0); quadratic factors
    X^2 + bX + c have c dividing f(0), and b is forced by two coefficients.
    """
    assert len(f) == 5 and f[4] == 1
    a0 = f[0]
    if a0 == 0:
        return False
    for r in _divisors(a0):
        for s in (r, -r):
            if int_poly_eval(f, s) == 0:
                return False
    # X^4 + a3 X^3 + a2 X^2 + a1 X + a0 = (X^2 + bX + c)(X^2 + dX + e)
    a1, a2, a3 = f[1], f[2], f[3]
    for c in _divisors(a0):
        for c in (c, -c):
            e = a0 // c
            # b + d = a3, bd + c + e = a2, be + cd = a1
            # bd = a2 - c - e, so b, d are roots of t^2 - a3 t + (a2 - c - e)
            disc = a3 * a3 - 4 * (a2 - c - e)
            if disc < 0 or not is_square_int(disc):
                continue
            s = isqrt(disc)
            for b in {(a3 + s) // 2, (a3 - s) // 2}:
                if (a3 + s) % 2:
                    continue
                d = a3 - b
                if b * d == a2 - c - e and b * e + c * d == a1:
                    return False
    return True
