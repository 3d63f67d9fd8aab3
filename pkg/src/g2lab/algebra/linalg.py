"""Matrices over F_l as lists of lists of ints in [0, l)."""

from .numtheory import poly_roots_mod_l


def mat(rows, ell):
    return [[x % ell for x in r] for r in rows]


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(A):
    return [list(r) for r in zip(*A)]


def mat_mul(A, B, ell):
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) % ell for col in Bt] for row in A]


def mat_vec(A, v, ell):
    return [sum(a * b for a, b in zip(row, v)) % ell for row in A]


def mat_add(A, B, ell):
    return [[(a + b) % ell for a, b in zip(r, s)] for r, s in zip(A, B)]


def mat_sub(A, B, ell):
    return [[(a - b) % ell for a, b in zip(r, s)] for r, s in zip(A, B)]


def mat_scale(A, c, ell):
    return [[a * c % ell for a in r] for r in A]


def mat_pow(A, e, ell):
    if e < 0:
        A, e = inverse(A, ell), -e
    R = identity(len(A))
    while e:
        if e & 1:
            R = mat_mul(R, A, ell)
        e >>= 1
        if e:
            A = mat_mul(A, A, ell)
    return R


def rref(A, ell):
    """Reduced row echelon form and pivot columns."""
    R = [list(r) for r in A]
    rows = len(R)
    cols = len(R[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if R[i][c] % ell), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        inv = pow(R[r][c], -1, ell)
        R[r] = [x * inv % ell for x in R[r]]
        for i in range(rows):
            if i != r and R[i][c]:
                f = R[i][c]
                R[i] = [(x - f * y) % ell for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return R, pivots


def rank(A, ell):
    return len(rref(A, ell)[1])


def kernel(A, ell):
    """Basis of the right null space, one vector per free column in order."""
    R, pivots = rref(A, ell)
    cols = len(A[0])
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * cols
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = -R[i][f] % ell
        basis.append(v)
    return basis


def nullity(A, ell):
    return len(A[0]) - rank(A, ell)


def det(A, ell):
    R = [list(r) for r in A]
    n = len(R)
    d = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if R[i][c] % ell), None)
        if piv is None:
            return 0
        if piv != c:
            R[c], R[piv] = R[piv], R[c]
            d = -d
        d = d * R[c][c] % ell
        inv = pow(R[c][c], -1, ell)
        for i in range(c + 1, n):
            if R[i][c]:
                f = R[i][c] * inv % ell
                R[i] = [(x - f * y) % ell for x, y in zip(R[i], R[c])]
    return d % ell


def inverse(A, ell):
    n = len(A)
    aug = [list(r) + identity(n)[i] for i, r in enumerate(A)]
    R, pivots = rref(aug, ell)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [r[n:] for r in R]


def char_poly(A, ell):
    """Characteristic polynomial det(X I - A), ascending coefficients.

    Reduces A to upper Hessenberg form by similarity and then runs the
    standard three-term recurrence on its leading principal minors.
    """
    n = len(A)
    H = [list(r) for r in A]
    for c in range(n - 2):
        piv = next((i for i in range(c + 1, n) if H[i][c]), None)
        if piv is None:
            continue
        if piv != c + 1:
            H[c + 1], H[piv] = H[piv], H[c + 1]
            for r in H:
                r[c + 1], r[piv] = r[piv], r[c + 1]
        inv = pow(H[c + 1][c], -1, ell)
        for i in range(c + 2, n):
            f = H[i][c] * inv % ell
            if f:
                H[i] = [(x - f * y) % ell for x, y in zip(H[i], H[c + 1])]
                for r in H:
                    r[c + 1] = (r[c + 1] + f * r[i]) % ell
    # p[k] is the char poly of the leading k x k block
    p = [[1]]
    for k in range(1, n + 1):
        hk = H[k - 1][k - 1]
        nxt = _pshift(p[k - 1])
        nxt = _padd(nxt, [(-hk * c) % ell for c in p[k - 1]], ell)
        prod = 1
        for i in range(k - 1, 0, -1):
            prod = prod * H[i][i - 1] % ell
            coef = H[i - 1][k - 1] * prod % ell
            if coef:
                nxt = _padd(nxt, [(-coef * c) % ell for c in p[i - 1]], ell)
        p.append(nxt)
    return p[n]


def _pshift(a):
    return [0] + list(a)


def _padd(a, b, ell):
    n = max(len(a), len(b))
    return [((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % ell for i in range(n)]


def poly_at_matrix(f, A, ell):
    """f(A) for ascending coefficients f."""
    n = len(A)
    R = [[0] * n for _ in range(n)]
    for c in reversed(f):
        R = mat_add(mat_mul(R, A, ell), mat_scale(identity(n), c, ell), ell)
    return R


def mat_order(A, ell, limit):
    """Least e in [1, limit] with A^e = I, or None."""
    n = len(A)
    I = identity(n)
    P = [list(r) for r in A]
    for e in range(1, limit + 1):
        if P == I:
            return e
        P = mat_mul(P, A, ell)
    return None


def normalize_vector(v, ell):
    """Scale so the first nonzero entry is 1."""
    for x in v:
        if x % ell:
            inv = pow(x, -1, ell)
            return [y * inv % ell for y in v]
    return list(v)


def is_diagonalizable(A, ell):
    """(True, S) with S^-1 A S diagonal, or (False, None).

    Eigenvalues come from the characteristic polynomial; A is diagonalizable
    over F_ell iff that polynomial splits and each eigenspace has full
    dimension.  Columns of S are eigenvector bases, eigenvalues ascending.
    """
    n = len(A)
    roots, splits = poly_roots_mod_l(char_poly(A, ell), ell)
    if not splits:
        return False, None
    cols = []
    for lam in sorted(roots):
        B = mat_sub(A, mat_scale(identity(n), lam, ell), ell)
        K = kernel(B, ell)
        if len(K) != roots[lam]:
            return False, None
        cols.extend(normalize_vector(v, ell) for v in K)
    return True, transpose(cols)


def conjugate(A, S, ell):
    """S^-1 A S."""
    return mat_mul(mat_mul(inverse(S, ell), A, ell), S, ell)
