"""Finite fields F_p and F_{p^d}.

PrimeField elements are plain ints in [0, p).  ExtensionField elements are
tuples of d ints (ascending coefficients modulo the defining polynomial).
Both classes expose the same method names so polynomial and curve code can
be written once.
"""

from array import array
from itertools import product

from sympy import factorint, isprime

from .numtheory import legendre

_from_bytes = int.from_bytes

# Hard cap on the size of an extension, counted in bits of the field order.
MAX_FIELD_BITS = 512


class FieldTooLarge(ValueError):
    pass


class PrimeField:
    degree = 1

    def __init__(self, p):
        if not isinstance(p, int) or p < 3 or not isprime(p):
            raise ValueError("p must be an odd prime, got %r" % (p,))
        self.p = p
        self.characteristic = p
        self.order = p
        self.zero = 0
        self.one = 1
        self._gen = None
        self._tonelli = None

    def __repr__(self):
        return "PrimeField(%d)" % self.p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))

    def from_int(self, n):
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def sqr(self, a):
        return a * a % self.p

    def smul(self, n, a):
        return n * a % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def div(self, a, b):
        return a * self.inv(b) % self.p

    def pow(self, a, e):
        if e < 0:
            a, e = self.inv(a), -e
        return pow(a, e, self.p)

    def is_zero(self, a):
        return a == 0

    def is_one(self, a):
        return a == 1

    def frobenius(self, a, e=1):
        return a

    def norm(self, a):
        return a

    def is_square(self, a):
        return a == 0 or legendre(a, self.p) == 1

    def sqrt(self, a):
        """A square root of a, or None if a is a non-residue."""
        a %= self.p
        if a == 0:
            return 0
        if legendre(a, self.p) != 1:
            return None
        return _tonelli_shanks(self, a)

    def random(self, rng):
        return rng.randrange(self.p)

    def elements(self):
        return iter(range(self.p))

    def index(self, a):
        return a

    def from_index(self, i):
        return i

    def to_json(self, a):
        return a

    def constant_value(self, a):
        return a

    def primitive_element(self):
        if self._gen is None:
            self._gen = _least_generator(self)
        return self._gen


class ExtensionField:
    """F_{p^d} as F_p[X]/(f) with f monic irreducible of degree d."""

    def __init__(self, p, d, modulus=None):
        if not isinstance(p, int) or p < 3 or not isprime(p):
            raise ValueError("p must be an odd prime, got %r" % (p,))
        if d < 1:
            raise ValueError("degree must be positive")
        if (p ** d).bit_length() > MAX_FIELD_BITS:
            raise FieldTooLarge("F_%d^%d exceeds the %d-bit cap" % (p, d, MAX_FIELD_BITS))
        if modulus is None:
            modulus = find_irreducible(p, d)
        modulus = [c % p for c in modulus]
        if len(modulus) != d + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree %d" % d)
        if not is_irreducible_mod_p(modulus, p):
            raise ValueError("modulus %r is reducible mod %d" % (modulus, p))
        self.p = p
        self.degree = d
        self.characteristic = p
        self.order = p ** d
        self.modulus = tuple(modulus)
        self.zero = (0,) * d
        self.one = (1,) + (0,) * (d - 1)
        self._red = [(i, -c % p) for i, c in enumerate(modulus[:d]) if c]
        self._gen = None
        self._tonelli = None
        self._order_factors = None
        bound = d * (p - 1) ** 2
        if bound < 2 ** 32:
            self._tc, self._lane = "I", 4
        elif bound < 2 ** 64:
            self._tc, self._lane = "Q", 8
        else:
            self._tc = None
        if self._tc is not None and array(self._tc).itemsize != self._lane:
            self._tc = None
        self._packed_red = self._plan_packed_reduction()
        self._frob = {}

    def _plan_packed_reduction(self):
        """Lane width and round count for reducing a packed product in place.

        x^d = sum r_i x^i turns the high lanes H into sum r_i H x^i; each
        round lowers the degree by d - max(i).  Returns None when the lane
        bound does not fit in 64 bits.
        """
        d, p = self.degree, self.p
        if d == 1 or array("Q").itemsize != 8:
            return None
        top = max(i for i, _ in self._red)
        deg, rounds = 2 * d - 2, 0
        while deg >= d:
            deg = deg - d + top
            rounds += 1
        bound = d * (p - 1) ** 2
        growth = 1 + sum(r for _, r in self._red)
        for _ in range(rounds):
            bound *= growth
        if bound >= 2 ** 64:
            return None
        w = 64
        return (w, (1 << (w * d)) - 1, [(i * w, r) for i, r in self._red], d * w, 8 * d)

    def __repr__(self):
        return "ExtensionField(%d, %d, %r)" % (self.p, self.degree, self.modulus)

    def __eq__(self, other):
        return isinstance(other, ExtensionField) and other.modulus == self.modulus and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p, self.modulus))

    # packing helpers
    def _pack(self, a):
        return _from_bytes(array(self._tc, a).tobytes(), "little")

    def _unpack(self, n, lanes):
        return array(self._tc, n.to_bytes(self._lane * lanes, "little")).tolist()

    def from_int(self, n):
        return (n % self.p,) + (0,) * (self.degree - 1)

    def add(self, a, b):
        p = self.p
        return tuple([(x + y) % p for x, y in zip(a, b)])

    def sub(self, a, b):
        p = self.p
        return tuple([(x - y) % p for x, y in zip(a, b)])

    def neg(self, a):
        p = self.p
        return tuple([-x % p for x in a])

    def smul(self, n, a):
        p = self.p
        return tuple([n * x % p for x in a])

    def mul(self, a, b):
        d = self.degree
        p = self.p
        plan = self._packed_red
        if plan is not None:
            w, mask, red, shift, nbytes = plan
            C = _from_bytes(array("Q", a).tobytes(), "little") * _from_bytes(array("Q", b).tobytes(), "little")
            hi = C >> shift
            while hi:
                C &= mask
                for s, r in red:
                    C += (hi * r) << s
                hi = C >> shift
            return tuple([x % p for x in array("Q", C.to_bytes(nbytes, "little"))])
        if self._tc is not None:
            C = self._pack(a) * self._pack(b)
            if not C:
                return self.zero
            c = self._unpack(C, 2 * d - 1)
        else:
            c = [0] * (2 * d - 1)
            for i, x in enumerate(a):
                if x:
                    for j, y in enumerate(b):
                        c[i + j] += x * y
        red = self._red
        for k in range(2 * d - 2, d - 1, -1):
            ck = c[k]
            if ck:
                base = k - d
                for i, r in red:
                    c[base + i] += ck * r
        return tuple([x % p for x in c[:d]])

    def sqr(self, a):
        return self.mul(a, a)

    def inv(self, a):
        p = self.p
        r0 = list(self.modulus)
        r1 = _trim(list(a))
        if not r1:
            raise ZeroDivisionError("inverse of zero")
        s0, s1 = [], [1]
        while r1:
            q, r = _pdivmod(r0, r1, p)
            r0, r1 = r1, r
            s0, s1 = s1, _psub(s0, _pmul(q, s1, p), p)
        c = pow(r0[0], -1, p)
        out = [x * c % p for x in s0] + [0] * self.degree
        return tuple(out[: self.degree])

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e):
        if e < 0:
            a, e = self.inv(a), -e
        result = self.one
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return result

    def is_zero(self, a):
        return not any(a)

    def is_one(self, a):
        return a == self.one

    def _frob_columns(self, e):
        cols = self._frob.get(e)
        if cols is None:
            # images of X^i under x -> x^(p^e)
            xe = (0, 1) + (0,) * (self.degree - 2) if self.degree > 1 else (0,)
            if self.degree == 1:
                cols = [self.one]
            else:
                img = self.pow(xe, self.p ** e)
                cols = [self.one]
                for _ in range(1, self.degree):
                    cols.append(self.mul(cols[-1], img))
            if self._tc is not None:
                cols = [self._pack(c) for c in cols]
            self._frob[e] = cols
        return cols

    def frobenius(self, a, e=1):
        """a^(p^e)."""
        d = self.degree
        e %= d
        if e == 0:
            return a
        cols = self._frob_columns(e)
        p = self.p
        if self._tc is not None:
            acc = 0
            for x, c in zip(a, cols):
                if x:
                    acc += x * c
            if not acc:
                return self.zero
            return tuple([x % p for x in self._unpack(acc, d)])
        out = [0] * d
        for x, c in zip(a, cols):
            if x:
                for j in range(d):
                    out[j] += x * c[j]
        return tuple([y % p for y in out])

    def norm(self, a):
        """Norm down to F_p, returned as an int."""
        acc = a
        conj = a
        for _ in range(self.degree - 1):
            conj = self.frobenius(conj)
            acc = self.mul(acc, conj)
        return acc[0]

    def is_square(self, a):
        if self.is_zero(a):
            return True
        return legendre(self.norm(a), self.p) == 1

    def sqrt(self, a):
        if self.is_zero(a):
            return self.zero
        if not self.is_square(a):
            return None
        return _tonelli_shanks(self, a)

    def random(self, rng):
        p = self.p
        return tuple([rng.randrange(p) for _ in range(self.degree)])

    def elements(self):
        for t in product(range(self.p), repeat=self.degree):
            yield t[::-1]

    def index(self, a):
        n = 0
        for c in reversed(a):
            n = n * self.p + c
        return n

    def from_index(self, i):
        out = []
        for _ in range(self.degree):
            i, r = divmod(i, self.p)
            out.append(r)
        return tuple(out)

    def to_json(self, a):
        return list(a)

    def constant_value(self, a):
        """The int value of an element of the prime subfield."""
        if any(a[1:]):
            raise ValueError("element is not in the prime field")
        return a[0]

    def order_factors(self):
        if self._order_factors is None:
            self._order_factors = factorint(self.order - 1)
        return self._order_factors

    def primitive_element(self):
        """The least generator of the multiplicative group in index order."""
        if self._gen is None:
            self._gen = _least_generator(self)
        return self._gen


def _least_generator(F):
    n = F.order - 1
    if isinstance(F, ExtensionField):
        primes = list(F.order_factors())
    else:
        primes = list(factorint(n))
    for i in range(1, F.order):
        g = F.from_index(i)
        if all(not F.is_one(F.pow(g, n // r)) for r in primes):
            return g
    raise AssertionError("no generator found")


def _tonelli_shanks(F, a):
    if F._tonelli is None:
        q = F.order
        s, t = 0, q - 1
        while t % 2 == 0:
            s += 1
            t //= 2
        z = None
        for i in range(2, q):
            c = F.from_index(i)
            if not F.is_square(c):
                z = c
                break
        F._tonelli = (s, t, z)
    s, t, z = F._tonelli
    if s == 1:
        return F.pow(a, (F.order + 1) // 4)
    m = s
    c = F.pow(z, t)
    x = F.pow(a, (t + 1) // 2)
    b = F.pow(a, t)
    while not F.is_one(b):
        i, b2 = 0, b
        while not F.is_one(b2):
            b2 = F.sqr(b2)
            i += 1
        w = c
        for _ in range(m - i - 1):
            w = F.sqr(w)
        x = F.mul(x, w)
        c = F.sqr(w)
        b = F.mul(b, c)
        m = i
    return x


# dense F_p[X] helpers on ascending int lists

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _psub(a, b, p):
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([c % p for c in out])


def _pdivmod(a, b, p):
    a = list(a)
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    if len(a) - 1 < db:
        return [], _trim(a)
    q = [0] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k] * inv % p
        if c:
            q[k - db] = c
            for j in range(db + 1):
                a[k - db + j] = (a[k - db + j] - c * b[j]) % p
    return _trim(q), _trim(a[:db])


def _pmulmod(a, b, f, p):
    return _pdivmod(_pmul(a, b, p), f, p)[1]


def _ppowmod(a, e, f, p):
    result = [1]
    base = _pdivmod(a, f, p)[1]
    while e:
        if e & 1:
            result = _pmulmod(result, base, f, p)
        e >>= 1
        if e:
            base = _pmulmod(base, base, f, p)
    return result


def _pgcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pdivmod(a, b, p)[1]
    return a


def is_irreducible_mod_p(f, p):
    """Rabin's test for a monic f (ascending ints) over F_p."""
    f = _trim([c % p for c in f])
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    x = [0, 1]
    powers = [x]
    h = x
    for _ in range(d):
        h = _ppowmod(h, p, f, p)
        powers.append(h)
    if _psub(powers[d], x, p):
        return False
    for r in factorint(d):
        g = _pgcd(f, _psub(powers[d // r], x, p), p)
        if len(g) > 1:
            return False
    return True


def find_irreducible(p, d):
    """Lexicographically first monic irreducible polynomial of degree d over F_p.

    Candidates X^d + a_{d-1}X^{d-1} + ... + a_0 are ordered by the tuple
    (a_{d-1}, ..., a_0).  Returned as ascending coefficients.
    """
    if d < 1:
        raise ValueError("degree must be positive")
    for t in product(range(p), repeat=d):
        f = list(reversed(t)) + [1]
        if is_irreducible_mod_p(f, p):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")


def frobenius_power(F, x, e):
    """x^(p^e) in the field F."""
    return F.frobenius(x, e)


def make_field(p, d=1):
    return PrimeField(p) if d == 1 else ExtensionField(p, d)
