"""Galois rings GR(p^m, n) as models of the truncated Witt rings W_m(F_{p^n}).

Elements are coordinate vectors in the power basis 1, g, ..., g^{n-1} of a
fixed generator g.  The modulus is the Teichmuller lift of the
lexicographically least monic irreducible polynomial of degree n over F_p, so
g^(p^n) = g and the Frobenius is simply g -> g^p.

Besides the scalar element type `GRElem`, contexts expose vectorised helpers
that act on numpy arrays whose last axis holds coordinates; matrices over the
ring are arrays of shape (rows, cols, n).
"""

from __future__ import annotations

import itertools
import math
import random
from functools import lru_cache

import numpy as np

from .errors import CapacityError, DivisibilityError, EmbeddingError, NonUnitError

MAX_P = 1 << 16
MAX_N = 128
MAX_M = 64
# largest subfield that embedding root-finding is willing to enumerate
EMBED_ENUM_CAP = 1 << 12


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def fits_int64(q: int, terms: int) -> bool:
    """True when sums of `terms` products of residues mod q fit in int64."""
    return (q - 1) * (q - 1) * max(terms, 1) < (1 << 63) - 1


# ---------------------------------------------------------------------------
# polynomials over F_p (lists of ints, constant term first)

def _ptrim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, f, p):
    """a mod f for monic f."""
    a = [x % p for x in a]
    n = len(f) - 1
    for i in range(len(a) - 1, n - 1, -1):
        c = a[i]
        if c:
            for j in range(n + 1):
                a[i - n + j] = (a[i - n + j] - c * f[j]) % p
    return _ptrim(a[:n])


def _pmulmod(a, b, f, p):
    if not a or not b:
        return []
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    return _pmod(prod, f, p)


def _ppowmod(a, e, f, p):
    result, base = [1], _pmod(list(a), f, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, f, p)
        base = _pmulmod(base, base, f, p)
        e >>= 1
    return result


def _pgcd(a, b, p):
    a, b = _ptrim([x % p for x in a]), _ptrim([x % p for x in b])
    while b:
        inv = pow(b[-1], -1, p)
        b = [x * inv % p for x in b]
        a = _pmod(a, b, p) if len(a) >= len(b) else a
        a, b = b, a
    return a


def _is_irreducible(f, p) -> bool:
    """Ben-Or's test for a monic polynomial f over F_p."""
    n = len(f) - 1
    if n == 1:
        return True
    h = [0, 1]
    for _ in range(n // 2):
        h = _ppowmod(h, p, f, p)
        d = h + [0] * max(0, 2 - len(h))
        d[1] = (d[1] - 1) % p
        if len(_pgcd(list(f), _ptrim(d), p)) != 1:
            return False
    return True


@lru_cache(maxsize=None)
def canonical_polynomial(p: int, n: int) -> tuple[int, ...]:
    """Least monic irreducible of degree n over F_p, coefficients a_0..a_n.

    Candidates are ordered lexicographically on (a_0, a_1, ..., a_{n-1}).
    """
    if n == 1:
        return (0, 1)
    for a0 in range(1, p):
        for rest in itertools.product(range(p), repeat=n - 1):
            f = [a0, *rest, 1]
            if _is_irreducible(f, p):
                return tuple(f)
    raise AssertionError("no irreducible polynomial found")


# ---------------------------------------------------------------------------
# ring contexts


class GaloisRingCtx:
    """Immutable description of GR(p^m, n)."""

    def __init__(self, p: int, m: int, n: int, modulus: tuple[int, ...]):
        self.p, self.m, self.n = p, m, n
        self.q = p ** m
        self.modulus = tuple(x % self.q for x in modulus)
        self.dtype = np.int64 if fits_int64(self.q, max(64 * n, n * n)) else object
        self._build_tables()
        self.frobenius_image = tuple(int(x) for x in self.pow_vec(self.gen(), p))
        # sigma as a matrix acting on coordinate columns
        cols = [self.pow_vec(np.array(self.frobenius_image, dtype=self.dtype), i) for i in range(n)]
        self.sigma = np.array(cols, dtype=self.dtype).T % self.q
        self.sigma_inv = self._matpow_int(self.sigma, n - 1) if n > 1 else self.sigma.copy()
        for arr in (self.mul_table, self.sigma, self.sigma_inv):
            arr.setflags(write=False)

    def __repr__(self):
        return f"GR({self.p}^{self.m}, {self.n})"

    def __eq__(self, other):
        return (isinstance(other, GaloisRingCtx) and
                (self.p, self.m, self.n, self.modulus) == (other.p, other.m, other.n, other.modulus))

    def __hash__(self):
        return hash((self.p, self.m, self.n, self.modulus))

    # -- internal tables ------------------------------------------------------

    def _build_tables(self):
        n, q = self.n, self.q
        # reduction of x^k for k < 2n-1 into the power basis
        red = np.zeros((2 * n - 1, n), dtype=object)
        for k in range(n):
            red[k, k] = 1
        f = self.modulus
        for k in range(n, 2 * n - 1):
            prev = red[k - 1]
            row = np.zeros(n, dtype=object)
            row[1:] = prev[:-1]
            top = prev[-1]
            for j in range(n):
                row[j] = (row[j] - top * f[j]) % q
            red[k] = row
        table = np.zeros((n, n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                table[i, j] = red[i + j]
        self.mul_table = table.astype(self.dtype)

    def _matpow_int(self, mat, e):
        result = np.eye(self.n, dtype=self.dtype)
        base = mat.copy()
        while e:
            if e & 1:
                result = (result @ base) % self.q
            base = (base @ base) % self.q
            e >>= 1
        return result

    # -- vectorised coordinate arithmetic -------------------------------------

    def zeros(self, shape=()):
        return np.zeros(tuple(shape) + (self.n,), dtype=self.dtype)

    def const(self, c: int, shape=()):
        out = self.zeros(shape)
        out[..., 0] = c % self.q
        return out

    def gen(self):
        out = self.zeros()
        if self.n == 1:
            # degree one: the generator is the root of x + a_0
            out[0] = (-self.modulus[0]) % self.q
        else:
            out[1] = 1
        return out

    def asarray(self, x):
        return np.asarray(x, dtype=self.dtype) % self.q

    def mul(self, a, b):
        """Elementwise product of broadcastable coordinate arrays."""
        if self.n == 1:
            return (a * b) % self.q
        outer = a[..., :, None] * b[..., None, :]
        shape = outer.shape[:-2]
        flat = outer.reshape(shape + (self.n * self.n,)) % self.q
        return (flat @ self.mul_table.reshape(self.n * self.n, self.n)) % self.q

    def mult_matrix(self, a):
        """Matrix of y -> a*y on coordinates (shape (..., n, n), acts on columns)."""
        # column k of the result is a * g^k
        return np.einsum("...i,ikj->...jk", a, self.mul_table) % self.q

    def pow_vec(self, a, e: int):
        result = self.const(1, a.shape[:-1])
        base = a % self.q
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def frob(self, a, k: int = 1):
        """sigma^k applied coordinatewise to an array of elements."""
        k %= self.n
        if k == 0:
            return a % self.q
        if k == 1:
            mat = self.sigma
        elif k == self.n - 1:
            mat = self.sigma_inv
        else:
            mat = self._matpow_int(self.sigma, k)
        return (a @ mat.T) % self.q

    def frob_inv(self, a):
        return self.frob(a, -1)

    def inv(self, a):
        """Inverse of a unit (array of shape (n,))."""
        a = np.asarray(a, dtype=self.dtype) % self.q
        if not np.any(a % self.p):
            raise NonUnitError(f"{self!r}: element {list(a)} is not a unit")
        residue = gr_ctx(self.p, 1, self.n)
        y = residue.pow_vec(a % self.p, self.p ** self.n - 2).astype(self.dtype)
        prec = 1
        two = self.const(2)
        while prec < self.m:
            y = self.mul(y, (two - self.mul(a, y)) % self.q)
            prec *= 2
        return y

    def is_unit(self, a) -> bool:
        return bool(np.any(np.asarray(a) % self.p))

    def valuation(self, a) -> int:
        """p-adic valuation of an element; m for zero."""
        vals = [int(x) for x in np.asarray(a).ravel()]
        v = self.m
        for x in vals:
            if x:
                k = 0
                while x % self.p == 0:
                    x //= self.p
                    k += 1
                v = min(v, k)
        return v

    # -- matrices over the ring: arrays of shape (rows, cols, n) ---------------

    def identity(self, r: int):
        out = self.zeros((r, r))
        for i in range(r):
            out[i, i, 0] = 1
        return out

    def scalar_matrix(self, ints):
        """Lift an integer matrix to a matrix over the ring."""
        ints = np.asarray(ints, dtype=object)
        out = self.zeros(ints.shape)
        out[..., 0] = np.vectorize(lambda x: int(x) % self.q, otypes=[object])(ints)
        return out.astype(self.dtype)

    def matmul(self, X, Y):
        if self.n == 1:
            if self.dtype is object or X.shape[1] * (self.q - 1) ** 2 >= (1 << 63):
                return np.einsum("abi,bci->aci", X.astype(object), Y.astype(object)) % self.q
            return np.einsum("abi,bci->aci", X, Y) % self.q
        mx = self.mult_matrix(X)  # (a, b, n, n)
        return np.einsum("abkj,bcj->ack", mx, Y) % self.q

    def matfrob(self, X, k: int = 1):
        return self.frob(X, k)

    def mat_is_zero(self, X) -> bool:
        return not np.any(np.asarray(X) % self.q)

    def mat_inverse(self, X):
        """Gauss-Jordan inverse of a square matrix over the (local) ring."""
        r = X.shape[0]
        W = np.concatenate([X % self.q, self.identity(r)], axis=1)
        for col in range(r):
            piv = None
            for row in range(col, r):
                if self.is_unit(W[row, col]):
                    piv = row
                    break
            if piv is None:
                raise NonUnitError("matrix is not invertible over the ring")
            if piv != col:
                W[[col, piv]] = W[[piv, col]]
            inv = self.inv(W[col, col])
            W[col] = self.mul(W[col], inv[None, :])
            for row in range(r):
                if row != col and np.any(W[row, col]):
                    factor = W[row, col].copy()
                    W[row] = (W[row] - self.mul(W[col], factor[None, :])) % self.q
        return W[:, r:].copy()

    def charpoly(self, X):
        """Coefficients [1, c_1, ..., c_r] of det(T - X), division free (Berkowitz)."""
        r = X.shape[0]
        if r == 0:
            return self.const(1, (1,))
        vect = [self.const(1), (-X[r - 1, r - 1]) % self.q]
        for k in range(r - 2, -1, -1):
            size = r - k
            a = X[k, k]
            R = X[k:k + 1, k + 1:]
            C = X[k + 1:, k:k + 1]
            A1 = X[k + 1:, k + 1:]
            col = [self.const(1), (-a) % self.q]
            V = C
            for _ in range(size - 1):
                col.append((-self.matmul(R, V)[0, 0]) % self.q)
                V = self.matmul(A1, V)
            new = []
            for i in range(size + 1):
                acc = self.zeros()
                for j in range(min(i + 1, len(vect))):
                    acc = acc + self.mul(col[i - j], vect[j])
                new.append(acc % self.q)
            vect = new
        return np.array(vect, dtype=self.dtype)

    def adjugate(self, X):
        """Adjugate via Cayley-Hamilton: X adj(X) = det(X) I."""
        r = X.shape[0]
        cp = self.charpoly(X)
        acc = self.zeros((r, r))
        for i in range(r):
            acc = self.matmul(acc, X) if i else acc
            acc = (acc + self.scalar_times(cp[i], self.identity(r))) % self.q
        sign = 1 if (r - 1) % 2 == 0 else -1
        return (sign * acc) % self.q

    def det(self, X):
        r = X.shape[0]
        cp = self.charpoly(X)
        return ((-1) ** r * cp[r]) % self.q

    def scalar_times(self, c, X):
        return self.mul(np.broadcast_to(c, X.shape), X)

    # -- element wrappers -------------------------------------------------------

    def elem(self, coeffs) -> "GRElem":
        coeffs = list(coeffs) + [0] * (self.n - len(coeffs))
        return GRElem(self, tuple(int(c) % self.q for c in coeffs[: self.n]))

    def one(self) -> "GRElem":
        return self.elem([1])

    def generator(self) -> "GRElem":
        return GRElem(self, tuple(int(x) for x in self.gen()))

    def random_elem(self, rng: random.Random) -> "GRElem":
        return self.elem([rng.randrange(self.q) for _ in range(self.n)])

    def elements(self):
        """All elements (only sensible for tiny rings)."""
        for coeffs in itertools.product(range(self.q), repeat=self.n):
            yield self.elem(coeffs)


class GRElem:
    """An element of a Galois ring; immutable."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: GaloisRingCtx, coeffs: tuple[int, ...]):
        self.ctx = ctx
        self.coeffs = coeffs

    def _arr(self):
        return np.array(self.coeffs, dtype=self.ctx.dtype)

    def _wrap(self, arr) -> "GRElem":
        return GRElem(self.ctx, tuple(int(x) for x in arr))

    def _check(self, other):
        if isinstance(other, int):
            return self.ctx.elem([other])
        if other.ctx != self.ctx:
            raise ValueError("elements live in different rings")
        return other

    def __add__(self, other):
        other = self._check(other)
        return self._wrap((self._arr() + other._arr()) % self.ctx.q)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        return self._wrap((self._arr() - other._arr()) % self.ctx.q)

    def __rsub__(self, other):
        return self._check(other) - self

    def __neg__(self):
        return self._wrap((-self._arr()) % self.ctx.q)

    def __mul__(self, other):
        other = self._check(other)
        return self._wrap(self.ctx.mul(self._arr(), other._arr()))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return self._wrap(self.ctx.pow_vec(self._arr(), e))

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ctx.elem([other])
        return isinstance(other, GRElem) and self.ctx == other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ctx, self.coeffs))

    def __repr__(self):
        return f"GRElem({list(self.coeffs)} in {self.ctx!r})"

    def is_unit(self) -> bool:
        return any(c % self.ctx.p for c in self.coeffs)

    def inverse(self) -> "GRElem":
        return self._wrap(self.ctx.inv(self._arr()))

    def frobenius(self) -> "GRElem":
        return self._wrap(self.ctx.frob(self._arr(), 1))

    def frobenius_inv(self) -> "GRElem":
        return self._wrap(self.ctx.frob(self._arr(), -1))

    def valuation(self) -> int:
        return self.ctx.valuation(self._arr())

    def is_zero(self) -> bool:
        return not any(self.coeffs)


def frobenius(x: GRElem) -> GRElem:
    return x.frobenius()


def frobenius_inv(x: GRElem) -> GRElem:
    return x.frobenius_inv()


# ---------------------------------------------------------------------------
# construction


def _check_caps(p, m, n):
    if not is_prime(p):
        raise CapacityError(f"p = {p} is not prime")
    if not (1 <= m <= MAX_M and 1 <= n <= MAX_N and p < MAX_P):
        raise CapacityError(f"(p, m, n) = ({p}, {m}, {n}) outside supported range "
                            f"(p < {MAX_P}, m <= {MAX_M}, n <= {MAX_N})")


@lru_cache(maxsize=None)
def teichmuller_modulus(p: int, m: int, n: int) -> tuple[int, ...]:
    """Monic lift of the canonical polynomial whose roots are Teichmuller."""
    fbar = canonical_polynomial(p, n)
    if m == 1:
        return fbar
    if n == 1:
        return (0, 1)
    naive = GaloisRingCtx(p, m, n, fbar)
    # t = x^(p^(n(m-1))) is the Teichmuller representative of x
    t = naive.gen()
    for _ in range(n * (m - 1)):
        t = naive.pow_vec(t, p)
    # solve sum_{k<n} a_k t^k = -t^n for the coefficients a_k
    powers = [naive.const(1)]
    for _ in range(n):
        powers.append(naive.mul(powers[-1], t))
    basis = np.array(powers[:n], dtype=object).T  # columns t^k
    from .zpm_linalg import solve_unimodular
    rhs = (-np.array(powers[n], dtype=object)) % naive.q
    coeffs = solve_unimodular(basis, rhs, p, m)
    return tuple(int(c) for c in coeffs) + (1,)


@lru_cache(maxsize=None)
def gr_ctx(p: int, m: int, n: int) -> GaloisRingCtx:
    """Canonical GR(p^m, n) with Teichmuller generator."""
    _check_caps(p, m, n)
    return GaloisRingCtx(p, m, n, teichmuller_modulus(p, m, n))


def reduce_precision(x: GRElem, m_new: int) -> GRElem:
    ctx = x.ctx
    if not 1 <= m_new <= ctx.m:
        raise ValueError(f"cannot reduce precision {ctx.m} to {m_new}")
    target = gr_ctx(ctx.p, m_new, ctx.n)
    return target.elem([c % target.q for c in x.coeffs])


def lift_precision(x: GRElem, m_new: int) -> GRElem:
    """Coordinatewise lift (representatives in [0, p^m)) to higher precision."""
    ctx = x.ctx
    if m_new < ctx.m:
        raise ValueError("use reduce_precision to lower precision")
    return gr_ctx(ctx.p, m_new, ctx.n).elem(x.coeffs)


def exact_div_p(x: GRElem, k: int) -> GRElem:
    ctx = x.ctx
    if k == 0:
        return x
    if k >= ctx.m:
        raise DivisibilityError(f"cannot divide by p^{k} at precision {ctx.m}")
    pk = ctx.p ** k
    if any(c % pk for c in x.coeffs):
        raise DivisibilityError(f"{x!r} is not divisible by p^{k}")
    return gr_ctx(ctx.p, ctx.m - k, ctx.n).elem([c // pk for c in x.coeffs])


# ---------------------------------------------------------------------------
# embeddings


def _divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


def _residue_eval_poly(L: GaloisRingCtx, coeffs, x):
    """Evaluate an integer polynomial at an element x of the residue field L."""
    acc = L.zeros(x.shape[:-1])
    for c in reversed(coeffs):
        acc = (L.mul(acc, x) + L.const(c, x.shape[:-1])) % L.q
    return acc


def _apply_root(L: GaloisRingCtx, root, coords):
    """Image of sum coords[i] g^i under g -> root."""
    acc = L.zeros()
    power = L.const(1)
    for c in coords:
        acc = (acc + int(c) * power) % L.q
        power = L.mul(power, root)
    return acc


def _subfield_roots(p: int, b: int, c: int) -> list[tuple[int, ...]]:
    """Residue coordinates of the roots of the canonical degree-b polynomial in F_{p^c}."""
    from .zpm_linalg import ZpmMatrix, howell

    L = gr_ctx(p, 1, c)
    fixed = (L._matpow_int(L.sigma, b) - np.eye(c, dtype=L.dtype)) % p
    basis = [np.array(v, dtype=L.dtype) for v, _ in howell(ZpmMatrix.from_array(p, 1, fixed)).kernel_basis]
    assert len(basis) == b
    B = np.array(basis, dtype=L.dtype)  # (b, c): rows are basis vectors
    # multiplication table of the subfield in this basis
    prods = L.mul(B[:, None, :], B[None, :, :])  # (b, b, c)
    # coordinates in the basis: pick b independent columns of B
    pivots = _independent_columns(B, p)
    Bsub = B[:, pivots]
    inv = _inverse_mod(Bsub, p)
    table = (prods[..., pivots] @ inv) % p  # (b, b, b)
    one = (L.const(1)[pivots] @ inv) % p
    poly = canonical_polynomial(p, b)
    cand = np.array(list(itertools.product(range(p), repeat=b)), dtype=np.int64)
    acc = np.zeros_like(cand)
    for coef in reversed(poly):
        prod = np.einsum("ki,kj,ijl->kl", acc, cand, table) % p
        acc = (prod + coef * one[None, :]) % p
    zeros = np.nonzero(~acc.any(axis=1))[0]
    roots = [tuple(int(x) for x in (cand[k] @ B) % p) for k in zeros]
    assert len(roots) == b
    return sorted(roots)


def _independent_columns(B, p):
    from .zpm_linalg import ZpmMatrix, howell

    H = howell(ZpmMatrix.from_array(p, 1, B % p))
    return list(H.pivot_cols)


def _inverse_mod(M, p):
    from .zpm_linalg import solve_unimodular

    k = M.shape[0]
    cols = [solve_unimodular(M.astype(object), np.eye(k, dtype=object)[:, j], p, 1) for j in range(k)]
    return np.array(cols, dtype=np.int64).T


@lru_cache(maxsize=None)
def _root_system(p: int, c: int) -> dict[int, tuple[int, ...]]:
    """Compatible residue roots for every enumerable proper divisor of c.

    For b | c the returned coordinates give the image of the generator of
    F_{p^b} in F_{p^c}.  Choices are made from the largest b down, least
    coordinate vector first, subject to agreeing on common subfields; this
    makes embeddings transitive along towers.
    """
    L = gr_ctx(p, 1, c)
    divs = sorted((b for b in _divisors(c) if 1 < b < c and p ** b <= EMBED_ENUM_CAP), reverse=True)
    chosen: dict[int, tuple[int, ...]] = {}

    def image(root, coords):
        return tuple(int(x) for x in _apply_root(L, np.array(root, dtype=L.dtype), coords))

    for b in divs:
        forced = [b2 for b2 in chosen if b2 % b == 0]
        if forced:
            b2 = forced[0]
            chosen[b] = image(chosen[b2], _root_system(p, b2)[b])
            continue
        for cand in _subfield_roots(p, b, c):
            if all(image(cand, _root_system(p, b)[g]) == image(root2, _root_system(p, b2)[g])
                   for b2, root2 in chosen.items()
                   for g in [math.gcd(b, b2)] if g > 1):
                chosen[b] = cand
                break
        else:
            raise EmbeddingError(f"no compatible root for degree {b} inside degree {c}")
    return chosen


@lru_cache(maxsize=None)
def embedding_root(p: int, m: int, a: int, c: int) -> tuple[int, ...]:
    """Coordinates in GR(p^m, c) of the image of the generator of GR(p^m, a)."""
    if c % a:
        raise EmbeddingError(f"degree {a} does not divide {c}")
    target = gr_ctx(p, m, c)
    if a == c:
        return tuple(int(x) for x in target.gen())
    if a == 1:
        return tuple(int(x) for x in target.const(0))
    if p ** a > EMBED_ENUM_CAP:
        raise CapacityError(f"embedding from degree {a} exceeds enumeration cap")
    residue = _root_system(p, c)[a]
    t = np.array(residue, dtype=target.dtype)
    for _ in range(c * (m - 1)):
        t = target.pow_vec(t, p)
    check = _residue_eval_poly(target, gr_ctx(p, m, a).modulus, t)
    assert not np.any(check), "lifted root does not satisfy the source modulus"
    return tuple(int(x) for x in t)


def embed_array(src: GaloisRingCtx, target: GaloisRingCtx, arr):
    """Embed an array of source coordinates (last axis n_src) into target."""
    if src.p != target.p or src.m != target.m:
        raise EmbeddingError("embedding requires equal p and precision")
    if target.n % src.n:
        raise EmbeddingError(f"degree {src.n} does not divide {target.n}")
    arr = np.asarray(arr)
    if src.n == target.n:
        return arr.astype(target.dtype) % target.q
    root = np.array(embedding_root(src.p, src.m, src.n, target.n), dtype=target.dtype)
    powers = [target.const(1)]
    for _ in range(src.n - 1):
        powers.append(target.mul(powers[-1], root))
    P = np.array(powers, dtype=target.dtype)  # (n_src, n_tgt)
    return (arr.astype(target.dtype) @ P) % target.q


def embed(x: GRElem, target: GaloisRingCtx) -> GRElem:
    return GRElem(target, tuple(int(v) for v in embed_array(x.ctx, target, x._arr())))
