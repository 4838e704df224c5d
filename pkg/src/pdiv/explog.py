"""Truncated exponential and logarithm on nilpotency domains.

Two families of domains inside M_r(W_m(F_{p^n})):

* S(s), for p > 2 and 1 <= s <= (p-1)/2: matrices X with (X mod p)^s = 0.
* OneT(t): matrices X = p Y with (Y mod p)^t = 0.

Term bounds.  For OneT(t) the term X^v / v! has valuation at least
v + floor(v/t) - v_p(v!) >= 1 + floor(v/t), so all terms with v >= t*m vanish
mod p^m.  For S(s) the valuation is at least floor(v/s) - v_p(v!) which
exceeds (v+1)/(p-1) - 1, so terms with v >= (m+1)(p-1) vanish.  The same
bounds hold for the logarithm since v_p(v) <= v_p(v!).

Division by v! is exact: the sum is evaluated at precision m + H with
H = max v_p(v!) over the terms kept, each term is divided by p^{v_p(v!)}
exactly, and the result is reduced back to precision m.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .galois_ring import GaloisRingCtx, gr_ctx


@dataclass(frozen=True)
class SigmaDomain:
    kind: str  # "S" or "OneT"
    index: int

    @classmethod
    def S(cls, s: int) -> "SigmaDomain":
        return cls("S", s)

    @classmethod
    def OneT(cls, t: int) -> "SigmaDomain":
        return cls("OneT", t)

    def validate(self, p: int):
        if self.index < 1:
            raise DomainError("domain index must be positive")
        if self.kind == "S":
            if p == 2 or 2 * self.index > p - 1:
                raise DomainError(f"S({self.index}) needs p > 2 and s <= (p-1)/2 (p = {p})")
        elif self.kind != "OneT":
            raise DomainError(f"unknown domain kind {self.kind!r}")

    def term_bound(self, p: int, m: int) -> int:
        """V such that all terms of degree v >= V vanish mod p^m."""
        if self.kind == "OneT":
            return self.index * m
        return (m + 1) * (p - 1)

    def __str__(self):
        return f"{self.kind}({self.index})"


def _vp(x: int, p: int) -> int:
    k = 0
    while x % p == 0:
        x //= p
        k += 1
    return k


@lru_cache(maxsize=None)
def _vp_factorial(v: int, p: int) -> int:
    return sum(_vp(k, p) for k in range(2, v + 1))


def _nilpotent_mod_p(ctx: GaloisRingCtx, Y, k: int) -> bool:
    res = gr_ctx(ctx.p, 1, ctx.n)
    Ybar = (np.asarray(Y) % ctx.p).astype(res.dtype)
    P = Ybar
    for _ in range(k - 1):
        if not np.any(P):
            return True
        P = res.matmul(P, Ybar)
    return not np.any(P)


def sigma_member(ctx: GaloisRingCtx, X, dom: SigmaDomain) -> bool:
    dom.validate(ctx.p)
    X = np.asarray(X) % ctx.q
    if dom.kind == "S":
        return _nilpotent_mod_p(ctx, X, dom.index)
    if np.any(X % ctx.p):
        return False
    if ctx.m == 1:
        return True  # X = 0
    return _nilpotent_mod_p(ctx, X // ctx.p, dom.index)


def _series(ctx: GaloisRingCtx, X, dom: SigmaDomain, kind: str, terms: int | None = None):
    """sum over 1 <= v < V of c_v X^v with c_v = 1/v! (exp) or (-1)^(v-1)/v (log)."""
    p, m = ctx.p, ctx.m
    V = terms if terms is not None else dom.term_bound(p, m)
    denom_val = (lambda v: _vp_factorial(v, p)) if kind == "exp" else (lambda v: _vp(v, p))
    H = max([denom_val(v) for v in range(1, V)] + [0])
    hi = gr_ctx(p, m + H, ctx.n)
    Xh = np.asarray(X, dtype=hi.dtype) % ctx.q
    total = ctx.zeros(X.shape[:2])
    power = Xh
    fact = 1
    for v in range(1, V):
        if v > 1:
            power = hi.matmul(power, Xh)
        if kind == "exp":
            fact *= v
            den = fact
            sign = 1
        else:
            den = v
            sign = 1 if v % 2 else -1
        k = denom_val(v)
        if np.any(power % p ** k):
            raise AssertionError(f"term {v} is not divisible by p^{k}: input outside the domain")
        term = (power // p ** k) % ctx.q
        unit = den // p ** k
        coef = sign * pow(unit, -1, ctx.q) % ctx.q
        total = (total + coef * term.astype(object)) % ctx.q
    return total.astype(ctx.dtype)


def exp_sigma(ctx: GaloisRingCtx, X, dom: SigmaDomain, terms: int | None = None):
    if not sigma_member(ctx, X, dom):
        raise DomainError(f"matrix is not in {dom}")
    r = X.shape[0]
    return (ctx.identity(r) + _series(ctx, np.asarray(X), dom, "exp", terms)) % ctx.q


def log_sigma(ctx: GaloisRingCtx, Y, dom: SigmaDomain, terms: int | None = None):
    Y = np.asarray(Y)
    r = Y.shape[0]
    X = (Y - ctx.identity(r)) % ctx.q
    if not sigma_member(ctx, X, dom):
        raise DomainError(f"Y - I is not in {dom}")
    return _series(ctx, X, dom, "log", terms)


def conjugation_equivariance_check(ctx: GaloisRingCtx, X, g, dom: SigmaDomain) -> bool:
    """exp and log commute with conjugation by g."""
    ginv = ctx.mat_inverse(g)
    Xc = ctx.matmul(ctx.matmul(g, X), ginv)
    lhs = exp_sigma(ctx, Xc, dom)
    rhs = ctx.matmul(ctx.matmul(g, exp_sigma(ctx, X, dom)), ginv)
    if not np.array_equal(lhs, rhs):
        return False
    I = ctx.identity(X.shape[0])
    lhs = log_sigma(ctx, (I + Xc) % ctx.q, dom)
    rhs = ctx.matmul(ctx.matmul(g, log_sigma(ctx, (I + X) % ctx.q, dom)), ginv)
    return bool(np.array_equal(lhs, rhs))


def endo_preservation_check(D, m: int, E, dom: SigmaDomain) -> bool:
    """exp(E) - I and log(I + E) are again endomorphisms of D[p^m]."""
    from .centralizer import is_endomorphism

    ctx = gr_ctx(D.p, m, E.shape[-1])
    if not is_endomorphism(D, m, E, ctx):
        raise ValueError("input is not an endomorphism of the truncation")
    I = ctx.identity(D.r)
    ex = (exp_sigma(ctx, E, dom) - I) % ctx.q
    lg = log_sigma(ctx, (I + E) % ctx.q, dom)
    return is_endomorphism(D, m, ex, ctx) and is_endomorphism(D, m, lg, ctx)


def block_upper_triangular(X, steps) -> bool:
    """X preserves the span of the first k coordinates for every k in steps."""
    X = np.asarray(X)
    return not any(np.any(X[k:, :k]) for k in steps)


def random_nilpotent_residue(ctx: GaloisRingCtx, r: int, index: int, rng: random.Random):
    """Random matrix over the residue field with N^index = 0, lifted to ctx.

    Built as g J g^{-1} with J block diagonal strictly upper triangular and
    blocks of size <= index.
    """
    res = gr_ctx(ctx.p, 1, ctx.n)
    J = res.zeros((r, r))
    start = 0
    while start < r:
        size = min(rng.randint(1, index), r - start)
        for a in range(start, start + size):
            for b in range(a + 1, start + size):
                J[a, b] = [rng.randrange(ctx.p) for _ in range(ctx.n)]
        start += size
    g = random_invertible(res, r, rng)
    N = res.matmul(res.matmul(g, J), res.mat_inverse(g))
    return N.astype(ctx.dtype)


def random_invertible(ctx: GaloisRingCtx, r: int, rng: random.Random):
    while True:
        g = np.array([[[rng.randrange(ctx.q) for _ in range(ctx.n)] for _ in range(r)]
                      for _ in range(r)], dtype=ctx.dtype)
        if ctx.is_unit(ctx.det(g)):
            return g


def random_domain_element(ctx: GaloisRingCtx, r: int, dom: SigmaDomain, rng: random.Random):
    dom.validate(ctx.p)
    noise = np.array([[[rng.randrange(ctx.q) for _ in range(ctx.n)] for _ in range(r)]
                      for _ in range(r)], dtype=object)
    if dom.kind == "S":
        N = random_nilpotent_residue(ctx, r, dom.index, rng).astype(object)
        X = (N + ctx.p * noise) % ctx.q
    else:
        N = random_nilpotent_residue(ctx, r, dom.index, rng).astype(object)
        X = (ctx.p * (N + ctx.p * noise)) % ctx.q
    return X.astype(ctx.dtype)
