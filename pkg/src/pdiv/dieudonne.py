"""Dieudonne modules (M, phi, theta) given by matrices over W_m(F_{p^e}).

phi(x) = A sigma(x) and theta(x) = B sigma^{-1}(x), with A sigma(B) = p I and
B sigma^{-1}(A) = p I.  Matrices are arrays of shape (r, r, e) holding
coordinates in GR(p^m_work, e).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ConstructionError, DivisibilityError, NonUnitError, PrecisionError
from .galois_ring import GaloisRingCtx, embed_array, gr_ctx
from .zpm_linalg import ZpmMatrix, howell, rowspan_log_size


@dataclass(frozen=True)
class SlopeData:
    """Isogeny type: summands (c_s, d_s, mult), slope d_s / (c_s + d_s)."""

    summands: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        for c, d, k in self.summands:
            if c < 0 or d < 0 or k < 1 or c + d == 0:
                raise ConstructionError(f"invalid summand {(c, d, k)}")
            if math.gcd(c, d) != 1:
                raise ConstructionError(f"summand {(c, d)} is not coprime")

    @classmethod
    def of(cls, *summands) -> "SlopeData":
        out = []
        for s in summands:
            c, d, *k = s
            out.append((c, d, k[0] if k else 1))
        return cls(tuple(out))

    @classmethod
    def from_slopes(cls, slopes) -> "SlopeData":
        """Group a multiset of slopes into simple summands."""
        counts: dict[Fraction, int] = {}
        for s in slopes:
            counts[Fraction(s)] = counts.get(Fraction(s), 0) + 1
        out = []
        for lam in sorted(counts):
            r_s = lam.denominator
            d_s = lam.numerator
            if counts[lam] % r_s:
                raise ConstructionError(f"slope {lam} has multiplicity {counts[lam]} not divisible by {r_s}")
            out.append((r_s - d_s, d_s, counts[lam] // r_s))
        return cls(tuple(out))

    @property
    def c(self) -> int:
        return sum(c * k for c, _, k in self.summands)

    @property
    def d(self) -> int:
        return sum(d * k for _, d, k in self.summands)

    @property
    def r(self) -> int:
        return self.c + self.d

    def copies(self):
        for c, d, k in self.summands:
            for _ in range(k):
                yield c, d

    def slopes(self) -> list[Fraction]:
        out = []
        for c, d in self.copies():
            out += [Fraction(d, c + d)] * (c + d)
        return sorted(out)

    def canonical(self) -> "SlopeData":
        return SlopeData.from_slopes(self.slopes())

    def label(self) -> str:
        return "+".join(f"{c}.{d}x{k}" for c, d, k in self.canonical().summands)


@dataclass(frozen=True, eq=False)
class DieudonneModule:
    p: int
    e: int
    r: int
    c: int
    d: int
    A: np.ndarray = field(repr=False)
    B: np.ndarray = field(repr=False)
    m_work: int

    @property
    def ctx(self) -> GaloisRingCtx:
        return gr_ctx(self.p, self.m_work, self.e)

    def serialize(self) -> bytes:
        coords = ",".join(str(int(x)) for x in self.A.ravel())
        return f"p={self.p};e={self.e};r={self.r};m={self.m_work};A={coords}".encode()

    @property
    def hash(self) -> str:
        return hashlib.sha256(self.serialize()).hexdigest()

    def __eq__(self, other):
        return isinstance(other, DieudonneModule) and self.serialize() == other.serialize()

    def __hash__(self):
        return hash(self.serialize())

    def at_precision(self, m: int) -> "DieudonneModule":
        """The same module with matrices reduced mod p^m."""
        if m > self.m_work:
            raise PrecisionError(f"requested precision {m} exceeds working precision {self.m_work}")
        if m == self.m_work:
            return self
        ctx = gr_ctx(self.p, m, self.e)
        A = (self.A % ctx.q).astype(ctx.dtype)
        B = (self.B % ctx.q).astype(ctx.dtype)
        return DieudonneModule(self.p, self.e, self.r, self.c, self.d, A, B, m)

    def is_defined_over_prime_ring(self) -> bool:
        """True when A and B have entries in Z/p^m (sigma fixes them)."""
        return self.e == 1 or not (np.any(self.A[..., 1:]) or np.any(self.B[..., 1:]))


# ---------------------------------------------------------------------------
# helpers


def as_matrix(ctx: GaloisRingCtx, data, r: int | None = None) -> np.ndarray:
    """Parse a nested list whose entries are ints or coordinate lists."""
    if isinstance(data, np.ndarray) and data.ndim == 3:
        return (data % ctx.q).astype(ctx.dtype)
    rows = list(data)
    size = len(rows)
    out = ctx.zeros((size, len(rows[0]) if size else 0))
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            if isinstance(x, (list, tuple, np.ndarray)):
                coords = [int(c) for c in x]
                if len(coords) > ctx.n:
                    raise ConstructionError(f"entry {(i, j)} has {len(coords)} coordinates, ring degree {ctx.n}")
                out[i, j, :len(coords)] = [c % ctx.q for c in coords]
            else:
                out[i, j, 0] = int(x) % ctx.q
    if r is not None and out.shape[:2] != (r, r):
        raise ConstructionError(f"expected a {r}x{r} matrix, got {out.shape[:2]}")
    return out


def linearize(ctx: GaloisRingCtx, X) -> np.ndarray:
    """Z/p^m matrix of y -> X y on stacked coordinates (rows*n x cols*n)."""
    rows, cols = X.shape[:2]
    n = ctx.n
    blocks = ctx.mult_matrix(X)  # (rows, cols, n, n)
    return blocks.transpose(0, 2, 1, 3).reshape(rows * n, cols * n) % ctx.q


def _frob_block(ctx: GaloisRingCtx, size: int) -> np.ndarray:
    return np.kron(np.eye(size, dtype=ctx.dtype), ctx.sigma) % ctx.q


def residue_rank(ctx: GaloisRingCtx, X) -> int:
    """Rank over F_{p^n} of X mod p."""
    res = gr_ctx(ctx.p, 1, ctx.n)
    lin = linearize(res, (X % ctx.p).astype(res.dtype))
    return rowspan_log_size(lin, ctx.p, 1) // ctx.n


def phi1_kernel(D: DieudonneModule) -> list[np.ndarray]:
    """F_p-basis of F^1 = ker(x -> A sigma(x)) inside M/pM, as (r, e) arrays."""
    res = gr_ctx(D.p, 1, D.e)
    Abar = (D.A % D.p).astype(res.dtype)
    lin = (linearize(res, Abar) @ _frob_block(res, D.r)) % D.p
    H = howell(ZpmMatrix.from_array(D.p, 1, lin))
    return [np.array(v, dtype=res.dtype).reshape(D.r, D.e) for v, _ in H.kernel_basis]


def _verify(D: DieudonneModule) -> DieudonneModule:
    ctx = D.ctx
    pI = ctx.scalar_times(ctx.const(D.p), ctx.identity(D.r))
    if not np.array_equal(ctx.matmul(D.A, ctx.frob(D.B)), pI):
        raise ConstructionError("A sigma(B) != p I")
    if not np.array_equal(ctx.matmul(D.B, ctx.frob_inv(D.A)), pI):
        raise ConstructionError("B sigma^-1(A) != p I")
    if D.c + D.d != D.r:
        raise ConstructionError("c + d != r")
    if residue_rank(ctx, D.A) != D.c:
        raise ConstructionError(f"rank of A mod p is not c = {D.c}")
    if len(phi1_kernel(D)) != D.d * D.e:
        raise ConstructionError(f"ker phi_1 does not have dimension d = {D.d}")
    return D


def _make(p, e, A, B, m_work) -> DieudonneModule:
    ctx = gr_ctx(p, m_work, e)
    r = A.shape[0]
    c = residue_rank(ctx, A)
    return _verify(DieudonneModule(p, e, r, c, r - c, A, B, m_work))


# ---------------------------------------------------------------------------
# builders


def default_m_work(m_max: int, e: int, d: int, headroom: int = 1) -> int:
    return max(m_max + headroom, e * d + 1)


def from_slopes(p: int, data: SlopeData, m_work: int | None = None) -> DieudonneModule:
    if m_work is None:
        m_work = data.d + 1
    if m_work < data.d + 1:
        raise PrecisionError(f"m_work = {m_work} below slope headroom d + 1 = {data.d + 1}")
    ctx = gr_ctx(p, m_work, 1)
    r = data.r
    A = ctx.zeros((r, r))
    B = ctx.zeros((r, r))
    base = 0
    for c_s, d_s in data.copies():
        r_s = c_s + d_s
        for i in range(r_s):
            # A e_i = e_{i+1} for the first c_s basis vectors, p e_{i+1} after
            a = 1 if i < c_s else p
            A[base + (i + 1) % r_s, base + i, 0] = a % ctx.q
            # B = p A^{-1}: B e_{i+1} = (p / a) e_i
            B[base + i, base + (i + 1) % r_s, 0] = (p // a) % ctx.q
        base += r_s
    return _verify(DieudonneModule(p, 1, r, data.c, data.d, A, B, m_work))


def from_matrix(p: int, e: int, A, m_work: int, B=None) -> DieudonneModule:
    """Module with phi given by A; theta is derived unless B is supplied."""
    ctx = gr_ctx(p, m_work, e)
    if B is not None:
        Am = as_matrix(ctx, A)
        return _make(p, e, Am, as_matrix(ctx, B, Am.shape[0]), m_work)
    r = len(A) if not isinstance(A, np.ndarray) else A.shape[0]
    # compute p A^{-1} = p adj(A) / det(A) at raised precision, then divide
    m_hi = m_work + r + 1
    hi = gr_ctx(p, m_hi, e)
    Ah = as_matrix(hi, A, r)
    det = hi.det(Ah)
    v = hi.valuation(det)
    if v >= m_hi:
        raise PrecisionError(f"det(A) vanishes at precision {m_hi}; raise m_work")
    unit = (det // p ** v) % hi.q
    unit_inv = hi.inv(unit)
    adj = hi.adjugate(Ah)
    if v == 0:
        pinv = (p * adj) % hi.q
    else:
        if np.any(adj % p ** (v - 1)):
            raise ConstructionError("p A^-1 is not integral: not a Dieudonne module")
        pinv = adj // p ** (v - 1)
    pinv = hi.scalar_times(unit_inv, pinv % hi.q)
    Bh = hi.frob_inv(pinv)
    Am = (Ah % ctx.q).astype(ctx.dtype)
    Bm = (Bh % ctx.q).astype(ctx.dtype)
    return _make(p, e, Am, Bm, m_work)


def twist(D: DieudonneModule, g) -> DieudonneModule:
    """(M, g phi, theta g^{-1}): A' = g A, B' = B sigma^{-1}(g^{-1})."""
    ctx = D.ctx
    gm = as_matrix(ctx, g, D.r)
    try:
        ginv = ctx.mat_inverse(gm)
    except NonUnitError as exc:
        raise ConstructionError("twisting matrix is not invertible") from exc
    A = ctx.matmul(gm, D.A)
    B = ctx.matmul(D.B, ctx.frob_inv(ginv))
    return _make(D.p, D.e, A, B, D.m_work)


def change_base(D: DieudonneModule, e: int) -> DieudonneModule:
    """Scalar extension from W(F_{p^e0}) to W(F_{p^e}), e0 | e."""
    if e == D.e:
        return D
    src, tgt = D.ctx, gr_ctx(D.p, D.m_work, e)
    A = embed_array(src, tgt, D.A)
    B = embed_array(src, tgt, D.B)
    return DieudonneModule(D.p, e, D.r, D.c, D.d, A, B, D.m_work)


def direct_sum(D1: DieudonneModule, D2: DieudonneModule) -> DieudonneModule:
    if D1.p != D2.p:
        raise ConstructionError("direct sum of modules over different primes")
    m = min(D1.m_work, D2.m_work)
    e = D1.e * D2.e // math.gcd(D1.e, D2.e)
    D1 = change_base(D1.at_precision(m), e)
    D2 = change_base(D2.at_precision(m), e)
    ctx = gr_ctx(D1.p, m, e)
    r = D1.r + D2.r
    A = ctx.zeros((r, r))
    B = ctx.zeros((r, r))
    A[:D1.r, :D1.r] = D1.A
    A[D1.r:, D1.r:] = D2.A
    B[:D1.r, :D1.r] = D1.B
    B[D1.r:, D1.r:] = D2.B
    return _verify(DieudonneModule(D1.p, e, r, D1.c + D2.c, D1.d + D2.d, A, B, m))


def direct_power(D: DieudonneModule, s: int) -> DieudonneModule:
    out = D
    for _ in range(s - 1):
        out = direct_sum(out, D)
    return out


def dual(D: DieudonneModule) -> DieudonneModule:
    """Cartier dual: A_dual = sigma(B)^T, B_dual = sigma^{-1}(A)^T."""
    ctx = D.ctx
    A = ctx.frob(D.B).transpose(1, 0, 2).copy()
    B = ctx.frob_inv(D.A).transpose(1, 0, 2).copy()
    return _verify(DieudonneModule(D.p, D.e, D.r, D.d, D.c, A, B, D.m_work))


# ---------------------------------------------------------------------------
# invariants


def a_number(D: DieudonneModule) -> int:
    """r minus the dimension of Im(phi_1) + Im(theta_1) in M/pM."""
    ctx = D.ctx
    joint = np.concatenate([D.A, D.B], axis=1)
    return D.r - residue_rank(ctx, joint)


def frobenius_power_matrix(D: DieudonneModule) -> np.ndarray:
    """A sigma(A) ... sigma^{e-1}(A), the matrix of the linear map phi^e."""
    ctx = D.ctx
    P = D.A
    for k in range(1, D.e):
        P = ctx.matmul(P, ctx.frob(D.A, k))
    return P


def _lower_hull(points):
    hull = []
    for pt in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point if it lies on or above the chord
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def newton_slopes(D: DieudonneModule) -> list[Fraction]:
    if D.m_work <= D.e * D.d:
        raise PrecisionError(f"m_work = {D.m_work} must exceed e*d = {D.e * D.d}; raise m_work")
    ctx = D.ctx
    cp = ctx.charpoly(frobenius_power_matrix(D))
    known, unknown = [], []
    for i in range(D.r + 1):
        v = ctx.valuation(cp[i])
        (unknown if v >= ctx.m else known).append((i, v))
    if known[-1][0] != D.r:
        raise PrecisionError("determinant valuation not resolvable; raise m_work")
    hull = _lower_hull(known)

    def hull_at(x):
        for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
            if x1 <= x <= x2:
                return Fraction(y1) + Fraction(y2 - y1, x2 - x1) * (x - x1)
        raise AssertionError

    for i, _ in unknown:
        if hull_at(i) >= ctx.m:
            raise PrecisionError(f"coefficient {i} of the characteristic polynomial is ambiguous; raise m_work")
    slopes = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slopes += [Fraction(y2 - y1, (x2 - x1) * D.e)] * (x2 - x1)
    slopes.sort()
    assert sum(slopes) == D.d and all(0 <= s <= 1 for s in slopes)
    return slopes


def slope_data(D: DieudonneModule) -> SlopeData:
    return SlopeData.from_slopes(newton_slopes(D))


def s_height(data: SlopeData, c: int | None = None, d: int | None = None) -> int:
    """cd - (1/2) sum_{s,t} |c_s d_t - c_t d_s| over summand copies."""
    if c is None:
        c = data.c
    if d is None:
        d = data.d
    if (c, d) != (data.c, data.d):
        raise ConstructionError(f"slope data has (c, d) = {(data.c, data.d)}, expected {(c, d)}")
    copies = list(data.copies())
    total = sum(abs(cs * dt - ct * ds) for cs, ds in copies for ct, dt in copies)
    assert total % 2 == 0
    return c * d - total // 2


def j_number(c: int, d: int) -> int:
    r = c + d
    return -((-c * d) // r) if r else 0


def is_ordinary(D: DieudonneModule) -> bool:
    return a_number(D) == 0


def normalisation_criteria(D: DieudonneModule, g) -> tuple[bool, bool]:
    """Both sides of the normalisation criterion for g.

    First: g phi(g^{-1}) and phi(g) g^{-1} are integral, where
    phi(h) = A sigma(h) A^{-1} = A sigma(h) sigma(B) / p.
    Second: g mod p maps F^1 = ker(phi_1) into itself.
    """
    ctx = D.ctx
    gm = as_matrix(ctx, g, D.r)
    ginv = ctx.mat_inverse(gm)
    sB = ctx.frob(D.B)
    X1 = ctx.matmul(ctx.matmul(gm, D.A), ctx.matmul(ctx.frob(ginv), sB))
    X2 = ctx.matmul(ctx.matmul(D.A, ctx.frob(gm)), ctx.matmul(sB, ginv))
    integral = not np.any(X1 % D.p) and not np.any(X2 % D.p)
    res = gr_ctx(D.p, 1, D.e)
    gbar = (gm % D.p).astype(res.dtype)
    Abar = (D.A % D.p).astype(res.dtype)
    preserves = True
    for x in phi1_kernel(D):
        y = res.matmul(gbar, x[:, None, :])
        if np.any(res.matmul(Abar, res.frob(y))):
            preserves = False
            break
    return integral, preserves


def check_normalisation(D: DieudonneModule, g) -> bool:
    integral, preserves = normalisation_criteria(D, g)
    if integral != preserves:
        raise AssertionError(f"normalisation criteria disagree: integral={integral}, preserves={preserves}")
    return integral
