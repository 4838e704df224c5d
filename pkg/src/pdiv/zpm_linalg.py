"""Exact linear algebra over Z/p^m.

The workhorse is a Howell-form elimination: columns are processed left to
right, the pivot in each column is an entry of minimal p-adic valuation, and
whenever the pivot is p^v with v > 0 the row p^(m-v) * (pivot row) is fed back
into the pool so that the final rows have the Howell span property.  With that
property the row span has exactly prod p^(m - v_i) elements, which is what
makes kernel sizes exact over a non-field.

A Smith-style full-pivoting elimination is kept as an independent cross-check.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np


def _dtype_for(q: int):
    return np.int64 if (q - 1) * (q - 1) < (1 << 62) else object


@dataclass(frozen=True)
class ZpmMatrix:
    """A rows x cols matrix over Z/p^m (entries canonical in [0, p^m))."""

    p: int
    m: int
    data: np.ndarray = field(repr=False)

    @classmethod
    def from_array(cls, p: int, m: int, arr) -> "ZpmMatrix":
        q = p ** m
        if (isinstance(arr, np.ndarray) and arr.ndim == 2 and arr.dtype.kind == "i"
                and _dtype_for(q) is np.int64):
            data = (arr % q).astype(np.int64)
            data.setflags(write=False)
            return cls(p, m, data)
        arr = np.asarray(arr, dtype=object)
        if arr.ndim != 2:
            arr = arr.reshape(arr.shape[0] if arr.ndim else 0, -1)
        data = (arr % q).astype(_dtype_for(q))
        data.setflags(write=False)
        return cls(p, m, data)

    @classmethod
    def from_rows(cls, p: int, m: int, rows) -> "ZpmMatrix":
        return cls.from_array(p, m, [list(r) for r in rows])

    @property
    def q(self) -> int:
        return self.p ** self.m

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def entries(self) -> tuple[int, ...]:
        return tuple(int(x) for x in self.data.ravel())

    def transpose(self) -> "ZpmMatrix":
        return ZpmMatrix.from_array(self.p, self.m, self.data.T)

    def apply(self, vec) -> np.ndarray:
        v = np.asarray(vec, dtype=object)
        return (self.data.astype(object) @ v) % self.q

    def __eq__(self, other):
        return (isinstance(other, ZpmMatrix) and (self.p, self.m) == (other.p, other.m)
                and self.data.shape == other.data.shape and np.array_equal(self.data, other.data))

    def __hash__(self):
        return hash((self.p, self.m, self.data.shape, self.entries))


def _valuations(vals, p: int, m: int) -> np.ndarray:
    v = np.zeros(len(vals), dtype=np.int64)
    pk = p
    for _ in range(1, m):
        v += (vals % pk == 0)
        pk *= p
    return v


def _echelon(A: np.ndarray, p: int, m: int, reduce: bool = True):
    """Howell echelon of the rows of A.

    Returns (rows, pivot_cols, pivot_valuations); every pivot is exactly p^v.
    """
    q = p ** m
    nrows, ncols = A.shape
    dtype = _dtype_for(q)
    W = np.zeros((nrows + ncols, ncols), dtype=dtype)
    W[:nrows] = np.asarray(A) % q
    active = nrows
    top = 0
    piv_cols: list[int] = []
    piv_vals: list[int] = []
    for j in range(ncols):
        if top >= active:
            break
        col = W[top:active, j]
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        vals = _valuations(col[nz], p, m)
        k = int(np.argmin(vals))
        v = int(vals[k])
        src = top + int(nz[k])
        if src != top:
            W[[top, src]] = W[[src, top]]
        pv = p ** v
        unit = int(W[top, j]) // pv
        # entries left of column j vanish in every active row below the pivots
        prow = (W[top, j:] * pow(unit, -1, q)) % q
        W[top, j:] = prow
        below = W[top + 1:active, j]
        nzb = np.flatnonzero(below)
        if nzb.size:
            idx = top + 1 + nzb
            f = W[idx, j] // pv
            W[idx, j:] = (W[idx, j:] - f[:, None] * prow) % q
        if v > 0:
            extra = (prow * (p ** (m - v))) % q
            if extra.any():
                W[active, j:] = extra
                active += 1
        piv_cols.append(j)
        piv_vals.append(v)
        top += 1
    H = W[:top]
    if reduce:
        for k in range(top):
            j, pv = piv_cols[k], p ** piv_vals[k]
            f = H[:k, j] // pv
            idx = np.flatnonzero(f)
            if idx.size:
                H[idx] = (H[idx] - f[idx, None] * H[k]) % q
    return H.copy(), piv_cols, piv_vals


@dataclass(frozen=True)
class HowellForm:
    """Howell normal form of a matrix together with an explicit kernel."""

    p: int
    m: int
    cols: int
    matrix: np.ndarray = field(repr=False)
    pivot_cols: tuple[int, ...]
    pivot_vals: tuple[int, ...]
    kernel_log_size: int
    # echelon generators g_i with exponents e_i: every kernel element is
    # sum c_i g_i for exactly one choice of 0 <= c_i < p^(e_i)
    kernel_basis: tuple[tuple[tuple[int, ...], int], ...] = field(repr=False)
    # Howell form of [H^T | I]; its rows with vanishing left block are the kernel
    transform: np.ndarray = field(repr=False, default=None)

    @property
    def q(self) -> int:
        return self.p ** self.m

    @property
    def rowspan_log_size(self) -> int:
        return sum(self.m - v for v in self.pivot_vals)


def howell(M: ZpmMatrix) -> HowellForm:
    p, m, q = M.p, M.m, M.q
    H, pc, pv = _echelon(M.data, p, m)
    klog = m * M.cols - sum(m - v for v in pv)
    # H has the same row span as M and at most as many rows as columns
    n, R = M.cols, H.shape[0]
    aug = np.zeros((n, R + n), dtype=_dtype_for(q))
    aug[:, :R] = H.T
    aug[:, R:] = np.eye(n, dtype=aug.dtype)
    T, tc, tv = _echelon(aug, p, m)
    basis = []
    for row, c, v in zip(T, tc, tv):
        if c >= R:
            basis.append((tuple(int(x) for x in row[R:]), m - v))
    assert sum(e for _, e in basis) == klog, "kernel generators disagree with row-span count"
    H.setflags(write=False)
    T.setflags(write=False)
    return HowellForm(p, m, n, H, tuple(pc), tuple(pv), klog, tuple(basis), T)


def howell_matrix(M: ZpmMatrix) -> ZpmMatrix:
    return ZpmMatrix.from_array(M.p, M.m, howell(M).matrix.reshape(-1, M.cols))


def kernel_log_size(M: ZpmMatrix) -> int:
    """log_p of the number of x with M x = 0 (no kernel basis built)."""
    _, _, pv = _echelon(M.data, M.p, M.m, reduce=False)
    return M.m * M.cols - sum(M.m - v for v in pv)


def rowspan_log_size(A: np.ndarray, p: int, m: int) -> int:
    _, _, pv = _echelon(A, p, m, reduce=False)
    return sum(m - v for v in pv)


def image_log_size(M: ZpmMatrix) -> int:
    """log_p of |{M x}|, read off the Howell form of the transpose."""
    return rowspan_log_size(M.data.T, M.p, M.m)


def kernel_sample(H: HowellForm, seed: int) -> tuple[int, ...]:
    """Uniform kernel element, reproducible from the seed."""
    rng = random.Random(seed)
    q = H.q
    vec = [0] * H.cols
    for gen, e in H.kernel_basis:
        c = rng.randrange(H.p ** e)
        if c:
            for i, x in enumerate(gen):
                if x:
                    vec[i] = (vec[i] + c * x) % q
    return tuple(vec)


def smith_exponents(M: ZpmMatrix) -> list[int]:
    """Valuations of the nonzero invariant factors (full-pivoting cross-check).

    Pivot: minimal valuation, then lowest column, then lowest row.
    """
    p, m, q = M.p, M.m, M.q
    W = M.data.astype(object) % q
    out = []
    while W.size:
        nzr, nzc = np.nonzero(W)
        if nzr.size == 0:
            break
        vals = _valuations(W[nzr, nzc], p, m)
        best = min(zip(vals.tolist(), nzc.tolist(), nzr.tolist()))
        v, c, r = best
        pivot = int(W[r, c])
        unit_inv = pow(pivot // p ** v, -1, q)
        colf = [(int(x) // p ** v) * unit_inv % q for x in W[:, c]]
        for i in range(W.shape[0]):
            if i != r and colf[i]:
                W[i] = (W[i] - colf[i] * W[r]) % q
        W = np.delete(np.delete(W, r, axis=0), c, axis=1)
        out.append(v)
    return sorted(out)


def solve_unimodular(M, rhs, p: int, m: int) -> list[int]:
    """Solve M x = rhs for square M invertible mod p."""
    q = p ** m
    n = len(M)
    W = [[int(x) % q for x in row] + [int(rhs[i]) % q] for i, row in enumerate(np.asarray(M, dtype=object))]
    for c in range(n):
        piv = next((r for r in range(c, n) if W[r][c] % p), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular mod p")
        W[c], W[piv] = W[piv], W[c]
        inv = pow(W[c][c], -1, q)
        W[c] = [x * inv % q for x in W[c]]
        for r in range(n):
            if r != c and W[r][c]:
                f = W[r][c]
                W[r] = [(x - f * y) % q for x, y in zip(W[r], W[c])]
    return [W[i][n] for i in range(n)]


def brute_force_kernel_count(M: ZpmMatrix) -> int:
    """Enumerate all vectors (test oracle; only for tiny domains)."""
    import itertools

    q = M.q
    data = M.data.astype(object)
    count = 0
    for vec in itertools.product(range(q), repeat=M.cols):
        if not np.any((data @ np.array(vec, dtype=object)) % q):
            count += 1
    return count
