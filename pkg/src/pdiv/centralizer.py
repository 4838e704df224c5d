"""Endomorphism schemes of truncations D[p^m] via exact point counts.

An endomorphism of D[p^m] over F_{p^N} is a matrix E over W_m(F_{p^N}) with
E A = A sigma(E) and E B = B sigma^{-1}(E) mod p^m.  Both conditions are
Z/p^m-linear in the coordinates of E, so the number of solutions is p^k with
k read off a single Howell elimination.  The dimension gamma(m) of the scheme
is the growth rate of k in N.

Two independent assemblies of the linear system exist:

* "normal": for modules defined over Z_p, write E = sum_j E_j sigma^j(theta)
  in a normal basis of W_m(F_{p^N}); sigma becomes the cyclic shift of the
  integer blocks E_j and the equations become E_j A = A E_{j-1} and
  E_j B = B E_{j+1}.
* "power": coordinates in the power basis of GR(p^m, N), with A and B
  embedded and sigma acting through its coordinate matrix.  Works for any e.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field

import numpy as np
from filelock import FileLock

from .dieudonne import DieudonneModule, as_matrix
from .errors import (ExtractionError, HypothesisError, InconclusiveError,
                     PrecisionError)
from .galois_ring import GaloisRingCtx, embed_array, gr_ctx
from .zpm_linalg import (HowellForm, ZpmMatrix, howell, kernel_log_size,
                         kernel_sample, rowspan_log_size)


# ---------------------------------------------------------------------------
# constraints


@dataclass(frozen=True)
class LieConstraint:
    """Linear condition cutting End(M) down to a Lie algebra g.

    kind is "full", "hom" (E supported on Hom(M_2, M_1), the upper right
    r1 x r2 block), "parabolic" (E preserves the span of the first k
    coordinates for every k in `filtration`) or "pairing"
    (E^T J + J E = 0 for the integer matrix J).
    """

    kind: str = "full"
    r1: int = 0
    r2: int = 0
    filtration: tuple[int, ...] = ()
    J: tuple[tuple[int, ...], ...] | None = None
    alternating: bool = True

    @classmethod
    def full(cls):
        return cls("full")

    @classmethod
    def hom_block(cls, r1: int, r2: int):
        return cls("hom", r1=r1, r2=r2)

    @classmethod
    def parabolic(cls, filtration):
        return cls("parabolic", filtration=tuple(sorted(int(k) for k in filtration)))

    @classmethod
    def pairing(cls, J, alternating: bool = True):
        return cls("pairing", J=tuple(tuple(int(x) for x in row) for row in J), alternating=alternating)

    @classmethod
    def hyperbolic(cls, half: int, alternating: bool = True):
        """J = [[0, I], [eps I, 0]] with eps = -1 (alternating) or +1."""
        eps = -1 if alternating else 1
        r = 2 * half
        J = [[0] * r for _ in range(r)]
        for i in range(half):
            J[i][half + i] = 1
            J[half + i][i] = eps
        return cls.pairing(J, alternating)

    def positions(self, r: int) -> list[tuple[int, int]]:
        """Matrix positions where E may be nonzero."""
        if self.kind in ("full", "pairing"):
            return [(a, b) for a in range(r) for b in range(r)]
        if self.kind == "hom":
            if self.r1 + self.r2 != r:
                raise ValueError(f"hom block sizes {self.r1}+{self.r2} do not add up to {r}")
            return [(a, b) for a in range(self.r1) for b in range(self.r1, r)]
        if self.kind == "parabolic":
            steps = [k for k in self.filtration if 0 < k < r]
            # E[a, b] = 0 whenever b < k <= a for some step k
            return [(a, b) for a in range(r) for b in range(r)
                    if not any(b < k <= a for k in steps)]
        raise ValueError(f"unknown constraint kind {self.kind!r}")

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == "hom":
            out.update(r1=self.r1, r2=self.r2)
        elif self.kind == "parabolic":
            out["filtration"] = list(self.filtration)
        elif self.kind == "pairing":
            out.update(J=[list(row) for row in self.J], alternating=self.alternating)
        return out

    @classmethod
    def from_json(cls, obj) -> "LieConstraint":
        if obj is None:
            return cls.full()
        kind = obj.get("kind", "full")
        if kind == "full":
            return cls.full()
        if kind == "hom":
            return cls.hom_block(int(obj["r1"]), int(obj["r2"]))
        if kind == "parabolic":
            return cls.parabolic(obj["filtration"])
        if kind == "pairing":
            if "J" in obj:
                return cls.pairing(obj["J"], bool(obj.get("alternating", True)))
            return cls.hyperbolic(int(obj["half"]), bool(obj.get("alternating", True)))
        raise ValueError(f"unknown constraint kind {kind!r}")

    @property
    def hash(self) -> str:
        text = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def stable_under_products(self) -> bool:
        return self.kind in ("full", "hom", "parabolic")


FULL = LieConstraint.full()


def check_compatible(D: DieudonneModule, constraint: LieConstraint) -> None:
    """Raise HypothesisError unless (D, g) is one of the supported contexts."""
    ctx = D.ctx
    r = D.r
    if constraint.kind == "hom":
        if constraint.r1 + constraint.r2 != r:
            raise HypothesisError("hom block sizes must add up to the height")
        k = constraint.r1
        for X in (D.A, D.B):
            if np.any(X[:k, k:]) or np.any(X[k:, :k]):
                raise HypothesisError("module is not block diagonal for the hom context")
    elif constraint.kind == "parabolic":
        for k in constraint.filtration:
            for X in (D.A, D.B):
                if np.any(X[k:, :k]):
                    raise HypothesisError(f"span of the first {k} coordinates is not stable")
    elif constraint.kind == "pairing":
        J = np.array(constraint.J, dtype=object)
        if J.shape != (r, r):
            raise HypothesisError("pairing matrix has the wrong size")
        sign = -1 if constraint.alternating else 1
        if np.any((J.T - sign * J) % ctx.q):
            raise HypothesisError("pairing matrix is not (anti)symmetric as declared")
        if constraint.alternating and np.any(np.diag(J) % ctx.q):
            raise HypothesisError("alternating pairing needs a zero diagonal")
        Jm = ctx.scalar_matrix(J)
        if ctx.valuation(ctx.det(Jm)) != 0:
            raise HypothesisError("pairing is not perfect")
        lhs = ctx.matmul(ctx.matmul(D.A.transpose(1, 0, 2).copy(), Jm), D.A)
        rhs = ctx.scalar_times(ctx.const(D.p), ctx.frob(Jm))
        if not np.array_equal(lhs, rhs):
            raise HypothesisError("pairing is not compatible with Frobenius: A^T J A != p sigma(J)")


# ---------------------------------------------------------------------------
# assembling the linear systems


@dataclass(frozen=True)
class EndSystem:
    D: DieudonneModule = field(repr=False)
    m: int
    N: int
    constraint: LieConstraint
    route: str
    positions: tuple[tuple[int, int], ...]
    matrix: ZpmMatrix = field(repr=False)

    @property
    def unknowns(self) -> int:
        return self.matrix.cols

    def log_size(self) -> int:
        if self.unknowns == 0:
            return 0
        return kernel_log_size(self.matrix)

    def howell(self) -> HowellForm:
        return howell(self.matrix)

    def decode(self, vec) -> np.ndarray:
        """Solution vector (power route) -> matrix over GR(p^m, N)."""
        if self.route != "power":
            raise ValueError("only power-basis solutions decode to ring matrices")
        ctx = gr_ctx(self.D.p, self.m, self.N)
        E = ctx.zeros((self.D.r, self.D.r))
        vec = np.asarray(vec, dtype=object).reshape(len(self.positions), self.N)
        for idx, (a, b) in enumerate(self.positions):
            E[a, b] = vec[idx] % ctx.q
        return E


def _default_route(D: DieudonneModule) -> str:
    return "normal" if D.is_defined_over_prime_ring() else "power"


def _int_matrix(D: DieudonneModule, X) -> np.ndarray:
    return np.array(X[..., 0], dtype=np.int64)


def _normal_system(D: DieudonneModule, N: int, cols: list[int], constraint) -> np.ndarray:
    r, q = D.r, D.ctx.q
    A = _int_matrix(D, D.A)
    B = _int_matrix(D, D.B)
    I = np.eye(r, dtype=np.int64)
    right_A, left_A = np.kron(I, A.T), np.kron(A, I)
    right_B, left_B = np.kron(I, B.T), np.kron(B, I)
    rr = r * r
    blocks = [np.zeros((rr * N, rr * N), dtype=np.int64) for _ in range(2)]
    for j in range(N):
        rows = slice(j * rr, (j + 1) * rr)
        prev, nxt = (j - 1) % N, (j + 1) % N
        blocks[0][rows, j * rr:(j + 1) * rr] += right_A
        blocks[0][rows, prev * rr:(prev + 1) * rr] -= left_A
        blocks[1][rows, j * rr:(j + 1) * rr] += right_B
        blocks[1][rows, nxt * rr:(nxt + 1) * rr] -= left_B
    if constraint.kind == "pairing":
        J = np.array(constraint.J, dtype=np.int64)
        P = np.zeros((rr, rr), dtype=np.int64)
        for a in range(r):
            for b in range(r):
                U = np.zeros((r, r), dtype=np.int64)
                U[a, b] = 1
                P[:, a * r + b] = (U.T @ J + J @ U).ravel()
        blocks.append(np.kron(np.eye(N, dtype=np.int64), P))
    full = np.concatenate(blocks, axis=0) % q
    col_idx = [j * rr + c for j in range(N) for c in cols]
    return full[:, col_idx]


def _power_system(D: DieudonneModule, m: int, N: int, cols: list[int], constraint) -> np.ndarray:
    r = D.r
    ctx = gr_ctx(D.p, m, N)
    src = gr_ctx(D.p, m, D.e)
    A = embed_array(src, ctx, D.A)
    B = embed_array(src, ctx, D.B)
    MA, MB = ctx.mult_matrix(A), ctx.mult_matrix(B)
    S, Sinv = ctx.sigma, ctx.sigma_inv
    big = np.zeros((2, r, r, N, r, r, N), dtype=object)
    for a in range(r):
        for b in range(r):
            for l in range(r):
                # (E A)_{ab} gets A_{lb} E_{al}; (A sigma E)_{ab} gets A_{al} sigma(E_{lb})
                big[0, a, b, :, a, l, :] += MA[l, b]
                big[0, a, b, :, l, b, :] -= MA[a, l] @ S
                big[1, a, b, :, a, l, :] += MB[l, b]
                big[1, a, b, :, l, b, :] -= MB[a, l] @ Sinv
    parts = [big.reshape(2 * r * r * N, r * r * N)]
    if constraint.kind == "pairing":
        J = np.array(constraint.J, dtype=object)
        pair = np.zeros((r, r, N, r, r, N), dtype=object)
        eye = np.eye(N, dtype=object)
        for a in range(r):
            for b in range(r):
                for l in range(r):
                    # (E^T J)_{ab} = sum_l E_{la} J_{lb};  (J E)_{ab} = sum_l J_{al} E_{lb}
                    pair[a, b, :, l, a, :] += J[l, b] * eye
                    pair[a, b, :, l, b, :] += J[a, l] * eye
        parts.append(pair.reshape(r * r * N, r * r * N))
    full = np.concatenate(parts, axis=0) % ctx.q
    col_idx = [c * N + k for c in cols for k in range(N)]
    out = full[:, col_idx]
    return out.astype(np.int64) if ctx.q < (1 << 31) else out


def build_system(D: DieudonneModule, m: int, N: int, constraint: LieConstraint = FULL,
                 route: str | None = None) -> EndSystem:
    if m < 1:
        raise ValueError("level must be at least 1")
    if m > D.m_work:
        raise PrecisionError(f"level {m} exceeds working precision {D.m_work}")
    if N % D.e:
        raise ValueError(f"point field degree {N} is not a multiple of e = {D.e}")
    route = route or _default_route(D)
    Dm = D.at_precision(m)
    positions = constraint.positions(D.r)
    cols = [a * D.r + b for a, b in positions]
    if route == "normal":
        if not D.is_defined_over_prime_ring():
            raise ValueError("normal-basis route needs a module defined over Z_p")
        arr = _normal_system(Dm, N, cols, constraint)
    elif route == "power":
        arr = _power_system(Dm, m, N, cols, constraint)
    else:
        raise ValueError(f"unknown route {route!r}")
    if not cols:
        arr = np.zeros((arr.shape[0], 0), dtype=np.int64)
    return EndSystem(D, m, N, constraint, route, tuple(positions), ZpmMatrix.from_array(D.p, m, arr))


# ---------------------------------------------------------------------------
# point-count cache


class PointCountCache:
    """Append-only record file memoising end_log_size.

    One JSON object per line; appends happen under an exclusive file lock and
    a record already present is never written again.
    """

    def __init__(self, path):
        self.path = os.fspath(path)
        self.lock = FileLock(self.path + ".lock")
        self._data: dict[tuple, int] = {}
        self.hits = 0
        self.misses = 0
        self._load()

    def __getstate__(self):
        return {"path": self.path}

    def __setstate__(self, state):
        self.__init__(state["path"])

    @staticmethod
    def _key(module_hash, m, N, constraint_hash):
        return (module_hash, int(m), int(N), constraint_hash)

    @staticmethod
    def _record(key, value) -> str:
        mh, m, N, ch = key
        return json.dumps({"constraint": ch, "log_size": value, "m": m, "module": mh, "N": N},
                          sort_keys=True, separators=(",", ":"))

    def _load(self):
        if not os.path.exists(self.path):
            return
        with open(self.path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                key = self._key(rec["module"], rec["m"], rec["N"], rec["constraint"])
                self._data[key] = int(rec["log_size"])

    def get(self, module_hash, m, N, constraint_hash):
        val = self._data.get(self._key(module_hash, m, N, constraint_hash))
        if val is None:
            self.misses += 1
        else:
            self.hits += 1
        return val

    def put(self, module_hash, m, N, constraint_hash, value: int):
        key = self._key(module_hash, m, N, constraint_hash)
        if key in self._data:
            if self._data[key] != value:
                raise RuntimeError(f"cache conflict for {key}: {self._data[key]} != {value}")
            return
        with self.lock:
            # another writer may have appended the same record meanwhile
            self._data.clear()
            self._load()
            if key not in self._data:
                with open(self.path, "a") as fh:
                    fh.write(self._record(key, value) + "\n")
            self._data[key] = value

    def __len__(self):
        return len(self._data)


def end_log_size(D: DieudonneModule, m: int, N: int, constraint: LieConstraint = FULL,
                 route: str | None = None, cache: PointCountCache | None = None) -> int:
    """log_p of |End(D[p^m])^g(F_{p^N})| (exact)."""
    if cache is not None and route is None:
        hit = cache.get(D.hash, m, N, constraint.hash)
        if hit is not None:
            return hit
    value = build_system(D, m, N, constraint, route).log_size()
    if cache is not None and route is None:
        cache.put(D.hash, m, N, constraint.hash, value)
    return value


# ---------------------------------------------------------------------------
# dimensions from point counts


@dataclass(frozen=True)
class Schedule:
    """Which degrees N to try when extracting a dimension."""

    n_cap: int = 48
    deltas: tuple[int, ...] = (1, 2, 3, 4, 5, 6, 8, 10, 12)
    n0: int | None = None

    def starts(self, e: int):
        n0 = self.n0 or e
        while n0 + 3 * e <= self.n_cap:
            yield n0
            n0 *= 2


DEFAULT_SCHEDULE = Schedule()


@dataclass(frozen=True)
class GammaValue:
    level: int
    value: int
    evidence: tuple[tuple[int, int], ...]
    windows: tuple[tuple[int, int], ...]  # accepted (N0, Delta) pairs


def _components_consistent(seen: dict[int, int], rate: int) -> bool:
    """f(N) - rate*N counts rational components: it is >= 0 and grows along divisibility."""
    comp = {N: v - rate * N for N, v in seen.items()}
    if any(c < 0 for c in comp.values()):
        return False
    return all(comp[a] <= comp[b] for a in comp for b in comp if b % a == 0)


def extract_growth(count, e: int, schedule: Schedule = DEFAULT_SCHEDULE, label: str = "",
                   components: bool = True) -> tuple[int, tuple, tuple]:
    """Growth rate of count(N) over arithmetic progressions of N.

    A window (N0, Delta) passes when the three consecutive increments of
    count on N0, N0 + Delta, ..., N0 + 3 Delta agree and are divisible by
    Delta.  Two passing windows with different Delta must agree, and the
    implied component counts must be consistent over all degrees evaluated.
    With components=False (differences of point counts, whose constant part
    is only periodic in N) the last check is skipped.
    """
    seen: dict[int, int] = {}

    def f(N):
        if N not in seen:
            seen[N] = count(N)
        return seen[N]

    def evidence():
        return tuple(sorted(seen.items()))

    for n0 in schedule.starts(e):
        support: dict[int, list[int]] = {}
        for d0 in schedule.deltas:
            delta = d0 * e
            if n0 + 3 * delta > schedule.n_cap:
                break
            vals = [f(n0 + k * delta) for k in range(4)]
            diffs = {vals[k + 1] - vals[k] for k in range(3)}
            if len(diffs) != 1:
                continue
            inc = diffs.pop()
            if inc % delta:
                continue
            rate = inc // delta
            support.setdefault(rate, []).append(delta)
            # a short progression can mimic the wrong slope; keep only rates
            # confirmed by two windows and consistent with every count so far
            for cand, deltas in sorted(support.items()):
                if len(deltas) >= 2 and (not components or _components_consistent(seen, cand)):
                    return cand, evidence(), tuple((n0, dl) for dl in deltas)
    raise ExtractionError(f"point counts did not stabilise{(' for ' + label) if label else ''} "
                          f"within N <= {schedule.n_cap}", list(evidence()))


def gamma_value(D: DieudonneModule, m: int, constraint: LieConstraint = FULL,
                schedule: Schedule = DEFAULT_SCHEDULE, cache: PointCountCache | None = None,
                route: str | None = None) -> GammaValue:
    if m == 0:
        return GammaValue(0, 0, (), ())
    value, ev, windows = extract_growth(
        lambda N: end_log_size(D, m, N, constraint, route=route, cache=cache),
        D.e, schedule, label=f"level {m}")
    return GammaValue(m, value, ev, windows)


def gamma(D: DieudonneModule, m: int, constraint: LieConstraint = FULL,
          schedule: Schedule = DEFAULT_SCHEDULE, cache: PointCountCache | None = None) -> int:
    return gamma_value(D, m, constraint, schedule, cache).value


def plateau_index(gam) -> int | None:
    """min{i >= 1 : gam[i+1] == gam[i]}, or None if no plateau is visible."""
    for i in range(1, len(gam) - 1):
        if gam[i + 1] == gam[i]:
            return i
    return None


@dataclass(frozen=True)
class CentralizingSequence:
    gamma: tuple[int, ...]
    n_D: int | None
    s_D_observed: int | None
    evidence: dict = field(default_factory=dict, compare=False, repr=False)
    constraint: LieConstraint = FULL
    # relative contexts: the i-number is only known to lie in [lo, hi]
    n_bounds: tuple[int, int] | None = None
    note: str = ""

    @property
    def m_max(self) -> int:
        return len(self.gamma) - 1

    def violations(self) -> list[str]:
        """Structural properties every centralizing sequence must have."""
        g = self.gamma
        out = []
        if g[0] != 0:
            out.append("gamma(0) != 0")
        inc = [g[i + 1] - g[i] for i in range(len(g) - 1)]
        if any(x < 0 for x in inc):
            out.append(f"sequence decreases: {g}")
        if any(inc[i + 1] > inc[i] for i in range(len(inc) - 1)):
            out.append(f"increments increase: {inc}")
        if self.n_D is not None and any(g[i] != g[self.n_D] for i in range(self.n_D, len(g))):
            out.append(f"not constant from n = {self.n_D}")
        return out


def i_number(seq, c: int, d: int) -> int:
    """i-number from the plateau of the full centralizing sequence."""
    if c * d == 0:
        return 0
    gam = seq.gamma if isinstance(seq, CentralizingSequence) else tuple(seq)
    n = plateau_index(gam)
    if n is None:
        raise InconclusiveError(f"no plateau in {tuple(gam)}; raise m_max")
    return n


def gamma_sequence(D: DieudonneModule, m_max: int, constraint: LieConstraint = FULL,
                   schedule: Schedule = DEFAULT_SCHEDULE, cache: PointCountCache | None = None,
                   strict: bool = True) -> CentralizingSequence:
    if m_max > D.m_work:
        raise PrecisionError(f"m_max = {m_max} exceeds working precision {D.m_work}")
    values = [gamma_value(D, m, constraint, schedule, cache) for m in range(m_max + 1)]
    gam = tuple(v.value for v in values)
    evidence = {v.level: v.evidence for v in values}
    if constraint.kind == "full":
        try:
            n = i_number(gam, D.c, D.d)
        except InconclusiveError:
            n = None
        seq = CentralizingSequence(gam, n, gam[n] if n is not None else None, evidence, constraint,
                                   (n, n) if n is not None else None)
    else:
        seq = _relative_sequence(D, gam, evidence, constraint)
    if strict and seq.violations():
        raise AssertionError("; ".join(seq.violations()))
    return seq


def plateau_rule_applies(D: DieudonneModule, constraint: LieConstraint) -> tuple[bool, str]:
    if constraint.stable_under_products():
        return True, "g is stable under products"
    if constraint.kind == "pairing":
        if D.p > 2:
            reason = "p > 2: Cayley transform"
            if 2 * D.r < D.p:
                reason += "; 2r < p"
            return True, reason
        return False, "pairing at p = 2: only n^G <= n_D + 1 is available"
    return False, "unsupported constraint"


def _relative_sequence(D, gam, evidence, constraint) -> CentralizingSequence:
    ok, reason = plateau_rule_applies(D, constraint)
    if not ok:
        return CentralizingSequence(gam, None, None, evidence, constraint, None, reason)
    if all(x == 0 for x in gam):
        # constant zero sequence: n^G is 0 or 1, and gamma alone cannot tell which
        bounds = (0, 1) if len(gam) >= 3 else None
        return CentralizingSequence(gam, None, 0 if bounds else None, evidence, constraint, bounds, reason)
    n = plateau_index(gam)
    if n is None:
        return CentralizingSequence(gam, None, None, evidence, constraint, None, reason + "; no plateau")
    return CentralizingSequence(gam, n, gam[n], evidence, constraint, (n, n), reason)


def relative_suite(D: DieudonneModule, constraint: LieConstraint, m_max: int,
                   schedule: Schedule = DEFAULT_SCHEDULE, cache: PointCountCache | None = None,
                   strict: bool = False) -> CentralizingSequence:
    if constraint.kind == "full":
        raise ValueError("relative_suite needs a proper constraint")
    check_compatible(D, constraint)
    return gamma_sequence(D, m_max, constraint, schedule, cache, strict=strict)


def relative_i_number(seq: CentralizingSequence) -> int:
    if seq.n_bounds is None:
        raise HypothesisError(seq.note or "i-number not determined")
    lo, hi = seq.n_bounds
    if lo != hi:
        raise InconclusiveError(f"i-number only known to lie in [{lo}, {hi}]")
    return lo


# ---------------------------------------------------------------------------
# restriction images


def kernel_generators(system: EndSystem) -> tuple[HowellForm, np.ndarray]:
    H = system.howell()
    gens = np.array([v for v, _ in H.kernel_basis], dtype=object).reshape(-1, system.unknowns)
    return H, gens


def restriction_image_log_size(D: DieudonneModule, l: int, i: int, N: int,
                               constraint: LieConstraint = FULL, route: str | None = None) -> int:
    """log_p of the image of End(D[p^l]) -> End(D[p^i]) on F_{p^N}-points."""
    if not l > i >= 1:
        raise ValueError("need l > i >= 1")
    system = build_system(D, l, N, constraint, route)
    if system.unknowns == 0:
        return 0
    _, gens = kernel_generators(system)
    if gens.shape[0] == 0:
        return 0
    qi = D.p ** i
    reduced = (gens % qi).astype(np.int64) if qi < (1 << 31) else gens % qi
    return rowspan_log_size(reduced, D.p, i)


def restriction_growth(D: DieudonneModule, l: int, i: int, constraint: LieConstraint = FULL,
                       schedule: Schedule = DEFAULT_SCHEDULE) -> GammaValue:
    """Dimension of the restriction image, extracted from image sizes directly."""
    value, ev, windows = extract_growth(
        lambda N: restriction_image_log_size(D, l, i, N, constraint), D.e, schedule,
        label=f"image {l}->{i}", components=False)
    return GammaValue(l, value, ev, windows)


# ---------------------------------------------------------------------------
# explicit solutions


def solution_samples(D: DieudonneModule, m: int, N: int, count: int, seed: int = 0,
                     constraint: LieConstraint = FULL) -> list[np.ndarray]:
    """Uniform random endomorphisms of D[p^m] over F_{p^N} as matrices over GR(p^m, N)."""
    system = build_system(D, m, N, constraint, route="power")
    if system.unknowns == 0:
        return [gr_ctx(D.p, m, N).zeros((D.r, D.r)) for _ in range(count)]
    H = system.howell()
    return [system.decode(kernel_sample(H, seed * 100003 + k)) for k in range(count)]


def is_endomorphism(D: DieudonneModule, m: int, E, ctx: GaloisRingCtx | None = None) -> bool:
    """E A == A sigma(E) and E B == B sigma^{-1}(E) mod p^m."""
    N = E.shape[-1]
    ctx = ctx or gr_ctx(D.p, m, N)
    src = gr_ctx(D.p, m, D.e)
    Dm = D.at_precision(m)
    A = embed_array(src, ctx, Dm.A)
    B = embed_array(src, ctx, Dm.B)
    E = as_matrix(ctx, E)
    ok1 = np.array_equal(ctx.matmul(E, A), ctx.matmul(A, ctx.frob(E)))
    ok2 = np.array_equal(ctx.matmul(E, B), ctx.matmul(B, ctx.frob_inv(E)))
    return ok1 and ok2
