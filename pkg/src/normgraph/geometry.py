"""Projective model of the norm graph.

A vertex (a, alpha) lifts to the point whose first 2^(t-1) coordinates are
the tensor (1, a) x (1, a^q) x ... x (1, a^(q^(t-2))) and whose last
coordinate is alpha.  Coordinate i < 2^(t-1) belongs to the subset S of
{0, ..., t-2} with i = sum(2^j for j in S), so index n - i belongs to the
complement of S (n = 2^(t-1) - 1).  With

    beta(u, w) = sum_{i<=n} u_i w_{n-i} - u_{n+1} w_{n+1}

two vertices are adjacent iff their lifts are beta-orthogonal.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .gf import FieldCtx
from .graph import NormGraph
from .search import Certificate

DEFAULT_SUBSET_BUDGET = 10**7


class BudgetError(RuntimeError):
    """Exhaustive enumeration larger than the allowed budget."""

    def __init__(self, count: int, budget: int, what: str):
        super().__init__(f"{what}: {count} subsets exceeds the budget of {budget}")
        self.count = count
        self.budget = budget


def ambient_index(t: int) -> int:
    """n = 2^(t-1) - 1; points live in F^(n+2)."""
    return 2 ** (t - 1) - 1


def subset_of(i: int, t: int) -> frozenset[int]:
    return frozenset(j for j in range(t - 1) if i >> j & 1)


def index_of(S: Iterable[int]) -> int:
    return sum(1 << j for j in S)


@dataclass(frozen=True)
class ProjVector:
    ctx: FieldCtx
    coords: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def normalized(self) -> ProjVector:
        """Scale so the first nonzero coordinate is 1."""
        for c in self.coords:
            if c:
                inv = self.ctx.inv(c)
                return ProjVector(self.ctx, tuple(self.ctx.mul(inv, x) for x in self.coords))
        raise ValueError("the zero vector is not a projective point")

    def scaled(self, c: int) -> ProjVector:
        return ProjVector(self.ctx, tuple(self.ctx.mul(c, x) for x in self.coords))

    def to_json(self) -> list[str]:
        return [",".join(map(str, self.ctx.coeffs(x))) for x in self.coords]


def p_infinity(ctx: FieldCtx) -> ProjVector:
    n = ambient_index(ctx.t)
    return ProjVector(ctx, (0,) * (n + 1) + (1,))


def tensor_embed(ctx: FieldCtx, a: int) -> ProjVector:
    """Point of V for a, with coordinate n+1 set to 0."""
    a = int(a)
    t = ctx.t
    conj = [ctx.frobenius_q(a, j) for j in range(t - 1)]
    coords = []
    for i in range(2 ** (t - 1)):
        x = 1
        for j in range(t - 1):
            if i >> j & 1:
                x = ctx.mul(x, conj[j])
        coords.append(x)
    coords.append(0)
    return ProjVector(ctx, tuple(coords))


def lift(ctx: FieldCtx, a: int, alpha: int) -> ProjVector:
    v = tensor_embed(ctx, a).coords
    return ProjVector(ctx, v[:-1] + (int(alpha),))


def lift_vertex(G: NormGraph, v: int) -> ProjVector:
    return lift(G.ctx, int(G.a_codes[v]), int(G.alpha_codes[v]))


def beta(u: ProjVector, w: ProjVector) -> int:
    F = u.ctx
    if len(u) != len(w):
        raise ValueError("vectors of different lengths")
    n = len(u) - 2
    acc = 0
    for i in range(n + 1):
        acc = F.add(acc, F.mul(u.coords[i], w.coords[n - i]))
    return F.sub(acc, F.mul(u.coords[n + 1], w.coords[n + 1]))


# --- linear algebra over the big field --------------------------------------------

def rref(ctx: FieldCtx, rows: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Reduced row-echelon form (leftmost pivots, pivots 1), zero rows dropped."""
    F = ctx
    M = [list(r) for r in rows]
    if not M:
        return []
    ncols = len(M[0])
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][col]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = F.inv(M[r][col])
        M[r] = [F.mul(inv, x) for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][col]:
                f = M[i][col]
                M[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(M[i], M[r])]
        r += 1
        if r == len(M):
            break
    return [tuple(row) for row in M[:r]]


def _reduce(ctx: FieldCtx, basis: Sequence[tuple[int, ...]], vec: Sequence[int]) -> list[int]:
    """Residue of vec after eliminating the pivot columns of an RREF basis."""
    F = ctx
    v = list(vec)
    for row in basis:
        col = next(i for i, x in enumerate(row) if x)
        f = v[col]
        if f:
            v = [F.sub(x, F.mul(f, y)) for x, y in zip(v, row)]
    return v


@dataclass(frozen=True)
class ProjSubspace:
    ctx: FieldCtx
    basis: tuple[tuple[int, ...], ...]
    ambient: int  # number of coordinates

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def dim(self) -> int:
        """Projective dimension."""
        return self.rank - 1

    def points(self) -> list[ProjVector]:
        return [ProjVector(self.ctx, row) for row in self.basis]


def span(points: Sequence[ProjVector]) -> ProjSubspace:
    if not points or all(pt.is_zero() for pt in points):
        raise ValueError("span needs at least one nonzero vector")
    ctx = points[0].ctx
    return ProjSubspace(ctx, tuple(rref(ctx, [pt.coords for pt in points])), len(points[0]))


def rank_of(points: Sequence[ProjVector]) -> int:
    return len(rref(points[0].ctx, [pt.coords for pt in points]))


def nullspace(ctx: FieldCtx, rows: Sequence[Sequence[int]], ncols: int) -> list[tuple[int, ...]]:
    """Basis of {w : M w = 0}, one vector per free column."""
    R = rref(ctx, rows)
    pivots = [next(i for i, x in enumerate(row) if x) for row in R]
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for fcol in free:
        w = [0] * ncols
        w[fcol] = 1
        for row, pc in zip(R, pivots):
            w[pc] = ctx.neg(row[fcol])
        out.append(tuple(w))
    return out


def perp(Pi: ProjSubspace) -> ProjSubspace:
    """{w : beta(u, w) = 0 for every u in Pi}."""
    ctx = Pi.ctx
    N = Pi.ambient
    n = N - 2
    # beta(u, w) = sum_i u_{n-i} w_i - u_{n+1} w_{n+1} as a linear form in w
    forms = []
    for u in Pi.basis:
        forms.append(tuple(u[n - i] for i in range(n + 1)) + (ctx.neg(u[n + 1]),))
    null = nullspace(ctx, forms, N)
    return ProjSubspace(ctx, tuple(rref(ctx, null)), N)


def contains(Pi: ProjSubspace, pt: ProjVector) -> bool:
    if pt.is_zero():
        raise ValueError("the zero vector is not a projective point")
    return not any(_reduce(Pi.ctx, Pi.basis, pt.coords))


def hyperplane_at_infinity(ctx: FieldCtx) -> ProjSubspace:
    """x_{n+1} = 0."""
    N = ambient_index(ctx.t) + 2
    rows = [tuple(1 if j == i else 0 for j in range(N)) for i in range(N - 1)]
    return ProjSubspace(ctx, tuple(rows), N)


def variety_points(ctx: FieldCtx, cap: int = 10**6) -> list[ProjVector]:
    """The q^(t-1) + 1 points of the curve: tensor_embed(a) for every a, then (0, ..., 0, 1, 0)."""
    if ctx.order + 1 > cap:
        raise BudgetError(ctx.order + 1, cap, "variety points")
    pts = [tensor_embed(ctx, a) for a in range(ctx.order)]
    n = ambient_index(ctx.t)
    pts.append(ProjVector(ctx, (0,) * n + (1, 0)))
    return pts


# --- checks ---------------------------------------------------------------------

def _cert(ctx: FieldCtx, claim: str, c: int | None, violations: int, witness: list[int], t0: float, extra: dict) -> Certificate:
    return Certificate(
        claim=claim, p=ctx.p, h=ctx.h, t=ctx.t, q=ctx.q, c=c, bound=0, threshold=None,
        verdict="PASS" if violations == 0 else "FAIL", observed=violations,
        witness={"left": witness, "common": []}, nodes_explored=extra.get("checked", 0),
        wall_time_ms=round((time.perf_counter() - t0) * 1000, 3), exploratory=False,
        extra={"details": extra},
    )


def check_general_position(ctx: FieldCtx, budget: int = DEFAULT_SUBSET_BUDGET) -> Certificate:
    """Every t points of the curve are linearly independent."""
    t0 = time.perf_counter()
    pts = variety_points(ctx)
    t = ctx.t
    total = math.comb(len(pts), t)
    if total > budget:
        raise BudgetError(total, budget, "general position")
    violations, witness = 0, []
    for X in itertools.combinations(range(len(pts)), t):
        if rank_of([pts[i] for i in X]) != t:
            if not violations:
                witness = list(X)
            violations += 1
    return _cert(ctx, "general_position", t, violations, witness, t0, {"checked": total, "points": len(pts)})


def check_span_property(ctx: FieldCtx, budget: int = DEFAULT_SUBSET_BUDGET) -> Certificate:
    """Whenever t+1 curve points span only a (t-1)-space, that space holds exactly q+1 curve points."""
    t0 = time.perf_counter()
    pts = variety_points(ctx)
    t, q = ctx.t, ctx.q
    total = math.comb(len(pts), t + 1)
    if total > budget:
        raise BudgetError(total, budget, "span property")
    violations, witness = 0, []
    degenerate = skipped = 0
    counts: dict[int, int] = {}
    for X in itertools.combinations(range(len(pts)), t + 1):
        Pi = span([pts[i] for i in X])
        if Pi.rank == t + 1:
            skipped += 1
            continue
        if Pi.rank != t:
            # fewer than t independent points contradicts general position
            violations += 1
            witness = witness or list(X)
            continue
        degenerate += 1
        k = sum(contains(Pi, pt) for pt in pts)
        counts[k] = counts.get(k, 0) + 1
        if k != q + 1:
            if not violations:
                witness = list(X)
            violations += 1
    extra = {
        "checked": total,
        "degenerate": degenerate,
        "skipped_full_rank": skipped,
        "point_counts": {str(k): v for k, v in sorted(counts.items())},
        "expected_count": q + 1,
    }
    return _cert(ctx, "span_property", t + 1, violations, witness, t0, extra)


def geometric_common_neighbors(G: NormGraph, X: Sequence[int]) -> list[int]:
    """Vertices outside X whose lift lies in span(lifts of X)^perp."""
    X = list(X)
    if not X:
        raise ValueError("X must be nonempty")
    ctx = G.ctx
    Pi = span([lift_vertex(G, x) for x in X])
    Q = perp(Pi)
    xs = set(X)
    return [v for v in range(G.n) if v not in xs and contains(Q, lift_vertex(G, v))]


def _pairs(n: int, samples: int | None, seed: int):
    if samples is None:
        yield from itertools.combinations_with_replacement(range(n), 2)
        return
    rng = np.random.default_rng(seed)
    for u, v in rng.integers(0, n, size=(samples, 2)).tolist():
        yield u, v


def check_identity(G: NormGraph, samples: int | None = None, seed: int = 0) -> Certificate:
    """Adjacency <=> beta(lift u, lift v) = 0, and N(a+b) = beta + u_{n+1} v_{n+1}.

    Exhaustive over unordered pairs (diagonal included: beta = 0 there is the
    discarded loop condition) unless ``samples`` is given.
    """
    t0 = time.perf_counter()
    F = G.ctx
    lifts = [lift_vertex(G, v) for v in range(G.n)]
    n = ambient_index(F.t)
    violations, witness, checked = 0, [], 0
    for u, v in _pairs(G.n, samples, seed):
        b = beta(lifts[u], lifts[v])
        if u == v:
            expected = F.norm(F.add(int(G.a_codes[u]), int(G.a_codes[u]))) == F.mul(int(G.alpha_codes[u]), int(G.alpha_codes[u]))
        else:
            expected = G.has_edge(u, v)
        nsum = F.norm(F.add(int(G.a_codes[u]), int(G.a_codes[v])))
        rhs = F.add(b, F.mul(lifts[u].coords[n + 1], lifts[v].coords[n + 1]))
        checked += 1
        if (b == 0) != expected or nsum != rhs:
            if not violations:
                witness = [u, v]
            violations += 1
    extra = {"checked": checked, "mode": "exhaustive" if samples is None else "sampled"}
    if samples is not None:
        extra.update(samples=samples, seed=seed, rng="numpy.random.default_rng(PCG64)")
    return _cert(F, "identity", 2, violations, witness, t0, extra)


def check_neighborhood_equality(G: NormGraph, size: int, trials: int = 100, seed: int = 0) -> Certificate:
    """geometric_common_neighbors(X) equals the graph's common neighbourhood on random X."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    violations, witness = 0, []
    nonempty = 0
    for i in range(trials):
        # odd trials draw X from one vertex's neighbourhood so the answer is nonempty
        pool = G.neighbors(int(rng.integers(G.n))) if i % 2 else list(range(G.n))
        X = sorted(rng.choice(pool, size=size, replace=False).tolist())
        geo = geometric_common_neighbors(G, X)
        comb = G.common_neighborhood(X)
        nonempty += bool(comb)
        if geo != comb:
            if not violations:
                witness = X
            violations += 1
    extra = {
        "checked": trials, "subset_size": size, "seed": seed,
        "rng": "numpy.random.default_rng(PCG64)", "nonempty": nonempty,
    }
    return _cert(G.ctx, "neighborhood_equality", size, violations, witness, t0, extra)
