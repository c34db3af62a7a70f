"""Exact K_{c,s} detection by common-neighbourhood search.

A graph contains K_{c,s} iff some c-subset of vertices has at least s common
neighbours.  The search walks c-subsets in increasing index order carrying the
running intersection as a bitset; since the intersection only shrinks, a
partial subset whose intersection is already below the target is pruned.
After the first vertex (or a two-vertex prefix) is fixed, all later work is
done over the compressed universe of that prefix's common neighbourhood.

For threshold queries on large graphs the search can be reduced by a group of
verified automorphisms: only subsets containing an orbit representative (and,
next, a representative of its stabiliser's orbits) need to be examined.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernel
from .graph import BitGraph, NormGraph

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**9
NAIVE_CAP = 10**7
GROUP_CAP = 50_000
# plain DFS below this many vertices even when automorphisms are available
SYMMETRY_MIN_N = 400


class SearchError(ValueError):
    pass


@dataclass(frozen=True)
class SearchSpec:
    c: int
    threshold: int | None = None
    exact: bool = False
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.c < 1:
            raise SearchError("c must be >= 1")
        if self.exact == (self.threshold is not None):
            raise SearchError("give exactly one of threshold / exact")
        if self.threshold is not None and self.threshold < 1:
            raise SearchError("threshold must be >= 1")
        if self.budget < 1:
            raise SearchError("budget must be positive")


@dataclass
class SearchResult:
    """Outcome of one search.

    ``status`` is "found" (threshold reached, or exact maximum determined),
    "none" (threshold provably unreachable) or "indeterminate" (budget hit).
    ``value`` is the witness's common-neighbourhood size; in threshold mode
    with status "none" it is the largest value the search computed, a lower
    bound on the true maximum.
    """

    status: str
    value: int
    left: tuple[int, ...] = ()
    common: tuple[int, ...] = ()
    nodes: int = 0
    reduction: dict = field(default_factory=dict)


# --- naive ground truth ---------------------------------------------------------

def naive_oracle(G: BitGraph, c: int, cap: int = NAIVE_CAP) -> tuple[int, tuple[int, ...]]:
    """Max common-neighbourhood size over all c-subsets by brute force.

    Returns (value, lexicographically least maximising subset).  Uses Python
    integers as bitsets, independent of the search kernel.
    """
    n = G.n
    if not 1 <= c <= n:
        raise SearchError(f"need 1 <= c <= n, got c={c}, n={n}")
    total = math.comb(n, c)
    if total > cap:
        raise SearchError(f"naive oracle refuses {total} subsets (cap {cap})")
    dense = G.dense()
    rows = [sum(1 << j for j in np.flatnonzero(dense[i]).tolist()) for i in range(n)]
    best, arg = -1, ()
    for X in itertools.combinations(range(n), c):
        acc = rows[X[0]]
        for x in X[1:]:
            acc &= rows[x]
        v = acc.bit_count()
        if v > best:
            best, arg = v, X
    return best, arg


# --- automorphism reduction -------------------------------------------------------

def group_closure(generators: Sequence[np.ndarray], cap: int = GROUP_CAP) -> np.ndarray | None:
    """All elements of the permutation group generated by ``generators``.

    Returns None when the group has more than ``cap`` elements.
    """
    if not generators:
        return None
    n = len(generators[0])
    dtype = np.int16 if n < 2**15 else np.int32
    ident = np.arange(n, dtype=dtype)
    gens = [np.asarray(g, dtype=dtype) for g in generators]
    seen = {ident.tobytes()}
    elems = [ident]
    frontier = [ident]
    while frontier:
        nxt = []
        for e in frontier:
            for g in gens:
                h = g[e]
                key = h.tobytes()
                if key not in seen:
                    seen.add(key)
                    elems.append(h)
                    nxt.append(h)
                    if len(elems) > cap:
                        return None
        frontier = nxt
    return np.stack(elems)


def _orbit_labels(n: int, generators: Sequence[np.ndarray]) -> np.ndarray:
    """Smallest vertex of each vertex's orbit, by union-find over generators."""
    parent = np.arange(n)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in generators:
        for x in range(n):
            a, b = find(x), find(int(g[x]))
            if a != b:
                parent[max(a, b)] = min(a, b)
    return np.array([find(x) for x in range(n)])


@dataclass
class Prefix:
    vertices: tuple[int, ...]
    allowed: np.ndarray  # sorted candidate vertices for the rest of the subset


def orbit_prefixes(G: BitGraph, generators: Sequence[np.ndarray], c: int, group_cap: int = GROUP_CAP) -> tuple[list[Prefix], dict]:
    """Starting prefixes that cover every c-subset up to automorphism.

    Orbits are ranked by their smallest vertex.  A subset is mapped so that
    its lowest-ranked orbit is represented by that orbit's representative r;
    all its members then lie in orbits of rank >= rank(r).  With the full
    group available, a second member is mapped to a representative of an
    orbit of the stabiliser of r.
    """
    for g in generators:
        if not G.is_automorphism(g):
            raise SearchError("supplied permutation is not an automorphism")
    elems = group_closure(generators, group_cap)
    if elems is not None:
        labels = elems.min(axis=0).astype(np.int64)
    else:
        labels = _orbit_labels(G.n, generators)
    reps = sorted(set(labels.tolist()))
    rank = {r: i for i, r in enumerate(reps)}
    vrank = np.array([rank[x] for x in labels.tolist()])
    prefixes = []
    use_pairs = elems is not None and c >= 3
    for k, r in enumerate(reps):
        allowed = np.flatnonzero(vrank >= k)
        if not use_pairs:
            prefixes.append(Prefix((r,), allowed[allowed != r]))
            continue
        stab = elems[elems[:, r] == r]
        stab_min = stab.min(axis=0)
        for r2 in allowed.tolist():
            if r2 == r or stab_min[r2] != r2:
                continue
            rest = allowed[(allowed != r) & (allowed != r2)]
            prefixes.append(Prefix((r, r2), rest))
    info = {
        "group_order": None if elems is None else int(len(elems)),
        "orbits": len(reps),
        "prefixes": len(prefixes),
    }
    return prefixes, info


# --- search drivers ---------------------------------------------------------------

def _indices(row: np.ndarray, n: int) -> np.ndarray:
    return np.flatnonzero(np.unpackbits(row.view(np.uint8), bitorder="little")[:n])


def _finish(G: BitGraph, status: str, left: Sequence[int], nodes: int, value: int, reduction=None) -> SearchResult:
    if status == "found":
        left = tuple(sorted(int(x) for x in left))
        common = tuple(G.common_neighborhood(left))
        return SearchResult(status, len(common), left, common, nodes, reduction or {})
    return SearchResult(status, value, (), (), nodes, reduction or {})


def _plain(G: BitGraph, spec: SearchSpec) -> SearchResult:
    n, c = G.n, spec.c
    bits = G.bits
    exact = spec.exact
    thr = 0 if exact else spec.threshold
    best = -1
    best_left: tuple[int, ...] = ()
    nodes = 0
    max_seen = -1
    for v1 in range(n - c + 1):
        base = _indices(bits[v1], n)
        deg = len(base)
        nodes += 1
        if nodes > spec.budget:
            return _finish(G, "indeterminate", (), nodes, max(best, max_seen))
        if c == 1:
            max_seen = max(max_seen, deg)
            if exact and deg > best:
                best, best_left = deg, (v1,)
            elif not exact and deg >= thr:
                return _finish(G, "found", (v1,), nodes, deg)
            continue
        if (exact and deg <= best) or (not exact and deg < thr):
            continue
        cand = np.arange(v1 + 1, n, dtype=np.int64)
        comp = _kernel.compress(bits, cand, base.astype(np.int64))
        status, value, wit, used, seen = _kernel.extend(
            comp, deg, c - 1, thr, exact, best, spec.budget - nodes
        )
        nodes += int(used)
        max_seen = max(max_seen, int(seen))
        if status == _kernel.OUT_OF_BUDGET:
            return _finish(G, "indeterminate", (), nodes, max(best, max_seen))
        if status == _kernel.FOUND:
            left = (v1, *cand[wit].tolist())
            if not exact:
                return _finish(G, "found", left, nodes, int(value))
            best, best_left = int(value), left
    if exact:
        return _finish(G, "found", best_left, nodes, best)
    # every c-subset has at least 0 common neighbours
    return _finish(G, "none", (), nodes, max(max_seen, 0))


def _run_prefix(bits, prefix: Prefix, c: int, thr: int, budget: int, n: int):
    base = np.flatnonzero(
        np.unpackbits(np.bitwise_and.reduce(bits[list(prefix.vertices)], axis=0).view(np.uint8), bitorder="little")[:n]
    )
    k = c - len(prefix.vertices)
    if len(base) < thr or len(prefix.allowed) < k:
        return _kernel.EXHAUSTED, None, 0, -1
    comp = _kernel.compress(bits, prefix.allowed.astype(np.int64), base.astype(np.int64))
    status, value, wit, used, seen = _kernel.extend(comp, len(base), k, thr, False, -1, budget)
    left = None
    if status == _kernel.FOUND:
        left = (*prefix.vertices, *prefix.allowed[wit].tolist())
    return status, left, int(used), int(seen)


def _reduced(G: BitGraph, spec: SearchSpec, generators, threads: int) -> SearchResult:
    c, thr = spec.c, spec.threshold
    prefixes, info = orbit_prefixes(G, generators, c)
    log.info("orbit reduction: %s", info)
    nodes = 0
    max_seen = -1
    chunk = max(1, threads)

    def run(pf):
        return _run_prefix(G.bits, pf, c, thr, spec.budget, G.n)

    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        for start in range(0, len(prefixes), chunk * 8 if pool else 1):
            batch = prefixes[start : start + (chunk * 8 if pool else 1)]
            results = pool.map(run, batch) if pool else map(run, batch)
            # merged in prefix order, so output does not depend on scheduling
            for status, left, used, seen in results:
                nodes += used + 1
                max_seen = max(max_seen, seen)
                if nodes > spec.budget or status == _kernel.OUT_OF_BUDGET:
                    return _finish(G, "indeterminate", (), nodes, max_seen, info)
                if status == _kernel.FOUND:
                    return _finish(G, "found", left, nodes, thr, info)
    finally:
        if pool:
            pool.shutdown(cancel_futures=True)
    return _finish(G, "none", (), nodes, max(max_seen, 0), info)


def max_common_nbhd(
    G: BitGraph,
    spec: SearchSpec,
    symmetry: str | Sequence[np.ndarray] | None = "auto",
    threads: int = 1,
) -> SearchResult:
    """Largest common neighbourhood of a c-subset (exact) or a c-subset reaching the threshold.

    ``symmetry`` only affects threshold mode: "auto" uses the norm graph's
    automorphisms on graphs with at least SYMMETRY_MIN_N vertices, a list of
    permutations uses those, None disables the reduction.  Exact mode always
    runs the plain ordered search so its witness is the lex-least maximiser.
    """
    if spec.c > G.n:
        raise SearchError(f"c = {spec.c} exceeds n = {G.n}")
    gens = None
    if not spec.exact and spec.c >= 2:
        if isinstance(symmetry, str):
            if symmetry != "auto":
                raise SearchError(f"unknown symmetry mode {symmetry!r}")
            if isinstance(G, NormGraph) and G.n >= SYMMETRY_MIN_N:
                gens = G.automorphism_generators()
        elif symmetry is not None:
            gens = list(symmetry)
    if gens:
        return _reduced(G, spec, gens, threads)
    res = _plain(G, spec)
    return res


def check_witness(G: BitGraph, left: Sequence[int], common: Sequence[int]) -> bool:
    """Every listed common neighbour is adjacent to every left vertex."""
    if len(set(left)) != len(left) or set(left) & set(common):
        return False
    return all(G.has_edge(x, y) for x in left for y in common)


# --- certificates -----------------------------------------------------------------

CLAIMS = ("ars_t", "main_t_plus_1", "custom")


@dataclass
class Certificate:
    claim: str
    p: int | None
    h: int | None
    t: int | None
    q: int | None
    c: int | None
    bound: int | None
    threshold: int | None
    verdict: str
    observed: int
    witness: dict
    nodes_explored: int
    wall_time_ms: float
    exploratory: bool = False
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "claim": self.claim,
            "p": self.p,
            "h": self.h,
            "t": self.t,
            "q": self.q,
            "c": self.c,
            "bound": self.bound,
            "threshold": self.threshold,
            "verdict": self.verdict,
            "observed": self.observed,
            "witness": self.witness,
            "nodes_explored": self.nodes_explored,
            "wall_time_ms": self.wall_time_ms,
            "exploratory": self.exploratory,
        }
        out.update(self.extra)
        return out


def claim_parameters(claim: str, t: int) -> tuple[int, int]:
    """(c, threshold) for a named claim; the bound is threshold - 1."""
    f = math.factorial(t - 1)
    if claim == "ars_t":
        return t, f + 1
    if claim == "main_t_plus_1":
        return t + 1, f - 1
    raise SearchError(f"no fixed parameters for claim {claim!r}")


def check_claim(
    G: NormGraph,
    claim: str,
    *,
    exploratory: bool = False,
    c: int | None = None,
    threshold: int | None = None,
    budget: int = DEFAULT_BUDGET,
    symmetry: str | Sequence[np.ndarray] | None = "auto",
    threads: int = 1,
) -> Certificate:
    """Search for a violation of a freeness claim and wrap the outcome in a certificate.

    ars_t: no t-subset with (t-1)!+1 common neighbours.
    main_t_plus_1: no (t+1)-subset with (t-1)!-1 common neighbours; protected
    only for t >= 4 and q >= (t-1)!+1.
    """
    p, h, t = G.params
    q = G.ctx.q
    flagged = exploratory
    if claim == "custom":
        if c is None or threshold is None:
            raise SearchError("custom claim needs c and threshold")
    elif claim in ("ars_t", "main_t_plus_1"):
        c, threshold = claim_parameters(claim, t)
    else:
        raise SearchError(f"unknown claim {claim!r}")
    if claim == "main_t_plus_1":
        if t < 4 and not exploratory:
            raise SearchError("main_t_plus_1 is only asserted for t >= 4; pass exploratory=True")
        if q < math.factorial(t - 1) + 1:
            log.warning("q = %d < (t-1)!+1 = %d: hypothesis unmet, certificate is exploratory", q, math.factorial(t - 1) + 1)
            flagged = True
    if threshold < 1:
        # every c-subset trivially has >= 0 common neighbours
        if not exploratory:
            raise SearchError(f"threshold {threshold} is vacuous")
        threshold = max(threshold, 1)
    spec = SearchSpec(c=c, threshold=threshold, budget=budget)
    t0 = time.perf_counter()
    res = max_common_nbhd(G, spec, symmetry=symmetry, threads=threads)
    ms = (time.perf_counter() - t0) * 1000
    witness = {"left": [], "common": []}
    if res.status == "found":
        if not check_witness(G, res.left, res.common) or len(res.common) < threshold:
            raise AssertionError(f"search produced an invalid witness {res.left}")
        verdict = "FAIL"
        witness = {"left": list(res.left), "common": list(res.common)}
    elif res.status == "none":
        verdict = "PASS"
    else:
        verdict = "INDETERMINATE"
    extra = {"reduction": res.reduction} if res.reduction else {}
    return Certificate(
        claim=claim, p=p, h=h, t=t, q=q, c=c, bound=threshold - 1, threshold=threshold,
        verdict=verdict, observed=res.value, witness=witness, nodes_explored=res.nodes,
        wall_time_ms=round(ms, 3), exploratory=flagged, extra=extra,
    )
