"""Bitset graphs and the norm graph construction.

Vertices of the norm graph are pairs (a, alpha) with a in F_{q^(t-1)} and
alpha in F_q^*, ordered by (a, alpha) in canonical element order.  Two distinct
vertices are adjacent iff N(a + a') = alpha * alpha'.
"""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple

import numpy as np

from .gf import FieldCtx, FieldElement, FieldError

DEFAULT_VERTEX_CAP = 20_000


class SizingError(ValueError):
    """Requested graph exceeds the vertex cap."""

    def __init__(self, n: int, cap: int):
        super().__init__(f"norm graph would have {n} vertices, above the cap of {cap}")
        self.n = n
        self.cap = cap


def n_words(n: int) -> int:
    return max(1, (n + 63) // 64)


def pack_rows(dense: np.ndarray, n: int | None = None) -> np.ndarray:
    """Pack a (rows x n) boolean matrix into (rows x W) little-endian uint64 words."""
    dense = np.asarray(dense, dtype=bool)
    rows, cols = dense.shape
    n = cols if n is None else n
    w = n_words(n)
    padded = np.zeros((rows, w * 64), dtype=bool)
    padded[:, :cols] = dense
    return np.packbits(padded, axis=1, bitorder="little").view(np.uint64).reshape(rows, w)


def unpack_rows(bits: np.ndarray, n: int) -> np.ndarray:
    bits = np.ascontiguousarray(bits, dtype=np.uint64)
    as_bytes = bits.view(np.uint8).reshape(bits.shape[0], -1)
    return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, :n].astype(bool)


def bits_to_indices(row: np.ndarray, n: int) -> list[int]:
    return np.flatnonzero(unpack_rows(row.reshape(1, -1), n)[0]).tolist()


def popcount_rows(bits: np.ndarray) -> np.ndarray:
    as_bytes = np.ascontiguousarray(bits).view(np.uint8).reshape(bits.shape[0], -1)
    return np.unpackbits(as_bytes, axis=1).sum(axis=1)


class BitGraph:
    """Simple undirected graph stored as one bitset row per vertex."""

    def __init__(self, n: int, bits: np.ndarray):
        bits = np.ascontiguousarray(bits, dtype=np.uint64)
        if bits.shape != (n, n_words(n)):
            raise ValueError(f"bit matrix shape {bits.shape} does not match n = {n}")
        self.n = n
        self.bits = bits
        self.bits.setflags(write=False)

    @classmethod
    def from_dense(cls, adj: np.ndarray) -> BitGraph:
        adj = np.asarray(adj, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError("adjacency matrix must be square")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency matrix must be symmetric")
        if adj.diagonal().any():
            raise ValueError("self-loops are not allowed")
        return cls(adj.shape[0], pack_rows(adj))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> BitGraph:
        adj = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            adj[u, v] = adj[v, u] = True
        return cls.from_dense(adj)

    def dense(self) -> np.ndarray:
        return unpack_rows(self.bits, self.n)

    def has_edge(self, u: int, v: int) -> bool:
        return bool((int(self.bits[u, v >> 6]) >> (v & 63)) & 1)

    def neighbors(self, v: int) -> list[int]:
        return bits_to_indices(self.bits[v], self.n)

    def degrees(self) -> np.ndarray:
        return popcount_rows(self.bits)

    def degree(self, v: int) -> int:
        return int(popcount_rows(self.bits[v : v + 1])[0])

    def edge_count(self) -> int:
        return int(self.degrees().sum()) // 2

    def edges(self) -> list[tuple[int, int]]:
        d = self.dense()
        us, vs = np.nonzero(np.triu(d, 1))
        return list(zip(us.tolist(), vs.tolist()))

    def common_neighborhood_bits(self, S: Iterable[int]) -> np.ndarray:
        S = list(S)
        if not S:
            raise ValueError("common neighbourhood of the empty set is undefined")
        for v in S:
            if not 0 <= v < self.n:
                raise IndexError(f"vertex {v} out of range")
        return np.bitwise_and.reduce(self.bits[S], axis=0)

    def common_neighborhood(self, S: Iterable[int]) -> list[int]:
        """Vertices adjacent to every member of S (never contains S itself)."""
        return bits_to_indices(self.common_neighborhood_bits(S), self.n)

    def is_automorphism(self, perm: np.ndarray) -> bool:
        perm = np.asarray(perm)
        if sorted(perm.tolist()) != list(range(self.n)):
            return False
        d = self.dense()
        return bool(np.array_equal(d[np.ix_(perm, perm)], d))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BitGraph) and self.n == other.n and np.array_equal(self.bits, other.bits)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n}, m={self.edge_count()})"


class Vertex(NamedTuple):
    index: int
    a: FieldElement
    alpha: FieldElement


class Stats(NamedTuple):
    n: int
    m: int
    min_degree: int
    max_degree: int
    loops_discarded: int
    density_ratio: float

    def as_dict(self) -> dict:
        return self._asdict()


def kst_upper_bound(n: int, s: int, t: int) -> float:
    """Kovari-Sos-Turan bound on ex(n, K_{t,s}) for s >= t."""
    if t < 2 or s < t:
        raise ValueError(f"need s >= t >= 2, got s={s}, t={t}")
    if n < 1:
        raise ValueError("n must be positive")
    return 0.5 * (s - 1) ** (1 / t) * n ** (2 - 1 / t) + 0.5 * (t - 1) * n


class NormGraph(BitGraph):
    """The norm graph over F_{q^(t-1)} x F_q^*, self-loops removed."""

    def __init__(self, ctx: FieldCtx, a_codes: np.ndarray, alpha_codes: np.ndarray, bits: np.ndarray, loops: int):
        super().__init__(len(a_codes), bits)
        self.ctx = ctx
        self.a_codes = a_codes
        self.alpha_codes = alpha_codes
        self.loops_discarded = loops

    @property
    def params(self) -> tuple[int, int, int]:
        return self.ctx.p, self.ctx.h, self.ctx.t

    def vertex(self, i: int) -> Vertex:
        return Vertex(i, FieldElement(self.ctx, int(self.a_codes[i])), FieldElement(self.ctx, int(self.alpha_codes[i])))

    def vertices(self) -> list[Vertex]:
        return [self.vertex(i) for i in range(self.n)]

    def index_of(self, a: int | FieldElement, alpha: int | FieldElement) -> int:
        a, alpha = int(a), int(alpha)
        rank = self._alpha_rank.get(alpha)
        if rank is None or not 0 <= a < self.ctx.order:
            raise ValueError(f"({a}, {alpha}) is not a vertex")
        return a * (self.ctx.q - 1) + rank

    @property
    def _alpha_rank(self) -> dict[int, int]:
        return {c: i for i, c in enumerate(self.ctx.subfield_nonzero)}

    def adjacent_by_definition(self, u: int, v: int) -> bool:
        """Re-derive the adjacency bit from N(a_u + a_v) = alpha_u alpha_v."""
        F = self.ctx
        if u == v:
            return False
        lhs = F.norm(F.add(int(self.a_codes[u]), int(self.a_codes[v])))
        return lhs == F.mul(int(self.alpha_codes[u]), int(self.alpha_codes[v]))

    def stats(self) -> Stats:
        deg = self.degrees()
        m = int(deg.sum()) // 2
        t = self.ctx.t
        ratio = m / (0.5 * self.n ** (2 - 1 / t))
        return Stats(self.n, m, int(deg.min()), int(deg.max()), self.loops_discarded, ratio)

    def automorphism_generators(self) -> list[np.ndarray]:
        """Vertex permutations that preserve adjacency.

        (a, alpha) -> (lam*a, mu*alpha) whenever N(lam) = mu^2, and
        (a, alpha) -> (a^p, alpha^p).  The multiplier group is generated by
        (g^(q-1), 1) and (g^2, N(g)) for a primitive g.
        """
        F = self.ctx
        codes = np.arange(F.order)
        rank = np.full(F.order, -1, dtype=np.int64)
        rank[list(F.subfield_nonzero)] = np.arange(F.q - 1)

        def as_perm(new_a: np.ndarray, new_alpha: np.ndarray) -> np.ndarray:
            return new_a[self.a_codes] * (F.q - 1) + rank[new_alpha[self.alpha_codes]]

        gens = []
        if F.order > 2:
            g = F.generator
            pairs = [(F.pow(g, F.q - 1), 1), (F.pow(g, 2), F.norm(g))]
            for lam, mu in pairs:
                gens.append(as_perm(F.mul_array(codes, lam), F.mul_array(codes, mu)))
        if F.d > 1:
            frob = F.pow_array(codes, F.p)
            gens.append(as_perm(frob, frob))
        ident = np.arange(self.n)
        return [g for g in gens if not np.array_equal(g, ident)]


def build(p: int, h: int, t: int, vertex_cap: int = DEFAULT_VERTEX_CAP) -> NormGraph:
    """Construct the norm graph for q = p^h and parameter t."""
    if t < 2:
        raise FieldError(f"t must be >= 2, got {t}")
    if h < 1:
        raise FieldError(f"h must be >= 1, got {h}")
    q = p**h
    order = q ** (t - 1)
    n = order * (q - 1)
    if n > vertex_cap:
        raise SizingError(n, vertex_cap)
    ctx = FieldCtx(p, h, t)
    alphas = np.array(ctx.subfield_nonzero, dtype=np.int64)
    a_codes = np.repeat(np.arange(order, dtype=np.int64), q - 1)
    alpha_codes = np.tile(alphas, order)
    # prod[i, j] = alphas[i] * alphas[j]
    prod = ctx.mul_array(alphas[:, None], alphas[None, :])
    alpha_rank = np.tile(np.arange(q - 1), order)

    w = n_words(n)
    bits = np.zeros((n, w), dtype=np.uint64)
    loops = 0
    all_a = np.arange(order, dtype=np.int64)
    # keep each dense block around 2e7 cells
    block = max(1, 20_000_000 // ((q - 1) * n))
    for start in range(0, order, block):
        rows_a = all_a[start : start + block]
        # norm of a + a' for this block of a against every a'
        nsum = ctx.norm_table[ctx.add_array(rows_a[:, None], all_a[None, :])]
        # expand to vertices: row (a, i), column (a', j) -> nsum[a, a'] == prod[i, j]
        lhs = np.repeat(np.repeat(nsum, q - 1, axis=0), q - 1, axis=1)
        rhs = prod[np.tile(np.arange(q - 1), len(rows_a))][:, alpha_rank]
        dense = lhs == rhs
        r0 = start * (q - 1)
        idx = np.arange(dense.shape[0])
        loops += int(dense[idx, r0 + idx].sum())
        dense[idx, r0 + idx] = False
        bits[r0 : r0 + dense.shape[0]] = pack_rows(dense, n)
    return NormGraph(ctx, a_codes, alpha_codes, bits, loops)


# --- graph6 / DIMACS ----------------------------------------------------------

class FormatError(ValueError):
    pass


GRAPH6_MAX_N = 68_719_476_735


def _graph6_n(n: int) -> bytes:
    if n < 63:
        return bytes([n + 63])
    if n < 258048:
        return bytes([126] + [((n >> s) & 63) + 63 for s in (12, 6, 0)])
    if n <= GRAPH6_MAX_N:
        return bytes([126, 126] + [((n >> s) & 63) + 63 for s in (30, 24, 18, 12, 6, 0)])
    raise FormatError(f"graph6 cannot encode n = {n}")


def to_graph6(G: BitGraph) -> bytes:
    """graph6 encoding (no header, no trailing newline)."""
    n = G.n
    head = _graph6_n(n)
    if n < 2:
        return head
    d = G.dense()
    # column-wise upper triangle: (0,1), (0,2), (1,2), (0,3), ...
    iu, ju = np.triu_indices(n, 1)
    order = np.lexsort((iu, ju))
    bitstream = d[iu[order], ju[order]]
    pad = (-len(bitstream)) % 6
    bitstream = np.concatenate([bitstream, np.zeros(pad, dtype=bool)]).reshape(-1, 6)
    values = bitstream @ (1 << np.arange(5, -1, -1))
    return head + bytes((values + 63).astype(np.uint8).tolist())


def from_graph6(data: bytes | str) -> BitGraph:
    if isinstance(data, str):
        data = data.encode()
    data = data.strip()
    if data.startswith(b">>graph6<<"):
        data = data[10:]
    if not data:
        raise FormatError("empty graph6 string")
    vals = [c - 63 for c in data]
    if any(not 0 <= v < 64 for v in vals):
        raise FormatError("graph6 byte out of range")
    if vals[0] < 63:
        n, body = vals[0], vals[1:]
    elif len(vals) > 1 and vals[1] < 63:
        if len(vals) < 4:
            raise FormatError("truncated graph6 size field")
        n = (vals[1] << 12) | (vals[2] << 6) | vals[3]
        body = vals[4:]
    else:
        if len(vals) < 8:
            raise FormatError("truncated graph6 size field")
        n = 0
        for v in vals[2:8]:
            n = (n << 6) | v
        body = vals[8:]
    need = math.ceil(n * (n - 1) // 2 / 6)
    if len(body) != need:
        raise FormatError(f"graph6 body has {len(body)} bytes, expected {need}")
    adj = np.zeros((n, n), dtype=bool)
    if n >= 2:
        stream = np.array([(v >> s) & 1 for v in body for s in range(5, -1, -1)], dtype=bool)
        iu, ju = np.triu_indices(n, 1)
        order = np.lexsort((iu, ju))
        bits = stream[: len(order)]
        adj[iu[order], ju[order]] = bits
        adj |= adj.T
    return BitGraph.from_dense(adj)


def to_dimacs(G: BitGraph, comment: str | None = None) -> bytes:
    lines = []
    if comment:
        lines.extend(f"c {line}" for line in comment.splitlines())
    edges = G.edges()
    lines.append(f"p edge {G.n} {len(edges)}")
    lines.extend(f"e {u + 1} {v + 1}" for u, v in edges)
    return ("\n".join(lines) + "\n").encode()


def from_dimacs(data: bytes | str) -> BitGraph:
    if isinstance(data, bytes):
        data = data.decode()
    n = m = None
    edges = []
    for raw in data.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        tok = line.split()
        if tok[0] == "p":
            if len(tok) != 4 or tok[1] not in ("edge", "col"):
                raise FormatError(f"bad problem line: {raw!r}")
            n, m = int(tok[2]), int(tok[3])
        elif tok[0] == "e":
            if n is None:
                raise FormatError("edge line before problem line")
            u, v = int(tok[1]) - 1, int(tok[2]) - 1
            if not (0 <= u < n and 0 <= v < n):
                raise FormatError(f"edge endpoint out of range: {raw!r}")
            edges.append((u, v))
        else:
            raise FormatError(f"unknown line: {raw!r}")
    if n is None:
        raise FormatError("missing problem line")
    G = BitGraph.from_edges(n, edges)
    if G.edge_count() != m:
        raise FormatError(f"header says {m} edges, found {G.edge_count()}")
    return G


def export(G: BitGraph, fmt: str) -> bytes:
    if fmt == "graph6":
        return to_graph6(G)
    if fmt == "dimacs":
        comment = None
        if isinstance(G, NormGraph):
            p, h, t = G.params
            comment = f"norm graph p={p} h={h} t={t}"
        return to_dimacs(G, comment)
    raise FormatError(f"unknown format {fmt!r}")


def load(data: bytes | str, fmt: str) -> BitGraph:
    if fmt == "graph6":
        return from_graph6(data)
    if fmt == "dimacs":
        return from_dimacs(data)
    raise FormatError(f"unknown format {fmt!r}")
