"""Vertex matrices, connectivity classes, Perron data and AF tower blocks.

Vertex matrices are exact: entries are Python ints, so arbitrarily large
path counts never overflow.  Floating point enters only in the Perron
eigendata, which is computed by power iteration on an entrywise-positive
combination of vertex matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import degrees as dv
from .core import Morphism, Skeleton, Vertex, enumerate_morphisms, subblock
from .degrees import Degree
from .errors import DegreeMismatch, GraphMismatch, NoPositiveCombination, NotIrreducible

IntMatrix = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class VertexMatrix:
    """|Lambda^p|: exact morphism counts indexed by (range, source) vertex."""

    degree: Degree
    vertices: tuple[Vertex, ...]
    entries: IntMatrix

    def entry(self, u: Vertex, v: Vertex) -> int:
        return self.entries[self.vertices.index(u)][self.vertices.index(v)]

    def transpose(self) -> "VertexMatrix":
        n = len(self.vertices)
        t = tuple(tuple(self.entries[j][i] for j in range(n)) for i in range(n))
        return VertexMatrix(self.degree, self.vertices, t)

    def is_positive(self) -> bool:
        return all(x > 0 for row in self.entries for x in row)

    def total(self) -> int:
        return sum(sum(row) for row in self.entries)

    def column_sums(self) -> dict[Vertex, int]:
        n = len(self.vertices)
        return {
            v: sum(self.entries[i][j] for i in range(n))
            for j, v in enumerate(self.vertices)
        }


def _mat_id(n: int) -> IntMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def _mat_mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    n = len(a)
    bt = tuple(tuple(b[i][j] for i in range(n)) for j in range(n))
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def _mat_add(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def _generator_matrix(sk: Skeleton, color: int) -> IntMatrix:
    idx = {v: i for i, v in enumerate(sk.vertices)}
    n = len(sk.vertices)
    rows = [[0] * n for _ in range(n)]
    for e in sk.edges_of_color[color]:
        rows[idx[e.range]][idx[e.source]] += 1
    return tuple(tuple(r) for r in rows)


def _vm_entries(sk: Skeleton, p: Degree) -> IntMatrix:
    cache = sk._cache("vm")
    hit = cache.get(p)
    if hit is not None:
        return hit
    if dv.is_zero(p):
        out = _mat_id(len(sk.vertices))
    else:
        # peel one unit of the first nonzero color; products of generator
        # matrices in any order agree once the squares biject
        c = next(i for i, x in enumerate(p) if x > 0)
        rest = dv.sub(p, dv.unit(c, sk.k))
        out = _mat_mul(_generator_matrix(sk, c), _vm_entries(sk, rest))
    cache[p] = out
    return out


def vertex_matrix(sk: Skeleton, p: Degree) -> VertexMatrix:
    """|Lambda^p| as a product of color-generator matrices, exact."""
    p = dv.as_degree(p, sk.k)
    if not dv.is_nonneg(p):
        raise DegreeMismatch(f"degree {p} is not in N^k")
    return VertexMatrix(p, sk.vertices, _vm_entries(sk, p))


# ---------------------------------------------------------------------------
# Connectivity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConnectivityClass:
    irreducible: bool
    primitive: bool
    #: minimal bound found with |Lambda^m| > 0 for every tested m >= threshold
    threshold: Degree | None
    #: True when primitivity could not be decided within the search bound
    inconclusive: bool
    search_bound: Degree


def _is_irreducible(sk: Skeleton) -> bool:
    # every ordered pair (u, v) must be joined by a path of length >= 1
    succ: dict[Vertex, set[Vertex]] = {v: set() for v in sk.vertices}
    for e in sk.edges:
        succ[e.range].add(e.source)
    for u in sk.vertices:
        reached: set[Vertex] = set()
        frontier = list(succ[u])
        while frontier:
            w = frontier.pop()
            if w in reached:
                continue
            reached.add(w)
            frontier.extend(succ[w])
        if reached != set(sk.vertices):
            return False
    return True


def classify_connectivity(sk: Skeleton, search_bound: Degree) -> ConnectivityClass:
    """Exact irreducibility plus a bounded scan for an entrywise-positive power."""
    bound = dv.as_degree(search_bound, sk.k)
    if not dv.leq(dv.ones(sk.k), bound):
        raise DegreeMismatch(f"search bound {bound} must be >= e")
    irreducible = _is_irreducible(sk)
    positive = {
        m
        for m in dv.box(dv.zero(sk.k), bound)
        if not dv.is_zero(m) and vertex_matrix(sk, m).is_positive()
    }
    if not positive:
        return ConnectivityClass(
            irreducible=irreducible,
            primitive=False,
            threshold=None,
            inconclusive=irreducible,
            search_bound=bound,
        )
    candidates = [
        m
        for m in positive
        if all(mm in positive for mm in dv.box(m, bound) if not dv.is_zero(mm))
    ]
    threshold = min(candidates, key=lambda m: (dv.norm_max(m), dv.total(m), m))
    return ConnectivityClass(
        irreducible=irreducible,
        primitive=True,
        threshold=threshold,
        inconclusive=False,
        search_bound=bound,
    )


# ---------------------------------------------------------------------------
# Perron data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PerronData:
    """Common Perron eigendata of the vertex matrices.

    t[i] is the eigenvalue of |Lambda^{e_i}| on the positive right
    eigenvector b; a is the matching left eigenvector, scaled so that
    sum_v a(v) b(v) = 1.
    """

    skeleton: Skeleton = field(repr=False)
    t: tuple[float, ...]
    a: dict[Vertex, float]
    b: dict[Vertex, float]
    residual: float
    normalization_deviation: float
    tol: float

    def t_power(self, p: Degree) -> float:
        """t^p for p in Z^k."""
        out = 1.0
        for ti, pi in zip(self.t, p, strict=True):
            out *= ti**pi
        return out

    def require_same_graph(self, m: Morphism) -> None:
        if m.skeleton != self.skeleton:
            raise GraphMismatch("morphism belongs to a different skeleton")


def _power_iteration(a: np.ndarray, tol: float, max_iter: int = 200_000) -> tuple[np.ndarray, float]:
    v = np.ones(a.shape[0])
    for _ in range(max_iter):
        w = a @ v
        lam = float(w @ v) / float(v @ v)
        resid = float(np.abs(w - lam * v).max()) / float(np.abs(v).max())
        if resid <= tol:
            return v / np.abs(v).max(), resid
        v = w / np.abs(w).max()
    raise ArithmeticError(f"power iteration did not reach residual {tol}")


def perron_data(sk: Skeleton, tol: float = 1e-12) -> PerronData:
    """Perron vector t and eigenfunctions a, b for an irreducible graph.

    A positive integer matrix A = sum of |Lambda^p| over 0 != p <= B is
    built with B = e, escalating B by e until A is entrywise positive.
    """
    if not _is_irreducible(sk):
        raise NotIrreducible("graph is not irreducible")
    nv = len(sk.vertices)
    bound = dv.ones(sk.k)
    limit = max(nv, 1)
    while True:
        acc = None
        for p in dv.box(dv.zero(sk.k), bound):
            if dv.is_zero(p):
                continue
            m = _vm_entries(sk, p)
            acc = m if acc is None else _mat_add(acc, m)
        assert acc is not None
        if all(x > 0 for row in acc for x in row):
            break
        if max(bound) >= limit:
            raise NoPositiveCombination(
                f"no entrywise-positive sum of vertex matrices for bounds up to {bound}"
            )
        bound = dv.add(bound, dv.ones(sk.k))
    a_mat = np.array(acc, dtype=float)
    b_vec, resid_b = _power_iteration(a_mat, tol)
    a_vec, resid_a = _power_iteration(a_mat.T, tol)
    residual = max(resid_a, resid_b)
    ts: list[float] = []
    for c in range(sk.k):
        gen = np.array(_generator_matrix(sk, c), dtype=float)
        ratios_b = (gen @ b_vec) / b_vec
        ratios_a = (gen.T @ a_vec) / a_vec
        ti = float(np.mean(ratios_b))
        ts.append(ti)
        residual = max(
            residual,
            float(np.abs(ratios_b - ti).max()),
            float(np.abs(ratios_a - ti).max()),
        )
    # sum a(v) b(v) = 1 leaves one scaling free; balance the 2-norms so
    # that a = b whenever the positive combination is symmetric
    pairing = float(a_vec @ b_vec)
    na = float(np.linalg.norm(a_vec))
    nb = float(np.linalg.norm(b_vec))
    a_vec = a_vec * np.sqrt(nb / (na * pairing))
    b_vec = b_vec * np.sqrt(na / (nb * pairing))
    deviation = abs(float(a_vec @ b_vec) - 1.0)
    return PerronData(
        skeleton=sk,
        t=tuple(ts),
        a={v: float(a_vec[i]) for i, v in enumerate(sk.vertices)},
        b={v: float(b_vec[i]) for i, v in enumerate(sk.vertices)},
        residual=residual,
        normalization_deviation=deviation,
        tol=tol,
    )


# ---------------------------------------------------------------------------
# AF tower blocks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AFData:
    """Block dimensions of F_m and the multiplicity of F_m into F_{m+n}."""

    block_dims: dict[Vertex, int]
    multiplicity: VertexMatrix
    predicted_next: dict[Vertex, int]
    next_dims: dict[Vertex, int]
    consistent: bool


def af_multiplicities(sk: Skeleton, m: Degree, n: Degree) -> AFData:
    """dim of the v-block of F_m (paths of degree m into v) and the
    inclusion multiplicity |Lambda^n|, with the m+n consistency check."""
    m = dv.as_degree(m, sk.k)
    n = dv.as_degree(n, sk.k)
    if not (dv.is_nonneg(m) and dv.is_nonneg(n)) or dv.is_zero(n):
        raise DegreeMismatch("need m >= 0 and n > 0")
    dims = vertex_matrix(sk, m).column_sums()
    mult = vertex_matrix(sk, n)
    predicted = {
        v: sum(dims[w] * mult.entry(w, v) for w in sk.vertices) for v in sk.vertices
    }
    next_dims = vertex_matrix(sk, dv.add(m, n)).column_sums()
    return AFData(
        block_dims=dims,
        multiplicity=mult,
        predicted_next=predicted,
        next_dims=next_dims,
        consistent=predicted == next_dims,
    )


# ---------------------------------------------------------------------------
# Aperiodicity probe
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AperiodicWitness:
    """Per vertex, a path window violating every bounded candidate period."""

    windows: dict[Vertex, Morphism]


@dataclass(frozen=True)
class GlobalPeriod:
    """Every tested window is invariant under each of these periods."""

    periods: tuple[Degree, ...]


@dataclass(frozen=True)
class InconclusiveProbe:
    reason: str


ProbeResult = AperiodicWitness | GlobalPeriod | InconclusiveProbe

_PROBE_CAP = 50_000


def _unit_grid(w: Morphism) -> dict[tuple[Degree, int], str]:
    """Edge id of every unit sub-block; a morphism is determined by this grid."""
    sk = w.skeleton
    grid: dict[tuple[Degree, int], str] = {}
    for c in dv.box(dv.zero(sk.k), w.degree):
        for i in range(sk.k):
            top = dv.add(c, dv.unit(i, sk.k))
            if dv.leq(top, w.degree):
                grid[(c, i)] = subblock(w, c, top).word[0]
    return grid


def _invariance(
    grid: dict[tuple[Degree, int], str], dmax: Degree, p: Degree, offset: Degree, k: int
) -> tuple[bool, bool]:
    """(some comparison exists, all comparisons agree) for period p from offset."""
    compared = False
    for (c, i), eid in grid.items():
        if not dv.leq(offset, c):
            continue
        shifted = dv.add(c, p)
        if not dv.leq(offset, shifted):
            continue
        top = dv.add(shifted, dv.unit(i, k))
        if not (dv.is_nonneg(shifted) and dv.leq(top, dmax)):
            continue
        compared = True
        if grid[(shifted, i)] != eid:
            return True, False
    return compared, True


def aperiodicity_probe(sk: Skeleton, depth: int) -> ProbeResult:
    """Bounded semi-decision for the aperiodicity condition.

    Examines all path windows of degree (depth+1)e against candidate
    periods p with |p_i| <= depth.  A window witnesses aperiodicity at
    this depth if it violates every candidate period somewhere in its
    box.  If instead some common period leaves every window invariant,
    that period is reported.  Anything else is Inconclusive; a witness
    never proves aperiodicity beyond the examined depth, nor does it
    rule out eventual periodicity setting in past it.
    """
    if depth < 1:
        raise DegreeMismatch("depth must be >= 1")
    big = dv.scaled(depth + 1, sk.k)
    from .core import count_morphisms

    if count_morphisms(sk, big) > _PROBE_CAP:
        return InconclusiveProbe(f"|Lambda^{big}| exceeds the probe cap {_PROBE_CAP}")
    windows = enumerate_morphisms(sk, big)
    grids = {w: _unit_grid(w) for w in windows}
    candidates = sorted(
        (p for p in dv.box(dv.scaled(-depth, sk.k), dv.scaled(depth, sk.k)) if not dv.is_zero(p)),
        key=lambda p: (dv.norm_max(p), p),
    )
    global_periods = tuple(
        p
        for p in candidates
        if all(_invariance(grids[w], big, p, dv.zero(sk.k), sk.k)[1] for w in windows)
    )
    if global_periods:
        return GlobalPeriod(global_periods)
    witnesses: dict[Vertex, Morphism] = {}
    for v in sk.vertices:
        for w in windows:
            if w.range != v:
                continue
            if _is_full_witness(grids[w], big, candidates, sk.k):
                witnesses[v] = w
                break
    if len(witnesses) == len(sk.vertices):
        return AperiodicWitness(witnesses)
    return InconclusiveProbe(
        "no global period, but vertices "
        f"{sorted(set(sk.vertices) - set(witnesses))} lack a witness at this depth"
    )


def _is_full_witness(
    grid: dict[tuple[Degree, int], str], dmax: Degree, candidates, k: int
) -> bool:
    origin = dv.zero(k)
    for p in candidates:
        compared, equal = _invariance(grid, dmax, p, origin, k)
        if equal or not compared:
            return False
    return True
