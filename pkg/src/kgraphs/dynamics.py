"""Window-scale dynamics of the Z^k shift on the two-sided path space.

A Window is the restriction of a two-sided path to the symmetric box
[-Ne, Ne], stored as a single morphism of degree 2Ne whose degree-Ne
prefix is the past block.  Every operation that would read outside the
box fails loudly rather than pad: a window never fabricates path data.
Shifting therefore shrinks the radius by the max coordinate of the shift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

from . import degrees as dv
from .core import (
    Morphism,
    Skeleton,
    Vertex,
    compose,
    count_morphisms,
    enumerate_morphisms,
    factorize,
    sample_morphism,
    subblock,
)
from .degrees import Degree
from .errors import (
    BoundExceeded,
    DegreeMismatch,
    GraphMismatch,
    NotBracketable,
    NotPrimitive,
    OutOfBox,
    RadiusExhausted,
    RadiusMismatch,
)
from .measure import CylinderSet
from .spectral import PerronData, classify_connectivity, vertex_matrix


@dataclass(frozen=True)
class MetricParams:
    r: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 < self.r < 1.0:
            raise ValueError(f"metric parameter r must lie in (0, 1), got {self.r}")


@dataclass(frozen=True, eq=False)
class Window:
    """x(-Ne, Ne): a two-sided path truncated to the box of radius N."""

    N: int
    body: Morphism

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash((self.N, self.body)))

    def __hash__(self) -> int:
        return self._hash  # type: ignore[attr-defined]

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Window):
            return NotImplemented
        return self.N == other.N and self.body == other.body

    @property
    def skeleton(self) -> Skeleton:
        return self.body.skeleton

    @cached_property
    def origin(self) -> Vertex:
        """x(0), the vertex at the center of the box."""
        k = self.skeleton.k
        ne = dv.scaled(self.N, k)
        return subblock(self.body, ne, ne).range

    def extract(self, m: Degree, n: Degree) -> Morphism:
        """x(m, n) for -Ne <= m <= n <= Ne."""
        k = self.skeleton.k
        ne = dv.scaled(self.N, k)
        lo, hi = dv.add(m, ne), dv.add(n, ne)
        if not (dv.is_nonneg(lo) and dv.leq(lo, hi) and dv.leq(hi, dv.scaled(2 * self.N, k))):
            raise OutOfBox(f"box [{m}, {n}] leaves the window of radius {self.N}")
        return subblock(self.body, lo, hi)

    @cached_property
    def past(self) -> Morphism:
        k = self.skeleton.k
        return self.extract(dv.scaled(-self.N, k), dv.zero(k))

    @cached_property
    def future(self) -> Morphism:
        k = self.skeleton.k
        return self.extract(dv.zero(k), dv.scaled(self.N, k))

    def record(self) -> dict:
        """Serialization: radius, the body word, and the skeleton hash."""
        return {
            "radius": self.N,
            "edges": list(self.body.word),
            "skeleton": self.skeleton.digest(),
        }


def make_window(sk: Skeleton, body: Morphism, n: int) -> Window:
    if body.skeleton != sk:
        raise GraphMismatch("body belongs to a different skeleton")
    if n < 1:
        raise DegreeMismatch(f"radius must be >= 1, got {n}")
    if body.degree != dv.scaled(2 * n, sk.k):
        raise DegreeMismatch(
            f"body degree {body.degree} is not 2Ne = {dv.scaled(2 * n, sk.k)}"
        )
    return Window(n, body)


def window_from_record(sk: Skeleton, rec: dict) -> Window:
    if rec["skeleton"] != sk.digest():
        raise GraphMismatch("record was written for a different skeleton")
    from .core import make_morphism

    body = make_morphism(sk, rec["edges"])
    return make_window(sk, body, rec["radius"])


def all_windows(sk: Skeleton, n: int, cap: int = 10**6) -> list[Window]:
    """Every radius-n window, i.e. every body in Lambda^{2ne}."""
    bodies = enumerate_morphisms(sk, dv.scaled(2 * n, sk.k), cap=cap)
    return [Window(n, b) for b in bodies]


def sample_window(sk: Skeleton, n: int, rng) -> Window:
    """Uniform over radius-n windows."""
    return Window(n, sample_morphism(sk, dv.scaled(2 * n, sk.k), rng))


def sample_window_parry(pd: PerronData, n: int, rng) -> Window:
    """Window body drawn from the Parry measure of its cylinder.

    The start vertex follows a(v)b(v); each edge e of color c leaving
    vertex v is then taken with probability b(s(e)) / (t_c b(v)).
    """
    sk = pd.skeleton
    weights = [pd.a[v] * pd.b[v] for v in sk.vertices]
    x = rng.random() * sum(weights)
    at = sk.vertices[-1]
    for v, w in zip(sk.vertices, weights):
        if x < w:
            at = v
            break
        x -= w
    start = at
    word: list[str] = []
    m = dv.scaled(2 * n, sk.k)
    while not dv.is_zero(m):
        c = next(i for i, val in enumerate(m) if val > 0)
        choices = sk.edges_with_range(at, c)
        probs = [pd.b[e.source] / (pd.t[c] * pd.b[at]) for e in choices]
        x = rng.random() * sum(probs)
        pick = choices[-1]
        for e, q in zip(choices, probs):
            if x < q:
                pick = e
                break
            x -= q
        word.append(pick.id)
        at = pick.source
        m = dv.sub(m, dv.unit(c, sk.k))
    from .core import _from_normal_word

    return Window(n, _from_normal_word(sk, word, start, at))


# ---------------------------------------------------------------------------
# Shift, metric, bracket
# ---------------------------------------------------------------------------


def shift(w: Window, n: Degree) -> Window:
    """sigma^n at window scale; the radius shrinks to N - max|n_i|."""
    sk = w.skeleton
    n = dv.as_degree(n, sk.k)
    norm = dv.norm_max(n)
    if norm > w.N - 1:
        raise RadiusExhausted(f"shift by {n} exhausts a window of radius {w.N}")
    cache = sk._cache("shift")
    key = (w.body.word, w.body.source, w.N, n)
    hit = cache.get(key)
    if hit is not None:
        return hit
    n2 = w.N - norm
    ne2 = dv.scaled(n2, sk.k)
    body = w.extract(dv.sub(n, ne2), dv.add(n, ne2))
    out = Window(n2, body)
    cache[key] = out
    return out


def restrict(w: Window, n: int) -> Window:
    """The same window at a smaller radius."""
    if not 1 <= n <= w.N:
        raise OutOfBox(f"cannot restrict radius {w.N} to {n}")
    if n == w.N:
        return w
    ne = dv.scaled(n, w.skeleton.k)
    return Window(n, w.extract(dv.neg(ne), ne))


@dataclass(frozen=True)
class DistanceResult:
    h: float  # agreement depth; math.inf when indistinguishable at this radius
    rho: float
    indistinguishable: bool


def distance(x: Window, y: Window, params: MetricParams = MetricParams()) -> DistanceResult:
    """rho(x, y) = r^h with h the first box radius where the windows differ.

    Windows that agree on the whole box are flagged indistinguishable and
    reported with rho = 0; equality of the underlying infinite paths is
    never claimed.
    """
    if x.N != y.N:
        raise RadiusMismatch(f"radii differ: {x.N} != {y.N}")
    if x.skeleton != y.skeleton:
        raise GraphMismatch("windows live over different skeletons")
    if x.origin != y.origin:
        return DistanceResult(h=0, rho=1.0, indistinguishable=False)
    k = x.skeleton.k
    agree = 0
    for j in range(1, x.N + 1):
        je = dv.scaled(j, k)
        if x.extract(dv.neg(je), je) != y.extract(dv.neg(je), je):
            break
        agree = j
    if agree == x.N:
        return DistanceResult(h=math.inf, rho=0.0, indistinguishable=True)
    h = 1 + agree
    return DistanceResult(h=h, rho=params.r**h, indistinguishable=False)


def bracket(x: Window, y: Window) -> Window:
    """[x, y]: the window with the past of x and the future of y."""
    if x.N != y.N:
        raise RadiusMismatch(f"radii differ: {x.N} != {y.N}")
    if x.skeleton != y.skeleton:
        raise GraphMismatch("windows live over different skeletons")
    if x.origin != y.origin:
        raise NotBracketable(f"origins differ: {x.origin!r} != {y.origin!r}")
    cache = x.skeleton._cache("bracket")
    key = (x, y)
    hit = cache.get(key)
    if hit is None:
        hit = Window(x.N, compose(x.past, y.future))
        cache[key] = hit
    return hit


# ---------------------------------------------------------------------------
# Local product structure and mixing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalProduct:
    future_fiber: tuple[Morphism, ...]
    past_fiber: tuple[Morphism, ...]
    window_count: int
    check: bool


def local_product_enum(sk: Skeleton, v: Vertex, n: int, cap: int = 10**6) -> LocalProduct:
    """Depth-n halves through v and the count check |E| * |F| = #windows at v."""
    ne = dv.scaled(n, sk.k)
    total = count_morphisms(sk, dv.scaled(2 * n, sk.k))
    if total > cap:
        raise BoundExceeded(f"|Lambda^{dv.scaled(2 * n, sk.k)}| = {total} exceeds {cap}")
    halves = enumerate_morphisms(sk, ne, cap=cap)
    futures = tuple(m for m in halves if m.range == v)
    pasts = tuple(m for m in halves if m.source == v)
    nwin = 0
    for body in enumerate_morphisms(sk, dv.scaled(2 * n, sk.k), cap=cap):
        mid, _ = factorize(body, ne, ne)
        if mid.source == v:
            nwin += 1
    return LocalProduct(
        future_fiber=futures,
        past_fiber=pasts,
        window_count=nwin,
        check=len(futures) * len(pasts) == nwin,
    )


@dataclass(frozen=True)
class MixingLag:
    Q: Degree
    verified: bool
    threshold: Degree
    connectors: dict[Degree, Morphism]


def mixing_lag(
    sk: Skeleton,
    u_cyl: CylinderSet,
    v_cyl: CylinderSet,
    search_bound: Degree | None = None,
) -> MixingLag:
    """The lag Q = M + d(nu) + n - l beyond which U meets every shift of V.

    For each q in [Q, Q + 2e] a connector lam' in Lambda^{M + q - Q} from
    r(lam) to s(nu) is produced, and the composite nu * lam' * lam is
    checked to read nu and lam at the right offsets, witnessing a point of
    Z(lam, l) intersect sigma^q Z(nu, n).
    """
    if u_cyl.lam.skeleton != sk or v_cyl.lam.skeleton != sk:
        raise GraphMismatch("cylinders belong to a different skeleton")
    bound = dv.as_degree(search_bound, sk.k) if search_bound else dv.scaled(8, sk.k)
    cc = classify_connectivity(sk, bound)
    if not cc.primitive:
        raise NotPrimitive(
            "graph is not primitive within the search bound"
            + (" (inconclusive)" if cc.inconclusive else "")
        )
    assert cc.threshold is not None
    lam, ell = u_cyl.lam, u_cyl.offset
    nu, n_off = v_cyl.lam, v_cyl.offset
    q0 = dv.add(cc.threshold, dv.add(nu.degree, dv.sub(n_off, ell)))
    verified = True
    connectors: dict[Degree, Morphism] = {}
    for q in dv.box(q0, dv.add(q0, dv.scaled(2, sk.k))):
        deg = dv.add(cc.threshold, dv.sub(q, q0))
        conn = connecting_morphism(sk, nu.source, lam.range, deg)
        if conn is None:
            verified = False
            continue
        connectors[q] = conn
        composite = compose(compose(nu, conn), lam)
        at = dv.sub(dv.add(ell, q), n_off)  # lam sits here inside the composite
        ok = (
            subblock(composite, dv.zero(sk.k), nu.degree) == nu
            and subblock(composite, at, dv.add(at, lam.degree)) == lam
        )
        verified = verified and ok
    return MixingLag(Q=q0, verified=verified, threshold=cc.threshold, connectors=connectors)


def connecting_morphism(sk: Skeleton, u: Vertex, v: Vertex, m: Degree) -> Morphism | None:
    """Some morphism of degree m with range u and source v, or None.

    Count-guided construction through the exact vertex matrices; no
    enumeration of Lambda^m.
    """
    if vertex_matrix(sk, m).entry(u, v) == 0:
        return None
    word: list[str] = []
    at, rest = u, dv.as_degree(m, sk.k)
    while not dv.is_zero(rest):
        c = next(i for i, val in enumerate(rest) if val > 0)
        nxt = dv.sub(rest, dv.unit(c, sk.k))
        counts = vertex_matrix(sk, nxt)
        for e in sk.edges_with_range(at, c):
            if counts.entry(e.source, v) > 0:
                word.append(e.id)
                at = e.source
                break
        rest = nxt
    from .core import _from_normal_word

    return _from_normal_word(sk, word, u, v)
