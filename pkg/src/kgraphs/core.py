"""Finite k-graphs presented by colored multigraphs with commuting squares.

A skeleton is a k-colored directed multigraph together with one bijective
square table per color pair (i, j), i < j.  An entry f*g = g'*f' of the
table records the two factorisations of a degree e_i + e_j morphism.  For
k >= 3 the tables must in addition resolve color triples consistently
("cube condition"); together with bijectivity this makes the path category
a k-graph, i.e. gives unique degree-split factorisations on all degrees.

Morphisms are kept in color-normal form: all color-0 edges first, then
color-1, and so on, composable left to right with the range on the left.
Composition and factorisation rewrite words through the square tables.

Convention: a morphism runs from its source to its range; an edge with
``range=v, source=u`` is the step u -> v of a walk.  For 1-graphs this is
the usual path category of the underlying directed graph with the roles of
range and source switched relative to graph arrows.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping, Sequence

from . import degrees as dv
from .degrees import Degree
from .errors import (
    BoundExceeded,
    DegreeMismatch,
    GraphMismatch,
    MalformedSkeleton,
    NotComposable,
    RankMismatch,
    ValidationFailure,
)

#: Vertices are identified by their string id throughout.
Vertex = str

DEFAULT_ENUMERATION_CAP = 10**6


@dataclass(frozen=True)
class ColoredEdge:
    """A single edge of one color; the step ``source -> range`` of a walk."""

    id: str
    color: int
    range: Vertex
    source: Vertex


@dataclass(frozen=True)
class SquareRule:
    """One commuting square: left = (f, g), right = (g', f'), f*g = g'*f'.

    f, f' carry the lower color of ``pair`` and g, g' the higher one.
    """

    pair: tuple[int, int]
    left: tuple[str, str]
    right: tuple[str, str]


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    subjects: tuple[str, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...]

    def codes(self) -> list[str]:
        return [v.code for v in self.violations]


@dataclass(frozen=True, eq=False)
class Skeleton:
    """Immutable presentation of a finite k-graph.

    Construction performs structural checks only (ids resolve, colors in
    range); mathematical validity is the job of :func:`validate_skeleton`.
    """

    k: int
    vertices: tuple[Vertex, ...]
    edges: tuple[ColoredEdge, ...]
    squares: tuple[SquareRule, ...]

    def __post_init__(self) -> None:
        self._check_structure()
        object.__setattr__(
            self, "_hash", hash((self.k, self.vertices, self.edges, self.squares))
        )

    # -- identity ---------------------------------------------------------

    def __hash__(self) -> int:
        return self._hash  # type: ignore[attr-defined]

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Skeleton):
            return NotImplemented
        return (
            self.k == other.k
            and self.vertices == other.vertices
            and self.edges == other.edges
            and self.squares == other.squares
        )

    def digest(self) -> str:
        """Content hash of the presentation, stable under reordering."""
        h = hashlib.sha256()
        h.update(str(self.k).encode())
        for v in sorted(self.vertices):
            h.update(b"v" + v.encode())
        for e in sorted(self.edges, key=lambda e: e.id):
            h.update(f"e{e.id},{e.color},{e.range},{e.source}".encode())
        for r in sorted(self.squares, key=lambda r: (r.pair, r.left)):
            h.update(f"s{r.pair}{r.left}{r.right}".encode())
        return h.hexdigest()

    # -- structural checks --------------------------------------------------

    def _check_structure(self) -> None:
        if self.k < 1:
            raise MalformedSkeleton(f"k must be >= 1, got {self.k}")
        if not self.vertices:
            raise MalformedSkeleton("vertex list is empty")
        if len(set(self.vertices)) != len(self.vertices):
            raise MalformedSkeleton("duplicate vertex ids")
        vset = set(self.vertices)
        seen: set[str] = set()
        for e in self.edges:
            if e.id in seen:
                raise MalformedSkeleton(f"duplicate edge id {e.id!r}")
            seen.add(e.id)
            if not 0 <= e.color < self.k:
                raise MalformedSkeleton(f"edge {e.id!r} has color {e.color} outside [0, {self.k})")
            for v in (e.range, e.source):
                if v not in vset:
                    raise MalformedSkeleton(f"edge {e.id!r} references unknown vertex {v!r}")
        rule_keys: set[tuple[tuple[int, int], tuple[str, str]]] = set()
        for r in self.squares:
            i, j = r.pair
            if not (0 <= i < j < self.k):
                raise MalformedSkeleton(f"square pair {r.pair} is not an ordered color pair")
            for eid in (*r.left, *r.right):
                if eid not in seen:
                    raise MalformedSkeleton(f"square {r.pair} references unknown edge {eid!r}")
            ef, eg = (self._edge_by_id(r.left[0]), self._edge_by_id(r.left[1]))
            egp, efp = (self._edge_by_id(r.right[0]), self._edge_by_id(r.right[1]))
            if (ef.color, eg.color) != (i, j) or (egp.color, efp.color) != (j, i):
                raise MalformedSkeleton(
                    f"square {r.pair} entry {r.left}->{r.right} has edges of the wrong colors"
                )
            key = (r.pair, r.left)
            if key in rule_keys:
                raise MalformedSkeleton(f"square {r.pair} defines {r.left} twice")
            rule_keys.add(key)

    def _edge_by_id(self, eid: str) -> ColoredEdge:
        for e in self.edges:
            if e.id == eid:
                return e
        raise MalformedSkeleton(f"unknown edge id {eid!r}")

    # -- derived lookups (built once, after structural checks) --------------

    @cached_property
    def edge_map(self) -> Mapping[str, ColoredEdge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def color_of(self) -> Mapping[str, int]:
        return {e.id: e.color for e in self.edges}

    @cached_property
    def edges_of_color(self) -> tuple[tuple[ColoredEdge, ...], ...]:
        out: list[list[ColoredEdge]] = [[] for _ in range(self.k)]
        for e in self.edges:
            out[e.color].append(e)
        return tuple(tuple(es) for es in out)

    @cached_property
    def _by_range(self) -> Mapping[tuple[Vertex, int], tuple[ColoredEdge, ...]]:
        out: dict[tuple[Vertex, int], list[ColoredEdge]] = {}
        for e in self.edges:
            out.setdefault((e.range, e.color), []).append(e)
        return {key: tuple(es) for key, es in out.items()}

    @cached_property
    def _by_source(self) -> Mapping[tuple[Vertex, int], tuple[ColoredEdge, ...]]:
        out: dict[tuple[Vertex, int], list[ColoredEdge]] = {}
        for e in self.edges:
            out.setdefault((e.source, e.color), []).append(e)
        return {key: tuple(es) for key, es in out.items()}

    def edges_with_range(self, v: Vertex, color: int) -> tuple[ColoredEdge, ...]:
        return self._by_range.get((v, color), ())

    def edges_with_source(self, v: Vertex, color: int) -> tuple[ColoredEdge, ...]:
        return self._by_source.get((v, color), ())

    @cached_property
    def square_fwd(self) -> Mapping[tuple[int, int], Mapping[tuple[str, str], tuple[str, str]]]:
        """(i, j) -> {(f, g): (g', f')} with f*g = g'*f'."""
        out: dict[tuple[int, int], dict[tuple[str, str], tuple[str, str]]] = {}
        for r in self.squares:
            out.setdefault(r.pair, {})[r.left] = r.right
        return out

    @cached_property
    def square_inv(self) -> Mapping[tuple[int, int], Mapping[tuple[str, str], tuple[str, str]]]:
        """(i, j) -> {(g', f'): (f, g)}, the inverse direction."""
        out: dict[tuple[int, int], dict[tuple[str, str], tuple[str, str]]] = {}
        for r in self.squares:
            out.setdefault(r.pair, {})[r.right] = r.left
        return out

    @cached_property
    def _memo(self) -> dict[str, dict]:
        return {}

    def _cache(self, name: str) -> dict:
        return self._memo.setdefault(name, {})


# ---------------------------------------------------------------------------
# Word rewriting through the square tables
# ---------------------------------------------------------------------------


def _swap_desc(sk: Skeleton, hi: str, lo: str) -> tuple[str, str]:
    """Rewrite the adjacent pair hi*lo (descending colors) as lo'*hi'."""
    ci, cj = sk.color_of[lo], sk.color_of[hi]
    try:
        return sk.square_inv[(ci, cj)][(hi, lo)]
    except KeyError:
        raise ValidationFailure(
            f"square table ({ci},{cj}) has no entry for pair ({hi!r}, {lo!r})"
        ) from None


def _swap_asc(sk: Skeleton, lo: str, hi: str) -> tuple[str, str]:
    """Rewrite the adjacent pair lo*hi (ascending colors) as hi'*lo'."""
    ci, cj = sk.color_of[lo], sk.color_of[hi]
    try:
        return sk.square_fwd[(ci, cj)][(lo, hi)]
    except KeyError:
        raise ValidationFailure(
            f"square table ({ci},{cj}) has no entry for pair ({lo!r}, {hi!r})"
        ) from None


def _normalize_word(sk: Skeleton, word: Sequence[str]) -> list[str]:
    """Sort an edge word into color-normal form by square swaps (stable insertion)."""
    colors = sk.color_of
    out: list[str] = []
    for eid in word:
        out.append(eid)
        i = len(out) - 1
        c = colors[eid]
        while i > 0 and colors[out[i - 1]] > c:
            lo, hi = _swap_desc(sk, out[i - 1], out[i])
            out[i - 1], out[i] = lo, hi
            i -= 1
    return out


# ---------------------------------------------------------------------------
# Morphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Morphism:
    """A path of the k-graph in color-normal form.

    ``blocks[i]`` holds the color-i edge ids in composition order; the word
    reads from the range end.  Degree-0 morphisms are vertex identities.
    """

    skeleton: Skeleton = field(repr=False)
    degree: Degree
    blocks: tuple[tuple[str, ...], ...]
    range: Vertex
    source: Vertex

    def __post_init__(self) -> None:
        word = tuple(eid for block in self.blocks for eid in block)
        object.__setattr__(self, "word", word)
        object.__setattr__(
            self, "_hash", hash((self.degree, word, self.range, self.source))
        )

    def __hash__(self) -> int:
        return self._hash  # type: ignore[attr-defined]

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Morphism):
            return NotImplemented
        return (
            self.degree == other.degree
            and self.blocks == other.blocks
            and self.range == other.range
            and self.source == other.source
            and self.skeleton == other.skeleton
        )

    def __repr__(self) -> str:
        label = ".".join(self.word) if self.word else f"id_{self.range}"
        return f"<{label}: {self.source}->{self.range}, d={self.degree}>"

    @property
    def is_identity(self) -> bool:
        return dv.is_zero(self.degree)


def _from_normal_word(sk: Skeleton, word: Sequence[str], rng: Vertex, src: Vertex) -> Morphism:
    # trusted fast path: word already color-sorted and composable
    blocks: list[list[str]] = [[] for _ in range(sk.k)]
    for eid in word:
        blocks[sk.color_of[eid]].append(eid)
    degree = tuple(len(b) for b in blocks)
    return Morphism(sk, degree, tuple(tuple(b) for b in blocks), rng, src)


def identity(sk: Skeleton, v: Vertex) -> Morphism:
    if v not in sk.vertices:
        raise MalformedSkeleton(f"unknown vertex {v!r}")
    return Morphism(sk, dv.zero(sk.k), ((),) * sk.k, v, v)


def make_morphism(sk: Skeleton, edge_ids: Sequence[str], vertex: Vertex | None = None) -> Morphism:
    """Build a morphism from a composable edge word (normalized on the way in).

    For an empty word, ``vertex`` names the identity to return.
    """
    if not edge_ids:
        if vertex is None:
            raise DegreeMismatch("empty word needs an explicit vertex for the identity")
        return identity(sk, vertex)
    for eid in edge_ids:
        if eid not in sk.edge_map:
            raise MalformedSkeleton(f"unknown edge id {eid!r}")
    for a, b in zip(edge_ids, edge_ids[1:]):
        if sk.edge_map[a].source != sk.edge_map[b].range:
            raise NotComposable(f"edges {a!r} and {b!r} do not chain (source != range)")
    word = _normalize_word(sk, list(edge_ids))
    rng = sk.edge_map[word[0]].range
    src = sk.edge_map[word[-1]].source
    return _from_normal_word(sk, word, rng, src)


# -- counting and enumeration ------------------------------------------------


def _first_color(m: Degree) -> int:
    for i, c in enumerate(m):
        if c > 0:
            return i
    return -1


def count_from(sk: Skeleton, v: Vertex, m: Degree) -> int:
    """Number of degree-m morphisms with range v.  Exact, arbitrary precision."""
    if not dv.is_nonneg(m):
        raise DegreeMismatch(f"degree {m} is not in N^k")
    cache = sk._cache("count")
    key = (v, m)
    hit = cache.get(key)
    if hit is not None:
        return hit
    c = _first_color(m)
    if c < 0:
        cache[key] = 1
        return 1
    rest = dv.sub(m, dv.unit(c, sk.k))
    total = sum(count_from(sk, e.source, rest) for e in sk.edges_with_range(v, c))
    cache[key] = total
    return total


def count_morphisms(sk: Skeleton, n: Degree) -> int:
    """|Lambda^n|, summed over all range vertices."""
    return sum(count_from(sk, v, n) for v in sk.vertices)


def enumerate_morphisms(
    sk: Skeleton, n: Degree, cap: int = DEFAULT_ENUMERATION_CAP
) -> list[Morphism]:
    """All morphisms of degree n, in normal form, deterministic order."""
    n = dv.as_degree(n, sk.k)
    if not dv.is_nonneg(n):
        raise DegreeMismatch(f"degree {n} is not in N^k")
    total = count_morphisms(sk, n)
    if total > cap:
        raise BoundExceeded(f"|Lambda^{n}| = {total} exceeds the cap {cap}")
    out: list[Morphism] = []
    for v in sk.vertices:
        for word, src in _words_from(sk, v, n):
            out.append(_from_normal_word(sk, word, v, src))
    return out


def _words_from(sk: Skeleton, v: Vertex, m: Degree) -> Iterator[tuple[tuple[str, ...], Vertex]]:
    c = _first_color(m)
    if c < 0:
        yield (), v
        return
    rest = dv.sub(m, dv.unit(c, sk.k))
    for e in sk.edges_with_range(v, c):
        for word, src in _words_from(sk, e.source, rest):
            yield (e.id,) + word, src


def sample_morphism(sk: Skeleton, n: Degree, rng) -> Morphism:
    """Draw uniformly from Lambda^n using exact completion counts."""
    n = dv.as_degree(n, sk.k)
    weights = [count_from(sk, v, n) for v in sk.vertices]
    total = sum(weights)
    if total == 0:
        raise BoundExceeded(f"Lambda^{n} is empty")
    pick = rng.randrange(total)
    for v, w in zip(sk.vertices, weights):
        if pick < w:
            start = v
            break
        pick -= w
    word: list[str] = []
    m, at = n, start
    while not dv.is_zero(m):
        c = _first_color(m)
        rest = dv.sub(m, dv.unit(c, sk.k))
        choices = sk.edges_with_range(at, c)
        counts = [count_from(sk, e.source, rest) for e in choices]
        pick = rng.randrange(sum(counts))
        for e, w in zip(choices, counts):
            if pick < w:
                word.append(e.id)
                at = e.source
                break
            pick -= w
        m = rest
    return _from_normal_word(sk, word, start, at)


# -- composition and factorisation -------------------------------------------


def compose(mu: Morphism, nu: Morphism) -> Morphism:
    """The composite mu*nu, defined when s(mu) = r(nu)."""
    if mu.skeleton != nu.skeleton:
        raise GraphMismatch("morphisms live over different skeletons")
    if mu.source != nu.range:
        raise NotComposable(f"s({mu!r}) = {mu.source!r} != r({nu!r}) = {nu.range!r}")
    sk = mu.skeleton
    cache = sk._cache("compose")
    key = (mu.word, mu.source, nu.word, nu.source)
    hit = cache.get(key)
    if hit is not None:
        return hit
    word = _normalize_word(sk, list(mu.word) + list(nu.word))
    out = _from_normal_word(sk, word, mu.range, nu.source)
    cache[key] = out
    return out


def _peel_color(sk: Skeleton, word: list[str], c: int) -> str:
    # word is normal; bubble its first color-c edge to the front and pop it
    colors = sk.color_of
    p = 0
    while colors[word[p]] != c:
        p += 1
    for i in range(p, 0, -1):
        hi, lo = _swap_asc(sk, word[i - 1], word[i])
        word[i - 1], word[i] = hi, lo
    return word.pop(0)


def factorize(lam: Morphism, n1: Degree, n2: Degree) -> tuple[Morphism, Morphism]:
    """The unique pair (nu1, nu2) with d(nu1) = n1, d(nu2) = n2, nu1*nu2 = lam."""
    sk = lam.skeleton
    n1 = dv.as_degree(n1, sk.k)
    n2 = dv.as_degree(n2, sk.k)
    if not (dv.is_nonneg(n1) and dv.is_nonneg(n2)) or dv.add(n1, n2) != lam.degree:
        raise DegreeMismatch(f"{n1} + {n2} != d(lam) = {lam.degree}")
    cache = sk._cache("factorize")
    key = (lam.word, lam.source, n1)
    hit = cache.get(key)
    if hit is not None:
        return hit
    word = list(lam.word)
    head: list[str] = []
    for c in range(sk.k):
        for _ in range(n1[c]):
            head.append(_peel_color(sk, word, c))
    mid = lam.range if not head else sk.edge_map[head[-1]].source
    nu1 = _from_normal_word(sk, head, lam.range, mid)
    nu2 = _from_normal_word(sk, word, mid, lam.source)
    out = (nu1, nu2)
    cache[key] = out
    return out


def subblock(lam: Morphism, a: Degree, b: Degree) -> Morphism:
    """The restriction lam(a, b) for 0 <= a <= b <= d(lam)."""
    sk = lam.skeleton
    a = dv.as_degree(a, sk.k)
    b = dv.as_degree(b, sk.k)
    if not (dv.is_nonneg(a) and dv.leq(a, b) and dv.leq(b, lam.degree)):
        raise DegreeMismatch(f"box [{a}, {b}] does not sit inside [0, {lam.degree}]")
    cache = sk._cache("subblock")
    key = (lam.word, lam.source, a, b)
    hit = cache.get(key)
    if hit is not None:
        return hit
    _, tail = factorize(lam, a, dv.sub(lam.degree, a))
    mid, _ = factorize(tail, dv.sub(b, a), dv.sub(lam.degree, b))
    cache[key] = mid
    return mid


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def validate_skeleton(sk: Skeleton) -> ValidationReport:
    """Check square bijectivity, cube consistency (k >= 3) and the
    every-vertex-emits-and-receives condition, per color.

    Returns a report listing every violation; it never raises for
    mathematical defects.
    """
    violations: list[Violation] = []
    square_ok = True
    for i in range(sk.k):
        for j in range(i + 1, sk.k):
            ok = _check_square_pair(sk, i, j, violations)
            square_ok = square_ok and ok
    if sk.k >= 3 and square_ok:
        _check_cubes(sk, violations)
    _check_standing_assumption(sk, violations)
    return ValidationReport(ok=not violations, violations=tuple(violations))


def require_valid(sk: Skeleton) -> None:
    report = validate_skeleton(sk)
    if not report.ok:
        raise ValidationFailure("; ".join(v.message for v in report.violations))


def _check_square_pair(sk: Skeleton, i: int, j: int, out: list[Violation]) -> bool:
    domain = {
        (f.id, g.id)
        for f in sk.edges_of_color[i]
        for g in sk.edges_of_color[j]
        if f.source == g.range
    }
    codomain = {
        (gp.id, fp.id)
        for gp in sk.edges_of_color[j]
        for fp in sk.edges_of_color[i]
        if gp.source == fp.range
    }
    table = sk.square_fwd.get((i, j), {})
    ok = True
    for key in sorted(domain - set(table)):
        ok = False
        out.append(
            Violation(
                "square-missing",
                f"pair ({i},{j}): composable pair {key} has no square entry",
                key,
            )
        )
    for key in sorted(set(table) - domain):
        ok = False
        out.append(
            Violation(
                "square-spurious",
                f"pair ({i},{j}): entry for {key} but the pair is not composable",
                key,
            )
        )
    seen: dict[tuple[str, str], tuple[str, str]] = {}
    for key, val in table.items():
        if val in seen:
            ok = False
            out.append(
                Violation(
                    "square-not-injective",
                    f"pair ({i},{j}): {key} and {seen[val]} map to the same pair {val}",
                    key + seen[val],
                )
            )
        seen[val] = key
        if val not in codomain:
            ok = False
            out.append(
                Violation(
                    "square-bad-target",
                    f"pair ({i},{j}): {key} maps to non-composable pair {val}",
                    key + val,
                )
            )
            continue
        f, g = sk.edge_map[key[0]], sk.edge_map[key[1]]
        gp, fp = sk.edge_map[val[0]], sk.edge_map[val[1]]
        if f.range != gp.range or g.source != fp.source:
            ok = False
            out.append(
                Violation(
                    "square-endpoints",
                    f"pair ({i},{j}): {key} -> {val} does not preserve endpoints",
                    key + val,
                )
            )
    for val in sorted(codomain - set(seen)):
        ok = False
        out.append(
            Violation(
                "square-not-surjective",
                f"pair ({i},{j}): pair {val} is never a square target",
                val,
            )
        )
    return ok


def _check_cubes(sk: Skeleton, out: list[Violation]) -> None:
    # resolve each descending 3-color word both ways and compare
    for i in range(sk.k):
        for j in range(i + 1, sk.k):
            for l in range(j + 1, sk.k):
                for h in sk.edges_of_color[l]:
                    for g in sk.edges_with_range(h.source, j):
                        for f in sk.edges_with_range(g.source, i):
                            a = _resolve_cube(sk, h.id, g.id, f.id, front_first=False)
                            b = _resolve_cube(sk, h.id, g.id, f.id, front_first=True)
                            if a != b:
                                out.append(
                                    Violation(
                                        "cube-inconsistent",
                                        f"triple ({h.id},{g.id},{f.id}) resolves to "
                                        f"{a} one way and {b} the other",
                                        (h.id, g.id, f.id),
                                    )
                                )


def _resolve_cube(sk: Skeleton, h: str, g: str, f: str, front_first: bool) -> tuple[str, str, str]:
    if front_first:
        g1, h1 = _swap_desc(sk, h, g)
        f1, h2 = _swap_desc(sk, h1, f)
        f2, g2 = _swap_desc(sk, g1, f1)
        return (f2, g2, h2)
    f1, g1 = _swap_desc(sk, g, f)
    f2, h1 = _swap_desc(sk, h, f1)
    g2, h2 = _swap_desc(sk, h1, g1)
    return (f2, g2, h2)


def _check_standing_assumption(sk: Skeleton, out: list[Violation]) -> None:
    for c in range(sk.k):
        for v in sk.vertices:
            if not sk.edges_with_range(v, c):
                out.append(
                    Violation(
                        "standing-assumption-range",
                        f"vertex {v!r} receives no color-{c} edge",
                        (v, str(c)),
                    )
                )
            if not sk.edges_with_source(v, c):
                out.append(
                    Violation(
                        "standing-assumption-source",
                        f"vertex {v!r} emits no color-{c} edge",
                        (v, str(c)),
                    )
                )


# ---------------------------------------------------------------------------
# Derived graphs
# ---------------------------------------------------------------------------


def opposite_graph(sk: Skeleton) -> Skeleton:
    """The opposite k-graph: every edge reversed, square tables transported.

    Edge ids are preserved, so applying this twice returns the original
    skeleton exactly.
    """
    edges = tuple(
        ColoredEdge(e.id, e.color, range=e.source, source=e.range) for e in sk.edges
    )
    # f*g = g'*f'  in Lambda becomes  f'*g' = g*f  in the opposite graph
    squares = tuple(
        SquareRule(r.pair, left=(r.right[1], r.right[0]), right=(r.left[1], r.left[0]))
        for r in sk.squares
    )
    return Skeleton(sk.k, sk.vertices, edges, squares)


def opposite_cached(sk: Skeleton) -> Skeleton:
    """opposite_graph with instance-level memoization; the opposite of the
    opposite is the original object, not just an equal one."""
    cache = sk._cache("opposite")
    hit = cache.get("op")
    if hit is None:
        hit = opposite_graph(sk)
        cache["op"] = hit
        hit._cache("opposite")["op"] = sk
    return hit


def opposite_morphism(mu: Morphism) -> Morphism:
    """The same path seen in the opposite graph: word reversed, renormalized."""
    op = opposite_cached(mu.skeleton)
    if mu.is_identity:
        return identity(op, mu.range)
    word = _normalize_word(op, list(reversed(mu.word)))
    return _from_normal_word(op, word, mu.source, mu.range)


def _pair_vertex(u: Vertex, w: Vertex) -> Vertex:
    return f"({u},{w})"


def combine(sk1: Skeleton, sk2: Skeleton, mode: str) -> Skeleton:
    """The product (k1+k2)-graph or, for equal ranks, the diamond k-graph."""
    if mode == "product":
        return _product(sk1, sk2)
    if mode == "diamond":
        if sk1.k != sk2.k:
            raise RankMismatch(f"diamond needs equal ranks, got {sk1.k} and {sk2.k}")
        return _diamond(sk1, sk2)
    raise ValueError(f"unknown combine mode {mode!r}")


def _product(sk1: Skeleton, sk2: Skeleton) -> Skeleton:
    k = sk1.k + sk2.k
    vertices = tuple(
        _pair_vertex(u, w) for u in sk1.vertices for w in sk2.vertices
    )
    edges: list[ColoredEdge] = []
    for f in sk1.edges:
        for w in sk2.vertices:
            edges.append(
                ColoredEdge(
                    f"l({f.id},{w})", f.color, _pair_vertex(f.range, w), _pair_vertex(f.source, w)
                )
            )
    for g in sk2.edges:
        for u in sk1.vertices:
            edges.append(
                ColoredEdge(
                    f"r({u},{g.id})",
                    sk1.k + g.color,
                    _pair_vertex(u, g.range),
                    _pair_vertex(u, g.source),
                )
            )
    squares: list[SquareRule] = []
    for r in sk1.squares:
        for w in sk2.vertices:
            squares.append(
                SquareRule(
                    r.pair,
                    left=(f"l({r.left[0]},{w})", f"l({r.left[1]},{w})"),
                    right=(f"l({r.right[0]},{w})", f"l({r.right[1]},{w})"),
                )
            )
    for r in sk2.squares:
        i, j = r.pair
        for u in sk1.vertices:
            squares.append(
                SquareRule(
                    (sk1.k + i, sk1.k + j),
                    left=(f"r({u},{r.left[0]})", f"r({u},{r.left[1]})"),
                    right=(f"r({u},{r.right[0]})", f"r({u},{r.right[1]})"),
                )
            )
    # cross pairs: the canonical flip (f x r(g)) * (s(f) x g) = (r(f) x g) * (f x s(g))
    for f in sk1.edges:
        for g in sk2.edges:
            squares.append(
                SquareRule(
                    (f.color, sk1.k + g.color),
                    left=(f"l({f.id},{g.range})", f"r({f.source},{g.id})"),
                    right=(f"r({f.range},{g.id})", f"l({f.id},{g.source})"),
                )
            )
    return Skeleton(k, vertices, tuple(edges), tuple(squares))


def _diamond(sk1: Skeleton, sk2: Skeleton) -> Skeleton:
    k = sk1.k
    vertices = tuple(_pair_vertex(u, w) for u in sk1.vertices for w in sk2.vertices)
    edges: list[ColoredEdge] = []
    for c in range(k):
        for f1 in sk1.edges_of_color[c]:
            for f2 in sk2.edges_of_color[c]:
                edges.append(
                    ColoredEdge(
                        f"({f1.id},{f2.id})",
                        c,
                        _pair_vertex(f1.range, f2.range),
                        _pair_vertex(f1.source, f2.source),
                    )
                )
    squares: list[SquareRule] = []
    for i in range(k):
        for j in range(i + 1, k):
            for r1 in sk1.squares:
                if r1.pair != (i, j):
                    continue
                for r2 in sk2.squares:
                    if r2.pair != (i, j):
                        continue
                    squares.append(
                        SquareRule(
                            (i, j),
                            left=(
                                f"({r1.left[0]},{r2.left[0]})",
                                f"({r1.left[1]},{r2.left[1]})",
                            ),
                            right=(
                                f"({r1.right[0]},{r2.right[0]})",
                                f"({r1.right[1]},{r2.right[1]})",
                            ),
                        )
                    )
    return Skeleton(k, vertices, tuple(edges), tuple(squares))


def diagonal_restriction(sk: Skeleton, cap: int = DEFAULT_ENUMERATION_CAP) -> Skeleton:
    """The 1-graph whose edges are the degree-e morphisms of sk."""
    diag = enumerate_morphisms(sk, dv.ones(sk.k), cap=cap)
    edges = tuple(
        ColoredEdge(f"[{'.'.join(m.word)}]", 0, m.range, m.source) for m in diag
    )
    return Skeleton(1, sk.vertices, edges, ())
