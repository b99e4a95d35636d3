"""The invariant battery behind the CLI `suite` command.

Each check exercises one of the documented invariants on a given skeleton
and reports pass/fail with a counterexample payload.  Checks that need
Perron data skip non-irreducible graphs; the mixing check skips graphs
that are not primitive within the search bound.  Enumerations beyond the
configured caps fall back to seeded exact-uniform sampling, and the seed
is part of the report, so runs are reproducible.
"""

from __future__ import annotations

import random
import zlib
from dataclasses import dataclass

import numpy as np

from . import degrees as dv
from .core import (
    Morphism,
    Skeleton,
    compose,
    count_morphisms,
    enumerate_morphisms,
    factorize,
    identity,
    make_morphism,
    opposite_cached,
    subblock,
    validate_skeleton,
)
from .degrees import Degree
from .dynamics import (
    MetricParams,
    Window,
    all_windows,
    bracket,
    distance,
    local_product_enum,
    mixing_lag,
    restrict,
    sample_window,
    shift,
)
from .errors import KGraphError, RadiusExhausted
from .measure import (
    CylinderSet,
    DiagonalFunction,
    base_measure,
    beta_transport,
    conditional_measure,
    fiber_measure,
    haar_weight,
    parry_measure,
    trace_eval,
)
from .relations import (
    GroupoidElement,
    RelationQuery,
    asymptotic_equiv,
    restriction_map,
    semidirect_compose,
    stable_equiv,
    unstable_equiv,
    window_op,
)
from .spectral import (
    classify_connectivity,
    perron_data,
    vertex_matrix,
)


@dataclass(frozen=True)
class AnalysisConfig:
    tol: float = 1e-12
    search_bound: int = 8
    radius: int = 2
    metric_r: float = 0.5
    seed: int = 0
    enumeration_cap: int = 10**6
    #: exhaustive window sweeps switch to sampling above this many windows
    window_cap: int = 600
    sample_size: int = 48

    def bound_vec(self, k: int) -> Degree:
        return dv.scaled(self.search_bound, k)


@dataclass
class CheckResult:
    name: str
    status: str  # pass | fail | skip
    detail: str = ""

    @property
    def failed(self) -> bool:
        return self.status == "fail"


def _rng(cfg: AnalysisConfig, name: str) -> random.Random:
    return random.Random(cfg.seed * 2654435761 + zlib.crc32(name.encode()))


def _morphisms_upto(sk: Skeleton, top: Degree, cap: int = 10**5) -> list[Morphism]:
    out: list[Morphism] = []
    for d in dv.box(dv.zero(sk.k), top):
        if count_morphisms(sk, d) + len(out) > cap:
            break
        out.extend(enumerate_morphisms(sk, d))
    return out


def _suite_windows(sk: Skeleton, n: int, cfg: AnalysisConfig, name: str) -> list[Window]:
    total = count_morphisms(sk, dv.scaled(2 * n, sk.k))
    if total <= cfg.window_cap:
        return all_windows(sk, n)
    rng = _rng(cfg, name)
    # higher rank makes every window operation wider; sample fewer, and
    # dedupe so pair sweeps see distinct windows
    wanted = max(12, cfg.sample_size >> (sk.k - 1))
    drawn = [sample_window(sk, n, rng) for _ in range(wanted)]
    return list(dict.fromkeys(drawn))


# ---------------------------------------------------------------------------
# core invariants
# ---------------------------------------------------------------------------


def check_factorization_uniqueness(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "factorization-uniqueness"
    two = dv.scaled(2, sk.k)
    for d in dv.box(dv.zero(sk.k), two):
        lams = enumerate_morphisms(sk, d, cap=cfg.enumeration_cap)
        for n1 in dv.box(dv.zero(sk.k), d):
            n2 = dv.sub(d, n1)
            hits: dict[Morphism, list[tuple[Morphism, Morphism]]] = {}
            for p1 in enumerate_morphisms(sk, n1, cap=cfg.enumeration_cap):
                for p2 in enumerate_morphisms(sk, n2, cap=cfg.enumeration_cap):
                    if p1.source != p2.range:
                        continue
                    hits.setdefault(compose(p1, p2), []).append((p1, p2))
            for lam in lams:
                got = hits.get(lam, [])
                if len(got) != 1:
                    return CheckResult(
                        name, "fail", f"{lam!r} splits {len(got)} ways at {n1}+{n2}"
                    )
                pair = factorize(lam, n1, n2)
                if pair != got[0] or compose(*pair) != lam:
                    return CheckResult(name, "fail", f"factorize disagrees on {lam!r}")
    return CheckResult(name, "pass")


def check_associativity(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "associativity"
    two = dv.scaled(2, sk.k)
    checked = 0
    for d1 in dv.box(dv.zero(sk.k), two):
        for d2 in dv.box(dv.zero(sk.k), dv.sub(two, d1)):
            for d3 in dv.box(dv.zero(sk.k), dv.sub(dv.sub(two, d1), d2)):
                for m1 in enumerate_morphisms(sk, d1):
                    for m2 in enumerate_morphisms(sk, d2):
                        if m1.source != m2.range:
                            continue
                        for m3 in enumerate_morphisms(sk, d3):
                            if m2.source != m3.range:
                                continue
                            if compose(compose(m1, m2), m3) != compose(m1, compose(m2, m3)):
                                return CheckResult(
                                    name,
                                    "fail",
                                    f"({m1!r}{m2!r}){m3!r} != {m1!r}({m2!r}{m3!r})",
                                )
                            checked += 1
    return CheckResult(name, "pass", f"{checked} triples")


def _random_walk_word(sk: Skeleton, length: int, rng: random.Random) -> list[str] | None:
    v = rng.choice(sk.vertices)
    word: list[str] = []
    for _ in range(length):
        options = [e for c in range(sk.k) for e in sk.edges_with_range(v, c)]
        if not options:
            return None
        e = rng.choice(options)
        word.append(e.id)
        v = e.source
    return word


def check_normal_form_confluence(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "normal-form-confluence"
    rng = _rng(cfg, name)
    colors = sk.color_of
    for _ in range(200):
        length = rng.randint(2, 6)
        word = _random_walk_word(sk, length, rng)
        if word is None:
            continue
        reference = make_morphism(sk, word)
        # random swap order: repeatedly pick any descending adjacent pair
        trial = list(word)
        while True:
            spots = [
                i
                for i in range(len(trial) - 1)
                if colors[trial[i]] > colors[trial[i + 1]]
            ]
            if not spots:
                break
            i = rng.choice(spots)
            from .core import _swap_desc

            lo, hi = _swap_desc(sk, trial[i], trial[i + 1])
            trial[i], trial[i + 1] = lo, hi
        if tuple(trial) != reference.word:
            return CheckResult(
                name, "fail", f"word {word} normalized to {trial} vs {reference.word}"
            )
    return CheckResult(name, "pass")


def check_opposite_involution(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "opposite-involution"
    op = opposite_cached(sk)
    if opposite_cached(op) != sk:
        return CheckResult(name, "fail", "double opposite differs from the original")
    if not validate_skeleton(op).ok:
        return CheckResult(name, "fail", "opposite skeleton is not valid")
    for p in dv.box(dv.zero(sk.k), dv.scaled(2, sk.k)):
        if vertex_matrix(op, p).entries != vertex_matrix(sk, p).transpose().entries:
            return CheckResult(name, "fail", f"|Lambda_op^{p}| is not the transpose")
    return CheckResult(name, "pass")


# ---------------------------------------------------------------------------
# spectral invariants
# ---------------------------------------------------------------------------


def check_semigroup_law(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "semigroup-law"
    three = dv.scaled(3, sk.k)
    from .spectral import _mat_mul

    for p in dv.box(dv.zero(sk.k), three):
        mp = vertex_matrix(sk, p).entries
        for q in dv.box(dv.zero(sk.k), three):
            if vertex_matrix(sk, dv.add(p, q)).entries != _mat_mul(
                mp, vertex_matrix(sk, q).entries
            ):
                return CheckResult(name, "fail", f"|L^{p}+{q}| != |L^{p}||L^{q}|")
    return CheckResult(name, "pass")


def check_generator_commutation(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "generator-commutation"
    from .spectral import _generator_matrix, _mat_mul

    for i in range(sk.k):
        for j in range(i + 1, sk.k):
            a, b = _generator_matrix(sk, i), _generator_matrix(sk, j)
            if _mat_mul(a, b) != _mat_mul(b, a):
                return CheckResult(name, "fail", f"generators {i} and {j} do not commute")
    return CheckResult(name, "pass")


def _shared_perron(sk: Skeleton, cfg: AnalysisConfig):
    cache = sk._cache("suite")
    key = ("pd", cfg.tol)
    if key not in cache:
        cc = classify_connectivity(sk, cfg.bound_vec(sk.k))
        pd = perron_data(sk, cfg.tol) if cc.irreducible else None
        cache[key] = (cc, pd)
    return cache[key]


def check_eigen_equations(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "eigen-equations"
    cc, pd = _shared_perron(sk, cfg)
    if pd is None:
        return CheckResult(name, "skip", "not irreducible")
    tol = 10 * cfg.tol
    vs = sk.vertices
    for p in dv.box(dv.zero(sk.k), dv.scaled(3, sk.k)):
        m = vertex_matrix(sk, p)
        tp = pd.t_power(p)
        for v in vs:
            left = sum(pd.a[u] * m.entry(u, v) for u in vs)
            if abs(left - tp * pd.a[v]) > tol * max(1.0, tp):
                return CheckResult(name, "fail", f"left eigen fails at p={p}, v={v}")
        for u in vs:
            right = sum(m.entry(u, v) * pd.b[v] for v in vs)
            if abs(right - tp * pd.b[u]) > tol * max(1.0, tp):
                return CheckResult(name, "fail", f"right eigen fails at p={p}, u={u}")
    return CheckResult(name, "pass")


def check_perron_positivity(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "perron-positivity"
    cc, pd = _shared_perron(sk, cfg)
    if pd is None:
        return CheckResult(name, "skip", "not irreducible")
    if all(t > 0 for t in pd.t) and all(x > 0 for x in pd.a.values()) and all(
        x > 0 for x in pd.b.values()
    ):
        return CheckResult(name, "pass")
    return CheckResult(name, "fail", f"nonpositive entry in t={pd.t}")


def check_af_consistency(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "af-consistency"
    from .spectral import af_multiplicities

    two = dv.scaled(2, sk.k)
    for m in dv.box(dv.zero(sk.k), two):
        for n in dv.box(dv.zero(sk.k), two):
            if dv.is_zero(n):
                continue
            af = af_multiplicities(sk, m, n)
            if not af.consistent:
                return CheckResult(name, "fail", f"block dims break at m={m}, n={n}")
            if af.multiplicity.entries != vertex_matrix(sk, n).entries:
                return CheckResult(name, "fail", f"multiplicity != |Lambda^{n}|")
    return CheckResult(name, "pass")


# ---------------------------------------------------------------------------
# measure invariants
# ---------------------------------------------------------------------------

_TOL_MEASURE = 1e-9
_TOL_MASS = 1e-12


def check_total_mass(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "measure-total-mass"
    cc, pd = _shared_perron(sk, cfg)
    if pd is None:
        return CheckResult(name, "skip", "not irreducible")
    total = sum(
        parry_measure(pd, CylinderSet(identity(sk, v), dv.zero(sk.k))).value
        for v in sk.vertices
    )
    if abs(total - 1.0) > _TOL_MASS:
        return CheckResult(name, "fail", f"sum over vertex cylinders is {total!r}")
    return CheckResult(name, "pass")


def check_expansion(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "measure-expansion"
    cc, pd = _shared_perron(sk, cfg)
    if pd is None:
        return CheckResult(name, "skip", "not irreducible")
    lams = _morphisms_upto(sk, dv.scaled(2, sk.k), cap=4000)
    ext_bound = dv.scaled(2 if sk.k <= 2 else 1, sk.k)
    exts = {
        m: enumerate_morphisms(sk, m)
        for m in dv.box(dv.zero(sk.k), ext_bound)
        if not dv.is_zero(m)
    }
    for lam in lams:
        mu = parry_measure(pd, CylinderSet(lam, dv.zero(sk.k))).value
        for m, nus in exts.items():
            right = sum(
                parry_measure(pd, CylinderSet(compose(lam, nu), dv.zero(sk.k))).value
                for nu in nus
                if nu.range == lam.source
            )
            left = sum(
                parry_measure(pd, CylinderSet(compose(nu, lam), dv.neg(m))).value
                for nu in nus
                if nu.source == lam.range
            )
            if abs(right - mu) > _TOL_MEASURE or abs(left - mu) > _TOL_MEASURE:
                return CheckResult(
                    name, "fail", f"expansion of {lam!r} by {m} gives {right}/{left} vs {mu}"
                )
    return CheckResult(name, "pass")


def check_product_decomposition(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "measure-product-decomposition"
    cc, pd = _shared_perron(sk, cfg)
    if pd is None:
        return CheckResult(name, "skip", "not irreducible")
    halves = _morphisms_upto(sk, dv.scaled(2, sk.k), cap=2000)
    for v in sk.vertices:
        pasts = [m for m in halves if m.source == v]
        futures = [m for m in halves if m.range == v]
        box_mass = 0.0
        for lam_m in pasts:
            for lam_p in futures:
                whole = compose(lam_m, lam_p)
                mu = parry_measure(pd, CylinderSet(whole, dv.neg(lam_m.degree))).value
                split = (
                    conditional_measure(pd, "stable", lam_m).value
                    * conditional_measure(pd, "unstable", lam_p).value
                )
                if abs(mu - split) > _TOL_MEASURE:
                    return CheckResult(
                        name, "fail", f"mu != mu_s x mu_u at {lam_m!r}|{lam_p!r}"
                    )
                if lam_m.degree == lam_p.degree == dv.scaled(2, sk.k):
                    box_mass += split
        expect = parry_measure(pd, CylinderSet(identity(sk, v), dv.zero(sk.k))).value
        if pasts and futures and abs(box_mass - expect) > _TOL_MEASURE:
            return CheckResult(name, "fail", f"fiber masses at {v!r} sum to {box_mass}")
    return CheckResult(name, "pass")


def check_haar_scaling(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "measure-haar-scaling"
    cc, pd = _shared_perron(sk, cfg)
    if pd is None:
        return CheckResult(name, "skip", "not irreducible")
    lams = _morphisms_upto(sk, dv.scaled(3, sk.k), cap=800)
    if len(lams) > 240:
        lams = lams[:: len(lams) // 240 + 1]
    ext_bound = dv.scaled(2 if sk.k <= 2 else 1, sk.k)
    exts = {
        p: enumerate_morphisms(sk, p)
        for p in dv.box(dv.zero(sk.k), ext_bound)
        if not dv.is_zero(p)
    }
    for lam in lams:
        base = conditional_measure(pd, "stable", lam).value
        for p in dv.box(dv.zero(sk.k), dv.scaled(2, sk.k)):
            hw = haar_weight(pd, p, lam)
            if abs(hw.value - base) > _TOL_MEASURE:
                return CheckResult(name, "fail", f"haar weight breaks at {lam!r}, p={p}")
        for p, pool in exts.items():
            for xi in pool:
                if xi.range != lam.source:
                    continue
                shifted = conditional_measure(pd, "stable", compose(lam, xi)).value
                if abs(pd.t_power(p) * shifted - base) > _TOL_MEASURE:
                    return CheckResult(
                        name, "fail", f"t^{p} mu_s(sigma^{p}-shift) breaks at {lam!r}"
                    )
    return CheckResult(name, "pass")


def check_trace_scaling(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "measure-trace-scaling"
    cc, pd = _shared_perron(sk, cfg)
    if pd is None:
        return CheckResult(name, "skip", "not irreducible")
    rng = _rng(cfg, name)
    pool = _morphisms_upto(sk, dv.scaled(2, sk.k), cap=2000)
    for _ in range(25):
        terms = tuple(
            (rng.uniform(-2, 2), CylinderSet(rng.choice(pool), tuple(rng.randint(-2, 2) for _ in range(sk.k))))
            for _ in range(rng.randint(1, 4))
        )
        f = DiagonalFunction(terms)
        base = trace_eval(pd, f)
        for n in dv.box(dv.scaled(-2, sk.k), dv.scaled(2, sk.k)):
            lhs = trace_eval(pd, beta_transport(pd, f, n))
            rhs = pd.t_power(n) * base
            if abs(lhs - rhs) > _TOL_MEASURE * max(1.0, abs(rhs)):
                return CheckResult(name, "fail", f"trace scaling fails at n={n}")
    return CheckResult(name, "pass")


def check_disintegration(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "measure-disintegration"
    cc, pd = _shared_perron(sk, cfg)
    if pd is None:
        return CheckResult(name, "skip", "not irreducible")
    lams = _morphisms_upto(sk, dv.scaled(2, sk.k), cap=400)
    if len(lams) > 18:
        lams = lams[:: len(lams) // 18 + 1]
    offsets = [dv.zero(sk.k), dv.scaled(-1, sk.k), dv.ones(sk.k)]
    for p in (dv.zero(sk.k), dv.ones(sk.k)):
        for lam in lams:
            for off in offsets:
                cyl = CylinderSet(lam, off)
                need = dv.join(dv.sub(dv.join(cyl.top, p), p), dv.zero(sk.k))
                lo = dv.meet(off, p)
                hi = dv.join(cyl.top, p)
                cells = count_morphisms(sk, need)
                per_cell = count_morphisms(sk, dv.sub(off, lo)) * count_morphisms(
                    sk, dv.sub(hi, cyl.top)
                )
                if cells * per_cell > 4000:
                    continue
                mu = parry_measure(pd, cyl).value
                total = sum(
                    fiber_measure(pd, p, om, cyl) * base_measure(pd, p, om).value
                    for om in enumerate_morphisms(sk, need)
                )
                if abs(total - mu) > _TOL_MEASURE:
                    return CheckResult(
                        name,
                        "fail",
                        f"disintegration off by {total - mu} at {lam!r}, n={off}, p={p}",
                    )
    return CheckResult(name, "pass")


# ---------------------------------------------------------------------------
# dynamics invariants
# ---------------------------------------------------------------------------


def check_window_consistency(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "window-consistency"
    n = cfg.radius
    k = sk.k
    for w in _suite_windows(sk, n, cfg, name)[:80]:
        ne = dv.scaled(n, k)
        boxes = [(dv.neg(ne), dv.zero(k)), (dv.zero(k), ne), (dv.neg(ne), ne)]
        for lo, hi in boxes:
            outer = w.extract(lo, hi)
            for mid in dv.box(lo, hi):
                inner = subblock(outer, dv.sub(mid, lo), dv.sub(hi, lo))
                if inner != w.extract(mid, hi):
                    return CheckResult(name, "fail", f"nested extraction differs in {w!r}")
    return CheckResult(name, "pass")


def check_shift_semigroup(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "shift-semigroup"
    n = cfg.radius
    k = sk.k
    one = dv.ones(k)
    for w in _suite_windows(sk, n + 1, cfg, name):
        for a in dv.box(dv.neg(one), one):
            wa = shift(w, a)
            if dv.is_zero(a) and wa != w:
                return CheckResult(name, "fail", "shift by 0 is not the identity")
            for b in dv.box(dv.neg(one), one):
                if dv.norm_max(b) > wa.N - 1:
                    continue
                lhs = shift(wa, b)
                rhs = shift(w, dv.add(a, b))
                if restrict(rhs, lhs.N) != lhs:
                    return CheckResult(name, "fail", f"sigma^{a} then sigma^{b} differs")
    return CheckResult(name, "pass")


def check_expansiveness(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "expansiveness"
    n = cfg.radius
    params = MetricParams(cfg.metric_r)
    windows = _suite_windows(sk, n, cfg, name)
    shifts = [m for m in dv.box(dv.scaled(-(n - 1), sk.k), dv.scaled(n - 1, sk.k))]
    for i, x in enumerate(windows):
        for y in windows[i + 1 :]:
            separated = False
            for m in shifts:
                if distance(shift(x, m), shift(y, m), params).rho >= params.r:
                    separated = True
                    break
            if not separated:
                return CheckResult(name, "fail", f"{x!r} and {y!r} are never separated")
    return CheckResult(name, "pass", f"{len(windows)} windows")


def check_contraction(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "contraction-on-fibers"
    n = cfg.radius
    params = MetricParams(cfg.metric_r)
    windows = _suite_windows(sk, n, cfg, name)
    by_future: dict[Morphism, list[Window]] = {}
    by_past: dict[Morphism, list[Window]] = {}
    for w in windows:
        by_future.setdefault(w.future, []).append(w)
        by_past.setdefault(w.past, []).append(w)
    for grouping, sign in ((by_future, 1), (by_past, -1)):
        for group in grouping.values():
            for i, y in enumerate(group):
                for z in group[i + 1 :]:
                    rho0 = distance(y, z, params).rho
                    for j in range(1, n):
                        je = dv.scaled(sign * j, sk.k)
                        rho_j = distance(shift(y, je), shift(z, je), params).rho
                        if rho_j > params.r**j * rho0 + 1e-15:
                            return CheckResult(
                                name, "fail", f"contraction fails at j={j} for {y!r},{z!r}"
                            )
    return CheckResult(name, "pass")


def check_bracket_axioms(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "bracket-axioms"
    n = cfg.radius
    k = sk.k
    windows = _suite_windows(sk, n, cfg, name)
    by_origin: dict[str, list[Window]] = {}
    for w in windows:
        by_origin.setdefault(w.origin, []).append(w)
    for group in by_origin.values():
        for x in group:
            if bracket(x, x) != x:
                return CheckResult(name, "fail", f"[x,x] != x at {x!r}")
        # every identity below is a statement about the halves only, so the
        # (past, future) combinations carry the full exhaustive content
        pasts = sorted({w.past for w in group}, key=lambda m: m.word)
        futures = sorted({w.future for w in group}, key=lambda m: m.word)
        reps = {(w.past, w.future): w for w in group}
        for past in pasts:
            for fut in futures:
                z = Window(n, compose(past, fut))
                if z.past != past or z.future != fut:
                    return CheckResult(name, "fail", "bracket does not glue halves")
                reps.setdefault((past, fut), z)
        for x in group:
            for y in group:
                z = bracket(x, y)
                if z.past != x.past or z.future != y.future:
                    return CheckResult(name, "fail", f"[{x!r},{y!r}] mixes halves")
        # [[x,y],z] reads only (x.past, y.future, z.future) and [x,[y,z]]
        # only (x.past, y.past, z.future); sweep those coordinates fully
        fill_p, fill_f = pasts[0], futures[0]
        for pa in pasts:
            x = reps[(pa, fill_f)]
            for fc in futures:
                z = reps[(fill_p, fc)]
                xz = bracket(x, z)
                for fy in futures:
                    y = reps[(fill_p, fy)]
                    if bracket(bracket(x, y), z) != xz:
                        return CheckResult(name, "fail", "[[x,y],z] != [x,z]")
                for py in pasts:
                    y = reps[(py, fill_f)]
                    if bracket(x, bracket(y, z)) != xz:
                        return CheckResult(name, "fail", "[x,[y,z]] != [x,z]")
    # shift commutation, gated on agreement over the translation strip
    # (the two sides read different paths inside the strip otherwise)
    one = dv.ones(k)
    for group in by_origin.values():
        for m in dv.box(dv.neg(one), one):
            if dv.is_zero(m):
                continue
            lo, hi = dv.meet(m, dv.zero(k)), dv.join(m, dv.zero(k))
            strip = _eq_matrix(_tokens(group, lambda w: w.extract(lo, hi)))
            for i, j in zip(*np.nonzero(strip)):
                x, y = group[i], group[j]
                sx, sy = shift(x, m), shift(y, m)
                if bracket(sx, sy) != shift(bracket(x, y), m):
                    return CheckResult(
                        name, "fail", f"sigma^{m} does not commute with bracket"
                    )
    return CheckResult(name, "pass")


def check_bracket_uniqueness(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "bracket-uniqueness"
    n = cfg.radius
    total = count_morphisms(sk, dv.scaled(2 * n, sk.k))
    if total > cfg.window_cap:
        return CheckResult(name, "skip", f"{total} windows exceed the sweep cap")
    windows = all_windows(sk, n)
    seen: dict[tuple[Morphism, Morphism], int] = {}
    for w in windows:
        key = (w.past, w.future)
        seen[key] = seen.get(key, 0) + 1
    if any(c != 1 for c in seen.values()):
        return CheckResult(name, "fail", "two windows share past and future")
    for v in sk.vertices:
        lp = local_product_enum(sk, v, n)
        if not lp.check:
            return CheckResult(name, "fail", f"|E||F| != #windows at {v!r}")
    return CheckResult(name, "pass")


def check_mixing_lag(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "mixing-lag"
    cc, pd = _shared_perron(sk, cfg)
    if not cc.primitive:
        return CheckResult(name, "skip", "not primitive within the search bound")
    rng = _rng(cfg, name)
    pool = _morphisms_upto(sk, dv.scaled(2, sk.k), cap=2000)
    pool = [m for m in pool if not m.is_identity] or pool
    for _ in range(20):
        u = CylinderSet(rng.choice(pool), tuple(rng.randint(-2, 2) for _ in range(sk.k)))
        v = CylinderSet(rng.choice(pool), tuple(rng.randint(-2, 2) for _ in range(sk.k)))
        lag = mixing_lag(sk, u, v, cfg.bound_vec(sk.k))
        if not lag.verified:
            return CheckResult(name, "fail", f"no connector for {u!r} vs {v!r}")
    return CheckResult(name, "pass")


# ---------------------------------------------------------------------------
# relations invariants
# ---------------------------------------------------------------------------


def _tokens(windows: list[Window], extractor) -> "np.ndarray":
    """Intern extractor(w) per window; equal tokens iff equal values."""
    intern: dict = {}
    out = np.empty(len(windows), dtype=np.int64)
    for i, w in enumerate(windows):
        out[i] = intern.setdefault(extractor(w), len(intern))
    return out


def _eq_matrix(tokens: "np.ndarray") -> "np.ndarray":
    return tokens[:, None] == tokens[None, :]


def _tail_eq(windows: list[Window], m: Degree) -> "np.ndarray":
    # pairwise window-scale G_{s,m} membership via the tail block x(m, Ne)
    k = windows[0].skeleton.k
    ne = dv.scaled(windows[0].N, k)
    return _eq_matrix(_tokens(windows, lambda w: w.extract(m, ne)))


def _head_eq(windows: list[Window], n0: Degree) -> "np.ndarray":
    k = windows[0].skeleton.k
    ne = dv.scaled(windows[0].N, k)
    return _eq_matrix(_tokens(windows, lambda w: w.extract(dv.neg(ne), n0)))


def _api_cross_check(
    windows: list[Window], eq: "np.ndarray", m: Degree, predicate, rng: random.Random
) -> bool:
    """The sweeps compare interned blocks; spot-check the public predicate."""
    n = len(windows)
    for _ in range(min(120, n * n)):
        i, j = rng.randrange(n), rng.randrange(n)
        if predicate(windows[i], windows[j], m) != bool(eq[i, j]):
            return False
    return True


def check_stable_nesting(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "stable-nesting"
    k = sk.k
    one = dv.ones(k)
    windows = _suite_windows(sk, cfg.radius, cfg, name)
    ne = dv.scaled(cfg.radius, k)
    eq = {m: _tail_eq(windows, m) for m in dv.box(dv.neg(ne), ne)}
    for m in dv.box(dv.neg(one), one):
        for m2 in dv.box(m, ne):
            if bool(np.any(eq[m] & ~eq[m2])):
                return CheckResult(name, "fail", f"stable at {m} but not at {m2}")
    rng = _rng(cfg, name + "-api")
    for m in (dv.neg(one), dv.zero(k), one):
        if not _api_cross_check(
            windows, eq[m], m, lambda x, y, mm: stable_equiv(RelationQuery(x, y, mm)), rng
        ):
            return CheckResult(name, "fail", f"stable_equiv disagrees with sweep at {m}")
    return CheckResult(name, "pass", f"{len(windows)} windows")


def check_shift_conjugation(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    """(x, y) in G_{s,m+n} iff (sigma^m x, sigma^m y) in G_{s,n}.

    The shifted window reaches only to m + N'e, so at window scale
    membership on the left implies membership on the right for every m,
    and the two agree exactly when the boxes align, i.e. for diagonal
    m = je with j >= 0.
    """
    name = "relation-shift-conjugation"
    k = sk.k
    one = dv.ones(k)
    windows = _suite_windows(sk, cfg.radius, cfg, name)
    ne = dv.scaled(cfg.radius, k)
    tail = {m: _tail_eq(windows, m) for m in dv.box(dv.neg(ne), ne)}
    rng = _rng(cfg, name + "-api")
    for m in dv.box(dv.neg(one), one):
        if dv.norm_max(m) > cfg.radius - 1:
            continue
        shifted = [shift(w, m) for w in windows]
        aligned = m == dv.scaled(m[0], k) and m[0] >= 0
        inner = dv.scaled(shifted[0].N, k)
        for nn in dv.box(dv.neg(inner), inner):
            lhs = tail[dv.add(m, nn)]
            rhs = _tail_eq(shifted, nn)
            if bool(np.any(lhs & ~rhs)):
                return CheckResult(name, "fail", f"G_(s,{m}+{nn}) does not map into G_(s,{nn})")
            if aligned and bool(np.any(lhs != rhs)):
                return CheckResult(name, "fail", f"G_(s,{m}+{nn}) mismatch under sigma^{m}")
            if not _api_cross_check(
                shifted, rhs, nn, lambda x, y, mm: stable_equiv(RelationQuery(x, y, mm)), rng
            ):
                return CheckResult(name, "fail", "stable_equiv disagrees on shifted pairs")
    return CheckResult(name, "pass")


def check_fibered_product(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    """stable at m iff pi(sigma^m x) = pi(sigma^m y); the boxes align for
    diagonal m = je, j >= 0, and the forward implication holds always."""
    name = "relation-fibered-product"
    k = sk.k
    one = dv.ones(k)
    windows = _suite_windows(sk, cfg.radius, cfg, name)
    for m in dv.box(dv.neg(one), one):
        if dv.norm_max(m) > cfg.radius - 1:
            continue
        lhs = _tail_eq(windows, m)
        rhs = _eq_matrix(_tokens(windows, lambda w: restriction_map(shift(w, m))))
        if bool(np.any(lhs & ~rhs)):
            return CheckResult(name, "fail", f"stable at {m} but pi differs")
        if m == dv.scaled(m[0], k) and m[0] >= 0 and bool(np.any(lhs != rhs)):
            return CheckResult(name, "fail", f"pi(sigma^{m}) characterization fails")
    return CheckResult(name, "pass")


def check_asymptotic_meet(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "asymptotic-meet"
    k = sk.k
    windows = _suite_windows(sk, cfg.radius, cfg, name)
    rng = _rng(cfg, name + "-api")
    for m in dv.box(dv.zero(k), dv.ones(k)):
        both = _tail_eq(windows, m) & _head_eq(windows, dv.neg(m))
        asym = _eq_matrix(
            _tokens(
                windows,
                lambda w: (
                    w.extract(m, dv.scaled(w.N, k)),
                    w.extract(dv.scaled(-w.N, k), dv.neg(m)),
                ),
            )
        )
        if bool(np.any(both != asym)):
            return CheckResult(name, "fail", f"asymptotic != stable and unstable at {m}")
        if not _api_cross_check(
            windows, asym, m, lambda x, y, mm: asymptotic_equiv(x, y, mm), rng
        ):
            return CheckResult(name, "fail", f"asymptotic_equiv disagrees with sweep at {m}")
    return CheckResult(name, "pass")


def check_opposite_swap(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "relation-opposite-swap"
    k = sk.k
    one = dv.ones(k)
    windows = _suite_windows(sk, cfg.radius, cfg, name)
    ops = [window_op(w) for w in windows]
    for w, o in zip(windows, ops):
        if window_op(o) != w:
            return CheckResult(name, "fail", f"op involution breaks on {w!r}")
    rng = _rng(cfg, name + "-api")
    for m in dv.box(dv.neg(one), one):
        direct = _head_eq(windows, m)
        swapped = _tail_eq(ops, dv.neg(m))
        if bool(np.any(direct != swapped)):
            return CheckResult(name, "fail", f"stable/unstable swap fails at m={m}")
        ok_direct = _api_cross_check(
            windows, direct, m,
            lambda x, y, mm: unstable_equiv(RelationQuery(x, y, mm), route="direct"), rng,
        )
        ok_op = _api_cross_check(
            windows, direct, m,
            lambda x, y, mm: unstable_equiv(RelationQuery(x, y, mm), route="opposite"), rng,
        )
        if not (ok_direct and ok_op):
            return CheckResult(name, "fail", f"unstable_equiv routes disagree at m={m}")
    return CheckResult(name, "pass")


def check_semidirect_laws(sk: Skeleton, cfg: AnalysisConfig) -> CheckResult:
    name = "semidirect-laws"
    k = sk.k
    rng = _rng(cfg, name)
    big = cfg.radius + 2
    if count_morphisms(sk, dv.scaled(2 * big, k)) > cfg.window_cap:
        windows = [sample_window(sk, big, rng) for _ in range(24)]
    else:
        windows = all_windows(sk, big)
    by_origin: dict[str, list[Window]] = {}
    for w in windows:
        by_origin.setdefault(w.origin, []).append(w)
    checked = 0
    corner = dv.scaled(big, k)
    for group in by_origin.values():
        for x in group[:6]:
            mates = [z for z in group if z.extract(corner, corner) == x.extract(corner, corner)]
            for z in mates[:6]:
                unit = GroupoidElement((x, x), dv.zero(k))
                g = GroupoidElement((x, z), dv.ones(k))
                out = semidirect_compose(unit, g)
                if out.n != g.n or out.pair[1] != restrict(z, out.pair[1].N):
                    return CheckResult(name, "fail", "unit law fails")
                # associativity over shifts n = e, m = -e
                try:
                    g1 = GroupoidElement((x, x), dv.ones(k))
                    mid = shift(x, dv.ones(k))
                    g2 = GroupoidElement((mid, mid), dv.neg(dv.ones(k)))
                    g3 = GroupoidElement((x, z), dv.zero(k))
                    lhs = semidirect_compose(semidirect_compose(g1, g2), g3)
                    rhs = semidirect_compose(g1, semidirect_compose(g2, g3))
                except RadiusExhausted:
                    continue
                if lhs.n != rhs.n:
                    return CheckResult(name, "fail", "associativity: shift components differ")
                r = min(lhs.pair[0].N, rhs.pair[0].N)
                if (restrict(lhs.pair[0], r), restrict(lhs.pair[1], r)) != (
                    restrict(rhs.pair[0], r),
                    restrict(rhs.pair[1], r),
                ):
                    return CheckResult(name, "fail", "associativity: windows differ")
                checked += 1
    return CheckResult(name, "pass", f"{checked} triples")


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

ALL_CHECKS = (
    check_factorization_uniqueness,
    check_associativity,
    check_normal_form_confluence,
    check_opposite_involution,
    check_semigroup_law,
    check_generator_commutation,
    check_eigen_equations,
    check_perron_positivity,
    check_af_consistency,
    check_total_mass,
    check_expansion,
    check_product_decomposition,
    check_haar_scaling,
    check_trace_scaling,
    check_disintegration,
    check_window_consistency,
    check_shift_semigroup,
    check_expansiveness,
    check_contraction,
    check_bracket_axioms,
    check_bracket_uniqueness,
    check_mixing_lag,
    check_stable_nesting,
    check_shift_conjugation,
    check_fibered_product,
    check_asymptotic_meet,
    check_opposite_swap,
    check_semidirect_laws,
)


def run_suite(sk: Skeleton, cfg: AnalysisConfig) -> list[CheckResult]:
    """Run the whole battery; validation problems short-circuit."""
    report = validate_skeleton(sk)
    if not report.ok:
        return [
            CheckResult("skeleton-valid", "fail", "; ".join(v.message for v in report.violations))
        ]
    results = [CheckResult("skeleton-valid", "pass")]
    for fn in ALL_CHECKS:
        try:
            results.append(fn(sk, cfg))
        except KGraphError as exc:
            results.append(CheckResult(fn.__name__, "fail", f"{type(exc).__name__}: {exc}"))
    return results
