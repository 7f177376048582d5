"""Exhaustive scans over small negative-definite weighted trees.

Trees are enumerated one isomorphism class of shapes at a time; weight
assignments are swept as a (wmin..-1)^n grid per shape with a vectorized
subtree-determinant recursion, so definiteness, determinant and
minimality filters run before any graph object is materialized.
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

try:
    import numpy as np
except ImportError:  # pragma: no cover - exercised via the python path
    np = None

import networkx as nx

from . import engine
from .forest import PlumbingForest, canonical_code, is_minimal
from .lattice import DEFAULT_BUDGET, EnumerationBudgetError, QFormContext

MAX_TREE_VERTICES = 12

# number of isomorphism classes of free trees on n vertices, n = 1..12;
# used as an internal consistency check on the generator
_FREE_TREE_COUNTS = (1, 1, 1, 2, 3, 6, 11, 23, 47, 106, 235, 551)

# per-graph cap on the characteristic-vector box inside census scans,
# tighter than the library default so full sweeps stay fast
CENSUS_BOX_CAP = 10**6

SCHEMA_NAME = "plumb-census"
SCHEMA_VERSION = 1

_INT64_GUARD = 2**62


def enumerate_trees(n: int) -> list[tuple[tuple[int, int], ...]]:
    """Edge lists (on vertices 0..n-1) of one representative per
    isomorphism class of free trees on n vertices."""
    if n < 1:
        raise ValueError(f"vertex count must be positive, got {n}")
    if n > MAX_TREE_VERTICES:
        raise EnumerationBudgetError(
            f"tree enumeration is budgeted to {MAX_TREE_VERTICES} vertices, got {n}"
        )
    if n == 1:
        shapes = [()]
    else:
        shapes = [
            tuple(sorted(tuple(sorted(e)) for e in g.edges()))
            for g in nx.nonisomorphic_trees(n)
        ]
    if len(shapes) != _FREE_TREE_COUNTS[n - 1]:
        raise AssertionError(
            f"free-tree generator returned {len(shapes)} shapes on {n} "
            f"vertices, expected {_FREE_TREE_COUNTS[n - 1]}"
        )
    return shapes


def labeled_tree_codes(n: int, weights: Sequence[int] | None = None) -> set[str]:
    """Independent cross-check generator: canonical codes of all labeled
    trees on n vertices (sequence decoding), optionally with a fixed
    weight vector applied by label. Exponential; intended for small n."""
    if n == 1:
        trees = [()]
    elif n == 2:
        trees = [((0, 1),)]
    else:
        trees = []
        for seq in itertools.product(range(n), repeat=n - 2):
            trees.append(_decode_tree_sequence(seq, n))
    w = tuple(weights) if weights is not None else (-2,) * n
    codes = set()
    for edges in trees:
        codes.add(canonical_code(_shape_forest(edges, n, w)))
    return codes


def _decode_tree_sequence(seq: Sequence[int], n: int) -> tuple[tuple[int, int], ...]:
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    leaves = [i for i in range(n) if degree[i] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, x), max(leaf, x)))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u = heapq.heappop(leaves)
    v = heapq.heappop(leaves)
    edges.append((min(u, v), max(u, v)))
    return tuple(sorted(edges))


def _shape_forest(
    edges: Sequence[tuple[int, int]], n: int, weights: Sequence[int]
) -> PlumbingForest:
    ids = tuple(f"v{i + 1}" for i in range(n))
    return PlumbingForest(ids=ids, weights=tuple(weights), edges=tuple(edges))


@dataclass(frozen=True)
class _ShapeTables:
    n: int
    edges: tuple[tuple[int, int], ...]
    children: tuple[tuple[int, ...], ...]
    postorder: tuple[int, ...]
    sizes: tuple[int, ...]
    degrees: tuple[int, ...]


def _shape_tables(edges: Sequence[tuple[int, int]], n: int) -> _ShapeTables:
    adj = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    parent = [-1] * n
    order = [0]
    seen = {0}
    for v in order:
        for u in adj[v]:
            if u not in seen:
                seen.add(u)
                parent[u] = v
                order.append(u)
    children = [[] for _ in range(n)]
    for v in range(n):
        if parent[v] >= 0:
            children[parent[v]].append(v)
    sizes = [1] * n
    for v in reversed(order):
        for c in children[v]:
            sizes[v] += sizes[c]
    return _ShapeTables(
        n=n,
        edges=tuple(edges),
        children=tuple(tuple(c) for c in children),
        postorder=tuple(reversed(order)),
        sizes=tuple(sizes),
        degrees=tuple(len(a) for a in adj),
    )


def _subtree_determinants(tables: _ShapeTables, weights):
    """Determinant of every rooted subtree via the leaf-to-root
    recursion; weights may be per-vertex scalars or equal-length arrays
    (the recursion is elementwise)."""
    d = [None] * tables.n
    p = [None] * tables.n
    for v in tables.postorder:
        cs = tables.children[v]
        if not cs:
            d[v] = weights[v] * 1
            p[v] = weights[v] * 0 + 1
            continue
        pre = [weights[v] * 0 + 1]
        for c in cs:
            pre.append(pre[-1] * d[c])
        suf = [None] * (len(cs) + 1)
        suf[len(cs)] = weights[v] * 0 + 1
        for i in range(len(cs) - 1, -1, -1):
            suf[i] = suf[i + 1] * d[cs[i]]
        a = pre[len(cs)]
        b = weights[v] * 0
        for i, c in enumerate(cs):
            b = b + p[c] * pre[i] * suf[i + 1]
        d[v] = weights[v] * a - b
        p[v] = a
    return d


def _negdef_from_subtrees(tables: _ShapeTables, d):
    """Elementwise: all rooted-subtree determinants carry the alternating
    sign (-1)^size, which is the leading-principal-minor test in a
    children-first vertex order."""
    ok = None
    for v in range(tables.n):
        want_neg = tables.sizes[v] % 2 == 1
        cond = (d[v] < 0) if want_neg else (d[v] > 0)
        ok = cond if ok is None else (ok & cond)
    return ok


@dataclass(frozen=True)
class _GridScan:
    tables: _ShapeTables
    weights: "object"  # (n, C) int64 array or list of per-vertex tuples
    negdef: "object"  # boolean mask over combos
    det: "object"  # root determinant per combo
    minimal: "object"  # no -1 weight at a degree <= 2 vertex
    has_minus_one: "object"
    has_le_minus_three: "object"


def _grid_scan(tables: _ShapeTables, wmin: int) -> _GridScan:
    n = tables.n
    vals = list(range(wmin, 0))
    if np is not None and (abs(wmin) + n) ** n < _INT64_GUARD:
        vals_arr = np.array(vals, dtype=np.int64)
        digits = np.indices((len(vals),) * n).reshape(n, -1)
        weights = vals_arr[digits]
        d = _subtree_determinants(tables, weights)
        negdef = _negdef_from_subtrees(tables, d)
        minimal = np.ones(weights.shape[1], dtype=bool)
        for v in range(n):
            if tables.degrees[v] <= 2:
                minimal &= weights[v] != -1
        return _GridScan(
            tables=tables,
            weights=weights,
            negdef=negdef,
            det=d[tables.postorder[-1]],
            minimal=minimal,
            has_minus_one=(weights == -1).any(axis=0),
            has_le_minus_three=(weights <= -3).any(axis=0),
        )
    combos = list(itertools.product(vals, repeat=n))
    negdef, det, minimal, has1, has3 = [], [], [], [], []
    for w in combos:
        d = _subtree_determinants(tables, w)
        negdef.append(bool(_negdef_from_subtrees(tables, d)))
        det.append(d[tables.postorder[-1]])
        minimal.append(
            all(w[v] != -1 for v in range(n) if tables.degrees[v] <= 2)
        )
        has1.append(any(x == -1 for x in w))
        has3.append(any(x <= -3 for x in w))
    return _GridScan(
        tables=tables,
        weights=combos,
        negdef=negdef,
        det=det,
        minimal=minimal,
        has_minus_one=has1,
        has_le_minus_three=has3,
    )


def _scan_weight_vector(scan: _GridScan, i: int) -> tuple[int, ...]:
    if np is not None and isinstance(scan.weights, np.ndarray):
        return tuple(int(x) for x in scan.weights[:, i])
    return tuple(scan.weights[i])


def _scan_indices(mask) -> Iterable[int]:
    if np is not None and isinstance(mask, np.ndarray):
        return (int(i) for i in np.flatnonzero(mask))
    return (i for i, m in enumerate(mask) if m)


def _check_grid_budget(nmax: int, wmin: int, budget: int) -> None:
    total = sum(
        _FREE_TREE_COUNTS[n - 1] * abs(wmin) ** n for n in range(1, nmax + 1)
    )
    if total > budget:
        raise EnumerationBudgetError(
            f"weighted-tree grid has {total} assignments, budget {budget}"
        )


def enumerate_weighted(
    n: int, wmin: int, budget: int = DEFAULT_BUDGET
) -> Iterator[PlumbingForest]:
    """All connected negative-definite trees on n vertices with weights
    in {wmin..-1}, one representative per isomorphism class, in
    canonical-code order within each shape."""
    if wmin > -1:
        raise ValueError("wmin must be <= -1")
    if abs(wmin) ** n > budget:
        raise EnumerationBudgetError(
            f"{abs(wmin) ** n} weight assignments per shape exceeds budget {budget}"
        )
    for edges in enumerate_trees(n):
        tables = _shape_tables(edges, n)
        scan = _grid_scan(tables, wmin)
        by_code: dict[str, PlumbingForest] = {}
        for i in _scan_indices(scan.negdef):
            forest = _shape_forest(edges, n, _scan_weight_vector(scan, i))
            by_code.setdefault(canonical_code(forest), forest)
        for code in sorted(by_code):
            yield by_code[code]


def enumerate_forests(
    nmax: int, wmin: int, budget: int = DEFAULT_BUDGET
) -> Iterator[PlumbingForest]:
    """All negative-definite weighted forests with at most nmax vertices
    (weights in {wmin..-1}), one per isomorphism class, including the
    empty forest. Components are drawn from enumerate_weighted."""
    trees: list[PlumbingForest] = []
    for n in range(1, nmax + 1):
        trees.extend(enumerate_weighted(n, wmin, budget=budget))

    def build(parts: list[PlumbingForest]) -> PlumbingForest:
        ids, weights, edges = [], [], []
        for pi, part in enumerate(parts):
            off = len(ids)
            ids.extend(f"t{pi + 1}.{v}" for v in part.ids)
            weights.extend(part.weights)
            edges.extend((a + off, b + off) for a, b in part.edges)
        return PlumbingForest(
            ids=tuple(ids), weights=tuple(weights), edges=tuple(edges)
        )

    def rec(start: int, room: int, parts: list[PlumbingForest]) -> Iterator[PlumbingForest]:
        yield build(parts)
        for i in range(start, len(trees)):
            if trees[i].n <= room:
                parts.append(trees[i])
                yield from rec(i, room - trees[i].n, parts)
                parts.pop()

    yield from rec(0, nmax, [])


def _run_path_is_basic(ctx, start, neg, rows2, limit) -> bool:
    """Inline path evaluation: True iff the path from start terminates
    without any coordinate passing -m_v."""
    k = list(start)
    n = len(k)
    steps = 0
    while True:
        step_v = -1
        for v in range(n):
            kv = k[v]
            if kv > neg[v]:
                return False
            if step_v < 0 and kv == neg[v]:
                step_v = v
        if step_v < 0:
            return True
        row = rows2[step_v]
        for u in range(n):
            k[u] += row[u]
        steps += 1
        if steps > limit:
            raise engine.SafetyLimitError(
                f"path from {tuple(start)} exceeded {limit} steps"
            )


def _canonical_class_members(ctx: QFormContext) -> list[tuple[int, ...]]:
    """Box vectors in the spin^c class of the canonical vector m+2: those
    k = base + 2*digits with adj(Q).(k - base) = 0 mod 2|det|. Found by
    meeting two half-coordinate residue sweeps in the middle, so the cost
    is ~sqrt(box) + #members instead of the full box."""
    n = ctx.n
    weights = ctx.forest.weights
    sizes = [abs(w) for w in weights]
    if ctx.box_size > ctx.budget:
        raise EnumerationBudgetError(
            f"box of {ctx.box_size} vectors exceeds budget {ctx.budget}"
        )
    m = 2 * ctx.h1
    adj = ctx.adjugate
    base = [w + 2 for w in weights]
    # per-coordinate residue contribution of digit d: column v of adj times 2d
    contrib = [
        [tuple((2 * d * adj[u][v]) % m for u in range(n)) for d in range(sizes[v])]
        for v in range(n)
    ]
    split = n
    prod = 1
    target = math.isqrt(ctx.box_size)
    for v in range(n):
        if prod >= target:
            split = v
            break
        prod *= sizes[v]

    def sweep(coords):
        acc = [((0,) * n, ())]
        for v in coords:
            acc = [
                (tuple((r + x) % m for r, x in zip(res, c)), dg + (d,))
                for res, dg in acc
                for d, c in enumerate(contrib[v])
            ]
        return acc

    left = sweep(range(split))
    right = sweep(range(split, n))
    by_res: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    for res, dg in right:
        by_res.setdefault(res, []).append(dg)
    members = []
    for res, dg_left in left:
        want = tuple((-x) % m for x in res)
        for dg_right in by_res.get(want, ()):
            dg = dg_left + dg_right
            members.append(tuple(b + 2 * d for b, d in zip(base, dg)))
    return members


def fast_is_rational(ctx: QFormContext) -> bool:
    """Same verdict as engine.is_rational (the canonical spin^c class
    holds exactly one basic vector), but the class members are listed
    directly instead of filtering the whole box, which is decisive when
    |H1| is large."""
    n = ctx.n
    if n == 0:
        return True
    members = _canonical_class_members(ctx)
    weights = ctx.forest.weights
    neg = tuple(-m for m in weights)
    rows2 = tuple(tuple(2 * x for x in ctx.q[v]) for v in range(n))
    limit = 10 * max(1, ctx.box_size)
    count = 0
    for start in members:
        if _run_path_is_basic(ctx, start, neg, rows2, limit):
            count += 1
            if count > 1:
                return False
    if count == 0:
        raise AssertionError("canonical spin^c class has no basic vector")
    return True


@dataclass(frozen=True)
class CensusRecord:
    code: str
    n: int
    weights: tuple[int, ...]
    negdef: bool
    det: int
    spinc: int
    basic: int
    rational: bool
    lspace: bool
    certified: bool
    minimal: bool
    d: tuple[Fraction, ...]


_FILTERS = {
    "zhs": lambda r: abs(r.det) == 1,
    "rational": lambda r: r.rational,
    "nonrational": lambda r: not r.rational,
    "lspace": lambda r: r.lspace,
    "nonlspace": lambda r: not r.lspace,
    "minimal": lambda r: r.minimal,
}

FILTER_NAMES = tuple(sorted(_FILTERS))


def classify(forest: PlumbingForest, budget: int = DEFAULT_BUDGET) -> CensusRecord:
    """Full invariant record for one negative-definite forest."""
    ctx = QFormContext(forest, budget=budget)
    basics = engine.basic_vectors(ctx)
    verd = engine.verdicts(ctx, basics=basics)
    dinv = engine.d_invariants(ctx, basics=basics)
    return CensusRecord(
        code=canonical_code(forest),
        n=forest.n,
        weights=forest.weights,
        negdef=True,
        det=ctx.det,
        spinc=verd.spinc_count,
        basic=verd.basic_total,
        rational=verd.rational,
        lspace=verd.lspace,
        certified=verd.certified,
        minimal=is_minimal(forest),
        d=tuple(sorted(dinv.d)),
    )


def record_to_obj(record: CensusRecord) -> dict:
    return {
        "code": record.code,
        "n": record.n,
        "weights": list(record.weights),
        "negdef": record.negdef,
        "det": record.det,
        "spinc": record.spinc,
        "basic": record.basic,
        "rational": record.rational,
        "lspace": "yes" if record.lspace else "no",
        "certified": record.certified,
        "minimal": record.minimal,
        "d": [[str(x.numerator), str(x.denominator)] for x in record.d],
    }


def schema_header() -> dict:
    return {"schema": SCHEMA_NAME, "version": SCHEMA_VERSION}


def census_scan(
    nmax: int,
    wmin: int,
    filters: Sequence[str] = (),
    budget: int = DEFAULT_BUDGET,
    box_cap: int = CENSUS_BOX_CAP,
    threads: int = 1,
) -> list[CensusRecord]:
    """Classify every enumerated tree with n <= nmax; apply the named
    filters conjunctively; return records sorted by canonical code.
    Graphs whose characteristic-vector box exceeds box_cap are omitted.
    threads > 1 classifies with a process pool (same records, same
    order)."""
    preds = []
    for name in filters:
        if name not in _FILTERS:
            raise ValueError(
                f"unknown filter {name!r}; known: {', '.join(FILTER_NAMES)}"
            )
        preds.append(_FILTERS[name])
    forests = [
        forest
        for n in range(1, nmax + 1)
        for forest in enumerate_weighted(n, wmin, budget=budget)
        if math.prod(abs(w) for w in forest.weights) <= box_cap
    ]
    if threads > 1:
        from concurrent.futures import ProcessPoolExecutor
        from functools import partial

        with ProcessPoolExecutor(max_workers=threads) as pool:
            classified = list(
                pool.map(partial(classify, budget=budget), forests, chunksize=16)
            )
    else:
        classified = [classify(f, budget=budget) for f in forests]
    records = [r for r in classified if all(p(r) for p in preds)]
    records.sort(key=lambda r: (r.code,))
    return records


@dataclass(frozen=True)
class E8Report:
    ok: bool
    nmax: int
    trees_scanned: int
    negdef_count: int
    unimodular_codes: tuple[str, ...]
    expected_code: str


def e8_code() -> str:
    from .catalog import e8_forest

    return canonical_code(e8_forest())


def verify_e8_unique(nmax: int) -> E8Report:
    """Scan every all-(-2) tree with at most nmax vertices; the ones that
    are negative definite with |det| = 1 must be exactly one shape."""
    if nmax < 8:
        raise ValueError("nmax must be at least 8")
    expected = e8_code()
    scanned = 0
    negdef_count = 0
    hits = []
    for n in range(1, nmax + 1):
        for edges in enumerate_trees(n):
            scanned += 1
            tables = _shape_tables(edges, n)
            d = _subtree_determinants(tables, (-2,) * n)
            if not _negdef_from_subtrees(tables, d):
                continue
            negdef_count += 1
            if abs(d[tables.postorder[-1]]) == 1:
                hits.append(canonical_code(_shape_forest(edges, n, (-2,) * n)))
    hits.sort()
    ok = hits == [expected]
    return E8Report(
        ok=ok,
        nmax=nmax,
        trees_scanned=scanned,
        negdef_count=negdef_count,
        unimodular_codes=tuple(hits),
        expected_code=expected,
    )


@dataclass(frozen=True)
class ClassificationReport:
    ok: bool
    nmax: int
    wmin: int
    unimodular_checked: int
    unimodular_rational_codes: tuple[str, ...]
    case2_checked: int
    case3_checked: int
    counterexamples: tuple[str, ...]


def verify_classification(
    nmax: int, wmin: int, budget: int = DEFAULT_BUDGET
) -> ClassificationReport:
    """Over all minimal connected negative-definite trees with n <= nmax
    and weights in {wmin..-1}:

    (a) every rational graph with |det| = 1 has the E8 code;
    (b) every rational graph with no -1 weight and some weight <= -3 has
        |det| > 1 (checked as: such graphs with |det| = 1 are never
        rational);
    (c) every minimal graph containing a -1 vertex is non-rational.
    """
    _check_grid_budget(nmax, wmin, budget)
    expected = e8_code()
    det1: dict[str, PlumbingForest] = {}
    det1_case2: set[str] = set()
    case3: dict[str, PlumbingForest] = {}
    for n in range(1, nmax + 1):
        for edges in enumerate_trees(n):
            tables = _shape_tables(edges, n)
            scan = _grid_scan(tables, wmin)
            neg = scan.negdef
            det = scan.det
            minimal = scan.minimal
            has1 = scan.has_minus_one
            has3 = scan.has_le_minus_three
            if np is not None and isinstance(neg, np.ndarray):
                mask_a = neg & minimal & (np.abs(det) == 1)
                mask_c = neg & minimal & has1
                mask_b = mask_a & ~has1 & has3
            else:
                mask_a = [
                    g and m and abs(dd) == 1
                    for g, m, dd in zip(neg, minimal, det)
                ]
                mask_c = [g and m and h for g, m, h in zip(neg, minimal, has1)]
                mask_b = [
                    a and (not h1) and h3
                    for a, h1, h3 in zip(mask_a, has1, has3)
                ]
            for i in _scan_indices(mask_a):
                forest = _shape_forest(edges, n, _scan_weight_vector(scan, i))
                det1.setdefault(canonical_code(forest), forest)
            for i in _scan_indices(mask_b):
                forest = _shape_forest(edges, n, _scan_weight_vector(scan, i))
                det1_case2.add(canonical_code(forest))
            for i in _scan_indices(mask_c):
                forest = _shape_forest(edges, n, _scan_weight_vector(scan, i))
                case3.setdefault(canonical_code(forest), forest)

    counterexamples = []
    rational_codes = []
    for code, forest in sorted(det1.items()):
        ctx = QFormContext(forest, budget=budget)
        if fast_is_rational(ctx):
            rational_codes.append(code)
            if code != expected:
                counterexamples.append(
                    f"rational |det|=1 graph is not E8: {code} weights={forest.weights}"
                )
            if code in det1_case2:
                counterexamples.append(
                    f"rational graph without -1 and with a weight <= -3 has "
                    f"|det| = 1: {code} weights={forest.weights}"
                )
    for code, forest in sorted(case3.items()):
        ctx = QFormContext(forest, budget=budget)
        if fast_is_rational(ctx):
            counterexamples.append(
                f"minimal graph with a -1 vertex is rational: {code} "
                f"weights={forest.weights}"
            )
    return ClassificationReport(
        ok=not counterexamples,
        nmax=nmax,
        wmin=wmin,
        unimodular_checked=len(det1),
        unimodular_rational_codes=tuple(rational_codes),
        case2_checked=len(det1_case2),
        case3_checked=len(case3),
        counterexamples=tuple(counterexamples),
    )
