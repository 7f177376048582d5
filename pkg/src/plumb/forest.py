"""Weighted plumbing forests: parsing, validation, reduction, canonical form.

A plumbing forest is a finite acyclic graph with an integer weight on each
vertex. Vertices keep the order in which they were defined; all derived
matrices and enumerations use that order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import exact


class ParseError(ValueError):
    """Input rejected, with 1-based line/column when known."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}" + (f", col {column})" if column else ")") if line else ""
        super().__init__(message + where)


@dataclass(frozen=True)
class PlumbingForest:
    """Immutable weighted forest. Edges are index pairs (i, j) with i < j."""

    ids: tuple[str, ...]
    weights: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        n = len(self.ids)
        if len(self.weights) != n:
            raise ValueError("ids and weights must have equal length")
        if len(set(self.ids)) != n:
            raise ValueError("duplicate vertex id")
        norm = []
        seen = set()
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.edges:
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge endpoint out of range: ({a}, {b})")
            if a == b:
                raise ValueError(f"self-loop at vertex {self.ids[a]!r}")
            a, b = min(a, b), max(a, b)
            if (a, b) in seen:
                raise ValueError(f"repeated edge {self.ids[a]!r} -- {self.ids[b]!r}")
            seen.add((a, b))
            ra, rb = find(a), find(b)
            if ra == rb:
                raise ValueError(f"cycle closed by edge {self.ids[a]!r} -- {self.ids[b]!r}")
            parent[ra] = rb
            norm.append((a, b))
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def n(self) -> int:
        return len(self.ids)

    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        nb = [[] for _ in range(self.n)]
        for a, b in self.edges:
            nb[a].append(b)
            nb[b].append(a)
        return tuple(tuple(sorted(x)) for x in nb)

    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return tuple(deg)

    def index_of(self, vertex_id) -> int:
        try:
            return self.ids.index(str(vertex_id))
        except ValueError:
            raise KeyError(f"no vertex with id {vertex_id!r}") from None

    def with_weight(self, index: int, weight: int) -> "PlumbingForest":
        w = list(self.weights)
        w[index] = weight
        return PlumbingForest(self.ids, tuple(w), self.edges)

    def components(self) -> tuple[tuple[int, ...], ...]:
        """Vertex index sets of connected components, in first-seen order."""
        nb = self.neighbors()
        seen = [False] * self.n
        out = []
        for start in range(self.n):
            if seen[start]:
                continue
            stack, comp = [start], []
            seen[start] = True
            while stack:
                v = stack.pop()
                comp.append(v)
                for w in nb[v]:
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
            out.append(tuple(sorted(comp)))
        return tuple(out)


def parse_forest(text: str) -> PlumbingForest:
    """Parse the line-oriented graph format.

    Directives, one per line ('#' starts a comment):

        vertex <id> <weight>
        edge <id> <id>
        chain <weight> <weight> ...

    A chain line defines a path of fresh vertices auto-named c1, c2, ...
    (numbering continues across multiple chain lines). Edges may reference
    vertices defined later in the file.
    """
    ids: list[str] = []
    weights: list[int] = []
    pending_edges: list[tuple[str, str, int, int]] = []
    chain_counter = 0

    def column_of(line, token_index):
        # 1-based column of the token's first character
        pos = 0
        for i, tok in enumerate(line.split()):
            pos = line.index(tok, pos)
            if i == token_index:
                return pos + 1
            pos += len(tok)
        return 1

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = line.split()
        if not tokens:
            continue
        head = tokens[0]
        if head == "vertex":
            if len(tokens) != 3:
                raise ParseError("vertex takes an id and a weight", lineno, 1)
            vid = tokens[1]
            try:
                w = int(tokens[2])
            except ValueError:
                raise ParseError(f"bad weight {tokens[2]!r}", lineno, column_of(line, 2))
            if vid in ids:
                raise ParseError(f"duplicate vertex id {vid!r}", lineno, column_of(line, 1))
            ids.append(vid)
            weights.append(w)
        elif head == "edge":
            if len(tokens) != 3:
                raise ParseError("edge takes two vertex ids", lineno, 1)
            pending_edges.append((tokens[1], tokens[2], lineno, column_of(line, 1)))
        elif head == "chain":
            if len(tokens) < 2:
                raise ParseError("chain needs at least one weight", lineno, 1)
            prev = None
            for j, tok in enumerate(tokens[1:], start=1):
                try:
                    w = int(tok)
                except ValueError:
                    raise ParseError(f"bad weight {tok!r}", lineno, column_of(line, j))
                chain_counter += 1
                vid = f"c{chain_counter}"
                if vid in ids:
                    raise ParseError(f"duplicate vertex id {vid!r}", lineno, 1)
                ids.append(vid)
                weights.append(w)
                if prev is not None:
                    pending_edges.append((prev, vid, lineno, 1))
                prev = vid
        else:
            raise ParseError(f"unknown directive {head!r}", lineno, 1)

    index = {vid: i for i, vid in enumerate(ids)}
    edges = []
    for a, b, lineno, col in pending_edges:
        if a not in index:
            raise ParseError(f"unknown endpoint {a!r}", lineno, col)
        if b not in index:
            raise ParseError(f"unknown endpoint {b!r}", lineno, col)
        edges.append((index[a], index[b]))
    try:
        return PlumbingForest(tuple(ids), tuple(weights), tuple(edges))
    except ValueError as e:
        raise ParseError(str(e)) from None


def parse_forest_json(data) -> PlumbingForest:
    """Parse the JSON mirror: {"vertices": [{"id", "weight"}], "edges": [[a, b]]}."""
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise ParseError(f"bad JSON: {e.msg}", e.lineno, e.colno) from None
    if not isinstance(data, dict):
        raise ParseError("top-level JSON value must be an object")
    ids, weights = [], []
    for v in data.get("vertices", []):
        if not isinstance(v, dict) or "id" not in v or "weight" not in v:
            raise ParseError("each vertex needs an id and a weight")
        ids.append(str(v["id"]))
        if not isinstance(v["weight"], int) or isinstance(v["weight"], bool):
            raise ParseError(f"bad weight for vertex {v['id']!r}")
        weights.append(v["weight"])
    index = {vid: i for i, vid in enumerate(ids)}
    if len(index) != len(ids):
        raise ParseError("duplicate vertex id")
    edges = []
    for e in data.get("edges", []):
        if not (isinstance(e, (list, tuple)) and len(e) == 2):
            raise ParseError(f"bad edge {e!r}")
        a, b = str(e[0]), str(e[1])
        if a not in index:
            raise ParseError(f"unknown endpoint {a!r}")
        if b not in index:
            raise ParseError(f"unknown endpoint {b!r}")
        edges.append((index[a], index[b]))
    try:
        return PlumbingForest(tuple(ids), tuple(weights), tuple(edges))
    except ValueError as e:
        raise ParseError(str(e)) from None


def forest_to_text(forest: PlumbingForest) -> str:
    """Serialize back to the line format (vertex lines, then edge lines)."""
    lines = [f"vertex {vid} {w}" for vid, w in zip(forest.ids, forest.weights)]
    lines += [f"edge {forest.ids[a]} {forest.ids[b]}" for a, b in forest.edges]
    return "\n".join(lines) + ("\n" if lines else "")


def forest_to_json_obj(forest: PlumbingForest) -> dict:
    return {
        "vertices": [{"id": vid, "weight": w} for vid, w in zip(forest.ids, forest.weights)],
        "edges": [[forest.ids[a], forest.ids[b]] for a, b in forest.edges],
    }


def intersection_matrix(forest: PlumbingForest) -> tuple[tuple[int, ...], ...]:
    """Symmetric matrix with weights on the diagonal and 1 per edge."""
    n = forest.n
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = forest.weights[i]
    for a, b in forest.edges:
        rows[a][b] = rows[b][a] = 1
    return tuple(tuple(r) for r in rows)


def is_negative_definite(forest: PlumbingForest) -> bool:
    """True iff the leading principal minors alternate in sign starting negative."""
    minors = exact.leading_minors(intersection_matrix(forest))
    if len(minors) < forest.n:
        return False
    for k, m in enumerate(minors, start=1):
        if m == 0 or (m > 0) != (k % 2 == 0):
            return False
    return True


def h1_order(forest: PlumbingForest) -> int:
    """|det Q|; the order of H_1 of the boundary when Q is nondegenerate, else 0."""
    return abs(exact.determinant(intersection_matrix(forest)))


@dataclass(frozen=True)
class BlowDown:
    """One reduction move: removing a weight -1 vertex of degree <= 2.

    neighbor ids are listed in vertex order; each named neighbor had its
    weight increased by 1, and for degree 2 the two neighbors were joined.
    """

    vertex: str
    neighbors: tuple[str, ...]


@dataclass(frozen=True)
class ReductionTrace:
    moves: tuple[BlowDown, ...] = field(default_factory=tuple)

    def __len__(self):
        return len(self.moves)


def _first_blowdown(ids, weights, adj):
    for i, vid in enumerate(ids):
        if weights[i] == -1 and len(adj[vid]) <= 2:
            return i
    return None


def _mutable_graph(forest):
    ids = list(forest.ids)
    weights = list(forest.weights)
    adj = {vid: set() for vid in ids}
    for a, b in forest.edges:
        adj[ids[a]].add(ids[b])
        adj[ids[b]].add(ids[a])
    return ids, weights, adj


def _freeze_graph(ids, weights, adj):
    index = {vid: i for i, vid in enumerate(ids)}
    edges = sorted(
        (index[a], index[b])
        for a in ids for b in adj[a] if index[a] < index[b]
    )
    return PlumbingForest(tuple(ids), tuple(weights), tuple(edges))


def apply_blowdown(ids, weights, adj, i):
    """Remove vertex i in place and return the recorded move."""
    vid = ids[i]
    nbs = sorted(adj[vid], key=ids.index)
    for nb in nbs:
        weights[ids.index(nb)] += 1
        adj[nb].discard(vid)
    if len(nbs) == 2:
        a, b = nbs
        adj[a].add(b)
        adj[b].add(a)
    del weights[i]
    del ids[i]
    del adj[vid]
    return BlowDown(vid, tuple(nbs))


def reduce_forest(forest: PlumbingForest) -> tuple[PlumbingForest, ReductionTrace]:
    """Blow down weight -1 vertices of degree <= 2 until none remain.

    Deletion bumps each neighbor's weight by 1; a degree-2 deletion joins the
    two neighbors by an edge. The result presents the same 3-manifold.
    Returns the reduced forest and a replayable trace of the moves applied
    (first eligible vertex in definition order, repeated to a fixed point).
    """
    ids, weights, adj = _mutable_graph(forest)
    moves = []
    while True:
        i = _first_blowdown(ids, weights, adj)
        if i is None:
            break
        moves.append(apply_blowdown(ids, weights, adj, i))
    return _freeze_graph(ids, weights, adj), ReductionTrace(tuple(moves))


def replay_trace(forest: PlumbingForest, trace: ReductionTrace) -> PlumbingForest:
    """Re-apply a recorded trace to `forest`, validating each move."""
    ids, weights, adj = _mutable_graph(forest)
    for move in trace.moves:
        if move.vertex not in adj:
            raise ValueError(f"trace names missing vertex {move.vertex!r}")
        i = ids.index(move.vertex)
        if weights[i] != -1 or len(adj[move.vertex]) > 2:
            raise ValueError(f"vertex {move.vertex!r} is not blow-downable here")
        if tuple(sorted(adj[move.vertex], key=ids.index)) != move.neighbors:
            raise ValueError(f"trace neighbors do not match at {move.vertex!r}")
        apply_blowdown(ids, weights, adj, i)
    return _freeze_graph(ids, weights, adj)


def is_minimal(forest: PlumbingForest) -> bool:
    """True iff no weight -1 vertex of degree <= 2 exists (reduce is a no-op)."""
    deg = forest.degrees()
    return all(not (w == -1 and deg[i] <= 2) for i, w in enumerate(forest.weights))


def _rooted_code(root, parent, nb, weights):
    children = sorted(
        _rooted_code(c, root, nb, weights) for c in nb[root] if c != parent
    )
    return f"({weights[root]};{''.join(children)})"


def _tree_centers(vertices, nb):
    # iterative leaf stripping; returns 1 or 2 center vertices
    deg = {v: len([w for w in nb[v] if w in vertices]) for v in vertices}
    alive = set(vertices)
    layer = [v for v in alive if deg[v] <= 1]
    while len(alive) > 2:
        nxt = []
        for v in layer:
            alive.discard(v)
        for v in layer:
            for w in nb[v]:
                if w in alive:
                    deg[w] -= 1
                    if deg[w] == 1:
                        nxt.append(w)
        layer = nxt
    return sorted(alive)


def canonical_code(forest: PlumbingForest) -> str:
    """Canonical string for the weighted forest up to isomorphism.

    Each component is rooted at its center (both choices tried for
    bicentral trees) and encoded by recursively sorted subtree codes with
    weights as labels; component codes are sorted and joined.
    """
    nb = forest.neighbors()
    codes = []
    for comp in forest.components():
        centers = _tree_centers(set(comp), nb)
        codes.append(min(_rooted_code(c, -1, nb, forest.weights) for c in centers))
    return "[" + "|".join(sorted(codes)) + "]"
