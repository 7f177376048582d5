"""Builders for frequently used example graphs."""

from __future__ import annotations

from .forest import PlumbingForest


def chain_forest(weights) -> PlumbingForest:
    """Path v1 -- v2 -- ... -- vn with the given weights."""
    weights = tuple(int(w) for w in weights)
    n = len(weights)
    ids = tuple(f"v{i + 1}" for i in range(n))
    edges = tuple((i, i + 1) for i in range(n - 1))
    return PlumbingForest(ids, weights, edges)


def star_forest(center_weight, leaf_weights) -> PlumbingForest:
    """One central vertex v0 joined to one leaf per entry of leaf_weights."""
    leaf_weights = tuple(int(w) for w in leaf_weights)
    ids = ("v0",) + tuple(f"v{i + 1}" for i in range(len(leaf_weights)))
    weights = (int(center_weight),) + leaf_weights
    edges = tuple((0, i + 1) for i in range(len(leaf_weights)))
    return PlumbingForest(ids, weights, edges)


def e8_forest() -> PlumbingForest:
    """The E8 graph: a 7-vertex path, all weights -2, with an eighth -2
    vertex attached to the fifth path vertex."""
    ids = tuple(f"v{i + 1}" for i in range(8))
    weights = (-2,) * 8
    edges = tuple((i, i + 1) for i in range(6)) + ((4, 7),)
    return PlumbingForest(ids, weights, edges)


def lens_chain(p: int, q: int) -> PlumbingForest:
    """Linear graph presenting the lens space L(p, q) via the negative
    continued fraction p/q = [a1, a2, ...] with every a_i >= 2; vertex
    weights are -a_i."""
    if not (0 < q < p):
        raise ValueError("need 0 < q < p")
    a = []
    num, den = p, q
    while den:
        # ceil division: num/den = a - 1/(next)
        k = -(-num // den)
        a.append(k)
        num, den = den, k * den - num
    return chain_forest([-x for x in a])
