"""Backward/forward lightcones, blowup, induced sub-circuits and disjoint-cone search.

Every gate is treated as a hyperedge joining all of its qubits (and, for
measurements and classically controlled Paulis, the classical bits it
touches). Cones are tracked as Python integer bitmasks.

Blowup is the smallest B with |cone(S)| <= B|S| for all S. Since
cone(S) is the union of cone(i) over i in S, |cone(S)| <= sum |cone(i)|
<= |S| max_i |cone(i)|, and S = {i} attains the maximum, so the singleton
maximum is exactly B.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import LayeredCircuit
from .pauli import as_region

__all__ = [
    "LightconeIndex",
    "back_lightcone",
    "forward_lightcone",
    "blowup",
    "lightcone_index",
    "induced_subcircuit",
    "find_disjoint_pair",
]


def _gate_mask(g, n: int) -> int:
    m = 0
    for q in g.qubits:
        m |= 1 << q
    for cb in g.cbits:
        m |= 1 << (n + cb)
    return m


def _layer_masks(c: LayeredCircuit) -> list[list[int]]:
    return [[_gate_mask(g, c.n) for g in layer] for layer in c.layers]


def _mask(region) -> int:
    m = 0
    for q in region:
        m |= 1 << q
    return m


def _region(mask: int, n: int) -> tuple[int, ...]:
    return tuple(q for q in range(n) if mask >> q & 1)


def _sweep(masks, start: int, reverse: bool) -> int:
    cur = start
    for layer in (reversed(masks) if reverse else masks):
        for gm in layer:
            if gm & cur:
                cur |= gm
    return cur


def back_lightcone(c: LayeredCircuit, region) -> tuple[int, ...]:
    """Input qubits with a wire path to some output qubit in `region`."""
    region = as_region(region, c.n)
    return _region(_sweep(_layer_masks(c), _mask(region), reverse=True), c.n)


def forward_lightcone(c: LayeredCircuit, region) -> tuple[int, ...]:
    """Output qubits reachable by a wire path from some input qubit in `region`."""
    region = as_region(region, c.n)
    return _region(_sweep(_layer_masks(c), _mask(region), reverse=False), c.n)


@dataclass(frozen=True)
class LightconeIndex:
    back: tuple[tuple[int, ...], ...]
    fwd: tuple[tuple[int, ...], ...]
    blowup: int


def lightcone_index(c: LayeredCircuit) -> LightconeIndex:
    masks = _layer_masks(c)
    back = tuple(_region(_sweep(masks, 1 << i, True), c.n) for i in range(c.n))
    fwd = tuple(_region(_sweep(masks, 1 << i, False), c.n) for i in range(c.n))
    b = max([1] + [len(x) for x in back] + [len(x) for x in fwd])
    return LightconeIndex(back, fwd, b)


def blowup(c: LayeredCircuit) -> int:
    return lightcone_index(c).blowup


def induced_subcircuit(c: LayeredCircuit, region) -> LayeredCircuit:
    """Gates that can influence the outputs in `region`, relabeled onto back(region).

    Qubit j of the returned circuit is back_lightcone(c, region)[j]. Layers
    that keep no gate are dropped.
    """
    region = as_region(region, c.n)
    cur = _mask(region)
    kept_rev = []
    for layer in reversed(c.layers):
        kept = []
        for g in layer:
            gm = _gate_mask(g, c.n)
            if gm & cur:
                cur |= gm
                kept.append(g)
        if kept:
            kept_rev.append(kept)
    cone = _region(cur, c.n)
    mapping = {q: j for j, q in enumerate(cone)}
    sub = LayeredCircuit(c.n, kept_rev[::-1])
    return sub.relabeled(mapping, len(cone))


def double_lightcone(c: LayeredCircuit, region, mode: str = "fwd_back") -> tuple[int, ...]:
    """Composite cone: 'fwd_back' is fwd(back(S)), 'back_fwd' is back(fwd(S))."""
    region = as_region(region, c.n)
    masks = _layer_masks(c)
    m = _mask(region)
    if mode == "fwd_back":
        m = _sweep(masks, _sweep(masks, m, True), False)
    elif mode == "back_fwd":
        m = _sweep(masks, _sweep(masks, m, False), True)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return _region(m, c.n)


def find_disjoint_pair(c: LayeredCircuit, candidates, mode: str = "fwd_back"):
    """First (i, j), i < j in lexicographic order, whose double cones are disjoint."""
    cand = as_region(candidates, c.n)
    if not cand:
        raise ValueError("candidate set is empty")
    cones = {i: _mask(double_lightcone(c, [i], mode)) for i in cand}
    for a, i in enumerate(cand):
        for j in cand[a + 1:]:
            if cones[i] & cones[j] == 0:
                return (i, j)
    return None
