"""Multivector fields on a simplicial complex and their flow digraph.

A multivector field is a partition of the complex into blocks that are convex
in the face order. The flow map sends a simplex to its own block together
with its closure; its graph is what the Morse decomposition is computed from.
"""

from __future__ import annotations

import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .errors import ValidationError
from .simplicial import SimplicialComplex


@dataclass(frozen=True)
class MultivectorField:
    """Validated partition of a complex into convex blocks (simplex indices)."""

    blocks: tuple[frozenset[int], ...]
    owner: tuple[int, ...]  # simplex index -> block id

    def block_of(self, k: int) -> frozenset[int]:
        return self.blocks[self.owner[k]]

    @property
    def is_forman(self) -> bool:
        return all(len(b) <= 2 for b in self.blocks)


def convexity_witness(K: SimplicialComplex, block: Iterable[int]) -> tuple[int, int, int] | None:
    """Return (sigma, mu, tau) with sigma <= mu <= tau, sigma, tau in block, mu not; or None."""
    members = set(block)
    for tau in sorted(members):
        for mu in _proper_faces(K, tau):
            if mu in members:
                continue
            for sigma in _proper_faces(K, mu):
                if sigma in members:
                    return sigma, mu, tau
    return None


def _proper_faces(K: SimplicialComplex, k: int) -> list[int]:
    out = K.closure_indices([k])
    out.discard(k)
    return sorted(out)


def validate_field(K: SimplicialComplex, blocks: Sequence[Iterable[int]]) -> MultivectorField:
    """Check that ``blocks`` partition ``K`` into convex sets.

    Raises ValidationError listing every uncovered or double-covered simplex and
    one convexity witness per non-convex block.
    """
    n = len(K)
    owner = [-1] * n
    violations = []
    frozen = []
    for b, block in enumerate(blocks):
        fb = frozenset(block)
        frozen.append(fb)
        for k in fb:
            if not 0 <= k < n:
                violations.append(f"block {b} references unknown simplex index {k}")
            elif owner[k] >= 0:
                violations.append(f"double-covered simplex {K.label(k)} (blocks {owner[k]} and {b})")
            else:
                owner[k] = b
    for k in range(n):
        if owner[k] < 0:
            violations.append(f"uncovered simplex {K.label(k)}")
    for b, fb in enumerate(frozen):
        if not fb:
            violations.append(f"block {b} is empty")
            continue
        if any(not 0 <= k < n for k in fb):
            continue
        w = convexity_witness(K, fb)
        if w is not None:
            s, m, t = (K.label(x) for x in w)
            violations.append(f"block {b} is not convex: {s} <= {m} <= {t} with {m} outside the block")
    if violations:
        raise ValidationError("invalid multivector field", violations)
    return MultivectorField(tuple(frozen), tuple(owner))


def singleton_field(K: SimplicialComplex) -> MultivectorField:
    return MultivectorField(tuple(frozenset([k]) for k in range(len(K))), tuple(range(len(K))))


def flow_digraph(K: SimplicialComplex, V: MultivectorField) -> list[frozenset[int]]:
    """Successor sets of the flow map: successors(k) = block(k) | closure(k).

    Every node is its own successor; consumers skip self-loops.
    """
    succ = []
    for k in range(len(K)):
        succ.append(frozenset(V.block_of(k) | K.closure_indices([k])))
    return succ


# -- random fields ---------------------------------------------------------------


def random_multivector_field(
    K: SimplicialComplex, rng: random.Random, coverage: float = 0.7, merge_rounds: int = 2
) -> MultivectorField:
    """Random convex partition built from face-order intervals plus convex merges."""
    n = len(K)
    owner = [-1] * n
    blocks: list[set[int]] = []
    order = list(range(n))
    rng.shuffle(order)
    for tau in order:
        if owner[tau] >= 0 or rng.random() > coverage:
            continue
        lower = [s for s in K.closure_indices([tau]) if owner[s] < 0 and s != tau]
        if not lower:
            continue
        sigma = rng.choice(lower)
        interval = K.faces_between(sigma, tau)
        if any(owner[m] >= 0 for m in interval):
            continue
        for m in interval:
            owner[m] = len(blocks)
        blocks.append(set(interval))
    for k in range(n):
        if owner[k] < 0:
            owner[k] = len(blocks)
            blocks.append({k})
    for _ in range(merge_rounds):
        ids = list(range(len(blocks)))
        rng.shuffle(ids)
        for b in ids:
            if not blocks[b]:
                continue
            k = rng.choice(sorted(blocks[b]))
            nbrs = [owner[f] for f in K.boundary(k) + K.coboundary(k) if owner[f] != b]
            if not nbrs:
                continue
            c = rng.choice(nbrs)
            merged = blocks[b] | blocks[c]
            if convexity_witness(K, merged) is None:
                for m in blocks[c]:
                    owner[m] = b
                blocks[b] = merged
                blocks[c] = set()
    return validate_field(K, [sorted(b) for b in blocks if b])


def random_forman_field(K: SimplicialComplex, rng: random.Random, density: float = 0.9) -> MultivectorField:
    """Random gradient Forman field: an acyclic matching of faces to codim-one cofaces.

    A pair is kept only if the flow digraph's strongly connected component
    through it is exactly the pair, so the result has no closed paths other
    than within a vector.
    """
    n = len(K)
    partner = [-1] * n
    pairs = [(f, t) for t in range(n) for f in K.boundary(t)]
    rng.shuffle(pairs)
    for f, t in pairs:
        if partner[f] >= 0 or partner[t] >= 0 or rng.random() > density:
            continue
        partner[f], partner[t] = t, f
        if not _pair_is_gradient(K, partner, f):
            partner[f] = partner[t] = -1
    blocks = []
    seen = set()
    for k in range(n):
        if k in seen:
            continue
        if partner[k] >= 0:
            blocks.append(sorted((k, partner[k])))
            seen.update((k, partner[k]))
        else:
            blocks.append([k])
            seen.add(k)
    return validate_field(K, blocks)


def _pair_is_gradient(K: SimplicialComplex, partner: list[int], f: int) -> bool:
    def succ(k):
        out = list(K.boundary(k))
        if partner[k] >= 0:
            out.append(partner[k])
        return out

    def pred(k):
        out = list(K.coboundary(k))
        if partner[k] >= 0:
            out.append(partner[k])
        return out

    def reach(start, step):
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in step(x):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    return reach(f, succ) & reach(f, pred) == {f, partner[f]}
