"""Morse decompositions from the flow digraph.

Minimal Morse sets are the strongly connected components of the flow digraph.
The order on Morse sets puts attractors at the bottom: ``p <= q`` iff ``M_p``
can be reached from ``M_q``. With that direction the boundary matrix is
filtered (faces are always reachable from their cofaces through the closure
part of the flow map).
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .errors import ValidationError
from .gf2 import iter_bits


@dataclass(frozen=True)
class MorseDecomposition:
    """Partition of the simplex indices into Morse sets with their partial order.

    ``below[q]`` is a bitmask with bit ``p`` set iff ``p <= q`` (reflexive).
    Set ids are assigned by smallest contained simplex index.
    """

    sets: tuple[frozenset[int], ...]
    grade_of: tuple[int, ...]
    below: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.sets)

    def leq(self, p: int, q: int) -> bool:
        return bool((self.below[q] >> p) & 1)

    def lt(self, p: int, q: int) -> bool:
        return p != q and self.leq(p, q)

    def covers(self) -> list[tuple[int, int]]:
        """Covering relation as (p, q) pairs with p < q and nothing strictly between."""
        strict = [b & ~(1 << q) for q, b in enumerate(self.below)]
        out = []
        for q, s in enumerate(strict):
            shadow = 0
            for r in iter_bits(s):
                shadow |= strict[r]
            for p in iter_bits(s & ~shadow):
                out.append((p, q))
        return sorted(out)

    def successors_up(self) -> list[list[int]]:
        """For each p, the sets q covering p (edges p -> q of the Hasse diagram)."""
        up: list[list[int]] = [[] for _ in self.sets]
        for p, q in self.covers():
            up[p].append(q)
        return up


def strongly_connected_components(succ: Sequence[Iterable[int]]) -> list[frozenset[int]]:
    """Tarjan's algorithm, iterative. Components sorted by smallest member."""
    n = len(succ)
    index = [-1] * n
    lowlink = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[frozenset[int]] = []
    counter = 0
    adj = [sorted(s) for s in succ]
    for root in range(n):
        if index[root] >= 0:
            continue
        work = [(root, 0)]
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, pos = work[-1]
            nbrs = adj[v]
            if pos < len(nbrs):
                work[-1] = (v, pos + 1)
                w = nbrs[pos]
                if index[w] < 0:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    lowlink[v] = min(lowlink[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                lowlink[u] = min(lowlink[u], lowlink[v])
            if lowlink[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(frozenset(comp))
    comps.sort(key=min)
    return comps


def _closure_below(children: list[set[int]]) -> list[int]:
    """Reflexive-transitive closure of a DAG given as child sets, as bitmasks."""
    n = len(children)
    below = [0] * n
    done = [False] * n
    for root in range(n):
        if done[root]:
            continue
        work = [(root, iter(children[root]))]
        while work:
            v, it = work[-1]
            nxt = next(it, None)
            if nxt is not None:
                if not done[nxt]:
                    work.append((nxt, iter(children[nxt])))
                continue
            work.pop()
            mask = 1 << v
            for c in children[v]:
                mask |= below[c]
            below[v] = mask
            done[v] = True
    return below


def _component_map(n: int, sets: Sequence[Iterable[int]]) -> list[int]:
    comp = [-1] * n
    for c, s in enumerate(sets):
        for k in s:
            comp[k] = c
    return comp


def condensation_order(succ: Sequence[Iterable[int]], sccs: Sequence[frozenset[int]]) -> MorseDecomposition:
    """Morse decomposition whose sets are ``sccs``, ordered by reachability."""
    n = len(succ)
    sccs = sorted(sccs, key=min)
    comp = _component_map(n, sccs)
    children: list[set[int]] = [set() for _ in sccs]
    for u in range(n):
        cu = comp[u]
        for v in succ[u]:
            cv = comp[v]
            if cv != cu:
                children[cu].add(cv)
    below = _closure_below(children)
    for q, b in enumerate(below):
        for p in iter_bits(b & ~(1 << q)):
            if (below[p] >> q) & 1:
                raise ValidationError("condensation is not acyclic", [f"sets {p} and {q}"])
    return MorseDecomposition(tuple(sccs), tuple(comp), tuple(below))


def minimal_decomposition(succ: Sequence[Iterable[int]]) -> MorseDecomposition:
    return condensation_order(succ, strongly_connected_components(succ))


def _bfs_path(succ, sources: Iterable[int], goal) -> list[int] | None:
    parent: dict[int, int | None] = {}
    queue = deque()
    for s in sorted(sources):
        parent[s] = None
        queue.append(s)
    while queue:
        u = queue.popleft()
        if goal(u) and parent[u] is not None:
            path = [u]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return path[::-1]
        for v in sorted(succ[u]):
            if v not in parent:
                parent[v] = u
                queue.append(v)
    return None


def validate_morse_partition(
    succ: Sequence[Iterable[int]],
    user_sets: Sequence[Iterable[int]],
    labels: Sequence[str] | None = None,
) -> MorseDecomposition:
    """Accept a user partition iff every block is a union of SCCs and path-convex.

    Returns the decomposition with the induced order on blocks. Violations are
    reported with witnesses (simplex labels when ``labels`` is given).
    """
    n = len(succ)
    name = (lambda k: labels[k]) if labels is not None else str
    blocks = sorted((frozenset(s) for s in user_sets), key=lambda s: min(s) if s else -1)
    violations = []
    owner = [-1] * n
    for b, block in enumerate(blocks):
        if not block:
            violations.append("empty Morse set")
        for k in block:
            if not 0 <= k < n:
                violations.append(f"unknown simplex index {k}")
            elif owner[k] >= 0:
                violations.append(f"simplex {name(k)} appears in two Morse sets")
            else:
                owner[k] = b
    for k in range(n):
        if owner[k] < 0:
            violations.append(f"simplex {name(k)} is in no Morse set")
    if violations:
        raise ValidationError("Morse sets do not partition the complex", violations)

    sccs = strongly_connected_components(succ)
    minimal = condensation_order(succ, sccs)
    for scc in sccs:
        owners = {owner[k] for k in scc}
        if len(owners) > 1:
            members = sorted(scc)
            a = members[0]
            other = next(k for k in members if owner[k] != owner[a])
            violations.append(
                f"Morse set splits a strongly connected component: {name(a)} and {name(other)}"
            )

    comp = minimal.grade_of
    for b, block in enumerate(blocks):
        comps = 0
        for k in block:
            comps |= 1 << comp[k]
        down = 0
        for c in iter_bits(comps):
            down |= minimal.below[c]
        escaping = [
            k for k in range(n)
            if k not in block and (down >> comp[k]) & 1 and minimal.below[comp[k]] & comps
        ]
        if escaping:
            mu = escaping[0]
            first = _bfs_path(succ, block, lambda u, mu=mu: u == mu)
            second = _bfs_path(succ, [mu], lambda u, block=block: u in block)
            path = (first or [mu]) + (second or [])[1:]
            violations.append(
                "Morse set is not path-convex: path "
                + " -> ".join(name(k) for k in path)
                + f" leaves the set at {name(mu)}"
            )
    if violations:
        raise ValidationError("invalid Morse decomposition", violations)

    children: list[set[int]] = [set() for _ in blocks]
    for u in range(n):
        for v in succ[u]:
            if owner[u] != owner[v]:
                children[owner[u]].add(owner[v])
    below = _closure_below(children)
    return MorseDecomposition(tuple(blocks), tuple(owner), tuple(below))
