"""Finite simplicial complexes and their GF(2) boundary."""

from __future__ import annotations

import random
from collections.abc import Iterable, Sequence
from itertools import combinations

from .errors import ValidationError

Simplex = tuple[str, ...]


def make_simplex(vertices: Iterable) -> Simplex:
    """Normalise a vertex collection to a sorted tuple of strings.

    Raises ValidationError on duplicates or an empty collection.
    """
    verts = [str(v) for v in vertices]
    if not verts:
        raise ValidationError("empty simplex")
    s = tuple(sorted(verts))
    if len(set(s)) != len(s):
        raise ValidationError("malformed simplex", [f"duplicate vertex in {list(vertices)!r}"])
    return s


def simplex_key(s: Simplex) -> tuple[int, Simplex]:
    """Canonical order: dimension first, then lexicographic on vertices."""
    return len(s), s


def label(s: Simplex) -> str:
    """Compact text label, e.g. ``('A','B')`` -> ``"AB"``; multi-character names get commas."""
    if all(len(v) == 1 for v in s):
        return "".join(s)
    return ",".join(s)


def faces(s: Simplex) -> list[Simplex]:
    """All non-empty faces of ``s``, including ``s`` itself."""
    return [f for k in range(1, len(s) + 1) for f in combinations(s, k)]


def facets_of(s: Simplex) -> list[Simplex]:
    """Codimension-one faces of ``s`` (empty for a vertex)."""
    if len(s) == 1:
        return []
    return list(combinations(s, len(s) - 1))


class SimplicialComplex:
    """A closed set of simplices with a canonical index.

    Simplices are indexed 0..n-1 in (dimension, lexicographic) order.
    """

    def __init__(self, simplices: Iterable[Simplex]):
        simplices = sorted(set(simplices), key=simplex_key)
        self.simplices: list[Simplex] = simplices
        self.index: dict[Simplex, int] = {s: k for k, s in enumerate(simplices)}
        missing = []
        for s in simplices:
            for f in facets_of(s):
                if f not in self.index:
                    missing.append(f"missing face {label(f)} of {label(s)}")
        if missing:
            raise ValidationError("simplex list is not closed", missing)
        self.dims: list[int] = [len(s) - 1 for s in simplices]
        self._boundary: list[list[int]] = [
            [self.index[f] for f in facets_of(s)] for s in simplices
        ]
        cob: list[list[int]] = [[] for _ in simplices]
        for k, bd in enumerate(self._boundary):
            for f in bd:
                cob[f].append(k)
        self._coboundary = cob

    @classmethod
    def from_facets(cls, facets: Iterable[Iterable]) -> SimplicialComplex:
        simplices: set[Simplex] = set()
        for facet in facets:
            simplices.update(faces(make_simplex(facet)))
        return cls(simplices)

    @classmethod
    def from_simplices(cls, simplices: Iterable[Iterable]) -> SimplicialComplex:
        """Build from an explicit simplex list, which must already be closed."""
        return cls(make_simplex(s) for s in simplices)

    def __len__(self) -> int:
        return len(self.simplices)

    def __contains__(self, s) -> bool:
        return tuple(s) in self.index

    def __iter__(self):
        return iter(self.simplices)

    def lookup(self, s: Iterable) -> int:
        """Index of a simplex given as any vertex collection."""
        key = make_simplex(s)
        try:
            return self.index[key]
        except KeyError:
            raise ValidationError("unknown simplex", [f"{label(key)} is not in the complex"]) from None

    def label(self, k: int) -> str:
        return label(self.simplices[k])

    @property
    def dimension(self) -> int:
        return max(self.dims, default=-1)

    def boundary(self, k: int) -> list[int]:
        """Indices of the codimension-one faces of simplex ``k``."""
        return self._boundary[k]

    def coboundary(self, k: int) -> list[int]:
        """Indices of the codimension-one cofaces of simplex ``k``."""
        return self._coboundary[k]

    def boundary_faces(self, s: Iterable) -> set[Simplex]:
        k = self.lookup(s)
        return {self.simplices[f] for f in self._boundary[k]}

    def closure_indices(self, ks: Iterable[int]) -> set[int]:
        out: set[int] = set()
        stack = list(ks)
        while stack:
            k = stack.pop()
            if k in out:
                continue
            out.add(k)
            stack.extend(self._boundary[k])
        return out

    def closure(self, ss: Iterable[Iterable]) -> set[Simplex]:
        ks = [self.lookup(s) for s in ss]
        return {self.simplices[k] for k in self.closure_indices(ks)}

    def is_face(self, a: int, b: int) -> bool:
        """True iff simplex ``a`` is a (not necessarily proper) face of simplex ``b``."""
        return set(self.simplices[a]) <= set(self.simplices[b])

    def faces_between(self, a: int, b: int) -> list[int]:
        """Indices of all mu with a <= mu <= b in the face order, canonical order."""
        sa, sb = self.simplices[a], self.simplices[b]
        if not set(sa) <= set(sb):
            return []
        rest = [v for v in sb if v not in sa]
        out = []
        for k in range(len(rest) + 1):
            for extra in combinations(rest, k):
                out.append(self.index[tuple(sorted(sa + extra))])
        return sorted(out)


# -- instance generators ---------------------------------------------------------


def random_complex(
    rng: random.Random, max_simplices: int, n_vertices: int | None = None, max_dim: int = 3
) -> SimplicialComplex:
    """Closure of randomly drawn facets, stopping before ``max_simplices`` is exceeded."""
    if n_vertices is None:
        n_vertices = rng.randint(3, max(3, max_simplices // 3))
    names = [f"v{k:03d}" for k in range(n_vertices)]
    simplices: set[Simplex] = set()
    attempts = 0
    while attempts < 20 * max_simplices:
        attempts += 1
        d = rng.randint(0, min(max_dim, n_vertices - 1))
        facet = tuple(sorted(rng.sample(names, d + 1)))
        new = simplices.union(faces(facet))
        if len(new) > max_simplices:
            if len(simplices) >= max_simplices // 2:
                break
            continue
        simplices = new
    if not simplices:
        simplices = {(names[0],)}
    return SimplicialComplex(simplices)


def torus_grid(a: int, b: int) -> SimplicialComplex:
    """Triangulated ``a x b`` torus: a*b vertices, 3ab edges, 2ab triangles."""
    if a < 3 or b < 3:
        raise ValueError("torus grid needs a, b >= 3 to be a simplicial complex")
    width = len(str(a * b))

    def v(x: int, y: int) -> str:
        return f"v{(x % a) * b + (y % b):0{width}d}"

    facets = []
    for x in range(a):
        for y in range(b):
            facets.append((v(x, y), v(x + 1, y), v(x + 1, y + 1)))
            facets.append((v(x, y), v(x, y + 1), v(x + 1, y + 1)))
    return SimplicialComplex.from_facets(facets)


def torus_grid_near(n: int) -> SimplicialComplex:
    """Torus grid whose simplex count 6ab is as close as possible to ``n``."""
    best = None
    for a in range(3, n + 1):
        if 6 * a * a > 2 * n and a > 3:
            break
        for b in range(a, max(a, n // 6 + 2)):
            size = 6 * a * b
            score = (abs(size - n), b - a)
            if best is None or score < best[0]:
                best = (score, a, b)
            if size > n:
                break
    _, a, b = best
    return torus_grid(a, b)
