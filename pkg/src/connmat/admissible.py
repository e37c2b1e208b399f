"""Admissible bases and the filtered boundary matrix.

An admissible basis lists the simplices grouped by Morse set, the groups in
a linear extension of the Morse order, and inside each group in an order that
keeps the boundary matrix strictly upper triangular.
"""

from __future__ import annotations

import heapq
import random
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass

from .errors import InternalConsistencyError, ValidationError
from .gf2 import SparseGF2Matrix
from .morse import MorseDecomposition
from .simplicial import SimplicialComplex


@dataclass(frozen=True)
class AdmissibleBasis:
    """Ordered basis. Position ``p`` (1-based) holds simplex ``order[p - 1]``.

    ``grades[p - 1]`` is the Morse set id of that simplex and ``homdim[p - 1]`` its
    dimension; ``linext`` is the linear order of set ids the grouping follows.
    """

    order: tuple[int, ...]
    grades: tuple[int, ...]
    linext: tuple[int, ...]
    homdim: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.order)

    def position_of(self) -> dict[int, int]:
        return {k: p for p, k in enumerate(self.order, start=1)}


@dataclass(frozen=True)
class FilteredBoundaryMatrix:
    matrix: SparseGF2Matrix
    basis: AdmissibleBasis
    decomp: MorseDecomposition
    labels: tuple[str, ...]  # position - 1 -> simplex label

    @property
    def n(self) -> int:
        return self.matrix.n_cols

    def grade(self, pos: int) -> int:
        return self.basis.grades[pos - 1]


def linear_extension(
    decomp: MorseDecomposition,
    seed: int | None = None,
    key: Callable[[int], object] | None = None,
) -> list[int]:
    """Kahn's algorithm on the Morse order.

    Among the sets available at each step the smallest id is taken, unless
    ``key`` gives a preference or ``seed`` asks for a reproducible random pick.
    """
    n = len(decomp)
    up = decomp.successors_up()
    indeg = [0] * n
    for p in range(n):
        for q in up[p]:
            indeg[q] += 1
    out: list[int] = []
    if seed is None:
        rank = key or (lambda p: p)
        heap = [(rank(p), p) for p in range(n) if indeg[p] == 0]
        heapq.heapify(heap)
        while heap:
            _, p = heapq.heappop(heap)
            out.append(p)
            for q in up[p]:
                indeg[q] -= 1
                if indeg[q] == 0:
                    heapq.heappush(heap, (rank(q), q))
    else:
        rng = random.Random(seed)
        avail = [p for p in range(n) if indeg[p] == 0]
        while avail:
            avail.sort()
            p = avail.pop(rng.randrange(len(avail)))
            out.append(p)
            for q in up[p]:
                indeg[q] -= 1
                if indeg[q] == 0:
                    avail.append(q)
    if len(out) != n:
        raise InternalConsistencyError("cycle detected in the Morse order")
    return out


def check_linear_extension(decomp: MorseDecomposition, linext: Sequence[int]) -> None:
    if sorted(linext) != list(range(len(decomp))):
        raise ValidationError("linear extension is not a permutation of the Morse sets")
    pos = {p: k for k, p in enumerate(linext)}
    bad = [f"set {p} must precede set {q}" for p, q in decomp.covers() if pos[p] > pos[q]]
    if bad:
        raise ValidationError("order does not extend the Morse order", bad)


def default_intra_order(K: SimplicialComplex, members) -> list[int]:
    # simplex indices are already (dimension, lexicographic) ordered
    return sorted(members)


def random_intra_order(K: SimplicialComplex, members, rng: random.Random) -> list[int]:
    """Uniformly random choice at each step among members whose in-set faces are placed."""
    members = set(members)
    need = {k: {f for f in K.boundary(k) if f in members} for k in members}
    avail = sorted(k for k, fs in need.items() if not fs)
    out = []
    while avail:
        k = avail.pop(rng.randrange(len(avail)))
        out.append(k)
        for c in K.coboundary(k):
            if c in need and k in need[c]:
                need[c].discard(k)
                if not need[c]:
                    avail.append(c)
        avail.sort()
    return out


def _triangularity_witness(K: SimplicialComplex, order: Sequence[int]) -> str | None:
    pos = {k: p for p, k in enumerate(order)}
    for p, k in enumerate(order):
        for f in K.boundary(k):
            if pos[f] >= p:
                return f"entry ({K.label(f)}, {K.label(k)}) is on or below the diagonal"
    return None


def build_admissible_basis(
    K: SimplicialComplex,
    decomp: MorseDecomposition,
    linext: Sequence[int] | None = None,
    intra_order: Mapping[int, Sequence[int]] | None = None,
) -> AdmissibleBasis:
    """Group simplices by Morse set in ``linext`` order.

    Sets without an entry in ``intra_order`` use dimension-then-lexicographic
    order. User orders are checked; a violation raises ValidationError naming
    the offending matrix entry.
    """
    if linext is None:
        linext = linear_extension(decomp)
    check_linear_extension(decomp, linext)
    intra_order = dict(intra_order or {})
    order: list[int] = []
    for p in linext:
        members = decomp.sets[p]
        if p in intra_order:
            user = list(intra_order[p])
            if sorted(user) != sorted(members) or len(set(user)) != len(user):
                extra = [K.label(k) for k in user if k not in members]
                missing = [K.label(k) for k in members if k not in user]
                raise ValidationError(
                    f"intra order for Morse set {p} is not a permutation of the set",
                    [f"unexpected {extra}"] * bool(extra) + [f"missing {missing}"] * bool(missing),
                )
            order.extend(user)
        else:
            order.extend(default_intra_order(K, members))
    w = _triangularity_witness(K, order)
    if w is not None:
        raise ValidationError("basis order is not admissible", [w])
    return AdmissibleBasis(
        order=tuple(order),
        grades=tuple(decomp.grade_of[k] for k in order),
        linext=tuple(linext),
        homdim=tuple(K.dims[k] for k in order),
    )


def basis_from_order(K: SimplicialComplex, decomp: MorseDecomposition, order: Sequence[int]) -> AdmissibleBasis:
    """Rebuild and check a basis from an explicit simplex order (e.g. read back from JSON)."""
    if sorted(order) != list(range(len(K))):
        raise ValidationError("basis is not a permutation of the complex")
    linext: list[int] = []
    for k in order:
        g = decomp.grade_of[k]
        if not linext or linext[-1] != g:
            if g in linext:
                raise ValidationError("basis does not group Morse sets contiguously", [f"set {g} split"])
            linext.append(g)
    check_linear_extension(decomp, linext)
    intra = {p: [k for k in order if decomp.grade_of[k] == p] for p in linext}
    return build_admissible_basis(K, decomp, linext, intra)


def assemble(K: SimplicialComplex, decomp: MorseDecomposition, basis: AdmissibleBasis) -> FilteredBoundaryMatrix:
    """Boundary matrix in the basis; checks filtration and strict upper triangularity."""
    pos = basis.position_of()
    n = len(basis)
    columns = [[pos[f] for f in K.boundary(k)] for k in basis.order]
    m = SparseGF2Matrix.from_columns(n, columns, n)
    grades = basis.grades
    for i, j in m.entries():
        if i >= j:
            raise InternalConsistencyError(
                f"assembled matrix not strictly upper triangular at ({K.label(basis.order[i - 1])}, "
                f"{K.label(basis.order[j - 1])})"
            )
        if not decomp.leq(grades[i - 1], grades[j - 1]):
            raise InternalConsistencyError(
                f"assembled matrix not filtered at ({K.label(basis.order[i - 1])}, "
                f"{K.label(basis.order[j - 1])}): set {grades[i - 1]} is not below set {grades[j - 1]}"
            )
    labels = tuple(K.label(k) for k in basis.order)
    return FilteredBoundaryMatrix(m, basis, decomp, labels)
