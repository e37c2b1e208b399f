"""Brute-force verification of connection matrices.

Everything here is dense or elimination-based and deliberately independent of
the reduction: GF(2) homology, Conley indices as homology of the quotient
complex spanned by a Morse set, and the elementary collapse along a reduction
pair computed straight from its defining maps.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .admissible import FilteredBoundaryMatrix
from .connection import ConnectionMatrix, reduce
from .errors import DenseSizeError, ValidationError
from .gf2 import SparseGF2Matrix, identity, iter_bits, multiply, rank
from .morse import MorseDecomposition
from .simplicial import SimplicialComplex

ORACLE_LIMIT = 2000


@dataclass(frozen=True)
class HomologyProfile:
    """Betti numbers over GF(2), keyed by dimension; zero entries omitted."""

    betti: dict[int, int]

    def __getitem__(self, q: int) -> int:
        return self.betti.get(q, 0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HomologyProfile):
            return NotImplemented
        return self.betti == other.betti

    def as_list(self, top: int | None = None) -> list[int]:
        if top is None:
            top = max(self.betti, default=-1)
        return [self[q] for q in range(top + 1)]


def _squares_to_zero(m: SparseGF2Matrix) -> tuple[int, int] | None:
    cols = m.cols
    for j in range(1, m.n_cols + 1):
        acc = 0
        for i in iter_bits(cols[j]):
            acc ^= cols[i]
        if acc:
            return max(acc.bit_length() - 1, 0), j
    return None


def betti_numbers(boundary: SparseGF2Matrix, dims: Sequence[int]) -> HomologyProfile:
    """Betti numbers of a square boundary matrix with per-position dimensions.

    ``dims[p - 1]`` is the dimension of basis element ``p``.
    """
    n = boundary.n_cols
    if boundary.n_rows != n or len(dims) != n:
        raise ValidationError("boundary matrix and dimension list disagree in size")
    for i, j in boundary.entries():
        if dims[i - 1] != dims[j - 1] - 1:
            raise ValidationError("boundary does not lower dimension by one", [f"entry ({i}, {j})"])
    bad = _squares_to_zero(boundary)
    if bad is not None:
        raise ValidationError("boundary does not square to zero", [f"(d^2)[{bad[0]}, {bad[1]}] = 1"])
    by_dim: dict[int, list[int]] = {}
    for p, q in enumerate(dims, start=1):
        by_dim.setdefault(q, []).append(p)
    ranks = {}
    for q, cols in by_dim.items():
        ranks[q] = rank(SparseGF2Matrix.from_columns(n, [boundary.column(c) for c in cols], len(cols)))
    betti = {}
    for q, cols in by_dim.items():
        b = len(cols) - ranks[q] - ranks.get(q + 1, 0)
        if b < 0:
            raise ValidationError("negative Betti number; inconsistent input")
        if b:
            betti[q] = b
    return HomologyProfile(betti)


def complex_boundary(K: SimplicialComplex) -> SparseGF2Matrix:
    """Boundary matrix of K in its canonical simplex order."""
    n = len(K)
    return SparseGF2Matrix.from_columns(n, [[f + 1 for f in K.boundary(k)] for k in range(n)], n)


def complex_betti(K: SimplicialComplex) -> HomologyProfile:
    return betti_numbers(complex_boundary(K), K.dims)


def conley_index_dims(K: SimplicialComplex, M: Iterable[int]) -> HomologyProfile:
    """Homology of the chains spanned by M with boundary terms outside M dropped."""
    members = sorted(M)
    local = {k: p for p, k in enumerate(members, start=1)}
    cols = [[local[f] for f in K.boundary(k) if f in local] for k in members]
    m = SparseGF2Matrix.from_columns(len(members), cols, len(members))
    return betti_numbers(m, [K.dims[k] for k in members])


# -- elementary reduction along a pair ----------------------------------------------


@dataclass
class ReductionPairMaps:
    """Maps of the collapse along (pair_row, pair_col), as dense matrices.

    ``kept`` lists the surviving 1-based positions in order. ``reduced_boundary``
    acts on them, ``projection`` maps all positions onto kept ones,
    ``inclusion`` goes back, and ``homotopy`` acts on all positions.
    """

    pair_row: int
    pair_col: int
    kept: list[int]
    boundary: np.ndarray
    reduced_boundary: np.ndarray
    projection: np.ndarray
    inclusion: np.ndarray
    homotopy: np.ndarray

    def identities(self) -> dict[str, bool]:
        n = self.boundary.shape[0]
        d, h = self.boundary, self.homotopy
        proj, incl, red = self.projection, self.inclusion, self.reduced_boundary
        homotopic = (identity(n) + multiply(d, h) + multiply(h, d)) & 1
        return {
            "projection_after_inclusion_is_identity": bool((multiply(proj, incl) == identity(len(self.kept))).all()),
            "inclusion_after_projection_is_homotopic": bool((multiply(incl, proj) == homotopic).all()),
            "reduced_boundary_squares_to_zero": not multiply(red, red).any(),
            "projection_is_chain_map": bool((multiply(red, proj) == multiply(proj, d)).all()),
            "inclusion_is_chain_map": bool((multiply(d, incl) == multiply(incl, red)).all()),
        }

    def matrix_forms(self) -> dict[str, bool]:
        """Compare with the closed-form matrices. Plain deletion is only expected on reduced input."""
        d = self.boundary
        row, col = self.pair_row - 1, self.pair_col - 1
        kept = [k - 1 for k in self.kept]
        n = d.shape[0]
        projection = identity(n)[kept, :]
        projection[:, row] = d[kept, col]
        inclusion = identity(n)[:, kept]
        inclusion[col, :] = d[row, kept]
        homotopy = np.zeros((n, n), dtype=np.uint8)
        homotopy[col, row] = 1
        return {
            "reduced_boundary_is_deletion": bool((self.reduced_boundary == d[np.ix_(kept, kept)]).all()),
            "projection_form": bool((self.projection == projection).all()),
            "inclusion_form": bool((self.inclusion == inclusion).all()),
            "homotopy_form": bool((self.homotopy == homotopy).all()),
        }


def single_reduction(d: np.ndarray, pair_row: int, pair_col: int) -> ReductionPairMaps:
    """Collapse the boundary ``d`` along a pair with ``d[pair_row, pair_col] = 1`` (1-based).

    With r, c the basis vectors of the pair and <x, r> the r-coordinate of x:
    reduced(x) = dx + <dx, r> dc + <dx, c> c, projection(x) = x + <x, r> dc + <x, c> c,
    inclusion(x) = x + <dx, r> c and homotopy(x) = <x, r> c.
    """
    d = np.asarray(d, dtype=np.uint8) & 1
    n = d.shape[0]
    a, b = pair_row - 1, pair_col - 1
    if not (0 <= a < n and 0 <= b < n) or d[a, b] != 1:
        raise ValidationError("not a reduction pair", [f"d[{pair_row}, {pair_col}] = 0"])
    kept = [k for k in range(n) if k not in (a, b)]
    e_b = np.zeros(n, dtype=np.uint8)
    e_b[b] = 1
    e_a = np.zeros(n, dtype=np.uint8)
    e_a[a] = 1
    db = d[:, b]

    full_reduced = (d + np.outer(db, d[a, :]) + np.outer(e_b, d[b, :])) & 1
    full_projection = (identity(n) + np.outer(db, e_a) + np.outer(e_b, e_b)) & 1
    inclusion = (identity(n)[:, kept] + np.outer(e_b, d[a, kept])) & 1
    homotopy = np.outer(e_b, e_a).astype(np.uint8)

    for name, m, cols in (("reduced boundary", full_reduced, kept), ("projection", full_projection, range(n))):
        leak = m[np.ix_([a, b], list(cols))]
        if leak.any():
            raise ValidationError(f"{name} does not land in the reduced space")
    return ReductionPairMaps(
        pair_row=pair_row,
        pair_col=pair_col,
        kept=[k + 1 for k in kept],
        boundary=d,
        reduced_boundary=full_reduced[np.ix_(kept, kept)].astype(np.uint8),
        projection=full_projection[kept, :].astype(np.uint8),
        inclusion=inclusion.astype(np.uint8),
        homotopy=homotopy,
    )


# -- certification ------------------------------------------------------------------

CHECKS = ("cropped", "squared_zero", "diagonal_zero", "filtered", "conley_counts", "betti", "collapse")


@dataclass
class Certificate:
    checks: dict[str, bool] = field(default_factory=dict)
    witnesses: dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    @property
    def witness(self) -> dict | None:
        for name in CHECKS:
            if name in self.checks and not self.checks[name]:
                return {"check": name, "detail": self.witnesses.get(name, "")}
        return None

    def record(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks[name] = ok
        if not ok:
            self.witnesses[name] = detail

    def as_dict(self) -> dict:
        return {"checks": {k: self.checks[k] for k in CHECKS if k in self.checks}, "witness": self.witness}


def verify_connection_matrix(
    cm: ConnectionMatrix,
    K: SimplicialComplex,
    decomp: MorseDecomposition,
    fm: FilteredBoundaryMatrix,
    reduced: SparseGF2Matrix | None = None,
    limit: int = ORACLE_LIMIT,
) -> Certificate:
    """Run checks (a)-(g) and report each separately.

    ``fm`` is the filtered matrix the connection matrix came from; ``reduced``
    its final reduced form (recomputed when omitted) for the collapse check.
    """
    if len(K) > limit:
        raise DenseSizeError(f"oracle refuses complexes above {limit} simplices (got {len(K)})")
    cert = Certificate()
    J = list(cm.surviving)
    local = cm.to_matrix()
    grades = cm.grade_list()
    dims = cm.dim_list()
    lab = [cm.labels[p] for p in J]

    # (a) cropped
    bad = [j for j in range(1, len(J) + 1) if local.low(j) and grades[local.low(j) - 1] == grades[j - 1]]
    cert.record("cropped", not bad, bad and f"column {lab[bad[0] - 1]} is homogeneous")

    # (b) squares to zero
    sq = _squares_to_zero(local)
    cert.record("squared_zero", sq is None, sq and f"(C^2)[{lab[sq[0] - 1]}, {lab[sq[1] - 1]}] = 1")

    # (c) vanishing diagonal blocks, (d) filtration
    diag = [(i, j) for i, j in local.entries() if grades[i - 1] == grades[j - 1]]
    cert.record("diagonal_zero", not diag, diag and f"entry ({lab[diag[0][0] - 1]}, {lab[diag[0][1] - 1]})")
    unf = [(i, j) for i, j in local.entries() if not decomp.leq(grades[i - 1], grades[j - 1])]
    cert.record("filtered", not unf, unf and f"entry ({lab[unf[0][0] - 1]}, {lab[unf[0][1] - 1]})")

    # (e) generator counts per Morse set and dimension
    counts = Counter(zip(grades, dims))
    mismatch = None
    for p, M in enumerate(decomp.sets):
        h = conley_index_dims(K, M)
        top = max([q for (g, q) in counts if g == p] + list(h.betti) + [0])
        for q in range(top + 1):
            if counts.get((p, q), 0) != h[q]:
                mismatch = (
                    f"Morse set {p} dimension {q}: {counts.get((p, q), 0)} generators, Conley index rank {h[q]}"
                )
                break
        if mismatch:
            break
    cert.record("conley_counts", mismatch is None, mismatch or "")

    # (f) global homology
    try:
        hc = betti_numbers(local, dims)
        hk = complex_betti(K)
        cert.record("betti", hc == hk, f"connection matrix {hc.betti} vs complex {hk.betti}")
    except ValidationError as exc:
        cert.record("betti", False, str(exc))

    # (g) iterated elementary collapses reproduce the entries
    if reduced is None:
        reduced = reduce(fm, record_trace=False).matrix
    ok, detail = _collapse_check(reduced, fm.basis.grades, cm)
    cert.record("collapse", ok, detail)
    return cert


def _collapse_check(reduced: SparseGF2Matrix, grades: Sequence[int], cm: ConnectionMatrix) -> tuple[bool, str]:
    n = reduced.n_cols
    d = reduced.to_dense(limit=None)
    positions = list(range(1, n + 1))
    pairs = []
    for j in range(1, n + 1):
        low = reduced.low(j)
        if low and grades[low - 1] == grades[j - 1]:
            pairs.append((low, j))
    for pair_row, pair_col in pairs:
        a, b = positions.index(pair_row) + 1, positions.index(pair_col) + 1
        maps = single_reduction(d, a, b)
        d = maps.reduced_boundary
        positions = [positions[k - 1] for k in maps.kept]
    if positions != list(cm.surviving):
        return False, f"collapses leave positions {positions}, connection matrix has {list(cm.surviving)}"
    got = {(positions[i], positions[j]) for i, j in zip(*np.nonzero(d))}
    if got != set(cm.entries):
        diff = sorted(got ^ set(cm.entries))[0]
        return False, f"entry ({cm.labels.get(diff[0], diff[0])}, {cm.labels.get(diff[1], diff[1])}) differs"
    return True, ""
