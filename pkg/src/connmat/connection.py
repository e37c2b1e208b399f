"""Reduction of a filtered boundary matrix to a connection matrix.

Columns are processed left to right. For column ``j`` the rows are scanned
from ``low(j)`` downwards; whenever ``A[i, j] = 1`` and some other homogeneous
column ``s`` has ``low(s) = i``, the leftmost such ``s`` is added to ``j`` and
row ``j`` is added to row ``s``. The pass is repeated until nothing changes.
A column is homogeneous when it is nonzero and its lowest entry lies in its
own Morse set. Afterwards homogeneous columns and their targets are dropped;
what is left is the connection matrix.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

from .admissible import (
    AdmissibleBasis,
    FilteredBoundaryMatrix,
    assemble,
    build_admissible_basis,
    linear_extension,
)
from .errors import InternalConsistencyError
from .gf2 import SparseGF2Matrix, iter_bits, multiply
from .morse import MorseDecomposition, minimal_decomposition, validate_morse_partition
from .mvfield import MultivectorField, flow_digraph
from .simplicial import SimplicialComplex

log = logging.getLogger(__name__)

DEBUG_DENSE_LIMIT = 200


# -- predicates on a matrix with a grade map --------------------------------------
#
# ``grades`` is indexed by position - 1, like AdmissibleBasis.grades.


def is_homogeneous(matrix: SparseGF2Matrix, grades: Sequence[int], j: int) -> bool:
    low = matrix.low(j)
    return low > 0 and grades[low - 1] == grades[j - 1]


def homogeneous_columns(matrix: SparseGF2Matrix, grades: Sequence[int]) -> list[int]:
    return [j for j in range(1, matrix.n_cols + 1) if is_homogeneous(matrix, grades, j)]


def targetable_positions(matrix: SparseGF2Matrix, grades: Sequence[int]) -> set[int]:
    return {matrix.low(s) for s in homogeneous_columns(matrix, grades)}


@dataclass
class ReducedReport:
    r1: bool
    r2: bool
    r3: bool
    pairing: dict[int, int]  # homogeneous column -> its low
    witnesses: list[str]

    @property
    def ok(self) -> bool:
        return self.r1 and self.r2 and self.r3


def check_reduced(matrix: SparseGF2Matrix, grades: Sequence[int], labels: Sequence[str] | None = None) -> ReducedReport:
    """Check the three reducedness conditions and report witnesses."""
    name = (lambda p: labels[p - 1]) if labels is not None else str
    hom = homogeneous_columns(matrix, grades)
    pairing = {j: matrix.low(j) for j in hom}
    witnesses = []

    by_low: dict[int, list[int]] = {}
    for j, i in pairing.items():
        by_low.setdefault(i, []).append(j)
    r1 = True
    for i, js in sorted(by_low.items()):
        if len(js) > 1:
            r1 = False
            witnesses.append(f"R1: columns {', '.join(name(j) for j in js)} share low {name(i)}")

    targets = set(by_low)
    both = sorted(targets & set(hom))
    r2 = not both
    for p in both:
        witnesses.append(f"R2: {name(p)} is both homogeneous and targetable")

    r3 = True
    for j in range(1, matrix.n_cols + 1):
        for i in iter_bits(matrix.cols[j]):
            others = [s for s in by_low.get(i, ()) if s != j]
            if others:
                r3 = False
                witnesses.append(
                    f"R3: A[{name(i)},{name(j)}]=1 while {name(others[0])} is homogeneous with low {name(i)}"
                )
    return ReducedReport(r1, r2, r3, pairing, witnesses)


# -- reduction ----------------------------------------------------------------------


@dataclass
class ReductionState:
    """Working matrix after reduction, with the grade map and the addition trace.

    Each trace event ``(s, j)`` is one column addition s -> j followed by the
    row addition j -> s, i.e. conjugation by the addition matrix E_{s,j}.
    """

    matrix: SparseGF2Matrix
    grades: tuple[int, ...]
    initial: SparseGF2Matrix
    trace: list[tuple[int, int]] = field(default_factory=list)
    events: int = 0
    passes: int = 0
    triangularity_breaches: list[tuple[int, int]] = field(default_factory=list)

    def is_homogeneous(self, j: int) -> bool:
        return is_homogeneous(self.matrix, self.grades, j)

    def homogeneous(self) -> list[int]:
        return homogeneous_columns(self.matrix, self.grades)

    def targetable(self) -> set[int]:
        return targetable_positions(self.matrix, self.grades)

    def check_reduced(self, labels: Sequence[str] | None = None) -> ReducedReport:
        return check_reduced(self.matrix, self.grades, labels)


def reduce(
    fm: FilteredBoundaryMatrix,
    *,
    record_trace: bool = True,
    monitor: bool = True,
    debug: bool = False,
    until_stable: bool = True,
    max_passes: int | None = None,
) -> ReductionState:
    """Reduce a copy of ``fm.matrix``.

    The left-to-right pass is repeated until a pass makes no addition. A
    column can become homogeneous with low ``i`` only after an earlier column
    with a 1 in row ``i`` was scanned; the extra pass clears those entries.
    When the first pass already leaves the matrix reduced, the second pass is
    a no-op. ``until_stable=False`` stops after one pass.

    ``monitor`` records (and logs) any event after which the working matrix is
    no longer strictly upper triangular. ``debug`` additionally checks, with
    dense arithmetic, that each step is a conjugation by E_{s,j} and that the
    matrix still squares to zero (only for n <= DEBUG_DENSE_LIMIT).
    """
    A = fm.matrix.copy()
    n = A.n_cols
    cols, rows = A.cols, A.rows
    grades = (None,) + tuple(fm.basis.grades)
    state = ReductionState(A, tuple(fm.basis.grades), fm.matrix.copy())
    debug = debug and n <= DEBUG_DENSE_LIMIT

    lows = [0] * (n + 1)
    hom: dict[int, set[int]] = {}  # row i -> homogeneous columns with low i

    def refresh(c: int) -> None:
        new = cols[c].bit_length() - 1 if cols[c] else 0
        old = lows[c]
        if new == old:
            return
        if old and grades[old] == grades[c]:
            hom[old].discard(c)
        lows[c] = new
        if new and grades[new] == grades[c]:
            hom.setdefault(new, set()).add(c)

    for c in range(1, n + 1):
        refresh(c)

    trace = state.trace
    events = 0
    max_passes = max_passes or n + 2
    while True:
        before_pass = events
        for j in range(1, n + 1):
            i = lows[j]
            while i > 0:
                if (cols[j] >> i) & 1:
                    cands = hom.get(i)
                    s = 0
                    if cands:
                        s = min(cands) if j not in cands else min((x for x in cands if x != j), default=0)
                    if s:
                        if debug:
                            before = A.to_dense()
                        src = cols[s]
                        cols[j] ^= src
                        bit = 1 << j
                        for r in iter_bits(src):
                            rows[r] ^= bit
                        rj = rows[j]
                        rows[s] ^= rj
                        bit = 1 << s
                        for c in iter_bits(rj):
                            cols[c] ^= bit
                            refresh(c)
                        refresh(j)
                        events += 1
                        if record_trace:
                            trace.append((s, j))
                        if monitor and (cols[j].bit_length() - 1 >= j or rows[s] & ((2 << s) - 1)):
                            state.triangularity_breaches.append((s, j))
                            log.warning(
                                "working matrix left strict upper triangular form after adding %s to %s",
                                fm.labels[s - 1], fm.labels[j - 1],
                            )
                        if debug:
                            _debug_check(before, A, s, j)
                # next nonzero entry of column j strictly above row i
                i = (cols[j] & ((1 << i) - 1)).bit_length() - 1
        state.passes += 1
        # a pass without events saw every entry of the final matrix
        if events == before_pass or not until_stable:
            break
        if state.passes >= max_passes:
            raise InternalConsistencyError(f"reduction did not stabilise after {state.passes} passes")
    state.events = events
    return state


def _debug_check(before, A: SparseGF2Matrix, s: int, j: int) -> None:
    from .gf2 import addition_matrix, is_zero

    after = A.to_dense()
    E = addition_matrix(A.n_cols, s, j)
    if not (multiply(E, after) == multiply(before, E)).all():
        raise InternalConsistencyError(f"step ({s}, {j}) is not a conjugation by E")
    if not is_zero(multiply(after, after)):
        raise InternalConsistencyError(f"working matrix no longer squares to zero after ({s}, {j})")


# -- extraction -------------------------------------------------------------------


@dataclass(frozen=True)
class ConnectionMatrix:
    """Surviving basis positions with the entries of the reduced matrix among them.

    ``surviving`` are positions in the admissible basis, ascending.
    ``entries`` are (row position, column position) pairs.
    """

    surviving: tuple[int, ...]
    labels: Mapping[int, str]
    grades: Mapping[int, int]
    dims: Mapping[int, int]
    entries: frozenset[tuple[int, int]]

    def __len__(self) -> int:
        return len(self.surviving)

    def labelled_entries(self) -> frozenset[tuple[str, str]]:
        return frozenset((self.labels[i], self.labels[j]) for i, j in self.entries)

    def to_matrix(self) -> SparseGF2Matrix:
        """The entries as a |J| x |J| matrix, renumbered 1..|J| in surviving order."""
        local = {p: k for k, p in enumerate(self.surviving, start=1)}
        cols: list[list[int]] = [[] for _ in self.surviving]
        for i, j in self.entries:
            cols[local[j] - 1].append(local[i])
        return SparseGF2Matrix.from_columns(len(self.surviving), cols, len(self.surviving))

    def grade_list(self) -> list[int]:
        return [self.grades[p] for p in self.surviving]

    def dim_list(self) -> list[int]:
        return [self.dims[p] for p in self.surviving]


def extract(state: ReductionState, fm: FilteredBoundaryMatrix) -> ConnectionMatrix:
    """Drop homogeneous and targetable positions from the reduced matrix."""
    report = state.check_reduced(fm.labels)
    if not report.ok:
        raise InternalConsistencyError("reduced matrix check failed: " + "; ".join(report.witnesses[:3]))
    A = state.matrix
    dropped = set(report.pairing) | set(report.pairing.values())
    J = tuple(p for p in range(1, A.n_cols + 1) if p not in dropped)
    keep = set(J)
    entries = frozenset((i, j) for j in J for i in iter_bits(A.cols[j]) if i in keep)
    basis = fm.basis
    return ConnectionMatrix(
        surviving=J,
        labels={p: fm.labels[p - 1] for p in J},
        grades={p: basis.grades[p - 1] for p in J},
        dims={p: basis.homdim[p - 1] for p in J},
        entries=entries,
    )


# -- pipeline -----------------------------------------------------------------------


@dataclass
class PipelineOptions:
    """Knobs for the full pipeline.

    ``morse_sets`` replaces the minimal decomposition with a user partition
    (simplex indices). ``intra_order`` maps Morse set id to a simplex-index
    order for that set. ``linext`` fixes the order of Morse sets outright;
    otherwise ``linext_seed`` picks a reproducible random linear extension.
    """

    morse_sets: Sequence[Sequence[int]] | None = None
    linext: Sequence[int] | None = None
    linext_seed: int | None = None
    intra_order: Mapping[int, Sequence[int]] | None = None
    record_trace: bool = True
    monitor: bool = True
    debug: bool = False


@dataclass
class RunReport:
    timings_ms: dict[str, float]
    events: int
    n: int
    n_sets: int
    n_surviving: int

    def as_dict(self) -> dict:
        return {
            "timings_ms": {k: round(v, 3) for k, v in self.timings_ms.items()},
            "events": self.events,
            "n": self.n,
            "sets": self.n_sets,
            "surviving": self.n_surviving,
        }


@dataclass
class PipelineResult:
    complex: SimplicialComplex
    field: MultivectorField
    flow: list[frozenset[int]]
    decomp: MorseDecomposition
    basis: AdmissibleBasis
    filtered: FilteredBoundaryMatrix
    state: ReductionState
    connection: ConnectionMatrix
    report: RunReport


def decompose(K: SimplicialComplex, V: MultivectorField, morse_sets=None) -> tuple[list, MorseDecomposition]:
    flow = flow_digraph(K, V)
    if morse_sets is None:
        decomp = minimal_decomposition(flow)
    else:
        decomp = validate_morse_partition(flow, morse_sets, [K.label(k) for k in range(len(K))])
    return flow, decomp


def run_pipeline(K: SimplicialComplex, V: MultivectorField, options: PipelineOptions | None = None) -> PipelineResult:
    opts = options or PipelineOptions()
    timings: dict[str, float] = {}
    t0 = t = time.perf_counter()

    def lap(name: str) -> None:
        nonlocal t
        now = time.perf_counter()
        timings[name] = (now - t) * 1000.0
        t = now

    flow, decomp = decompose(K, V, opts.morse_sets)
    lap("morse")
    linext = opts.linext
    if linext is None:
        linext = linear_extension(decomp, seed=opts.linext_seed)
    basis = build_admissible_basis(K, decomp, linext, opts.intra_order)
    fm = assemble(K, decomp, basis)
    lap("assemble")
    state = reduce(fm, record_trace=opts.record_trace, monitor=opts.monitor, debug=opts.debug)
    lap("reduce")
    cm = extract(state, fm)
    lap("extract")
    timings["total"] = (time.perf_counter() - t0) * 1000.0
    report = RunReport(timings, state.events, len(K), len(decomp), len(cm))
    return PipelineResult(K, V, flow, decomp, basis, fm, state, cm, report)


def compute_connection_matrix(
    K: SimplicialComplex, V: MultivectorField, options: PipelineOptions | None = None
) -> ConnectionMatrix:
    return run_pipeline(K, V, options).connection
