"""Shared fixtures-as-functions and an independent dense reference reduction."""

from __future__ import annotations

import random

import numpy as np

from connmat.mvfield import random_forman_field, random_multivector_field, singleton_field, validate_field
from connmat.simplicial import SimplicialComplex, random_complex

ANNULUS_FACETS = [("A", "B", "C"), ("C", "D", "A")]
ANNULUS_VECTORS = [["A", "AB"], ["B", "BC"], ["C", "CD"], ["D", "DA"], ["CA"], ["ABC"], ["CDA"]]
# orbit order used in the worked example; DA is stored as AD
ANNULUS_ORBIT_ORDER = ["A", "B", "AB", "C", "BC", "D", "CD", "DA"]


def annulus() -> SimplicialComplex:
    return SimplicialComplex.from_facets(ANNULUS_FACETS)


def idx(K: SimplicialComplex, name: str) -> int:
    return K.lookup(list(name))


def annulus_field(K: SimplicialComplex):
    return validate_field(K, [[idx(K, s) for s in block] for block in ANNULUS_VECTORS])


def annulus_problem():
    K = annulus()
    return K, annulus_field(K)


def edge_problem():
    K = SimplicialComplex.from_facets([("A", "B")])
    return K, validate_field(K, [[idx(K, "A"), idx(K, "AB")], [idx(K, "B")]])


def stalled_problem():
    """Edge AB glued to triangle BCD; one left-to-right pass leaves a stray entry here."""
    K = SimplicialComplex.from_facets([("A", "B"), ("B", "C", "D")])
    blocks = [["BD", "BCD"], ["D"], ["A", "B", "C", "AB", "BC", "CD"]]
    return K, validate_field(K, [[idx(K, s) for s in b] for b in blocks])


def random_instance(seed: int, max_simplices: int = 60, kind: str = "mixed"):
    rng = random.Random(seed)
    K = random_complex(rng, rng.randint(max(4, max_simplices // 4), max_simplices))
    if kind == "mixed":
        kind = "multivector" if seed % 2 else "forman"
    if kind == "multivector":
        V = random_multivector_field(K, rng)
    elif kind == "forman":
        V = random_forman_field(K, rng)
    else:
        V = singleton_field(K)
    return K, V


# -- dense reference -----------------------------------------------------------


def dense_low(a: np.ndarray, j: int) -> int:
    """1-based low of 1-based column j of a 0-based dense array."""
    nz = np.flatnonzero(a[:, j - 1])
    return int(nz[-1]) + 1 if nz.size else 0


def literal_pass(a0: np.ndarray, grades):
    """One left-to-right pass written directly on a dense copy.

    Returns the final matrix, the (s, j) events, a snapshot after each column
    and the value of each visited entry (i, j) when the scan moves past row i.
    """
    a = a0.copy()
    n = a.shape[0]
    trace = []
    snapshots = []
    settled = {}

    def homogeneous(c: int) -> bool:
        low = dense_low(a, c)
        return low > 0 and grades[low - 1] == grades[c - 1]

    for j in range(1, n + 1):
        for i in range(dense_low(a, j), 0, -1):
            if a[i - 1, j - 1] != 1:
                settled[i, j] = 0
                continue
            S = [s for s in range(1, n + 1) if s != j and dense_low(a, s) == i and homogeneous(s)]
            if S:
                s = min(S)
                a[:, j - 1] ^= a[:, s - 1]
                a[s - 1, :] ^= a[j - 1, :]
                trace.append((s, j))
            settled[i, j] = int(a[i - 1, j - 1])
        snapshots.append(a.copy())
    return a, trace, snapshots, settled


def gf2_product(*mats: np.ndarray) -> np.ndarray:
    """Exact GF(2) product through float matmul (entries stay far below 2**53)."""
    out = mats[0].astype(np.float64)
    for m in mats[1:]:
        out = np.mod(out @ m.astype(np.float64), 2.0)
    return out.astype(np.uint8)


def elementary(n: int, s: int, j: int) -> np.ndarray:
    e = np.eye(n, dtype=np.uint8)
    e[s - 1, j - 1] = 1
    return e
