import dataclasses
import random

import numpy as np
import pytest
from helpers import ANNULUS_ORBIT_ORDER, annulus, annulus_problem, edge_problem, idx, random_instance

from connmat.connection import PipelineOptions, run_pipeline
from connmat.errors import DenseSizeError, ValidationError
from connmat.gf2 import SparseGF2Matrix
from connmat.mvfield import singleton_field
from connmat.oracle import (
    CHECKS,
    betti_numbers,
    complex_betti,
    conley_index_dims,
    single_reduction,
    verify_connection_matrix,
)
from connmat.simplicial import SimplicialComplex, random_complex, torus_grid


def test_betti_examples():
    # two triangles glued along AC: a disk, so no 1-cycle survives
    assert complex_betti(annulus()).as_list(2) == [1, 0, 0]
    assert complex_betti(SimplicialComplex.from_facets([["A"]])).as_list() == [1]
    assert complex_betti(SimplicialComplex.from_facets([["A", "B"]])).as_list(1) == [1, 0]
    assert complex_betti(torus_grid(3, 3)).as_list() == [1, 2, 1]


def test_betti_rejects_bad_boundaries():
    with pytest.raises(ValidationError, match="square to zero"):
        betti_numbers(SparseGF2Matrix.from_columns(3, [[], [1], [2]]), [0, 1, 2])
    with pytest.raises(ValidationError, match="lower dimension"):
        betti_numbers(SparseGF2Matrix.from_columns(2, [[], [1]]), [0, 0])


@pytest.mark.parametrize("seed", range(25))
def test_euler_characteristic(seed):
    K = random_complex(random.Random(seed), 70)
    betti = complex_betti(K)
    chi = sum((-1) ** q for q in K.dims)
    assert sum((-1) ** q * b for q, b in betti.betti.items()) == chi


def test_conley_index_examples():
    K, V = annulus_problem()
    orbit = [idx(K, s) for s in ANNULUS_ORBIT_ORDER]
    assert conley_index_dims(K, orbit).as_list() == [1, 1]
    assert conley_index_dims(K, [idx(K, "ABC")]).betti == {2: 1}
    E, _ = edge_problem()
    assert conley_index_dims(E, [idx(E, "A"), idx(E, "AB")]).betti == {}


def test_single_reduction_edge():
    K, V = edge_problem()
    result = run_pipeline(K, V)
    d = result.filtered.matrix.to_dense()
    a, ab = result.filtered.labels.index("A") + 1, result.filtered.labels.index("AB") + 1
    maps = single_reduction(d, a, ab)
    assert maps.reduced_boundary.shape == (1, 1) and not maps.reduced_boundary.any()
    assert all(maps.identities().values())
    assert int(maps.homotopy.sum()) == 1
    with pytest.raises(ValidationError, match="not a reduction pair"):
        single_reduction(d, 2, 1)


def test_single_reduction_on_reduced_annulus_is_deletion():
    K, V = annulus_problem()
    result = run_pipeline(K, V, PipelineOptions(intra_order={0: [idx(K, s) for s in ANNULUS_ORBIT_ORDER]}))
    labels = result.filtered.labels
    d = result.state.matrix.to_dense()
    maps = single_reduction(d, labels.index("B") + 1, labels.index("AB") + 1)
    keep = [k for k in range(11) if labels[k] not in ("B", "AB")]
    assert np.array_equal(maps.reduced_boundary, d[np.ix_(keep, keep)])
    assert all(maps.matrix_forms().values())
    assert all(maps.identities().values())


def _annulus_result():
    K, V = annulus_problem()
    result = run_pipeline(K, V, PipelineOptions(intra_order={0: [idx(K, s) for s in ANNULUS_ORBIT_ORDER]}))
    return K, result


def test_certificate_annulus():
    K, result = _annulus_result()
    cert = verify_connection_matrix(result.connection, K, result.decomp, result.filtered, result.state.matrix)
    assert cert.ok
    assert cert.as_dict() == {"checks": {name: True for name in CHECKS}, "witness": None}
    # reduced matrix is recomputed when omitted
    assert verify_connection_matrix(result.connection, K, result.decomp, result.filtered).ok


def test_certificate_rejects_corruption():
    K, result = _annulus_result()
    cm = result.connection
    labels = result.filtered.labels
    extra = (labels.index("CD") + 1, labels.index("ABC") + 1)
    bad = dataclasses.replace(cm, entries=cm.entries | {extra})
    cert = verify_connection_matrix(bad, K, result.decomp, result.filtered, result.state.matrix)
    assert not cert.ok
    assert not cert.checks["collapse"]
    assert cert.witness["check"] in ("conley_counts", "collapse", "betti")
    assert "CD" in cert.witnesses["collapse"] and "ABC" in cert.witnesses["collapse"]


def test_certificate_rejects_dropped_generator():
    K, result = _annulus_result()
    cm = result.connection
    keep = tuple(p for p in cm.surviving if cm.labels[p] != "A")
    bad = dataclasses.replace(cm, surviving=keep)
    cert = verify_connection_matrix(bad, K, result.decomp, result.filtered, result.state.matrix)
    assert not cert.checks["conley_counts"]
    assert cert.witness["check"] == "conley_counts"


def test_certificate_singletons():
    K = annulus()
    result = run_pipeline(K, singleton_field(K))
    assert verify_connection_matrix(result.connection, K, result.decomp, result.filtered).ok


def test_oracle_size_limit():
    K, result = _annulus_result()
    with pytest.raises(DenseSizeError):
        verify_connection_matrix(result.connection, K, result.decomp, result.filtered, limit=5)


@pytest.mark.parametrize("seed", range(40))
def test_identities_on_unreduced_pairs(seed):
    K, V = random_instance(300 + seed, 30)
    d = run_pipeline(K, V).filtered.matrix.to_dense()
    pairs = list(zip(*np.nonzero(d)))
    if not pairs:
        return
    i, j = random.Random(seed).choice(pairs)
    maps = single_reduction(d, int(i) + 1, int(j) + 1)
    assert all(maps.identities().values())
    forms = maps.matrix_forms()
    assert forms["projection_form"] and forms["inclusion_form"] and forms["homotopy_form"]
