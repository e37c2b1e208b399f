"""Seeded instance generators and timing rows for benchmarking."""

from __future__ import annotations

import random
from collections.abc import Iterable, Iterator

from .connection import PipelineOptions, run_pipeline
from .mvfield import MultivectorField, random_forman_field, random_multivector_field, singleton_field
from .simplicial import SimplicialComplex, random_complex, torus_grid_near

GENERATORS = ("triangulated-torus-grid", "random-forman", "random-multivector", "singleton")
CSV_HEADER = "n,sets,events,reduce_ms,total_ms"


def instance_rng(seed: int, n: int, rep: int = 0) -> random.Random:
    return random.Random(f"{seed}:{n}:{rep}")


def make_instance(generator: str, n: int, rng: random.Random) -> tuple[SimplicialComplex, MultivectorField]:
    """A complex of roughly ``n`` simplices with a field of the requested kind.

    The torus grid carries a random multivector field; the other generators
    start from a random complex of at most ``n`` simplices.
    """
    if generator == "triangulated-torus-grid":
        K = torus_grid_near(n)
        return K, random_multivector_field(K, rng)
    if generator not in GENERATORS:
        raise ValueError(f"unknown generator {generator!r}; choose from {', '.join(GENERATORS)}")
    K = random_complex(rng, n, n_vertices=max(4, n // 4))
    if generator == "random-forman":
        return K, random_forman_field(K, rng)
    if generator == "random-multivector":
        return K, random_multivector_field(K, rng)
    return K, singleton_field(K)


def bench_rows(generator: str, sizes: Iterable[int], seed: int = 0, repeat: int = 1) -> Iterator[dict]:
    """One row per (size, repetition): n, sets, events, reduce_ms, total_ms."""
    opts = PipelineOptions(record_trace=False)
    for n in sizes:
        for rep in range(repeat):
            K, V = make_instance(generator, n, instance_rng(seed, n, rep))
            report = run_pipeline(K, V, opts).report
            yield {
                "n": report.n,
                "sets": report.n_sets,
                "events": report.events,
                "reduce_ms": report.timings_ms["reduce"],
                "total_ms": report.timings_ms["total"],
            }


def format_row(row: dict) -> str:
    return f"{row['n']},{row['sets']},{row['events']},{row['reduce_ms']:.3f},{row['total_ms']:.3f}"
