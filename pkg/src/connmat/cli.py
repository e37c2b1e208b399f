"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 internal consistency failure,
3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

from . import __version__
from .admissible import assemble, basis_from_order, build_admissible_basis, linear_extension
from .bench import CSV_HEADER, GENERATORS, bench_rows, format_row
from .connection import ConnectionMatrix, PipelineOptions, decompose, reduce, run_pipeline
from .errors import DenseSizeError, InternalConsistencyError, ValidationError
from .morse import MorseDecomposition
from .mvfield import MultivectorField, validate_field
from .oracle import verify_connection_matrix
from .simplicial import SimplicialComplex

EXIT_OK, EXIT_INVALID, EXIT_INTERNAL, EXIT_ORACLE = 0, 1, 2, 3
FORMAT = 1

@dataclass
class Problem:
    complex: SimplicialComplex
    field: MultivectorField
    morse_sets: list[list[int]] | None
    intra_order: Any  # raw JSON, resolved once the Morse sets are known
    linext_seed: int | None


# -- input --------------------------------------------------------------------------


def read_json(path: str) -> Any:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _require(doc: Any, key: str, where: str) -> Any:
    if not isinstance(doc, dict):
        raise ValidationError(f"{where}: expected a JSON object")
    if key not in doc:
        raise ValidationError(f"{where}: missing key {key!r}")
    return doc[key]


def _check_format(doc: Any, where: str) -> None:
    fmt = _require(doc, "format", where)
    if fmt != FORMAT:
        raise ValidationError(f"{where}: unsupported format {fmt!r} (expected {FORMAT})")


def _simplex_list(value: Any, where: str) -> list[list]:
    if not isinstance(value, list) or not all(isinstance(s, list) for s in value):
        raise ValidationError(f"{where}: expected a list of simplices (vertex lists)")
    return value


def parse_problem(doc: Any, where: str = "input") -> Problem:
    _check_format(doc, where)
    desc = _require(doc, "complex", where)
    if isinstance(desc, dict) and "facets" in desc:
        K = SimplicialComplex.from_facets(_simplex_list(desc["facets"], f"{where}.complex.facets"))
    elif isinstance(desc, dict) and "simplices" in desc:
        K = SimplicialComplex.from_simplices(_simplex_list(desc["simplices"], f"{where}.complex.simplices"))
    else:
        raise ValidationError(f"{where}.complex: expected an object with 'facets' or 'simplices'")

    blocks = _require(doc, "multivectors", where)
    if not isinstance(blocks, list):
        raise ValidationError(f"{where}.multivectors: expected a list of multivectors")
    V = validate_field(K, [[K.lookup(s) for s in _simplex_list(b, f"{where}.multivectors")] for b in blocks])

    morse_sets = doc.get("morse_sets")
    if morse_sets is not None:
        if not isinstance(morse_sets, list):
            raise ValidationError(f"{where}.morse_sets: expected a list of Morse sets")
        morse_sets = [[K.lookup(s) for s in _simplex_list(m, f"{where}.morse_sets")] for m in morse_sets]

    seed = doc.get("linext_seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise ValidationError(f"{where}.linext_seed: expected an integer")
    return Problem(K, V, morse_sets, doc.get("intra_order"), seed)


def resolve_intra_order(raw: Any, K: SimplicialComplex, decomp: MorseDecomposition) -> dict[int, list[int]]:
    """Accept either {set id: [simplex, ...]} or a list of per-set simplex lists."""
    if raw is None:
        return {}
    out: dict[int, list[int]] = {}
    if isinstance(raw, dict):
        for key, seq in raw.items():
            try:
                p = int(key)
            except ValueError:
                raise ValidationError(f"intra_order: set id {key!r} is not an integer") from None
            if not 0 <= p < len(decomp):
                raise ValidationError(f"intra_order: no Morse set with id {p}")
            out[p] = [K.lookup(s) for s in _simplex_list(seq, "intra_order")]
    elif isinstance(raw, list):
        for seq in raw:
            ks = [K.lookup(s) for s in _simplex_list(seq, "intra_order")]
            if not ks:
                continue
            owners = {decomp.grade_of[k] for k in ks}
            if len(owners) != 1:
                raise ValidationError(
                    "intra_order: an entry mixes Morse sets", [", ".join(K.label(k) for k in ks)]
                )
            p = owners.pop()
            if p in out:
                raise ValidationError(f"intra_order: Morse set {p} listed twice")
            out[p] = ks
    else:
        raise ValidationError("intra_order: expected an object or a list")
    return out


# -- output -------------------------------------------------------------------------


def dump(obj: Any, stream=None) -> None:
    stream = stream or sys.stdout
    stream.write(json.dumps(obj, ensure_ascii=False))
    stream.write("\n")


def connection_json(
    K: SimplicialComplex,
    basis_order: Sequence[int],
    grades: Sequence[int],
    cm: ConnectionMatrix,
    events: int,
) -> dict:
    return {
        "format": FORMAT,
        "basis": [list(K.simplices[k]) for k in basis_order],
        "grades": list(grades),
        "dims": [K.dims[k] for k in basis_order],
        "surviving": list(cm.surviving),
        "entries": [list(e) for e in sorted(cm.entries, key=lambda e: (e[1], e[0]))],
        "labels": {str(p): cm.labels[p] for p in cm.surviving},
        "events": events,
    }


def matrix_json(fm) -> dict:
    """Assembled boundary matrix as 1-based column lists, with position labels."""
    return {"labels": list(fm.labels), "columns": fm.matrix.columns()}


# -- commands -----------------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> int:
    problem = parse_problem(read_json(args.input))
    K = problem.complex
    _, decomp = decompose(K, problem.field, problem.morse_sets)
    intra = resolve_intra_order(problem.intra_order, K, decomp)
    build_admissible_basis(K, decomp, linear_extension(decomp, seed=problem.linext_seed), intra)
    print(
        f"ok: {len(problem.complex)} simplices, {len(problem.field.blocks)} multivectors, "
        f"{len(decomp)} Morse sets"
    )
    return EXIT_OK


def cmd_morse(args: argparse.Namespace) -> int:
    problem = parse_problem(read_json(args.input))
    K = problem.complex
    _, decomp = decompose(K, problem.field, problem.morse_sets)
    dump(
        {
            "format": FORMAT,
            "sets": [[list(K.simplices[k]) for k in sorted(m)] for m in decomp.sets],
            "labels": [[K.label(k) for k in sorted(m)] for m in decomp.sets],
            "order_pairs": [list(c) for c in decomp.covers()],
        }
    )
    return EXIT_OK


def cmd_connect(args: argparse.Namespace) -> int:
    problem = parse_problem(read_json(args.input))
    K = problem.complex
    _, decomp = decompose(K, problem.field, problem.morse_sets)
    raw_intra = problem.intra_order
    if args.intra_order == "default":
        raw_intra = None
    elif args.intra_order is not None:
        raw_intra = read_json(args.intra_order)
    seed = args.linext_seed if args.linext_seed is not None else problem.linext_seed
    opts = PipelineOptions(
        morse_sets=problem.morse_sets,
        linext_seed=seed,
        intra_order=resolve_intra_order(raw_intra, K, decomp),
        record_trace=args.emit_trace,
        debug=args.debug,
    )
    result = run_pipeline(K, problem.field, opts)
    cm = result.connection
    out = connection_json(K, result.basis.order, result.basis.grades, cm, result.state.events)
    labels = result.filtered.labels
    if args.emit_trace:
        out["trace"] = [[labels[s - 1], labels[j - 1]] for s, j in result.state.trace]
    if args.emit_matrix:
        out["matrix"] = matrix_json(result.filtered)
    code = EXIT_OK
    if args.verify:
        cert = verify_connection_matrix(cm, K, result.decomp, result.filtered, result.state.matrix)
        out["certificate"] = cert.as_dict()
        if not cert.ok:
            code = EXIT_ORACLE
    dump(out)
    if args.report:
        dump(result.report.as_dict(), sys.stderr)
    return code


def load_connection(doc: Any, K: SimplicialComplex, decomp: MorseDecomposition):
    """Rebuild the filtered matrix and connection matrix described by a ``connect`` output."""
    where = "connection matrix"
    _check_format(doc, where)
    order = [K.lookup(s) for s in _simplex_list(_require(doc, "basis", where), f"{where}.basis")]
    basis = basis_from_order(K, decomp, order)
    fm = assemble(K, decomp, basis)
    n = len(basis)
    surviving = _require(doc, "surviving", where)
    entries = _require(doc, "entries", where)
    if not isinstance(surviving, list) or not all(isinstance(p, int) and 1 <= p <= n for p in surviving):
        raise ValidationError(f"{where}.surviving: expected positions in 1..{n}")
    if sorted(set(surviving)) != surviving:
        raise ValidationError(f"{where}.surviving: positions must be strictly increasing")
    keep = set(surviving)
    if not isinstance(entries, list) or not all(
        isinstance(e, list) and len(e) == 2 and e[0] in keep and e[1] in keep for e in entries
    ):
        raise ValidationError(f"{where}.entries: expected [row, column] pairs of surviving positions")
    cm = ConnectionMatrix(
        surviving=tuple(surviving),
        labels={p: fm.labels[p - 1] for p in surviving},
        grades={p: basis.grades[p - 1] for p in surviving},
        dims={p: basis.homdim[p - 1] for p in surviving},
        entries=frozenset((i, j) for i, j in entries),
    )
    return fm, cm


def cmd_verify(args: argparse.Namespace) -> int:
    problem = parse_problem(read_json(args.input))
    K = problem.complex
    _, decomp = decompose(K, problem.field, problem.morse_sets)
    fm, cm = load_connection(read_json(args.connection), K, decomp)
    reduced = reduce(fm, record_trace=False).matrix
    cert = verify_connection_matrix(cm, K, decomp, fm, reduced)
    dump(cert.as_dict())
    return EXIT_OK if cert.ok else EXIT_ORACLE


def cmd_bench(args: argparse.Namespace) -> int:
    print(CSV_HEADER)
    for row in bench_rows(args.generator, args.sizes, seed=args.seed, repeat=args.repeat):
        print(format_row(row), flush=True)
    return EXIT_OK


# -- entry point --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="connmat", description="Connection matrices of multivector fields.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the complex, field and optional Morse sets")
    p.add_argument("input", help="problem JSON ('-' for stdin)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("morse", help="print the Morse decomposition")
    p.add_argument("input")
    p.set_defaults(func=cmd_morse)

    p = sub.add_parser("connect", help="compute a connection matrix")
    p.add_argument("input")
    p.add_argument("--intra-order", metavar="FILE|default", help="order inside Morse sets")
    p.add_argument("--linext-seed", type=int, help="seed for a random linear extension of the Morse order")
    p.add_argument("--emit-matrix", action="store_true", help="include the assembled boundary matrix")
    p.add_argument("--emit-trace", action="store_true", help="include the column additions performed")
    p.add_argument("--verify", action="store_true", help="certify the result (exit 3 on failure)")
    p.add_argument("--report", action="store_true", help="print timings and sizes to stderr")
    p.add_argument("--debug", action="store_true", help="dense per-step checks (small inputs only)")
    p.set_defaults(func=cmd_connect)

    p = sub.add_parser("verify", help="certify a connection matrix produced by 'connect'")
    p.add_argument("input")
    p.add_argument("connection", help="output of 'connect'")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="time the pipeline on generated instances (CSV)")
    p.add_argument("--generator", choices=GENERATORS, default="triangulated-torus-grid")
    p.add_argument("--sizes", type=int, nargs="+", default=[200, 400, 800, 1600, 3200])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeat", type=int, default=1)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"invalid input: {exc.message}", file=sys.stderr)
        for v in exc.violations:
            print(f"  - {v}", file=sys.stderr)
        return EXIT_INVALID
    except DenseSizeError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InternalConsistencyError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
