"""Command-line front door.

Subcommands: lattice, mobius, pid, synergy, phiid, classify. Exit codes are
a stable scripting contract: 0 success, 2 usage error, 3 capacity error,
4 data/IO error. All information values are printed with 9 decimals in text
and CSV outputs; JSON keeps full double precision. Outputs are deterministic
given inputs and seed (timings go to stderr).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    CATEGORIES,
    SymbolicSequence,
    TransitionModel,
    category_members,
    category_report,
    classify_atom,
    dedupe_consecutive,
    phiid_from_model,
    shuffle_null_correction,
    transition_distribution,
)
from .lattice import Antichain, CapacityError, enumerate_antichains
from .measures import (
    CANONICAL_NAMES,
    JointDistribution,
    canonical_distribution,
    empirical_distribution,
    i_min,
    i_mmi,
    median_binarize,
    mutual_information,
    redundancy_vector,
)
from .mobius import (
    build_mobius_matrix,
    export_matrix_text,
    load_matrix_file,
    parse_atom_label,
    pid_atoms,
    save_matrix_file,
    top_synergy_atom,
)

MATRIX_DIR_ENV = "FASTMOBIUS_MATRIX_DIR"


class UsageError(Exception):
    """Bad flag combination; maps to exit code 2 before any work happens."""


@dataclass
class RunConfig:
    """Validated per-invocation settings shared by the data commands."""

    measure: str = "mmi"
    matrix_path: str | None = None
    build_in_memory: bool = False
    threads: int = 1
    fmt: str = "text"
    out: str | None = None
    seed: int = 0
    shuffles: int = 0


def _fmt9(x: float) -> str:
    return f"{x:.9f}"


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _matrix_dir() -> str | None:
    return os.environ.get(MATRIX_DIR_ENV)


def matrix_filename(n: int) -> str:
    return f"mobius_n{n}.fmob"


def _resolve_matrix(n: int, cfg: RunConfig):
    """Load a cached matrix or build in memory, per the n=5 policy.

    Small lattices (n <= 4) build on the fly. n=5 demands a precomputed
    file unless --build-in-memory is passed, to keep interactive latency
    predictable.
    """
    if cfg.matrix_path:
        matrix = load_matrix_file(cfg.matrix_path)
        if matrix.n != n:
            raise ValueError(f"matrix file is for n={matrix.n}, inputs need n={n}")
        return matrix
    cache = _matrix_dir()
    if cache:
        path = os.path.join(cache, matrix_filename(n))
        if os.path.exists(path):
            matrix = load_matrix_file(path)
            if matrix.n != n:
                raise ValueError(f"cached matrix {path} is for n={matrix.n}, not n={n}")
            return matrix
    if n <= 4 or cfg.build_in_memory:
        return build_mobius_matrix(enumerate_antichains(n), threads=cfg.threads)
    raise UsageError(
        f"n={n} needs a precomputed matrix: pass --matrix FILE, point "
        f"{MATRIX_DIR_ENV} at a cache with {matrix_filename(n)}, or pass --build-in-memory"
    )


# ---------------------------------------------------------------------------
# Input loading
# ---------------------------------------------------------------------------

def _load_distribution(args) -> JointDistribution:
    has_samples = bool(getattr(args, "samples", None))
    if bool(args.dist) == has_samples:
        raise UsageError("provide exactly one of --dist or --samples")
    if args.dist:
        return _distribution_from_spec(args.dist)
    return _distribution_from_samples(args)


def _distribution_from_spec(spec: str) -> JointDistribution:
    if spec.startswith("canonical:"):
        parts = spec.split(":")
        name = parts[1] if len(parts) > 1 else ""
        if name not in CANONICAL_NAMES:
            raise ValueError(f"unknown canonical distribution {name!r}")
        n = int(parts[2]) if len(parts) > 2 else 5
        return canonical_distribution(name, n)
    with open(spec) as fh:
        return JointDistribution.from_json_dict(json.load(fh))


def _read_csv_table(path: str) -> tuple[list[str], np.ndarray]:
    """Read a CSV with a header row of column names and numeric cells."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise ValueError(f"{path}: need a header row and at least one sample")
    header = [c.strip() for c in rows[0]]
    try:
        data = np.array([[float(c) for c in row] for row in rows[1:]])
    except ValueError as exc:
        raise ValueError(f"{path}: non-numeric cell ({exc})") from None
    if data.shape[1] != len(header):
        raise ValueError(f"{path}: ragged rows")
    return header, data


def _distribution_from_samples(args) -> JointDistribution:
    header, data = _read_csv_table(args.samples)
    roles: dict[str, str] = {}
    if getattr(args, "roles", None):
        with open(args.roles) as fh:
            roles = {k: str(v) for k, v in json.load(fh).items()}
    if getattr(args, "sources", None):
        for name in args.sources.split(","):
            roles[name.strip()] = "source"
    if getattr(args, "target", None):
        roles[args.target.strip()] = "target"
    src_names = [h for h in header if roles.get(h) == "source"]
    tgt_names = [h for h in header if roles.get(h) == "target"]
    unknown = set(roles) - set(header)
    if unknown:
        raise ValueError(f"role columns {sorted(unknown)} not present in {args.samples}")
    if not src_names or not tgt_names:
        raise UsageError("mark at least one source and one target column (--sources/--target or --roles)")
    cols = {h: i for i, h in enumerate(header)}
    used = data[:, [cols[h] for h in src_names + tgt_names]]
    if getattr(args, "binarize", None) == "median":
        used = np.stack([median_binarize(used[:, i]) for i in range(used.shape[1])], axis=1)
    return empirical_distribution(used, range(len(src_names)), range(len(src_names), used.shape[1]))


def _load_sequence(path: str, alphabet: int | None) -> SymbolicSequence:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty sequence file")
    start = 0
    try:
        [int(c) for c in rows[0]]
    except ValueError:
        start = 1  # header row
    try:
        data = np.array([[int(c) for c in row] for row in rows[start:]], dtype=np.int64)
    except ValueError as exc:
        raise ValueError(f"{path}: non-integer symbol ({exc})") from None
    if data.ndim != 2 or data.shape[0] == 0:
        raise ValueError(f"{path}: no usable rows")
    if alphabet is None:
        alphabet = max(2, int(data.max()) + 1)
    return SymbolicSequence(data, alphabet)


def _load_transitions(path: str, alphabet: int | None) -> TransitionModel:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    start = 0
    if rows:
        try:
            [int(c) for c in rows[0]]
        except ValueError:
            start = 1
    body = [[int(c) for c in row] for row in rows[start:]]
    if not body:
        raise ValueError(f"{path}: no transition rows")
    width = len(body[0])
    if width % 2 or width == 0:
        raise ValueError(f"{path}: rows must hold 2k symbols (state then next state)")
    data = np.array(body, dtype=np.int64)
    k = width // 2
    if alphabet is None:
        alphabet = max(2, int(data.max()) + 1)
    return TransitionModel.from_pairs(data[:, :k], data[:, k:], alphabet)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_lattice(args) -> int:
    table = enumerate_antichains(args.n)
    comp = np.array(table.comp_ideal_bits, dtype=np.uint64)
    sizes = [int(((comp[j] & ~comp) == 0).sum()) for j in range(len(table))]
    if args.format == "json":
        payload = [
            {"index": i, "antichain": str(a), "downset_size": sizes[i]}
            for i, a in enumerate(table.entries)
        ]
        text = json.dumps({"n": args.n, "count": len(table), "entries": payload}, indent=2) + "\n"
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["index", "antichain", "downset_size"])
        for i, a in enumerate(table.entries):
            w.writerow([i, str(a), sizes[i]])
        text = buf.getvalue()
    else:
        lines = [f"{i}\t{a}\t{sizes[i]}" for i, a in enumerate(table.entries)]
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return 0


def cmd_mobius(args) -> int:
    cfg = RunConfig(threads=args.threads)
    out = args.out
    if out is None:
        cache = _matrix_dir()
        if not cache:
            raise UsageError(f"pass --out FILE or set {MATRIX_DIR_ENV}")
        os.makedirs(cache, exist_ok=True)
        out = os.path.join(cache, matrix_filename(args.n))
    t0 = time.perf_counter()
    table = enumerate_antichains(args.n)
    matrix = build_mobius_matrix(table, threads=cfg.threads)
    elapsed = time.perf_counter() - t0
    if args.format == "text":
        _emit(export_matrix_text(matrix), out)
    else:
        save_matrix_file(matrix, out)
    print(
        f"n={args.n} nonzeros={matrix.nnz} density={100 * matrix.density:.4f}% "
        f"wall={elapsed:.2f}s -> {out}",
        file=sys.stderr,
    )
    return 0


def _pid_compute(args):
    cfg = RunConfig(
        measure=args.measure,
        matrix_path=args.matrix,
        build_in_memory=args.build_in_memory,
        threads=args.threads,
    )
    d = _load_distribution(args)
    if d.n < 2:
        raise ValueError("decomposition needs at least 2 sources")
    if d.n > 5:
        raise CapacityError(f"n={d.n} sources unsupported (lattice would be gigantic)")
    matrix = _resolve_matrix(d.n, cfg)
    v = redundancy_vector(d, matrix.table, cfg.measure)
    atoms = pid_atoms(v, matrix)
    total = mutual_information(d, range(1, d.n + 1))
    return d, matrix.table, v, atoms, total


def cmd_pid(args) -> int:
    d, table, v, atoms, total = _pid_compute(args)
    atom_sum = float(atoms.values.sum())
    if args.format == "json":
        text = json.dumps(
            {
                "n": d.n,
                "measure": args.measure,
                "atoms": [
                    {"antichain": str(a), "redundancy": float(v.values[i]), "atom": float(atoms.values[i])}
                    for i, a in enumerate(table.entries)
                ],
                "atom_sum": atom_sum,
                "total_mutual_information": total,
            },
            indent=2,
        ) + "\n"
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["antichain", "redundancy", "atom"])
        for i, a in enumerate(table.entries):
            w.writerow([str(a), _fmt9(v.values[i]), _fmt9(atoms.values[i])])
        w.writerow(["TOTAL", _fmt9(total), _fmt9(atom_sum)])
        text = buf.getvalue()
    else:
        lines = [
            f"{str(a):<24} {_fmt9(v.values[i]):>14} {_fmt9(atoms.values[i]):>14}"
            for i, a in enumerate(table.entries)
        ]
        lines.append(f"{'TOTAL I(X;Y)':<24} {_fmt9(total):>14} {_fmt9(atom_sum):>14}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return 0


def cmd_synergy(args) -> int:
    d = _load_distribution(args)
    if d.n < 2:
        raise ValueError("decomposition needs at least 2 sources")
    n = d.n
    full = (1 << n) - 1
    cache: dict = {}
    fn = i_mmi if args.measure == "mmi" else i_min
    terms = []
    redundancies = {}
    for u in range(1 << n):
        if u == 0:
            key = Antichain(n, (full,))
        else:
            key = Antichain.from_masks(n, (full ^ (1 << x) for x in range(n) if u >> x & 1))
        value = fn(d, key, cache)
        redundancies[key] = value
        terms.append((u, key, value))
    synergy = top_synergy_atom(redundancies)
    if args.format == "json":
        text = json.dumps(
            {
                "n": n,
                "measure": args.measure,
                "terms": [
                    {"antichain": str(k), "sign": -1 if u.bit_count() & 1 else 1, "redundancy": val}
                    for u, k, val in terms
                ],
                "top_synergy": synergy,
            },
            indent=2,
        ) + "\n"
    else:
        lines = [
            f"{'-' if u.bit_count() & 1 else '+'} {str(k):<24} {_fmt9(val)}"
            for u, k, val in terms
        ]
        lines.append(f"top synergy atom = {_fmt9(synergy)}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return 0


def cmd_phiid(args) -> int:
    cfg = RunConfig(
        matrix_path=args.matrix,
        threads=args.threads,
        seed=args.seed,
        shuffles=args.shuffles,
    )
    if bool(args.input) == bool(args.transitions):
        raise UsageError("provide exactly one of a sequence CSV or --transitions")
    if args.transitions and args.shuffles:
        raise UsageError("--shuffles needs a sequence input (transition pairs carry no order)")

    if args.transitions:
        model = _load_transitions(args.transitions, args.alphabet)
        k = model.k
        _check_channels(k)
        matrix = _resolve_matrix(k, cfg)
        raw, _ = phiid_from_model(model, matrix)
        corrected = raw
        null_mean = null_std = np.zeros(len(raw.values))
        total = model.total_information()
    else:
        seq = _load_sequence(args.input, args.alphabet)
        _check_channels(seq.channels)
        matrix = _resolve_matrix(seq.channels, cfg)
        result = shuffle_null_correction(seq, cfg.shuffles, seed=cfg.seed, matrix=matrix)
        raw, corrected = result.raw, result.corrected
        null_mean, null_std = result.null_mean, result.null_std
        total = transition_distribution(dedupe_consecutive(seq)).total_information()

    table = matrix.table
    size = len(table)
    members = category_members(table)
    report = category_report(corrected, members)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["source", "target", "raw", "corrected"])
        for flat in range(size * size):
            w.writerow([
                str(table[flat // size]),
                str(table[flat % size]),
                _fmt9(raw.values[flat]),
                _fmt9(corrected.values[flat]),
            ])
        text = buf.getvalue()
    else:
        payload = {
            "channels": table.n,
            "alphabet": int(args.alphabet) if args.alphabet else None,
            "shuffles": args.shuffles,
            "seed": args.seed,
            "atoms": [
                {
                    "source": str(table[flat // size]),
                    "target": str(table[flat % size]),
                    "raw": float(raw.values[flat]),
                    "corrected": float(corrected.values[flat]),
                }
                for flat in range(size * size)
            ],
            "categories": {
                name: {
                    "count": report[name].count,
                    "mean_abs_corrected": report[name].mean_abs,
                    "sem": report[name].sem,
                    "atom_indices": report[name].indices.tolist(),
                }
                for name in CATEGORIES
            },
            "raw_atom_sum": float(raw.values.sum()),
            "total_mutual_information": total,
        }
        text = json.dumps(payload, indent=2) + "\n"
    _emit(text, args.out)
    return 0


def _check_channels(k: int) -> None:
    if k < 2:
        raise ValueError("two-sided decomposition needs at least 2 channels")
    if k > 4:
        raise CapacityError(f"{k} channels rejected: the 5-channel double lattice has 7579^2 atoms")


def cmd_classify(args) -> int:
    results = []
    for label in args.atoms:
        alpha, beta = parse_atom_label(label, args.n)
        cats = classify_atom(alpha, beta)
        results.append((f"{alpha}->{beta}", sorted(cats, key=CATEGORIES.index)))
    if args.format == "json":
        text = json.dumps({label: cats for label, cats in results}, indent=2) + "\n"
    else:
        text = "".join(
            f"{label}: {' '.join(cats) if cats else '-'}\n" for label, cats in results
        )
    _emit(text, args.out)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fastmobius",
        description="Information decomposition via the fast Mobius transform",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, matrix=False):
        p.add_argument("--out", help="write output to a file instead of stdout")
        p.add_argument("--threads", type=int, default=1, help="parallel workers for matrix builds")
        if matrix:
            p.add_argument("--matrix", help="precomputed matrix file (FMOB1)")

    p = sub.add_parser("lattice", help="list the antichain lattice")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--format", choices=["text", "csv", "json"], default="text")
    common(p)
    p.set_defaults(func=cmd_lattice)

    p = sub.add_parser("mobius", help="build and store the Mobius matrix")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--format", choices=["binary", "text"], default="binary")
    common(p)
    p.set_defaults(func=cmd_mobius)

    def dist_inputs(p):
        p.add_argument("--dist", help="distribution JSON file or canonical:{name}[:n]")
        p.add_argument("--samples", help="samples CSV with a header row")
        p.add_argument("--sources", help="comma-separated source column names")
        p.add_argument("--target", help="target column name")
        p.add_argument("--roles", help="JSON sidecar mapping column name to source/target/ignore")
        p.add_argument("--binarize", choices=["median"], help="binarize sample columns first")
        p.add_argument("--measure", choices=["min", "mmi"], default="mmi")

    p = sub.add_parser("pid", help="full decomposition of a distribution")
    dist_inputs(p)
    p.add_argument("--build-in-memory", action="store_true",
                   help="build the n=5 matrix instead of demanding a file")
    p.add_argument("--format", choices=["text", "csv", "json"], default="text")
    common(p, matrix=True)
    p.set_defaults(func=cmd_pid)

    p = sub.add_parser("synergy", help="top synergy atom via the shortcut (no lattice build)")
    dist_inputs(p)
    p.add_argument("--format", choices=["text", "json"], default="text")
    common(p)
    p.set_defaults(func=cmd_synergy)

    p = sub.add_parser("phiid", help="two-sided decomposition of a symbolic sequence")
    p.add_argument("input", nargs="?", help="sequence CSV: one row per step, k symbol columns")
    p.add_argument("--transitions", help="transition-pair CSV: rows of 2k symbols")
    p.add_argument("--alphabet", type=int, help="symbol alphabet size (default: max+1)")
    p.add_argument("--shuffles", type=int, default=0, help="shuffle-null replicates for bias correction")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--measure", choices=["mmi"], default="mmi")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    common(p, matrix=True)
    p.set_defaults(func=cmd_phiid)

    p = sub.add_parser("classify", help="information-dynamics categories of atoms")
    p.add_argument("atoms", nargs="+", help="atom labels like '(123)->(4)'")
    p.add_argument("--n", type=int, help="channel count (default: inferred)")
    p.add_argument("--format", choices=["text", "json"], default="text")
    common(p)
    p.set_defaults(func=cmd_classify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
