"""Command-line front end: compute, convergence, verify, axioms and export."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .numerics.scalar import Mode, format_scalar
from .operators import (OperatorError, OperatorMatrix, VolterraGrid, format_matrix, read_matrix,
                        summation_matrix, volterra_matrix)
from .snumbers import KIND_ORDER, InconsistencyError, SearchBudget, SNumberKind, report
from .snumbers.axioms import AXIOMS, DEFAULT_AXIOMS, SAMPLERS, axiom_check
from .snumbers import evaluate
from .snumbers.engine import solver_for
from .witnesses import (ApproximantWitness, FactorizationWitness, PigeonholeError,
                        PigeonholeTranscript, WitnessError, build_factorization_discrete,
                        build_factorization_volterra, export_witnesses, parse_witness_file,
                        block_basis, pigeonhole_lower_gelfand, pigeonhole_lower_kolmogorov,
                        rank_one_approximant, to_record, verify_factorization, verify_record)

OUTPUT_DIR_ENV = "SNCERT_OUTPUT_DIR"
CSV_COLUMNS = ["kind", "n", "lower", "upper", "lower_witness_id", "upper_witness_id", "method",
               "heuristic_flag"]
CONVERGENCE_COLUMNS = ["N", "kind", "n", "lower", "upper", "lower_witness_id",
                       "upper_witness_id", "pigeonhole_lower", "family_witness"]

EXIT_OK, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2

log = logging.getLogger("sncert")


class SpecError(ValueError):
    """Bad operator spec, range or flag value."""


@dataclass
class RunConfig:
    command: str
    operator: str | None = None
    matrix: str | None = None
    kinds: list[str] = field(default_factory=list)
    n_min: int = 1
    n_max: int = 1
    dims: list[int] = field(default_factory=list)
    mode: str = "exact"
    seed: int = 0
    workers: int = 1
    candidates: int = SearchBudget.candidates
    refine_rounds: int = SearchBudget.refine_rounds
    output_format: str = "csv"
    extra: dict = field(default_factory=dict)

    def budget(self) -> SearchBudget:
        return SearchBudget(candidates=self.candidates, refine_rounds=self.refine_rounds,
                            seed=self.seed, workers=self.workers)

    def as_json(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# parsing helpers


def parse_operator(spec: str, mode: Mode) -> OperatorMatrix:
    """``summation:N`` or ``volterra:N[:scheme[:p1,p2,...]]``."""
    parts = spec.split(":")
    try:
        if parts[0] == "summation" and len(parts) == 2:
            return summation_matrix(int(parts[1]), mode)
        if parts[0] == "volterra" and 2 <= len(parts) <= 4:
            N = int(parts[1])
            scheme = parts[2] if len(parts) > 2 else "right"
            points = None
            if scheme == "points":
                if len(parts) != 4:
                    raise SpecError("points scheme needs a comma-separated point list")
                from fractions import Fraction
                points = tuple(Fraction(p) for p in parts[3].split(","))
            elif len(parts) == 4:
                raise SpecError(f"scheme {scheme!r} takes no point list")
            return volterra_matrix(VolterraGrid(N, scheme, points), mode)
    except (ValueError, OperatorError, ZeroDivisionError) as exc:
        raise SpecError(f"bad operator spec {spec!r}: {exc}") from None
    raise SpecError(f"bad operator spec {spec!r}; expected summation:N or volterra:N:scheme")


def parse_range(text: str) -> tuple[int, int]:
    """``3`` or ``1..3``."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise SpecError(f"bad n range {text!r}") from None
    if lo < 1 or hi < lo:
        raise SpecError(f"bad n range {text!r}")
    return lo, hi


def parse_kinds(text: str | None) -> list[SNumberKind]:
    if not text or text == "all":
        return list(KIND_ORDER)
    try:
        kinds = [SNumberKind.parse(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise SpecError(str(exc)) from None
    return [k for k in KIND_ORDER if k in kinds]


def parse_dims(text: str) -> list[int]:
    try:
        dims = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise SpecError(f"bad dims list {text!r}") from None
    if not dims or any(d < 1 for d in dims):
        raise SpecError(f"bad dims list {text!r}")
    return sorted(set(dims))


def load_operator(args, mode: Mode) -> OperatorMatrix:
    if bool(args.operator) == bool(args.matrix):
        raise SpecError("give exactly one of --operator or --matrix")
    if args.operator:
        return parse_operator(args.operator, mode)
    try:
        T = read_matrix(args.matrix, None)
    except OSError as exc:
        raise SpecError(f"cannot read {args.matrix}: {exc}") from None
    except OperatorError as exc:
        raise SpecError(f"bad matrix file {args.matrix}: {exc}") from None
    return T.to_mode(mode)


# ---------------------------------------------------------------------------
# serialisation


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return format_matrix(x).rstrip("\n").split("\n")
    if isinstance(x, (FactorizationWitness, ApproximantWitness, PigeonholeTranscript)):
        rec = to_record(x)
        return {"record": rec.kind, "fields": rec.fields,
                "matrices": {k: _jsonable(v) for k, v in rec.matrices.items()}}
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    if hasattr(x, "describe"):
        return x.describe()
    try:
        return format_scalar(x)
    except (TypeError, ValueError):
        return str(x)


def certificate_json(cert) -> dict:
    return {"id": cert.wid, "source": cert.source, "value": format_scalar(cert.value),
            "method": cert.method, "heuristic": cert.heuristic, "data": _jsonable(cert.data)}


def rows_to_csv(rows: list[dict], columns: list[str], config: RunConfig) -> str:
    buf = io.StringIO()
    buf.write("# config " + json.dumps(config.as_json(), sort_keys=True) + "\n")
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def output_dir(args) -> Path | None:
    d = getattr(args, "out", None) or os.environ.get(OUTPUT_DIR_ENV)
    return Path(d) if d else None


def emit(args, stem: str, csv_text: str | None, json_obj) -> None:
    """Print the chosen format and mirror both encodings to the output directory."""
    json_text = dump_json(json_obj)
    if args.format == "json" or csv_text is None:
        sys.stdout.write(json_text)
    else:
        sys.stdout.write(csv_text)
    d = output_dir(args)
    if d is not None:
        d.mkdir(parents=True, exist_ok=True)
        if csv_text is not None:
            (d / f"{stem}.csv").write_text(csv_text)
        (d / f"{stem}.json").write_text(json_text)


def _stem(config: RunConfig) -> str:
    src = config.operator or Path(config.matrix or "matrix").stem
    return f"{config.command}-{src.replace(':', '_').replace(',', '_')}-{config.mode}"


def _inconsistency(exc: InconsistencyError) -> int:
    sys.stderr.write(f"internal inconsistency: {exc}\n")
    sys.stderr.write(dump_json(exc.dump))
    return EXIT_INTERNAL


# ---------------------------------------------------------------------------
# commands


def _config(args, command: str, **kw) -> RunConfig:
    return RunConfig(command=command, operator=getattr(args, "operator", None),
                     matrix=getattr(args, "matrix", None), mode=args.mode, seed=args.seed,
                     workers=args.workers, candidates=args.candidates,
                     refine_rounds=args.refine_rounds,
                     output_format=getattr(args, "format", "csv"), **kw)


def cmd_compute(args) -> int:
    mode = Mode(args.mode)
    n_min, n_max = parse_range(args.n)
    kinds = parse_kinds(args.kinds)
    T = load_operator(args, mode)
    config = _config(args, "compute", kinds=[k.value for k in kinds], n_min=n_min, n_max=n_max)
    try:
        rep = report(T, n_max, config.budget(), kinds=kinds, n_min=n_min)
    except InconsistencyError as exc:
        return _inconsistency(exc)
    rows = rep.rows()
    js = {"config": config.as_json(), "operator": repr(T), "rows": rows,
          "witnesses": [{"kind": iv.kind.value, "n": iv.n,
                         "lower": certificate_json(iv.lower_cert),
                         "upper": certificate_json(iv.upper_cert)} for iv in rep.intervals]}
    emit(args, _stem(config), rows_to_csv(rows, CSV_COLUMNS, config), js)
    if args.export_witnesses:
        ws = _exportable(rep.intervals)
        Path(args.export_witnesses).write_text(export_witnesses(ws))
        log.info("wrote %d witnesses to %s", len(ws), args.export_witnesses)
    return EXIT_OK


def _exportable(intervals) -> list:
    out, seen = [], set()
    for iv in intervals:
        for cert in (iv.lower_cert, iv.upper_cert):
            w = cert.data.get("witness") or cert.data.get("transcript")
            if w is None and cert.source == "approximant" and "F" in cert.data:
                F = cert.data["F"]
                w = ApproximantWitness(F, cert.data.get("rank_bound", iv.n - 1), cert.value)
            if w is not None and id(w) not in seen:
                seen.add(id(w))
                out.append(w)
    return out


def _family(args, N: int, mode: Mode) -> OperatorMatrix:
    fam = args.family
    if fam == "summation":
        return summation_matrix(N, mode)
    if fam.startswith("volterra"):
        scheme = fam.split(":", 1)[1] if ":" in fam else "right"
        return parse_operator(f"volterra:{N}:{scheme}", mode)
    raise SpecError(f"unknown family {fam!r}; expected summation or volterra:scheme")


def _pigeonhole_column(kind: SNumberKind, T: OperatorMatrix, n: int):
    fns = {SNumberKind.GELFAND: [pigeonhole_lower_gelfand],
           SNumberKind.KOLMOGOROV: [pigeonhole_lower_kolmogorov],
           SNumberKind.APPROXIMATION: [pigeonhole_lower_gelfand, pigeonhole_lower_kolmogorov]}
    best = None
    for fn in fns.get(kind, []):
        try:
            v, _ = fn(T, n)
        except PigeonholeError:
            continue
        best = v if best is None or v > best else best
    return best


def _family_witness(kind: SNumberKind, T: OperatorMatrix, n: int):
    """Value of the fixed witness family for ``kind`` on ``T``, or None.

    a: the constant-1/2 rank-one approximant; b: the block subspace;
    i: the discrete factorization. The other kinds have no fixed family.
    """
    N = T.shape[1]
    if kind is SNumberKind.APPROXIMATION and n >= 2:
        return rank_one_approximant(T).deviation
    if kind is SNumberKind.BERNSTEIN and N >= 2 * n - 1:
        return evaluate.bernstein_value(T, block_basis(n, N, T.mode))
    if kind is SNumberKind.ISOMORPHISM and N >= 2 * n - 1:
        chk = verify_factorization(build_factorization_discrete(n, N, T.mode), T)
        return chk.bound if chk.ok else None
    return None


def _monotone(label: str, pairs: list) -> list[str]:
    return [f"{label} drops from N={N0} to N={N1}"
            for (N0, a), (N1, b) in zip(pairs, pairs[1:]) if b < a]


def cmd_convergence(args) -> int:
    mode = Mode(args.mode)
    kind = parse_kinds(args.kind)
    if len(kind) != 1:
        raise SpecError("convergence takes a single --kind")
    kind = kind[0]
    n, n_hi = parse_range(args.n)
    if n != n_hi:
        raise SpecError("convergence takes a single n")
    dims = parse_dims(args.dims)
    config = _config(args, "convergence", kinds=[kind.value], n_min=n, n_max=n, dims=dims,
                     extra={"family": args.family})
    config.operator = args.family
    rows, lowers, pigs, fams = [], [], [], []
    for N in dims:
        T = _family(args, N, mode)
        try:
            iv = solver_for(T, config.budget()).interval(kind, n)
        except InconsistencyError as exc:
            return _inconsistency(exc)
        pig = _pigeonhole_column(kind, T, n)
        fam = _family_witness(kind, T, n)
        rows.append({"N": N, "kind": kind.value, "n": n, "lower": format_scalar(iv.lower),
                     "upper": format_scalar(iv.upper), "lower_witness_id": iv.lower_cert.wid,
                     "upper_witness_id": iv.upper_cert.wid,
                     "pigeonhole_lower": "" if pig is None else format_scalar(pig),
                     "family_witness": "" if fam is None else format_scalar(fam)})
        lowers.append((N, iv.lower))
        if pig is not None:
            pigs.append((N, pig))
        if fam is not None:
            fams.append((N, fam))
    problems = _monotone("pigeonhole lower", pigs) + _monotone("family witness", fams)
    if not kind.inf_type:
        problems += _monotone(f"{kind.value} witness lower", lowers)
    js = {"config": config.as_json(), "rows": rows, "monotone": not problems,
          "problems": problems}
    emit(args, _stem(config), rows_to_csv(rows, CONVERGENCE_COLUMNS, config), js)
    if problems:
        for p in problems:
            sys.stderr.write(f"monotonicity violated: {p}\n")
        return EXIT_INTERNAL
    return EXIT_OK


def cmd_verify(args) -> int:
    mode = Mode(args.mode)
    T = load_operator(args, mode)
    try:
        recs = parse_witness_file(Path(args.witness_file).read_text())
    except OSError as exc:
        raise SpecError(f"cannot read {args.witness_file}: {exc}") from None
    except (WitnessError, ValueError) as exc:
        sys.stderr.write(f"malformed witness file: {exc}\n")
        return EXIT_USAGE
    if not recs:
        sys.stderr.write("malformed witness file: no records\n")
        return EXIT_USAGE
    all_ok = True
    for i, rec in enumerate(recs):
        try:
            ok, msg = verify_record(rec, T)
        except WitnessError as exc:
            sys.stderr.write(f"malformed witness file: record {i}: {exc}\n")
            return EXIT_USAGE
        all_ok &= ok
        print(f"{'ok' if ok else 'FAIL'} {i} {msg}")
    print("all witnesses verified" if all_ok else "verification failed")
    return EXIT_OK if all_ok else EXIT_INTERNAL


def cmd_axioms(args) -> int:
    kinds = parse_kinds(args.kinds)
    axioms = [a.strip().upper() for a in args.axioms.split(",")] if args.axioms else list(
        DEFAULT_AXIOMS)
    bad = [a for a in axioms if a not in AXIOMS]
    if bad:
        raise SpecError(f"unknown axioms {bad}")
    if args.sampler not in SAMPLERS:
        raise SpecError(f"unknown sampler {args.sampler!r}; choose from {sorted(SAMPLERS)}")
    config = _config(args, "axioms", kinds=[k.value for k in kinds],
                     extra={"sampler": args.sampler, "trials": args.trials, "axioms": axioms})
    budget = None
    if args.candidates != SearchBudget.candidates or args.refine_rounds != SearchBudget.refine_rounds:
        budget = config.budget()
    try:
        rep = axiom_check(kinds, args.sampler, args.trials, args.seed, budget=budget,
                          axioms=axioms)
    except InconsistencyError as exc:
        return _inconsistency(exc)
    lines = rep.lines()
    js = {"config": config.as_json(),
          "tallies": {a: {"counts": t.counts, "indeterminate_rate": t.indeterminate_rate,
                          "note": t.note, "failures": t.failures}
                      for a, t in rep.tallies.items()}}
    if args.format == "json":
        sys.stdout.write(dump_json(js))
    else:
        sys.stdout.write("\n".join(lines) + "\n")
    d = output_dir(args)
    if d is not None:
        d.mkdir(parents=True, exist_ok=True)
        (d / f"axioms-{args.sampler}-{args.seed}.json").write_text(dump_json(js))
    return EXIT_OK if rep.ok else EXIT_INTERNAL


def cmd_export(args) -> int:
    mode = Mode(args.mode)
    T = load_operator(args, mode)
    n = args.n
    what = args.witness
    N = T.shape[1]
    try:
        if what == "factorization":
            w = build_factorization_discrete(n, N, mode)
        elif what == "factorization-volterra":
            w = build_factorization_volterra(n, N, mode)
        elif what == "approximant":
            w = rank_one_approximant(T)
        elif what == "pigeonhole-gelfand":
            w = pigeonhole_lower_gelfand(T, n)[1]
        elif what == "pigeonhole-kolmogorov":
            w = pigeonhole_lower_kolmogorov(T, n)[1]
        else:
            raise SpecError(f"unknown witness {what!r}")
    except (WitnessError, OperatorError) as exc:
        raise SpecError(str(exc)) from None
    if w is None:
        raise SpecError(f"no {what} witness for n={n}")
    text = export_witnesses([w])
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parser


def _common(p: argparse.ArgumentParser, operator: bool = True) -> None:
    if operator:
        p.add_argument("--operator", help="summation:N or volterra:N:scheme")
        p.add_argument("--matrix", help="matrix file ('rows cols' header, then entries)")
    p.add_argument("--mode", choices=["exact", "float"], default="exact")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                   help="worker processes for candidate evaluation (default: all CPUs)")
    p.add_argument("--candidates", type=int, default=SearchBudget.candidates)
    p.add_argument("--refine-rounds", type=int, default=SearchBudget.refine_rounds)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", help=f"output directory (default: ${OUTPUT_DIR_ENV} if set)")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sncert", description=__doc__)
    p.add_argument("--version", action="version", version=f"sncert {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="certified intervals for one operator")
    _common(c)
    c.add_argument("--n", default="1..3", help="n or a range lo..hi")
    c.add_argument("--kinds", default="all", help="comma list of kinds or letters a,c,d,b,m,i")
    c.add_argument("--export-witnesses", help="write the exportable witnesses to this file")
    c.set_defaults(fn=cmd_compute)

    v = sub.add_parser("convergence", help="one kind across a list of truncations")
    _common(v, operator=False)
    v.add_argument("--family", default="summation", help="summation or volterra:scheme")
    v.add_argument("--kind", required=True)
    v.add_argument("--n", default="2")
    v.add_argument("--dims", default="2,4,8,16,32,64")
    v.set_defaults(fn=cmd_convergence)

    f = sub.add_parser("verify", help="re-verify an exported witness file")
    f.add_argument("witness_file")
    _common(f)
    f.set_defaults(fn=cmd_verify)

    a = sub.add_parser("axioms", help="interval-level axiom checks on random matrices")
    _common(a, operator=False)
    a.add_argument("--kinds", default="all")
    a.add_argument("--sampler", default="random", help=f"one of {', '.join(SAMPLERS)}")
    a.add_argument("--trials", type=int, default=100)
    a.add_argument("--axioms", default=",".join(DEFAULT_AXIOMS),
                   help="comma list from S1..S6 (S4, S6 are reported unsupported)")
    a.set_defaults(fn=cmd_axioms)

    e = sub.add_parser("export", help="export one witness in the text record format")
    _common(e)
    e.add_argument("--n", type=int, default=2)
    e.add_argument("--witness", default="factorization",
                   choices=["factorization", "factorization-volterra", "approximant",
                            "pigeonhole-gelfand", "pigeonhole-kolmogorov"])
    e.add_argument("--output", help="file to write (default: standard output)")
    e.set_defaults(fn=cmd_export)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "workers", 1) < 1:
        sys.stderr.write("error: --workers must be at least 1\n")
        return EXIT_USAGE
    try:
        return args.fn(args)
    except SpecError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
