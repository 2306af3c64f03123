"""Command-line interface: ``youngwalls count|sequence|sample|verify|dist|stats``.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 capacity error.
"""

from __future__ import annotations

import argparse
import json
import sys
import tempfile
import time
from fractions import Fraction
from itertools import combinations
from pathlib import Path

from . import formulas, stats
from .density import (
    block_elements,
    block_poset,
    cache_path_for,
    count_fillings,
    default_cache_dir,
    derive_kernel,
    iterate_recurrence,
    load_tower,
    polyo_2nx3_block,
    polyo_2nx3_reference_kernel,
    save_tower,
)
from .errors import ConsistencyError, UsageError, YoungWallsError
from .kernels import BACKEND
from .models import MODELS, get_model
from .sampler import Sampler, make_rng, render_ascii, sample_record, sample_wall_counts
from .shapes import (
    build_poset,
    enumerate_fillings,
    polyomino_shape,
    tableau_shape,
    vertical_walls_shape,
)


def _log(args, msg: str):
    if getattr(args, "verbose", False):
        print(msg, file=sys.stderr)


def _cache_file(args, block) -> Path | None:
    if getattr(args, "no_cache", False):
        return None
    target = Path(args.cache) if args.cache else default_cache_dir()
    if target.suffix == ".json":
        return target
    return cache_path_for(block, target)


def obtain_tower(args, block, n: int):
    """Load what the cache holds, extend it to depth ``n``, save if extended."""
    path = _cache_file(args, block)
    cached = path is not None and path.exists()
    tower = None
    t0 = time.perf_counter()
    if cached:
        tower = load_tower(path, block)
        _log(args, f"cache: loaded levels 0..{tower.depth} from {path} ({time.perf_counter() - t0:.3f} s)")
    before = tower.depth if tower is not None else 0
    t1 = time.perf_counter()
    tower = iterate_recurrence(block, n, tower)
    built = tower.depth - before
    _log(args, f"tower: computed {built} new levels ({time.perf_counter() - t1:.3f} s)")
    if path is not None and (built or not cached):
        save_tower(tower, path)
        _log(args, f"cache: wrote levels 0..{tower.depth} to {path}")
    return tower


# -- commands ----------------------------------------------------------------


def cmd_count(args) -> int:
    model = get_model(args.model)
    t0 = time.perf_counter()
    if args.method == "formula":
        value = model.formula_count(args.n, args.m)
    elif args.method == "oracle":
        value = stats.oracle_count(model, args.n, args.m)
    else:
        if model.block is None:
            raise UsageError(f"model {model.name} has no density block; try --method formula or oracle")
        model.check_n(args.n)
        value = count_fillings(obtain_tower(args, model.block, args.n), args.n).count
    meta = {
        "model": model.name,
        "n": args.n,
        "m": args.m,
        "method": args.method,
        "count": str(value),
        "seconds": round(time.perf_counter() - t0, 6),
    }
    print(value)
    print(json.dumps(meta))
    return 0


def cmd_sequence(args) -> int:
    model = get_model(args.model)
    if model.block is None:
        raise UsageError(f"model {model.name} has no density block")
    if args.max_n < 0:
        raise UsageError("--max-n must be non-negative")
    tower = obtain_tower(args, model.block, args.max_n)
    t0 = time.perf_counter()
    for n in range(args.max_n + 1):
        print(count_fillings(tower, n).count)
    _log(args, f"counts: {time.perf_counter() - t0:.3f} s")
    return 0


def _sample_shape(model, n: int, tableau: bool):
    if model.name != "polyo-2nx3":
        return None
    return tableau_shape(n) if tableau else polyomino_shape(n)


def cmd_sample(args) -> int:
    model = get_model(args.model)
    if model.block is None:
        raise UsageError(f"model {model.name} cannot be sampled (no density block)")
    if args.count < 0:
        raise UsageError("--count must be non-negative")
    model.check_n(args.n)
    tower = obtain_tower(args, model.block, args.n)
    sampler = Sampler(tower, args.seed)
    shape = _sample_shape(model, args.n, args.tableau)
    kind = "tableau" if args.tableau else "polyomino"
    out = sys.stdout
    for i in range(args.count):
        s = sampler.tableau(args.n, args.max_attempts) if args.tableau else sampler.polyomino(args.n)
        if args.format == "json":
            out.write(json.dumps(sample_record(model.name, args.n, args.seed, s, shape, kind)) + "\n")
        else:
            if i:
                out.write("\n")
            out.write(f"# {kind} {i + 1} (n={args.n}, seed={args.seed})\n")
            if shape is not None:
                out.write(render_ascii(shape, s.by_cell()) + "\n")
            else:
                for e, lab in sorted(s.filling.items(), key=lambda kv: kv[1]):
                    out.write(f"{lab:>4}  {e[0]}@{e[1]}\n")
    if args.tableau:
        _log(args, f"rejection: {sampler.accepted} accepted of {sampler.attempts} attempts")
    return 0


def _fraction(p: Fraction) -> str:
    return f"{p.numerator}/{p.denominator}"


def cmd_dist(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    pmf = formulas.wall_count_pmf(args.n)
    report = None
    if args.empirical:
        counts = sample_wall_counts(args.n, args.empirical, make_rng(args.seed))
        report = stats.wall_distribution_check(args.n, counts)
    if args.format == "json":
        data = {"n": args.n, "pmf": [_fraction(p) for p in pmf]}
        if report is not None:
            data["empirical"] = report.to_json()
        print(json.dumps(data))
    else:
        for k, p in enumerate(pmf):
            print(f"{k}\t{_fraction(p)}")
        if report is not None:
            print(report.table())
    return 0 if report is None or report.passed else 1


def _records_to_fillings(records):
    first = records[0]
    key = (first["model"], first["n"], first.get("kind", "polyomino"))
    for r in records:
        if (r["model"], r["n"], r.get("kind", "polyomino")) != key:
            raise UsageError("all samples must share model, n and kind")
    model_name, n, kind = key
    samples = []
    if isinstance(first["labels"], dict):
        model = get_model(model_name)
        names = {f"{e[0]}@{e[1]}": e for e in block_elements(model.block, n)}
        for r in records:
            samples.append({names[k]: v for k, v in r["labels"].items()})
        return samples, enumerate_fillings(block_poset(model.block, n))
    for r in records:
        off = r.get("row_offset", 0)
        cells = {}
        for i, row in enumerate(r["labels"]):
            for c, lab in enumerate(row):
                if lab is not None:
                    cells[(i + off, c)] = lab
        samples.append(cells)
    if model_name != "polyo-2nx3":
        raise UsageError(f"no outcome enumeration for model {model_name}")
    shape = tableau_shape(n) if kind == "tableau" else polyomino_shape(n)
    return samples, enumerate_fillings(build_poset(shape))


def cmd_stats(args) -> int:
    fh = sys.stdin if args.input == "-" else open(args.input)
    with fh:
        records = [json.loads(line) for line in fh if line.strip()]
    if not records:
        raise UsageError("no samples on input")
    samples, fillings = _records_to_fillings(records)
    report = stats.uniformity_test(samples, fillings)
    if args.format == "json":
        print(json.dumps(report.to_json()))
    else:
        verdict = "accepted" if report.accepted else "REJECTED"
        print(f"uniformity {verdict}: p = {report.p_value:.4g} ({report.method} test, "
              f"{report.samples} samples, {report.outcomes} outcomes, alpha {report.alpha})")
    return 0 if report.accepted else 1


# -- verify -----------------------------------------------------------------


def _table_check(table):
    if table.ok:
        return True, f"{len(table.rows)} rows agree"
    return False, table.failure_report()


def _identities(full: bool):
    bad = []
    for n in range(1, (50 if full else 20) + 1):
        total = sum(formulas.vertical_walls_count(n, k) for k in range(n + 1))
        if total != formulas.catalan(n) * (2 ** (n + 1) - 1):
            bad.append(f"sum v({n},k)")
        if sum(formulas.wall_count_pmf(n)) != 1:
            bad.append(f"pmf({n})")
    for n in range(1, 13):
        for lam in range(1, n + 1):
            if formulas.lemma_fillings_count(n, lam) != formulas.lemma_fillings_count_rewritten(n, lam):
                bad.append(f"lemma({n},{lam})")
    for n in range(1, 7):
        for k in range(n):
            for hs in combinations(range(1, n), k):
                if formulas.multi_column_walls_count(n, 2, hs) != formulas.first_column_walls_count(n, hs):
                    bad.append(f"m=2 n={n} h={hs}")
    return not bad, ", ".join(bad) or "all identities hold"


def _bijection(full: bool):
    checked = 0
    for n in range(1, (4 if full else 3) + 1):
        seen = set()
        for k in range(n + 1):
            for rows in combinations(range(n), k):
                shape = vertical_walls_shape(n, rows)
                for f in enumerate_fillings(build_poset(shape)):
                    path = formulas.tableau_to_coloured_path(shape, f)
                    back_shape, back = formulas.path_to_tableau(path)
                    if back_shape != shape or back != f or path.red_count != k:
                        return False, f"roundtrip fails at n={n}, walls {rows}"
                    seen.add(path.steps)
                    checked += 1
        if len(seen) != formulas.catalan(n) * (2 ** (n + 1) - 1):
            return False, f"n={n}: {len(seen)} distinct paths"
    return True, f"{checked} fillings round-trip"


def _integrality(full: bool):
    top = 11 if full else 8
    tower = iterate_recurrence(polyo_2nx3_block(), top)
    for n in range(top + 1):
        count_fillings(tower, n)
    return True, f"N! * integral is an integer for n <= {top}"


def _kernel(_full: bool):
    derived = derive_kernel(polyo_2nx3_block())
    if derived == polyo_2nx3_reference_kernel():
        return True, "derived kernel equals the closed form coefficient for coefficient"
    return False, f"derived kernel differs: {derived}"


def _cache_roundtrip(args):
    block = polyo_2nx3_block()
    tower = iterate_recurrence(block, 4)
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "tower.json"
        save_tower(tower, path)
        if load_tower(path, block) != tower:
            return False, "save/load roundtrip changed the tower"
        data = json.loads(path.read_text())
        data["levels"][2]["coeffs"][-1] = "1/1"
        path.write_text(json.dumps(data))
        try:
            load_tower(path, block)
        except ConsistencyError:
            pass
        else:
            return False, "tampered cache was accepted"
    if args.cache:
        target = Path(args.cache)
        if target.suffix != ".json":
            target = cache_path_for(block, target)
        if target.exists():
            try:
                load_tower(target, block)
            except ConsistencyError as exc:
                return False, f"{target}: {exc}"
            return True, f"roundtrip exact, tampering detected, {target} intact"
    return True, "roundtrip exact, tampering detected"


def cmd_verify(args) -> int:
    full = args.suite == "full"
    checks = [
        ("models", lambda: _table_check(stats.cross_validate(n_range=range(0, 5)))),
        ("vertical-walls", lambda: _table_check(stats.reconcile_vertical_walls(5 if full else 4))),
        ("column-walls", lambda: _table_check(
            stats.reconcile_column_walls(5, (3, 4), 26) if full else stats.reconcile_column_walls(4, (3,), 18))),
        ("every-row", lambda: _table_check(stats.reconcile_every_row(24 if full else 16))),
        ("identities", lambda: _identities(full)),
        ("bijection", lambda: _bijection(full)),
        ("integrality", lambda: _integrality(full)),
        ("kernel", lambda: _kernel(full)),
        ("cache", lambda: _cache_roundtrip(args)),
    ]
    results = []
    for name, fn in checks:
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except YoungWallsError as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append({"name": name, "passed": ok, "detail": detail,
                         "seconds": round(time.perf_counter() - t0, 3)})
    passed = all(r["passed"] for r in results)
    if args.format == "json":
        print(json.dumps({"suite": args.suite, "backend": BACKEND, "passed": passed, "checks": results}))
    else:
        for r in results:
            print(f"{'PASS' if r['passed'] else 'FAIL'} {r['name']}: {r['detail']} ({r['seconds']} s)")
        print("all checks passed" if passed else "verification FAILED: " +
              ", ".join(r["name"] for r in results if not r["passed"]))
    return 0 if passed else 1


# -- parser -----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="timing and cache details on stderr")
    p = _Parser(
        prog="youngwalls",
        description="Count and sample fillings of tableaux with walls.",
        epilog="exit codes: 0 success, 1 verification failure, 2 usage error, 3 capacity error",
    )
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cache_opts(sp):
        sp.add_argument("--cache", help="tower cache directory or .json file "
                        "(default: $YOUNGWALLS_CACHE_DIR or ~/.cache/youngwalls)")
        sp.add_argument("--no-cache", action="store_true", help="neither read nor write a tower cache")

    models = f"one of {', '.join(MODELS)} or a block .json file"
    sp = sub.add_parser("count", parents=[common], help="exact number of fillings")
    sp.add_argument("--model", required=True, help=models)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, help="number of columns (nxm-rowwalls)")
    sp.add_argument("--method", choices=("formula", "oracle", "density"), default="density")
    cache_opts(sp)
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("sequence", parents=[common], help="f_0..f_max by the density method")
    sp.add_argument("--model", default="polyo-2nx3", help=models)
    sp.add_argument("--max-n", type=int, required=True)
    cache_opts(sp)
    sp.set_defaults(func=cmd_sequence)

    sp = sub.add_parser("sample", parents=[common], help="uniform random fillings")
    sp.add_argument("--model", default="polyo-2nx3", help=models)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--format", choices=("json", "ascii"), default="json")
    kind = sp.add_mutually_exclusive_group()
    kind.add_argument("--tableau", action="store_true", help="reject down to the tableau without the bottom cell")
    kind.add_argument("--polyomino", action="store_true", help="whole shape (default)")
    sp.add_argument("--max-attempts", type=int, default=10**6, help="rejection cap per tableau sample")
    cache_opts(sp)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("verify", parents=[common], help="run the cross-check suite")
    sp.add_argument("--suite", choices=("small", "full"), default="small")
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.add_argument("--cache", help="also check this tower cache file or directory")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("dist", parents=[common], help="distribution of the number of vertical walls")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--empirical", type=int, metavar="SAMPLES", help="also sample this many walled tableaux")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.set_defaults(func=cmd_dist)

    sp = sub.add_parser("stats", parents=[common], help="uniformity test for JSON samples read from a file or stdin")
    sp.add_argument("--input", default="-")
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.set_defaults(func=cmd_stats)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except YoungWallsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except BrokenPipeError:
        return 0
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
