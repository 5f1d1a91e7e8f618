"""Command line: ``lsinfer {infer,derive,generate,benchmark,tune}``.

Exit status is 0 on success, 1 when no compatible system was found and 2 on
bad input. Results go to stdout, reports and diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import __version__
from .core import DevSequence, InputError, derive_sequence, format_lsystem, parse_lsystem, parse_sequence
from .encodings import SCHEMES
from .ga import GAConfig, MAX_FITNESS, hyperparameter_search
from .genbench import GeneratorConfig, generate_lsystem, records_json, run_benchmark
from .projection import SOLVED_STATUS, infer
from .reduction import NoSolution, reduce

EXIT_OK, EXIT_NONE, EXIT_INPUT = 0, 1, 2


def _default_seed() -> int:
    raw = os.environ.get("LSINFER_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"LSINFER_SEED must be an integer, got {raw!r}") from None


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _ga_config(args, scheme: str) -> GAConfig:
    cfg = GAConfig.for_scheme(scheme, min_gens=args.min_gens, time_limit=args.time_limit,
                              seed=args.seed if args.seed is not None else _default_seed())
    if args.pop is not None:
        cfg = replace(cfg, pop=args.pop)
    if args.cx is not None:
        cfg = replace(cfg, cx=args.cx)
    if args.mut is not None:
        cfg = replace(cfg, mut=args.mut)
    return cfg


def load_sequence(text: str, constants: str | None) -> DevSequence:
    words, header = parse_sequence(text)
    consts = constants if constants is not None else header
    rho = DevSequence.of(words, consts)
    if consts is not None:
        missing = set(consts) - set("".join(rho.words))
        if missing:
            raise InputError(f"constants {''.join(sorted(missing))!r} are not in the alphabet")
    return rho


def cmd_infer(args) -> int:
    rho = load_sequence(_read(args.file), args.constants)
    cfg = _ga_config(args, args.encoding)
    if args.verbose:
        try:
            print(reduce(rho).dump(), file=sys.stderr)
        except NoSolution as exc:
            print(f"bounds: no solution ({exc})", file=sys.stderr)
    res = infer(rho, scheme=args.encoding, cfg=cfg, queue=args.queue)
    ok = res.status == SOLVED_STATUS
    report = {
        "status": res.status, "encoding": args.encoding, "generations": res.generations,
        "searches": len(res.reports), "partials": res.partials,
        "best_fitness": None if res.best_fitness != res.best_fitness or res.best_fitness >= MAX_FITNESS
        else res.best_fitness,
        "seconds": round(res.wall_time, 3),
    }
    if res.message:
        report["message"] = res.message
    if args.format == "json":
        report["lsystem"] = format_lsystem(res.system) if ok else None
        print(json.dumps(report, indent=2))
    else:
        if ok:
            sys.stdout.write(format_lsystem(res.system))
        else:
            print("none found", file=sys.stderr)
        print(" ".join(f"{k}={v}" for k, v in report.items()), file=sys.stderr)
    return EXIT_OK if ok else EXIT_NONE


def cmd_derive(args) -> int:
    system = parse_lsystem(_read(args.file))
    if args.steps < 0:
        raise InputError("--steps must be >= 0")
    words = [system.axiom] if args.steps == 0 else list(derive_sequence(system, args.steps).words)
    if args.with_constants and system.alphabet.constants:
        print(f"constants: {''.join(system.alphabet.constants)}")
    sys.stdout.write("\n".join(words) + "\n")
    return EXIT_OK


def cmd_generate(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        cfg = GeneratorConfig(size=args.size, constants=args.constants, max_len=args.max_len,
                              seed=seed * 1_000_003 + i)
        text = format_lsystem(generate_lsystem(cfg))
        if out:
            (out / f"gen_v{args.size}_{i:03d}.lsys").write_text(text, encoding="utf-8")
        else:
            if i:
                print()
            sys.stdout.write(text)
    return EXIT_OK


def _sizes(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"--sizes must be comma separated integers, got {text!r}") from None


def cmd_benchmark(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    cfg = _ga_config(args, args.encoding)
    records, summary = run_benchmark(_sizes(args.sizes), args.count, args.encoding,
                                     GeneratorConfig(seed=seed), cfg, jobs=args.jobs)
    if args.format == "json":
        print(records_json(records, summary))
    else:
        print("id\tsize\tscheme\tsolved\tms\tgenerations\tseed")
        for r in records:
            print(r.line())
        if records:
            print(summary.text())
    return EXIT_OK


def cmd_tune(args) -> int:
    suite = Path(args.suite)
    files = sorted(p for p in suite.iterdir() if p.is_file()) if suite.is_dir() else []
    if not files:
        raise InputError(f"no sequence files in {args.suite}")
    seqs = [load_sequence(p.read_text(encoding="utf-8"), None) for p in files]
    base = _ga_config(args, args.encoding)

    def evaluate(cfg):
        t0 = time.perf_counter()
        score = 0.0
        for rho in seqs:
            res = infer(rho, scheme=args.encoding, cfg=cfg)
            if res.status != SOLVED_STATUS:
                best = res.best_fitness
                score += 1.0 + (best if best == best and best < MAX_FITNESS else len(rho.words))
        return score, time.perf_counter() - t0

    cfg, history = hyperparameter_search(evaluate, trials=args.trials, max_rounds=args.max_rounds,
                                         seed=base.seed, base=base)
    print(f"encoding={args.encoding} pop={cfg.pop} cx={cfg.cx} mut={cfg.mut}")
    print(f"trials={len(history)}", file=sys.stderr)
    return EXIT_OK


def _add_ga_flags(p):
    p.add_argument("--encoding", default="ml", choices=SCHEMES)
    p.add_argument("--pop", type=int)
    p.add_argument("--cx", type=float)
    p.add_argument("--mut", type=float)
    p.add_argument("--seed", type=int, help="random seed (default: $LSINFER_SEED or 0)")
    p.add_argument("--time-limit", type=float, default=60.0, help="seconds per inference run")
    p.add_argument("--min-gens", type=int, default=1000)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lsinfer", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("infer", help="infer a D0L-system from a sequence file")
    p.add_argument("file", help="sequence file, one word per line ('-' for stdin)")
    p.add_argument("--constants", help="constant glyphs (default: turtle glyphs present)")
    p.add_argument("--queue", choices=("fifo", "lifo"), default="fifo")
    p.add_argument("--jobs", type=int, default=1, help="accepted for symmetry; inference is sequential")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("-v", "--verbose", action="store_true", help="dump the deduced bounds to stderr")
    _add_ga_flags(p)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("derive", help="print the developmental sequence of an L-system file")
    p.add_argument("file")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--with-constants", action="store_true", help="emit a constants header line")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("generate", help="generate random D0L-systems")
    p.add_argument("--size", type=int, required=True, help="number of nonconstants")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.add_argument("--constants", default="[]+-F")
    p.add_argument("--max-len", type=int, default=10)
    p.add_argument("--out", help="directory for .lsys files (default: stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("benchmark", help="success rate and mean time to solve on generated systems")
    p.add_argument("--sizes", default="5,15,30")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=("text", "json"), default="text")
    _add_ga_flags(p)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("tune", help="random search over population, crossover and mutation")
    p.add_argument("--suite", required=True, help="directory of sequence files")
    p.add_argument("--trials", type=int, default=16)
    p.add_argument("--max-rounds", type=int, default=50)
    _add_ga_flags(p)
    p.set_defaults(func=cmd_tune)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
