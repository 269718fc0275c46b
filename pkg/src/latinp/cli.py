"""Command-line front end: ``latinp solve|classify|generate|rate|verify``.

Exit codes: 0 success, 1 usage error, 2 parse or validation error,
3 budget exceeded, 4 a ``verify`` check failed.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from typing import Sequence

from . import catalog
from .fairness import BANDS, UNFAIR, certify_fair, load_rating_config, rate
from .formats import FormatError, parse_board, serialize_board, serialize_proof
from .generator import (
    MINIMAL,
    UNKNOWN,
    ExhaustionRequired,
    GeneratedPuzzle,
    is_critical,
    is_minimal,
    puzzles_from_latin_board,
    single_pass_generate,
)
from .model import PartialLabeledBoard
from .search import SearchConfig, enumerate_solutions
from .solver import NotAPuzzle, Tag, classify, solve_puzzle

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_VERIFY = 4


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        raise _Usage(f"{self.prog}: error: {message}")


class _InputError(Exception):
    pass


def _read(path: str) -> PartialLabeledBoard:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _InputError(f"{path}: {exc.strerror}") from None
    try:
        return parse_board(text)
    except FormatError as exc:
        raise _InputError(f"{path}: {exc}") from None


def _limit(text: str) -> int | None:
    if text.lower() in ("inf", "infinity", "all"):
        return None
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer or 'inf', got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("limit must be at least 1")
    return n


def _multiset(text: str) -> dict[str, int]:
    out: dict[str, int] = {}
    for tok in text.replace(",", " ").split():
        disp, colon, count = tok.rpartition(":")
        if not colon or not disp or not count.isdigit() or int(count) < 1:
            raise argparse.ArgumentTypeError(f"expected <label>:<count>, got {tok!r}")
        out[disp] = int(count)
    if not out:
        raise argparse.ArgumentTypeError("empty multiset")
    return out


def _inscription(text: str) -> dict[int, str]:
    out: dict[int, str] = {}
    for tok in text.replace(",", " ").split():
        cell, eq, disp = tok.partition("=")
        if not eq or not cell.isdigit() or not disp:
            raise argparse.ArgumentTypeError(f"expected <cell>=<label>, got {tok!r}")
        out[int(cell)] = disp
    return out


# -- subcommands -------------------------------------------------------------


def _cmd_solve(args, out) -> int:
    plb = _read(args.file)
    cfg = SearchConfig(
        limit=args.limit,
        nogood_recording=args.nogoods,
        max_nodes=args.max_nodes,
        time_limit=args.time_limit,
        record_proof=args.proof is not None,
    )
    result = enumerate_solutions(plb, cfg, jobs=args.jobs)
    out.write("\n".join(serialize_board(s) for s in result.solutions))
    if args.proof is not None:
        with open(args.proof, "w", encoding="utf-8") as fh:
            for i, proof in enumerate(result.proofs):
                if len(result.proofs) > 1:
                    fh.write(f"# solution {i + 1}\n")
                fh.write(serialize_proof(proof, plb.multiset))
    if args.stats:
        st = result.stats
        print(
            f"solutions={len(result.solutions)} status={result.status} nodes={st.nodes} "
            f"backtracks={st.backtracks} backjumps={st.backjumps} time={st.wall_time:.3f}s",
            file=sys.stderr,
        )
    return EXIT_OK if result.complete else EXIT_BUDGET


def _cmd_classify(args, out) -> int:
    verdict = classify(_read(args.file), max_nodes=args.max_nodes)
    out.write(f"{verdict.tag}\n")
    return EXIT_BUDGET if verdict.tag is Tag.INDETERMINATE else EXIT_OK


def _source_board(args) -> PartialLabeledBoard:
    if args.board:
        base = _read(args.board)
        if args.multiset:
            base = catalog.ripeto(base, args.multiset)
    else:
        base = catalog.parse_family(args.family, args.multiset)
    if args.inscription:
        base = catalog.inscripted(base, args.inscription)
    return base


def _keep(p: GeneratedPuzzle, args) -> bool:
    if args.fair and not p.fair:
        return False
    if args.critical and not p.critical:
        return False
    if args.difficulty and p.rating.band != args.difficulty:
        return False
    return True


def _generate(args, base: PartialLabeledBoard) -> list[GeneratedPuzzle] | None:
    chosen: list[GeneratedPuzzle] = []
    seen: set[tuple[int, ...]] = set()

    def take(batch: list[GeneratedPuzzle]) -> bool:
        for p in batch:
            if p.puzzle.values not in seen and _keep(p, args):
                seen.add(p.puzzle.values)
                chosen.append(p)
                if len(chosen) == args.count:
                    return True
        return False

    if args.single_pass:
        take(single_pass_generate(base, args.seed, max_nodes=args.max_nodes))
        return chosen if len(chosen) == args.count else None
    n = 1
    done = 0
    while True:
        cfg = SearchConfig(
            limit=n,
            instantiation="ascending" if args.seed is None else "random",
            seed=args.seed or 0,
            record_proof=False,
        )
        grids = enumerate_solutions(base, cfg).solutions
        for i in range(done, len(grids)):
            sub_seed = None if args.seed is None else random.Random(f"{args.seed}:{i}").randrange(1 << 31)
            batch = puzzles_from_latin_board(grids[i], seed=sub_seed, require_fair=args.fair)
            # deepest (fewest clues) first
            if take(list(reversed(batch))):
                return chosen
        done = len(grids)
        if done < n or n >= args.max_boards:
            return None
        n = min(2 * n, args.max_boards)


def _describe_comment(p: GeneratedPuzzle) -> list[str]:
    return [
        f"clues={p.clue_count} fair={str(p.fair).lower()} critical={str(p.critical).lower()}",
        f"score={p.rating.score} band={p.rating.band}",
    ]


def _cmd_generate(args, out) -> int:
    try:
        base = _source_board(args)
    except (catalog.CatalogError, KeyError, ValueError) as exc:
        raise _InputError(str(exc)) from None
    try:
        puzzles = _generate(args, base)
    except ExhaustionRequired as exc:
        print(f"latinp: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    if puzzles is None:
        print(f"latinp: fewer than {args.count} matching puzzles within the search budget", file=sys.stderr)
        return EXIT_BUDGET
    texts = [serialize_board(p.puzzle, _describe_comment(p)) for p in puzzles]
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        for i, text in enumerate(texts, start=1):
            path = os.path.join(args.out, f"puzzle-{i:04d}.txt")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
            out.write(path + "\n")
    else:
        out.write("\n".join(texts))
    return EXIT_OK


def _solved(plb: PartialLabeledBoard):
    try:
        return solve_puzzle(plb)
    except NotAPuzzle as exc:
        raise _InputError(str(exc)) from None


def _cmd_rate(args, out) -> int:
    plb = _read(args.file)
    try:
        config = load_rating_config()
    except (OSError, ValueError) as exc:
        raise _InputError(f"rating config: {exc}") from None
    r = rate(_solved(plb).proof, plb, config)
    out.write(f"score {r.score} ({float(r.score):.4f})\n")
    out.write(f"band {r.band}\n")
    for actor, n in r.step_histogram.items():
        out.write(f"steps {actor} {n}\n")
    return EXIT_OK


def _cmd_verify(args, out) -> int:
    plb = _read(args.file)
    verdict = classify(plb, max_nodes=args.max_nodes)
    if verdict.tag is Tag.INDETERMINATE:
        out.write("unique: unknown\n")
        return EXIT_BUDGET
    unique = verdict.tag is Tag.UNIQUE
    out.write(f"unique: {'ok' if unique else 'FAIL'} ({verdict.tag})\n")
    if not unique:
        return EXIT_VERIFY
    failed = False
    budget = False
    if args.fair:
        ok = certify_fair(plb).fair
        failed |= not ok
        out.write(f"fair: {'ok' if ok else 'FAIL'}\n")
    if args.critical:
        ok = is_critical(plb)
        failed |= not ok
        out.write(f"critical: {'ok' if ok else 'FAIL'}\n")
    if args.minimal:
        m = is_minimal(plb, budget=args.budget)
        if m.status == UNKNOWN:
            budget = True
            out.write("minimal: unknown (board exceeds budget)\n")
        else:
            failed |= m.status != MINIMAL
            out.write(f"minimal: {'ok' if m.status == MINIMAL else 'FAIL'}\n")
            if m.witness is not None:
                out.write(serialize_board(m.witness, ["smaller puzzle"]))
    if failed:
        return EXIT_VERIFY
    return EXIT_BUDGET if budget else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="latinp", description="Latin board solver and puzzle generator.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="enumerate completions of a board")
    s.add_argument("file")
    s.add_argument("--limit", type=_limit, default=None, help="number of solutions, or 'inf' (default)")
    s.add_argument("--proof", metavar="OUT", help="write the solving proof(s) here")
    s.add_argument("--stats", action="store_true", help="print search statistics to stderr")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--nogoods", action="store_true", help="enable nogood recording")
    s.add_argument("--max-nodes", type=int, default=None)
    s.add_argument("--time-limit", type=float, default=None, help="seconds")
    s.set_defaults(run=_cmd_solve)

    c = sub.add_parser("classify", help="count completions as 0, 1 or more")
    c.add_argument("file")
    c.add_argument("--max-nodes", type=int, default=None)
    c.set_defaults(run=_cmd_classify)

    g = sub.add_parser("generate", help="generate puzzles")
    src = g.add_mutually_exclusive_group(required=True)
    src.add_argument("--board", metavar="FILE")
    src.add_argument("--family", help="shidoku, sudoku, latin:N or sudoku:RxC")
    g.add_argument("--multiset", type=_multiset, help="e.g. '1:2 2:2' for repeated labels")
    g.add_argument("--inscription", type=_inscription, help="e.g. '0=1 5=2'")
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--fair", action="store_true")
    g.add_argument("--critical", action="store_true")
    g.add_argument("--difficulty", choices=(*BANDS, UNFAIR))
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--out", metavar="DIR")
    g.add_argument("--single-pass", action="store_true")
    g.add_argument("--max-boards", type=int, default=64, help="solution grids to try at most")
    g.add_argument("--max-nodes", type=int, default=None)
    g.set_defaults(run=_cmd_generate)

    r = sub.add_parser("rate", help="rate a puzzle's difficulty")
    r.add_argument("file")
    r.set_defaults(run=_cmd_rate)

    v = sub.add_parser("verify", help="re-check puzzle properties")
    v.add_argument("file")
    v.add_argument("--fair", action="store_true")
    v.add_argument("--critical", action="store_true")
    v.add_argument("--minimal", action="store_true")
    v.add_argument("--budget", type=int, default=16, help="largest cell count for --minimal")
    v.add_argument("--max-nodes", type=int, default=None)
    v.set_defaults(run=_cmd_verify)
    return p


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "count", 1) < 1 or getattr(args, "jobs", 1) < 1:
            raise _Usage("latinp: error: --count and --jobs must be positive")
        return args.run(args, out)
    except _Usage as exc:
        print(parser.format_usage().rstrip(), file=sys.stderr)
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except _InputError as exc:
        print(f"latinp: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
