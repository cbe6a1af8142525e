"""Command-line entry point: ``sensindex build|ask|search|check|rules``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import index as index_mod
from .checks import check_fixtures
from .config import ConfigError, load_config
from .pipeline import Pipeline, fixture_hashes
from .search import SearchSyntaxError, search

EXIT_OK, EXIT_EMPTY, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sensindex", description="Sense-aware sentence index and question answering.")
    p.add_argument("--config", help="JSON config file (default: the shipped fixtures)")
    p.add_argument("--index", help="index file (overrides the config)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="index a corpus of plain-text documents")
    b.add_argument("corpus", nargs="*", help="UTF-8 text files, one document each")
    b.add_argument("--store-postings", action="store_true", help="write postings instead of rebuilding on load")

    a = sub.add_parser("ask", help="answer a question from the index")
    a.add_argument("question")
    a.add_argument("--explain", action="store_true", help="show the provenance of every matched dependency")
    a.add_argument("--top", type=int, default=5)

    s = sub.add_parser("search", help="constraint search, e.g. 'dep=VARG[DIR](remporter,*) & trait=MIL'")
    s.add_argument("expr")
    s.add_argument("--expanded", action="store_true", help="also search synonyms and derived rewrites")

    sub.add_parser("check", help="validate the fixtures")
    sub.add_parser("rules", help="print the compiled sense-selection rules")
    return p


def _load_index(config, pipeline: Pipeline):
    if not config.index.is_file():
        raise FileNotFoundError(f"no index at {config.index}; run 'sensindex build CORPUS...' first")
    return index_mod.load(config.index, expected_fixtures=pipeline.hashes)


def _provenance(kinds) -> str:
    return "+".join(sorted(kinds)) if kinds else "-"


def cmd_build(config, args) -> int:
    pipeline = Pipeline(config)
    structure, report = pipeline.build(args.corpus)
    index_mod.save(structure, config.index, store_postings=args.store_postings)
    for line in report.lines():
        print(line)
    print(f"index written to {config.index}")
    return EXIT_OK


def cmd_ask(config, args) -> int:
    pipeline = Pipeline(config)
    structure = _load_index(config, pipeline)
    light = pipeline.light(args.question)
    answers = pipeline.ask(args.question, structure)
    if args.explain:
        print("light structure:")
        for line in light.render():
            print(f"  {line}")
        if light.focus_traits:
            print(f"  focus traits: {', '.join(sorted(light.focus_traits))}")
    if not answers:
        print("no answers")
        return EXIT_EMPTY
    for rank, ans in enumerate(answers[: args.top], 1):
        filler = ans.focus_filler[0] if ans.focus_filler else "-"
        print(f"{rank}. score={ans.score:.4f} [{ans.doc_id}#{ans.sentence_index}] {ans.text}")
        print(f"   focus: {filler}")
        if args.explain:
            for step in ans.match_trace:
                got = step.matched or "unmatched"
                print(f"   {step.query.render()} <- {got} [{_provenance(step.provenance)}] w={step.weight:.4f}")
    return EXIT_OK


def cmd_search(config, args) -> int:
    pipeline_hashes = fixture_hashes(config)
    if not config.index.is_file():
        raise FileNotFoundError(f"no index at {config.index}; run 'sensindex build CORPUS...' first")
    structure = index_mod.load(config.index, expected_fixtures=pipeline_hashes)
    records = search(structure, args.expr, expanded=args.expanded)
    if not records:
        print("no matches")
        return EXIT_EMPTY
    for rec in records:
        print(f"[{rec.doc_id}#{rec.sentence_index}] {rec.text}")
    return EXIT_OK


def cmd_check(config, args) -> int:
    failures = check_fixtures(config)
    for f in failures:
        print(f)
    if failures:
        print(f"{len(failures)} check(s) failed")
        return EXIT_USAGE
    print("all fixture checks passed")
    return EXIT_OK


def cmd_rules(config, args) -> int:
    pipeline = Pipeline(config)
    for rule in pipeline.ruleset.all_rules():
        print(rule.describe())
    for w in pipeline.ruleset.warnings:
        print(f"warning: {w}")
    return EXIT_OK


COMMANDS = {"build": cmd_build, "ask": cmd_ask, "search": cmd_search, "check": cmd_check, "rules": cmd_rules}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        config = load_config(args.config, args.index)
        return COMMANDS[args.command](config, args)
    except (ConfigError, SearchSyntaxError, index_mod.IndexFormatError, FileNotFoundError, ValueError) as exc:
        print(f"sensindex: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
