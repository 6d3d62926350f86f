"""
Command-line surface of the toolkit.

Subcommands:
    pe            generator word -> pe text
    mul           product of pe texts
    compile       BS automaton file -> PE-set dump
    member        is a word's element accepted by a BS automaton?
    op            Boolean, product and inverse operations on PE-set dumps
    recog         bounded recognizability of a PE-set dump
    finite-index  bounded finite-index test for a subgroup
    hardness      DFA files -> BS automaton of the hardness reduction
    oracle-check  compiled set vs bounded run enumeration

Exit codes: 0 success or true, 1 false or inconclusive, 2 usage, parse or
mismatch errors, 3 budget exceeded. Results go to stdout, messages to stderr.

Design Decision: dispatch table
- Each subcommand maps to a cmd_* method through COMMAND_CONFIG, the same
  way compile stages are dispatched
- Handlers only parse, call the library and format
"""

import argparse
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, TextIO

from django.conf import settings

from .bs_automata import parse_bs_automaton
from .compile_engine import CompileEngine
from .decisions import has_finite_index_bounded, is_recognizable_bounded, parse_generator_list, rational_membership
from .exceptions import (
    AlphabetMismatchError,
    BSToolkitError,
    BudgetExceeded,
    ContextMismatchError,
    InvalidArgumentError,
    NotAPathError,
    ParseError,
)
from .group_core import GeneratorWord, GroupContext
from .hardness import DfaInstance, reduce
from .oracle import window_check
from .pe_regular import PE_SET_OPS, PeSet, boolean, inverse_set, parse_pe_set, product
from .pointed_expansion import decode_text, encode_text

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

UNARY_OPS = ('complement', 'inverse')
BINARY_OPS = tuple(op for op in PE_SET_OPS if op != 'complement') + ('product',)


class CliUsageError(BSToolkitError):
    """Bad command line."""
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliUsageError(message)


@dataclass(frozen=True)
class CliConfig:
    subcommand: str
    q: int
    paths: List[str] = field(default_factory=list)
    max_run: int = 0
    max_pe_len: int = 0
    kmax: Optional[int] = None
    thickness: Optional[int] = None
    materialization_limit: Optional[int] = None
    confirm_run: Optional[int] = None

    def __post_init__(self):
        if self.q < 2:
            raise InvalidArgumentError(f"q must be >= 2, got {self.q}")
        for name in ('max_run', 'max_pe_len', 'kmax', 'thickness', 'materialization_limit', 'confirm_run'):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise InvalidArgumentError(f"--{name.replace('_', '-')} must be nonnegative")

    @classmethod
    def from_namespace(cls, options: argparse.Namespace) -> 'CliConfig':
        paths = getattr(options, 'files', None) or ([options.file] if getattr(options, 'file', None) else [])
        return cls(
            subcommand=options.subcommand,
            q=getattr(options, 'q', None) or settings.BS_DEFAULT_Q,
            paths=list(paths),
            max_run=getattr(options, 'max_run', 0) or 0,
            max_pe_len=getattr(options, 'max_pe_len', 0) or 0,
            kmax=getattr(options, 'kmax', None),
            thickness=getattr(options, 'thickness', None),
            materialization_limit=getattr(options, 'materialization_limit', None),
            confirm_run=getattr(options, 'confirm_run', None),
        )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='bs', description='Rational subsets of BS(1,q)')
    commands = parser.add_subparsers(dest='subcommand', required=True, parser_class=_Parser)

    def budgets(sub):
        sub.add_argument('--thickness', type=int, help='Run thickness (default |Q| + 2|Q|^2)')
        sub.add_argument('--materialization-limit', type=int, help='Largest Frobenius bound to expand')

    sub = commands.add_parser('pe', help='Encode a generator word')
    sub.add_argument('--q', type=int)
    sub.add_argument('word')

    sub = commands.add_parser('mul', help='Multiply pe texts')
    sub.add_argument('--q', type=int)
    sub.add_argument('elements', nargs='+')

    sub = commands.add_parser('compile', help='Compile a BS automaton')
    sub.add_argument('file')
    sub.add_argument('--stats', action='store_true', help='Per-stage statistics on stderr')
    budgets(sub)

    sub = commands.add_parser('member', help='Rational subset membership')
    sub.add_argument('file')
    sub.add_argument('word')
    budgets(sub)

    sub = commands.add_parser('op', help='Operation on PE-set dumps')
    sub.add_argument('op', choices=UNARY_OPS + BINARY_OPS)
    sub.add_argument('files', nargs='+')

    sub = commands.add_parser('recog', help='Bounded recognizability')
    sub.add_argument('file')
    sub.add_argument('--kmax', type=int)

    sub = commands.add_parser('finite-index', help='Bounded finite-index test')
    sub.add_argument('--q', type=int)
    sub.add_argument('--gens', required=True, help='Generators separated by ";"')
    sub.add_argument('--kmax', type=int)
    budgets(sub)

    sub = commands.add_parser('hardness', help='Reduce DFA intersection nonemptiness')
    sub.add_argument('files', nargs='+')
    sub.add_argument('--q', type=int)

    sub = commands.add_parser('oracle-check', help='Compare compile with bounded enumeration')
    sub.add_argument('file')
    sub.add_argument('--max-run', type=int, default=settings.BS_ORACLE_MAX_RUN)
    sub.add_argument('--max-pe-len', type=int, default=settings.BS_ORACLE_MAX_PE_LEN)
    sub.add_argument('--confirm-run', type=int, help='Deeper run budget for members the window budget misses')
    budgets(sub)
    return parser


class BsCli:

    COMMAND_CONFIG = [
        {'name': 'pe', 'method': 'cmd_pe'},
        {'name': 'mul', 'method': 'cmd_mul'},
        {'name': 'compile', 'method': 'cmd_compile'},
        {'name': 'member', 'method': 'cmd_member'},
        {'name': 'op', 'method': 'cmd_op'},
        {'name': 'recog', 'method': 'cmd_recog'},
        {'name': 'finite-index', 'method': 'cmd_finite_index'},
        {'name': 'hardness', 'method': 'cmd_hardness'},
        {'name': 'oracle-check', 'method': 'cmd_oracle_check'},
    ]

    def __init__(self, stdout: TextIO, stderr: TextIO):
        self.stdout = stdout
        self.stderr = stderr

    def dispatch(self, argv: Sequence[str]) -> int:
        try:
            options = build_parser().parse_args(list(argv))
            config = CliConfig.from_namespace(options)
            method = next(c['method'] for c in self.COMMAND_CONFIG if c['name'] == config.subcommand)
            return getattr(self, method)(options, config)
        except BudgetExceeded as exc:
            detail = f" (gcd={exc.gcd}, bound={exc.bound})" if exc.bound is not None else ''
            self.stderr.write(f"budget exceeded: {exc}{detail}\n")
            return EXIT_BUDGET
        except (CliUsageError, ParseError, ContextMismatchError, AlphabetMismatchError, InvalidArgumentError, NotAPathError) as exc:
            self.stderr.write(f"error: {exc}\n")
            return EXIT_USAGE
        except OSError as exc:
            self.stderr.write(f"error: {exc}\n")
            return EXIT_USAGE
        except SystemExit as exc:
            # --help
            return exc.code or EXIT_OK

    # -------------------------------------------------------------------------
    # Helpers
    # -------------------------------------------------------------------------

    def _read(self, path: str) -> str:
        return Path(path).read_text()

    def _engine(self, config: CliConfig) -> CompileEngine:
        return CompileEngine(thickness=config.thickness, materialization_limit=config.materialization_limit)

    def _verdict(self, verdict) -> int:
        self.stdout.write(verdict.to_text() + '\n')
        return EXIT_OK if verdict.is_recognizable else EXIT_FALSE

    # -------------------------------------------------------------------------
    # Subcommands
    # -------------------------------------------------------------------------

    def cmd_pe(self, options, config: CliConfig) -> int:
        ctx = GroupContext(config.q)
        self.stdout.write(encode_text(ctx, ctx.eval_word(GeneratorWord.from_text(options.word))) + '\n')
        return EXIT_OK

    def cmd_mul(self, options, config: CliConfig) -> int:
        ctx = GroupContext(config.q)
        result = ctx.product(decode_text(ctx, text) for text in options.elements)
        self.stdout.write(encode_text(ctx, result) + '\n')
        return EXIT_OK

    def cmd_compile(self, options, config: CliConfig) -> int:
        automaton = parse_bs_automaton(self._read(options.file))
        result = self._engine(config).run(automaton)
        self.stdout.write(result.pe_set.dump())
        if options.stats:
            self.stderr.write(json.dumps(result.stats, indent=2, sort_keys=True, default=str) + '\n')
        return EXIT_OK

    def cmd_member(self, options, config: CliConfig) -> int:
        automaton = parse_bs_automaton(self._read(options.file))
        accepted = rational_membership(automaton, options.word, config.thickness)
        self.stdout.write(f"{'true' if accepted else 'false'}\n")
        return EXIT_OK if accepted else EXIT_FALSE

    def cmd_op(self, options, config: CliConfig) -> int:
        return self.run_op(options.op, [parse_pe_set(self._read(path)) for path in options.files])

    def run_op(self, op: str, sets: List[PeSet]) -> int:
        arity = 1 if op in UNARY_OPS else 2
        if len(sets) != arity:
            raise CliUsageError(f"op {op} takes {arity} file(s), got {len(sets)}")
        if op == 'complement':
            result = boolean(sets[0], None, op)
        elif op == 'inverse':
            result = inverse_set(sets[0])
        elif op == 'product':
            result = product(sets[0], sets[1])
        else:
            result = boolean(sets[0], sets[1], op)
        self.stdout.write(result.dump())
        return EXIT_OK

    def cmd_recog(self, options, config: CliConfig) -> int:
        pe_set = parse_pe_set(self._read(options.file))
        return self._verdict(is_recognizable_bounded(pe_set, config.kmax))

    def cmd_finite_index(self, options, config: CliConfig) -> int:
        ctx = GroupContext(config.q)
        generators = parse_generator_list(options.gens)
        return self._verdict(has_finite_index_bounded(ctx, generators, config.kmax, config.thickness))

    def cmd_hardness(self, options, config: CliConfig) -> int:
        inst = DfaInstance.from_texts([self._read(path) for path in options.files])
        self.stdout.write(reduce(inst, GroupContext(config.q)).to_text())
        return EXIT_OK

    def cmd_oracle_check(self, options, config: CliConfig) -> int:
        automaton = parse_bs_automaton(self._read(options.file))
        compiled = self._engine(config).run(automaton).pe_set
        report = window_check(
            automaton,
            compiled,
            config.max_run,
            config.max_pe_len,
            fixture=Path(options.file).name,
            confirm_run=config.confirm_run,
        )
        self.stdout.write(report.to_text(automaton.ctx))
        return EXIT_OK if report.passed else EXIT_FALSE


def cmd_dispatch(argv: Sequence[str], stdout: TextIO, stderr: TextIO) -> int:
    """Run one subcommand; returns the exit code."""
    return BsCli(stdout, stderr).dispatch(argv)
