"""Command line interface of sqfree-mod"""
import argparse
import logging
import random
import sys
import time
from math import gcd
from signal import SIGINT, SIGTERM, Signals, signal
from threading import Event
from types import FrameType
from typing import Callable, Dict, List, NoReturn, Optional, Sequence, TextIO, Tuple

from .configs import SETTINGS_PATH, Settings, load_settings
from .constructors import (
    LARGE_PAIR_MAX_AT_LEAST,
    LARGE_PAIR_MIN,
    P6_Q_MIN,
    build_from_record,
    build_large_pq_word,
    build_p6_word,
)
from .exceptions import (
    ArgumentError,
    PreconditionError,
    ResourceLimitError,
    VerificationFailure,
    WordFormatError,
)
from .models import PairVerdict, RunReport, SearchStatus
from .morphisms import (
    apply,
    circular_morphism_for,
    format_morphism,
    read_morphism_file,
)
from .recurrence import LemmaSuite, reproduce_lemma_constants
from .search import (
    backtrack,
    classify_pair,
    count_unresolved_pairs,
    count_words,
    mine_pansiot,
    verify_positive_morphism,
)
from .words import (
    is_squarefree,
    random_square_free_word,
    read_words,
    satisfies_star,
    square_free_words,
    subsequence,
    write_words,
)

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s:%(levelname)-7s:%(message)s',
    datefmt='%Y-%m-%d %H:%M:%S',
)

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_LIMIT = 2
EXIT_USAGE = 64
EXIT_DATA = 65

# Counts up to this length are re-derived by brute force before they are reported.
RECOUNT_LENGTH = 8

# Images of random square-free words checked after a morphism is certified.
SPOT_CHECKS = 20
SPOT_CHECK_LENGTH = 30
SPOT_CHECK_SEED = 0

Handler = Callable[[argparse.Namespace, Settings, Optional[Event]], Tuple[int, RunReport]]


class _ArgumentParser(argparse.ArgumentParser):
    """Raise instead of exiting, so usage errors get their own exit code"""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        raise ArgumentError(message)


def verify_word(word: str, p: int, q: int) -> Dict[str, bool]:
    """Independent verdicts on one word"""
    return {
        'square_free': is_squarefree(word),
        'square_free_mod_p': is_squarefree(subsequence(word, p)),
        'square_free_mod_q': is_squarefree(subsequence(word, q)),
        'star': satisfies_star(word, p, q),
    }


def _qualifies(verdicts: Dict[str, bool]) -> bool:
    return all(verdicts[key] for key in ('square_free', 'square_free_mod_p', 'square_free_mod_q'))


def verify_word_file(path: str, p: int, q: int) -> List[Dict[str, bool]]:
    """Verdicts for every word of the file"""
    words = read_words(path)
    if not words:
        raise WordFormatError(f'{path} holds no word')
    return [verify_word(word, p, q) for word in words]


def _verify_lemma(
    args: argparse.Namespace, _settings: Settings, _stop_event: Optional[Event]
) -> Tuple[int, RunReport]:
    if args.list:
        names = LemmaSuite().names
        return EXIT_OK, RunReport('verify-lemma', verdict='listed', details={'names': names})
    if not args.all and not args.name:
        raise ArgumentError('verify-lemma needs --all, --name or --list')

    report = reproduce_lemma_constants(
        None if args.all else args.name,
        threads=args.threads,
        h_preimage_length=args.h_preimage_length,
    )
    details = {
        check.name: {
            'description': check.description,
            'verdict': check.verdict,
            'delta': check.delta,
            'factor_length': check.factor_length,
            'preimage_length': check.preimage_length,
            'patterns': check.patterns,
            'failures': check.failures[:5],
        }
        for check in report.checks
    }
    run_report = RunReport(
        'verify-lemma',
        parameters={'names': [check.name for check in report.checks]},
        verdict='pass' if report.verdict else 'fail',
        details=details,
        timings={check.name: check.seconds for check in report.checks},
    )
    return (EXIT_OK if report.verdict else EXIT_FAILURE), run_report


def _verify_morphism(
    args: argparse.Namespace, _settings: Settings, _stop_event: Optional[Event]
) -> Tuple[int, RunReport]:
    morphism, header = read_morphism_file(args.file)
    alpha = args.alpha if args.alpha is not None else header.get('alpha', 0)
    certificate = verify_positive_morphism(morphism, args.p, args.q, alpha)

    if certificate.verdict:
        rng = random.Random(SPOT_CHECK_SEED)
        for _ in range(SPOT_CHECKS):
            word = random_square_free_word(SPOT_CHECK_LENGTH, rng)
            image = apply(morphism, word)[alpha:]
            if not _qualifies(verify_word(image, args.p, args.q)):
                raise VerificationFailure('Certified morphism produced a bad image', {'word': word})

    details = {
        name: {
            'square_free': check.square_free,
            'witness': check.witness,
            'square': list(check.square) if check.square else None,
        }
        for name, check in certificate.checks.items()
    }
    return EXIT_OK, RunReport(
        'verify-morphism',
        parameters={'file': args.file, 'p': args.p, 'q': args.q, 'alpha': alpha},
        verdict='positive' if certificate.verdict else 'rejected',
        evidence_path=args.file,
        details=details,
    )


def choose_method(p: int, q: int) -> str:
    """The first construction whose hypotheses hold for the pair"""
    small, large = sorted((p, q))
    if small == 6 and large >= P6_Q_MIN:
        return 'p6'
    if gcd(p, q) == 1 and small >= LARGE_PAIR_MIN and large >= LARGE_PAIR_MAX_AT_LEAST:
        return 'large'
    record = circular_morphism_for(small)
    if record is not None and large >= record.q_min:
        return 'circular'
    raise PreconditionError(f'No construction applies to ({p}, {q})')


def _construct(
    args: argparse.Namespace, settings: Settings, _stop_event: Optional[Event]
) -> Tuple[int, RunReport]:
    small, large = sorted((args.p, args.q))
    method = choose_method(args.p, args.q) if args.method == 'auto' else args.method
    if args.t and method != 'p6':
        raise ArgumentError(f'--t only applies to the p6 method, not {method}')
    seed = read_words(args.seed)[0] if args.seed else None
    t = read_words(args.t)[0] if args.t else None
    started = time.perf_counter()

    if method == 'large':
        word = build_large_pq_word(args.p, args.q, args.length, s=seed, scan_cap=settings.scan_cap)
    elif method == 'circular':
        record = circular_morphism_for(small)
        if record is None:
            raise PreconditionError(f'No bundled circular morphism for p = {small}')
        word = build_from_record(record, large, args.length, t=seed)
    elif small == 6:
        word = build_p6_word(large, args.length, s=seed, t=t)
    else:
        raise PreconditionError(
            f'The completion construction needs p = 6, got ({args.p}, {args.q})'
        )
    built = time.perf_counter()

    verdicts = verify_word(word, args.p, args.q)
    if not _qualifies(verdicts):
        raise VerificationFailure('Constructed word failed the independent scan', verdicts)
    output = args.output or f'sqfree_{args.p}_{args.q}.txt'
    write_words(output, [word])

    return EXIT_OK, RunReport(
        'construct',
        parameters={'p': args.p, 'q': args.q, 'length': args.length, 'method': method},
        verdict='pass',
        evidence_path=output,
        details=dict(verdicts),
        timings={'construct': built - started, 'verify': time.perf_counter() - built},
    )


def _prove_negative(
    args: argparse.Namespace, settings: Settings, stop_event: Optional[Event]
) -> Tuple[int, RunReport]:
    outcome = backtrack(
        args.p,
        args.q,
        max_length=args.max_len or settings.max_length,
        node_cap=args.node_cap or settings.node_cap,
        relaxed=args.relaxed,
        checkpoint=args.checkpoint,
        checkpoint_every=settings.checkpoint_every,
        stop_event=stop_event,
        threads=args.threads,
    )

    longest = outcome.longest
    recheck = {
        'square_free_mod_p': is_squarefree(subsequence(longest, args.p)),
        'square_free_mod_q': is_squarefree(subsequence(longest, args.q)),
    }
    if not args.relaxed:
        recheck['square_free'] = is_squarefree(longest)
    if not all(recheck.values()):
        raise VerificationFailure('Longest word found does not qualify', recheck)

    terminated = outcome.status is SearchStatus.TERMINATED
    return (EXIT_OK if terminated else EXIT_LIMIT), RunReport(
        'prove-negative',
        parameters={'p': args.p, 'q': args.q, 'relaxed': args.relaxed},
        verdict='negative' if terminated else outcome.status.value,
        evidence_path=args.checkpoint,
        details={
            'status': outcome.status.value,
            'longest': longest,
            'longest_length': outcome.longest_length,
            'nodes_expanded': outcome.nodes_expanded,
        },
    )


def _classify(
    args: argparse.Namespace, _settings: Settings, _stop_event: Optional[Event]
) -> Tuple[int, RunReport]:
    if args.sweep is not None:
        unresolved = count_unresolved_pairs(args.sweep)
        return EXIT_OK, RunReport(
            'classify',
            parameters={'sweep': args.sweep},
            verdict=str(unresolved),
            details={'unresolved_coprime_pairs': unresolved},
        )
    if args.p is None or args.q is None:
        raise ArgumentError('classify needs --p and --q, or --sweep')

    pair = classify_pair(args.p, args.q)
    details = pair.to_dict()
    if pair.implication is not None:
        details['implication'] = pair.implication.describe()
    if pair.verdict is PairVerdict.UNKNOWN:
        logger.info('(%d, %d) is unresolved.', pair.p, pair.q)
    return EXIT_OK, RunReport(
        'classify',
        parameters={'p': args.p, 'q': args.q},
        verdict=pair.verdict.value,
        details=details,
    )


def _mine(
    args: argparse.Namespace, _settings: Settings, _stop_event: Optional[Event]
) -> Tuple[int, RunReport]:
    morphism = mine_pansiot(
        args.p, args.q, iterations=args.iterations, word_budget=args.word_budget
    )
    parameters = {'p': args.p, 'q': args.q}
    if morphism is None:
        return EXIT_LIMIT, RunReport('mine', parameters=parameters, verdict='absent')

    if not verify_positive_morphism(morphism, args.p, args.q).verdict:
        raise VerificationFailure('Mined morphism failed verification', parameters)
    output = args.output or f'morphism_{args.p}_{args.q}.txt'
    with open(output, 'w', encoding='utf-8') as morphism_file:
        morphism_file.write(format_morphism(morphism))
    return EXIT_OK, RunReport(
        'mine',
        parameters=parameters,
        verdict='found',
        evidence_path=output,
        details={'image_length': morphism.image_length},
    )


def _count(
    args: argparse.Namespace, _settings: Settings, _stop_event: Optional[Event]
) -> Tuple[int, RunReport]:
    growth = count_words(args.p, args.q, args.n, threads=args.threads)

    for n in range(1, min(args.n, RECOUNT_LENGTH) + 1):
        recount = sum(
            1 for word in square_free_words(n) if _qualifies(verify_word(word, args.p, args.q))
        )
        if recount != growth.counts[n - 1]:
            raise VerificationFailure(
                'Count differs from the brute force recount',
                {'n': n, 'count': growth.counts[n - 1], 'recount': recount},
            )

    return EXIT_OK, RunReport(
        'count',
        parameters={'p': args.p, 'q': args.q, 'n': args.n},
        verdict=str(growth.counts[-1]),
        details={'counts': growth.counts, 'roots': [round(root, 6) for root in growth.roots]},
    )


def _verify_word(
    args: argparse.Namespace, _settings: Settings, _stop_event: Optional[Event]
) -> Tuple[int, RunReport]:
    results = verify_word_file(args.file, args.p, args.q)
    return EXIT_OK, RunReport(
        'verify-word',
        parameters={'file': args.file, 'p': args.p, 'q': args.q},
        verdict='pass' if all(_qualifies(verdicts) for verdicts in results) else 'fail',
        evidence_path=args.file,
        details={'words': results},
    )


def _add_pair_arguments(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument('--p', type=int, required=required)
    parser.add_argument('--q', type=int, required=required)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog='sqfree-mod',
        description='Ternary square-free words that stay square-free modulo p and q',
    )
    parser.add_argument('--threads', type=int, default=None, help='worker processes')
    parser.add_argument('--format', choices=('json', 'text'), default='text')
    parser.add_argument('--config', default=SETTINGS_PATH, help='settings file')
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('--verbose', action='store_true')
    verbosity.add_argument('--quiet', action='store_true')

    subparsers = parser.add_subparsers(dest='command', required=True)

    lemma = subparsers.add_parser('verify-lemma', help='reproduce the lemma constants')
    lemma.add_argument('--all', action='store_true')
    lemma.add_argument('--name', action='append', default=[])
    lemma.add_argument('--list', action='store_true')
    lemma.add_argument('--h-preimage-length', type=int, default=5)
    lemma.set_defaults(handler=_verify_lemma)

    morphism = subparsers.add_parser('verify-morphism', help='certify a morphism file')
    morphism.add_argument('--file', required=True)
    _add_pair_arguments(morphism)
    morphism.add_argument('--alpha', type=int, default=None)
    morphism.set_defaults(handler=_verify_morphism)

    construct = subparsers.add_parser('construct', help='build a qualifying word')
    _add_pair_arguments(construct)
    construct.add_argument('--length', type=int, required=True)
    construct.add_argument('--seed', help='word file whose first word seeds the construction')
    construct.add_argument(
        '--t', help='word file whose first word is the pre-image under h (p6 method)'
    )
    construct.add_argument(
        '--method', choices=('auto', 'large', 'circular', 'p6'), default='auto'
    )
    construct.add_argument('--output')
    construct.set_defaults(handler=_construct)

    negative = subparsers.add_parser('prove-negative', help='exhaustive backtracking search')
    _add_pair_arguments(negative)
    negative.add_argument('--max-len', type=int)
    negative.add_argument('--node-cap', type=int)
    negative.add_argument('--checkpoint')
    negative.add_argument('--relaxed', action='store_true')
    negative.set_defaults(handler=_prove_negative)

    classify = subparsers.add_parser('classify', help='classify a pair')
    _add_pair_arguments(classify, required=False)
    classify.add_argument('--sweep', type=int, help='count unresolved coprime pairs up to this')
    classify.set_defaults(handler=_classify)

    mine = subparsers.add_parser('mine', help='look for a morphism through Pansiot codes')
    _add_pair_arguments(mine)
    mine.add_argument('--iterations', type=int, default=200)
    mine.add_argument('--word-budget', type=int, default=10**6)
    mine.add_argument('--output')
    mine.set_defaults(handler=_mine)

    count = subparsers.add_parser('count', help='count the qualifying words by length')
    _add_pair_arguments(count)
    count.add_argument('--n', type=int, required=True)
    count.set_defaults(handler=_count)

    word = subparsers.add_parser('verify-word', help='check the words of a file')
    word.add_argument('--file', required=True)
    _add_pair_arguments(word)
    word.set_defaults(handler=_verify_word)

    return parser


def _set_verbosity(args: argparse.Namespace) -> None:
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    elif args.quiet:
        logging.getLogger().setLevel(logging.WARNING)


def _emit(report: RunReport, output_format: str, output: TextIO) -> None:
    print(report.to_json() if output_format == 'json' else report.to_text(), file=output)


def dispatch(
    argv: Optional[Sequence[str]] = None,
    stop_event: Optional[Event] = None,
    output: Optional[TextIO] = None,
) -> Tuple[int, RunReport]:
    """Run one subcommand, emit its report and return the exit code with the report"""
    output = output or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except ArgumentError as error:
        report = RunReport('usage', verdict='usage error', details={'error': str(error)})
        _emit(report, 'text', sys.stderr)
        return EXIT_USAGE, report

    _set_verbosity(args)
    settings = load_settings(args.config)
    if args.threads is None:
        args.threads = settings.threads
    handler: Handler = args.handler

    started = time.perf_counter()
    try:
        code, report = handler(args, settings, stop_event)
    except ArgumentError as error:
        logger.error('%s', error)
        code, report = EXIT_USAGE, RunReport(args.command, verdict='argument error')
        report.details['error'] = str(error)
    except WordFormatError as error:
        logger.error('%s', error)
        code, report = EXIT_DATA, RunReport(args.command, verdict='format error')
        report.details['error'] = str(error)
    except ResourceLimitError as error:
        logger.warning('%s', error)
        code, report = EXIT_LIMIT, RunReport(args.command, verdict='limit reached')
        report.details['error'] = str(error)
    except VerificationFailure as error:
        logger.error('%s', error)
        code, report = EXIT_FAILURE, RunReport(args.command, verdict='verification failed')
        report.details.update(error=str(error), trace={k: str(v) for k, v in error.trace.items()})
    except Exception as error:  # pylint: disable=broad-except
        logger.exception('Command %s failed.', args.command)
        code, report = EXIT_FAILURE, RunReport(args.command, verdict='internal error')
        report.details['error'] = repr(error)

    report.timings['total'] = time.perf_counter() - started
    _emit(report, args.format, output)
    return code, report


def main() -> None:
    """main function"""

    receive_stop = Event()

    def _quit(signo: int, _frame: Optional[FrameType]) -> None:
        print(f'Receive {Signals(signo).name}, quit.')
        receive_stop.set()

    signal(SIGTERM, _quit)
    signal(SIGINT, _quit)

    code, _ = dispatch(sys.argv[1:], receive_stop)
    sys.exit(code)


if __name__ == '__main__':
    main()
