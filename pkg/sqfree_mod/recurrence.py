"""Exhaustive checks of recurrence and constructibility of patterns in images of h"""
import functools
import itertools
import logging
import multiprocessing as mp
import random
import time
from math import ceil
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .configs import BAD_PATTERNS_FILE, load_data
from .exceptions import ArgumentError, InsufficientLengthError, VerificationFailure
from .models import (
    AnalyticWitness,
    ConstructibilityCertificate,
    ConstructionWitness,
    LemmaCheck,
    LemmaReport,
    RecurrenceCertificate,
)
from .morphisms import (
    GUIDING_VALUES,
    H_COMMON_PREFIX,
    H_COMMON_SUFFIX,
    apply_h,
    circular_record_checks,
    completion_check_holds,
    default_square_free_word,
    enumerate_h26_factors,
    h_image,
    load_circular_morphisms,
    load_completion_checks,
    r_complete,
)
from .words import (
    ALPHABET,
    Pattern,
    check_word,
    complement,
    distinct_factor_count,
    is_squarefree,
    make_constraint_pattern,
    rotate,
    square_free_words,
)

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name

# Square-free words of length 6 starting with 01; every other one is a
# letter permutation of one of them.
CANONICAL_LENGTH_SIX_WORDS = (
    '010201',
    '010210',
    '010212',
    '012010',
    '012021',
    '012101',
    '012102',
)

SQUARE_FREE_PAIRS = tuple(a + b for a in ALPHABET for b in ALPHABET if a != b)

# Witnesses of the direct construction replayed from scratch.
REPLAYS = 50
REPLAY_SEED = 0


def pair_pattern(first: str, delta: int, second: str) -> Pattern:
    """first <>^delta second"""
    return make_constraint_pattern(
        [(first, delta), (second, 0)], label=f'{first}<{delta}>{second}'
    )


def forbidden_pair_pattern(first: str, delta: int, second: str) -> Pattern:
    """!first <>^delta !second"""
    return make_constraint_pattern(
        [(complement(first), delta), (complement(second), 0)],
        label=f'!{first}<{delta}>!{second}',
    )


def triple_pattern(first: str, delta: int, middle: str, last: str) -> Pattern:
    """!first <>^delta middle <>^delta !last"""
    return make_constraint_pattern(
        [(complement(first), delta), (middle, delta), (complement(last), 0)],
        label=f'!{first}<{delta}>{middle}<{delta}>!{last}',
    )


def palindrome_pattern(palindrome: bool) -> Pattern:
    """Length-3 words xyx, or xyz with x != z"""
    words = [
        word
        for word in map(''.join, itertools.product(ALPHABET, repeat=3))
        if (word[0] == word[2]) == palindrome
    ]
    return Pattern.from_words(words, label='palindrome' if palindrome else 'non-palindrome')


def p_bad_catalogue() -> List[Pattern]:
    """The triple patterns excluded from the 27-recurrence sweep, for every letter"""
    data = load_data(BAD_PATTERNS_FILE)
    return [
        triple_pattern(
            letter,
            int(row['delta']),
            rotate(letter, int(row['middle_rotation'])),
            rotate(letter, int(row['last_rotation'])),
        )
        for row in data['templates']
        for letter in ALPHABET
    ]


def check_recurrent(pattern: Pattern, delta: int, factor_length: int) -> RecurrenceCertificate:
    """Whether the pattern starts at a position <= delta in every h26 factor of the length"""
    needed = delta + pattern.max_length
    if factor_length < needed:
        raise InsufficientLengthError(
            f'Factor length {factor_length} cannot decide {pattern.label!r} within {delta}'
            f' (needs {needed})'
        )

    factors = sorted(enumerate_h26_factors(factor_length))
    # Only the first delta + |P| letters matter; keep one full factor per prefix.
    prefixes: Dict[str, str] = {}
    for factor in factors:
        prefixes.setdefault(factor[:needed], factor)

    for prefix, factor in prefixes.items():
        position = pattern.first_occurrence(prefix)
        if position is None or position > delta:
            logger.debug('Pattern %s misses the factor %s.', pattern.label, factor)
            return RecurrenceCertificate(
                pattern=pattern,
                delta=delta,
                factor_length=factor_length,
                verdict=False,
                witness=factor,
                factor_count=len(factors),
            )

    return RecurrenceCertificate(
        pattern=pattern,
        delta=delta,
        factor_length=factor_length,
        verdict=True,
        factor_count=len(factors),
    )


def min_recurrence_delta(pattern: Pattern, factor_length: int) -> Optional[int]:
    """Least delta making the pattern (delta, h26)-recurrent, None if a factor lacks the pattern"""
    if factor_length < pattern.max_length:
        raise InsufficientLengthError(
            f'Factor length {factor_length} is shorter than the pattern {pattern.label!r}'
        )
    worst = 0
    for factor in enumerate_h26_factors(factor_length):
        position = pattern.first_occurrence(factor)
        if position is None:
            return None
        worst = max(worst, position)
    return worst


def check_constructible(
    pattern: Pattern, delta: int, preimage_length: int = 2
) -> ConstructibilityCertificate:
    """
    For every square-free pre-image of the length, find the guiding sequence
    putting the pattern earliest. Ties go to the lexicographically smallest
    guiding sequence.
    """
    if preimage_length < 1:
        raise ArgumentError(f'Pre-image length must be positive, got {preimage_length}')

    witnesses: Dict[str, ConstructionWitness] = {}
    for preimage in square_free_words(preimage_length):
        best: Optional[ConstructionWitness] = None
        for gamma in itertools.product(GUIDING_VALUES, repeat=preimage_length):
            position = pattern.first_occurrence(apply_h(preimage, gamma))
            if position is not None and (
                best is None or best.position is None or position < best.position
            ):
                best = ConstructionWitness(preimage, gamma, position)
        witnesses[preimage] = best or ConstructionWitness(
            preimage, (26,) * preimage_length, None
        )

    verdict = all(
        witness.position is not None and witness.position <= delta
        for witness in witnesses.values()
    )
    return ConstructibilityCertificate(
        pattern=pattern,
        delta=delta,
        preimage_length=preimage_length,
        witnesses=witnesses,
        verdict=verdict,
    )


@functools.lru_cache(maxsize=None)
def cached_certificate(
    pattern: Pattern, delta: int, preimage_length: int = 2
) -> ConstructibilityCertificate:
    return check_constructible(pattern, delta, preimage_length)


def replay_witness(pattern: Pattern, witness: ConstructionWitness) -> bool:
    """Whether the witness guiding sequence puts the pattern at the recorded position"""
    if witness.position is None:
        return False
    return pattern.first_occurrence(apply_h(witness.preimage, witness.gamma)) == witness.position


def constructible_delta16_analytic(
    a: str, b: str, delta: int, preimage: Optional[str] = None
) -> AnalyticWitness:
    """
    Put a <>^delta b at a position <= 2 by shortening the first image only.

    The letter a is at position l <= 2 of h26(t0). Some letter among the
    four following l + delta is b; shortening h26(t0) by that offset moves
    it to l + delta + 1 since the images share a suffix of length 9.
    """
    if delta < 16:
        raise ArgumentError(f'The direct construction needs delta >= 16, got {delta}')
    check_word(a + b)
    if len(a) != 1 or len(b) != 1:
        raise ArgumentError('Expected two letters')

    needed = ceil((delta + 7) / 23) + 1
    if preimage is None:
        preimage = default_square_free_word(needed)
    if len(preimage) < needed or not is_squarefree(preimage):
        raise ArgumentError(f'Need a square-free pre-image of length at least {needed}')

    offset = (int(a) - int(preimage[0])) % 3
    target = offset + delta + 1
    image = apply_h(preimage, [26] * len(preimage))
    for shortening in range(4):
        if image[target + shortening] == b:
            break
    else:
        raise VerificationFailure(
            'No occurrence of the letter within 4 positions',
            {'a': a, 'b': b, 'delta': delta, 'preimage': preimage},
        )

    first_gamma = 26 - shortening
    replay = apply_h(preimage, [first_gamma] + [26] * (len(preimage) - 1))
    if replay[offset] != a or replay[target] != b:
        raise VerificationFailure(
            'Shortened image does not carry the pattern',
            {'a': a, 'b': b, 'delta': delta, 'preimage': preimage, 'gamma0': first_gamma},
        )
    return AnalyticWitness(a, b, delta, preimage, first_gamma, offset)


@functools.lru_cache(maxsize=None)
def analytic_certificate(a: str, b: str, delta: int) -> ConstructibilityCertificate:
    """(2, h)-constructibility of a <>^delta b, from the shortened first image"""
    pattern = pair_pattern(a, delta, b)
    preimage_length = ceil((delta + 7) / 23) + 1
    witnesses = {}
    for preimage in square_free_words(preimage_length):
        analytic = constructible_delta16_analytic(a, b, delta, preimage)
        gamma = (analytic.first_gamma,) + (26,) * (preimage_length - 1)
        witnesses[preimage] = ConstructionWitness(
            preimage, gamma, pattern.first_occurrence(apply_h(preimage, gamma))
        )
    verdict = all(
        witness.position is not None and witness.position <= 2
        for witness in witnesses.values()
    )
    return ConstructibilityCertificate(
        pattern=pattern,
        delta=2,
        preimage_length=preimage_length,
        witnesses=witnesses,
        verdict=verdict,
    )


def _recurrence_failure(
    task: Tuple[Pattern, int, int]
) -> Optional[str]:
    pattern, delta, factor_length = task
    certificate = check_recurrent(pattern, delta, factor_length)
    return None if certificate.verdict else f'{pattern.label}: {certificate.witness}'


def _constructible_failure(task: Tuple[Pattern, int, int]) -> Optional[str]:
    pattern, delta, preimage_length = task
    certificate = check_constructible(pattern, delta, preimage_length)
    if not certificate.verdict:
        worst = next(
            witness
            for witness in certificate.witnesses.values()
            if witness.position is None or witness.position > delta
        )
        return f'{pattern.label}: {worst.preimage}'
    for witness in certificate.witnesses.values():
        if not replay_witness(pattern, witness):
            return f'{pattern.label}: replay failed on {witness.preimage}'
    return None


def _sweep(
    worker: Callable[[Tuple[Pattern, int, int]], Optional[str]],
    tasks: Sequence[Tuple[Pattern, int, int]],
    threads: int,
) -> List[str]:
    """Run the worker on every task; failures come back in task order"""
    if threads > 1 and len(tasks) > 1:
        with mp.Pool(threads) as pool:
            results = list(pool.imap(worker, tasks))
    else:
        results = [worker(task) for task in tasks]
    return [failure for failure in results if failure]


class LemmaSuite:
    """The computer-checked lemma constants, each under a stable name"""

    def __init__(
        self,
        threads: int = 1,
        factor_lengths: Optional[Dict[str, int]] = None,
        include_p_bad: bool = False,
        h_preimage_length: int = 5,
        analytic_deltas: Iterable[int] = range(16, 41),
    ) -> None:
        self.threads = threads
        self.factor_lengths = dict(factor_lengths or {})
        self.include_p_bad = include_p_bad
        self.h_preimage_length = h_preimage_length
        self.analytic_deltas = tuple(analytic_deltas)
        self.checks: Dict[str, Tuple[str, Callable[[], LemmaCheck]]] = {
            'ab-recurrent-12': ('ab is (12, h26)-recurrent', self._ab_recurrent),
            'a-delta-b-recurrent-27': (
                'a<d>b is (27, h26)-recurrent for d in {1,2,4,...,8}',
                self._a_delta_b_recurrent,
            ),
            'forbidden-pair-recurrent-6': (
                '!a<d>!b is (6, h26)-recurrent for d <= 17',
                self._forbidden_pair_recurrent,
            ),
            'triple-recurrent-27': (
                '!a<d>b<d>!c outside the bad patterns is (27, h26)-recurrent for d <= 17',
                self._triple_recurrent,
            ),
            'a-3-b-constructible-10': ('a<3>b is (10, h)-constructible', self._a_3_b_constructible),
            'a-delta-b-constructible-8': (
                'a<d>b is (8, h)-constructible for 9 <= d <= 15',
                self._a_delta_b_constructible,
            ),
            'a-delta-b-analytic-2': (
                'a<d>b is (2, h)-constructible for d >= 16',
                self._a_delta_b_analytic,
            ),
            'bad-patterns-constructible-13': (
                'bad triple patterns are (13, h)-constructible',
                self._bad_patterns_constructible,
            ),
            'pairs-recurrent-6': (
                '{u, v} is (6, h26)-recurrent for distinct square-free u, v of length 2',
                self._pairs_recurrent,
            ),
            'palindrome-recurrence': (
                'palindromes start within 3 and non-palindromes within 1',
                self._palindrome_recurrence,
            ),
            'length-8-factors': (
                'square-free words of length 8 have at least 5 factors of length 2',
                self._length_8_factors,
            ),
            'h-structure': (
                'images of h share a prefix of 12 and a suffix of 9',
                self._h_structure,
            ),
            'h-square-free': ('h preserves square-freeness', self._h_square_free),
            'completion-square-free': (
                'the completion rules preserve square-freeness',
                self._completion_square_free,
            ),
            'circular-morphisms': (
                'bundled circular morphisms are square-free modulo p',
                self._circular_morphisms,
            ),
        }

    @property
    def names(self) -> List[str]:
        return list(self.checks)

    def run(self, names: Optional[Iterable[str]] = None) -> LemmaReport:
        selected = list(names) if names is not None else self.names
        unknown = [name for name in selected if name not in self.checks]
        if unknown:
            raise ArgumentError(f'Unknown lemma checks: {unknown}')

        report = LemmaReport()
        for name in selected:
            description, check = self.checks[name]
            logger.info('Checking %s: %s', name, description)
            started = time.perf_counter()
            result = check()
            result.name = name
            result.description = description
            result.seconds = time.perf_counter() - started
            if result.verdict:
                logger.info(
                    '%s passed (%d patterns, %.1fs).', name, result.patterns, result.seconds
                )
            else:
                logger.warning('%s failed on %d patterns.', name, len(result.failures))
            report.checks.append(result)
        return report

    def _length(self, name: str, default: int) -> int:
        return self.factor_lengths.get(name, default)

    def _recurrence_check(
        self, name: str, patterns: Sequence[Pattern], delta: int, default_length: int
    ) -> LemmaCheck:
        factor_length = self._length(name, default_length)
        tasks = [(pattern, delta, factor_length) for pattern in patterns]
        failures = _sweep(_recurrence_failure, tasks, self.threads)
        return LemmaCheck(
            name=name,
            description='',
            verdict=not failures,
            delta=delta,
            factor_length=factor_length,
            patterns=len(patterns),
            failures=failures,
        )

    def _constructible_check(
        self, name: str, patterns: Sequence[Pattern], delta: int, preimage_length: int = 2
    ) -> LemmaCheck:
        tasks = [(pattern, delta, preimage_length) for pattern in patterns]
        failures = _sweep(_constructible_failure, tasks, self.threads)
        return LemmaCheck(
            name=name,
            description='',
            verdict=not failures,
            delta=delta,
            preimage_length=preimage_length,
            patterns=len(patterns),
            failures=failures,
        )

    def _ab_recurrent(self) -> LemmaCheck:
        patterns = [pair_pattern(a, 0, b) for a in ALPHABET for b in ALPHABET if a != b]
        return self._recurrence_check('ab-recurrent-12', patterns, 12, 40)

    def _a_delta_b_recurrent(self) -> LemmaCheck:
        patterns = [
            pair_pattern(a, delta, b)
            for delta in (1, 2, 4, 5, 6, 7, 8)
            for a in ALPHABET
            for b in ALPHABET
        ]
        return self._recurrence_check('a-delta-b-recurrent-27', patterns, 27, 40)

    def _forbidden_pair_recurrent(self) -> LemmaCheck:
        patterns = [
            forbidden_pair_pattern(a, delta, b)
            for delta in range(18)
            for a in ALPHABET
            for b in ALPHABET
        ]
        return self._recurrence_check('forbidden-pair-recurrent-6', patterns, 6, 30)

    def _triple_recurrent(self) -> LemmaCheck:
        bad = set(p_bad_catalogue())
        patterns = [
            triple_pattern(a, delta, b, c)
            for delta in range(18)
            for a in ALPHABET
            for b in ALPHABET
            for c in ALPHABET
        ]
        if not self.include_p_bad:
            patterns = [pattern for pattern in patterns if pattern not in bad]
        return self._recurrence_check('triple-recurrent-27', patterns, 27, 70)

    def _a_3_b_constructible(self) -> LemmaCheck:
        patterns = [pair_pattern(a, 3, b) for a in ALPHABET for b in ALPHABET]
        return self._constructible_check('a-3-b-constructible-10', patterns, 10)

    def _a_delta_b_constructible(self) -> LemmaCheck:
        patterns = [
            pair_pattern(a, delta, b)
            for delta in range(9, 16)
            for a in ALPHABET
            for b in ALPHABET
        ]
        return self._constructible_check('a-delta-b-constructible-8', patterns, 8)

    def _a_delta_b_analytic(self) -> LemmaCheck:
        failures = []
        witnesses: List[Tuple[Pattern, ConstructionWitness]] = []
        count = 0
        for delta in self.analytic_deltas:
            for a, b in itertools.product(ALPHABET, repeat=2):
                count += 1
                try:
                    certificate = analytic_certificate(a, b, delta)
                except VerificationFailure as error:
                    failures.append(f'{a}<{delta}>{b}: {error}')
                    continue
                failures.extend(
                    f'{a}<{delta}>{b}: position {witness.position} on {witness.preimage}'
                    for witness in certificate.witnesses.values()
                    if witness.position is None or witness.position > 2
                )
                witnesses.extend(
                    (certificate.pattern, witness) for witness in certificate.witnesses.values()
                )

        sample = random.Random(REPLAY_SEED).sample(witnesses, min(REPLAYS, len(witnesses)))
        failures.extend(
            f'{pattern.label}: replay failed on {witness.preimage}'
            for pattern, witness in sample
            if not replay_witness(pattern, witness)
        )
        return LemmaCheck(
            name='a-delta-b-analytic-2',
            description='',
            verdict=not failures,
            delta=2,
            patterns=count,
            failures=failures,
        )

    def _bad_patterns_constructible(self) -> LemmaCheck:
        return self._constructible_check('bad-patterns-constructible-13', p_bad_catalogue(), 13)

    def _pairs_recurrent(self) -> LemmaCheck:
        patterns = [
            Pattern.from_words([u, v], label=f'{{{u},{v}}}')
            for u, v in itertools.combinations(SQUARE_FREE_PAIRS, 2)
        ]
        return self._recurrence_check('pairs-recurrent-6', patterns, 6, 30)

    def _palindrome_recurrence(self) -> LemmaCheck:
        failures = []
        words = list(square_free_words(6))
        for word in words:
            if not any(word[j] == word[j + 2] for j in range(4)):
                failures.append(f'no palindrome start in {word}')
            if not any(word[j] != word[j + 2] for j in range(2)):
                failures.append(f'no non-palindrome start in {word}')
        canonical = sorted(word for word in words if word.startswith('01'))
        if tuple(canonical) != CANONICAL_LENGTH_SIX_WORDS:
            failures.append(f'unexpected words with prefix 01: {canonical}')
        return LemmaCheck(
            name='palindrome-recurrence',
            description='',
            verdict=not failures,
            patterns=len(words),
            failures=failures,
        )

    def _length_8_factors(self) -> LemmaCheck:
        words = list(square_free_words(8))
        failures = [word for word in words if distinct_factor_count(word, 2) < 5]
        return LemmaCheck(
            name='length-8-factors',
            description='',
            verdict=not failures,
            patterns=len(words),
            failures=failures,
        )

    def _h_structure(self) -> LemmaCheck:
        failures = []
        for letter in ALPHABET:
            images = {gamma: h_image(letter, gamma) for gamma in GUIDING_VALUES}
            for gamma, image in images.items():
                if len(image) != gamma or not is_squarefree(image):
                    failures.append(f'h{gamma}({letter})')
            # Shared by all four images; some pairs share more.
            pairs = list(itertools.combinations(GUIDING_VALUES, 2))
            prefix = min(_common_prefix(images[first], images[second]) for first, second in pairs)
            suffix = min(
                _common_prefix(images[first][::-1], images[second][::-1])
                for first, second in pairs
            )
            if prefix != H_COMMON_PREFIX or suffix != H_COMMON_SUFFIX:
                failures.append(f'h({letter}): prefix {prefix}, suffix {suffix}')
        return LemmaCheck(
            name='h-structure',
            description='',
            verdict=not failures,
            patterns=12,
            failures=failures,
        )

    def _h_square_free(self) -> LemmaCheck:
        failures = []
        count = 0
        for length in range(1, self.h_preimage_length + 1):
            for word in square_free_words(length):
                for gamma in itertools.product(GUIDING_VALUES, repeat=length):
                    count += 1
                    if not is_squarefree(apply_h(word, gamma)):
                        failures.append(f'{word} {gamma}')
        return LemmaCheck(
            name='h-square-free',
            description='',
            verdict=not failures,
            preimage_length=self.h_preimage_length,
            patterns=count,
            failures=failures,
        )

    def _completion_square_free(self) -> LemmaCheck:
        failures = []
        count = 0
        for length in range(2, 13):
            for word in square_free_words(length):
                count += 1
                completed = r_complete(word)
                if not is_squarefree(completed) or completed[::6] != word[:-1]:
                    failures.append(word)
        words, max_period, max_start = load_completion_checks()
        failures.extend(
            f'finite check {word}'
            for word in words
            if not completion_check_holds(word, max_period, max_start)
        )
        return LemmaCheck(
            name='completion-square-free',
            description='',
            verdict=not failures,
            patterns=count + len(words),
            failures=failures,
        )

    def _circular_morphisms(self) -> LemmaCheck:
        failures = []
        records = load_circular_morphisms()
        for record in records:
            checks = circular_record_checks(record)
            failures.extend(f'p={record.p}: {name}' for name, ok in checks.items() if not ok)
        return LemmaCheck(
            name='circular-morphisms',
            description='',
            verdict=not failures,
            patterns=len(records),
            failures=failures,
        )


def _common_prefix(first: str, second: str) -> int:
    return next(
        (i for i, (x, y) in enumerate(zip(first, second)) if x != y),
        min(len(first), len(second)),
    )


def reproduce_lemma_constants(
    names: Optional[Iterable[str]] = None,
    threads: int = 1,
    strict: bool = False,
    **options,
) -> LemmaReport:
    """Run the lemma checks; with `strict`, raise on the first failing report"""
    report = LemmaSuite(threads=threads, **options).run(names)
    if strict and not report.verdict:
        raise VerificationFailure(
            'Lemma checks failed',
            {check.name: check.failures[:5] for check in report.failed()},
        )
    return report
