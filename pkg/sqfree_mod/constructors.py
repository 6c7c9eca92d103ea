"""Constructions of long square-free words with prescribed subsequences"""
import logging
import os
from bisect import bisect_left
from itertools import accumulate
from math import ceil, gcd
from typing import Dict, List, Optional, Sequence

from sympy.ntheory.modular import crt

from .exceptions import ArgumentError, PreconditionError, ResourceLimitError, VerificationFailure
from .models import ConstructibilityCertificate, CrtOffsets, MorphismRecord, StarConstraint
from .morphisms import (
    COMPLETION_RULES,
    GUIDING_VALUES,
    Morphism,
    apply_h,
    check_guiding_sequence,
    crochemore_test,
    default_square_free_word,
    h_image,
    is_circular,
    modular_morphism,
    morphism_from_record,
)
from .recurrence import (
    analytic_certificate,
    cached_certificate,
    forbidden_pair_pattern,
    p_bad_catalogue,
    pair_pattern,
    palindrome_pattern,
    triple_pattern,
)
from .words import (
    ALPHABET,
    WILDCARD,
    Pattern,
    check_word,
    complement,
    has_square_ending_at,
    is_compatible,
    is_squarefree,
    make_constraint_pattern,
    subsequence,
)

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name

# Letters of h_26(a) also found at the same place in h_gamma(a).
SHARED_PREFIX = {
    gamma: len(os.path.commonprefix([h_image('0', 26), h_image('0', gamma)]))
    for gamma in GUIDING_VALUES
}
COMMON_PREFIX = min(SHARED_PREFIX.values())

LARGE_PAIR_MIN = 331
LARGE_PAIR_MAX_AT_LEAST = 364
P6_Q_MIN = 341
FILL_MIN_GAP = 18
SCAN_CAP = 10_000


class ConstructionState:
    """A square-free pre-image and the guiding sequence of its image under h"""

    def __init__(self, base: str, gamma: Optional[Sequence[int]] = None) -> None:
        check_word(base)
        if not is_squarefree(base):
            raise ArgumentError('The pre-image must be square-free')
        self.base = base
        self.gamma: List[int] = (
            list(check_guiding_sequence(gamma)) if gamma is not None else [26] * len(base)
        )
        if len(self.gamma) != len(base):
            raise ArgumentError('The guiding sequence must be as long as the pre-image')
        self.origin = 0
        self.satisfied_upto = -1
        self._word: Optional[str] = None
        self._offsets: Optional[List[int]] = None

    @classmethod
    def for_length(
        cls, length: int, first_letter: str = '0', base: Optional[str] = None
    ) -> 'ConstructionState':
        """A state whose image has at least `length` letters after any contraction"""
        needed = ceil(length / 23) + 8
        if base is None:
            base = default_square_free_word(needed, first_letter)
        elif len(base) < needed:
            raise ArgumentError(f'The pre-image needs at least {needed} letters, got {len(base)}')
        elif base[0] != first_letter:
            raise ArgumentError(f'The pre-image must start with {first_letter}')
        return cls(base)

    @property
    def word(self) -> str:
        if self._word is None:
            self._word = apply_h(self.base, self.gamma)
        return self._word

    @property
    def offsets(self) -> List[int]:
        """offsets[i] is where the image of base[i] starts; the last entry is the length"""
        if self._offsets is None:
            self._offsets = [0] + list(accumulate(self.gamma))
        return self._offsets

    def first_free_index(self, position: int) -> int:
        """Smallest n whose image can change without touching the prefix through position"""
        return bisect_left(self.offsets, position - COMMON_PREFIX + 1)

    def image_index(self, position: int) -> int:
        """Smallest n with position <= offsets[n]"""
        return bisect_left(self.offsets, position)

    def set_gamma(self, start: int, values: Sequence[int]) -> None:
        if start + len(values) > len(self.gamma):
            raise ResourceLimitError(
                f'Pre-image of {len(self.base)} letters is too short to change index {start}'
            )
        self.gamma[start : start + len(values)] = check_guiding_sequence(values)
        self._word = self._offsets = None

    def reset_tail(self, start: int) -> None:
        if start < len(self.gamma):
            self.set_gamma(start, [26] * (len(self.gamma) - start))

    def snapshot(self, around: int = 0) -> Dict[str, object]:
        index = min(self.image_index(around), len(self.gamma))
        return {
            'origin': self.origin,
            'satisfied_upto': self.satisfied_upto,
            'index': index,
            'gamma': tuple(self.gamma[max(index - 3, 0) : index + 12]),
        }


def _find_within(word: str, pattern: Pattern, start: int, slack: int) -> Optional[int]:
    return next(
        (
            position
            for position in range(start, start + slack + 1)
            if pattern.matches_at(word, position)
        ),
        None,
    )


def _shift_left(
    state: ConstructionState,
    first: int,
    keep: int,
    target: int,
    pattern: Pattern,
    slack: int,
    limit: Optional[int] = None,
) -> int:
    """
    Move the first occurrence of the pattern at target..target+slack to target.

    Contracted images start at index >= first and keep the prefix through
    `keep`; `limit` bounds the contracted indices from above.
    """
    word = state.word
    position = _find_within(word, pattern, target, slack)
    if position is None:
        if len(word) < target + slack + pattern.max_length:
            raise ResourceLimitError(
                f'Image of {len(word)} letters is too short to place {pattern.label!r} at {target}'
            )
        raise VerificationFailure(
            'Pattern not found within its recurrence bound',
            dict(state.snapshot(target), pattern=pattern.label, target=target, slack=slack),
        )

    shortening = position - target
    if shortening == 0:
        return 0

    quotient, remainder = divmod(shortening, 3)
    values = [23] * quotient + ([26 - remainder] if remainder else [])
    index = first
    while keep >= state.offsets[index] + SHARED_PREFIX[values[0]]:
        index += 1
    if limit is not None and index + len(values) > limit:
        raise VerificationFailure(
            'Contraction overlaps the constructed pattern',
            dict(state.snapshot(target), pattern=pattern.label, target=target, first=index),
        )
    assert 17 + state.offsets[index + len(values) - 1] <= target + shortening
    state.set_gamma(index, values)
    logger.debug('Contracted %d images from index %d, shift %d.', len(values), index, shortening)
    return shortening


def _check_step(
    state: ConstructionState, before: str, target: int, pattern: Pattern, step: str
) -> None:
    word = state.word
    if not word.startswith(before):
        raise VerificationFailure(
            f'{step} changed the protected prefix',
            dict(state.snapshot(target), pattern=pattern.label, target=target),
        )
    if not pattern.matches_at(word, target):
        raise VerificationFailure(
            f'{step} did not place the pattern',
            dict(state.snapshot(target), pattern=pattern.label, target=target),
        )


def contract_recurrent(
    state: ConstructionState,
    N: int,
    N_prime: int,
    pattern: Pattern,
    delta: int,
    keep: Optional[int] = None,
) -> ConstructionState:
    """
    Place a (delta, h26)-recurrent pattern at N' without changing the image through N.

    `keep` extends the protected prefix past N for constraints spanning
    several letters.
    """
    # pylint: disable=invalid-name
    if N_prime < N + 4 + 26 * ceil(delta / 3):
        raise PreconditionError(
            f'Gap {N_prime - N} is below 4 + 26 * ceil({delta} / 3) for {pattern.label!r}'
        )
    keep = N if keep is None else max(N, keep)
    before = state.word[: keep + 1]

    first = state.first_free_index(N)
    assert state.offsets[first] <= N + 14
    state.reset_tail(first)
    _shift_left(state, first, keep, N_prime, pattern, delta)

    _check_step(state, before, N_prime, pattern, 'Contraction')
    state.satisfied_upto = N_prime
    return state


def contract_constructible(
    state: ConstructionState,
    N: int,
    N_prime: int,
    pattern: Pattern,
    certificate: ConstructibilityCertificate,
) -> ConstructionState:
    """Splice the certificate's guiding sequence near N', then contract the pattern onto N'"""
    # pylint: disable=invalid-name
    if not certificate.verdict:
        raise PreconditionError(f'Certificate of {pattern.label!r} does not hold')
    if certificate.pattern != pattern:
        raise ArgumentError(
            f'Certificate is for {certificate.pattern.label!r}, not {pattern.label!r}'
        )
    if N_prime < N + 26 * ceil((certificate.delta + 1) / 3) + 198:
        raise PreconditionError(
            f'Gap {N_prime - N} is below 26 * ceil(({certificate.delta} + 1) / 3) + 198'
            f' for {pattern.label!r}'
        )
    before = state.word[: N + 1]

    first = state.first_free_index(N)
    assert state.offsets[first] <= N + 14
    state.reset_tail(first)

    splice = state.image_index(N_prime)
    assert state.offsets[splice] <= N_prime + 25
    length = certificate.preimage_length
    preimage = state.base[splice : splice + length]
    if len(preimage) < length:
        raise ResourceLimitError(f'Pre-image too short to splice at index {splice}')
    witness = certificate.witness_for(preimage)
    state.set_gamma(splice, witness.gamma)

    _shift_left(state, first, N, N_prime, pattern, certificate.delta + 25, limit=splice)

    _check_step(state, before, N_prime, pattern, 'Constructible contraction')
    state.satisfied_upto = N_prime
    return state


def _find_origin(word: str, pattern: Pattern, start: int = 0, scan_cap: int = SCAN_CAP) -> int:
    """First position >= start where the pattern occurs, within scan_cap positions"""
    position = _find_within(word, pattern, start, min(scan_cap, len(word) - start))
    if position is None:
        raise ResourceLimitError(
            f'No occurrence of {pattern.label!r} in the first {scan_cap} positions'
        )
    return position


def prescribe_palindromes(
    positions: Sequence[int],
    flags: Sequence[bool],
    length: int,
    base: Optional[str] = None,
    scan_cap: int = SCAN_CAP,
) -> str:
    """
    Square-free word with w_p == w_{p+2} exactly when the flag of p is set.

    Consecutive positions must be at least 30 apart.
    """
    if len(positions) != len(flags):
        raise ArgumentError('Expected one flag per position')
    if not positions:
        return default_square_free_word(length)
    for previous, current in zip(positions, positions[1:]):
        if current - previous < 30:
            raise PreconditionError(f'Positions {previous} and {current} are less than 30 apart')
    if positions[0] < 0:
        raise ArgumentError('Positions must be non-negative')

    patterns = {flag: palindrome_pattern(bool(flag)) for flag in (True, False)}
    first_letter = base[0] if base else '0'
    state = ConstructionState.for_length(length + scan_cap + 64, first_letter, base)

    # Start at the first position where the first flag already holds.
    delta = _find_origin(state.word, patterns[bool(flags[0])], positions[0], scan_cap)
    state.origin = delta - positions[0]
    state.satisfied_upto = delta
    logger.info('Prescribing %d palindrome flags, origin %d.', len(positions), state.origin)

    for previous, current, flag in zip(positions, positions[1:], flags[1:]):
        if current + 2 >= length:
            break
        N = previous + state.origin  # pylint: disable=invalid-name
        contract_recurrent(
            state, N, current + state.origin, patterns[bool(flag)], 3, keep=N + 2
        )

    word = state.word[state.origin : state.origin + length]
    if len(word) < length:
        raise ResourceLimitError(f'Constructed only {len(word)} of {length} letters')
    for position, flag in zip(positions, flags):
        if position + 2 < length and (word[position] == word[position + 2]) != bool(flag):
            raise VerificationFailure(
                'Palindrome flag not honoured', {'position': position, 'flag': bool(flag)}
            )
    if not is_squarefree(word):
        raise VerificationFailure('Palindrome construction is not square-free', {'length': length})
    return word


def crt_offsets(p: int, q: int) -> CrtOffsets:
    """
    Offsets a, b with 2a + b = q such that the multiples of p in ]ipq, (i+1)pq[
    congruent to +-1 modulo q are ipq + ap and ipq + (a + b)p.
    """
    if p < 3 or q < 3:
        raise ArgumentError(f'Both moduli must be at least 3, got ({p}, {q})')
    if gcd(p, q) != 1:
        raise ArgumentError(f'The moduli ({p}, {q}) are not coprime')
    plus, _ = crt([p, q], [0, 1])
    minus, _ = crt([p, q], [0, q - 1])
    a = int(min(plus, minus)) // p
    b = int(max(plus, minus)) // p - a
    return CrtOffsets(a, b)


def star_constraints(p: int, q: int, s: str, length: int) -> List[StarConstraint]:
    """
    Constraints on the subsequence modulo p once the one modulo q is s.

    Indices j of that subsequence with jp a multiple of q are forced to the
    letter of s there; indices with jp = +-1 modulo q must differ from the
    adjacent letter of s.
    """
    constraints = []
    for index in range(length):
        position = index * p
        remainder = position % q
        if remainder == 0:
            source, forbidden = position // q, False
        elif remainder == 1:
            source, forbidden = (position - 1) // q, True
        elif remainder == q - 1:
            source, forbidden = (position + 1) // q, True
        else:
            continue
        if source >= len(s):
            raise ArgumentError(f'The word modulo {q} needs more than {len(s)} letters')
        constraints.append(StarConstraint(index, s[source], forbidden, source))
    return constraints


def check_star_constraints(
    word: str, constraints: Sequence[StarConstraint]
) -> List[StarConstraint]:
    """The constraints the word breaks"""
    return [
        constraint
        for constraint in constraints
        if constraint.index < len(word) and not constraint.holds(word)
    ]


def select_star_branch(offsets: CrtOffsets) -> str:
    """Which construction handles the constraint gaps"""
    if offsets.a > FILL_MIN_GAP and offsets.b > FILL_MIN_GAP:
        return 'fill'
    if offsets.a <= FILL_MIN_GAP:
        return 'bad-patterns'
    return 'forbidden-pairs'


def fill_partial_word(partial_word: str, node_cap: int = 10**7) -> str:
    """
    Square-free word compatible with the partial word, by lexicographic backtracking.

    Forced letters must be separated by at least 18 wildcards.
    """
    forced = [index for index, cell in enumerate(partial_word) if cell != WILDCARD]
    for previous, current in zip(forced, forced[1:]):
        if current - previous - 1 < FILL_MIN_GAP:
            raise ArgumentError(
                f'Forced letters at {previous} and {current}'
                f' are closer than {FILL_MIN_GAP} wildcards'
            )
    check_word(partial_word.replace(WILDCARD, ''))

    size = len(partial_word)
    word: List[str] = []
    choices: List[int] = []
    choice = 0
    nodes = 0
    while len(word) < size:
        cell = partial_word[len(word)]
        options = ALPHABET if cell == WILDCARD else cell
        if choice < len(options):
            nodes += 1
            if nodes > node_cap:
                raise ResourceLimitError(
                    f'Filling stopped after {node_cap} nodes at length {len(word)}'
                )
            word.append(options[choice])
            if has_square_ending_at(word, len(word) - 1):
                word.pop()
                choice += 1
                continue
            choices.append(choice)
            choice = 0
        else:
            if not word:
                raise VerificationFailure(
                    'No square-free word fits the partial word', {'length': size}
                )
            word.pop()
            choice = choices.pop() + 1

    result = ''.join(word)
    if not is_compatible(result, partial_word):
        raise VerificationFailure('Filled word does not fit the partial word', {'length': size})
    logger.debug('Filled %d letters with %d nodes.', size, nodes)
    return result


def _resolve_constraints(constraints: Sequence[StarConstraint], length: int) -> str:
    """Partial word with every forbidden letter replaced by the smallest allowed one"""
    cells = [WILDCARD] * length
    for constraint in constraints:
        if constraint.index < length:
            cells[constraint.index] = (
                complement(constraint.letter)[0] if constraint.forbidden else constraint.letter
            )
    return ''.join(cells)


def _letter_pattern(constraint: StarConstraint) -> Pattern:
    letters = complement(constraint.letter) if constraint.forbidden else constraint.letter
    label = ('!' if constraint.forbidden else '') + constraint.letter
    return make_constraint_pattern([(letters, 0)], label=label)


def _check_star_thresholds(p: int, q: int) -> None:
    if p > q:
        raise ArgumentError(f'Expected p <= q, got ({p}, {q})')
    if p < 3 or gcd(p, q) != 1:
        raise PreconditionError(f'({p}, {q}) are not coprime moduli >= 3')
    if q < LARGE_PAIR_MAX_AT_LEAST:
        raise PreconditionError(f'q = {q} is below {LARGE_PAIR_MAX_AT_LEAST}')


def build_star_word(
    p: int,
    q: int,
    s: str,
    length: int,
    base: Optional[str] = None,
    scan_cap: int = SCAN_CAP,
) -> str:
    """
    Square-free subsequence modulo p compatible with s as the subsequence modulo q.

    Together the two words satisfy the adjacent-letters condition.
    """
    _check_star_thresholds(p, q)
    if not is_squarefree(s):
        raise ArgumentError('The word modulo q must be square-free')
    offsets = crt_offsets(p, q)
    branch = select_star_branch(offsets)
    lookahead = length + 2 * offsets.a + offsets.b + 1
    constraints = star_constraints(p, q, s, lookahead)
    logger.info('Building the word modulo %d for (%d, %d) with the %s branch.', p, p, q, branch)

    if branch == 'fill':
        word = fill_partial_word(_resolve_constraints(constraints, length))
    else:
        state = ConstructionState.for_length(
            lookahead + scan_cap + 128, s[0], base
        )
        if branch == 'bad-patterns':
            _place_triples(state, constraints, offsets, length, scan_cap)
        else:
            _place_forbidden_pairs(state, constraints, offsets, length)
        word = state.word[state.origin : state.origin + length]

    broken = check_star_constraints(word, constraints)
    if broken or len(word) < length:
        raise VerificationFailure(
            'Word modulo p breaks its constraints',
            {'p': p, 'q': q, 'branch': branch, 'broken': broken[:3]},
        )
    if not is_squarefree(word):
        raise VerificationFailure(
            'Word modulo p is not square-free', {'p': p, 'q': q, 'branch': branch}
        )
    return word


def _place_triples(
    state: ConstructionState,
    constraints: Sequence[StarConstraint],
    offsets: CrtOffsets,
    length: int,
    scan_cap: int,
) -> None:
    """Constraints come in threes at gaps a, b, a with a <= 18"""
    bad_patterns = set(p_bad_catalogue())
    gap = offsets.a - 1

    start = make_constraint_pattern(
        [(constraints[0].letter, gap), (complement(constraints[1].letter), 0)], label='start'
    )
    state.origin = _find_origin(state.word, start, 0, scan_cap)
    state.satisfied_upto = state.origin + constraints[1].index

    for i in range(2, len(constraints) - 2, 3):
        if constraints[i].index >= length:
            break
        pattern = triple_pattern(
            constraints[i].letter, gap, constraints[i + 1].letter, constraints[i + 2].letter
        )
        N = state.origin + constraints[i - 1].index  # pylint: disable=invalid-name
        N_prime = state.origin + constraints[i].index  # pylint: disable=invalid-name
        if pattern in bad_patterns:
            contract_constructible(state, N, N_prime, pattern, cached_certificate(pattern, 13))
        else:
            contract_recurrent(state, N, N_prime, pattern, 27)


def _place_forbidden_pairs(
    state: ConstructionState,
    constraints: Sequence[StarConstraint],
    offsets: CrtOffsets,
    length: int,
) -> None:
    """Constraints come in threes at gaps a, b, a with b <= 18"""
    state.satisfied_upto = 0
    for i in range(0, len(constraints) - 3, 3):
        if constraints[i + 1].index >= length:
            break
        pair = forbidden_pair_pattern(
            constraints[i + 1].letter, offsets.b - 1, constraints[i + 2].letter
        )
        contract_recurrent(state, constraints[i].index, constraints[i + 1].index, pair, 6)
        if constraints[i + 3].index >= length:
            break
        contract_recurrent(
            state,
            constraints[i + 2].index,
            constraints[i + 3].index,
            _letter_pattern(constraints[i + 3]),
            3,
        )


def _pair_step(
    state: ConstructionState, N: int, N_prime: int, first: str, second: str, delta: int
) -> None:
    """Place first <>^delta second at N' for two constraints closer than 30"""
    # pylint: disable=invalid-name
    pattern = pair_pattern(first, delta, second)
    if delta == 0:
        if first == second:
            raise ArgumentError(f'Adjacent constraints at {N_prime} ask for the same letter')
        contract_recurrent(state, N, N_prime, pattern, 12)
    elif delta in (1, 2, 4, 5, 6, 7, 8):
        contract_recurrent(state, N, N_prime, pattern, 27)
    elif delta == 3:
        contract_constructible(state, N, N_prime, pattern, cached_certificate(pattern, 10))
    elif delta <= 15:
        contract_constructible(state, N, N_prime, pattern, cached_certificate(pattern, 8))
    else:
        certificate = analytic_certificate(first, second, delta)
        contract_constructible(state, N, N_prime, pattern, certificate)


def realize_subsequences(p: int, q: int, x: str, s: str, length: int) -> str:
    """
    Square-free word of the length whose subsequences modulo p and q are
    prefixes of x and s.

    Needs p, q >= 331 and x, s satisfying the adjacent-letters condition.
    """
    if min(p, q) < LARGE_PAIR_MIN:
        raise PreconditionError(f'Both moduli must be at least {LARGE_PAIR_MIN}, got ({p}, {q})')
    targets: Dict[int, str] = {}
    for modulus, word in ((p, x), (q, s)):
        for position in range(0, length + 2 * max(p, q), modulus):
            index = position // modulus
            if index >= len(word):
                break
            if targets.setdefault(position, word[index]) != word[index]:
                raise ArgumentError(f'The subsequences disagree at position {position}')
    positions = sorted(targets)

    state = ConstructionState.for_length(length + 2 * max(p, q), targets[0])
    state.satisfied_upto = 0
    logger.info('Placing %d constraints for (%d, %d).', len(positions), p, q)

    n = 0
    while n + 1 < len(positions) and positions[n + 1] < length:
        current, following = positions[n + 1], (
            positions[n + 2] if n + 2 < len(positions) else None
        )
        if following is not None and following - current <= 29:
            _pair_step(
                state,
                positions[n],
                current,
                targets[current],
                targets[following],
                following - current - 1,
            )
            n += 2
        else:
            contract_recurrent(
                state,
                positions[n],
                current,
                make_constraint_pattern([(targets[current], 0)], label=targets[current]),
                3,
            )
            n += 1

    word = state.word[:length]
    wrong = [
        position
        for position in positions
        if position < length and word[position] != targets[position]
    ]
    if wrong:
        raise VerificationFailure('Constrained letters not realised', {'positions': wrong[:5]})
    return word


def build_large_pq_word(
    p: int, q: int, length: int, s: Optional[str] = None, scan_cap: int = SCAN_CAP
) -> str:
    """Square-free word, square-free modulo p and q, for coprime p, q >= 331 with max >= 364"""
    small, large = sorted((p, q))
    _check_star_thresholds(small, large)
    if small < LARGE_PAIR_MIN:
        raise PreconditionError(f'Both moduli must be at least {LARGE_PAIR_MIN}, got ({p}, {q})')

    reach = length + 2 * large
    x_length = reach // small + 2
    # The constraints of the word modulo p look one period of q ahead.
    s_length = ceil((x_length + large + 1) * small / large) + 2
    if s is None:
        s = default_square_free_word(s_length)
    elif len(s) < s_length:
        raise ArgumentError(f'The word modulo {large} needs {s_length} letters, got {len(s)}')
    x = build_star_word(small, large, s, x_length, scan_cap=scan_cap)
    word = realize_subsequences(small, large, x, s, length)

    if not is_squarefree(word):
        raise VerificationFailure('Large-pair construction is not square-free', {'p': p, 'q': q})
    for modulus in (p, q):
        if not is_squarefree(subsequence(word, modulus)):
            raise VerificationFailure(
                'Large-pair construction is not square-free modulo', {'modulus': modulus}
            )
    return word


def check_circular_hypotheses(morphism: Morphism, k: int, p: int, alpha: int, q: int) -> None:
    """Raise on the first failing hypothesis of the circular morphism construction"""
    if not 0 <= alpha < p:
        raise PreconditionError(f'alpha = {alpha} is not in [0, {p})')
    if morphism.image_length != k * p:
        raise PreconditionError(f'{morphism.name or "g"} is not {k * p}-uniform')
    if not is_circular(morphism):
        raise PreconditionError(f'{morphism.name or "g"} is not circular')
    if not crochemore_test(morphism).square_free:
        raise PreconditionError(f'{morphism.name or "g"} is not square-free')
    if not crochemore_test(modular_morphism(morphism, alpha, p)).square_free:
        raise PreconditionError(f'{morphism.name or "g"}^({alpha},{p}) is not square-free')
    if q < 19 * k * p:
        raise PreconditionError(f'q = {q} is below 19 * {k} * {p}')


def build_from_circular_morphism(
    morphism: Morphism,
    k: int,
    p: int,
    alpha: int,
    q: int,
    t: Optional[str],
    length: int,
    check: bool = True,
) -> str:
    """Square-free word, square-free modulo p, whose subsequence modulo q is a prefix of t"""
    if check:
        check_circular_hypotheses(morphism, k, p, alpha, q)
    block = k * p
    needed = (length - 1) // q + 1
    if t is None:
        t = default_square_free_word(needed)
    elif len(t) < needed:
        raise ArgumentError(f'The word modulo q needs {needed} letters, got {len(t)}')

    zero_image = morphism.images[0]
    cells = [WILDCARD] * (ceil((alpha + length) / block) + 1)
    for i in range(needed):
        d, r = divmod(alpha + i * q, block)
        cells[d] = str((int(t[i]) - int(zero_image[r])) % 3)
    preimage = fill_partial_word(''.join(cells))

    word = morphism.apply(preimage)[alpha : alpha + length]
    if subsequence(word, q) != t[:needed]:
        raise VerificationFailure('Subsequence modulo q differs from t', {'p': p, 'q': q})
    for name, ok in (
        ('square-free', is_squarefree(word)),
        ('square-free modulo p', is_squarefree(subsequence(word, p))),
        ('square-free modulo q', is_squarefree(subsequence(word, q))),
    ):
        if not ok:
            raise VerificationFailure(f'Circular construction is not {name}', {'p': p, 'q': q})
    return word


def build_from_record(record: MorphismRecord, q: int, length: int, t: Optional[str] = None) -> str:
    """build_from_circular_morphism with a bundled morphism"""
    return build_from_circular_morphism(
        morphism_from_record(record), record.k, record.p, record.alpha, q, t, length
    )


def shift_in_completions(
    state: ConstructionState, M: int, M_prime: int, letter: str
) -> ConstructionState:
    """Make the completion of the image carry the letter at M', keeping it through M"""
    # pylint: disable=invalid-name
    if M_prime < M + P6_Q_MIN:
        raise PreconditionError(f'Gap {M_prime - M} is below {P6_Q_MIN}')
    check_word(letter)
    block, alpha = divmod(M_prime, 6)
    pairs = COMPLETION_RULES.pairs_with_letter(alpha, letter)
    pattern = Pattern.from_words(pairs, label='{' + ','.join(pairs) + '}')
    contract_recurrent(state, ceil(M / 6), block, pattern, 6)

    word = state.word
    if COMPLETION_RULES.rule(word[block], word[block + 1])[alpha] != letter:
        raise VerificationFailure(
            'Completion does not carry the letter', dict(state.snapshot(block), M_prime=M_prime)
        )
    return state


def build_p6_word(
    q: int, length: int, s: Optional[str] = None, t: Optional[str] = None
) -> str:
    """Square-free word, square-free modulo 6 and q, for q >= 341"""
    if q < P6_Q_MIN:
        raise PreconditionError(f'q = {q} is below {P6_Q_MIN}')
    needed = (length - 1) // q + 1
    preimage_length = ceil(length / 6) + 2
    if s is None:
        s = default_square_free_word(needed, t[0] if t else '0')
    if len(s) < needed:
        raise ArgumentError(f'The word modulo q needs {needed} letters, got {len(s)}')
    if not is_squarefree(s):
        raise ArgumentError('The word modulo q must be square-free')
    if t is not None and t[0] != s[0]:
        raise PreconditionError('The two seed words must start with the same letter')

    state = ConstructionState.for_length(preimage_length + 64, s[0], t)
    logger.info('Building a word for (6, %d) of length %d.', q, length)
    for i in range(1, needed):
        if i * q >= length:
            break
        shift_in_completions(state, (i - 1) * q, i * q, s[i])

    word = COMPLETION_RULES.complete(state.word[:preimage_length], check=False)[:length]
    if len(word) < length:
        raise ResourceLimitError(f'Constructed only {len(word)} of {length} letters')
    if subsequence(word, q) != s[: len(subsequence(word, q))]:
        raise VerificationFailure('Subsequence modulo q differs from s', {'q': q})
    for name, modulus in (('square-free modulo 6', 6), ('square-free modulo q', q)):
        if not is_squarefree(subsequence(word, modulus)):
            raise VerificationFailure(f'Completion construction is not {name}', {'q': q})
    if not is_squarefree(word):
        raise VerificationFailure('Completion construction is not square-free', {'q': q})
    return word
