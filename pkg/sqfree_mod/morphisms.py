"""Morphisms, the multi-valued morphism h and the completion rules"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from math import ceil
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from .configs import CIRCULAR_MORPHISMS_FILE, COMPLETION_CHECKS_FILE, load_data
from .exceptions import ArgumentError, ResourceLimitError, WordFormatError
from .models import CrochemoreVerdict, MorphismRecord
from .words import (
    alphabet,
    check_word,
    find_square,
    is_squarefree,
    rotate,
    square_free_words,
    subsequence,
)

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name

GUIDING_VALUES = (23, 24, 25, 26)

# Images of 0 under h share this prefix and suffix; only the middle depends on gamma.
_H_PREFIX = '012102120210'
_H_SUFFIX = '021201210'
_H_MIDDLES = {23: '12', 24: '201', 25: '2012', 26: '20121'}

H_COMMON_PREFIX = len(_H_PREFIX)
H_COMMON_SUFFIX = len(_H_SUFFIX)

# Longest factor length the h26 factor sets are computed for.
FACTOR_LENGTH_GUARD = 120


@dataclass(frozen=True)
class Morphism:
    """A morphism given by the images of the letters 0, 1, ..."""

    images: Tuple[str, ...]
    target_size: int = 3
    name: str = field(default='', compare=False)
    _table: Dict[int, str] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.images:
            raise ArgumentError('A morphism needs at least one letter')
        for letter, image in zip(alphabet(len(self.images)), self.images):
            if not image:
                raise ArgumentError(f'The image of {letter} is empty')
            check_word(image, self.target_size)
        object.__setattr__(
            self,
            '_table',
            str.maketrans(dict(zip(alphabet(self.source_size), self.images))),
        )

    @classmethod
    def identity(cls, size: int = 3) -> Morphism:
        return cls(tuple(alphabet(size)), size, name='identity')

    @classmethod
    def rotation(cls, size: int = 3) -> Morphism:
        """The letter rotation i -> i + 1 (mod size)"""
        return cls(tuple(rotate(alphabet(size), 1, size)), size, name='rotation')

    @classmethod
    def circular(cls, image_of_zero: str, size: int = 3, name: str = '') -> Morphism:
        """Complete the image of 0 by rotation"""
        return cls(
            tuple(rotate(image_of_zero, times, size) for times in range(size)),
            size,
            name=name,
        )

    @property
    def source_size(self) -> int:
        return len(self.images)

    @property
    def is_uniform(self) -> bool:
        return len({len(image) for image in self.images}) == 1

    @property
    def image_length(self) -> Optional[int]:
        """Common image length, None when the morphism is not uniform"""
        return len(self.images[0]) if self.is_uniform else None

    def apply(self, word: str) -> str:
        return check_word(word, self.source_size).translate(self._table)


def apply(morphism: Morphism, word: str) -> str:
    """Concatenation of the images of the letters of the word"""
    return morphism.apply(word)


def is_circular(morphism: Morphism) -> bool:
    """Whether the morphism commutes with the letter rotation"""
    size = morphism.source_size
    if size != morphism.target_size:
        raise ArgumentError('Circularity needs equal source and target alphabets')
    return all(
        morphism.images[(letter + 1) % size] == rotate(morphism.images[letter], 1, size)
        for letter in range(size)
    )


def crochemore_test(morphism: Morphism) -> CrochemoreVerdict:
    """
    Decide whether the morphism is square-free.

    Uniform morphisms only need the square-free words of length 3, ternary
    ones those of length 5. Shorter words are tried first so the witness is
    as short as possible.
    """
    if morphism.is_uniform:
        test_length = 3
    elif morphism.source_size == 3:
        test_length = 5
    else:
        raise ArgumentError('The square-freeness test needs a uniform or ternary morphism')

    for length in range(1, test_length + 1):
        for word in square_free_words(length, morphism.source_size):
            image = morphism.apply(word)
            square = find_square(image)
            if square is not None:
                logger.debug('Image of %s under %s has the square %s.', word, morphism.name, square)
                return CrochemoreVerdict(False, test_length, word, image, square)
    return CrochemoreVerdict(True, test_length)


def modular_morphism(morphism: Morphism, alpha: int, p: int) -> Morphism:
    """The morphism a -> subsequence of the alpha-shift of image(a) modulo p"""
    if not morphism.is_uniform:
        raise ArgumentError(f'Morphism {morphism.name!r} is not uniform')
    if p < 1 or not 0 <= alpha < p:
        raise ArgumentError(f'Invalid residue {alpha} modulo {p}')
    if morphism.image_length % p:
        raise ArgumentError(
            f'Image length {morphism.image_length} is not a multiple of {p}'
        )
    return Morphism(
        tuple(subsequence(image, p, alpha) for image in morphism.images),
        morphism.target_size,
        name=f'{morphism.name}^({alpha},{p})',
    )


def _h_images(gamma: int) -> Tuple[str, str, str]:
    image = _H_PREFIX + _H_MIDDLES[gamma] + _H_SUFFIX
    return image, rotate(image, 1), rotate(image, 2)


_H_IMAGES = {gamma: _h_images(gamma) for gamma in GUIDING_VALUES}

H26 = Morphism(_H_IMAGES[26], name='h26')


def check_guiding_sequence(gamma: Sequence[int]) -> Tuple[int, ...]:
    """Return the guiding sequence as a tuple, or raise on a bad value"""
    bad = [value for value in gamma if value not in _H_IMAGES]
    if bad:
        raise ArgumentError(f'Guiding values must be in {GUIDING_VALUES}, got {bad[0]}')
    return tuple(gamma)


def h_image(letter: str, gamma: int) -> str:
    """The image of the letter under h_gamma"""
    if gamma not in _H_IMAGES:
        raise ArgumentError(f'Guiding values must be in {GUIDING_VALUES}, got {gamma}')
    if len(letter) != 1:
        raise ArgumentError(f'Expected a single letter, got {letter!r}')
    return _H_IMAGES[gamma][int(check_word(letter))]


def apply_h(word: str, gamma: Sequence[int]) -> str:
    """Image of the word under h, the i-th letter using h_{gamma_i}"""
    check_word(word)
    if len(gamma) < len(word):
        raise ArgumentError(
            f'Guiding sequence of length {len(gamma)} is shorter than the word ({len(word)})'
        )
    try:
        return ''.join(_H_IMAGES[value][int(letter)] for letter, value in zip(word, gamma))
    except KeyError as error:
        raise ArgumentError(
            f'Guiding values must be in {GUIDING_VALUES}, got {error.args[0]}'
        ) from error


def default_square_free_word(length: int, first_letter: str = '0') -> str:
    """Prefix of the fixed point of h26, rotated to start with the letter"""
    check_word(first_letter)
    word = '0'
    while len(word) < length:
        word = H26.apply(word[: length // 26 + 1])
    return rotate(word[:length], int(first_letter))


@lru_cache(maxsize=None)
def h26_factors(length: int, preimage_length: int) -> FrozenSet[str]:
    """Factors of the length in the h26 images of square-free words of the pre-image length"""
    factors = set()
    for preimage in square_free_words(preimage_length):
        image = H26.apply(preimage)
        factors.update(image[i : i + length] for i in range(len(image) - length + 1))
    return frozenset(factors)


def saturated_preimage_length(length: int) -> int:
    """Smallest pre-image length from which one more letter adds no factor"""
    if length < 1:
        raise ArgumentError(f'Factor length must be positive, got {length}')
    if length > FACTOR_LENGTH_GUARD:
        raise ResourceLimitError(
            f'Factor length {length} is above the guard {FACTOR_LENGTH_GUARD}'
        )
    preimage_length = ceil(length / 26) + 2
    while h26_factors(length, preimage_length + 1) != h26_factors(length, preimage_length):
        logger.debug(
            'Factors of length %d not saturated at pre-image length %d.', length, preimage_length
        )
        preimage_length += 1
    return preimage_length


def enumerate_h26_factors(length: int) -> FrozenSet[str]:
    """All factors of the length occurring in h26 images of square-free words"""
    return h26_factors(length, saturated_preimage_length(length))


@dataclass
class RuleSet:
    """Six blocks R_ij, one for every pair of distinct letters"""

    rules: Dict[Tuple[str, str], str]

    def __post_init__(self) -> None:
        pairs = {(i, j) for i in alphabet(3) for j in alphabet(3) if i != j}
        if set(self.rules) != pairs:
            raise ArgumentError('A rule set needs exactly one rule per pair of distinct letters')
        for (i, j), rule in self.rules.items():
            check_word(rule)
            if len(rule) != 6 or rule[0] != i:
                raise ArgumentError(f'Rule {i}{j} must be 6 letters starting with {i}')
            if not is_squarefree(rule + j):
                raise ArgumentError(f'Rule {i}{j} followed by {j} is not square-free')

    def rule(self, first: str, second: str) -> str:
        return self.rules[(first, second)]

    def pairs_with_letter(self, position: int, letter: str) -> List[str]:
        """The pairs ij whose rule has the letter at the position"""
        return sorted(i + j for (i, j), rule in self.rules.items() if rule[position] == letter)

    def complete(self, word: str, check: bool = True) -> str:
        """Concatenate the rules over the adjacent pairs of letters"""
        check_word(word)
        if len(word) < 2:
            raise ArgumentError('Completion needs a word of length at least 2')
        if check and not is_squarefree(word):
            raise ArgumentError('Completion needs a square-free word')
        return ''.join(self.rules[pair] for pair in zip(word, word[1:]))


COMPLETION_RULES = RuleSet(
    {
        ('0', '1'): '012102',
        ('0', '2'): '012021',
        ('1', '0'): '120102',
        ('1', '2'): '120210',
        ('2', '0'): '201021',
        ('2', '1'): '201210',
    }
)


def r_complete(word: str) -> str:
    """Apply the completion rules; every sixth letter of the result spells the word"""
    return COMPLETION_RULES.complete(word)


def completion_check_holds(word: str, max_period: int = 9, max_start: int = 5) -> bool:
    """No short factor at a start <= max_start repeats a period <= max_period later"""
    for period in range(1, max_period + 1):
        size = min(period, 5)
        for start in range(max_start + 1):
            if word[start : start + size] == word[start + period : start + period + size]:
                return False
    return True


def load_completion_checks() -> Tuple[List[str], int, int]:
    """The bundled words and bounds of the short-period completion check"""
    data = load_data(COMPLETION_CHECKS_FILE)
    return [str(word) for word in data['words']], int(data['max_period']), int(data['max_start'])


def load_circular_morphisms() -> List[MorphismRecord]:
    """Read the bundled circular morphisms"""
    data = load_data(CIRCULAR_MORPHISMS_FILE)
    return [
        MorphismRecord(
            p=int(row['p']),
            k=int(row['k']),
            alpha=int(row['alpha']),
            q_min=int(row['q_min']),
            image=str(row['image']),
        )
        for row in data['morphisms']
    ]


def circular_morphism_for(p: int) -> Optional[MorphismRecord]:
    for record in load_circular_morphisms():
        if record.p == p:
            return record
    return None


def morphism_from_record(record: MorphismRecord) -> Morphism:
    return Morphism.circular(record.image, name=f'g{record.p}')


def circular_record_checks(record: MorphismRecord) -> Dict[str, bool]:
    """Hypotheses needed to build words from a bundled circular morphism"""
    morphism = morphism_from_record(record)
    checks = {
        'uniform': morphism.image_length == record.k * record.p,
        'circular': is_circular(morphism),
        'square-free': crochemore_test(morphism).square_free,
    }
    checks['square-free modulo p'] = checks['uniform'] and (
        crochemore_test(modular_morphism(morphism, record.alpha, record.p)).square_free
    )
    return checks


def parse_morphism_text(text: str, alphabet_size: int = 3) -> Tuple[Morphism, Dict[str, int]]:
    """
    Parse the morphism file format.

    Lines are 'LETTER -> WORD' or header lines 'k=', 'alpha=', 'p='; blank
    lines and '#' comments are skipped. A file giving only the image of 0
    describes a circular morphism.
    """
    images: Dict[str, str] = {}
    header: Dict[str, int] = {}
    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split('#', 1)[0].strip()
        if not line:
            continue
        if '->' in line:
            letter, image = (part.strip() for part in line.split('->', 1))
            if letter in images:
                raise WordFormatError(f'Line {number}: letter {letter} defined twice')
            images[letter] = image
        elif '=' in line:
            key, value = (part.strip() for part in line.split('=', 1))
            if key not in ('k', 'alpha', 'p'):
                raise WordFormatError(f'Line {number}: unknown header key {key!r}')
            try:
                header[key] = int(value)
            except ValueError as error:
                raise WordFormatError(f'Line {number}: {key} must be an integer') from error
        else:
            raise WordFormatError(f'Line {number}: cannot parse {line[:40]!r}')

    letters = alphabet(alphabet_size)
    try:
        if set(images) == {'0'}:
            morphism = Morphism.circular(images['0'], alphabet_size)
        elif set(images) == set(letters):
            morphism = Morphism(tuple(images[letter] for letter in letters), alphabet_size)
        else:
            raise WordFormatError(
                f'Expected images of 0 only or of all of {letters!r}, got {sorted(images)}'
            )
    except ArgumentError as error:
        raise WordFormatError(f'Invalid morphism: {error}') from error
    return morphism, header


def read_morphism_file(path: str) -> Tuple[Morphism, Dict[str, int]]:
    with open(path, encoding='utf-8') as morphism_file:
        return parse_morphism_text(morphism_file.read())


def format_morphism(morphism: Morphism, header: Optional[Mapping[str, int]] = None) -> str:
    """Inverse of parse_morphism_text"""
    lines = [f'{key}={value}' for key, value in (header or {}).items()]
    lines.extend(
        f'{letter} -> {image}'
        for letter, image in zip(alphabet(morphism.source_size), morphism.images)
    )
    return '\n'.join(lines) + '\n'
