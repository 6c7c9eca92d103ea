"""Helping functions that related to words, squares, subsequences and patterns"""
from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field
from math import prod
from typing import FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from .exceptions import ArgumentError, ResourceLimitError, WordFormatError

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name

DIGITS = '0123456789'
ALPHABET = DIGITS[:3]
WILDCARD = '.'

# Patterns with more members than this are only tested positionally.
MATERIALIZE_LIMIT = 10_000

Cell = Optional[FrozenSet[str]]


def alphabet(alphabet_size: int = 3) -> str:
    """Letters of the alphabet of the given size, in order"""
    if not 1 <= alphabet_size <= len(DIGITS):
        raise ArgumentError(f'Unsupported alphabet size: {alphabet_size}')
    return DIGITS[:alphabet_size]


def check_word(word: str, alphabet_size: int = 3) -> str:
    """Return the word unchanged, or raise if a letter is outside the alphabet"""
    letters = alphabet(alphabet_size)
    if not set(word) <= set(letters):
        bad = sorted(set(word) - set(letters))
        raise ArgumentError(f'Letters {bad} are not in the alphabet {letters!r}')
    return word


def parse_word(text: str, alphabet_size: int = 3) -> str:
    """Parse one word in the text format"""
    word = text.strip()
    try:
        return check_word(word, alphabet_size)
    except ArgumentError as error:
        raise WordFormatError(f'Invalid word {word[:40]!r}: {error}') from error


def parse_partial_word(text: str, alphabet_size: int = 3) -> str:
    """Parse one partial word, '.' standing for the wildcard"""
    partial = text.strip()
    if not set(partial) <= set(alphabet(alphabet_size) + WILDCARD):
        raise WordFormatError(f'Invalid partial word {partial[:40]!r}')
    return partial


def read_words(path: str, alphabet_size: int = 3) -> List[str]:
    """Read the words of a file, one per line, skipping blanks and # comments"""
    with open(path, encoding='utf-8') as word_file:
        return [
            parse_word(line, alphabet_size)
            for line in word_file
            if line.strip() and not line.lstrip().startswith('#')
        ]


def write_words(path: str, words: Iterable[str]) -> None:
    """Write the words to the file, one per line"""
    with open(path, 'w', encoding='utf-8') as word_file:
        for word in words:
            word_file.write(f'{word}\n')


def rotate(word: str, times: int = 1, alphabet_size: int = 3) -> str:
    """Apply the letter rotation i -> i + 1 (mod n) the given number of times"""
    letters = alphabet(alphabet_size)
    times %= alphabet_size
    return word.translate(str.maketrans(letters, letters[times:] + letters[:times]))


def complement(letter: str, alphabet_size: int = 3) -> str:
    """Every letter of the alphabet but the given one"""
    return alphabet(alphabet_size).replace(letter, '')


def has_square_ending_at(word: Sequence[str], index: int) -> bool:
    """Whether some square ends exactly at the index"""
    for period in range(1, (index + 1) // 2 + 1):
        if (
            word[index] == word[index - period]
            and word[index - 2 * period + 1 : index - period + 1]
            == word[index - period + 1 : index + 1]
        ):
            return True
    return False


def _z_function(text: str) -> List[int]:
    """z[i] is the length of the longest common prefix of text and text[i:]"""
    size = len(text)
    z_values = [0] * size
    if size:
        z_values[0] = size
    left = right = 0
    for i in range(1, size):
        if i < right:
            z_values[i] = min(right - i, z_values[i - left])
        while i + z_values[i] < size and text[z_values[i]] == text[i + z_values[i]]:
            z_values[i] += 1
        if i + z_values[i] > right:
            left, right = i, i + z_values[i]
    return z_values


def _find_crossing_square(word: str, middle: int) -> Optional[Tuple[int, int]]:
    """
    Find a square overlapping both sides of the split at `middle`.

    A square of period l crossing the split has a run of l positions i with
    word[i] == word[i + l] that contains either middle - l or middle - 1.
    Both extensions around each anchor are read from Z-arrays.
    """
    size = len(word)
    reversed_word = word[::-1]
    head = reversed_word[size - middle + 1 :]

    z_left = _z_function(word[:middle][::-1])
    z_right = _z_function(word[middle:] + '#' + word)
    z_tail = _z_function(word[middle - 1 :])
    z_head = _z_function(head + '#' + reversed_word)

    for period in range(1, size // 2 + 1):
        anchor = middle - period
        if anchor >= 0:
            forward = z_right[size - middle + 1 + anchor]
            if forward:
                backward = z_left[period] if period < middle else 0
                if backward + forward >= period:
                    return anchor - backward, period

        anchor = middle - 1
        if anchor + period < size:
            forward = z_tail[period] if period < len(z_tail) else 0
            if forward:
                backward = z_head[len(head) + 1 + size - (anchor + period)]
                if backward + forward >= period:
                    return anchor - backward, period
    return None


def _find_square(word: str, offset: int) -> Optional[Tuple[int, int]]:
    size = len(word)
    if size < 2:
        return None
    middle = size // 2
    found = _find_square(word[:middle], offset) or _find_square(word[middle:], offset + middle)
    if found:
        return found
    crossing = _find_crossing_square(word, middle)
    if crossing:
        return crossing[0] + offset, crossing[1]
    return None


def find_square(word: str) -> Optional[Tuple[int, int]]:
    """Return (start, period) of some square of the word, or None if square-free"""
    return _find_square(word, 0)


def is_squarefree(word: str) -> bool:
    """Whether the word contains no factor uu with u non-empty"""
    return find_square(word) is None


def subsequence(word: str, p: int, alpha: int = 0) -> str:
    """The letters at positions alpha, alpha + p, alpha + 2p, ..."""
    if p < 1:
        raise ArgumentError(f'The modulus must be positive, got {p}')
    if not 0 <= alpha < p:
        raise ArgumentError(f'The residue must be in [0, {p}), got {alpha}')
    return word[alpha::p]


def shift(word: str, alpha: int) -> str:
    """Drop the first alpha letters"""
    return word[alpha:]


def interleave(parts: Sequence[str]) -> str:
    """Inverse of splitting a word into its residues modulo len(parts)"""
    modulus = len(parts)
    size = sum(len(part) for part in parts)
    return ''.join(parts[i % modulus][i // modulus] for i in range(size))


def subsample(word: str, k: int) -> str:
    """The word w with w_i = word_{ki}"""
    return subsequence(word, k, 0)


def square_free_words(length: int, alphabet_size: int = 3, prefix: str = '') -> Iterator[str]:
    """All square-free words of the length starting with the prefix, in lexicographic order"""
    letters = alphabet(alphabet_size)
    if not is_squarefree(prefix):
        return
    if len(prefix) >= length:
        yield prefix[:length]
        return

    word = list(prefix)

    def _extend() -> Iterator[str]:
        if len(word) == length:
            yield ''.join(word)
            return
        for letter in letters:
            word.append(letter)
            if not has_square_ending_at(word, len(word) - 1):
                yield from _extend()
            word.pop()

    yield from _extend()


def random_square_free_word(length: int, rng: random.Random, alphabet_size: int = 3) -> str:
    """A square-free word of the length, by backtracking over letters in a random order"""
    letters = alphabet(alphabet_size)
    word: List[str] = []
    untried: List[List[str]] = []
    while len(word) < length:
        if len(untried) == len(word):
            untried.append(rng.sample(letters, len(letters)))
        if untried[-1]:
            word.append(untried[-1].pop())
            if has_square_ending_at(word, len(word) - 1):
                word.pop()
        else:
            untried.pop()
            if not word:
                raise ArgumentError(
                    f'No square-free word of length {length} over {alphabet_size} letters'
                )
            word.pop()
    return ''.join(word)


@dataclass(frozen=True)
class Pattern:
    """
    A set of words given as a union of templates.

    Each template is a tuple of cells; a cell is the frozenset of letters
    allowed at that position, or None for a free position.
    """

    templates: Tuple[Tuple[Cell, ...], ...]
    alphabet_size: int = 3
    label: str = field(default='', compare=False)
    _checks: Tuple[Tuple[int, Tuple[Tuple[int, FrozenSet[str]], ...]], ...] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        if not self.templates or any(not template for template in self.templates):
            raise ArgumentError('A pattern needs at least one non-empty member')
        letters = set(alphabet(self.alphabet_size))
        checks = []
        for template in self.templates:
            constrained = []
            for offset, cell in enumerate(template):
                if cell is None:
                    continue
                if not cell or not cell <= letters:
                    raise ArgumentError(f'Invalid cell {sorted(cell)} in pattern {self.label!r}')
                constrained.append((offset, cell))
            checks.append((len(template), tuple(constrained)))
        object.__setattr__(self, '_checks', tuple(checks))

    @classmethod
    def from_words(cls, words: Iterable[str], alphabet_size: int = 3, label: str = '') -> Pattern:
        """The pattern whose members are exactly the given words"""
        templates = tuple(
            sorted(
                {
                    tuple(frozenset(letter) for letter in check_word(word, alphabet_size))
                    for word in words
                },
                key=lambda template: ''.join(min(cell) for cell in template),
            )
        )
        return cls(templates=templates, alphabet_size=alphabet_size, label=label)

    @property
    def max_length(self) -> int:
        return max(len(template) for template in self.templates)

    @property
    def min_length(self) -> int:
        return min(len(template) for template in self.templates)

    def size(self) -> int:
        """Number of member words, counted per template"""
        return sum(
            prod(len(cell) if cell is not None else self.alphabet_size for cell in template)
            for template in self.templates
        )

    def members(self) -> FrozenSet[str]:
        """Materialize the member words"""
        if self.size() > MATERIALIZE_LIMIT:
            raise ResourceLimitError(
                f'Pattern {self.label!r} has {self.size()} members, test membership positionally'
            )
        letters = alphabet(self.alphabet_size)
        return frozenset(
            ''.join(letters_choice)
            for template in self.templates
            for letters_choice in itertools.product(
                *(sorted(cell) if cell is not None else letters for cell in template)
            )
        )

    def matches_at(self, word: Sequence[str], position: int) -> bool:
        """Whether some member occurs at the position of the word"""
        if position < 0:
            return False
        available = len(word) - position
        for length, constrained in self._checks:
            if length <= available and all(
                word[position + offset] in cell for offset, cell in constrained
            ):
                return True
        return False

    def first_occurrence(self, word: Sequence[str], start: int = 0) -> Optional[int]:
        """Smallest position >= start where the pattern occurs"""
        for position in range(max(start, 0), len(word) - self.min_length + 1):
            if self.matches_at(word, position):
                return position
        return None

    def __contains__(self, word: object) -> bool:
        if not isinstance(word, str):
            return False
        return any(
            length == len(word) and all(word[offset] in cell for offset, cell in constrained)
            for length, constrained in self._checks
        )


def make_constraint_pattern(
    parts: Sequence[Tuple[str, int]],
    alphabet_size: int = 3,
    label: str = '',
) -> Pattern:
    """
    Expand the notation A0 <>^d0 A1 <>^d1 ... into a pattern.

    `parts` lists (allowed letters, free positions after them); the gap after
    the last letter set is ignored.
    """
    if not parts:
        raise ArgumentError('A constraint pattern needs at least one letter set')
    letters = alphabet(alphabet_size)
    cells: List[Cell] = []
    for index, (allowed, gap) in enumerate(parts):
        allowed_set = frozenset(allowed)
        if not allowed_set:
            raise ArgumentError(f'Letter set #{index} is empty')
        if not allowed_set <= set(letters):
            raise ArgumentError(f'Letter set #{index} {sorted(allowed_set)} is not in {letters!r}')
        if gap < 0:
            raise ArgumentError(f'Gap #{index} is negative')
        cells.append(None if len(allowed_set) == alphabet_size else allowed_set)
        if index < len(parts) - 1:
            cells.extend([None] * gap)
    return Pattern(templates=(tuple(cells),), alphabet_size=alphabet_size, label=label)


def pattern_first_occurrence(word: str, pattern: Pattern, start: int = 0) -> Optional[int]:
    """Smallest j >= start such that some member of the pattern occurs at j"""
    return pattern.first_occurrence(word, start)


def is_compatible(word: str, partial_word: str) -> bool:
    """Whether the word fits the partial word cell by cell"""
    if len(word) > len(partial_word):
        return False
    return all(cell in (WILDCARD, letter) for letter, cell in zip(word, partial_word))


def pansiot_code(word: str) -> str:
    """Bit i is 1 iff word_i == word_{i+2}"""
    if len(word) < 3:
        raise ArgumentError('A Pansiot code needs a word of length at least 3')
    return ''.join('1' if word[i] == word[i + 2] else '0' for i in range(len(word) - 2))


def star_violations(word: str, p: int, q: int) -> List[int]:
    """Indices i where a multiple of p and a multiple of q are adjacent with equal letters"""
    last = len(word) - 1
    triggering = {i for i in range(0, last, p) if (i + 1) % q == 0}
    triggering.update(i for i in range(0, last, q) if (i + 1) % p == 0)
    return sorted(i for i in triggering if word[i] == word[i + 1])


def satisfies_star(word: str, p: int, q: int) -> bool:
    """Whether the adjacent-letters condition holds for the pair (p, q)"""
    return not star_violations(word, p, q)


def distinct_factor_count(word: str, length: int) -> int:
    """Number of distinct factors of the given length"""
    if not 0 < length <= len(word):
        raise ArgumentError(f'Factor length {length} is not in [1, {len(word)}]')
    return len({word[i : i + length] for i in range(len(word) - length + 1)})
