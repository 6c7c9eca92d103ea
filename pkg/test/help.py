"""Helping functions and data for tests"""
import os
import random
import unittest
from itertools import product
from typing import Iterator

SLOW_TESTS = os.environ.get('SQFREE_SLOW_TESTS') == '1'

slow = unittest.skipUnless(SLOW_TESTS, 'set SQFREE_SLOW_TESTS=1 to run the desk-scale checks')

# Ternary square-free words of length 1..12
SQUARE_FREE_COUNTS = [3, 6, 12, 18, 30, 42, 60, 78, 108, 144, 204, 264]

WORD_SAMPLE = '0121021'

SETTINGS_SAMPLE = """\
[Search]
node_cap = 500
max_length = 80

[Runtime]
threads = 4
"""

CHECKPOINT_SAMPLE = """\
[Checkpoint]
p = 3
q = 4
relaxed = no
word = 0102
nodes = 17
longest = 010201
"""

FINISHED_CHECKPOINT_SAMPLE = CHECKPOINT_SAMPLE + 'status = Terminated\n'

MORPHISM_FILE_SAMPLE = """\
# circular morphism given by the image of 0
k=1
0 -> 012
"""

WORD_FILE_SAMPLE = """\
# one word per line
0121
0101
"""


def naive_has_square(word: str) -> bool:
    """Cubic reference for square detection"""
    size = len(word)
    return any(
        word[start : start + period] == word[start + period : start + 2 * period]
        for period in range(1, size // 2 + 1)
        for start in range(size - 2 * period + 1)
    )


def naive_qualifies(word: str, p: int, q: int, relaxed: bool = False) -> bool:
    """Square-free (unless relaxed), square-free modulo p and modulo q"""
    return (
        (relaxed or not naive_has_square(word))
        and not naive_has_square(word[::p])
        and not naive_has_square(word[::q])
    )


def all_words(length: int) -> Iterator[str]:
    """All 3^length ternary words in lexicographic order"""
    return (''.join(letters) for letters in product('012', repeat=length))


def random_word(rng: random.Random, length: int) -> str:
    """A ternary word with independent uniform letters"""
    return ''.join(rng.choice('012') for _ in range(length))
