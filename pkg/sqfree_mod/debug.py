"""For debugging

python -m sqfree_mod.debug {WORD or word file} [P Q]
"""

# pylint: disable=all

import os
import sys
from pprint import pprint

from .words import find_square, pansiot_code, read_words, star_violations, subsequence


def main() -> None:
    """Print the first square, the Pansiot code and the subsequences of the word"""

    source = sys.argv[1]
    word = read_words(source)[0] if os.path.isfile(source) else source
    moduli = [int(modulus) for modulus in sys.argv[2:4]]

    print(f'Word of length {len(word)}: {word[:80]}')
    print()

    print('[Square]')
    square = find_square(word)
    if square is None:
        print('square-free')
    else:
        start, period = square
        print(f'{word[start : start + 2 * period]} at {start}, period {period}')
    print()

    if len(word) >= 3:
        print('[Pansiot code]')
        print(pansiot_code(word)[:80])
        print()

    for modulus in moduli:
        print(f'[Modulo {modulus}]')
        part = subsequence(word, modulus)
        pprint({'subsequence': part[:80], 'square': find_square(part)})
        print()

    if len(moduli) == 2:
        print('[Adjacent multiples]')
        pprint(star_violations(word, *moduli)[:20])
        print()


if __name__ == '__main__':
    main()
