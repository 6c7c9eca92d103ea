"""Test"""
# pylint: disable=C

import logging
import random
import unittest
from unittest.mock import mock_open, patch

from sqfree_mod.exceptions import ArgumentError, ResourceLimitError, WordFormatError
from sqfree_mod.morphisms import (
    COMPLETION_RULES,
    H26,
    Morphism,
    RuleSet,
    apply,
    apply_h,
    circular_morphism_for,
    circular_record_checks,
    completion_check_holds,
    crochemore_test,
    default_square_free_word,
    enumerate_h26_factors,
    format_morphism,
    h_image,
    is_circular,
    load_circular_morphisms,
    load_completion_checks,
    modular_morphism,
    morphism_from_record,
    parse_morphism_text,
    r_complete,
    read_morphism_file,
    saturated_preimage_length,
)
from sqfree_mod.words import is_squarefree, square_free_words, subsequence

from .help import MORPHISM_FILE_SAMPLE, random_word

morphisms_logger = logging.getLogger('sqfree_mod.morphisms')
morphisms_logger.setLevel(logging.CRITICAL)

H26_IMAGE_OF_ZERO = '01210212021020121021201210'


class TestMorphism(unittest.TestCase):
    def test_apply(self) -> None:
        morphism = Morphism(('01', '2', '10'))

        self.assertEqual(apply(morphism, '012'), '01210')
        self.assertEqual(morphism.apply(''), '')
        self.assertFalse(morphism.is_uniform)
        self.assertIsNone(morphism.image_length)

    def test_bad_images(self) -> None:
        with self.assertRaises(ArgumentError):
            Morphism(())
        with self.assertRaises(ArgumentError):
            Morphism(('0', '', '1'))
        with self.assertRaises(ArgumentError):
            Morphism(('0', '3', '1'))

    def test_equality_ignores_name(self) -> None:
        self.assertEqual(Morphism(('0', '1', '2'), name='a'), Morphism.identity())
        self.assertEqual(Morphism.circular('120'), Morphism(('120', '201', '012')))

    def test_rotation(self) -> None:
        self.assertEqual(Morphism.rotation().apply('0120'), '1201')

    def test_is_circular(self) -> None:
        self.assertTrue(is_circular(Morphism.circular('012')))
        self.assertTrue(is_circular(Morphism.identity()))
        self.assertFalse(is_circular(Morphism(('01', '12', '21'))))
        with self.assertRaises(ArgumentError):
            is_circular(Morphism(('0', '1'), target_size=3))


class TestCrochemore(unittest.TestCase):
    def test_identity_is_square_free(self) -> None:
        verdict = crochemore_test(Morphism.identity())

        self.assertTrue(verdict.square_free)
        self.assertEqual(verdict.test_length, 3)
        self.assertIsNone(verdict.witness)

    def test_non_uniform_witness(self) -> None:
        verdict = crochemore_test(Morphism(('01', '01', '2')))

        self.assertFalse(verdict.square_free)
        self.assertEqual(verdict.test_length, 5)
        self.assertEqual(verdict.witness, '01')
        self.assertEqual(verdict.image, '0101')

    def test_uniform_witness(self) -> None:
        verdict = crochemore_test(Morphism.circular('012'))

        self.assertFalse(verdict.square_free)
        self.assertEqual(verdict.witness, '01')
        start, period = verdict.square
        image = verdict.image
        self.assertEqual(image[start : start + period], image[start + period : start + 2 * period])

    def test_h26_is_square_free(self) -> None:
        self.assertTrue(crochemore_test(H26).square_free)

    def test_modular_morphism(self) -> None:
        morphism = Morphism.circular('012102', name='g')
        derived = modular_morphism(morphism, 1, 3)

        self.assertEqual(derived.images[0], '10')
        self.assertEqual(derived.name, 'g^(1,3)')
        for word in square_free_words(4):
            self.assertEqual(derived.apply(word), subsequence(morphism.apply(word)[1:], 3))

    def test_agrees_with_images_of_long_words(self) -> None:
        rng = random.Random(4)
        words = [word for length in range(1, 13) for word in square_free_words(length)]
        morphisms = [Morphism.identity(), Morphism.rotation()]
        while len(morphisms) < 50:
            size = rng.randint(1, 8)
            morphisms.append(Morphism(tuple(random_word(rng, size) for _ in range(3))))

        for morphism in morphisms:
            expected = all(is_squarefree(morphism.apply(word)) for word in words)
            self.assertEqual(crochemore_test(morphism).square_free, expected, morphism.images)

    def test_modular_morphism_of_random_words(self) -> None:
        rng = random.Random(5)
        for _ in range(100):
            p = rng.randint(1, 4)
            alpha = rng.randrange(p)
            size = p * rng.randint(1, 3)
            morphism = Morphism(tuple(random_word(rng, size) for _ in range(3)))
            t = random_word(rng, 20)

            derived = modular_morphism(morphism, alpha, p)

            self.assertEqual(derived.apply(t), subsequence(morphism.apply(t), p, alpha), (t, p))

    def test_modular_morphism_bad_arguments(self) -> None:
        with self.assertRaises(ArgumentError):
            modular_morphism(Morphism(('01', '2', '10')), 0, 1)
        with self.assertRaises(ArgumentError):
            modular_morphism(Morphism.identity(), 0, 2)
        with self.assertRaises(ArgumentError):
            modular_morphism(Morphism.circular('012102'), 3, 3)


class TestH(unittest.TestCase):
    def test_h_images(self) -> None:
        self.assertEqual(h_image('0', 26), H26_IMAGE_OF_ZERO)
        for gamma in (23, 24, 25, 26):
            image = h_image('0', gamma)
            self.assertEqual(len(image), gamma)
            self.assertTrue(image.startswith('012102120210'))
            self.assertTrue(image.endswith('021201210'))
            self.assertTrue(is_squarefree(image))
        self.assertEqual(h_image('2', 26), H26.images[2])

    def test_h_bad_arguments(self) -> None:
        with self.assertRaises(ArgumentError):
            h_image('0', 22)
        with self.assertRaises(ArgumentError):
            h_image('01', 26)
        with self.assertRaises(ArgumentError):
            apply_h('012', [26, 26])
        with self.assertRaises(ArgumentError):
            apply_h('01', [26, 27])

    def test_apply_h(self) -> None:
        word = apply_h('01', [23, 26])

        self.assertEqual(len(word), 49)
        self.assertEqual(word[:23], h_image('0', 23))
        self.assertEqual(word[23:], h_image('1', 26))

    def test_h_preserves_square_freeness(self) -> None:
        for word in square_free_words(3):
            for gamma in ((23, 24, 25), (26, 23, 26), (25, 25, 24)):
                self.assertTrue(is_squarefree(apply_h(word, gamma)), (word, gamma))

    def test_default_square_free_word(self) -> None:
        word = default_square_free_word(100)

        self.assertEqual(len(word), 100)
        self.assertTrue(word.startswith(H26_IMAGE_OF_ZERO))
        self.assertTrue(is_squarefree(word))
        self.assertEqual(default_square_free_word(10, '2')[0], '2')

    def test_enumerate_h26_factors(self) -> None:
        self.assertEqual(enumerate_h26_factors(2), {'01', '02', '10', '12', '20', '21'})
        factors = enumerate_h26_factors(12)
        self.assertTrue(all(is_squarefree(factor) for factor in factors))
        self.assertIn(H26_IMAGE_OF_ZERO[:12], factors)

    def test_factor_length_guard(self) -> None:
        with self.assertRaises(ResourceLimitError):
            enumerate_h26_factors(121)
        with self.assertRaises(ArgumentError):
            saturated_preimage_length(0)


class TestCompletion(unittest.TestCase):
    def test_r_complete(self) -> None:
        self.assertEqual(r_complete('012'), '012102120210')

    def test_r_complete_keeps_the_word_every_sixth_letter(self) -> None:
        for length in range(2, 9):
            for word in square_free_words(length):
                completed = r_complete(word)
                self.assertEqual(subsequence(completed, 6), word[:-1])
                self.assertTrue(is_squarefree(completed), word)

    def test_r_complete_bad_arguments(self) -> None:
        with self.assertRaises(ArgumentError):
            r_complete('0')
        with self.assertRaises(ArgumentError):
            r_complete('0101')
        self.assertEqual(len(COMPLETION_RULES.complete('0101', check=False)), 18)

    def test_pairs_with_letter(self) -> None:
        self.assertEqual(COMPLETION_RULES.pairs_with_letter(0, '0'), ['01', '02'])
        self.assertEqual(COMPLETION_RULES.pairs_with_letter(5, '0'), ['12', '21'])

    def test_bad_rule_set(self) -> None:
        rules = dict(COMPLETION_RULES.rules)
        rules[('0', '1')] = '012101'
        with self.assertRaises(ArgumentError):
            RuleSet(rules)
        del rules[('0', '1')]
        with self.assertRaises(ArgumentError):
            RuleSet(rules)

    def test_bundled_completion_checks(self) -> None:
        words, max_period, max_start = load_completion_checks()

        self.assertEqual((max_period, max_start), (9, 5))
        self.assertEqual(len(words), 6)
        for word in words:
            self.assertTrue(completion_check_holds(word, max_period, max_start), word)
        self.assertFalse(completion_check_holds('0101010101010101010'))


class TestCircularMorphisms(unittest.TestCase):
    def test_bundled_records(self) -> None:
        records = load_circular_morphisms()
        moduli = [record.p for record in records]

        self.assertEqual(moduli, [3, 4, 5, 7, 8, 9, 10, 11, 12, 14, 15, 16, 20, 21, 22])
        for record in records:
            self.assertEqual(len(record.image), record.k * record.p, record.p)
        self.assertIsNone(circular_morphism_for(6))

    def test_record_checks(self) -> None:
        record = circular_morphism_for(3)

        self.assertEqual((record.k, record.alpha, record.q_min), (18, 1, 1080))
        self.assertTrue(all(circular_record_checks(record).values()))
        self.assertEqual(morphism_from_record(record).name, 'g3')


class TestMorphismFiles(unittest.TestCase):
    def test_parse_circular(self) -> None:
        morphism, header = parse_morphism_text(MORPHISM_FILE_SAMPLE)

        self.assertEqual(morphism, Morphism.circular('012'))
        self.assertEqual(header, {'k': 1})

    def test_parse_full(self) -> None:
        morphism, header = parse_morphism_text('alpha=2\n0 -> 01\n1 -> 2\n2 -> 10  # last\n')

        self.assertEqual(morphism.images, ('01', '2', '10'))
        self.assertEqual(header, {'alpha': 2})

    def test_parse_errors(self) -> None:
        for text in (
            '0 -> 01\n0 -> 02\n',
            'x=1\n0 -> 0\n',
            'k=one\n0 -> 0\n',
            'nonsense\n',
            '0 -> 01\n1 -> 12\n',
            '0 -> 03\n',
        ):
            with self.assertRaises(WordFormatError, msg=text):
                parse_morphism_text(text)

    def test_format_morphism(self) -> None:
        morphism = Morphism(('01', '2', '10'))
        text = format_morphism(morphism, {'k': 1})

        self.assertEqual(text, 'k=1\n0 -> 01\n1 -> 2\n2 -> 10\n')
        self.assertEqual(parse_morphism_text(text), (morphism, {'k': 1}))

    @patch('sqfree_mod.morphisms.open', new=mock_open(read_data=MORPHISM_FILE_SAMPLE))
    def test_read_morphism_file(self) -> None:
        morphism, _ = read_morphism_file('morphism_test.txt')

        self.assertTrue(is_circular(morphism))
