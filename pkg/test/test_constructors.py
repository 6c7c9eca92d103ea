"""Test"""
# pylint: disable=C

import logging
import random
import unittest
from math import gcd
from unittest.mock import MagicMock, patch

from sqfree_mod.constructors import (
    COMMON_PREFIX,
    P6_Q_MIN,
    SHARED_PREFIX,
    ConstructionState,
    build_from_circular_morphism,
    build_from_record,
    build_large_pq_word,
    build_p6_word,
    build_star_word,
    check_circular_hypotheses,
    check_star_constraints,
    contract_constructible,
    contract_recurrent,
    crt_offsets,
    fill_partial_word,
    prescribe_palindromes,
    realize_subsequences,
    select_star_branch,
    shift_in_completions,
    star_constraints,
)
from sqfree_mod.exceptions import (
    ArgumentError,
    PreconditionError,
    ResourceLimitError,
    VerificationFailure,
)
from sqfree_mod.models import CrtOffsets, StarConstraint
from sqfree_mod.morphisms import (
    COMPLETION_RULES,
    Morphism,
    circular_morphism_for,
    default_square_free_word,
)
from sqfree_mod.recurrence import (
    cached_certificate,
    check_constructible,
    pair_pattern,
    palindrome_pattern,
)
from sqfree_mod.words import (
    Pattern,
    is_compatible,
    is_squarefree,
    random_square_free_word,
    subsequence,
)

from .help import slow

for module_name in ('sqfree_mod.constructors', 'sqfree_mod.recurrence'):
    logging.getLogger(module_name).setLevel(logging.CRITICAL)


class TestConstructionState(unittest.TestCase):
    def test_shared_prefix(self) -> None:
        self.assertEqual(SHARED_PREFIX, {23: 12, 24: 15, 25: 16, 26: 26})
        self.assertEqual(COMMON_PREFIX, 12)

    def test_offsets(self) -> None:
        state = ConstructionState('0121', [26, 23, 26, 24])

        self.assertEqual(state.offsets, [0, 26, 49, 75, 99])
        self.assertEqual(len(state.word), 99)
        self.assertEqual(state.image_index(49), 2)
        self.assertEqual(state.image_index(50), 3)
        self.assertEqual(state.first_free_index(30), 1)

    def test_set_gamma(self) -> None:
        state = ConstructionState('0121')
        state.set_gamma(1, [23, 25])

        self.assertEqual(state.gamma, [26, 23, 25, 26])
        self.assertEqual(len(state.word), 100)
        state.reset_tail(1)
        self.assertEqual(state.gamma, [26] * 4)
        with self.assertRaises(ResourceLimitError):
            state.set_gamma(3, [23, 23])
        with self.assertRaises(ArgumentError):
            state.set_gamma(0, [22])

    def test_bad_states(self) -> None:
        with self.assertRaises(ArgumentError):
            ConstructionState('0101')
        with self.assertRaises(ArgumentError):
            ConstructionState('012', [26, 26])
        with self.assertRaises(ArgumentError):
            ConstructionState.for_length(100, '1', base='0121')

    def test_for_length(self) -> None:
        state = ConstructionState.for_length(500, '2')

        self.assertEqual(state.base[0], '2')
        self.assertGreaterEqual(len(state.word), 500)


class TestContraction(unittest.TestCase):
    def test_contract_recurrent(self) -> None:
        state = ConstructionState.for_length(400)
        before = state.word[:41]
        pattern = palindrome_pattern(True)

        contract_recurrent(state, 40, 100, pattern, 3)

        self.assertTrue(state.word.startswith(before))
        self.assertTrue(pattern.matches_at(state.word, 100))
        self.assertTrue(is_squarefree(state.word))
        self.assertEqual(state.satisfied_upto, 100)

    def test_contract_constructible(self) -> None:
        state = ConstructionState.for_length(1000)
        before = state.word[:41]
        pattern = pair_pattern('0', 3, '1')
        certificate = check_constructible(pattern, 10)

        contract_constructible(state, 40, 400, pattern, certificate)

        self.assertTrue(state.word.startswith(before))
        self.assertTrue(pattern.matches_at(state.word, 400))
        self.assertTrue(is_squarefree(state.word))

    def test_constructible_gap_too_small(self) -> None:
        state = ConstructionState.for_length(1000)
        pattern = pair_pattern('0', 3, '1')

        with self.assertRaises(PreconditionError):
            contract_constructible(state, 40, 341, pattern, check_constructible(pattern, 10))

    def test_shift_in_completions(self) -> None:
        state = ConstructionState.for_length(400)

        shift_in_completions(state, 0, 341, '1')

        word = state.word
        self.assertEqual(COMPLETION_RULES.rule(word[56], word[57])[5], '1')
        with self.assertRaises(PreconditionError):
            shift_in_completions(state, 0, 340, '1')

    def test_contract_recurrent_keeps_the_prefix(self) -> None:
        rng = random.Random(1)
        for _ in range(200):
            N = rng.randrange(400)
            N_prime = N + rng.randrange(30, 120)
            letter = rng.choice('012')
            base = random_square_free_word(40, rng)
            state = ConstructionState.for_length(700, base[0], base)
            before = state.word[: N + 1]

            contract_recurrent(state, N, N_prime, Pattern.from_words([letter]), 3)

            self.assertEqual(state.word[: N + 1], before, (base, N, N_prime))
            self.assertEqual(state.word[N_prime], letter, (base, N, N_prime))
            self.assertTrue(is_squarefree(state.word), (base, N, N_prime))

    def test_shift_in_completions_keeps_the_prefix(self) -> None:
        rng = random.Random(2)
        for _ in range(100):
            M = rng.randrange(600)
            M_prime = M + P6_Q_MIN + rng.randrange(300)
            letter = rng.choice('012')
            base = random_square_free_word(60, rng)
            state = ConstructionState.for_length(400, base[0], base)
            before = COMPLETION_RULES.complete(state.word[: M // 6 + 2], check=False)[: M + 1]

            shift_in_completions(state, M, M_prime, letter)

            completed = COMPLETION_RULES.complete(state.word[: M_prime // 6 + 2], check=False)
            self.assertEqual(completed[: M + 1], before, (base, M, M_prime))
            self.assertEqual(completed[M_prime], letter, (base, M, M_prime))

    def test_gap_too_small(self) -> None:
        state = ConstructionState.for_length(400)

        with self.assertRaises(PreconditionError):
            contract_recurrent(state, 40, 69, palindrome_pattern(True), 3)


class TestPalindromes(unittest.TestCase):
    def test_no_positions(self) -> None:
        self.assertEqual(prescribe_palindromes([], [], 50), default_square_free_word(50))

    def test_prescribe_palindromes(self) -> None:
        positions = [0, 40, 80, 120, 160]
        flags = [True, False, True, True, False]

        word = prescribe_palindromes(positions, flags, 200, scan_cap=500)

        self.assertEqual(len(word), 200)
        self.assertTrue(is_squarefree(word))
        for position, flag in zip(positions, flags):
            self.assertEqual(word[position] == word[position + 2], flag, position)

    def test_positions_too_close(self) -> None:
        with self.assertRaises(PreconditionError):
            prescribe_palindromes([0, 20], [True, False], 100)
        with self.assertRaises(ArgumentError):
            prescribe_palindromes([0, 40], [True], 100)


class TestStarConstraints(unittest.TestCase):
    def test_crt_offsets(self) -> None:
        for p, q in ((3, 4), (5, 7), (331, 365), (365, 331)):
            offsets = crt_offsets(p, q)
            self.assertEqual(2 * offsets.a + offsets.b, q)
            self.assertIn((offsets.a * p) % q, (1, q - 1))
            self.assertIn(((offsets.a + offsets.b) * p) % q, (1, q - 1))

    def test_crt_offsets_match_a_scan(self) -> None:
        for p in range(3, 51):
            for q in range(3, 51):
                if gcd(p, q) != 1:
                    continue
                offsets = crt_offsets(p, q)
                multiples = [j for j in range(1, q) if (j * p) % q in (1, q - 1)]
                self.assertEqual(multiples, [offsets.a, offsets.a + offsets.b], (p, q))

    def test_crt_offsets_bad_moduli(self) -> None:
        with self.assertRaises(ArgumentError):
            crt_offsets(3, 6)
        with self.assertRaises(ArgumentError):
            crt_offsets(2, 5)

    def test_select_star_branch(self) -> None:
        self.assertEqual(select_star_branch(CrtOffsets(19, 20)), 'fill')
        self.assertEqual(select_star_branch(CrtOffsets(18, 100)), 'bad-patterns')
        self.assertEqual(select_star_branch(CrtOffsets(100, 10)), 'forbidden-pairs')

    def test_star_constraints(self) -> None:
        constraints = star_constraints(3, 4, '0121', 5)

        self.assertEqual(
            constraints,
            [
                StarConstraint(0, '0', False, 0),
                StarConstraint(1, '1', True, 1),
                StarConstraint(3, '2', True, 2),
                StarConstraint(4, '1', False, 3),
            ],
        )
        self.assertEqual(check_star_constraints('02101', constraints), [])
        self.assertEqual(
            [constraint.index for constraint in check_star_constraints('01020', constraints)],
            [1, 3, 4],
        )
        with self.assertRaises(ArgumentError):
            star_constraints(3, 4, '01', 5)

    def test_star_thresholds(self) -> None:
        s = default_square_free_word(10)
        with self.assertRaises(PreconditionError):
            build_star_word(3, 4, s, 10)
        with self.assertRaises(ArgumentError):
            build_star_word(400, 367, s, 10)


class TestFill(unittest.TestCase):
    def test_fill_partial_word(self) -> None:
        partial = '0' + '.' * 18 + '0' + '.' * 20 + '2'

        word = fill_partial_word(partial)

        self.assertEqual(len(word), len(partial))
        self.assertTrue(is_compatible(word, partial))
        self.assertTrue(is_squarefree(word))

    def test_fill_wildcards_only(self) -> None:
        word = fill_partial_word('.' * 30)

        self.assertTrue(word.startswith('0102'))
        self.assertTrue(is_squarefree(word))

    @patch('sqfree_mod.constructors.is_compatible', new=MagicMock(return_value=False))
    def test_fill_checks_its_result(self) -> None:
        with self.assertRaises(VerificationFailure):
            fill_partial_word('.' * 10)

    def test_forced_letters_too_close(self) -> None:
        with self.assertRaises(ArgumentError):
            fill_partial_word('0.....1')
        with self.assertRaises(ArgumentError):
            fill_partial_word('3')


class TestCircularConstruction(unittest.TestCase):
    def test_build_from_record(self) -> None:
        record = circular_morphism_for(3)
        t = default_square_free_word(3, '1')

        word = build_from_record(record, 1080, 2200, t)

        self.assertEqual(len(word), 2200)
        self.assertEqual(subsequence(word, 1080), t)
        self.assertTrue(is_squarefree(word))
        self.assertTrue(is_squarefree(subsequence(word, 3)))

    def test_hypotheses(self) -> None:
        record = circular_morphism_for(3)
        morphism = Morphism.circular(record.image)

        check_circular_hypotheses(morphism, 18, 3, 1, 1026)
        with self.assertRaises(PreconditionError):
            check_circular_hypotheses(morphism, 18, 3, 1, 1025)
        with self.assertRaises(PreconditionError):
            check_circular_hypotheses(morphism, 18, 3, 3, 1080)
        with self.assertRaises(PreconditionError):
            check_circular_hypotheses(morphism, 17, 3, 1, 1080)
        with self.assertRaises(PreconditionError):
            check_circular_hypotheses(Morphism.circular('012'), 1, 3, 0, 100)
        with self.assertRaises(PreconditionError):
            check_circular_hypotheses(Morphism(('01', '12', '21')), 1, 2, 0, 100)

    def test_seed_too_short(self) -> None:
        record = circular_morphism_for(3)
        morphism = Morphism.circular(record.image)

        with self.assertRaises(ArgumentError):
            build_from_circular_morphism(morphism, 18, 3, 1, 1080, '01', 5000)


class TestLargePairs(unittest.TestCase):
    def test_thresholds(self) -> None:
        with self.assertRaises(PreconditionError):
            build_large_pq_word(331, 362, 1000)
        with self.assertRaises(PreconditionError):
            build_large_pq_word(330, 367, 1000)
        with self.assertRaises(PreconditionError):
            realize_subsequences(300, 367, '0', '0', 10)

    def test_p6_threshold(self) -> None:
        with self.assertRaises(PreconditionError):
            build_p6_word(340, 1000)


@slow
class TestLongConstructions(unittest.TestCase):
    def test_large_pair(self) -> None:
        word = build_large_pq_word(331, 365, 5000)

        self.assertEqual(len(word), 5000)
        for modulus in (331, 365):
            self.assertTrue(is_squarefree(subsequence(word, modulus)))
        self.assertTrue(is_squarefree(word))

    def test_star_word(self) -> None:
        s = default_square_free_word(600)
        x = build_star_word(331, 365, s, 150)

        self.assertTrue(is_squarefree(x))
        self.assertEqual(check_star_constraints(x, star_constraints(331, 365, s, 150)), [])

    def test_p6(self) -> None:
        s = default_square_free_word(10, '2')

        word = build_p6_word(341, 3000, s=s)

        self.assertEqual(subsequence(word, 341), s[: len(subsequence(word, 341))])
        self.assertTrue(is_squarefree(subsequence(word, 6)))
        self.assertTrue(is_squarefree(word))

    def test_contract_constructible_keeps_the_prefix(self) -> None:
        rng = random.Random(3)
        for _ in range(100):
            pattern = pair_pattern(rng.choice('012'), 3, rng.choice('012'))
            N = rng.randrange(300)
            N_prime = N + 302 + rng.randrange(150)
            base = random_square_free_word(60, rng)
            state = ConstructionState.for_length(N_prime + 300, base[0], base)
            before = state.word[: N + 1]

            contract_constructible(state, N, N_prime, pattern, cached_certificate(pattern, 10))

            self.assertEqual(state.word[: N + 1], before, (base, N, N_prime))
            self.assertTrue(pattern.matches_at(state.word, N_prime), (base, N, N_prime))
            self.assertTrue(is_squarefree(state.word), (base, N, N_prime))

    def test_circular_records(self) -> None:
        for p in (4, 5, 7):
            record = circular_morphism_for(p)
            word = build_from_record(record, record.q_min, 3 * record.q_min)
            self.assertTrue(is_squarefree(subsequence(word, p)))
