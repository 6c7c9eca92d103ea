"""Test"""
# pylint: disable=C

import io
import json
import logging
import unittest
from typing import List, Tuple
from unittest.mock import MagicMock, call, mock_open, patch

from sqfree_mod.cli import (
    EXIT_DATA,
    EXIT_FAILURE,
    EXIT_LIMIT,
    EXIT_OK,
    EXIT_USAGE,
    dispatch,
)
from sqfree_mod.configs import Settings
from sqfree_mod.models import RunReport
from sqfree_mod.morphisms import circular_morphism_for
from sqfree_mod.words import random_square_free_word

from .help import MORPHISM_FILE_SAMPLE, WORD_FILE_SAMPLE

for module_name in ('sqfree_mod', 'sqfree_mod.cli', 'sqfree_mod.search'):
    logging.getLogger(module_name).setLevel(logging.CRITICAL)


@patch('sqfree_mod.cli.load_settings', new=MagicMock(return_value=Settings()))
class TestDispatch(unittest.TestCase):
    @staticmethod
    def _run(argv: List[str]) -> Tuple[int, RunReport, str]:
        output = io.StringIO()
        code, report = dispatch(argv, output=output)
        return code, report, output.getvalue()

    def test_classify_open_pair(self) -> None:
        code, report, text = self._run(['classify', '--p', '5', '--q', '8'])

        self.assertEqual(code, EXIT_OK)
        self.assertEqual(report.verdict, 'unknown')
        self.assertIn('verdict: unknown', text)

    def test_classify_json(self) -> None:
        code, report, text = self._run(['--format', 'json', 'classify', '--p', '5', '--q', '10'])

        self.assertEqual(code, EXIT_OK)
        data = json.loads(text)
        self.assertEqual(data['verdict'], 'negative')
        self.assertEqual(data['details']['evidence'], 'negative family')
        self.assertIn('subsamples at step 5', data['details']['implication'])
        self.assertEqual(RunReport.from_json(text), report)
        self.assertEqual(text, report.to_json() + '\n')

    def test_classify_sweep(self) -> None:
        code, report, _ = self._run(['classify', '--sweep', '10'])

        self.assertEqual(code, EXIT_OK)
        self.assertEqual(report.details, {'unresolved_coprime_pairs': 1})

    def test_classify_without_pair(self) -> None:
        code, report, _ = self._run(['classify', '--p', '5'])

        self.assertEqual(code, EXIT_USAGE)
        self.assertEqual(report.verdict, 'argument error')

    def test_usage_errors(self) -> None:
        for argv in (['classify', '--bogus'], [], ['count', '--p', '1', '--q', '1']):
            code, report, text = self._run(argv)
            self.assertEqual(code, EXIT_USAGE, argv)
            self.assertEqual(report.verdict, 'usage error')
            self.assertEqual(text, '')

    @patch('sqfree_mod.words.open', new=mock_open(read_data='0121\n0131\n'))
    def test_verify_word_bad_file(self) -> None:
        code, report, _ = self._run(['verify-word', '--file', 'words.txt', '--p', '2', '--q', '3'])

        self.assertEqual(code, EXIT_DATA)
        self.assertEqual(report.verdict, 'format error')

    @patch('sqfree_mod.words.open', new=mock_open(read_data=WORD_FILE_SAMPLE))
    def test_verify_word(self) -> None:
        code, report, _ = self._run(['verify-word', '--file', 'words.txt', '--p', '2', '--q', '3'])

        self.assertEqual(code, EXIT_OK)
        self.assertEqual(report.verdict, 'fail')
        self.assertEqual(
            [verdicts['square_free'] for verdicts in report.details['words']], [True, False]
        )

    def test_count(self) -> None:
        code, report, _ = self._run(['--threads', '1', 'count', '--p', '1', '--q', '1', '--n', '5'])

        self.assertEqual(code, EXIT_OK)
        self.assertEqual(report.details['counts'], [3, 6, 12, 18, 30])
        self.assertEqual(report.verdict, '30')

    def test_count_bad_length(self) -> None:
        code, _, _ = self._run(['count', '--p', '1', '--q', '1', '--n', '0'])

        self.assertEqual(code, EXIT_USAGE)

    def test_prove_negative(self) -> None:
        code, report, _ = self._run(['prove-negative', '--p', '1', '--q', '2'])

        self.assertEqual(code, EXIT_OK)
        self.assertEqual(report.verdict, 'negative')
        self.assertEqual(report.details['status'], 'Terminated')

    def test_prove_negative_limit(self) -> None:
        code, report, _ = self._run(['prove-negative', '--p', '1', '--q', '1', '--max-len', '20'])

        self.assertEqual(code, EXIT_LIMIT)
        self.assertEqual(report.verdict, 'LimitReached')
        self.assertEqual(report.details['longest_length'], 20)

    def test_construct_without_method(self) -> None:
        code, _, _ = self._run(['construct', '--p', '5', '--q', '8', '--length', '100'])

        self.assertEqual(code, EXIT_USAGE)

    @patch('sqfree_mod.cli.write_words')
    def test_construct_circular(self, write_words_mock: MagicMock) -> None:
        code, report, _ = self._run(['construct', '--p', '3', '--q', '1080', '--length', '2200'])

        self.assertEqual(code, EXIT_OK)
        self.assertEqual(report.parameters['method'], 'circular')
        self.assertEqual(report.evidence_path, 'sqfree_3_1080.txt')
        path, words = write_words_mock.call_args[0]
        self.assertEqual(path, 'sqfree_3_1080.txt')
        self.assertEqual(len(words[0]), 2200)

    def test_mine_period_limit(self) -> None:
        code, report, _ = self._run(['mine', '--p', '7', '--q', '9'])

        self.assertEqual(code, EXIT_LIMIT)
        self.assertEqual(report.verdict, 'limit reached')

    def test_mine_absent(self) -> None:
        code, report, _ = self._run(['mine', '--p', '3', '--q', '4', '--word-budget', '100'])

        self.assertEqual(code, EXIT_LIMIT)
        self.assertEqual(report.verdict, 'absent')

    @patch('sqfree_mod.morphisms.open', new=mock_open(read_data=MORPHISM_FILE_SAMPLE))
    def test_verify_morphism(self) -> None:
        code, report, _ = self._run(
            ['verify-morphism', '--file', 'morphism.txt', '--p', '3', '--q', '1']
        )

        self.assertEqual(code, EXIT_OK)
        self.assertEqual(report.verdict, 'rejected')
        self.assertFalse(report.details['g']['square_free'])
        self.assertEqual(report.parameters['alpha'], 0)

    def test_verify_morphism_checks_random_images(self) -> None:
        text = f'k=18\nalpha=1\n0 -> {circular_morphism_for(3).image}\n'

        with patch('sqfree_mod.morphisms.open', new=mock_open(read_data=text)), patch(
            'sqfree_mod.cli.random_square_free_word', wraps=random_square_free_word
        ) as generator_mock:
            code, report, _ = self._run(
                ['verify-morphism', '--file', 'g3.txt', '--p', '3', '--q', '1']
            )

        self.assertEqual(code, EXIT_OK)
        self.assertEqual(report.verdict, 'positive')
        self.assertEqual(report.parameters['alpha'], 1)
        self.assertEqual(generator_mock.call_count, 20)
        self.assertEqual({args[0] for args, _ in generator_mock.call_args_list}, {30})

    @patch(
        'sqfree_mod.cli.verify_word',
        new=MagicMock(
            return_value={
                'square_free': True,
                'square_free_mod_p': False,
                'square_free_mod_q': True,
                'star': True,
            }
        ),
    )
    def test_verify_morphism_bad_image(self) -> None:
        text = f'k=18\nalpha=1\n0 -> {circular_morphism_for(3).image}\n'

        with patch('sqfree_mod.morphisms.open', new=mock_open(read_data=text)):
            code, report, _ = self._run(
                ['verify-morphism', '--file', 'g3.txt', '--p', '3', '--q', '1']
            )

        self.assertEqual(code, EXIT_FAILURE)
        self.assertEqual(report.verdict, 'verification failed')

    @patch('sqfree_mod.cli.write_words')
    @patch('sqfree_mod.cli.build_p6_word', return_value='0121')
    @patch('sqfree_mod.cli.read_words', side_effect=[['0102'], ['0121']])
    def test_construct_p6_with_both_words(
        self, read_words_mock: MagicMock, build_mock: MagicMock, _write_words_mock: MagicMock
    ) -> None:
        code, report, _ = self._run(
            ['construct', '--p', '6', '--q', '341', '--length', '4']
            + ['--seed', 's.txt', '--t', 't.txt']
        )

        self.assertEqual(code, EXIT_OK)
        self.assertEqual(report.parameters['method'], 'p6')
        build_mock.assert_called_once_with(341, 4, s='0102', t='0121')
        read_words_mock.assert_has_calls([call('s.txt'), call('t.txt')])

    def test_construct_t_needs_p6(self) -> None:
        code, _, _ = self._run(
            ['construct', '--p', '3', '--q', '1080', '--length', '100', '--t', 't.txt']
        )

        self.assertEqual(code, EXIT_USAGE)

    def test_verify_lemma_list(self) -> None:
        code, report, _ = self._run(['verify-lemma', '--list'])

        self.assertEqual(code, EXIT_OK)
        self.assertEqual(len(report.details['names']), 15)

    def test_verify_lemma_needs_a_choice(self) -> None:
        code, _, _ = self._run(['verify-lemma'])

        self.assertEqual(code, EXIT_USAGE)

    def test_verify_lemma(self) -> None:
        code, report, _ = self._run(['verify-lemma', '--name', 'length-8-factors'])

        self.assertEqual(code, EXIT_OK)
        self.assertEqual(report.verdict, 'pass')
        self.assertEqual(report.parameters['names'], ['length-8-factors'])


class TestRunReport(unittest.TestCase):
    def test_to_json_is_stable(self) -> None:
        first = RunReport('count', parameters={'q': 1, 'p': 1}, details={'b': 2, 'a': 1})
        second = RunReport('count', parameters={'p': 1, 'q': 1}, details={'a': 1, 'b': 2})

        self.assertEqual(first.to_json(), second.to_json())

    def test_to_text(self) -> None:
        report = RunReport('count', parameters={'n': 5}, verdict='30', timings={'total': 0.5})

        self.assertEqual(
            report.to_text(), 'command: count\nverdict: 30\nn: 5\ntime[total]: 0.500s'
        )
