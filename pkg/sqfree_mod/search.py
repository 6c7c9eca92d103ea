"""Backtracking searches, morphism certificates, pair classification and word counts"""
import logging
import multiprocessing as mp
from multiprocessing.pool import IMapIterator
from collections import Counter
from configparser import ConfigParser
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, lcm
from threading import Event
from typing import Dict, Iterable, List, Optional, Set, Tuple

from .configs import PAIRS_FILE, load_data
from .exceptions import ArgumentError, ResourceLimitError, WordFormatError
from .models import (
    EvidenceKind,
    GrowthCounts,
    ImplicationRecord,
    MorphismCertificate,
    MorphismRecord,
    PairReport,
    PairTable,
    PairVerdict,
    SearchCheckpoint,
    SearchOutcome,
    SearchStatus,
)
from .morphisms import Morphism, crochemore_test, load_circular_morphisms, modular_morphism
from .words import ALPHABET, check_word, has_square_ending_at, pansiot_code, rotate

logger = logging.getLogger(__name__)  # pylint: disable=invalid-name

# Parallel runs hand every qualifying prefix of this length to a worker.
SPLIT_DEPTH = 4
STOP_POLL_SECONDS = 0.5

COUNT_MAX_LENGTH = 60
COUNT_NODE_CAP = 10**8

MINING_MAX_PERIOD = 40
MINING_LENGTH_FACTOR = 50
MINING_MAX_BLOCKS = 4


class QualifyingWord:
    """
    A word grown one letter at a time, with its subsequences modulo p and q.

    `push` checks only the squares ending at the appended index: in the word
    (unless relaxed) and in a subsequence when the index is one of its
    positions. With `allowed_codes`, the Pansiot code of every block of
    `block` letters starting at a multiple of `block` must be allowed.
    """

    def __init__(
        self,
        p: int,
        q: int,
        relaxed: bool = False,
        allowed_codes: Optional[Set[str]] = None,
        block: int = 0,
    ) -> None:
        if p < 1 or q < 1:
            raise ArgumentError(f'Moduli must be positive, got ({p}, {q})')
        if allowed_codes is not None and block < 1:
            raise ArgumentError('Allowed codes need a positive block length')
        self.p = p
        self.q = q
        self.relaxed = relaxed
        self.allowed_codes = allowed_codes
        self.block = block
        self.letters: List[str] = []
        # Modulo 1 is the word itself.
        self.subsequences: Dict[int, List[str]] = {
            modulus: [] for modulus in sorted({p, q}) if modulus != 1 or relaxed
        }

    @classmethod
    def from_word(cls, word: str, p: int, q: int, relaxed: bool = False) -> 'QualifyingWord':
        state = cls(p, q, relaxed)
        for letter in check_word(word):
            if not state.push(letter):
                raise ArgumentError(f'{word[:40]!r} does not qualify for ({p}, {q})')
        return state

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def word(self) -> str:
        return ''.join(self.letters)

    def push(self, letter: str) -> bool:
        """Append the letter and tell whether the word still qualifies"""
        index = len(self.letters)
        self.letters.append(letter)
        qualifies = self.relaxed or not has_square_ending_at(self.letters, index)
        for modulus, letters in self.subsequences.items():
            if index % modulus == 0:
                letters.append(letter)
                qualifies = qualifies and not has_square_ending_at(letters, len(letters) - 1)
        if qualifies and self.allowed_codes is not None:
            start = index - self.block - 1
            if start >= 0 and start % self.block == 0:
                qualifies = pansiot_code(''.join(self.letters[start:])) in self.allowed_codes
        return qualifies

    def pop(self) -> str:
        letter = self.letters.pop()
        index = len(self.letters)
        for modulus, letters in self.subsequences.items():
            if index % modulus == 0:
                letters.pop()
        return letter


@dataclass
class _Checkpointer:
    path: str
    every: int
    p: int
    q: int
    relaxed: bool

    def save(
        self, word: str, nodes: int, longest: str, status: Optional[SearchStatus] = None
    ) -> None:
        save_checkpoint(
            self.path, SearchCheckpoint(self.p, self.q, self.relaxed, word, nodes, longest, status)
        )
        logger.debug('Checkpoint at %d nodes, depth %d.', nodes, len(word))


def read_checkpoint(path: str) -> Optional[SearchCheckpoint]:
    """Read a search checkpoint; None when there is no file"""
    config_parser = ConfigParser(interpolation=None)

    try:
        with open(path, encoding='utf-8') as checkpoint_file:
            config_parser.read_file(checkpoint_file)
    except OSError:
        return None

    if not config_parser.has_section('Checkpoint'):
        raise WordFormatError(f'{path} has no [Checkpoint] section')
    section = config_parser['Checkpoint']
    status = section.get('status', '')
    try:
        return SearchCheckpoint(
            p=section.getint('p'),
            q=section.getint('q'),
            relaxed=section.getboolean('relaxed', fallback=False),
            word=parse_checkpoint_word(section.get('word', '')),
            nodes=section.getint('nodes', fallback=0),
            longest=parse_checkpoint_word(section.get('longest', '')),
            status=SearchStatus(status) if status else None,
        )
    except (TypeError, ValueError) as error:
        raise WordFormatError(f'Invalid checkpoint {path}: {error}') from error


def parse_checkpoint_word(text: str) -> str:
    try:
        return check_word(text.strip())
    except ArgumentError as error:
        raise WordFormatError(str(error)) from error


def save_checkpoint(path: str, checkpoint: SearchCheckpoint) -> None:
    """Write the checkpoint, replacing the file"""
    config_parser = ConfigParser(interpolation=None)
    config_parser.add_section('Checkpoint')

    section = config_parser['Checkpoint']
    section['p'] = str(checkpoint.p)
    section['q'] = str(checkpoint.q)
    section['relaxed'] = 'yes' if checkpoint.relaxed else 'no'
    section['word'] = checkpoint.word
    section['nodes'] = str(checkpoint.nodes)
    section['longest'] = checkpoint.longest
    if checkpoint.status is not None:
        section['status'] = checkpoint.status.value

    with open(path, 'w', encoding='utf-8') as checkpoint_file:
        config_parser.write(checkpoint_file)


def _depth_first(
    state: QualifyingWord,
    floor: int,
    max_length: int,
    node_cap: int,
    nodes: int = 0,
    longest: str = '',
    checkpointer: Optional[_Checkpointer] = None,
    stop_event: Optional[Event] = None,
) -> Tuple[SearchStatus, str, int]:
    """
    Lexicographic DFS below the current word, never shortening it below `floor`.

    Return the status, the first longest word met and the node count. A word
    of `max_length` letters or `node_cap` nodes ends the run.
    """
    choices = [ALPHABET.index(letter) + 1 for letter in state.letters[floor:]]
    longest_length = len(longest)
    pending = len(state) > longest_length
    longest_length = max(longest_length, len(state))
    next_letter = 0
    status = SearchStatus.TERMINATED

    while True:
        if len(state) >= max_length or nodes >= node_cap:
            status = SearchStatus.LIMIT_REACHED
            break
        if stop_event is not None and stop_event.is_set():
            status = SearchStatus.STOPPED
            break

        if next_letter < len(ALPHABET):
            if state.push(ALPHABET[next_letter]):
                nodes += 1
                choices.append(next_letter + 1)
                next_letter = 0
                if len(state) > longest_length:
                    longest_length = len(state)
                    pending = True
                if checkpointer is not None and nodes % checkpointer.every == 0:
                    if pending:
                        longest, pending = state.word, False
                    checkpointer.save(state.word, nodes, longest)
            else:
                state.pop()
                next_letter += 1
        elif choices:
            if pending:
                longest, pending = state.word, False
            state.pop()
            next_letter = choices.pop()
        else:
            break

    if pending:
        longest = state.word
    return status, longest, nodes


def _split(p: int, q: int, relaxed: bool, depth: int) -> List[str]:
    """Qualifying words of length 1..depth in the order a lexicographic walk visits them"""
    visits: List[str] = []
    state = QualifyingWord(p, q, relaxed)

    def _visit() -> None:
        if len(state) == depth:
            return
        for letter in ALPHABET:
            if state.push(letter):
                visits.append(state.word)
                _visit()
            state.pop()

    _visit()
    return visits


def _search_subtree(
    task: Tuple[int, int, bool, str, int, int]
) -> Tuple[SearchStatus, str, int]:
    p, q, relaxed, prefix, max_length, node_cap = task
    state = QualifyingWord.from_word(prefix, p, q, relaxed)
    return _depth_first(state, len(prefix), max_length, node_cap)


def _next_result(
    results: IMapIterator, stop_event: Optional[Event]
) -> Optional[Tuple[SearchStatus, str, int]]:
    """The next subtree result, or None once the stop event is set"""
    while stop_event is None or not stop_event.is_set():
        try:
            return results.next(timeout=STOP_POLL_SECONDS)
        except mp.TimeoutError:
            pass
    return None


def _parallel_backtrack(
    p: int,
    q: int,
    max_length: int,
    node_cap: int,
    relaxed: bool,
    stop_event: Optional[Event],
    threads: int,
) -> Tuple[SearchStatus, str, int]:
    """
    Same outcome as the sequential walk, with the subtrees below the words of
    length SPLIT_DEPTH searched by a pool.

    A subtree gets the budget left after the prefix words before it. Its
    result is taken as is only when it terminated within what the earlier
    subtrees left over; otherwise the subtree is walked again here with the
    exact node count, and that walk ends the run.
    """
    visits = _split(p, q, relaxed, SPLIT_DEPTH)
    tasks = []
    for index, word in enumerate(visits, 1):
        if index >= node_cap:
            break
        if len(word) == SPLIT_DEPTH:
            tasks.append((p, q, relaxed, word, max_length, node_cap - index))
    logger.debug('Split (%d, %d) into %d subtrees.', p, q, len(tasks))

    nodes = 0
    longest = ''
    if stop_event is not None and stop_event.is_set():
        return SearchStatus.STOPPED, longest, nodes

    with mp.Pool(threads) as pool:
        results = pool.imap(_search_subtree, tasks)
        for word in visits:
            nodes += 1
            if len(word) > len(longest):
                longest = word
            if nodes >= node_cap:
                return SearchStatus.LIMIT_REACHED, longest, nodes
            if len(word) < SPLIT_DEPTH:
                continue

            result = _next_result(results, stop_event)
            if result is None:
                return SearchStatus.STOPPED, longest, nodes
            sub_status, sub_longest, sub_nodes = result
            if sub_status is SearchStatus.TERMINATED and nodes + sub_nodes < node_cap:
                nodes += sub_nodes
                if len(sub_longest) > len(longest):
                    longest = sub_longest
                continue

            state = QualifyingWord.from_word(word, p, q, relaxed)
            status, longest, nodes = _depth_first(
                state, SPLIT_DEPTH, max_length, node_cap, nodes, longest, stop_event=stop_event
            )
            if status is not SearchStatus.TERMINATED:
                return status, longest, nodes
    return SearchStatus.TERMINATED, longest, nodes


def backtrack(
    p: int,
    q: int,
    max_length: int = 10**4,
    node_cap: int = 10**9,
    relaxed: bool = False,
    checkpoint: Optional[str] = None,
    checkpoint_every: int = 10**7,
    stop_event: Optional[Event] = None,
    threads: int = 1,
) -> SearchOutcome:
    """
    Look for the longest word that is square-free, square-free modulo p and
    square-free modulo q, in lexicographic order.

    The status is Terminated only if every qualifying word was visited, which
    proves that no infinite word exists for the pair. With `relaxed`, the word
    itself may contain squares.

    A single-worker search saves its position to `checkpoint` every
    `checkpoint_every` nodes and resumes from a matching checkpoint.
    """
    if p < 1 or q < 1:
        raise ArgumentError(f'Moduli must be positive, got ({p}, {q})')
    if max_length < 1 or node_cap < 1 or checkpoint_every < 1:
        raise ArgumentError('Search limits must be positive')

    logger.info(
        'Searching (%d, %d)%s up to length %d and %d nodes.',
        p,
        q,
        ' (relaxed)' if relaxed else '',
        max_length,
        node_cap,
    )

    if threads > 1 and max_length > SPLIT_DEPTH:
        if checkpoint:
            logger.warning('Checkpoints are only written by single-worker searches.')
        status, longest, nodes = _parallel_backtrack(
            p, q, max_length, node_cap, relaxed, stop_event, threads
        )
    else:
        status, longest, nodes = _sequential_backtrack(
            p, q, max_length, node_cap, relaxed, checkpoint, checkpoint_every, stop_event
        )

    if status is SearchStatus.LIMIT_REACHED and len(longest) < max_length:
        logger.warning('Search of (%d, %d) stopped at the node cap.', p, q)
    logger.info(
        'Search of (%d, %d): %s after %d nodes, longest word has length %d.',
        p,
        q,
        status.value,
        nodes,
        len(longest),
    )
    return SearchOutcome(p, q, status, longest, nodes, relaxed)


def _sequential_backtrack(
    p: int,
    q: int,
    max_length: int,
    node_cap: int,
    relaxed: bool,
    checkpoint: Optional[str],
    checkpoint_every: int,
    stop_event: Optional[Event],
) -> Tuple[SearchStatus, str, int]:
    state = QualifyingWord(p, q, relaxed)
    nodes = 0
    longest = ''
    checkpointer = None

    if checkpoint:
        checkpointer = _Checkpointer(checkpoint, checkpoint_every, p, q, relaxed)
        saved = read_checkpoint(checkpoint)
        if saved is not None and saved.matches(p, q, relaxed):
            if saved.status is not None:
                logger.info('Checkpoint %s holds a finished search.', checkpoint)
                return saved.status, saved.longest, saved.nodes
            state = QualifyingWord.from_word(saved.word, p, q, relaxed)
            nodes, longest = saved.nodes, saved.longest
            logger.info('Resuming at depth %d after %d nodes.', len(state), nodes)
        elif saved is not None:
            logger.warning('Checkpoint %s is for another search, starting over.', checkpoint)

    status, longest, nodes = _depth_first(
        state, 0, max_length, node_cap, nodes, longest, checkpointer, stop_event
    )
    if checkpointer is not None and status is SearchStatus.TERMINATED:
        checkpointer.save('', nodes, longest, status)
    return status, longest, nodes


def verify_positive_morphism(
    morphism: Morphism, p: int, q: int, alpha: int = 0
) -> MorphismCertificate:
    """
    Certify that the morphism turns square-free words into words that are
    square-free modulo p and modulo q.

    The image length must be a multiple of p and of q, so the subsequences of
    an image are images under g^(a,p) and g^(b,q). With `alpha`, the images are
    read without their first alpha letters.
    """
    if not morphism.is_uniform:
        raise ArgumentError(f'Morphism {morphism.name!r} is not uniform')
    for name, modulus in (('p', p), ('q', q)):
        if modulus < 1:
            raise ArgumentError(f'{name} must be positive, got {modulus}')
        if morphism.image_length % modulus:
            raise ArgumentError(
                f'Image length {morphism.image_length} is not a multiple of {name} = {modulus}'
            )
    if alpha < 0:
        raise ArgumentError(f'alpha must not be negative, got {alpha}')

    checks = {'g': crochemore_test(morphism)}
    for modulus in (p, q):
        derived = modular_morphism(morphism, alpha % modulus, modulus)
        checks[f'g^({alpha % modulus},{modulus})'] = crochemore_test(derived)

    certificate = MorphismCertificate(all(check.square_free for check in checks.values()), checks)
    logger.debug('Morphism %r for (%d, %d): %s.', morphism.name, p, q, certificate.verdict)
    return certificate


def reduce_noncoprime(p: int, q: int, k: int) -> ImplicationRecord:
    """Record that a word for (k p, k q) subsamples at step k to a relaxed word for (p, q)"""
    if min(p, q, k) < 1:
        raise ArgumentError(f'p, q and k must be positive, got ({p}, {q}, {k})')
    return ImplicationRecord(p, q, k)


@lru_cache(maxsize=None)
def load_pair_table() -> PairTable:
    """The bundled pair classification"""
    data = load_data(PAIRS_FILE)
    thresholds = data['thresholds']
    return PairTable(
        negative_pairs=frozenset(tuple(sorted(pair)) for pair in data['negative_pairs']),
        negative_families=tuple(
            ((int(family['base'][0]), int(family['base'][1])), str(family['name']))
            for family in data['negative_families']
        ),
        open_pairs=frozenset(tuple(sorted(pair)) for pair in data['open_pairs']),
        small_pairs_bound=int(data['small_pairs_bound']),
        large_min=int(thresholds['large_pairs']['min']),
        large_max_at_least=int(thresholds['large_pairs']['max_at_least']),
        p6_q_min=int(thresholds['p6']['q_min']),
        cited_p=frozenset(int(p) for p in thresholds['cited_circular']['p']),
        cited_p_from=int(thresholds['cited_circular']['p_from']),
        cited_q_factor=int(thresholds['cited_circular']['q_factor']),
    )


@lru_cache(maxsize=None)
def _circular_records() -> Dict[int, MorphismRecord]:
    return {record.p: record for record in load_circular_morphisms()}


def classify_pair(p: int, q: int) -> PairReport:
    """Decide the pair from the known families, searches and constructions"""
    # pylint: disable=too-many-return-statements
    if p < 1 or q < 1:
        raise ArgumentError(f'Moduli must be positive, got ({p}, {q})')
    p, q = sorted((p, q))
    table = load_pair_table()

    def _report(
        verdict: PairVerdict, evidence: EvidenceKind, detail: str = '', **extra
    ) -> PairReport:
        return PairReport(p, q, verdict, evidence, detail, **extra)

    if 2 in (p, q):
        return _report(
            PairVerdict.NEGATIVE,
            EvidenceKind.NEGATIVE_FAMILY,
            '(2, i): no long square-free word is square-free modulo 2',
        )
    for (a, b), name in table.negative_families:
        k, remainder = divmod(p, a)
        if not remainder and q == k * b:
            return _report(
                PairVerdict.NEGATIVE,
                EvidenceKind.NEGATIVE_FAMILY,
                f'{name} with t = {k}: ({a}, {b}) has no long relaxed word',
                implication=reduce_noncoprime(a, b, k),
            )
    if (p, q) in table.negative_pairs:
        return _report(
            PairVerdict.NEGATIVE,
            EvidenceKind.TERMINATED_SEARCH,
            'the backtracking search terminates',
        )
    if (p, q) in table.open_pairs:
        return _report(PairVerdict.UNKNOWN, EvidenceKind.NONE, 'left open')

    if gcd(p, q) == 1 and p >= table.large_min and q >= table.large_max_at_least:
        return _report(
            PairVerdict.POSITIVE,
            EvidenceKind.THEOREM_THRESHOLD,
            f'coprime p, q >= {table.large_min} with max(p, q) >= {table.large_max_at_least}',
        )
    if p == 6 and q >= table.p6_q_min:
        return _report(
            PairVerdict.POSITIVE, EvidenceKind.THEOREM_THRESHOLD, f'p = 6 and q >= {table.p6_q_min}'
        )
    record = _circular_records().get(p)
    if record is not None and q >= record.q_min:
        return _report(
            PairVerdict.POSITIVE,
            EvidenceKind.MORPHISM_CERTIFICATE,
            f'circular morphism g{p} (k = {record.k}, alpha = {record.alpha}), q >= {record.q_min}',
        )
    if (p in table.cited_p or p >= table.cited_p_from) and q >= table.cited_q_factor * p:
        return _report(
            PairVerdict.POSITIVE,
            EvidenceKind.THEOREM_THRESHOLD,
            f'square-free circular morphism of length {p}, q >= {table.cited_q_factor} p',
            replayable=False,
        )
    if q <= table.small_pairs_bound:
        return _report(
            PairVerdict.POSITIVE,
            EvidenceKind.THEOREM_THRESHOLD,
            f'explicit morphisms exist for the pairs up to {table.small_pairs_bound}',
            replayable=False,
        )
    return _report(PairVerdict.UNKNOWN, EvidenceKind.NONE)


def count_unresolved_pairs(bound: int) -> int:
    """Coprime pairs 3 <= p < q <= bound that classify_pair leaves unknown"""
    unresolved = sum(
        1
        for q in range(4, bound + 1)
        for p in range(3, q)
        if gcd(p, q) == 1 and classify_pair(p, q).verdict is PairVerdict.UNKNOWN
    )
    logger.info('%d unresolved coprime pairs up to %d.', unresolved, bound)
    return unresolved


def _block_codes(word: str, period: int) -> Counter:
    """Pansiot codes of the blocks starting at multiples of the period"""
    return Counter(
        pansiot_code(word[start : start + period + 2])
        for start in range(0, len(word) - period - 1, period)
    )


def _mining_word(
    p: int, q: int, allowed: Optional[Set[str]], period: int, length: int, word_budget: int
) -> Optional[str]:
    state = QualifyingWord(p, q, allowed_codes=allowed, block=period)
    _, longest, _ = _depth_first(state, 0, length, word_budget)
    return longest if len(longest) >= length else None


def _assemble_morphism(
    word: str, p: int, q: int, period: int, max_blocks: int
) -> Optional[Morphism]:
    """Try circular morphisms whose image of 0 is a block-aligned factor of the word"""
    for blocks in range(1, max_blocks + 1):
        size = blocks * period
        seen: Set[str] = set()
        for start in range(0, len(word) - size + 1, period):
            image = word[start : start + size]
            key = min(rotate(image, times) for times in range(len(ALPHABET)))
            if key in seen:
                continue
            seen.add(key)
            morphism = Morphism.circular(image, name=f'mined({p},{q})')
            if verify_positive_morphism(morphism, p, q).verdict:
                logger.info('Found a %d-uniform morphism for (%d, %d).', size, p, q)
                return morphism
    return None


def mine_pansiot(
    p: int,
    q: int,
    iterations: int = 200,
    word_budget: int = 10**6,
    max_blocks: int = MINING_MAX_BLOCKS,
) -> Optional[Morphism]:
    """
    Look for a morphism for (p, q) by narrowing down the Pansiot codes of
    length lcm(p, q) found at block boundaries.

    Each round builds a word of 50 blocks using only the surviving codes and
    forbids the rarest code. Pruning stops when no such word is found within
    `word_budget` nodes. A returned morphism has passed verify_positive_morphism.
    """
    period = lcm(p, q)
    if period > MINING_MAX_PERIOD:
        raise ResourceLimitError(f'lcm({p}, {q}) = {period} is above {MINING_MAX_PERIOD}')
    length = MINING_LENGTH_FACTOR * period

    word = _mining_word(p, q, None, period, length, word_budget)
    if word is None:
        logger.info('No word of length %d for (%d, %d) within the budget.', length, p, q)
        return None

    codes = _block_codes(word, period)
    allowed = set(codes)
    for _ in range(iterations):
        if len(allowed) <= 1:
            break
        rarest = min(sorted(allowed), key=lambda code: codes.get(code, 0))
        candidate = allowed - {rarest}
        candidate_word = _mining_word(p, q, candidate, period, length, word_budget)
        if candidate_word is None:
            break
        allowed, word = candidate, candidate_word
        codes = _block_codes(word, period)
    logger.info('%d Pansiot codes survive for (%d, %d).', len(allowed), p, q)

    return _assemble_morphism(word, p, q, period, max_blocks)


def _count_below(task: Tuple[int, int, str, int, int]) -> List[int]:
    """Counts by length of the qualifying words strictly extending the prefix"""
    p, q, prefix, n_max, node_cap = task
    state = QualifyingWord.from_word(prefix, p, q)
    counts = [0] * n_max
    nodes = 0
    choices: List[int] = []
    next_letter = 0

    while True:
        if next_letter < len(ALPHABET) and len(state) < n_max:
            if state.push(ALPHABET[next_letter]):
                counts[len(state) - 1] += 1
                nodes += 1
                if nodes > node_cap:
                    raise ResourceLimitError(f'Counting stopped after {node_cap} words')
                choices.append(next_letter + 1)
                next_letter = 0
            else:
                state.pop()
                next_letter += 1
        elif choices:
            state.pop()
            next_letter = choices.pop()
        else:
            return counts


def _add_counts(totals: List[int], counts: Iterable[int]) -> None:
    for index, count in enumerate(counts):
        totals[index] += count


def count_words(
    p: int, q: int, n_max: int, node_cap: int = COUNT_NODE_CAP, threads: int = 1
) -> GrowthCounts:
    """Number of square-free words, square-free modulo p and q, of each length 1..n_max"""
    if n_max < 1:
        raise ArgumentError(f'n_max must be positive, got {n_max}')
    if n_max > COUNT_MAX_LENGTH:
        raise ResourceLimitError(f'Counting is limited to length {COUNT_MAX_LENGTH}')

    if threads > 1 and n_max > SPLIT_DEPTH:
        visits = _split(p, q, False, SPLIT_DEPTH)
        roots = [word for word in visits if len(word) == SPLIT_DEPTH]
        counts = [0] * n_max
        for word in visits:
            counts[len(word) - 1] += 1
        tasks = [(p, q, root, n_max, node_cap) for root in roots]
        with mp.Pool(threads) as pool:
            for sub_counts in pool.imap(_count_below, tasks):
                _add_counts(counts, sub_counts)
    else:
        counts = _count_below((p, q, '', n_max, node_cap))

    logger.info('Counted the words for (%d, %d) up to length %d.', p, q, n_max)
    return GrowthCounts(p, q, counts)
