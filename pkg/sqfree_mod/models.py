"""Models"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, FrozenSet, List, Optional, Tuple

from .words import Pattern


@dataclass(frozen=True)
class CrtOffsets:
    """Distances between the multiples of p congruent to +-1 modulo q"""
    a: int
    b: int


@dataclass(frozen=True)
class StarConstraint:
    """A letter forced (or forbidden) at an index of the subsequence modulo p"""
    index: int
    letter: str
    forbidden: bool = False
    source_index: int = 0

    def holds(self, word: str) -> bool:
        return (word[self.index] != self.letter) if self.forbidden else (
            word[self.index] == self.letter
        )


@dataclass
class CrochemoreVerdict:
    """Result of the finite square-freeness test of a morphism"""
    square_free: bool
    test_length: int
    witness: Optional[str] = None
    image: Optional[str] = None
    square: Optional[Tuple[int, int]] = None


@dataclass
class RecurrenceCertificate:
    """Whether a pattern occurs within delta in every factor of h26 images"""
    pattern: Pattern
    delta: int
    factor_length: int
    verdict: bool
    witness: Optional[str] = None
    max_first_occurrence: Optional[int] = None
    factor_count: int = 0


@dataclass(frozen=True)
class ConstructionWitness:
    """A guiding sequence placing a pattern early in the image of a pre-image"""
    preimage: str
    gamma: Tuple[int, ...]
    position: Optional[int]


@dataclass
class ConstructibilityCertificate:
    """Best guiding sequence for every square-free pre-image of a fixed length"""
    pattern: Pattern
    delta: int
    preimage_length: int
    witnesses: Dict[str, ConstructionWitness]
    verdict: bool

    def witness_for(self, preimage: str) -> ConstructionWitness:
        return self.witnesses[preimage]


@dataclass(frozen=True)
class AnalyticWitness:
    """First guiding value making a <>^delta b occur at `position`"""
    a: str
    b: str
    delta: int
    preimage: str
    first_gamma: int
    position: int


@dataclass
class LemmaCheck:
    """One row of the lemma constant report"""
    name: str
    description: str
    verdict: bool
    delta: Optional[int] = None
    factor_length: Optional[int] = None
    preimage_length: Optional[int] = None
    patterns: int = 0
    failures: List[str] = field(default_factory=list)
    seconds: float = 0.0


@dataclass
class LemmaReport:
    checks: List[LemmaCheck] = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return all(check.verdict for check in self.checks)

    def failed(self) -> List[LemmaCheck]:
        return [check for check in self.checks if not check.verdict]


class SearchStatus(Enum):
    TERMINATED = 'Terminated'
    LIMIT_REACHED = 'LimitReached'
    STOPPED = 'Stopped'


@dataclass
class SearchOutcome:
    """Result of a backtracking run"""
    p: int
    q: int
    status: SearchStatus
    longest: str
    nodes_expanded: int
    relaxed: bool = False

    @property
    def longest_length(self) -> int:
        return len(self.longest)


@dataclass
class SearchCheckpoint:
    """Where a single-worker backtracking run stood when it was saved"""
    p: int
    q: int
    relaxed: bool
    word: str
    nodes: int
    longest: str
    status: Optional[SearchStatus] = None

    def matches(self, p: int, q: int, relaxed: bool) -> bool:
        return (self.p, self.q, self.relaxed) == (p, q, relaxed)


class PairVerdict(Enum):
    POSITIVE = 'positive'
    NEGATIVE = 'negative'
    UNKNOWN = 'unknown'


class EvidenceKind(Enum):
    MORPHISM_CERTIFICATE = 'morphism certificate'
    TERMINATED_SEARCH = 'terminated search'
    THEOREM_THRESHOLD = 'theorem threshold'
    NEGATIVE_FAMILY = 'negative family'
    NONE = 'none'


@dataclass(frozen=True)
class ImplicationRecord:
    """Positivity of (k p, k q) implies relaxed positivity of (p, q)"""
    p: int
    q: int
    k: int

    @property
    def scaled(self) -> Tuple[int, int]:
        return self.k * self.p, self.k * self.q

    def describe(self) -> str:
        scaled_p, scaled_q = self.scaled
        return (
            f'a word square-free modulo {scaled_p} and {scaled_q} subsamples at step {self.k}'
            f' to a word square-free modulo {self.p} and {self.q}'
        )


@dataclass(frozen=True)
class PairTable:
    """Known negative pairs, open pairs and the thresholds of the positive constructions"""
    negative_pairs: FrozenSet[Tuple[int, int]]
    negative_families: Tuple[Tuple[Tuple[int, int], str], ...]
    open_pairs: FrozenSet[Tuple[int, int]]
    small_pairs_bound: int
    large_min: int
    large_max_at_least: int
    p6_q_min: int
    cited_p: FrozenSet[int]
    cited_p_from: int
    cited_q_factor: int


@dataclass
class PairReport:
    """Classification of a pair with the evidence backing it"""
    p: int
    q: int
    verdict: PairVerdict
    evidence: EvidenceKind
    detail: str = ''
    replayable: bool = True
    implication: Optional[ImplicationRecord] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'p': self.p,
            'q': self.q,
            'verdict': self.verdict.value,
            'evidence': self.evidence.value,
            'detail': self.detail,
            'replayable': self.replayable,
        }


@dataclass
class MorphismCertificate:
    """Crochemore verdicts of a morphism and its modular derivatives"""
    verdict: bool
    checks: Dict[str, CrochemoreVerdict]

    def failing(self) -> List[str]:
        return [name for name, check in self.checks.items() if not check.square_free]


@dataclass(frozen=True)
class MorphismRecord:
    """One bundled circular morphism row"""
    p: int
    k: int
    alpha: int
    q_min: int
    image: str


@dataclass
class GrowthCounts:
    p: int
    q: int
    counts: List[int]

    @property
    def roots(self) -> List[float]:
        return [count ** (1 / n) if count else 0.0 for n, count in enumerate(self.counts, start=1)]

    @property
    def ratios(self) -> List[Optional[float]]:
        return [
            current / previous if previous else None
            for previous, current in zip(self.counts, self.counts[1:])
        ]


@dataclass
class RunReport:
    """What a CLI command did and what it concluded"""
    command: str
    parameters: Dict[str, Any] = field(default_factory=dict)
    verdict: str = ''
    evidence_path: Optional[str] = None
    details: Dict[str, Any] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> RunReport:
        return cls(**json.loads(text))

    def to_text(self) -> str:
        lines = [f'command: {self.command}', f'verdict: {self.verdict}']
        lines.extend(f'{key}: {value}' for key, value in sorted(self.parameters.items()))
        if self.evidence_path:
            lines.append(f'evidence: {self.evidence_path}')
        lines.extend(f'{key}: {value}' for key, value in sorted(self.details.items()))
        lines.extend(f'time[{key}]: {value:.3f}s' for key, value in sorted(self.timings.items()))
        return '\n'.join(lines)
