"""Ranked seed corpus: dry run, selection, retention, rank updates.

A seed's rank key is the number of new edges its path contributed when it
was last scored. Selection takes the top-ranked seed; after a seed's
mutation round, its rank is replaced by the number of new edges the whole
round discovered, so seeds that stop producing sink down the order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .byte_analysis import FitnessMap, MutationMask
from .coverage import Bitmap, Path
from .target import ExecResult


class CampaignError(RuntimeError):
    """The campaign cannot proceed (e.g. no seed yields coverage)."""


class Policy(enum.Enum):
    TRUZZ = "truzz"   # highest rank key first
    FIFO = "fifo"     # cyclic by insertion order (vanilla baseline)


@dataclass
class SchedulerConfig:
    energy: int = 1024
    policy: Policy = Policy.TRUZZ

    def __post_init__(self):
        if isinstance(self.policy, str):
            self.policy = Policy(self.policy)
        if self.energy < 1:
            raise ValueError(f"energy must be >= 1, got {self.energy}")


@dataclass
class SeedAnalysis:
    fitness: FitnessMap
    mask: MutationMask


@dataclass
class SeedEntry:
    id: int
    data: bytes
    path: Path                       # fixed at retention time
    rank_key: int
    insertion_order: int
    analysis: Optional[SeedAnalysis] = None
    times_selected: int = 0


class Corpus:
    """Seed entries plus the campaign's overall covered-edge set.

    ``version`` increments whenever overall coverage grows, letting callers
    cheaply invalidate "this path adds nothing new" caches.
    """

    def __init__(self, map_size: int):
        self.map_size = map_size
        self.entries: list[SeedEntry] = []
        self.covered: set[int] = set()
        self.version = 0
        self._next_id = 0
        self._fifo_cursor = 0
        self._zero_cursor = 0

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def edges_covered(self) -> int:
        return len(self.covered)

    def overall_bitmap(self) -> Bitmap:
        return Bitmap.from_edges(self.covered, self.map_size)

    # -- retention ----------------------------------------------------------

    def merge(self, path: Path) -> int:
        """Fold a path into overall coverage; returns the new-edge count."""
        new = path - self.covered
        if new:
            self.covered |= new
            self.version += 1
        return len(new)

    def add_entry(self, data: bytes, path: Path, rank_key: int) -> SeedEntry:
        entry = SeedEntry(
            id=self._next_id,
            data=data,
            path=path,
            rank_key=rank_key,
            insertion_order=self._next_id,
        )
        self._next_id += 1
        self.entries.append(entry)
        return entry

    def retain_if_new(self, data: bytes, result: ExecResult) -> Optional[SeedEntry]:
        """Keep ``data`` as a seed iff its path has edges not covered yet.

        Overall coverage is merged with the result's path either way.
        """
        n_new = len(result.path - self.covered)
        entry = None
        if n_new > 0:
            entry = self.add_entry(data, result.path, n_new)
        self.merge(result.path)
        return entry

    # -- selection ----------------------------------------------------------

    def select_seed(self, policy: Policy) -> SeedEntry:
        if not self.entries:
            raise CampaignError("corpus is empty")
        if policy is Policy.FIFO:
            ordered = sorted(self.entries, key=lambda e: e.insertion_order)
            entry = ordered[self._fifo_cursor % len(ordered)]
            self._fifo_cursor += 1
        else:
            entry = max(
                self.entries, key=lambda e: (e.rank_key, -e.insertion_order)
            )
            if entry.rank_key == 0:
                # Starvation guard: round-robin when every rank is zero.
                ordered = sorted(self.entries, key=lambda e: e.insertion_order)
                entry = ordered[self._zero_cursor % len(ordered)]
                self._zero_cursor += 1
        entry.times_selected += 1
        return entry

    # -- ranking ------------------------------------------------------------

    def update_rank(self, entry: SeedEntry, n_all: int) -> None:
        """Replace the seed's rank with the round's new-edge total, re-sort."""
        if entry not in self.entries:
            raise CampaignError(f"seed {entry.id} not in corpus")
        entry.rank_key = n_all
        self.sort()

    def sort(self) -> None:
        self.entries.sort(key=lambda e: (-e.rank_key, e.insertion_order))

    def is_sorted(self) -> bool:
        keys = [(-e.rank_key, e.insertion_order) for e in self.entries]
        return keys == sorted(keys)


def dry_run(
    initial_seeds: Sequence[bytes],
    run: Callable[[bytes], ExecResult],
    map_size: int,
) -> Corpus:
    """Execute the initial seeds in order and rank the keepers.

    A seed is retained with rank = its new-edge count against the coverage
    accumulated so far; duplicate-coverage seeds are discarded. Raises
    CampaignError when no seed contributes any coverage.
    """
    if not initial_seeds:
        raise CampaignError("no initial seeds")
    corpus = Corpus(map_size)
    for data in initial_seeds:
        result = run(data)
        n_new = len(result.path - corpus.covered)
        if n_new > 0:
            corpus.add_entry(data, result.path, n_new)
        corpus.merge(result.path)
    if not corpus.entries:
        raise CampaignError("every initial seed yielded zero new edges")
    corpus.sort()
    return corpus
