import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from truzz.scheduler import CampaignError, Corpus, Policy, SchedulerConfig, dry_run
from truzz.target import ExecResult, ExecStatus


def result(edges):
    return ExecResult(path=frozenset(edges), exec_status=ExecStatus.NORMAL, valid=True)


def path_runner(table):
    """Map input bytes -> fixed paths, mimicking a deterministic target."""
    return lambda data: result(table[data])


class TestDryRun:
    def test_ranks_are_marginal_new_edge_counts(self):
        table = {b"A": set(range(1, 11)), b"B": set(range(5, 13))}
        corpus = dry_run([b"A", b"B"], path_runner(table), map_size=64)
        ranks = {e.data: e.rank_key for e in corpus.entries}
        assert ranks == {b"A": 10, b"B": 2}
        assert corpus.covered == set(range(1, 13))

    def test_duplicate_coverage_seed_dropped(self):
        table = {b"A": {1, 2, 3}, b"B": {1, 2}}
        corpus = dry_run([b"A", b"B"], path_runner(table), map_size=64)
        assert [e.data for e in corpus.entries] == [b"A"]

    def test_order_dependence_of_ranking(self):
        table = {b"A": {1, 2, 3}, b"B": {2, 3, 4, 5}}
        forward = dry_run([b"A", b"B"], path_runner(table), map_size=64)
        backward = dry_run([b"B", b"A"], path_runner(table), map_size=64)
        assert {e.data: e.rank_key for e in forward.entries} == {b"A": 3, b"B": 2}
        assert {e.data: e.rank_key for e in backward.entries} == {b"B": 4, b"A": 1}

    def test_result_sorted_descending(self):
        table = {b"A": {1}, b"B": set(range(10, 30)), b"C": {2, 3}}
        corpus = dry_run([b"A", b"B", b"C"], path_runner(table), map_size=64)
        assert corpus.is_sorted()
        assert [e.data for e in corpus.entries] == [b"B", b"C", b"A"]

    def test_no_seeds_rejected(self):
        with pytest.raises(CampaignError):
            dry_run([], path_runner({}), map_size=64)

    def test_all_empty_paths_rejected(self):
        table = {b"A": set(), b"B": set()}
        with pytest.raises(CampaignError, match="zero new edges"):
            dry_run([b"A", b"B"], path_runner(table), map_size=64)


def seeded_corpus(ranks):
    corpus = Corpus(map_size=64)
    for name, rank in ranks.items():
        corpus.add_entry(name.encode(), frozenset({ord(name)}), rank)
    corpus.sort()
    return corpus


class TestSelection:
    def test_truzz_picks_max_rank(self):
        corpus = seeded_corpus({"A": 3, "B": 9, "C": 5})
        assert corpus.select_seed(Policy.TRUZZ).data == b"B"

    def test_truzz_tie_broken_by_insertion_order(self):
        corpus = seeded_corpus({"A": 3, "B": 7, "C": 7})
        assert corpus.select_seed(Policy.TRUZZ).data == b"B"

    def test_truzz_zero_ranks_round_robin(self):
        corpus = seeded_corpus({"A": 0, "B": 0, "C": 0})
        picks = [corpus.select_seed(Policy.TRUZZ).data for _ in range(6)]
        assert picks == [b"A", b"B", b"C", b"A", b"B", b"C"]

    def test_fifo_cycles_in_insertion_order(self):
        corpus = seeded_corpus({"A": 1, "B": 99, "C": 5})
        picks = [corpus.select_seed(Policy.FIFO).data for _ in range(7)]
        assert picks == [b"A", b"B", b"C", b"A", b"B", b"C", b"A"]

    def test_empty_corpus_selection_fails(self):
        with pytest.raises(CampaignError):
            Corpus(map_size=64).select_seed(Policy.TRUZZ)

    def test_times_selected_counter(self):
        corpus = seeded_corpus({"A": 1})
        for _ in range(3):
            corpus.select_seed(Policy.TRUZZ)
        assert corpus.entries[0].times_selected == 3


class TestRetention:
    def test_new_edges_retained_with_rank(self):
        corpus = seeded_corpus({"A": 3})
        corpus.merge(frozenset({ord("A")}))
        entry = corpus.retain_if_new(b"X", result({ord("A"), 200, 201}))
        assert entry is not None and entry.rank_key == 2
        assert corpus.covered == {ord("A"), 200, 201}

    def test_no_new_edges_not_retained_but_merged(self):
        corpus = seeded_corpus({"A": 3})
        corpus.merge(frozenset({ord("A")}))
        before = corpus.version
        assert corpus.retain_if_new(b"X", result({ord("A")})) is None
        assert corpus.version == before

    def test_merge_bumps_version_only_on_growth(self):
        corpus = Corpus(map_size=64)
        assert corpus.merge(frozenset({1, 2})) == 2
        v = corpus.version
        assert corpus.merge(frozenset({2})) == 0
        assert corpus.version == v
        assert corpus.merge(frozenset({3})) == 1
        assert corpus.version == v + 1


class TestRankUpdate:
    def test_rank_replaced_not_accumulated(self):
        corpus = seeded_corpus({"A": 5})
        entry = corpus.entries[0]
        corpus.update_rank(entry, 2)
        assert entry.rank_key == 2

    def test_update_resorts(self):
        corpus = seeded_corpus({"A": 9, "B": 5})
        top = corpus.entries[0]
        assert top.data == b"A"
        corpus.update_rank(top, 1)
        assert corpus.entries[0].data == b"B"
        assert corpus.is_sorted()

    def test_unknown_entry_rejected(self):
        corpus = seeded_corpus({"A": 1})
        stranger = seeded_corpus({"B": 1}).entries[0]
        with pytest.raises(CampaignError):
            corpus.update_rank(stranger, 3)


class TestConfig:
    def test_policy_string_coerced(self):
        assert SchedulerConfig(policy="fifo").policy is Policy.FIFO
        assert SchedulerConfig(policy="truzz").policy is Policy.TRUZZ

    def test_nonpositive_energy_rejected(self):
        with pytest.raises(ValueError):
            SchedulerConfig(energy=0)


@settings(max_examples=100)
@given(st.lists(st.sets(st.integers(0, 63), max_size=20), min_size=1, max_size=12))
def test_dry_run_matches_greedy_set_oracle(edge_sets):
    table = {bytes([i]): s for i, s in enumerate(edge_sets)}
    seeds = list(table)

    covered, expected = set(), {}
    for data in seeds:
        new = table[data] - covered
        if new:
            expected[data] = len(new)
        covered |= table[data]

    if not expected:
        with pytest.raises(CampaignError):
            dry_run(seeds, path_runner(table), map_size=64)
        return
    corpus = dry_run(seeds, path_runner(table), map_size=64)
    assert {e.data: e.rank_key for e in corpus.entries} == expected
    assert corpus.covered == covered
    assert corpus.is_sorted()


@settings(max_examples=100)
@given(
    st.lists(st.integers(0, 30), min_size=1, max_size=8),
    st.lists(st.tuples(st.integers(0, 7), st.integers(0, 30)), max_size=30),
)
def test_sorted_invariant_under_random_updates(initial_ranks, updates):
    corpus = Corpus(map_size=64)
    for i, rank in enumerate(initial_ranks):
        corpus.add_entry(bytes([i]), frozenset({i}), rank)
    corpus.sort()
    for which, new_rank in updates:
        entry = corpus.entries[which % len(corpus.entries)]
        corpus.update_rank(entry, new_rank)
        assert corpus.is_sorted()
        assert entry.rank_key == new_rank
