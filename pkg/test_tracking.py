"""
Tests for motif series, user rankings and discriminating motifs
"""

import pytest

from conftest import STAR_MOTIF
from graph_handler import REGULAR, SPAM, GraphHandler
from motif_handler import MotifProfile
from tracking_handler import TrackingHandler, min_max


def network_with_edges(n_edges):
    net = GraphHandler().build_network([])
    for i in range(n_edges):
        net.graph.add_edge(f"U:u{i}", f"V:v{i}")
    return net


@pytest.fixture
def tracker():
    return TrackingHandler()


def test_min_max_known_series():
    assert min_max([0.1, 0.3, 0.2]) == pytest.approx([0.0, 1.0, 0.5])
    assert min_max([2.0, 2.0, 2.0]) == [0.0, 0.0, 0.0]


def test_min_max_affine_invariant():
    values = [0.3, 1.7, 0.0, 4.2, 2.2]
    assert min_max([3.0 * v + 11.0 for v in values]) == pytest.approx(min_max(values))


def test_series_normalizes_by_edge_count(tracker):
    windows = [
        (network_with_edges(10), [MotifProfile('a', {'m': 1}), MotifProfile('b', {'m': 0})]),
        (network_with_edges(10), [MotifProfile('a', {'m': 3})]),
        (network_with_edges(20), [MotifProfile('a', {'m': 4})]),
    ]

    series = tracker.motif_series(windows, 'm')

    assert series.raw == [1, 3, 4]
    assert series.edge_normalized == pytest.approx([0.1, 0.3, 0.2])
    assert series.normalized == pytest.approx([0.0, 1.0, 0.5])


def test_series_empty_window_contributes_zero(tracker):
    windows = [
        (None, []),
        (network_with_edges(4), [MotifProfile('a', {'m': 2})]),
        (network_with_edges(0), []),
    ]

    series = tracker.motif_series(windows, 'm')

    assert series.raw == [0, 2, 0]
    assert series.normalized == [0.0, 1.0, 0.0]


def test_series_needs_a_window(tracker):
    with pytest.raises(ValueError):
        tracker.motif_series([], 'm')


def test_rank_drops_zero_counts(tracker):
    profiles = [MotifProfile('a', {'m': 10}), MotifProfile('b', {'m': 3}), MotifProfile('c', {})]

    ranking = tracker.rank_users_by_motif(profiles, 'm', {'a': SPAM}, window=4)

    assert ranking.window == 4
    assert ranking.entries == [('a', 10, SPAM), ('b', 3, REGULAR)]


def test_rank_ties_by_user_id(tracker):
    profiles = [MotifProfile('zed', {'m': 5}), MotifProfile('amy', {'m': 5}), MotifProfile('kim', {'m': 9})]
    ranking = tracker.rank_users_by_motif(profiles, 'm', {})
    assert [e[0] for e in ranking.entries] == ['kim', 'amy', 'zed']


def test_discriminating_prefers_spam_heavy_motifs(tracker):
    profiles = [
        MotifProfile('s1', {STAR_MOTIF: 90, 'path': 10}),
        MotifProfile('s2', {STAR_MOTIF: 80, 'path': 20}),
        MotifProfile('r1', {'path': 10}),
        MotifProfile('r2', {'path': 5, 'tri': 5}),
    ]
    labels = {'s1': SPAM, 's2': SPAM, 'r1': REGULAR, 'r2': REGULAR}

    ranked = tracker.discriminating_motifs(profiles, labels, top_n=3)

    assert [m for m, _ in ranked] == [STAR_MOTIF, 'tri', 'path']
    assert ranked[0][1] == pytest.approx(0.85)
    assert ranked[2][1] == pytest.approx(0.15 - 0.75)


def test_discriminating_needs_both_classes(tracker):
    profiles = [MotifProfile('a', {'m': 1}), MotifProfile('b', {'m': 2})]
    with pytest.raises(ValueError):
        tracker.discriminating_motifs(profiles, {'a': SPAM, 'b': SPAM})
    with pytest.raises(ValueError):
        tracker.discriminating_motifs(profiles, {})


def test_discriminating_all_zero_profiles(tracker):
    profiles = [MotifProfile('a', {'m': 0, 'n': 0}), MotifProfile('b', {'m': 0, 'n': 0})]
    ranked = tracker.discriminating_motifs(profiles, {'a': SPAM, 'b': REGULAR})
    assert ranked == [('m', 0.0), ('n', 0.0)]


def test_tracked_motifs_union(tracker):
    per_window = [[('a', 0.5), ('b', 0.1)], [], [('c', 0.2), ('a', 0.1)]]
    assert tracker.tracked_motifs(per_window, extra=['z']) == ['a', 'b', 'c', 'z']


def test_top_motifs_validation():
    with pytest.raises(ValueError):
        TrackingHandler(top_motifs=0)


def test_discriminating_empty_profiles_score_candidates_zero(tracker):
    profiles = [MotifProfile('a', {}), MotifProfile('b', {})]
    labels = {'a': SPAM, 'b': REGULAR}

    assert tracker.discriminating_motifs(profiles, labels) == []
    assert tracker.discriminating_motifs(profiles, labels, candidates=[STAR_MOTIF, 'm']) == [
        ('m', 0.0), (STAR_MOTIF, 0.0)]


def test_candidates_join_observed_support(tracker):
    profiles = [MotifProfile('s', {'m': 4}), MotifProfile('r', {'m': 1, 'n': 1})]

    ranked = tracker.discriminating_motifs(profiles, {'s': SPAM, 'r': REGULAR}, top_n=5, candidates=['z'])

    assert dict(ranked) == pytest.approx({'m': 0.5, 'n': -0.5, 'z': 0.0})


def test_tracking_counters(tracker):
    profiles = [MotifProfile('a', {'m': 2}), MotifProfile('b', {'m': 1})]
    tracker.motif_series([(network_with_edges(2), profiles)], 'm')
    tracker.rank_users_by_motif(profiles, 'm', {})
    tracker.rank_users_by_motif(profiles, 'n', {})
    tracker.discriminating_motifs(profiles, {'a': SPAM, 'b': REGULAR})

    assert tracker.get_stats() == {'series_built': 1, 'rankings_built': 2, 'windows_scored': 1}
