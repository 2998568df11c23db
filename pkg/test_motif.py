"""
Tests for ego networks, ESU enumeration and canonical motif ids
"""

import itertools
import random

import networkx as nx
import pytest

from conftest import STAR_MOTIF, colored_graph, ego_of
from graph_handler import GraphHandler, user_node, video_node
from motif_handler import (MotifHandler, all_motif_ids, brute_force_counts, canonical_form, canonical_motif,
                           ego_motif_counts, ego_network, enumerate_connected_subgraphs, parse_motif_id,
                           render_motif)


def random_colored_graph(rng, n_nodes, density):
    n_users = rng.randint(1, n_nodes)
    users = [f"u{i:02d}" for i in range(n_users)]
    videos = [f"v{i:02d}" for i in range(n_nodes - n_users)]
    edges = []
    for a, b in itertools.combinations(users, 2):
        if rng.random() < density:
            edges.append((user_node(a), user_node(b)))
    for a in users:
        for v in videos:
            if rng.random() < density:
                edges.append((user_node(a), video_node(v)))
    return colored_graph(users, videos, edges), users


def random_ego_cases(seed, count, min_nodes, max_nodes):
    rng = random.Random(seed)
    for _ in range(count):
        graph, users = random_colored_graph(rng, rng.randint(min_nodes, max_nodes), rng.choice([0.1, 0.25, 0.5, 0.8]))
        yield ego_of(graph, rng.choice(users))


def test_star_fixture_counts(star_ego):
    profile = ego_motif_counts(star_ego)

    assert profile.counts == {
        "n=3;colors=UVV;edges=0-1,0-2": 6,
        "n=4;colors=UVVV;edges=0-1,0-2,0-3": 4,
        STAR_MOTIF: 1
    }


def test_path_and_triangle_fixtures():
    path = colored_graph(['a', 'b'], ['v'], [(user_node('a'), video_node('v')), (user_node('b'), video_node('v'))])
    assert ego_motif_counts(ego_of(path, 'a')).counts == {"n=3;colors=UUV;edges=0-2,1-2": 1}

    triangle = colored_graph(['a', 'b', 'c'], [], [(user_node('a'), user_node('b')),
                                                   (user_node('b'), user_node('c')),
                                                   (user_node('a'), user_node('c'))])
    assert ego_motif_counts(ego_of(triangle, 'a')).counts == {"n=3;colors=UUU;edges=0-1,0-2,1-2": 1}


def test_isolated_ego_has_empty_profile():
    graph = colored_graph(['a'], [], [])
    assert ego_motif_counts(ego_of(graph, 'a')).counts == {}


def test_esu_matches_oracle_on_random_graphs():
    for eg in random_ego_cases(seed=2011, count=100, min_nodes=3, max_nodes=14):
        assert ego_motif_counts(eg).counts == brute_force_counts(eg).counts


def test_esu_matches_oracle_on_larger_sparse_graphs():
    rng = random.Random(17)
    for _ in range(5):
        graph, users = random_colored_graph(rng, 30, 0.08)
        eg = ego_of(graph, users[0])
        assert ego_motif_counts(eg).counts == brute_force_counts(eg).counts


def test_oracle_refuses_large_graphs():
    rng = random.Random(3)
    graph, users = random_colored_graph(rng, 31, 0.1)
    with pytest.raises(ValueError):
        brute_force_counts(ego_of(graph, users[0]))


def test_enumeration_emits_each_connected_set_once():
    for eg in random_ego_cases(seed=5, count=20, min_nodes=4, max_nodes=10):
        for size in (3, 4, 5):
            found = list(enumerate_connected_subgraphs(eg, size))
            expected = {frozenset(c) for c in itertools.combinations(eg.graph.nodes, size)
                        if nx.is_connected(eg.graph.subgraph(c))}
            assert len(found) == len(set(found))
            assert set(found) == expected


def test_invalid_motif_size():
    graph = colored_graph(['a'], [], [])
    with pytest.raises(ValueError):
        list(enumerate_connected_subgraphs(ego_of(graph, 'a'), 6))
    with pytest.raises(ValueError):
        MotifHandler(sizes=(2, 3))


def test_uncolored_census():
    for n, expected in ((3, 2), (4, 6), (5, 21)):
        pairs = list(itertools.combinations(range(n), 2))
        classes = set()
        for r in range(n - 1, len(pairs) + 1):
            for chosen in itertools.combinations(pairs, r):
                try:
                    classes.add(canonical_form('U' * n, frozenset(chosen)))
                except ValueError:
                    pass
        assert len(classes) == expected


def test_canonical_form_invariant_under_relabelling():
    rng = random.Random(8)
    for eg in random_ego_cases(seed=11, count=30, min_nodes=5, max_nodes=9):
        for nodes in itertools.islice(enumerate_connected_subgraphs(eg, 5), 10):
            ordered = list(nodes)
            rng.shuffle(ordered)
            sub = eg.graph.subgraph(ordered)
            mapping = {node: f"X{i}" for i, node in enumerate(ordered)}
            relabelled = nx.relabel_nodes(sub, mapping)
            assert canonical_motif(relabelled.nodes, ego_of(relabelled, 'ignored')) == canonical_motif(nodes, eg)


def test_colors_distinguish_motifs():
    path_uvu = canonical_form('UVU', frozenset({(0, 1), (1, 2)}))
    path_vuv = canonical_form('VUV', frozenset({(0, 1), (1, 2)}))
    assert path_uvu != path_vuv
    assert path_vuv == "n=3;colors=UVV;edges=0-1,0-2"


def test_disconnected_subgraph_rejected():
    with pytest.raises(ValueError):
        canonical_form('UUV', frozenset({(0, 1)}))


def test_ego_network_radius():
    graph = colored_graph(['a', 'b', 'c'], ['v1', 'v2'], [
        (user_node('a'), video_node('v1')),
        (user_node('b'), video_node('v1')),
        (user_node('b'), video_node('v2')),
        (user_node('c'), video_node('v2')),
    ])
    handler = GraphHandler()
    net = handler.build_network([])
    net.graph = graph

    assert set(ego_network(net, 'a', 2).graph.nodes) == {user_node('a'), video_node('v1'), user_node('b')}
    assert set(ego_network(net, 'a', 1).graph.nodes) == {user_node('a'), video_node('v1')}
    with pytest.raises(KeyError):
        ego_network(net, 'zed')


def test_catalogue_contents():
    ids = all_motif_ids()

    assert STAR_MOTIF in ids
    assert len(ids) == len(set(ids))
    for motif in ids:
        colors, edges = parse_motif_id(motif)
        assert canonical_form(colors, frozenset(edges)) == motif
        assert all(colors[a] == 'U' or colors[b] == 'U' for a, b in edges)


def test_observed_motifs_are_catalogued():
    catalogue = set(all_motif_ids())
    for eg in random_ego_cases(seed=23, count=20, min_nodes=4, max_nodes=12):
        assert set(ego_motif_counts(eg).counts) <= catalogue


def test_render_motif():
    text = render_motif(STAR_MOTIF)
    lines = text.splitlines()
    assert lines[0] == STAR_MOTIF
    assert lines[1] == "  0:U -- 1:V, 2:V, 3:V, 4:V"
    assert len(lines) == 6


def test_parse_malformed_motif_id():
    with pytest.raises(ValueError):
        parse_motif_id("n=3;colors=UU;edges=0-1")
    with pytest.raises(ValueError):
        parse_motif_id("garbage")


def test_count_network_independent_of_workers():
    rng = random.Random(41)
    graph, _ = random_colored_graph(rng, 20, 0.2)
    for node in graph.nodes:
        graph.nodes[node]['label'] = 'regular'
    net = GraphHandler().build_network([])
    net.graph = graph

    serial = MotifHandler(threads=1).count_network(net)
    parallel = MotifHandler(threads=2).count_network(net)

    assert [p.ego for p in serial] == sorted(net.users)
    assert [(p.ego, p.counts) for p in serial] == [(p.ego, p.counts) for p in parallel]
