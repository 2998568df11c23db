"""
Shared fixtures for the pytest suite
"""

import io
import json
import os
import sys
from datetime import datetime, timezone

import networkx as nx
import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from graph_handler import USER, VIDEO, user_node, video_node  # noqa: E402
from ingest_handler import IngestHandler  # noqa: E402
from motif_handler import EgoNetwork  # noqa: E402
from synth_handler import (BackgroundConfig, Campaign1Config, Campaign2Config,  # noqa: E402
                           ScenarioConfig)

STAR_MOTIF = "n=5;colors=UVVVV;edges=0-1,0-2,0-3,0-4"


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-scale synthetic acceptance runs")


def make_record_line(comment_id, user, video, published_at, text, spam_hint=False):
    return json.dumps({
        'comment_id': comment_id,
        'user_id': user,
        'video_id': video,
        'published_at': published_at,
        'text': text,
        'spam_hint': spam_hint
    })


def parse_lines(lines):
    """Records from JSONL lines"""
    payload = ''.join(line + '\n' for line in lines).encode('utf-8')
    return IngestHandler().parse_comments(io.BytesIO(payload))


def colored_graph(users, videos, edges):
    """networkx graph in comment-network node key form"""
    graph = nx.Graph()
    for u in users:
        graph.add_node(user_node(u), color=USER)
    for v in videos:
        graph.add_node(video_node(v), color=VIDEO)
    for a, b in edges:
        graph.add_edge(a, b)
    return graph


def ego_of(graph, ego):
    return EgoNetwork(ego=ego, graph=graph)


@pytest.fixture
def utc_start():
    return datetime(2011, 11, 14, tzinfo=timezone.utc)


@pytest.fixture
def star_ego():
    """One user commenting on four videos"""
    videos = ['v1', 'v2', 'v3', 'v4']
    graph = colored_graph(['a'], videos, [(user_node('a'), video_node(v)) for v in videos])
    return ego_of(graph, 'a')


def small_scenario_config():
    """A four-window scenario small enough for the regular suite"""
    return ScenarioConfig(
        seed=7,
        n_windows=4,
        window_hours=6,
        background=BackgroundConfig(n_users=300, n_videos=60, active_users_per_window=200,
                                    multi_video_rate=0.4, max_videos=3, hint_rate=0.02),
        campaign1=Campaign1Config(n_accounts=2, videos_per_account=12, active_windows=(1,), variation_rate=0.05),
        campaign2=Campaign2Config(n_accounts=3, videos_per_account=2, active_windows=(2,), variation_rate=0.1)
    )


@pytest.fixture
def small_scenario():
    return small_scenario_config()
