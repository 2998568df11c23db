"""
Comment Network Handler
Builds the per-window user/video comment network with similarity edges,
prunes single-video users and labels users from spam hints
"""

import logging
import os
from collections import Counter, defaultdict
from typing import Dict, Iterable, List, Optional, Tuple

import networkx as nx

from ingest_handler import CommentRecord
from text_handler import NormalizedComment, jaccard_distance

logger = logging.getLogger(__name__)

USER = 'user'
VIDEO = 'video'
SPAM = 'spam'
REGULAR = 'regular'

COMMENT_EDGE = 'comment'
SIMILARITY_EDGE = 'similarity'

DEFAULT_SIMILARITY_THRESHOLD = 0.6


def user_node(user_id: str) -> str:
    return f"U:{user_id}"


def video_node(video_id: str) -> str:
    return f"V:{video_id}"


def node_id(node: str) -> str:
    """Original user or video id of a network node key"""
    return node[2:]


class CommentNetwork:
    """
    Undirected 2-colored network of users and videos

    Node keys are 'U:<user_id>' / 'V:<video_id>' with a 'color' attribute;
    user nodes carry a 'label'. User-video edges carry 'weight' (comment
    count), user-user edges are unweighted similarity edges.
    """

    def __init__(self, graph: Optional[nx.Graph] = None):
        self.graph = graph if graph is not None else nx.Graph()

    @property
    def users(self) -> List[str]:
        return sorted(node_id(n) for n, color in self.graph.nodes(data='color') if color == USER)

    @property
    def videos(self) -> List[str]:
        return sorted(node_id(n) for n, color in self.graph.nodes(data='color') if color == VIDEO)

    @property
    def uv_edges(self) -> List[Tuple[str, str, int]]:
        edges = []
        for a, b, data in self.graph.edges(data=True):
            if data.get('kind') != COMMENT_EDGE:
                continue
            user, video = (a, b) if self.graph.nodes[a]['color'] == USER else (b, a)
            edges.append((node_id(user), node_id(video), data['weight']))
        return sorted(edges)

    @property
    def uu_edges(self) -> List[Tuple[str, str]]:
        edges = []
        for a, b, kind in self.graph.edges(data='kind'):
            if kind == SIMILARITY_EDGE:
                edges.append(tuple(sorted((node_id(a), node_id(b)))))
        return sorted(edges)

    @property
    def labels(self) -> Dict[str, str]:
        return {node_id(n): data.get('label', REGULAR)
                for n, data in self.graph.nodes(data=True) if data['color'] == USER}

    def has_user(self, user_id: str) -> bool:
        key = user_node(user_id)
        return key in self.graph and self.graph.nodes[key]['color'] == USER

    def number_of_edges(self) -> int:
        return self.graph.number_of_edges()

    def copy(self) -> 'CommentNetwork':
        return CommentNetwork(self.graph.copy())


class GraphHandler:
    """
    Handles comment network generation for one time window
    """

    def __init__(self, similarity_threshold: float = DEFAULT_SIMILARITY_THRESHOLD):
        if not 0.0 < similarity_threshold <= 1.0:
            raise ValueError(f"similarity threshold must lie in (0, 1], got {similarity_threshold}")

        self.config = {
            'similarity_threshold': similarity_threshold
        }
        self.stats = {
            'comment_pairs_compared': 0,
            'similarity_edges': 0,
            'users_pruned': 0,
            'videos_orphaned': 0
        }

    def build_network(self, comments: List[NormalizedComment], threshold: Optional[float] = None) -> CommentNetwork:
        """
        Build the comment network of one window

        Args:
            comments: retained comments of a single window
            threshold: Jaccard distance below which two users are linked

        Returns:
            Network with weighted user-video edges and user-user similarity edges
        """
        threshold = self.config['similarity_threshold'] if threshold is None else threshold
        if not 0.0 < threshold <= 1.0:
            raise ValueError(f"similarity threshold must lie in (0, 1], got {threshold}")

        graph = nx.Graph()
        weights = Counter((c.source.user_id, c.source.video_id) for c in comments)

        for user in sorted({user for user, _ in weights}):
            graph.add_node(user_node(user), color=USER, label=REGULAR)
        for video in sorted({video for _, video in weights}):
            graph.add_node(video_node(video), color=VIDEO)
        for (user, video), count in sorted(weights.items()):
            graph.add_edge(user_node(user), video_node(video), kind=COMMENT_EDGE, weight=count)

        for a, b in self._similar_user_pairs(comments, threshold):
            graph.add_edge(user_node(a), user_node(b), kind=SIMILARITY_EDGE)

        network = CommentNetwork(graph)
        logger.debug(f"Built network: {graph.number_of_nodes()} nodes, {graph.number_of_edges()} edges")
        return network

    def _similar_user_pairs(self, comments: List[NormalizedComment], threshold: float) -> List[Tuple[str, str]]:
        """Exact pairwise comparison of comments by distinct users"""
        linked = set()
        compared = 0

        for i in range(len(comments)):
            a = comments[i]
            size_a = len(a.shingles)
            for j in range(i + 1, len(comments)):
                b = comments[j]
                if a.source.user_id == b.source.user_id:
                    continue
                pair = tuple(sorted((a.source.user_id, b.source.user_id)))
                if pair in linked:
                    continue

                # Jaccard distance is at least 1 - min/max of the set sizes
                size_b = len(b.shingles)
                larger = max(size_a, size_b)
                if larger == 0 or 1.0 - min(size_a, size_b) / larger >= threshold:
                    continue

                compared += 1
                if jaccard_distance(a.shingles, b.shingles) < threshold:
                    linked.add(pair)

        self.stats['comment_pairs_compared'] += compared
        self.stats['similarity_edges'] += len(linked)
        return sorted(linked)

    def prune_singleton_users(self, net: CommentNetwork) -> CommentNetwork:
        """
        Remove users whose only neighbour is a single video (one pass)

        Videos left without any edge are removed as well.
        """
        graph = net.graph.copy()
        singletons = []
        for node, color in graph.nodes(data='color'):
            if color != USER:
                continue
            neighbours = list(graph.neighbors(node))
            if len(neighbours) == 1 and graph.nodes[neighbours[0]]['color'] == VIDEO:
                singletons.append(node)

        graph.remove_nodes_from(singletons)
        orphans = [n for n, color in graph.nodes(data='color') if color == VIDEO and graph.degree(n) == 0]
        graph.remove_nodes_from(orphans)

        self.stats['users_pruned'] += len(singletons)
        self.stats['videos_orphaned'] += len(orphans)
        logger.debug(f"Pruned {len(singletons)} single-video user(s), {len(orphans)} orphaned video(s)")
        return CommentNetwork(graph)

    def label_users(self, net: CommentNetwork, records: Iterable[CommentRecord]) -> Dict[str, str]:
        """
        Label users SPAM if any of their window comments carries the spam hint

        The network's node attributes are updated in place.

        Returns:
            Mapping user id -> label for every user node
        """
        hinted = defaultdict(bool)
        for record in records:
            if record.spam_hint:
                hinted[record.user_id] = True

        labels = {}
        for user in net.users:
            label = SPAM if hinted[user] else REGULAR
            net.graph.nodes[user_node(user)]['label'] = label
            labels[user] = label
        return labels

    def network_stats(self, net: CommentNetwork) -> Dict[str, int]:
        """Node, edge and component counts of a window network"""
        labels = net.labels
        uv = sum(1 for _, _, kind in net.graph.edges(data='kind') if kind == COMMENT_EDGE)
        return {
            'video_nodes': len(net.videos),
            'user_nodes': len(labels),
            'spam_users': sum(1 for label in labels.values() if label == SPAM),
            'edges': net.number_of_edges(),
            'uv_edges': uv,
            'uu_edges': net.number_of_edges() - uv,
            'components': nx.number_connected_components(net.graph) if len(net.graph) else 0,
            'comments': sum(w for _, _, w in net.uv_edges)
        }

    def export_graphml(self, net: CommentNetwork, path: str):
        """Write the network as GraphML with color, label and weight attributes"""
        try:
            nx.write_graphml(self._export_graph(net), path)
        except OSError as e:
            logger.error(f"Failed to write GraphML {path}: {e}")
            raise

    def export_dot(self, net: CommentNetwork, path: str):
        """Write the network as Graphviz DOT (nodes renumbered, key kept as attribute)"""
        graph = nx.convert_node_labels_to_integers(self._export_graph(net), ordering='sorted', label_attribute='node_key')
        # pydot rejects unquoted values containing ':'
        for _, data in graph.nodes(data=True):
            data.update({key: dot_value(value) for key, value in data.items()})
        for _, _, data in graph.edges(data=True):
            data.update({key: dot_value(value) for key, value in data.items()})
        try:
            nx.nx_pydot.write_dot(graph, path)
        except OSError as e:
            logger.error(f"Failed to write DOT {path}: {e}")
            raise

    def _export_graph(self, net: CommentNetwork) -> nx.Graph:
        graph = nx.Graph()
        for node in sorted(net.graph.nodes):
            data = net.graph.nodes[node]
            attrs = {'color': data['color'], 'node_id': node_id(node)}
            if data['color'] == USER:
                attrs['label'] = data.get('label', REGULAR)
            graph.add_node(node, **attrs)
        for a, b, data in sorted(net.graph.edges(data=True), key=lambda e: tuple(sorted(e[:2]))):
            attrs = {'kind': data['kind']}
            if data['kind'] == COMMENT_EDGE:
                attrs['weight'] = data['weight']
            graph.add_edge(a, b, **attrs)
        return graph

    def get_stats(self) -> Dict:
        """Get network construction counters"""
        return self.stats.copy()


def dot_value(value):
    """Quote string attribute values that contain ':' for DOT output"""
    if isinstance(value, str) and ':' in value and not (value.startswith('"') and value.endswith('"')):
        return '"' + value.replace('"', '\\"') + '"'
    return value


def read_graphml_labels(path: str) -> Dict[str, str]:
    """User labels of an exported window network"""
    if not os.path.exists(path):
        raise FileNotFoundError(f"Network file not found: {path}")
    graph = nx.read_graphml(path)
    return {data['node_id']: data.get('label', REGULAR)
            for _, data in graph.nodes(data=True) if data.get('color') == USER}
