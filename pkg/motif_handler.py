"""
Network Motif Handler
Extracts egocentric networks and counts connected 2-colored motifs of
3-5 nodes that contain the ego, using ESU subgraph enumeration
"""

import itertools
import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from graph_handler import USER, VIDEO, CommentNetwork, user_node

logger = logging.getLogger(__name__)

DEFAULT_MOTIF_SIZES = (3, 4, 5)
DEFAULT_EGO_RADIUS = 2
ORACLE_MAX_NODES = 30

COLOR_LETTERS = {USER: 'U', VIDEO: 'V'}


@dataclass
class EgoNetwork:
    """Induced k-neighbourhood of a user node"""
    ego: str
    graph: nx.Graph

    @property
    def ego_node(self) -> str:
        return user_node(self.ego)


@dataclass
class MotifProfile:
    """Per-ego counts of motif instances containing the ego"""
    ego: str
    counts: Dict[str, int] = field(default_factory=dict)


def ego_network(net: CommentNetwork, ego: str, k: int = DEFAULT_EGO_RADIUS) -> EgoNetwork:
    """
    Induced subgraph on all nodes within k hops of a user

    Args:
        net: window comment network
        ego: user id
        k: neighbourhood radius

    Raises:
        KeyError: ego is not a user node of the network
    """
    if not net.has_user(ego):
        raise KeyError(f"Unknown ego user: {ego}")
    if k < 0:
        raise ValueError(f"ego radius must be >= 0, got {k}")
    return EgoNetwork(ego=ego, graph=nx.ego_graph(net.graph, user_node(ego), radius=k))


def _validate_sizes(sizes: Iterable[int]) -> Tuple[int, ...]:
    sizes = tuple(sorted(set(sizes)))
    if not sizes or any(s not in DEFAULT_MOTIF_SIZES for s in sizes):
        raise ValueError(f"motif sizes must be drawn from {DEFAULT_MOTIF_SIZES}, got {sizes}")
    return sizes


def _esu(adjacency: Sequence[FrozenSet[int]], root: int, sizes: Tuple[int, ...]) -> Iterator[Tuple[int, ...]]:
    """
    ESU enumeration rooted at one vertex

    Emits every connected vertex set whose smallest index is root and whose
    size is in sizes, each exactly once.
    """
    max_size = sizes[-1]
    emit = set(sizes)

    def extend(subgraph: Tuple[int, ...], extension: set, closed: FrozenSet[int]):
        if len(subgraph) in emit:
            yield subgraph
        if len(subgraph) == max_size:
            return
        while extension:
            w = extension.pop()
            exclusive = {u for u in adjacency[w] if u > root and u not in closed}
            yield from extend(subgraph + (w,), extension | exclusive, closed | adjacency[w])

    start = {u for u in adjacency[root] if u > root}
    yield from extend((root,), start, frozenset(adjacency[root]) | {root})


def _indexed(graph: nx.Graph, first: Optional[str] = None) -> Tuple[List[str], List[FrozenSet[int]], str]:
    """Index nodes (optionally placing one node first) for ESU"""
    nodes = sorted(graph.nodes)
    if first is not None:
        nodes.remove(first)
        nodes.insert(0, first)
    index = {n: i for i, n in enumerate(nodes)}
    adjacency = [frozenset(index[m] for m in graph.neighbors(n)) for n in nodes]
    colors = ''.join(COLOR_LETTERS[graph.nodes[n]['color']] for n in nodes)
    return nodes, adjacency, colors


def enumerate_connected_subgraphs(g: EgoNetwork, size: int) -> Iterator[FrozenSet[str]]:
    """
    Every connected induced subgraph node set of the given size, once each
    """
    sizes = _validate_sizes([size])
    nodes, adjacency, _ = _indexed(g.graph)
    for root in range(len(nodes)):
        for subset in _esu(adjacency, root, sizes):
            yield frozenset(nodes[i] for i in subset)


@lru_cache(maxsize=None)
def canonical_form(colors: str, edges: FrozenSet[Tuple[int, int]]) -> str:
    """
    Canonical MotifId of a small colored graph

    Args:
        colors: one letter (U/V) per position
        edges: pairs of positions

    Returns:
        'n=<size>;colors=<letters>;edges=<i-j,...>' minimal over all
        color-preserving relabellings
    """
    n = len(colors)
    if n > 5:
        raise ValueError(f"canonical form supports at most 5 nodes, got {n}")
    if not _connected(n, edges):
        raise ValueError("motif subgraph is not connected")

    users = [i for i in range(n) if colors[i] == 'U']
    videos = [i for i in range(n) if colors[i] == 'V']
    best = None
    for user_order in itertools.permutations(users):
        for video_order in itertools.permutations(videos):
            position = {old: new for new, old in enumerate(user_order + video_order)}
            relabelled = sorted(tuple(sorted((position[a], position[b]))) for a, b in edges)
            if best is None or relabelled < best:
                best = relabelled

    letters = 'U' * len(users) + 'V' * len(videos)
    edge_text = ','.join(f"{a}-{b}" for a, b in best)
    return f"n={n};colors={letters};edges={edge_text}"


def _connected(n: int, edges: Iterable[Tuple[int, int]]) -> bool:
    if n == 0:
        return False
    neighbours = {i: set() for i in range(n)}
    for a, b in edges:
        neighbours[a].add(b)
        neighbours[b].add(a)
    seen = {0}
    stack = [0]
    while stack:
        for m in neighbours[stack.pop()]:
            if m not in seen:
                seen.add(m)
                stack.append(m)
    return len(seen) == n


def _subset_key(subset: Sequence[int], adjacency: Sequence[FrozenSet[int]], colors: str) -> Tuple[str, FrozenSet[Tuple[int, int]]]:
    letters = ''.join(colors[v] for v in subset)
    edges = frozenset((i, j) for i in range(len(subset)) for j in range(i + 1, len(subset))
                      if subset[j] in adjacency[subset[i]])
    return letters, edges


def canonical_motif(nodes: Iterable[str], g: EgoNetwork) -> str:
    """
    MotifId of the subgraph induced by nodes

    Raises:
        ValueError: the induced subgraph is disconnected
    """
    ordered = sorted(nodes)
    sub = g.graph.subgraph(ordered)
    colors = ''.join(COLOR_LETTERS[sub.nodes[n]['color']] for n in ordered)
    position = {n: i for i, n in enumerate(ordered)}
    edges = frozenset(tuple(sorted((position[a], position[b]))) for a, b in sub.edges)
    return canonical_form(colors, edges)


def ego_motif_counts(eg: EgoNetwork, sizes: Iterable[int] = DEFAULT_MOTIF_SIZES) -> MotifProfile:
    """
    Count motif instances containing the ego

    The ego is ranked first so rooted ESU from it emits exactly the
    connected subsets that contain it.
    """
    sizes = _validate_sizes(sizes)
    nodes, adjacency, colors = _indexed(eg.graph, first=eg.ego_node)
    counts = Counter()
    for subset in _esu(adjacency, 0, sizes):
        counts[canonical_form(*_subset_key(subset, adjacency, colors))] += 1
    return MotifProfile(ego=eg.ego, counts=dict(sorted(counts.items())))


def brute_force_counts(eg: EgoNetwork, sizes: Iterable[int] = DEFAULT_MOTIF_SIZES) -> MotifProfile:
    """
    Reference counts from exhaustive subset enumeration (at most 30 nodes)
    """
    sizes = _validate_sizes(sizes)
    if eg.graph.number_of_nodes() > ORACLE_MAX_NODES:
        raise ValueError(f"oracle supports at most {ORACLE_MAX_NODES} nodes, got {eg.graph.number_of_nodes()}")

    ego = eg.ego_node
    others = sorted(n for n in eg.graph.nodes if n != ego)
    counts = Counter()
    for size in sizes:
        for rest in itertools.combinations(others, size - 1):
            members = (ego,) + rest
            if nx.is_connected(eg.graph.subgraph(members)):
                counts[canonical_motif(members, eg)] += 1
    return MotifProfile(ego=eg.ego, counts=dict(sorted(counts.items())))


def parse_motif_id(motif_id: str) -> Tuple[str, List[Tuple[int, int]]]:
    """Split a MotifId into its color letters and edge list"""
    try:
        parts = dict(part.split('=', 1) for part in motif_id.split(';'))
        colors = parts['colors']
        edges = [tuple(int(x) for x in pair.split('-')) for pair in parts['edges'].split(',') if pair]
        if int(parts['n']) != len(colors):
            raise ValueError("size does not match colors")
    except (KeyError, ValueError) as e:
        raise ValueError(f"Malformed motif id {motif_id!r}: {e}")
    return colors, edges


def all_motif_ids(sizes: Iterable[int] = DEFAULT_MOTIF_SIZES) -> List[str]:
    """Every connected 2-colored motif without a video-video edge"""
    motifs = set()
    for n in _validate_sizes(sizes):
        for n_users in range(1, n + 1):
            colors = 'U' * n_users + 'V' * (n - n_users)
            allowed = [(i, j) for i in range(n) for j in range(i + 1, n) if colors[i] == 'U' or colors[j] == 'U']
            for r in range(n - 1, len(allowed) + 1):
                for chosen in itertools.combinations(allowed, r):
                    edges = frozenset(chosen)
                    if _connected(n, edges):
                        motifs.add(canonical_form(colors, edges))
    return sorted(motifs)


def render_motif(motif_id: str) -> str:
    """ASCII adjacency rendering of a motif"""
    colors, edges = parse_motif_id(motif_id)
    neighbours = {i: [] for i in range(len(colors))}
    for a, b in edges:
        neighbours[a].append(b)
        neighbours[b].append(a)

    lines = [motif_id]
    for i, letter in enumerate(colors):
        adjacent = ', '.join(f"{j}:{colors[j]}" for j in sorted(neighbours[i]))
        lines.append(f"  {i}:{letter} -- {adjacent}")
    return '\n'.join(lines)


def _count_ego_task(task: Tuple[str, nx.Graph, Tuple[int, ...]]) -> MotifProfile:
    ego, graph, sizes = task
    return ego_motif_counts(EgoNetwork(ego=ego, graph=graph), sizes)


class MotifHandler:
    """
    Computes motif profiles for every user of a window network
    """

    def __init__(self, sizes: Iterable[int] = DEFAULT_MOTIF_SIZES,
                 ego_radius: int = DEFAULT_EGO_RADIUS, threads: int = 1):
        if ego_radius < 0:
            raise ValueError(f"ego radius must be >= 0, got {ego_radius}")
        if threads < 1:
            raise ValueError(f"threads must be >= 1, got {threads}")

        self.config = {
            'sizes': _validate_sizes(sizes),
            'ego_radius': ego_radius,
            'threads': threads
        }
        self.stats = {
            'egos_processed': 0,
            'motif_instances': 0
        }

    def count_network(self, net: CommentNetwork) -> List[MotifProfile]:
        """
        Motif profiles of all user nodes, ordered by ego id

        Egos are processed in a process pool when threads > 1; results are
        merged by ego id so they do not depend on the worker count.
        """
        sizes = self.config['sizes']
        radius = self.config['ego_radius']
        tasks = [(ego, ego_network(net, ego, radius).graph, sizes) for ego in net.users]

        if self.config['threads'] > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=self.config['threads']) as pool:
                profiles = list(pool.map(_count_ego_task, tasks, chunksize=max(1, len(tasks) // (4 * self.config['threads']))))
        else:
            profiles = [_count_ego_task(task) for task in tasks]

        profiles.sort(key=lambda p: p.ego)
        self.stats['egos_processed'] += len(profiles)
        self.stats['motif_instances'] += sum(sum(p.counts.values()) for p in profiles)
        logger.debug(f"Counted motifs for {len(profiles)} ego(s)")
        return profiles

    def get_stats(self) -> Dict:
        """Get motif counting counters"""
        return self.stats.copy()
