"""
Motif Tracking Handler
Follows motif activity across time windows and ranks users by motif counts
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from graph_handler import REGULAR, SPAM, CommentNetwork
from motif_handler import MotifProfile
from profile_handler import count_matrix, motif_support

logger = logging.getLogger(__name__)

DEFAULT_TOP_MOTIFS = 3


@dataclass
class MotifSeries:
    """Per-window totals of one motif, edge-normalized then min-max scaled"""
    motif: str
    raw: List[int]
    edge_normalized: List[float]
    normalized: List[float]


@dataclass
class UserRanking:
    """Users of one window by descending count of one motif"""
    motif: str
    window: int
    entries: List[Tuple[str, int, str]] = field(default_factory=list)


def min_max(values: Sequence[float]) -> List[float]:
    """Scale to [0, 1]; a constant series maps to all zeros"""
    if not values:
        return []
    low = min(values)
    high = max(values)
    if high == low:
        return [0.0] * len(values)
    return [(v - low) / (high - low) for v in values]


class TrackingHandler:
    """
    Builds motif time series, user rankings and discriminating-motif scores
    """

    def __init__(self, top_motifs: int = DEFAULT_TOP_MOTIFS):
        if top_motifs < 1:
            raise ValueError(f"top_motifs must be >= 1, got {top_motifs}")
        self.config = {
            'top_motifs': top_motifs
        }
        self.stats = {
            'series_built': 0,
            'rankings_built': 0,
            'windows_scored': 0
        }

    def motif_series(self, windows: Sequence[Tuple[Optional[CommentNetwork], Sequence[MotifProfile]]],
                     motif: str) -> MotifSeries:
        """
        Track one motif over the windows

        Each window total is divided by the window's edge count (0 for an
        empty window) and the resulting series is min-max normalized.

        Args:
            windows: (network or None, motif profiles) per window, in time order
            motif: MotifId to track
        """
        if not windows:
            raise ValueError("motif series needs at least one window")

        raw = []
        per_edge = []
        for net, profiles in windows:
            total = sum(p.counts.get(motif, 0) for p in profiles)
            edges = net.number_of_edges() if net is not None else 0
            raw.append(total)
            per_edge.append(total / edges if edges else 0.0)

        self.stats['series_built'] += 1
        return MotifSeries(motif=motif, raw=raw, edge_normalized=per_edge, normalized=min_max(per_edge))

    def rank_users_by_motif(self, window_profiles: Sequence[MotifProfile], motif: str,
                            labels: Dict[str, str], window: int = 0) -> UserRanking:
        """
        Users with a non-zero count of the motif, highest first, ties by user id
        """
        entries = [(p.ego, p.counts.get(motif, 0), labels.get(p.ego, REGULAR)) for p in window_profiles]
        entries = [e for e in entries if e[1] > 0]
        entries.sort(key=lambda e: (-e[1], e[0]))
        self.stats['rankings_built'] += 1
        return UserRanking(motif=motif, window=window, entries=entries)

    def discriminating_motifs(self, window_profiles: Sequence[MotifProfile], labels: Dict[str, str],
                              top_n: Optional[int] = None, candidates: Sequence[str] = ()) -> List[Tuple[str, float]]:
        """
        Motifs ranked by how much more SPAM users carry them than REGULAR users

        score = mean over SPAM users - mean over REGULAR users of the
        L1-normalized per-ego count vectors. Scored motifs are the observed
        support plus any candidates; an ego with no motifs contributes a
        zero vector, so all-empty profiles give every candidate score 0 and
        an empty list when no candidates are named.

        Raises:
            ValueError: one of the two label classes is empty
        """
        top_n = self.config['top_motifs'] if top_n is None else top_n
        spam_mask = np.array([labels.get(p.ego, REGULAR) == SPAM for p in window_profiles], dtype=bool)
        if not spam_mask.any() or spam_mask.all():
            raise ValueError("discriminating motifs need both spam and regular users")

        self.stats['windows_scored'] += 1
        support = sorted(set(motif_support(window_profiles)) | set(candidates))
        if not support:
            return []

        counts = count_matrix(window_profiles, support)
        totals = counts.sum(axis=1, keepdims=True)
        shares = np.divide(counts, totals, out=np.zeros_like(counts), where=totals > 0)
        scores = shares[spam_mask].mean(axis=0) - shares[~spam_mask].mean(axis=0)

        ranked = sorted(zip(support, (float(s) for s in scores)), key=lambda item: (-item[1], item[0]))
        return ranked[:top_n]

    def tracked_motifs(self, per_window: Sequence[Sequence[Tuple[str, float]]], extra: Sequence[str] = ()) -> List[str]:
        """Union of the per-window discriminating motifs and requested ids, sorted"""
        motifs = set(extra)
        for ranked in per_window:
            motifs.update(motif for motif, _ in ranked)
        return sorted(motifs)

    def get_stats(self) -> Dict:
        """Get tracking counters"""
        return self.stats.copy()
