"""
Motif Profile Handler
Turns per-ego motif counts into ratio profiles, normalized ratio profiles
and a principal components projection
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from motif_handler import MotifProfile

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 4
DEFAULT_COMPONENTS = 2
EIGEN_TOLERANCE = 1e-10


@dataclass
class RatioProfile:
    """Ratio values of one ego over the window's shared motif support"""
    ego: str
    support: List[str]
    values: np.ndarray


@dataclass
class NormalizedRatioProfile:
    """Ratio profile scaled to unit Euclidean norm (or all-zero)"""
    ego: str
    support: List[str]
    values: np.ndarray


@dataclass
class Projection:
    """Principal components of a window's normalized ratio profiles"""
    egos: List[str]
    support: List[str]
    coordinates: np.ndarray         # egos x components
    explained_variance: np.ndarray  # per component, fraction of total variance
    loadings: np.ndarray            # support x components

    def coordinates_of(self, ego: str) -> Tuple[float, ...]:
        return tuple(float(x) for x in self.coordinates[self.egos.index(ego)])


def motif_support(profiles: Iterable[MotifProfile]) -> List[str]:
    """Sorted union of the motifs observed in any profile"""
    support = set()
    for profile in profiles:
        support.update(profile.counts)
    return sorted(support)


def count_matrix(profiles: Sequence[MotifProfile], support: Sequence[str]) -> np.ndarray:
    """Egos x motifs count matrix, zero-filled"""
    matrix = np.zeros((len(profiles), len(support)), dtype=float)
    column = {motif: j for j, motif in enumerate(support)}
    for i, profile in enumerate(profiles):
        for motif, count in profile.counts.items():
            matrix[i, column[motif]] = count
    return matrix


def ratio_profiles(profiles: Sequence[MotifProfile], epsilon: int = DEFAULT_EPSILON) -> List[RatioProfile]:
    """
    rp_i = (nmp_i - mean_i) / (nmp_i + mean_i + epsilon)

    mean_i is taken over every ego of the window, counting absent motifs
    as zero.

    Raises:
        ValueError: empty profile list or epsilon < 1
    """
    if not profiles:
        raise ValueError("ratio profiles need at least one motif profile")
    if int(epsilon) != epsilon or epsilon < 1:
        raise ValueError(f"epsilon must be an integer >= 1, got {epsilon}")

    support = motif_support(profiles)
    counts = count_matrix(profiles, support)
    means = counts.mean(axis=0)
    ratios = (counts - means) / (counts + means + epsilon)

    return [RatioProfile(ego=profile.ego, support=support, values=ratios[i])
            for i, profile in enumerate(profiles)]


def normalize_profile(rp: RatioProfile) -> NormalizedRatioProfile:
    """L2 normalization; an all-zero profile stays all-zero"""
    norm = float(np.sqrt(np.sum(rp.values ** 2)))
    if norm == 0.0:
        values = np.zeros_like(rp.values)
    else:
        values = rp.values / norm
    return NormalizedRatioProfile(ego=rp.ego, support=list(rp.support), values=values)


def pca_project(nrps: Sequence[NormalizedRatioProfile], components: int = DEFAULT_COMPONENTS) -> Projection:
    """
    Principal components of normalized ratio profiles

    The covariance of the mean-centred matrix is eigen-decomposed with a
    symmetric solver. Components are ordered by decreasing eigenvalue;
    eigenvalues closer than EIGEN_TOLERANCE are ordered by their loading
    vectors. Each component is signed so its largest-magnitude loading is
    positive.

    Raises:
        ValueError: fewer than 2 egos, or components exceeds min(egos, support)
    """
    if len(nrps) < 2:
        raise ValueError(f"PCA needs at least 2 egos, got {len(nrps)}")

    support = list(nrps[0].support)
    if components < 1 or components > min(len(nrps), len(support)):
        raise ValueError(f"cannot extract {components} component(s) from {len(nrps)} ego(s) "
                         f"over {len(support)} motif(s)")

    matrix = np.vstack([nrp.values for nrp in nrps])
    centred = matrix - matrix.mean(axis=0)
    covariance = centred.T @ centred / (len(nrps) - 1)

    eigenvalues, eigenvectors = np.linalg.eigh(covariance)
    eigenvalues = np.clip(eigenvalues, 0.0, None)

    vectors = []
    for j in range(eigenvectors.shape[1]):
        vector = eigenvectors[:, j]
        pivot = int(np.argmax(np.abs(vector)))
        if vector[pivot] < 0:
            vector = -vector
        vectors.append(vector)

    order = _component_order(eigenvalues, vectors)
    loadings = np.column_stack([vectors[j] for j in order[:components]])
    coordinates = centred @ loadings

    total = float(eigenvalues.sum())
    if total > 0:
        explained = np.array([eigenvalues[j] / total for j in order[:components]])
    else:
        explained = np.zeros(components)

    return Projection(
        egos=[nrp.ego for nrp in nrps],
        support=support,
        coordinates=coordinates,
        explained_variance=explained,
        loadings=loadings
    )


def _component_order(eigenvalues: np.ndarray, vectors: List[np.ndarray]) -> List[int]:
    """Indices by decreasing eigenvalue, near-equal ones by loading order"""
    descending = sorted(range(len(eigenvalues)), key=lambda j: -eigenvalues[j])
    order: List[int] = []
    group: List[int] = []
    for j in descending:
        if group and abs(eigenvalues[group[0]] - eigenvalues[j]) > EIGEN_TOLERANCE:
            order.extend(sorted(group, key=lambda g: tuple(vectors[g])))
            group = []
        group.append(j)
    order.extend(sorted(group, key=lambda g: tuple(vectors[g])))
    return order


def separation_check(projection: Projection, group: Iterable[str],
                     rest: Optional[Iterable[str]] = None) -> Dict[str, float]:
    """
    Compare a group of egos against the rest in the first two components

    Args:
        projection: window projection
        group: egos of the group
        rest: egos to compare against; defaults to every ego outside the group

    Returns:
        Dictionary with centroid_distance (group centroid to rest centroid),
        rest_spread (max point-to-centroid distance within the rest) and
        separated (1.0 when distance exceeds spread)
    """
    members = set(group)
    points = projection.coordinates[:, :2]
    mask = np.array([ego in members for ego in projection.egos])
    if rest is None:
        rest_mask = ~mask
    else:
        others = set(rest) - members
        rest_mask = np.array([ego in others for ego in projection.egos])
    if not mask.any() or not rest_mask.any():
        raise ValueError("separation check needs egos both inside and outside the group")

    group_centroid = points[mask].mean(axis=0)
    rest_points = points[rest_mask]
    rest_centroid = rest_points.mean(axis=0)
    distance = float(np.linalg.norm(group_centroid - rest_centroid))
    spread = float(np.max(np.linalg.norm(rest_points - rest_centroid, axis=1)))
    return {
        'centroid_distance': distance,
        'rest_spread': spread,
        'separated': 1.0 if distance > spread else 0.0
    }


class ProfileHandler:
    """
    Produces the normalized ratio profiles and projection of one window
    """

    def __init__(self, epsilon: int = DEFAULT_EPSILON, components: int = DEFAULT_COMPONENTS):
        if int(epsilon) != epsilon or epsilon < 1:
            raise ValueError(f"epsilon must be an integer >= 1, got {epsilon}")
        if components < 1:
            raise ValueError(f"components must be >= 1, got {components}")

        self.config = {
            'epsilon': int(epsilon),
            'components': components
        }
        self.stats = {
            'windows_projected': 0,
            'windows_skipped': 0
        }

    def normalized_profiles(self, profiles: Sequence[MotifProfile]) -> List[NormalizedRatioProfile]:
        """Ratio profiles followed by L2 normalization"""
        return [normalize_profile(rp) for rp in ratio_profiles(profiles, self.config['epsilon'])]

    def project(self, nrps: Sequence[NormalizedRatioProfile]):
        """
        Projection of a window, or None when the window is too small

        The component count shrinks to what the window supports.
        """
        if len(nrps) < 2 or not nrps[0].support:
            logger.warning(f"Skipping PCA: {len(nrps)} ego(s)")
            self.stats['windows_skipped'] += 1
            return None

        components = min(self.config['components'], len(nrps), len(nrps[0].support))
        projection = pca_project(nrps, components)
        self.stats['windows_projected'] += 1
        logger.debug(f"Explained variance: {projection.explained_variance.tolist()}")
        return projection

    def get_stats(self) -> Dict:
        """Get projection counters"""
        return self.stats.copy()
