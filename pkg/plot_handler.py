"""
Plot Handler
Renders static SVG figures from the CSV artifacts of a finished run
"""

import glob
import logging
import os
import re
from collections import defaultdict
from typing import Dict, List, Optional

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402

from artifact_handler import read_csv  # noqa: E402

logger = logging.getLogger(__name__)

PLOT_DIR = 'plots'
LABEL_COLORS = {'spam': '#d62728', 'regular': '#7f7f7f'}
MAX_RANKING_BARS = 25

# Stable element ids so reruns produce identical SVG files
matplotlib.rcParams['svg.hashsalt'] = 'spam-motif-tracker'


def motif_slug(motif_id: str) -> str:
    """File-name-safe form of a MotifId"""
    return re.sub(r'[^A-Za-z0-9]+', '_', motif_id).strip('_')


class PlotHandler:
    """
    Emits spatialization, motif series and user ranking plots
    """

    def __init__(self):
        self.stats = {
            'plots_written': 0
        }

    def emit_plots(self, artifact_dir: str, ground_truth: Optional[Dict[str, str]] = None) -> List[str]:
        """
        Write every plot of a run into <artifact_dir>/plots

        Args:
            artifact_dir: directory of a committed run
            ground_truth: optional user id -> BG/C1/C2; campaign accounts
                are outlined in the spatialization plots

        Returns:
            Paths of the written SVG files

        Raises:
            FileNotFoundError: required artifact CSVs are missing
        """
        window_dirs = sorted(d for d in glob.glob(os.path.join(artifact_dir, 'window_*')) if os.path.isdir(d))
        if not window_dirs:
            raise FileNotFoundError(f"No window artifacts in {artifact_dir}")

        series_rows = read_csv(os.path.join(artifact_dir, 'series.csv'))
        ranking_rows = read_csv(os.path.join(artifact_dir, 'ranking.csv'))

        out_dir = os.path.join(artifact_dir, PLOT_DIR)
        os.makedirs(out_dir, exist_ok=True)
        written = []

        campaign = {u for u, group in (ground_truth or {}).items() if group != 'BG'}
        for path in window_dirs:
            coords = os.path.join(path, 'coords.csv')
            if not os.path.exists(coords):
                logger.info(f"No projection for {os.path.basename(path)}, skipping spatialization")
                continue
            index = int(os.path.basename(path).split('_')[-1])
            target = os.path.join(out_dir, f"spatialization_w{index}.svg")
            self.plot_spatialization(read_csv(coords), index, target, campaign)
            written.append(target)

        series = defaultdict(list)
        for row in series_rows:
            series[row['motif_id']].append((int(row['window_index']), int(row['raw']), float(row['normalized'])))

        rankings = defaultdict(list)
        for row in ranking_rows:
            rankings[(row['motif_id'], int(row['window_index']))].append(row)

        for motif in sorted({motif for motif, _ in rankings}):
            points = sorted(series.get(motif, []))
            if not points:
                logger.warning(f"Tracked motif missing from series.csv: {motif}")
                continue
            slug = motif_slug(motif)
            target = os.path.join(out_dir, f"series_{slug}.svg")
            self.plot_series(points, motif, target)
            written.append(target)

            # Ranking of the window where the motif peaks
            peak = max(points, key=lambda p: (p[1], -p[0]))[0]
            rows = rankings.get((motif, peak), [])
            target = os.path.join(out_dir, f"ranking_{slug}.svg")
            self.plot_ranking(rows, motif, peak, target)
            written.append(target)

        logger.info(f"Wrote {len(written)} plot(s) to {out_dir}")
        return written

    def plot_spatialization(self, rows: List[Dict[str, str]], window: int, path: str, campaign: set = frozenset()):
        """Scatter of the first two principal components colored by label"""
        fig, ax = plt.subplots(figsize=(7, 6))
        for label, color in LABEL_COLORS.items():
            points = [r for r in rows if r['label'] == label]
            if not points:
                continue
            ax.scatter([float(r['pc1']) for r in points], [float(r.get('pc2') or 0.0) for r in points],
                       s=14, c=color, alpha=0.7, label=label, gid=f"label_{label}")

        outlined = [r for r in rows if r['ego_id'] in campaign]
        if outlined:
            ax.scatter([float(r['pc1']) for r in outlined], [float(r.get('pc2') or 0.0) for r in outlined],
                       s=60, facecolors='none', edgecolors='black', linewidths=1.0, label='campaign account')

        ax.set_xlabel('pc1')
        ax.set_ylabel('pc2')
        ax.set_title(f"Normalized ratio profiles, window {window}")
        ax.legend(loc='best')
        ax.grid(True, alpha=0.3)
        self._save(fig, path)

    def plot_series(self, points: List[tuple], motif: str, path: str):
        """One bar per window of the min-max normalized motif series"""
        fig, ax = plt.subplots(figsize=(9, 4))
        bars = ax.bar([p[0] for p in points], [p[2] for p in points], color='#1f77b4')
        for bar, point in zip(bars, points):
            bar.set_gid(f"window_bar_{point[0]}")
        ax.set_xticks([p[0] for p in points])
        ax.set_ylim(0, 1.05)
        ax.set_xlabel('window')
        ax.set_ylabel('normalized count')
        ax.set_title(motif, fontsize=9)
        self._save(fig, path)

    def plot_ranking(self, rows: List[Dict[str, str]], motif: str, window: int, path: str):
        """Descending bars of the users with the highest counts of a motif"""
        rows = sorted(rows, key=lambda r: int(r['rank']))[:MAX_RANKING_BARS]
        fig, ax = plt.subplots(figsize=(10, 4))
        ax.bar(range(len(rows)), [int(r['count']) for r in rows],
               color=[LABEL_COLORS.get(r['label'], '#7f7f7f') for r in rows])
        ax.set_xticks(range(len(rows)))
        ax.set_xticklabels([r['user_id'] for r in rows], rotation=90, fontsize=7)
        ax.set_ylabel('motif count')
        ax.set_title(f"{motif} (window {window})", fontsize=9)
        self._save(fig, path)

    def _save(self, fig, path: str):
        try:
            fig.tight_layout()
            fig.savefig(path, format='svg', metadata={'Date': None})
        except OSError as e:
            logger.error(f"Failed to write plot {path}: {e}")
            raise
        finally:
            plt.close(fig)
        self.stats['plots_written'] += 1

    def get_stats(self) -> Dict:
        """Get plot counters"""
        return self.stats.copy()
