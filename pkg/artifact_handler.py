"""
Artifact Handler
Writes run artifacts under a '.partial' suffix and commits them on success
"""

import csv
import json
import logging
import os
from typing import Dict, Iterable, List, Sequence

logger = logging.getLogger(__name__)

PARTIAL_SUFFIX = '.partial'
WINDOW_DIR_FORMAT = 'window_{:02d}'


def window_dir(index: int) -> str:
    return WINDOW_DIR_FORMAT.format(index)


def format_number(value) -> str:
    """CSV rendering: integers as-is, reals with 9 significant digits"""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        # -0.0 prints as 0
        return f"{value + 0.0:.9g}"
    return str(value)


def read_csv(path: str) -> List[Dict[str, str]]:
    """Rows of a CSV artifact as dictionaries"""
    if not os.path.exists(path):
        raise FileNotFoundError(f"Artifact not found: {path}")
    with open(path, 'r', encoding='utf-8', newline='') as f:
        return list(csv.DictReader(f))


class ArtifactHandler:
    """
    Collects the files of one pipeline run

    Every file is first written as '<name>.partial'; commit() renames them
    all. A failed run leaves the partial files behind for inspection.
    """

    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        self.pending: List[str] = []
        self.stats = {
            'files_written': 0,
            'files_committed': 0
        }

    def partial_path(self, relative: str) -> str:
        """Register a file and return the path it must be written to"""
        final = os.path.join(self.out_dir, relative)
        os.makedirs(os.path.dirname(final) or '.', exist_ok=True)
        self.pending.append(final)
        self.stats['files_written'] += 1
        return final + PARTIAL_SUFFIX

    def write_csv(self, relative: str, header: Sequence[str], rows: Iterable[Sequence]) -> str:
        path = self.partial_path(relative)
        with open(path, 'w', encoding='utf-8', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_number(v) for v in row])
        return path

    def write_json(self, relative: str, payload: Dict) -> str:
        path = self.partial_path(relative)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write('\n')
        return path

    def commit(self) -> List[str]:
        """Rename every partial file to its final name"""
        committed = []
        for final in self.pending:
            try:
                os.replace(final + PARTIAL_SUFFIX, final)
            except OSError as e:
                logger.error(f"Failed to commit {final}: {e}")
                raise
            committed.append(final)
        self.stats['files_committed'] += len(committed)
        logger.info(f"Committed {len(committed)} artifact(s) to {self.out_dir}")
        self.pending = []
        return committed

    def get_stats(self) -> Dict:
        """Get artifact counters"""
        return self.stats.copy()
