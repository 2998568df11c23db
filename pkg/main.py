#!/usr/bin/env python3
"""
Spam Motif Tracker
Tracks spam campaigns in video comment streams through the network motifs
their accounts form, window by window
"""

import argparse
import json
import logging
import os
import sys
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from datetime import timedelta
from typing import Dict, List, Optional, Sequence, Tuple

try:
    from artifact_handler import ArtifactHandler, read_csv, window_dir
    from graph_handler import DEFAULT_SIMILARITY_THRESHOLD, REGULAR, SPAM, GraphHandler, read_graphml_labels
    from ingest_handler import (IngestHandler, WindowSpec, dataset_stats, default_window_start,
                                format_timestamp, parse_timestamp)
    from motif_handler import (DEFAULT_EGO_RADIUS, DEFAULT_MOTIF_SIZES, MotifHandler, MotifProfile, all_motif_ids,
                               render_motif)
    from plot_handler import PlotHandler
    from profile_handler import DEFAULT_COMPONENTS, DEFAULT_EPSILON, ProfileHandler, motif_support
    from synth_handler import ScenarioConfig, SynthHandler, load_ground_truth, load_scenario
    from system_status import SystemStatusChecker
    from text_handler import DEFAULT_MIN_LENGTH, DEFAULT_SHINGLE_WINDOW, TextHandler, load_stopwords
    from tracking_handler import DEFAULT_TOP_MOTIFS, TrackingHandler
except ImportError as e:
    print(f"Import error: {e}")
    print("Please ensure all module files are in the same directory as main.py")
    sys.exit(1)

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_FILE = 'spam_motif_tracker.log'


def setup_logging(level: str = 'INFO', log_file: Optional[str] = None):
    """Log to stderr and, when given, to a file"""
    handlers = [logging.StreamHandler()]
    if log_file:
        os.makedirs(os.path.dirname(log_file) or '.', exist_ok=True)
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO), format=LOG_FORMAT,
                        handlers=handlers, force=True)


class StageError(RuntimeError):
    """Pipeline failure tagged with the stage (and window) it happened in"""

    def __init__(self, stage: str, message: str, window: Optional[int] = None):
        self.stage = stage
        self.window = window
        tag = stage if window is None else f"{stage}:window {window}"
        super().__init__(f"[{tag}] {message}")


@contextmanager
def stage(name: str, window: Optional[int] = None):
    try:
        yield
    except StageError:
        raise
    except Exception as e:
        logger.error(f"Stage {name} failed: {e}")
        raise StageError(name, str(e), window) from e


@dataclass
class RunConfig:
    """Every parameter that affects the artifacts of a run"""
    input: str = ''
    output: str = 'artifacts'
    window_start: Optional[str] = None
    window_hours: float = 6.0
    window_count: int = 12
    min_length: int = DEFAULT_MIN_LENGTH
    shingle_window: int = DEFAULT_SHINGLE_WINDOW
    stopwords: Optional[str] = None
    similarity_threshold: float = DEFAULT_SIMILARITY_THRESHOLD
    motif_sizes: Tuple[int, ...] = DEFAULT_MOTIF_SIZES
    ego_radius: int = DEFAULT_EGO_RADIUS
    epsilon: int = DEFAULT_EPSILON
    components: int = DEFAULT_COMPONENTS
    top_motifs: int = DEFAULT_TOP_MOTIFS
    track_motifs: Tuple[str, ...] = field(default_factory=tuple)
    threads: int = 1
    seed: Optional[int] = None
    log_level: str = 'INFO'
    plots: bool = False


# config.json section/key -> RunConfig field
CONFIG_FILE_KEYS = {
    ('application', 'log_level'): 'log_level',
    ('application', 'threads'): 'threads',
    ('application', 'seed'): 'seed',
    ('window', 'start'): 'window_start',
    ('window', 'hours'): 'window_hours',
    ('window', 'count'): 'window_count',
    ('text', 'min_length'): 'min_length',
    ('text', 'shingle_window'): 'shingle_window',
    ('text', 'stopwords'): 'stopwords',
    ('graph', 'similarity_threshold'): 'similarity_threshold',
    ('motif', 'sizes'): 'motif_sizes',
    ('motif', 'ego_radius'): 'ego_radius',
    ('profile', 'epsilon'): 'epsilon',
    ('profile', 'components'): 'components',
    ('tracking', 'top_motifs'): 'top_motifs',
    ('tracking', 'track_motifs'): 'track_motifs',
    ('output', 'directory'): 'output',
    ('output', 'plots'): 'plots'
}


def apply_config_file(cfg: RunConfig, path: str) -> RunConfig:
    """
    Overlay a JSON configuration file on a RunConfig

    Values present in the file win over command-line flags.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"Config file not found: {path}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ValueError(f"Invalid config file {path}: {e}")

    for (section, key), name in CONFIG_FILE_KEYS.items():
        value = data.get(section, {}).get(key)
        if value is None:
            continue
        if name in ('motif_sizes', 'track_motifs'):
            value = tuple(value)
        setattr(cfg, name, value)
    logger.info(f"Configuration loaded from {path}")
    return cfg


def parse_sizes(value: str) -> Tuple[int, ...]:
    try:
        return tuple(int(part) for part in value.split(',') if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"motif sizes must be comma-separated integers, got {value!r}")


class SpamCampaignTracker:
    """
    Pipeline orchestrator
    Runs ingest, text normalization, network building, motif counting,
    profiling and tracking over every window and writes the artifacts
    """

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.ingest_handler = IngestHandler()
        stopwords = load_stopwords(cfg.stopwords) if cfg.stopwords else None
        self.text_handler = TextHandler(cfg.min_length, cfg.shingle_window, stopwords)
        self.graph_handler = GraphHandler(cfg.similarity_threshold)
        self.motif_handler = MotifHandler(cfg.motif_sizes, cfg.ego_radius, cfg.threads)
        self.profile_handler = ProfileHandler(cfg.epsilon, cfg.components)
        self.tracking_handler = TrackingHandler(cfg.top_motifs)
        self.artifacts = ArtifactHandler(cfg.output)
        self.tracked: List[str] = []

    def run_pipeline(self) -> Dict:
        """
        Execute every stage and commit the artifacts

        Returns:
            The run manifest

        Raises:
            StageError: a stage failed; written files keep their .partial suffix
        """
        cfg = self.cfg
        logger.info(f"Starting run on {cfg.input}")

        with stage('ingest'):
            records = self.ingest_handler.load_comments(cfg.input)
            start = parse_timestamp(cfg.window_start) if cfg.window_start else default_window_start(records)
            spec = WindowSpec(start=start, window_length=timedelta(hours=cfg.window_hours),
                              window_count=cfg.window_count)
            windows = self.ingest_handler.slice_windows(records, spec)

        window_results = []
        for index, window_records in enumerate(windows):
            window_results.append(self._run_window(index, window_records, spec))

        with stage('tracking'):
            self._write_tracking(window_results)

        with stage('output'):
            stats = dataset_stats(records)
            self.artifacts.write_csv('dataset_stats.csv', list(stats), [list(stats.values())])
            self.artifacts.write_csv('windows.csv', WINDOW_COLUMNS,
                                     [[r['summary'][c] for c in WINDOW_COLUMNS] for r in window_results])
            manifest = self._manifest(spec, window_results, stats)
            self.artifacts.write_json('run_manifest.json', manifest)
            self.artifacts.commit()

        if cfg.plots:
            with stage('plot'):
                PlotHandler().emit_plots(cfg.output)

        logger.info(f"Run complete, artifacts in {cfg.output}")
        return manifest

    def _run_window(self, index: int, window_records, spec: WindowSpec) -> Dict:
        lower, upper = spec.bounds(index)

        with stage('textnorm', index):
            comments = self.text_handler.normalize_records(window_records)

        with stage('graphbuild', index):
            net = self.graph_handler.build_network(comments)
            net = self.graph_handler.prune_singleton_users(net)
            labels = self.graph_handler.label_users(net, window_records)
            net_stats = self.graph_handler.network_stats(net)
            folder = window_dir(index)
            self.graph_handler.export_graphml(net, self.artifacts.partial_path(f"{folder}/network.graphml"))
            self.graph_handler.export_dot(net, self.artifacts.partial_path(f"{folder}/network.dot"))

        with stage('motif', index):
            profiles = self.motif_handler.count_network(net)
            support = motif_support(profiles)
            self.artifacts.write_csv(
                f"{folder}/profiles.csv", ['ego_id'] + support,
                ([p.ego] + [p.counts.get(m, 0) for m in support] for p in profiles))

        projection = None
        with stage('profile', index):
            if profiles:
                nrps = self.profile_handler.normalized_profiles(profiles)
                self.artifacts.write_csv(
                    f"{folder}/nrp.csv", ['ego_id'] + support,
                    ([nrp.ego] + [float(v) for v in nrp.values] for nrp in nrps))
                projection = self.profile_handler.project(nrps)
            else:
                logger.warning(f"Window {index} has no users after pruning")

            if projection is not None:
                pcs = [f"pc{j + 1}" for j in range(projection.coordinates.shape[1])]
                self.artifacts.write_csv(
                    f"{folder}/coords.csv", ['ego_id'] + pcs + ['label'],
                    ([ego] + [float(x) for x in projection.coordinates[i]] + [labels[ego]]
                     for i, ego in enumerate(projection.egos)))
                self.artifacts.write_csv(
                    f"{folder}/loadings.csv", ['motif_id'] + pcs,
                    ([motif] + [float(x) for x in projection.loadings[j]]
                     for j, motif in enumerate(projection.support)))

        discriminating = []
        with stage('tracking', index):
            present = {labels[p.ego] for p in profiles}
            if {SPAM, REGULAR} <= present:
                discriminating = self.tracking_handler.discriminating_motifs(profiles, labels)
            else:
                logger.info(f"Window {index}: both label classes needed for discriminating motifs")

        summary = {
            'window_index': index,
            'start': format_timestamp(lower),
            'end': format_timestamp(upper),
            'records': len(window_records),
            'retained_comments': len(comments),
            'egos': len(profiles),
            'motifs_observed': len(support)
        }
        summary.update(net_stats)
        logger.info(f"Window {index}: {net_stats['user_nodes']} users, {net_stats['video_nodes']} videos, "
                    f"{net_stats['edges']} edges, {len(support)} motif classes")

        return {
            'summary': summary,
            'network': net,
            'labels': labels,
            'profiles': profiles,
            'discriminating': discriminating,
            'explained_variance': [] if projection is None else [float(v) for v in projection.explained_variance]
        }

    def _write_tracking(self, results: List[Dict]):
        tracker = self.tracking_handler
        observed = set(self.cfg.track_motifs)
        for r in results:
            observed.update(motif_support(r['profiles']))

        tracked = tracker.tracked_motifs([r['discriminating'] for r in results], self.cfg.track_motifs)
        self.tracked = tracked
        pairs = [(r['network'], r['profiles']) for r in results]

        series_rows = []
        for motif in sorted(observed):
            series = tracker.motif_series(pairs, motif)
            for w, (raw, value) in enumerate(zip(series.raw, series.normalized)):
                series_rows.append([w, motif, raw, value])
        self.artifacts.write_csv('series.csv', ['window_index', 'motif_id', 'raw', 'normalized'], series_rows)

        ranking_rows = []
        for motif in tracked:
            for w, r in enumerate(results):
                ranking = tracker.rank_users_by_motif(r['profiles'], motif, r['labels'], window=w)
                for rank, (user, count, label) in enumerate(ranking.entries, start=1):
                    ranking_rows.append([w, motif, rank, user, count, label])
        self.artifacts.write_csv('ranking.csv', ['window_index', 'motif_id', 'rank', 'user_id', 'count', 'label'],
                                 ranking_rows)

        disc_rows = []
        for w, r in enumerate(results):
            for rank, (motif, score) in enumerate(r['discriminating'], start=1):
                disc_rows.append([w, rank, motif, score])
        self.artifacts.write_csv('discriminating.csv', ['window_index', 'rank', 'motif_id', 'score'], disc_rows)
        counters = tracker.get_stats()
        logger.info(f"Tracking {len(tracked)} motif(s) over {len(results)} window(s): "
                    f"{counters['series_built']} series, {counters['rankings_built']} rankings")

    def _manifest(self, spec: WindowSpec, results: List[Dict], stats: Dict) -> Dict:
        params = asdict(self.cfg)
        params['window_start'] = format_timestamp(spec.start)
        params['motif_sizes'] = list(self.cfg.motif_sizes)
        params['track_motifs'] = list(self.cfg.track_motifs)

        checker = SystemStatusChecker()
        return {
            'parameters': params,
            'dataset': stats,
            'ingest': self.ingest_handler.get_stats(),
            'rejected_lines': [list(r) for r in self.ingest_handler.rejections],
            'windows': [dict(r['summary'], explained_variance=r['explained_variance']) for r in results],
            'tracked_motifs': list(self.tracked),
            'versions': checker.versions()
        }


WINDOW_COLUMNS = ['window_index', 'start', 'end', 'records', 'retained_comments', 'egos', 'motifs_observed',
                  'video_nodes', 'user_nodes', 'spam_users', 'edges', 'uv_edges', 'uu_edges', 'components',
                  'comments']


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='spam-motif-tracker',
        description='Track spam campaigns in comment streams with egocentric network motifs'
    )
    parser.add_argument('--log-level', default=None, help='DEBUG, INFO, WARNING or ERROR (default INFO)')
    sub = parser.add_subparsers(dest='command', required=True)

    synth = sub.add_parser('synth', help='generate a synthetic scenario with planted campaigns')
    synth.add_argument('--seed', type=int, default=None, help='seed overriding the scenario file')
    synth.add_argument('--config', default=None, help='INI scenario file (see scenario_example.ini)')
    synth.add_argument('--out', required=True, help='directory for comments.jsonl and ground_truth.csv')

    run = sub.add_parser('run', help='run the full pipeline on a JSONL comment file')
    run.add_argument('--input', required=True, help='JSONL comment file')
    run.add_argument('--out', '--output', dest='output', default=RunConfig.output, help='artifact directory')
    run.add_argument('--config', default=None, help='JSON config; its values override flags')
    run.add_argument('--window-start', default=None, help='RFC 3339 start (default: earliest comment, hour floor)')
    run.add_argument('--window-hours', type=float, default=RunConfig.window_hours)
    run.add_argument('--window-count', type=int, default=RunConfig.window_count)
    run.add_argument('--min-length', type=int, default=DEFAULT_MIN_LENGTH)
    run.add_argument('--shingle-window', type=int, default=DEFAULT_SHINGLE_WINDOW)
    run.add_argument('--stopwords', default=None, help='stopword file, one word per line')
    run.add_argument('--similarity-threshold', type=float, default=DEFAULT_SIMILARITY_THRESHOLD)
    run.add_argument('--motif-sizes', type=parse_sizes, default=DEFAULT_MOTIF_SIZES, help='e.g. 3,4,5')
    run.add_argument('--ego-radius', type=int, default=DEFAULT_EGO_RADIUS)
    run.add_argument('--epsilon', type=int, default=DEFAULT_EPSILON)
    run.add_argument('--components', type=int, default=DEFAULT_COMPONENTS)
    run.add_argument('--top-motifs', type=int, default=DEFAULT_TOP_MOTIFS,
                     help='discriminating motifs tracked per window')
    run.add_argument('--track-motif', action='append', default=[], help='extra MotifId to track (repeatable)')
    run.add_argument('--threads', type=int, default=1, help='worker processes for motif counting')
    run.add_argument('--seed', type=int, default=None, help='recorded in the manifest')
    run.add_argument('--plots', action='store_true', help='emit SVG plots after the run')

    plot = sub.add_parser('plot', help='render SVG plots from a finished run')
    plot.add_argument('--artifacts', required=True)
    plot.add_argument('--ground-truth', default=None, help='ground_truth.csv to outline campaign accounts')

    rank = sub.add_parser('rank', help='rank users of a finished run by one motif')
    rank.add_argument('--artifacts', required=True)
    rank.add_argument('--motif', required=True, help='MotifId')
    rank.add_argument('--window', type=int, required=True)
    rank.add_argument('--top', type=int, default=20)

    motifs = sub.add_parser('motifs', help='list motif ids with ASCII renderings')
    motifs.add_argument('--sizes', type=parse_sizes, default=DEFAULT_MOTIF_SIZES)

    return parser


def run_config_from_args(args) -> RunConfig:
    cfg = RunConfig(
        input=args.input,
        output=args.output,
        window_start=args.window_start,
        window_hours=args.window_hours,
        window_count=args.window_count,
        min_length=args.min_length,
        shingle_window=args.shingle_window,
        stopwords=args.stopwords,
        similarity_threshold=args.similarity_threshold,
        motif_sizes=tuple(args.motif_sizes),
        ego_radius=args.ego_radius,
        epsilon=args.epsilon,
        components=args.components,
        top_motifs=args.top_motifs,
        track_motifs=tuple(args.track_motif),
        threads=args.threads,
        seed=args.seed,
        log_level=args.log_level or 'INFO',
        plots=args.plots
    )
    if args.config:
        cfg = apply_config_file(cfg, args.config)
    if args.log_level:
        cfg.log_level = args.log_level
    return cfg


def rank_from_artifacts(artifact_dir: str, motif: str, window: int, top: int) -> List[Tuple[int, str, int, str]]:
    """Ranking of one motif in one window, read back from profiles.csv and the network"""
    folder = os.path.join(artifact_dir, window_dir(window))
    labels = read_graphml_labels(os.path.join(folder, 'network.graphml'))
    profiles = [MotifProfile(ego=row['ego_id'], counts={motif: int(row.get(motif) or 0)})
                for row in read_csv(os.path.join(folder, 'profiles.csv'))]
    ranking = TrackingHandler().rank_users_by_motif(profiles, motif, labels, window=window)
    return [(rank, user, count, label) for rank, (user, count, label) in enumerate(ranking.entries[:top], start=1)]


def command_synth(args) -> int:
    cfg = load_scenario(args.config) if args.config else ScenarioConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    handler = SynthHandler(cfg)
    paths = handler.write_scenario(args.out)
    stats = handler.get_stats()
    print(f"✓ {stats['comments']} comments ({stats['campaign_comments']} from campaigns) -> {paths['comments']}")
    print(f"✓ Ground truth -> {paths['ground_truth']}")
    return 0


def command_run(args) -> int:
    cfg = run_config_from_args(args)
    setup_logging(cfg.log_level, os.path.join(cfg.output, LOG_FILE))
    tracker = SpamCampaignTracker(cfg)
    manifest = tracker.run_pipeline()
    print(f"✓ {len(manifest['windows'])} window(s) processed, artifacts in {cfg.output}")
    print(f"✓ Tracked motifs: {len(manifest['tracked_motifs'])}")
    return 0


def command_plot(args) -> int:
    truth = load_ground_truth(args.ground_truth) if args.ground_truth else None
    written = PlotHandler().emit_plots(args.artifacts, truth)
    print(f"✓ {len(written)} plot(s) written to {os.path.join(args.artifacts, 'plots')}")
    return 0


def command_rank(args) -> int:
    entries = rank_from_artifacts(args.artifacts, args.motif, args.window, args.top)
    if not entries:
        print(f"No user carries {args.motif} in window {args.window}")
        return 0
    print(f"{'rank':>4}  {'user_id':<24} {'count':>10}  label")
    for rank, user, count, label in entries:
        print(f"{rank:>4}  {user:<24} {count:>10}  {label}")
    return 0


def command_motifs(args) -> int:
    ids = all_motif_ids(args.sizes)
    for motif in ids:
        print(render_motif(motif))
        print()
    print(f"{len(ids)} motif(s)")
    return 0


COMMANDS = {
    'synth': command_synth,
    'run': command_run,
    'plot': command_plot,
    'rank': command_rank,
    'motifs': command_motifs
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point for the application"""
    args = build_parser().parse_args(argv)
    if args.command != 'run':
        setup_logging(args.log_level or 'INFO')

    try:
        return COMMANDS[args.command](args)
    except StageError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, FileNotFoundError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("\nInterrupted by user")
        return 1


if __name__ == "__main__":
    sys.exit(main())
