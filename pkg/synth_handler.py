"""
Synthetic Scenario Handler
Generates comment datasets with two planted spam campaign strategies on top
of background commenting activity, together with the ground truth
"""

import configparser
import csv
import hashlib
import io
import logging
import os
from dataclasses import dataclass, field, replace
from datetime import timedelta
from typing import Dict, List, Tuple

import numpy as np

from ingest_handler import CommentRecord, format_timestamp, parse_timestamp, serialize_records

logger = logging.getLogger(__name__)

BACKGROUND = 'BG'
CAMPAIGN1 = 'C1'
CAMPAIGN2 = 'C2'

# Small accounts commenting on many videos
CAMPAIGN1_TEMPLATES = (
    "Three Best things in the World for me now: ): ): ) 1. Lily------My boyfriend "
    "2. 55cheap. com--the cheapest shopping site for jerseys boots watches handbags "
    "3. the video above---- the most ironical and interesting video I think :]:]:] "
    "visit 55cheap. com today for amazing discounts free shipping worldwide",
    "Three most cool things in the World for me before 1 ))))) Jordan--the super star "
    "2 ))))) 66cheap. com--the cheapest shopping site for jerseys boots watches handbags "
    "3 ))))) the iphone -- best connector NOW THERE'S ONE MORE, IT'S THE VIDEO ABOVE!!!!!! "
    "visit 66cheap. com today for amazing discounts free shipping worldwide",
)

# Many accounts commenting on few videos
CAMPAIGN2_TEMPLATES = (
    "Don't miss this guys, the CEO of apple is releasing ipads on Thursday: osapple.co.nr "
    "november giveaway limited stock first come first served, grab yours before "
    "everybody else finds out about this amazing apple promotion",
    "dont miss out guys, the new CEO of apple is shipping ipads and iphones on Thursday: osapple.co.nr "
    "november giveaway limited stock first come first served, grab yours before "
    "everybody else finds out about this amazing apple promotion",
)

BACKGROUND_VOCABULARY = (
    "love song great music awesome video funny lol haha amazing beautiful voice "
    "guitar drums best band ever watching again tonight first comment nice cool "
    "like subscribe channel lyrics chorus remix dance football goal highlights "
    "trailer movie actor scene epic fail cat puppy cute baby laugh cried wow "
    "insane skills talent concert tour ticket album release awesome perfect "
    "favourite part minute replay legend classic memories childhood summer "
    "beach holiday recipe cooking delicious tutorial helpful thanks explained "
    "clearly game level boss speedrun record gamer console update graphics"
).split()

FILLER_WORDS = ("really", "omg", "lol", "wow", "seriously", "yeah", "totally", "guys")
OBFUSCATING_GAPS = ("  ", "\n", " ", " \n ", "\t")
LETTERS = "abcdefghijklmnopqrstuvwxyz"


@dataclass
class BackgroundConfig:
    n_users: int = 2400
    n_videos: int = 300
    active_users_per_window: int = 1600
    multi_video_rate: float = 0.3
    max_videos: int = 3
    hint_rate: float = 0.02


@dataclass
class Campaign1Config:
    n_accounts: int = 4
    videos_per_account: int = 40
    active_windows: Tuple[int, ...] = (2, 3, 8, 9)
    variation_rate: float = 0.05


@dataclass
class Campaign2Config:
    n_accounts: int = 24
    videos_per_account: int = 2
    active_windows: Tuple[int, ...] = (3, 4, 9, 10)
    variation_rate: float = 0.1


@dataclass
class ScenarioConfig:
    """Parameters of a synthetic comment dataset"""
    seed: int = 2011
    n_windows: int = 12
    window_hours: int = 6
    start: str = "2011-11-14T00:00:00Z"
    hint_fraction: float = 0.7
    background: BackgroundConfig = field(default_factory=BackgroundConfig)
    campaign1: Campaign1Config = field(default_factory=Campaign1Config)
    campaign2: Campaign2Config = field(default_factory=Campaign2Config)

    def validate(self):
        """
        Check the scenario is feasible

        Raises:
            ValueError: on an infeasible or inconsistent configuration
        """
        bg, c1, c2 = self.background, self.campaign1, self.campaign2
        problems = []
        if self.n_windows < 1 or self.window_hours < 1:
            problems.append("n_windows and window_hours must be positive")
        if not 0.0 <= self.hint_fraction <= 1.0:
            problems.append("hint_fraction must lie in [0, 1]")
        if c1.n_accounts >= c2.n_accounts:
            problems.append("campaign1 must use fewer accounts than campaign2")
        if c1.videos_per_account < 5 * c2.videos_per_account:
            problems.append("campaign1 accounts must target at least 5x the videos of campaign2 accounts")
        if c1.videos_per_account > bg.n_videos:
            problems.append("campaign1 targets more videos than exist")
        if 2 * c2.n_accounts * c2.videos_per_account > bg.n_videos:
            problems.append("not enough videos for video-disjoint campaign2 accounts")
        if bg.active_users_per_window > bg.n_users:
            problems.append("more active background users than background users")
        if bg.max_videos < 1 or bg.max_videos > bg.n_videos:
            problems.append("background max_videos out of range")
        for name, rate in (('multi_video_rate', bg.multi_video_rate), ('hint_rate', bg.hint_rate),
                           ('campaign1 variation_rate', c1.variation_rate),
                           ('campaign2 variation_rate', c2.variation_rate)):
            if not 0.0 <= rate <= 1.0:
                problems.append(f"{name} must lie in [0, 1]")
        for name, windows in (('campaign1', c1.active_windows), ('campaign2', c2.active_windows)):
            if any(w < 0 or w >= self.n_windows for w in windows):
                problems.append(f"{name} active window outside 0..{self.n_windows - 1}")
        if problems:
            raise ValueError("infeasible scenario: " + "; ".join(problems))


def _parse_windows(value: str) -> Tuple[int, ...]:
    return tuple(int(part) for part in value.replace(' ', '').split(',') if part)


def load_scenario(path: str) -> ScenarioConfig:
    """
    Load a scenario from an INI-style key/value file

    Args:
        path: file with [scenario], [background], [campaign1], [campaign2] sections
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"Scenario file not found: {path}")

    parser = configparser.ConfigParser()
    parser.read(path, encoding='utf-8')
    cfg = ScenarioConfig()

    if 'scenario' in parser:
        section = parser['scenario']
        cfg.seed = section.getint('seed', cfg.seed)
        cfg.n_windows = section.getint('n_windows', cfg.n_windows)
        cfg.window_hours = section.getint('window_hours', cfg.window_hours)
        cfg.start = section.get('start', cfg.start)
        cfg.hint_fraction = section.getfloat('hint_fraction', cfg.hint_fraction)

    if 'background' in parser:
        section = parser['background']
        bg = cfg.background
        cfg.background = BackgroundConfig(
            n_users=section.getint('n_users', bg.n_users),
            n_videos=section.getint('n_videos', bg.n_videos),
            active_users_per_window=section.getint('active_users_per_window', bg.active_users_per_window),
            multi_video_rate=section.getfloat('multi_video_rate', bg.multi_video_rate),
            max_videos=section.getint('max_videos', bg.max_videos),
            hint_rate=section.getfloat('hint_rate', bg.hint_rate)
        )

    for name, current in (('campaign1', cfg.campaign1), ('campaign2', cfg.campaign2)):
        if name not in parser:
            continue
        section = parser[name]
        updated = replace(
            current,
            n_accounts=section.getint('n_accounts', current.n_accounts),
            videos_per_account=section.getint('videos_per_account', current.videos_per_account),
            active_windows=_parse_windows(section['active_windows']) if 'active_windows' in section else current.active_windows,
            variation_rate=section.getfloat('variation_rate', current.variation_rate)
        )
        setattr(cfg, name, updated)

    cfg.validate()
    logger.info(f"Scenario loaded from {path}")
    return cfg


def entity_rng(seed: int, entity: str) -> np.random.Generator:
    """Generator for one entity, derived from (seed, entity id)"""
    digest = hashlib.sha256(f"{seed}:{entity}".encode('utf-8')).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], 'big'))


def mutate_template(template: str, rate: float, rng: np.random.Generator) -> str:
    """
    Token-level variation of a campaign template

    round(rate * tokens) mutations, each an inserted filler word, a swap of
    adjacent tokens or a misspelled token; gaps between tokens are replaced
    by obfuscating whitespace at the same rate. Rate 0 returns the template.
    """
    if rate <= 0:
        return template

    tokens = template.split()
    for _ in range(int(round(rate * len(tokens)))):
        operation = rng.integers(3)
        if operation == 0:
            tokens.insert(int(rng.integers(len(tokens) + 1)), FILLER_WORDS[rng.integers(len(FILLER_WORDS))])
        elif operation == 1 and len(tokens) > 1:
            i = int(rng.integers(len(tokens) - 1))
            tokens[i], tokens[i + 1] = tokens[i + 1], tokens[i]
        else:
            candidates = [i for i, t in enumerate(tokens) if len(t) >= 4 and t.isalpha()]
            if not candidates:
                continue
            i = candidates[int(rng.integers(len(candidates)))]
            token = tokens[i]
            position = 1 + int(rng.integers(len(token) - 1))
            tokens[i] = token[:position] + LETTERS[rng.integers(len(LETTERS))] + token[position + 1:]

    pieces = [tokens[0]]
    for token in tokens[1:]:
        gap = OBFUSCATING_GAPS[rng.integers(len(OBFUSCATING_GAPS))] if rng.random() < rate else ' '
        pieces.append(gap + token)
    return ''.join(pieces)


class SynthHandler:
    """
    Produces synthetic comment streams with a known campaign schedule
    """

    def __init__(self, cfg: ScenarioConfig = None):
        self.cfg = cfg if cfg is not None else ScenarioConfig()
        self.stats = {
            'comments': 0,
            'campaign_comments': 0,
            'campaign_hinted': 0
        }

    def _assign_users(self) -> Tuple[Dict[str, str], List[str], List[str], List[str]]:
        bg, c1, c2 = self.cfg.background, self.cfg.campaign1, self.cfg.campaign2
        total = bg.n_users + c1.n_accounts + c2.n_accounts
        width = len(str(total - 1))
        user_ids = [f"user{i:0{width}d}" for i in range(total)]
        order = entity_rng(self.cfg.seed, 'accounts').permutation(total)

        c1_users = sorted(user_ids[i] for i in order[:c1.n_accounts])
        c2_users = sorted(user_ids[i] for i in order[c1.n_accounts:c1.n_accounts + c2.n_accounts])
        bg_users = sorted(user_ids[i] for i in order[c1.n_accounts + c2.n_accounts:])

        truth = {u: BACKGROUND for u in bg_users}
        truth.update({u: CAMPAIGN1 for u in c1_users})
        truth.update({u: CAMPAIGN2 for u in c2_users})
        return dict(sorted(truth.items())), bg_users, c1_users, c2_users

    def generate_scenario(self) -> Tuple[str, Dict[str, str]]:
        """
        Generate the comment stream

        Returns:
            (JSONL text, ground truth user id -> BG/C1/C2)
        """
        cfg = self.cfg
        cfg.validate()
        bg, c1, c2 = cfg.background, cfg.campaign1, cfg.campaign2

        truth, bg_users, c1_users, c2_users = self._assign_users()
        width = len(str(bg.n_videos - 1))
        videos = [f"video{i:0{width}d}" for i in range(bg.n_videos)]

        # Campaign 2 accounts own disjoint video pools
        pool_size = 2 * c2.videos_per_account
        video_order = entity_rng(cfg.seed, 'c2-pools').permutation(bg.n_videos)
        c2_pools = {user: [videos[j] for j in video_order[k * pool_size:(k + 1) * pool_size]]
                    for k, user in enumerate(c2_users)}

        start = parse_timestamp(cfg.start)
        window_seconds = cfg.window_hours * 3600
        records: List[CommentRecord] = []

        for w in range(cfg.n_windows):
            window_start = start + timedelta(seconds=w * window_seconds)
            posts: List[Tuple[str, str, str, bool, str]] = []

            rng = entity_rng(cfg.seed, f"background:{w}")
            active = sorted(bg_users[i] for i in rng.choice(len(bg_users), bg.active_users_per_window, replace=False))
            for user in active:
                urng = entity_rng(cfg.seed, f"background:{w}:{user}")
                count = 1
                if bg.max_videos > 1 and urng.random() < bg.multi_video_rate:
                    count = int(urng.integers(2, bg.max_videos + 1))
                for video_index in sorted(urng.choice(bg.n_videos, count, replace=False)):
                    text = ' '.join(BACKGROUND_VOCABULARY[i] for i in urng.integers(len(BACKGROUND_VOCABULARY), size=int(urng.integers(4, 13))))
                    posts.append((user, videos[video_index], text, bool(urng.random() < bg.hint_rate), BACKGROUND))

            if w in c1.active_windows:
                for user in c1_users:
                    urng = entity_rng(cfg.seed, f"campaign1:{w}:{user}")
                    for video_index in sorted(urng.choice(bg.n_videos, c1.videos_per_account, replace=False)):
                        template = CAMPAIGN1_TEMPLATES[urng.integers(len(CAMPAIGN1_TEMPLATES))]
                        text = mutate_template(template, c1.variation_rate, urng)
                        posts.append((user, videos[video_index], text, bool(urng.random() < cfg.hint_fraction), CAMPAIGN1))

            if w in c2.active_windows:
                for user in c2_users:
                    urng = entity_rng(cfg.seed, f"campaign2:{w}:{user}")
                    pool = c2_pools[user]
                    for pool_index in sorted(urng.choice(len(pool), c2.videos_per_account, replace=False)):
                        template = CAMPAIGN2_TEMPLATES[urng.integers(len(CAMPAIGN2_TEMPLATES))]
                        text = mutate_template(template, c2.variation_rate, urng)
                        posts.append((user, pool[pool_index], text, bool(urng.random() < cfg.hint_fraction), CAMPAIGN2))

            trng = entity_rng(cfg.seed, f"timestamps:{w}")
            offsets = np.sort(trng.integers(window_seconds, size=len(posts)))
            placement = trng.permutation(len(posts))
            for n, post_index in enumerate(placement):
                user, video, text, hint, group = posts[post_index]
                records.append(CommentRecord(
                    comment_id=f"w{w:02d}c{n:05d}",
                    user_id=user,
                    video_id=video,
                    published_at=window_start + timedelta(seconds=int(offsets[n])),
                    text=text,
                    spam_hint=hint
                ))
                self.stats['comments'] += 1
                if group != BACKGROUND:
                    self.stats['campaign_comments'] += 1
                    self.stats['campaign_hinted'] += int(hint)

        logger.info(f"Generated {len(records)} comments for {len(truth)} users over {cfg.n_windows} windows")
        return serialize_records(records), truth

    def write_scenario(self, out_dir: str) -> Dict[str, str]:
        """
        Write comments.jsonl and ground_truth.csv

        Returns:
            Mapping artifact name -> path
        """
        jsonl, truth = self.generate_scenario()
        os.makedirs(out_dir, exist_ok=True)
        paths = {
            'comments': os.path.join(out_dir, 'comments.jsonl'),
            'ground_truth': os.path.join(out_dir, 'ground_truth.csv')
        }
        with open(paths['comments'], 'w', encoding='utf-8', newline='\n') as f:
            f.write(jsonl)
        with open(paths['ground_truth'], 'w', encoding='utf-8', newline='') as f:
            f.write(ground_truth_csv(truth))
        logger.info(f"Scenario written to {out_dir}")
        return paths

    def get_stats(self) -> Dict:
        """Get generation counters"""
        return self.stats.copy()


def ground_truth_csv(truth: Dict[str, str]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(['user_id', 'group'])
    for user in sorted(truth):
        writer.writerow([user, truth[user]])
    return buffer.getvalue()


def load_ground_truth(path: str) -> Dict[str, str]:
    """Read a user_id,group ground truth file"""
    if not os.path.exists(path):
        raise FileNotFoundError(f"Ground truth file not found: {path}")
    with open(path, 'r', encoding='utf-8', newline='') as f:
        return {row['user_id']: row['group'] for row in csv.DictReader(f)}


def scenario_window_start(cfg: ScenarioConfig) -> str:
    """Window start to pass to the pipeline for a generated scenario"""
    return format_timestamp(parse_timestamp(cfg.start))
