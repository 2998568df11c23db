"""
Comment Ingest Handler
Parses JSONL comment records and slices them into fixed-length time windows
"""

import json
import logging
import os
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import BinaryIO, Dict, Iterable, List, Optional, Tuple

logger = logging.getLogger(__name__)

REQUIRED_FIELDS = ('comment_id', 'user_id', 'video_id', 'published_at', 'text', 'spam_hint')
TIMESTAMP_FORMAT = '%Y-%m-%dT%H:%M:%SZ'


@dataclass(frozen=True)
class CommentRecord:
    """One posted comment"""
    comment_id: str
    user_id: str
    video_id: str
    published_at: datetime
    text: str
    spam_hint: bool


@dataclass(frozen=True)
class WindowSpec:
    """Half-open windows [start + i*length, start + (i+1)*length)"""
    start: datetime
    window_length: timedelta = field(default=timedelta(hours=6))
    window_count: int = 12

    def __post_init__(self):
        if self.window_length <= timedelta(0):
            raise ValueError(f"window_length must be positive, got {self.window_length}")
        if self.window_count < 1:
            raise ValueError(f"window_count must be >= 1, got {self.window_count}")

    def bounds(self, index: int) -> Tuple[datetime, datetime]:
        lower = self.start + index * self.window_length
        return lower, lower + self.window_length


def parse_timestamp(value: str) -> datetime:
    """
    Parse an RFC 3339 timestamp and normalize it to UTC, second precision

    Args:
        value: timestamp string, e.g. 2011-11-17T04:19:32Z or with an offset

    Returns:
        Timezone-aware UTC datetime
    """
    if not isinstance(value, str) or not value:
        raise ValueError(f"timestamp must be a non-empty string, got {value!r}")
    parsed = datetime.fromisoformat(value.replace('z', 'Z').replace('Z', '+00:00'))
    if parsed.tzinfo is None:
        raise ValueError(f"timestamp has no UTC offset: {value}")
    try:
        return parsed.astimezone(timezone.utc).replace(microsecond=0)
    except OverflowError:
        raise ValueError(f"timestamp out of range in UTC: {value}")


def format_timestamp(value: datetime) -> str:
    return value.astimezone(timezone.utc).strftime(TIMESTAMP_FORMAT)


class IngestHandler:
    """
    Reads comment records from JSONL streams and assigns them to time windows
    """

    def __init__(self):
        self.stats = {
            'lines_read': 0,
            'records_parsed': 0,
            'records_rejected': 0,
            'records_dropped': 0
        }
        self.rejections: List[Tuple[int, str]] = []

    def _record_from_object(self, obj: Dict, seen_ids: set) -> CommentRecord:
        if not isinstance(obj, dict):
            raise ValueError("line is not a JSON object")

        missing = [name for name in REQUIRED_FIELDS if name not in obj]
        if missing:
            raise ValueError(f"missing required field(s): {', '.join(missing)}")

        for name in ('comment_id', 'user_id', 'video_id'):
            if not isinstance(obj[name], str) or not obj[name]:
                raise ValueError(f"{name} must be a non-empty string")
        if not isinstance(obj['text'], str):
            raise ValueError("text must be a string")
        if not isinstance(obj['spam_hint'], bool):
            raise ValueError("spam_hint must be a boolean")
        if obj['comment_id'] in seen_ids:
            raise ValueError(f"duplicate comment_id {obj['comment_id']}")

        return CommentRecord(
            comment_id=obj['comment_id'],
            user_id=obj['user_id'],
            video_id=obj['video_id'],
            published_at=parse_timestamp(obj['published_at']),
            text=obj['text'],
            spam_hint=obj['spam_hint']
        )

    def parse_comments(self, source: BinaryIO) -> List[CommentRecord]:
        """
        Parse a UTF-8 JSONL byte stream into comment records

        Malformed lines and records with missing fields are collected in
        self.rejections as (line number, reason) and logged.

        Args:
            source: binary stream, one JSON object per non-empty line

        Returns:
            Records in file order

        Raises:
            ValueError: when no valid record was found
        """
        records: List[CommentRecord] = []
        seen_ids: set = set()
        self.rejections = []

        for line_no, raw in enumerate(source, start=1):
            self.stats['lines_read'] += 1
            try:
                line = raw.decode('utf-8').strip()
            except UnicodeDecodeError as e:
                self._reject(line_no, f"invalid UTF-8: {e}")
                continue
            if not line:
                continue

            try:
                obj = json.loads(line)
                record = self._record_from_object(obj, seen_ids)
            except (json.JSONDecodeError, ValueError, TypeError) as e:
                self._reject(line_no, str(e))
                continue

            seen_ids.add(record.comment_id)
            records.append(record)

        self.stats['records_parsed'] += len(records)

        if self.rejections:
            logger.warning(f"Rejected {len(self.rejections)} input line(s)")
        if not records:
            logger.error("No valid records in input")
            raise ValueError("no valid records")

        logger.info(f"Parsed {len(records)} comment records")
        return records

    def _reject(self, line_no: int, reason: str):
        self.rejections.append((line_no, reason))
        self.stats['records_rejected'] += 1
        logger.warning(f"Line {line_no}: {reason}")

    def load_comments(self, path: str) -> List[CommentRecord]:
        """
        Load comment records from a JSONL file

        Args:
            path: Path to the JSONL file
        """
        if not os.path.exists(path):
            raise FileNotFoundError(f"Input file not found: {path}")

        try:
            with open(path, 'rb') as f:
                return self.parse_comments(f)
        except OSError as e:
            logger.error(f"Failed to read {path}: {e}")
            raise

    def slice_windows(self, records: Iterable[CommentRecord], spec: WindowSpec) -> List[List[CommentRecord]]:
        """
        Assign records to half-open time windows

        Records outside [start, start + count*length) are dropped and counted
        in stats['records_dropped'].

        Returns:
            window_count lists of records, each in input order
        """
        windows: List[List[CommentRecord]] = [[] for _ in range(spec.window_count)]
        dropped = 0
        length_seconds = spec.window_length.total_seconds()

        for record in records:
            offset = (record.published_at - spec.start).total_seconds()
            if offset < 0:
                dropped += 1
                continue
            index = int(offset // length_seconds)
            if index >= spec.window_count:
                dropped += 1
                continue
            windows[index].append(record)

        self.stats['records_dropped'] = dropped
        if dropped:
            logger.info(f"Dropped {dropped} record(s) outside the window range")
        logger.info(f"Window sizes: {[len(w) for w in windows]}")
        return windows

    def get_stats(self) -> Dict:
        """Get ingest counters"""
        return self.stats.copy()


def serialize_records(records: Iterable[CommentRecord]) -> str:
    """Render records as JSONL in schema key order"""
    lines = []
    for record in records:
        lines.append(json.dumps({
            'comment_id': record.comment_id,
            'user_id': record.user_id,
            'video_id': record.video_id,
            'published_at': format_timestamp(record.published_at),
            'text': record.text,
            'spam_hint': record.spam_hint
        }, ensure_ascii=False))
    return ''.join(line + '\n' for line in lines)


def dataset_stats(records: Iterable[CommentRecord]) -> Dict[str, int]:
    """
    Summarize a record set

    Returns:
        Dictionary with videos, total_comments, spam_comments, total_users
        and spam_users counts
    """
    videos = set()
    users = set()
    spam_users = set()
    total = 0
    spam = 0
    for record in records:
        total += 1
        videos.add(record.video_id)
        users.add(record.user_id)
        if record.spam_hint:
            spam += 1
            spam_users.add(record.user_id)

    return {
        'videos': len(videos),
        'total_comments': total,
        'spam_comments': spam,
        'total_users': len(users),
        'spam_users': len(spam_users)
    }


def default_window_start(records: Iterable[CommentRecord]) -> Optional[datetime]:
    """Earliest record timestamp floored to the hour"""
    earliest = min((r.published_at for r in records), default=None)
    if earliest is None:
        return None
    return earliest.replace(minute=0, second=0, microsecond=0)
