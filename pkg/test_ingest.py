"""
Tests for JSONL ingest and time windowing
"""

import io
from datetime import datetime, timedelta, timezone

import pytest

from conftest import make_record_line, parse_lines
from ingest_handler import (IngestHandler, WindowSpec, dataset_stats, default_window_start, parse_timestamp,
                            serialize_records)


def test_parse_valid_records():
    records = parse_lines([
        make_record_line('c1', 'alice', 'v1', '2011-11-17T04:19:32Z', 'first comment here', False),
        make_record_line('c2', 'bob', 'v1', '2011-11-17T05:00:00+02:00', 'second comment here', True),
    ])

    assert [r.comment_id for r in records] == ['c1', 'c2']
    assert records[1].published_at == datetime(2011, 11, 17, 3, 0, tzinfo=timezone.utc)
    assert records[1].spam_hint is True


def test_malformed_lines_are_reported_not_fatal():
    handler = IngestHandler()
    payload = '\n'.join([
        make_record_line('c1', 'alice', 'v1', '2011-11-17T04:19:32Z', 'valid'),
        '{not json',
        '{"comment_id": "c3", "user_id": "bob"}',
        '',
        make_record_line('c1', 'carol', 'v2', '2011-11-17T04:19:32Z', 'duplicate id'),
    ]).encode('utf-8')

    records = handler.parse_comments(io.BytesIO(payload))

    assert len(records) == 1
    assert [line for line, _ in handler.rejections] == [2, 3, 5]
    assert 'missing required field' in handler.rejections[1][1]
    assert handler.get_stats()['records_rejected'] == 3


def test_empty_input_raises():
    with pytest.raises(ValueError, match="no valid records"):
        IngestHandler().parse_comments(io.BytesIO(b''))


def test_spam_hint_must_be_boolean():
    handler = IngestHandler()
    line = make_record_line('c1', 'alice', 'v1', '2011-11-17T04:19:32Z', 'text', 'yes')
    with pytest.raises(ValueError):
        handler.parse_comments(io.BytesIO(line.encode('utf-8')))
    assert 'spam_hint' in handler.rejections[0][1]


def test_timestamp_without_offset_rejected():
    with pytest.raises(ValueError):
        parse_timestamp('2011-11-17T04:19:32')


def test_timestamp_outside_utc_range_rejected():
    with pytest.raises(ValueError, match="out of range"):
        parse_timestamp('0001-01-01T00:00:00+01:00')


def test_out_of_range_timestamp_line_is_rejected():
    handler = IngestHandler()
    payload = '\n'.join([
        make_record_line('c1', 'alice', 'v1', '2011-11-17T04:19:32Z', 'valid'),
        make_record_line('c2', 'bob', 'v1', '0001-01-01T00:00:00+01:00', 'too early'),
    ]).encode('utf-8')

    records = handler.parse_comments(io.BytesIO(payload))

    assert [r.comment_id for r in records] == ['c1']
    assert [line for line, _ in handler.rejections] == [2]
    assert 'out of range' in handler.rejections[0][1]


def test_load_comments_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        IngestHandler().load_comments(str(tmp_path / 'absent.jsonl'))


def test_slice_windows_half_open(utc_start):
    spec = WindowSpec(start=utc_start, window_length=timedelta(hours=6), window_count=2)
    records = parse_lines([
        make_record_line('a', 'u', 'v', '2011-11-14T00:00:00Z', 'at start'),
        make_record_line('b', 'u', 'v', '2011-11-14T05:59:59Z', 'end of first'),
        make_record_line('c', 'u', 'v', '2011-11-14T06:00:00Z', 'boundary goes to second'),
        make_record_line('d', 'u', 'v', '2011-11-14T12:00:00Z', 'past the last window'),
        make_record_line('e', 'u', 'v', '2011-11-13T23:59:59Z', 'before the first window'),
    ])
    handler = IngestHandler()

    windows = handler.slice_windows(records, spec)

    assert [[r.comment_id for r in w] for w in windows] == [['a', 'b'], ['c']]
    assert handler.get_stats()['records_dropped'] == 2


def test_slice_windows_is_a_partition(utc_start):
    spec = WindowSpec(start=utc_start, window_length=timedelta(hours=1), window_count=5)
    lines = [make_record_line(f"c{i}", 'u', 'v', f"2011-11-14T{i % 7:02d}:{(i * 7) % 60:02d}:00Z", 'x')
             for i in range(40)]
    records = parse_lines(lines)
    handler = IngestHandler()

    windows = handler.slice_windows(records, spec)

    assigned = [r.comment_id for w in windows for r in w]
    assert len(assigned) == len(set(assigned))
    assert len(assigned) + handler.get_stats()['records_dropped'] == len(records)


def test_window_spec_validation(utc_start):
    with pytest.raises(ValueError):
        WindowSpec(start=utc_start, window_length=timedelta(0))
    with pytest.raises(ValueError):
        WindowSpec(start=utc_start, window_count=0)


def test_serialize_then_parse_preserves_records():
    original = parse_lines([
        make_record_line('c1', 'alice', 'v1', '2011-11-17T04:19:32Z', 'café ❤ text', True),
    ])

    reparsed = IngestHandler().parse_comments(io.BytesIO(serialize_records(original).encode('utf-8')))

    assert reparsed == original


def test_dataset_stats_counts():
    records = parse_lines([
        make_record_line('c1', 'alice', 'v1', '2011-11-17T04:00:00Z', 'x', True),
        make_record_line('c2', 'alice', 'v2', '2011-11-17T04:00:00Z', 'x', False),
        make_record_line('c3', 'bob', 'v1', '2011-11-17T04:00:00Z', 'x', False),
    ])

    assert dataset_stats(records) == {
        'videos': 2,
        'total_comments': 3,
        'spam_comments': 1,
        'total_users': 2,
        'spam_users': 1
    }


def test_default_window_start_floors_to_hour():
    records = parse_lines([
        make_record_line('c1', 'a', 'v', '2011-11-17T04:19:32Z', 'x'),
        make_record_line('c2', 'a', 'v', '2011-11-17T03:59:00Z', 'x'),
    ])
    assert default_window_start(records) == datetime(2011, 11, 17, 3, tzinfo=timezone.utc)
