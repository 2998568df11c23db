"""
Tests for comment tokenization, shingling and Jaccard distance
"""

import random

import pytest

from conftest import make_record_line, parse_lines
from text_handler import (DEFAULT_STOPWORDS, TextHandler, jaccard_distance, load_stopwords, rolling_hashes,
                          shingle, substring_hash)


@pytest.fixture
def handler():
    return TextHandler()


def test_stopwords_and_punctuation_removed(handler):
    text = "Check   out 55cheap. com the cheapest shopping site!!!"
    assert handler.normalize_comment(text) == "check 55cheap com cheapest shopping site"


def test_han_only_comment_rejected(handler):
    assert handler.normalize_comment("这是 一个 非常 好看 的 视频 我 很 喜欢 这个 频道 谢谢 大家") is None
    assert handler.normalize_comment("hi!!") is None


def test_shingle_known_strings():
    assert len(shingle("abc", 3)) == 1
    assert len(shingle("aaaa", 3)) == 1
    assert shingle("abcab", 3) == {substring_hash("abc"), substring_hash("bca"), substring_hash("cab")}
    assert len(shingle("abcab", 3)) == 3


def test_normalize_is_idempotent(handler):
    once = handler.normalize_comment("Three most cool things in the World for me before 1 ))))) Jordan--the super star")
    assert handler.normalize_comment(once) == once


def test_spam_comment_normalizes(handler):
    text = "Three Best things in the World for me now: ): ): ) 1. Lily------My boyfriend"
    assert handler.normalize_comment(text) == "three best things world 1 lilymy boyfriend"


def test_short_comment_rejected(handler):
    assert handler.normalize_comment("nice video") is None
    assert handler.normalize_comment("nice video", min_length=0) == "nice video"


def test_non_latin_tokens_dropped(handler):
    assert handler.tokenize("great видео video 好 café") == ["great", "video", "café"]


def test_whitespace_obfuscation_collapses(handler):
    plain = "cheap jerseys boots watches handbags everywhere online"
    obfuscated = "cheap  jerseys\nboots   watches\t\thandbags   everywhere online"
    assert handler.normalize_comment(obfuscated) == handler.normalize_comment(plain)


def test_stopwords_list_contents():
    assert len(DEFAULT_STOPWORDS) == 179
    for word in ("out", "the", "now", "above", "wouldn't"):
        assert word in DEFAULT_STOPWORDS


def test_stopword_override_in_token_space(tmp_path):
    path = tmp_path / "stopwords.txt"
    path.write_text("# custom list\nVideo\ndon't\n\n", encoding="utf-8")

    words = load_stopwords(str(path))
    handler = TextHandler(min_length=0, stopwords=words)

    assert words == frozenset({"video", "dont"})
    assert handler.tokenize("Video DON'T the end") == ["the", "end"]


def test_rolling_hash_matches_from_scratch():
    rng = random.Random(1234)
    alphabet = "abcdefgh xyz1é❤"
    for _ in range(1000):
        text = ''.join(rng.choice(alphabet) for _ in range(rng.randint(0, 40)))
        window = rng.randint(1, 6)
        expected = [substring_hash(text[i:i + window]) for i in range(len(text) - window + 1)]
        assert rolling_hashes(text, window) == expected


def test_short_text_has_no_shingles():
    assert shingle("ab", 3) == set()
    with pytest.raises(ValueError):
        rolling_hashes("abc", 0)


def test_jaccard_properties():
    rng = random.Random(99)
    for _ in range(200):
        a = {rng.randint(0, 30) for _ in range(rng.randint(0, 15))}
        b = {rng.randint(0, 30) for _ in range(rng.randint(0, 15))}
        d = jaccard_distance(a, b)
        assert 0.0 <= d <= 1.0
        assert d == jaccard_distance(b, a)
        if a:
            assert jaccard_distance(a, a) == 0.0

    assert jaccard_distance(set(), set()) == 1.0
    assert jaccard_distance({1, 2, 3}, {2, 3, 4}) == pytest.approx(0.5)


def test_one_word_change_stays_similar(handler):
    a = handler.normalize_comment("visit 55cheap com for the cheapest jerseys boots watches and handbags today")
    b = handler.normalize_comment("visit 55cheap com for the cheapest jerseys boots watches and handbags now!!")
    assert jaccard_distance(shingle(a), shingle(b)) < 0.6


def test_normalize_records_counts():
    records = parse_lines([
        make_record_line('c1', 'a', 'v', '2011-11-14T00:00:00Z', 'this comment is long enough to be retained'),
        make_record_line('c2', 'b', 'v', '2011-11-14T00:00:00Z', 'too short'),
    ])
    handler = TextHandler()

    retained = handler.normalize_records(records)

    assert [c.source.comment_id for c in retained] == ['c1']
    assert retained[0].shingles == frozenset(shingle(retained[0].modified_text))
    assert handler.get_stats() == {'comments_seen': 2, 'comments_retained': 1, 'comments_rejected': 1}
