"""
Comment Text Normalization Handler
Tokenizes comment text into modified text and rolling-hash shingle sets
"""

import logging
import os
import unicodedata
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Set

from ingest_handler import CommentRecord

logger = logging.getLogger(__name__)

HASH_BASE = 257
HASH_MODULUS = (1 << 61) - 1
LATIN_MAX_CODEPOINT = 0x024F  # end of Latin Extended-B

DEFAULT_MIN_LENGTH = 25
DEFAULT_SHINGLE_WINDOW = 3

# English stopword list, documented verbatim in README.md
DEFAULT_STOPWORDS = (
    "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "you're",
    "you've", "you'll", "you'd", "your", "yours", "yourself", "yourselves", "he",
    "him", "his", "himself", "she", "she's", "her", "hers", "herself", "it", "it's",
    "its", "itself", "they", "them", "their", "theirs", "themselves", "what",
    "which", "who", "whom", "this", "that", "that'll", "these", "those", "am", "is",
    "are", "was", "were", "be", "been", "being", "have", "has", "had", "having",
    "do", "does", "did", "doing", "a", "an", "the", "and", "but", "if", "or",
    "because", "as", "until", "while", "of", "at", "by", "for", "with", "about",
    "against", "between", "into", "through", "during", "before", "after", "above",
    "below", "to", "from", "up", "down", "in", "out", "on", "off", "over", "under",
    "again", "further", "then", "once", "here", "there", "when", "where", "why",
    "how", "all", "any", "both", "each", "few", "more", "most", "other", "some",
    "such", "no", "nor", "not", "only", "own", "same", "so", "than", "too", "very",
    "s", "t", "can", "will", "just", "don", "don't", "should", "should've", "now",
    "d", "ll", "m", "o", "re", "ve", "y", "ain", "aren", "aren't", "couldn",
    "couldn't", "didn", "didn't", "doesn", "doesn't", "hadn", "hadn't", "hasn",
    "hasn't", "haven", "haven't", "isn", "isn't", "ma", "mightn", "mightn't",
    "mustn", "mustn't", "needn", "needn't", "shan", "shan't", "shouldn",
    "shouldn't", "wasn", "wasn't", "weren", "weren't", "won", "won't", "wouldn",
    "wouldn't"
)


@dataclass(frozen=True)
class NormalizedComment:
    """A retained comment with its modified text and shingle hashes"""
    source: CommentRecord
    modified_text: str
    shingles: FrozenSet[int]


def strip_punctuation(token: str) -> str:
    """Remove every Unicode punctuation (P*) and symbol (S*) character"""
    return ''.join(c for c in token if unicodedata.category(c)[0] not in ('P', 'S'))


def is_latin_token(token: str) -> bool:
    """True unless an alphabetic character lies outside the Latin blocks"""
    return all(ord(c) <= LATIN_MAX_CODEPOINT for c in token if c.isalpha())


def prepare_stopwords(words: Iterable[str]) -> FrozenSet[str]:
    """Bring stopwords into token space (stripped, lowercased)"""
    prepared = set()
    for word in words:
        token = strip_punctuation(word.strip()).lower()
        if token:
            prepared.add(token)
    return frozenset(prepared)


def load_stopwords(path: str) -> FrozenSet[str]:
    """
    Load a stopword override file

    Args:
        path: text file with one word per line, '#' starts a comment line

    Returns:
        Stopwords in token space
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"Stopword file not found: {path}")

    with open(path, 'r', encoding='utf-8') as f:
        words = [line for line in f if line.strip() and not line.lstrip().startswith('#')]

    stopwords = prepare_stopwords(words)
    logger.info(f"Loaded {len(stopwords)} stopwords from {path}")
    return stopwords


def substring_hash(text: str) -> int:
    """Polynomial hash of a whole string, computed from scratch"""
    value = 0
    for c in text:
        value = (value * HASH_BASE + ord(c)) % HASH_MODULUS
    return value


def rolling_hashes(text: str, window: int = DEFAULT_SHINGLE_WINDOW) -> List[int]:
    """
    Rabin-Karp hashes of every contiguous character window

    Returns:
        One hash per window position, in position order
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    if len(text) < window:
        return []

    high = pow(HASH_BASE, window - 1, HASH_MODULUS)
    current = substring_hash(text[:window])
    hashes = [current]
    for i in range(1, len(text) - window + 1):
        current = ((current - ord(text[i - 1]) * high) * HASH_BASE + ord(text[i + window - 1])) % HASH_MODULUS
        hashes.append(current)
    return hashes


def shingle(modified_text: str, window: int = DEFAULT_SHINGLE_WINDOW) -> Set[int]:
    """Set of rolling hashes over the modified text, spaces included"""
    return set(rolling_hashes(modified_text, window))


def jaccard_distance(a: Set[int], b: Set[int]) -> float:
    """1 - |a & b| / |a | b|; two empty sets are at distance 1"""
    union = len(a | b)
    if union == 0:
        return 1.0
    return 1.0 - len(a & b) / union


class TextHandler:
    """
    Applies the comment tokenization pipeline and builds shingle sets
    """

    def __init__(self, min_length: int = DEFAULT_MIN_LENGTH,
                 shingle_window: int = DEFAULT_SHINGLE_WINDOW,
                 stopwords: Optional[Iterable[str]] = None):
        if min_length < 0:
            raise ValueError(f"min_length must be >= 0, got {min_length}")
        if shingle_window < 1:
            raise ValueError(f"shingle_window must be >= 1, got {shingle_window}")

        self.config = {
            'min_length': min_length,
            'shingle_window': shingle_window
        }
        self.stopwords = prepare_stopwords(DEFAULT_STOPWORDS if stopwords is None else stopwords)
        self.stats = {
            'comments_seen': 0,
            'comments_retained': 0,
            'comments_rejected': 0
        }

    def tokenize(self, text: str) -> List[str]:
        """Tokens surviving the whitespace split, strip, lowercase and filter steps"""
        tokens = []
        for raw in text.split():
            token = strip_punctuation(raw).lower()
            if token in self.stopwords:
                continue
            if not is_latin_token(token):
                continue
            if not token:
                continue
            tokens.append(token)
        return tokens

    def normalize_comment(self, text: str, min_length: Optional[int] = None) -> Optional[str]:
        """
        Convert raw comment text to modified text

        Args:
            text: raw comment text
            min_length: override for the configured minimum length

        Returns:
            Space-joined tokens, or None when shorter than the minimum length
        """
        limit = self.config['min_length'] if min_length is None else min_length
        modified = ' '.join(self.tokenize(text))
        if len(modified) < limit:
            return None
        return modified

    def normalize_records(self, records: Iterable[CommentRecord]) -> List[NormalizedComment]:
        """
        Normalize and shingle every record, dropping rejected ones

        Returns:
            Retained comments in input order
        """
        retained = []
        window = self.config['shingle_window']
        for record in records:
            self.stats['comments_seen'] += 1
            modified = self.normalize_comment(record.text)
            if modified is None:
                self.stats['comments_rejected'] += 1
                continue
            retained.append(NormalizedComment(
                source=record,
                modified_text=modified,
                shingles=frozenset(shingle(modified, window))
            ))
            self.stats['comments_retained'] += 1

        logger.debug(f"Retained {len(retained)} comment(s) after normalization")
        return retained

    def get_stats(self) -> Dict:
        """Get normalization counters"""
        return self.stats.copy()
