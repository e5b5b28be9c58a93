"""
Byte-pair encoding with an explicit end-of-word symbol.

Source and target share one model, so copy attention works over a single id
space. Each word is spelled as its characters followed by "</w>"; merges are
learned greedily by pair frequency (ties go to the lexicographically smallest
pair) and replayed in rank order at encoding time.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from core.exceptions import TokenizerError
from core.utils import sha256_text

logger = logging.getLogger(__name__)

PAD, BOS, EOS, UNK = 0, 1, 2, 3
RESERVED = ("<pad>", "<s>", "</s>", "<unk>")
END_OF_WORD = "</w>"
HEADER = "sgbpe v1"
VOCAB_MARKER = "#vocab"


def _spell(word):
    return tuple(word) + (END_OF_WORD,)


def _check_marker(words):
    for word in words:
        if END_OF_WORD in word:
            raise TokenizerError(f"word {word!r} contains the end-of-word marker {END_OF_WORD}")


def _merge_pair(symbols, pair, merged):
    out = []
    i = 0
    while i < len(symbols):
        if i + 1 < len(symbols) and symbols[i] == pair[0] and symbols[i + 1] == pair[1]:
            out.append(merged)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return tuple(out)


class BpeModel:
    def __init__(self, merges, vocab):
        self.merges = [tuple(pair) for pair in merges]
        self.vocab = dict(vocab)
        self.id_to_token = [None] * len(self.vocab)
        for token, token_id in self.vocab.items():
            if not 0 <= token_id < len(self.vocab) or self.id_to_token[token_id] is not None:
                raise TokenizerError(f"token ids must be a permutation of 0..{len(self.vocab) - 1}")
            self.id_to_token[token_id] = token
        if tuple(self.id_to_token[:4]) != RESERVED:
            raise TokenizerError(f"ids 0-3 must be {', '.join(RESERVED)}")
        self.ranks = {pair: rank for rank, pair in enumerate(self.merges)}
        self.alphabet = {token for token in self.vocab if len(token) == 1}
        self._cache = {}

    def __len__(self):
        return len(self.vocab)

    def __eq__(self, other):
        return isinstance(other, BpeModel) and self.merges == other.merges and self.vocab == other.vocab

    def segment(self, word):
        """Sub-word symbols of one word; a word with unknown characters becomes [<unk>]."""
        cached = self._cache.get(word)
        if cached is not None:
            return cached
        if not word or any(ch not in self.alphabet for ch in word):
            symbols = (RESERVED[UNK],)
        else:
            symbols = _spell(word)
            while len(symbols) > 1:
                candidates = [(self.ranks.get(pair), pair) for pair in zip(symbols, symbols[1:])]
                ranked = [c for c in candidates if c[0] is not None]
                if not ranked:
                    break
                _, best = min(ranked)
                symbols = _merge_pair(symbols, best, best[0] + best[1])
        self._cache[word] = symbols
        return symbols

    def token_ids(self, symbols):
        return [self.vocab[symbol] for symbol in symbols]

    def to_text(self):
        lines = [HEADER]
        lines += [f"{left} {right}" for left, right in self.merges]
        lines.append(VOCAB_MARKER)
        lines += [f"{token}\t{token_id}" for token_id, token in enumerate(self.id_to_token)]
        return "\n".join(lines) + "\n"

    def digest(self):
        return sha256_text(self.to_text())


def bpe_train(words, vocab_size):
    """Learn merges from a word list until the vocabulary holds `vocab_size` tokens."""
    _check_marker(words)
    frequencies = Counter(word for word in words if word)
    if not frequencies:
        raise TokenizerError("cannot train BPE on an empty corpus")

    characters = sorted({ch for word in frequencies for ch in word})
    base = list(RESERVED) + characters + [END_OF_WORD]
    if vocab_size < len(base):
        raise TokenizerError(f"vocab size {vocab_size} is smaller than the base alphabet ({len(base)} symbols)")
    vocab = {token: i for i, token in enumerate(base)}

    spelled = {_spell(word): count for word, count in frequencies.items()}
    merges = []
    while len(vocab) < vocab_size:
        pairs = Counter()
        for symbols, count in spelled.items():
            for pair in zip(symbols, symbols[1:]):
                pairs[pair] += count
        if not pairs:
            break
        best = min(pairs, key=lambda pair: (-pairs[pair], pair))
        merged = best[0] + best[1]
        merges.append(best)
        if merged not in vocab:
            vocab[merged] = len(vocab)
        spelled = {_merge_pair(symbols, best, merged): count for symbols, count in spelled.items()}

    logger.info(f"Trained BPE: {len(merges)} merges, {len(vocab)} tokens")
    return BpeModel(merges, vocab)


@dataclass(frozen=True)
class WordSpanMap:
    """Half-open sub-word ranges per word, in positions of the full id sequence (BOS at 0)."""

    spans: tuple

    def __len__(self):
        return len(self.spans)

    @property
    def length(self):
        """Number of positions including BOS and EOS."""
        return self.spans[-1][1] + 1 if self.spans else 2

    def word_of_position(self):
        owner = np.full(self.length, -1, dtype=np.int64)
        for word, (start, end) in enumerate(self.spans):
            owner[start:end] = word
        return owner

    def pooling_matrix(self, dtype=np.float32):
        """[words x positions] averaging weights over each span."""
        matrix = np.zeros((len(self.spans), self.length), dtype=dtype)
        for word, (start, end) in enumerate(self.spans):
            matrix[word, start:end] = 1.0 / (end - start)
        return matrix


def encode_words(words, model):
    """Ids framed by BOS/EOS and the span of every word's sub-words."""
    _check_marker(words)
    ids, spans = [BOS], []
    for word in words:
        symbols = model.segment(word)
        start = len(ids)
        ids.extend(model.token_ids(symbols))
        spans.append((start, len(ids)))
    ids.append(EOS)
    return ids, WordSpanMap(tuple(spans))


def decode(ids, model):
    """Word list from ids; specials are dropped, "</w>" closes a word."""
    words, current = [], ""
    for token_id in ids:
        token_id = int(token_id)
        if token_id in (PAD, BOS):
            continue
        if token_id == EOS:
            break
        token = model.id_to_token[token_id]
        if token_id == UNK:
            if current:
                words.append(current)
                current = ""
            words.append(token)
            continue
        if token.endswith(END_OF_WORD):
            words.append(current + token[: -len(END_OF_WORD)])
            current = ""
        else:
            current += token
    if current:
        words.append(current)
    return words


def parse_model(text):
    lines = text.splitlines()
    if not lines or lines[0].strip() != HEADER:
        raise TokenizerError(f"not a BPE model (expected header {HEADER!r})")
    try:
        marker = lines.index(VOCAB_MARKER)
    except ValueError:
        raise TokenizerError(f"BPE model lacks a {VOCAB_MARKER} section") from None
    merges = []
    for number, line in enumerate(lines[1:marker], start=2):
        parts = line.split(" ")
        if len(parts) != 2:
            raise TokenizerError(f"line {number}: malformed merge {line!r}")
        merges.append((parts[0], parts[1]))
    vocab = {}
    for number, line in enumerate(lines[marker + 1 :], start=marker + 2):
        if not line:
            continue
        token, sep, token_id = line.rpartition("\t")
        if not sep:
            raise TokenizerError(f"line {number}: malformed vocabulary entry {line!r}")
        vocab[token] = int(token_id)
    return BpeModel(merges, vocab)


def save_model(model, path):
    Path(path).write_text(model.to_text(), encoding="utf-8")


def load_model(path):
    try:
        return parse_model(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise TokenizerError(f"cannot read BPE model {path}: {exc}") from exc
