"""
Synthetic parallel corpus with gold dependency trees.

Correct sentences are drawn from a few templates whose derivations carry
their own (Stanford basic) dependency trees. The source side is made
ungrammatical by rule-based corruptions applied to the derivation, and its
tree is rebuilt from the surviving tokens, so both sides always come with a
valid tree.
"""

import dataclasses
import logging
from dataclasses import dataclass

from core.exceptions import ConfigurationError, DataError
from deptree.tree import DepTree

from .corpus import SentencePair

logger = logging.getLogger(__name__)

# singular, plural
ANIMATE_NOUNS = (
    ("dog", "dogs"), ("cat", "cats"), ("teacher", "teachers"), ("student", "students"),
    ("child", "children"), ("man", "men"), ("woman", "women"), ("farmer", "farmers"),
)
THING_NOUNS = (
    ("book", "books"), ("car", "cars"), ("letter", "letters"), ("song", "songs"),
    ("apple", "apples"), ("house", "houses"), ("garden", "gardens"), ("city", "cities"),
)
# base, third person singular, past
TRANSITIVE_VERBS = (
    ("like", "likes", "liked"), ("see", "sees", "saw"), ("want", "wants", "wanted"),
    ("find", "finds", "found"), ("visit", "visits", "visited"), ("write", "writes", "wrote"),
    ("carry", "carries", "carried"), ("love", "loves", "loved"), ("keep", "keeps", "kept"),
)
INTRANSITIVE_VERBS = (
    ("walk", "walks", "walked"), ("live", "lives", "lived"), ("wait", "waits", "waited"),
    ("work", "works", "worked"), ("run", "runs", "ran"),
)
ADJECTIVES = ("big", "small", "old", "young", "happy", "red", "quiet")
PREPOSITIONS = ("to", "in", "near", "with", "from")
PRONOUNS = (("he", "sg"), ("she", "sg"), ("they", "pl"), ("we", "pl"))

RULES = ("agreement", "tense", "article_drop", "article_insert", "word_swap", "deletion")

PROFILES = {
    "none": dict.fromkeys(RULES, 0.0),
    "default": {
        "agreement": 0.3,
        "tense": 0.2,
        "article_drop": 0.2,
        "article_insert": 0.1,
        "word_swap": 0.1,
        "deletion": 0.1,
    },
    "heavy": {
        "agreement": 0.5,
        "tense": 0.4,
        "article_drop": 0.4,
        "article_insert": 0.3,
        "word_swap": 0.3,
        "deletion": 0.2,
    },
}


@dataclass(frozen=True)
class Token:
    """One derivation token; `head` is another token's key, 0 for the root."""

    key: int
    word: str
    head: int
    label: str
    tag: str
    forms: tuple = ()
    number: str = ""
    tense: str = ""


def _pick(rng, items):
    return items[int(rng.integers(len(items)))]


def to_tree(tokens):
    position = {token.key: index for index, token in enumerate(tokens, start=1)}
    heads = [position[token.head] if token.head else 0 for token in tokens]
    return DepTree([t.word for t in tokens], heads, [t.label for t in tokens])


def verb_form(forms, number, tense):
    if tense == "past":
        return forms[2]
    return forms[1] if number == "sg" else forms[0]


class _Derivation:
    def __init__(self, rng):
        self.rng = rng
        self.tokens = []
        self._next = 1

    def key(self):
        key = self._next
        self._next += 1
        return key

    def emit(self, key, word, head, label, tag, **features):
        self.tokens.append(Token(key, word, head, label, tag, **features))

    def noun_phrase(self, head, label, nouns):
        number = "pl" if self.rng.random() < 0.4 else "sg"
        noun = self.key()
        singular, plural = _pick(self.rng, nouns)
        if number == "sg" or self.rng.random() < 0.5:
            article = "a" if number == "sg" and self.rng.random() < 0.4 else "the"
            self.emit(self.key(), article, noun, "det", "det")
        if self.rng.random() < 0.3:
            self.emit(self.key(), _pick(self.rng, ADJECTIVES), noun, "amod", "adj")
        self.emit(noun, singular if number == "sg" else plural, head, label, "noun", number=number)
        return number

    def subject(self, head):
        if self.rng.random() < 0.3:
            word, number = _pick(self.rng, PRONOUNS)
            self.emit(self.key(), word, head, "nsubj", "pron", number=number)
            return number
        return self.noun_phrase(head, "nsubj", ANIMATE_NOUNS)

    def verb(self, key, head, label, verbs, number, tense):
        forms = _pick(self.rng, verbs)
        self.emit(key, verb_form(forms, number, tense), head, label, "verb", forms=forms, number=number, tense=tense)

    def prepositional(self, head):
        prep = self.key()
        self.emit(prep, _pick(self.rng, PREPOSITIONS), head, "prep", "prep")
        self.noun_phrase(prep, "pobj", THING_NOUNS)

    def punctuation(self, head):
        self.emit(self.key(), ".", head, "punct", "punct")


def _transitive(d, tense):
    root = d.key()
    number = d.subject(root)
    d.verb(root, 0, "root", TRANSITIVE_VERBS, number, tense)
    d.noun_phrase(root, "dobj", THING_NOUNS)
    if d.rng.random() < 0.3:
        d.prepositional(root)
    d.punctuation(root)


def _intransitive(d, tense):
    root = d.key()
    number = d.subject(root)
    d.verb(root, 0, "root", INTRANSITIVE_VERBS, number, tense)
    d.prepositional(root)
    d.punctuation(root)


def _relative_clause(d, tense):
    root = d.key()
    subject = d.key()
    number = "pl" if d.rng.random() < 0.4 else "sg"
    singular, plural = _pick(d.rng, ANIMATE_NOUNS)
    d.emit(d.key(), "the", subject, "det", "det")
    d.emit(subject, singular if number == "sg" else plural, root, "nsubj", "noun", number=number)
    relative = d.key()
    d.emit(d.key(), "who", relative, "nsubj", "rel")
    d.verb(relative, subject, "rcmod", TRANSITIVE_VERBS, number, "present" if d.rng.random() < 0.5 else "past")
    d.noun_phrase(relative, "dobj", THING_NOUNS)
    d.verb(root, 0, "root", TRANSITIVE_VERBS, number, tense)
    d.noun_phrase(root, "dobj", THING_NOUNS)
    d.punctuation(root)


TEMPLATES = (_transitive, _intransitive, _relative_clause)


def sample_sentence(rng):
    """Tokens of one grammatical sentence."""
    d = _Derivation(rng)
    template = _pick(rng, TEMPLATES)
    template(d, "past" if rng.random() < 0.4 else "present")
    return d.tokens


# ---------------------------------------------------------------------------
# Corruption rules: each returns the corrupted token list, or None when the
# sentence offers nothing to corrupt.
# ---------------------------------------------------------------------------


def _root_index(tokens):
    return next(k for k, token in enumerate(tokens) if token.head == 0)


def _has_children(tokens, key):
    return any(token.head == key for token in tokens)


def agreement_flip(tokens, rng):
    """Present-tense verb form of the opposite number for the main verb."""
    k = _root_index(tokens)
    verb = tokens[k]
    number = "pl" if verb.number == "sg" else "sg"
    word = verb_form(verb.forms, number, "present")
    return tokens[:k] + [dataclasses.replace(verb, word=word, number=number, tense="present")] + tokens[k + 1:]


def tense_swap(tokens, rng):
    k = _root_index(tokens)
    verb = tokens[k]
    tense = "present" if verb.tense == "past" else "past"
    word = verb_form(verb.forms, verb.number, tense)
    return tokens[:k] + [dataclasses.replace(verb, word=word, tense=tense)] + tokens[k + 1:]


def article_drop(tokens, rng):
    articles = [k for k, token in enumerate(tokens) if token.tag == "det"]
    if not articles:
        return None
    k = _pick(rng, articles)
    return tokens[:k] + tokens[k + 1:]


def article_insert(tokens, rng):
    """Put an article in front of a noun phrase that has none, or in front of a pronoun."""
    with_article = {token.head for token in tokens if token.tag == "det"}
    candidates = [
        k for k, token in enumerate(tokens) if token.tag in ("noun", "pron") and token.key not in with_article
    ]
    if not candidates:
        return None
    k = _pick(rng, candidates)
    noun = tokens[k]
    start = min(j for j, token in enumerate(tokens) if j == k or token.head == noun.key and j < k)
    key = max(token.key for token in tokens) + 1
    article = Token(key, _pick(rng, ("a", "the")), noun.key, "det", "det")
    return tokens[:start] + [article] + tokens[start:]


def word_swap(tokens, rng):
    """Swap two adjacent words, never moving the final punctuation."""
    last = len(tokens) - 1 if tokens[-1].tag == "punct" else len(tokens)
    if last < 2:
        return None
    k = int(rng.integers(last - 1))
    return tokens[:k] + [tokens[k + 1], tokens[k]] + tokens[k + 2:]


def random_deletion(tokens, rng):
    leaves = [
        k for k, token in enumerate(tokens)
        if token.head != 0 and token.tag != "punct" and not _has_children(tokens, token.key)
    ]
    if not leaves:
        return None
    k = _pick(rng, leaves)
    return tokens[:k] + tokens[k + 1:]


CORRUPTIONS = {
    "agreement": agreement_flip,
    "tense": tense_swap,
    "article_drop": article_drop,
    "article_insert": article_insert,
    "word_swap": word_swap,
    "deletion": random_deletion,
}


def corruption_probabilities(profile="default", overrides=None):
    """Per-rule probabilities of a named profile, with explicit overrides applied."""
    if profile not in PROFILES:
        raise ConfigurationError(f"unknown corruption profile {profile!r} (choose from {', '.join(PROFILES)})")
    probabilities = dict(PROFILES[profile])
    for rule, value in (overrides or {}).items():
        if rule not in probabilities:
            raise ConfigurationError(f"unknown corruption rule: {rule}")
        if not 0.0 <= value <= 1.0:
            raise ConfigurationError(f"probability for {rule} must lie in [0, 1], got {value}")
        probabilities[rule] = value
    return probabilities


def corrupt(tokens, probabilities, rng):
    """Apply each rule in a fixed order with its probability; one uniform draw per rule."""
    for rule in RULES:
        draw = rng.random()
        if draw < probabilities[rule]:
            corrupted = CORRUPTIONS[rule](tokens, rng)
            if corrupted:
                tokens = corrupted
    return tokens


def synth_corpus(count, rng, profile="default", overrides=None):
    """`count` sentence pairs: corrupted source, grammatical target, gold trees on both sides."""
    if count < 1:
        raise DataError(f"count must be >= 1, got {count}")
    probabilities = corruption_probabilities(profile, overrides)
    pairs = []
    for _ in range(count):
        target = sample_sentence(rng)
        source = corrupt(target, probabilities, rng)
        pairs.append(SentencePair(to_tree(source), to_tree(target)))
    changed = sum(pair.changed for pair in pairs)
    logger.info(f"Synthesised {count} pairs ({changed} with errors) using profile {profile!r}")
    return pairs
