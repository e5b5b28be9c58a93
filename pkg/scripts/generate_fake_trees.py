"""
Factories for random dependency trees and sentence pairs.

Usage:
    python scripts/generate_fake_trees.py --count 20 --size 12 > random.conllu
"""

import argparse
import os

import factory
from faker import Faker

from deptree.conllu import serialize_conllu
from deptree.relations import DEFAULT_RELATIONS
from deptree.tree import DepTree

fake = Faker()

NON_ROOT_LABELS = [label for label in DEFAULT_RELATIONS if label != "root"]


def seed(value):
    """Reseed the shared Faker instance so factories are reproducible."""
    fake.seed_instance(value)


def random_heads(size):
    """Heads of a uniformly shuffled random recursive tree (CoNLL 1-based, 0 = root)."""
    order = fake.random.sample(range(size), size)
    heads = [0] * size
    for k in range(1, size):
        parent = order[fake.random.randint(0, k - 1)]
        heads[order[k]] = parent + 1
    return tuple(heads)


def random_words(size, alphabet=None):
    """`size` words; a small `alphabet` forces repeated tokens."""
    if alphabet:
        return [fake.random_element(alphabet) for _ in range(size)]
    return fake.words(nb=size)


class DepTreeFactory(factory.Factory):
    """
    Factory for random DepTree instances.

    Attributes:
        words (tuple): Faker words, one per node.
        heads (tuple): a random recursive tree over `size` nodes.
        labels (tuple): "root" for the root word, random relation labels elsewhere.
    """

    class Meta:
        model = DepTree

    class Params:
        size = 8

    words = factory.LazyAttribute(lambda o: tuple(fake.words(nb=o.size)))
    heads = factory.LazyAttribute(lambda o: random_heads(o.size))
    labels = factory.LazyAttribute(
        lambda o: tuple("root" if head == 0 else fake.random_element(NON_ROOT_LABELS) for head in o.heads)
    )


def random_pair(max_len=12, alphabet=("a", "b", "c", "d", "e")):
    """Two word lists of random length over a small shared alphabet."""
    left = random_words(fake.random_int(min=0, max=max_len), alphabet)
    right = random_words(fake.random_int(min=0, max=max_len), alphabet)
    return left, right


if __name__ == "__main__":
    import django

    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "GEC_System.settings")
    django.setup()

    parser = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    parser.add_argument("--count", type=int, default=10)
    parser.add_argument("--size", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    seed(args.seed)
    trees = [DepTreeFactory(size=fake.random_int(min=1, max=args.size)) for _ in range(args.count)]
    print(serialize_conllu(trees), end="")
