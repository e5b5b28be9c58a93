"""
CoNLL-U reading and writing.

Only ID, FORM, HEAD and DEPREL are consumed. Multiword ranges ("3-4") and
empty nodes ("5.1") are skipped. Structural problems are reported with the
line number of the offending token.
"""

import logging
from pathlib import Path

from core.exceptions import ConllParseError

from .tree import DepTree, find_tree_problem

logger = logging.getLogger(__name__)

COLUMNS = 10


def _split(line):
    fields = line.split("\t")
    if len(fields) == 1:
        fields = line.split()
    return fields


def _finish(block, first_line):
    words = [form for form, _, _, _ in block]
    heads = [head for _, head, _, _ in block]
    labels = [label for _, _, label, _ in block]
    problem = find_tree_problem(words, heads, labels)
    if problem is not None:
        node, message = problem
        line = block[node][3] if node is not None else first_line
        raise ConllParseError(message, line)
    return DepTree(words, heads, labels)


def parse_conllu(text):
    """Parse every sentence block of a CoNLL-U document into a DepTree."""
    trees = []
    block, first_line = [], None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            if block:
                trees.append(_finish(block, first_line))
                block, first_line = [], None
            continue
        if line.startswith("#"):
            continue
        fields = _split(line)
        if len(fields) != COLUMNS:
            raise ConllParseError(f"expected {COLUMNS} columns, found {len(fields)}", number)
        token_id = fields[0]
        if "-" in token_id or "." in token_id:
            continue
        try:
            position = int(token_id)
            head = int(fields[6])
        except ValueError:
            raise ConllParseError(f"non-integer ID or HEAD: {token_id!r}, {fields[6]!r}", number) from None
        if position != len(block) + 1:
            raise ConllParseError(f"expected token ID {len(block) + 1}, found {position}", number)
        if first_line is None:
            first_line = number
        block.append((fields[1], head, fields[7], number))
    if block:
        trees.append(_finish(block, first_line))
    logger.debug(f"Parsed {len(trees)} dependency trees")
    return trees


def serialize_conllu(trees):
    lines = []
    for tree in trees:
        for position, (word, head, label) in enumerate(zip(tree.words, tree.heads, tree.labels), start=1):
            lines.append(f"{position}\t{word}\t_\t_\t_\t_\t{head}\t{label}\t_\t_")
        lines.append("")
    return "\n".join(lines) + ("\n" if lines else "")


def read_conllu(path):
    return parse_conllu(Path(path).read_text(encoding="utf-8"))


def write_conllu(path, trees):
    Path(path).write_text(serialize_conllu(trees), encoding="utf-8")
