"""
Token-level edits between a source sentence and a corrected sentence.

Edits come from a unit-cost Levenshtein alignment. Among equally cheap
alignments a match is taken first, then a substitution, then a deletion,
then an insertion, scanning left to right. Runs of adjacent non-match
operations become one edit spanning the source range they cover.
"""

from dataclasses import dataclass

import numpy as np

from core.exceptions import DataError

MATCH, SUBSTITUTE, DELETE, INSERT = "match", "substitute", "delete", "insert"


@dataclass(frozen=True, order=True)
class Edit:
    """Replace source words [start, end) with `replacement`."""

    start: int
    end: int
    replacement: tuple = ()

    def __str__(self):
        return f"{self.start}:{self.end}|{' '.join(self.replacement)}"


def suffix_distances(source, target):
    """d[i, j] = edit distance between source[i:] and target[j:]."""
    n, m = len(source), len(target)
    d = np.zeros((n + 1, m + 1), dtype=np.int64)
    d[n, :] = np.arange(m, -1, -1)
    d[:, m] = np.arange(n, -1, -1)
    for i in range(n - 1, -1, -1):
        for j in range(m - 1, -1, -1):
            d[i, j] = min(
                d[i + 1, j + 1] + (source[i] != target[j]),
                d[i + 1, j] + 1,
                d[i, j + 1] + 1,
            )
    return d


def alignment(source, target):
    """Operations (kind, source index, target index) of a minimal alignment."""
    d = suffix_distances(source, target)
    n, m = len(source), len(target)
    i = j = 0
    operations = []
    while i < n or j < m:
        here = d[i, j]
        if i < n and j < m and source[i] == target[j] and d[i + 1, j + 1] == here:
            operations.append((MATCH, i, j))
            i, j = i + 1, j + 1
        elif i < n and j < m and d[i + 1, j + 1] + 1 == here:
            operations.append((SUBSTITUTE, i, j))
            i, j = i + 1, j + 1
        elif i < n and d[i + 1, j] + 1 == here:
            operations.append((DELETE, i, j))
            i += 1
        else:
            operations.append((INSERT, i, j))
            j += 1
    return operations


def extract_edits(source, target):
    """Sorted, non-overlapping edits turning `source` into `target`."""
    source, target = list(source), list(target)
    edits = []
    run = None
    for kind, i, j in alignment(source, target) + [(MATCH, len(source), len(target))]:
        if kind == MATCH:
            if run is not None:
                start_i, start_j = run
                edits.append(Edit(start_i, i, tuple(target[start_j:j])))
                run = None
            continue
        if run is None:
            run = (i, j)
    return tuple(edits)


def apply_edits(source, edits):
    """The sentence obtained by applying `edits` to `source`."""
    words, cursor = [], 0
    for edit in sorted(edits):
        if edit.start < cursor or edit.end > len(source) or edit.start > edit.end:
            raise DataError(f"edit {edit} overlaps another edit or lies outside the source")
        words.extend(source[cursor : edit.start])
        words.extend(edit.replacement)
        cursor = edit.end
    words.extend(source[cursor:])
    return words
