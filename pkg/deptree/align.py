import numpy as np


def lcs_table(hyp, tgt):
    """table[i, j] = LCS length of hyp[i:] and tgt[j:]."""
    table = np.zeros((len(hyp) + 1, len(tgt) + 1), dtype=np.int64)
    for i in range(len(hyp) - 1, -1, -1):
        for j in range(len(tgt) - 1, -1, -1):
            if hyp[i] == tgt[j]:
                table[i, j] = table[i + 1, j + 1] + 1
            else:
                table[i, j] = max(table[i + 1, j], table[i, j + 1])
    return table


def overlap_align(hyp, tgt):
    """Pairs (hyp index, tgt index) of a longest common subsequence of exact word matches.

    Among optimal alignments the one using the earliest hypothesis positions is returned.
    """
    table = lcs_table(hyp, tgt)
    pairs = []
    i = j = 0
    while i < len(hyp) and j < len(tgt):
        if hyp[i] == tgt[j]:
            pairs.append((i, j))
            i += 1
            j += 1
        elif table[i, j + 1] == table[i, j]:
            j += 1
        else:
            i += 1
    return pairs
