"""n-best files: one "sentence-index<TAB>rank<TAB>score<TAB>candidate" line per hypothesis."""

from dataclasses import dataclass
from pathlib import Path

from core.exceptions import DataError


@dataclass(frozen=True)
class NbestEntry:
    sentence: int
    rank: int
    score: float
    text: str


def format_nbest(entries):
    return "".join(f"{e.sentence}\t{e.rank}\t{e.score:.6f}\t{e.text}\n" for e in entries)


def write_nbest(path, entries):
    Path(path).write_text(format_nbest(entries), encoding="utf-8")


def read_nbest(path):
    entries = []
    for number, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise DataError(f"{path}:{number}: expected 4 tab-separated fields, found {len(fields)}")
        try:
            entries.append(NbestEntry(int(fields[0]), int(fields[1]), float(fields[2]), fields[3]))
        except ValueError:
            raise DataError(f"{path}:{number}: malformed n-best entry") from None
    return entries

