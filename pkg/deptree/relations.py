from core.exceptions import TreeError

# Stanford basic dependency labels; corpora may add more via RelationVocab.from_trees.
DEFAULT_RELATIONS = (
    "root", "dep", "aux", "auxpass", "cop", "nsubj", "nsubjpass", "csubj", "dobj", "iobj", "pobj",
    "prep", "det", "amod", "advmod", "neg", "poss", "possessive", "nn", "num", "prt", "rcmod",
    "xcomp", "ccomp", "advcl", "mark", "cc", "conj", "appos", "punct", "expl", "predet", "tmod",
    "npadvmod", "acomp", "quantmod", "parataxis", "infmod", "partmod", "pcomp", "mwe", "preconj",
)


class RelationVocab:
    """Ordered relation labels; id L is NON_ADJACENT in targets and the self-loop label in NR."""

    def __init__(self, labels=DEFAULT_RELATIONS):
        labels = tuple(labels)
        if len(set(labels)) != len(labels):
            raise TreeError("relation labels must be unique")
        if not labels:
            raise TreeError("relation vocabulary is empty")
        self.labels = labels
        self._index = {label: i for i, label in enumerate(labels)}

    @classmethod
    def from_trees(cls, trees, base=DEFAULT_RELATIONS):
        seen = set(base)
        extra = sorted({label for tree in trees for label in tree.labels if label not in seen})
        return cls(tuple(base) + tuple(extra))

    @classmethod
    def from_string(cls, text):
        return cls(text.split(","))

    def to_string(self):
        return ",".join(self.labels)

    def __len__(self):
        return len(self.labels)

    def __eq__(self, other):
        return isinstance(other, RelationVocab) and self.labels == other.labels

    def __hash__(self):
        return hash(self.labels)

    @property
    def non_adjacent(self):
        return len(self.labels)

    @property
    def self_loop(self):
        return len(self.labels)

    def id(self, label):
        try:
            return self._index[label]
        except KeyError:
            raise TreeError(f"unknown relation label: {label!r}") from None

    def label(self, relation_id):
        if relation_id == self.non_adjacent:
            return "-"
        return self.labels[relation_id]
