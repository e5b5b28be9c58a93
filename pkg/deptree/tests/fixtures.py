"""Shared sentences for tests across apps."""

CASE_STUDY_SOURCE = "Do one who suffered from this disease keep it a secret ?"
CASE_STUDY_TARGET = "Does one who suffers from this disease keep it a secret ?"

# (head, label) per word; both sides share the structure.
CASE_STUDY_ARCS = (
    (8, "aux"),
    (8, "nsubj"),
    (4, "nsubj"),
    (2, "rcmod"),
    (4, "prep"),
    (7, "det"),
    (5, "pobj"),
    (0, "root"),
    (8, "dobj"),
    (11, "det"),
    (8, "xcomp"),
    (8, "punct"),
)


def case_study_conllu(sentence=CASE_STUDY_SOURCE):
    lines = [
        f"{i}\t{word}\t_\t_\t_\t_\t{head}\t{label}\t_\t_"
        for i, (word, (head, label)) in enumerate(zip(sentence.split(), CASE_STUDY_ARCS), start=1)
    ]
    return "# text = " + sentence + "\n" + "\n".join(lines) + "\n\n"


CHAIN_OF_THREE = "1\ta\t_\t_\t_\t_\t0\troot\t_\t_\n2\tb\t_\t_\t_\t_\t1\tdobj\t_\t_\n3\tc\t_\t_\t_\t_\t2\tamod\t_\t_\n\n"
