"""
Multi-stage training plans.

A plan is written as "name=dataset:selector:epochs:lr;name=...". Each
stage trains on the examples of one dataset kept by its selector, for a
number of epochs at a constant learning rate:

    synthetic=synth:all:4:1e-4;errorful=train:errorful:2:1e-4;finetune=train:all:2:5e-5
"""

from dataclasses import dataclass

from core.exceptions import ConfigurationError, DataError

SELECTORS = {
    "all": lambda example: True,
    "errorful": lambda example: example.changed,
}


@dataclass(frozen=True)
class Stage:
    name: str
    dataset: str
    selector: str
    epochs: int
    learning_rate: float

    def __post_init__(self):
        if self.selector not in SELECTORS:
            raise ConfigurationError(f"stage {self.name}: unknown selector {self.selector!r}")
        if self.epochs < 1:
            raise ConfigurationError(f"stage {self.name}: epochs must be >= 1")
        if self.learning_rate <= 0:
            raise ConfigurationError(f"stage {self.name}: learning rate must be positive")

    def __str__(self):
        return f"{self.name}={self.dataset}:{self.selector}:{self.epochs}:{self.learning_rate!r}"


@dataclass(frozen=True)
class StagePlan:
    stages: tuple

    def __post_init__(self):
        if not self.stages:
            raise ConfigurationError("a stage plan needs at least one stage")

    @classmethod
    def parse(cls, text):
        stages = []
        for chunk in text.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            name, sep, body = chunk.partition("=")
            parts = body.split(":")
            if not sep or len(parts) != 4:
                raise ConfigurationError(f"malformed stage {chunk!r} (expected name=dataset:selector:epochs:lr)")
            try:
                epochs, learning_rate = int(parts[2]), float(parts[3])
            except ValueError:
                raise ConfigurationError(f"stage {name}: epochs and learning rate must be numbers") from None
            stages.append(Stage(name.strip(), parts[0], parts[1], epochs, learning_rate))
        return cls(tuple(stages))

    @classmethod
    def single(cls, dataset, epochs, learning_rate):
        return cls((Stage("main", dataset, "all", epochs, learning_rate),))

    def datasets(self):
        return sorted({stage.dataset for stage in self.stages})

    def __str__(self):
        return ";".join(str(stage) for stage in self.stages)


def select_examples(examples, stage):
    """Examples of a stage's dataset kept by its selector; an empty result is an error."""
    keep = SELECTORS[stage.selector]
    selected = [example for example in examples if keep(example)]
    if not selected:
        raise DataError(f"stage {stage.name}: selector {stage.selector!r} left no examples in {stage.dataset!r}")
    return selected
