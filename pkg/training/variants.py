"""Named model variants used by the ablation runner."""

from core.exceptions import ConfigurationError

NO_TREE_CORRECTION = {"lambda_relation": 0.0, "lambda_distance": 0.0, "lambda_ancestor": 0.0}
PLAIN_ENCODER = {"use_syntax_encoder": False, "beta": 1.0}

VARIANTS = {
    "copy-transformer": {**PLAIN_ENCODER, **NO_TREE_CORRECTION},
    "copy-transformer+dtc": dict(PLAIN_ENCODER),
    "copy-transformer+syntax": {"use_syntax_encoder": True, **NO_TREE_CORRECTION},
    "sg-gec": {},
    "sg-gec-relation": {"lambda_relation": 0.0},
    "sg-gec-distance": {"lambda_distance": 0.0},
    "sg-gec-ancestor": {"lambda_ancestor": 0.0},
}


def variant_config(base, name):
    """`base` with the overrides of variant `name`; the full model keeps the base settings."""
    try:
        overrides = VARIANTS[name]
    except KeyError:
        raise ConfigurationError(f"unknown variant {name!r} (choose from {', '.join(VARIANTS)})") from None
    if overrides.get("use_syntax_encoder") and not base.use_syntax_encoder:
        overrides = {**overrides, "beta": 0.5}
    return base.replace(**overrides)


def parse_variants(text):
    names = [name.strip() for name in text.split(",") if name.strip()]
    for name in names:
        if name not in VARIANTS:
            raise ConfigurationError(f"unknown variant {name!r} (choose from {', '.join(VARIANTS)})")
    return names or list(VARIANTS)
