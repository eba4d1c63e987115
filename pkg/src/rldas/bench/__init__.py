"""Augmented CEC2021-style benchmark: instances, evaluation, serialization."""
from .io import (
    InstanceSetFormatError,
    InstanceSetVersionError,
    load_instance_set,
    save_instance_set,
)
from .problems import (
    LOWER,
    MIXED,
    RECIPES,
    UPPER,
    Family,
    InstanceSet,
    InstanceSpec,
    Recipe,
    evaluate,
    family_of,
    generate_instance_set,
    gram_schmidt_rotation,
    make_instance,
    parse_class,
    sample_shift,
)

__all__ = [
    "LOWER",
    "MIXED",
    "RECIPES",
    "UPPER",
    "Family",
    "InstanceSet",
    "InstanceSetFormatError",
    "InstanceSetVersionError",
    "InstanceSpec",
    "Recipe",
    "evaluate",
    "family_of",
    "generate_instance_set",
    "gram_schmidt_rotation",
    "load_instance_set",
    "make_instance",
    "parse_class",
    "sample_shift",
    "save_instance_set",
]
