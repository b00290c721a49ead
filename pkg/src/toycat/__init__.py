"""toycat: verification engine for toy categorical quantum mechanics over finite relations.

The package implements the category FRel of finite sets and relations
(cartesian tensor, converse dagger), basis structures and complementarity
checks, the named models on the two- and four-element sets, a compositional
closure engine for the generated subcategory Spek, and mechanical checks of
the teleportation and dense coding protocols.
"""

from .relcore import (
    FinObject,
    Relation,
    ShapeMismatchError,
    UNIT,
    compose,
    dagger,
    identity,
    is_unitary,
    swap,
    tensor,
)

__version__ = "0.1.0"

__all__ = [
    "FinObject",
    "Relation",
    "ShapeMismatchError",
    "UNIT",
    "compose",
    "dagger",
    "identity",
    "is_unitary",
    "swap",
    "tensor",
    "__version__",
]
