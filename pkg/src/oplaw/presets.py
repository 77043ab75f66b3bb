"""Named fixture theories and operads shipped with the package."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .dsl import builtin_operad, parse_theory
from .errors import ValidationError
from .operads import SymmetricOperad
from .theories import TheoryPresentation

THEORY_NAMES = (
    "monoid",
    "commutative-monoid",
    "anti-involution-monoid",
    "sup-lattice",
    "empty",
    "magma",
    "one",
)

OPERAD_NAMES = ("sym", "terminal", "trivial", "free(magma)")


@lru_cache(maxsize=None)
def theory(name: str) -> TheoryPresentation:
    if name not in THEORY_NAMES:
        raise ValidationError(f"unknown fixture theory {name!r}; have {THEORY_NAMES}")
    text = resources.files("oplaw.fixtures").joinpath(f"{name}.thy").read_text()
    return parse_theory(text)


@lru_cache(maxsize=None)
def operad(name: str, max_arity: int) -> SymmetricOperad:
    return builtin_operad(name, max_arity, theory_loader=theory)
