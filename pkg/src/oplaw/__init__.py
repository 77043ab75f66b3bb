"""Equational theories, symmetric operads, Lawvere theories and analytic
monads on finite sets, with exhaustive law checking at small arity."""

__version__ = "0.1.0"
