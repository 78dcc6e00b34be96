"""Labelled sequent prover for propositional abstract separation logics."""

from ._core import (
    check_frame,
    check_model,
    gen,
    normalize,
    prove,
    synth,
    systems,
    table2,
)

__all__ = [
    "check_frame",
    "check_model",
    "gen",
    "normalize",
    "prove",
    "synth",
    "systems",
    "table2",
]
