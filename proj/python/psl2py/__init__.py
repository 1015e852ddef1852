"""Representations of surface groups into PSL(2,R): classes, square roots and connecting paths."""

from ._core import *  # noqa: F401,F403
from ._core import Fault, Psl2Error


def fault_of(exc: Psl2Error) -> Fault:
    return exc.args[1]
