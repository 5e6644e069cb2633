"""Sensor network localization with facial reduction and SDP relaxations."""

from ._edmsnl import (
    Instance,
    InvalidArgument,
    IoError,
    NumericalError,
    clique_face,
    compare_methods,
    generate,
    k_adj,
    k_dagger,
    k_op,
    locate,
    smat,
    solve,
    svec,
)

__all__ = [
    "Instance",
    "InvalidArgument",
    "IoError",
    "NumericalError",
    "clique_face",
    "compare_methods",
    "generate",
    "k_adj",
    "k_dagger",
    "k_op",
    "locate",
    "smat",
    "solve",
    "svec",
]
