"""Ring-sweep kernel with compiled/pure backend selection.

The compiled Cython backend is used when it was built; otherwise the numpy
fallback takes over.  ``CHAIN_GATHER_FORCE_PY=1`` forces the fallback, which
the benchmark and the equivalence tests use to compare the two.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from ._pure import (
    FAMILY_ANGLE,
    FAMILY_NONE,
    FAMILY_ORIENTATION,
    FAMILY_VECTOR_LENGTH,
)
from . import _pure

if os.environ.get("CHAIN_GATHER_FORCE_PY"):
    _backend = _pure
else:
    try:
        from . import _core as _backend  # type: ignore[no-redef]
    except ImportError:
        _backend = _pure

BACKEND_NAME: str = _backend.BACKEND_NAME


@dataclass(frozen=True)
class RingAnalysis:
    """Per-robot sweep of one configuration snapshot (see ``_pure``)."""

    ulen: np.ndarray
    alpha: np.ndarray
    turn: np.ndarray
    chord: np.ndarray
    ang_eq: np.ndarray
    turn_uni: np.ndarray
    len_eq: np.ndarray
    len_alt: np.ndarray
    pat_family: np.ndarray
    pat_variant: np.ndarray

    @property
    def n(self) -> int:
        return self.ulen.shape[0]

    @property
    def isogonal(self) -> np.ndarray:
        """Robots whose window satisfies the local isogonality criterion."""
        return self.ang_eq & self.turn_uni & (self.len_eq | self.len_alt)


def analyze_ring(
    xs: np.ndarray, ys: np.ndarray, eps_len: float, eps_ang: float
) -> RingAnalysis:
    return RingAnalysis(*_backend.ring_analysis(xs, ys, float(eps_len), float(eps_ang)))


def analyze_ring_with(
    backend_name: str,
    xs: np.ndarray,
    ys: np.ndarray,
    eps_len: float,
    eps_ang: float,
) -> RingAnalysis:
    """Run the sweep on an explicit backend (for tests and benchmarks)."""
    if backend_name == "pure":
        backend = _pure
    elif backend_name == "compiled":
        from . import _core as backend  # type: ignore[no-redef]
    else:
        raise ValueError(f"unknown backend {backend_name!r}")
    return RingAnalysis(*backend.ring_analysis(xs, ys, float(eps_len), float(eps_ang)))


def available_backends() -> list[str]:
    names = ["pure"]
    try:
        from . import _core  # noqa: F401

        names.append("compiled")
    except ImportError:
        pass
    return names
