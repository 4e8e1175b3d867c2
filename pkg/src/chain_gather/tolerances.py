"""Comparison tolerances used throughout the library.

All geometric comparisons in the protocol (equal lengths, equal angles,
thresholds like ``<= 7/8 pi``) go through a single set of epsilons so that
every module agrees on what "equal" means.  Threshold comparisons are
evaluated with the epsilon widening the inclusive side: ``value <= x`` is
implemented as ``value <= x + eps`` and ``value < x`` as ``value < x - eps``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

EPS_LEN_DEFAULT = 1e-9
EPS_ANG_DEFAULT = 1e-9
EPS_AREA_DEFAULT = 1e-12
EPS_GATHER_DEFAULT = 1e-6

ENV_EPS = "CHAIN_GATHER_EPS"


@dataclass(frozen=True)
class Tolerances:
    """Absolute tolerances, in connectivity-range units / radians."""

    eps_len: float = EPS_LEN_DEFAULT
    eps_ang: float = EPS_ANG_DEFAULT
    eps_area: float = EPS_AREA_DEFAULT
    eps_gather: float = EPS_GATHER_DEFAULT

    @staticmethod
    def from_env(env: dict[str, str] | None = None) -> "Tolerances":
        """Build tolerances, honouring the ``CHAIN_GATHER_EPS`` override.

        The variable accepts either a single float (applied to both the
        length and angle epsilons) or ``"<eps_len>,<eps_ang>"``.
        """
        env = os.environ if env is None else env
        raw = env.get(ENV_EPS)
        if not raw:
            return Tolerances()
        parts = [p.strip() for p in raw.split(",")]
        try:
            values = [float(p) for p in parts if p]
        except ValueError as exc:
            raise ValueError(f"cannot parse {ENV_EPS}={raw!r}") from exc
        if len(values) == 1:
            return Tolerances(eps_len=values[0], eps_ang=values[0])
        if len(values) == 2:
            return Tolerances(eps_len=values[0], eps_ang=values[1])
        raise ValueError(f"{ENV_EPS} takes one or two comma-separated floats")


DEFAULT_TOLERANCES = Tolerances()
