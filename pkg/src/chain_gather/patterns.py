"""Local symmetry analysis over one robot's view.

Three pattern families detect a point of asymmetry and mint Init-States;
a separate test routes fully symmetric windows to the circle-based rules.
Families are gated by symmetry level: angle patterns are checked only while
visible angle sizes differ, orientation patterns only once all sizes agree,
vector length patterns only under full angle symmetry.  All comparisons are
epsilon-toleranced with one discipline (strict means beyond epsilon).

This module is the scalar counterpart of the vectorized sweep in
:mod:`chain_gather.kernels`; equivalence between the two is enforced by
tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

from .chain import LocalView
from .tolerances import Tolerances, DEFAULT_TOLERANCES


class SymmetryLevel(IntEnum):
    ANGLES_DIFFER = 0
    ANGLES_EQUAL_ORIENTATIONS_DIFFER = 1
    FULL_ANGLE_SYMMETRY = 2


class PatternFamily(IntEnum):
    NONE = 0
    ANGLE = 1
    ORIENTATION = 2
    VECTOR_LENGTH = 3


class IsogonalKind(IntEnum):
    NOT_ISOGONAL = 0
    EQUAL_LENGTHS = 1
    ALTERNATING_LENGTHS = 2


@dataclass(frozen=True)
class PatternVerdict:
    family: PatternFamily
    variant: int = 0

    def __bool__(self) -> bool:
        return self.family != PatternFamily.NONE


NO_PATTERN = PatternVerdict(PatternFamily.NONE, 0)

_ANGLE_OFFSETS = range(-3, 4)
_VECTOR_OFFSETS = range(-3, 5)


def symmetry_level(view: LocalView, tol: Tolerances = DEFAULT_TOLERANCES) -> SymmetryLevel:
    sizes = [view.alpha(k) for k in _ANGLE_OFFSETS]
    if max(sizes) - min(sizes) > tol.eps_ang:
        return SymmetryLevel.ANGLES_DIFFER
    turns = [view.turn(k) for k in _ANGLE_OFFSETS]
    if any(t != turns[0] for t in turns):
        return SymmetryLevel.ANGLES_EQUAL_ORIENTATIONS_DIFFER
    return SymmetryLevel.FULL_ANGLE_SYMMETRY


def angle_pattern(view: LocalView, tol: Tolerances = DEFAULT_TOLERANCES) -> PatternVerdict:
    """Local-minimum angle: variant 1 strict on the left, 2 on the right."""
    e = tol.eps_ang
    am1, a0, ap1 = view.alpha(-1), view.alpha(0), view.alpha(1)
    if am1 > a0 + e and a0 <= ap1 + e:
        return PatternVerdict(PatternFamily.ANGLE, 1)
    if am1 >= a0 - e and a0 < ap1 - e:
        return PatternVerdict(PatternFamily.ANGLE, 2)
    return NO_PATTERN


def orientation_pattern(view: LocalView, tol: Tolerances = DEFAULT_TOLERANCES) -> PatternVerdict:
    """Orientation asymmetries; signs compare only relatively, so the
    verdict is invariant under the view's (unknown) chirality.  A zero turn
    (straight angle) matches neither orientation."""
    t = {k: view.turn(k) for k in _ANGLE_OFFSETS}

    def same(k1: int, k2: int) -> bool:
        return t[k1] != 0 and t[k1] == t[k2]

    def opp(k1: int, k2: int) -> bool:
        return t[k1] != 0 and t[k2] != 0 and t[k1] != t[k2]

    if (same(-1, 1) and same(1, 2) and opp(1, 0)) or (
        same(-2, -1) and same(-1, 1) and opp(1, 0)
    ):
        return PatternVerdict(PatternFamily.ORIENTATION, 1)
    if (same(-1, 0) and opp(0, 1) and same(1, 2) and same(2, 3)) or (
        same(1, 0) and opp(0, -1) and same(-1, -2) and same(-2, -3)
    ):
        return PatternVerdict(PatternFamily.ORIENTATION, 2)
    return NO_PATTERN


def vector_length_pattern(view: LocalView, tol: Tolerances = DEFAULT_TOLERANCES) -> PatternVerdict:
    """Locally minimal vector structure.

    "Locally minimal" scans every vector computable from the +-4 window
    (u_{i-3}..u_{i+4}): no visible vector may be strictly shorter.
    """
    e = tol.eps_len
    l = {k: view.ulen(k) for k in _VECTOR_OFFSETS}
    lmin = min(l.values())

    def locally_minimal(k: int) -> bool:
        return l[k] <= lmin + e

    if (
        locally_minimal(0)
        and l[-1] > l[0] + e
        and l[0] < l[1] - e
        and l[0] < l[2] - e
    ) or (
        locally_minimal(1)
        and l[0] > l[1] + e
        and l[1] < l[2] - e
        and l[1] < l[3] - e
    ):
        return PatternVerdict(PatternFamily.VECTOR_LENGTH, 1)
    if (abs(l[-1] - l[0]) <= e and l[0] < l[1] - e) or (
        l[0] > l[1] + e and abs(l[1] - l[2]) <= e
    ):
        return PatternVerdict(PatternFamily.VECTOR_LENGTH, 2)
    return NO_PATTERN


def locally_isogonal(view: LocalView, tol: Tolerances = DEFAULT_TOLERANCES) -> IsogonalKind:
    """Window-level isogonality: equal angles (size and orientation) plus
    either one common vector length or a strict two-length alternation."""
    if symmetry_level(view, tol) != SymmetryLevel.FULL_ANGLE_SYMMETRY:
        return IsogonalKind.NOT_ISOGONAL
    e = tol.eps_len
    lens = [view.ulen(k) for k in _VECTOR_OFFSETS]
    if max(lens) - min(lens) <= e:
        return IsogonalKind.EQUAL_LENGTHS
    if all(abs(lens[k] - lens[k + 2]) <= e for k in range(len(lens) - 2)) and (
        abs(view.ulen(0) - view.ulen(1)) > e
    ):
        return IsogonalKind.ALTERNATING_LENGTHS
    return IsogonalKind.NOT_ISOGONAL


def detect_init(view: LocalView, tol: Tolerances = DEFAULT_TOLERANCES) -> PatternVerdict | None:
    """Pattern verdict for minting an Init-State, or None.

    Returns None when any robot in the +-3 neighbourhood already shows an
    Init-State, and otherwise evaluates exactly the family selected by the
    window's symmetry level.
    """
    if view.init_in_neighborhood():
        return None
    level = symmetry_level(view, tol)
    if level == SymmetryLevel.ANGLES_DIFFER:
        verdict = angle_pattern(view, tol)
    elif level == SymmetryLevel.ANGLES_EQUAL_ORIENTATIONS_DIFFER:
        verdict = orientation_pattern(view, tol)
    else:
        verdict = vector_length_pattern(view, tol)
    return verdict if verdict else None
