"""Noncontextual hidden-variable model of the four propositions.

Each hidden state fixes v(A), v(B), v(a), v(b) in {+1, -1}; products of
one-particle observables take the product of their values. Nothing here
uses the Hilbert-space machinery.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Sequence


class Pattern(str, enum.Enum):
    ALL_FALSE = "AllFalse"
    EXACTLY_ONE_TRUE = "ExactlyOneTrue"
    TWO_TRUE = "TwoTrue"
    OTHER = "Other"


NCHV_ALLOWED = frozenset({Pattern.ALL_FALSE, Pattern.TWO_TRUE})


def classify(truth: Sequence[bool]) -> Pattern:
    """Pattern of a four-proposition truth assignment, by number of true entries."""
    if len(truth) != 4:
        raise ValueError(f"expected four truth values, got {len(truth)}")
    n = sum(bool(t) for t in truth)
    return {0: Pattern.ALL_FALSE, 1: Pattern.EXACTLY_ONE_TRUE, 2: Pattern.TWO_TRUE}.get(n, Pattern.OTHER)


@dataclass(frozen=True)
class HiddenState:
    vA: int
    vB: int
    va: int
    vb: int

    def __post_init__(self):
        for name in ("vA", "vB", "va", "vb"):
            value = getattr(self, name)
            if type(value) is not int or value not in (1, -1):
                raise ValueError(f"{name} must be +1 or -1, got {value!r}")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.vA, self.vB, self.va, self.vb)

    def flipped(self) -> "HiddenState":
        return HiddenState(-self.vA, -self.vB, -self.va, -self.vb)


@dataclass(frozen=True)
class PropositionOutcome:
    truth: tuple[bool, bool, bool, bool]

    @property
    def pattern(self) -> Pattern:
        return classify(self.truth)

    def true_set(self) -> frozenset[int]:
        """1-based indices of the true propositions."""
        return frozenset(i + 1 for i, t in enumerate(self.truth) if t)


def evaluate(h: HiddenState) -> PropositionOutcome:
    AB, ab = h.vA * h.vB, h.va * h.vb
    Ab, aB = h.vA * h.vb, h.va * h.vB
    return PropositionOutcome((
        AB == 1 and ab == 1,
        AB == -1 and ab == -1,
        Ab == 1 and aB == 1,
        Ab == -1 and aB == -1,
    ))


def enumerate_all() -> list[tuple[HiddenState, PropositionOutcome]]:
    """All 16 hidden states, lexicographic over (vA, vB, va, vb) with +1 before -1."""
    rows = []
    for values in itertools.product((1, -1), repeat=4):
        h = HiddenState(*values)
        rows.append((h, evaluate(h)))
    return rows


@dataclass(frozen=True)
class NchvReport:
    not_exclusive: bool
    not_exhaustive: bool
    zero_or_two: bool
    exclusive_witness: HiddenState | None
    exhaustive_witness: HiddenState | None

    @property
    def all_hold(self) -> bool:
        return self.not_exclusive and self.not_exhaustive and self.zero_or_two


def verify_nchv_theorems() -> NchvReport:
    rows = enumerate_all()
    two_or_more = [h for h, o in rows if sum(o.truth) >= 2]
    none_true = [h for h, o in rows if not any(o.truth)]
    return NchvReport(
        not_exclusive=bool(two_or_more),
        not_exhaustive=bool(none_true),
        zero_or_two=all(o.pattern in NCHV_ALLOWED for _, o in rows),
        exclusive_witness=two_or_more[0] if two_or_more else None,
        exhaustive_witness=none_true[0] if none_true else None,
    )


TABLE_COLUMNS = ("vA", "vB", "va", "vb", "P1", "P2", "P3", "P4", "pattern")


def table_rows() -> list[tuple]:
    return [
        (*h.as_tuple(), *(int(t) for t in o.truth), o.pattern.value)
        for h, o in enumerate_all()
    ]
