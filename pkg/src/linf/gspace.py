"""Z2-graded vector spaces and exact scalars."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

Scalar = Fraction
ScalarLike = Union[int, str, Fraction]


class Parity(enum.IntEnum):
    EVEN = 0
    ODD = 1

    def __add__(self, other):  # type: ignore[override]
        if isinstance(other, Parity):
            return Parity((int(self) + int(other)) % 2)
        return NotImplemented

    def __str__(self) -> str:
        return self.name.lower()


EVEN = Parity.EVEN
ODD = Parity.ODD


def scalar(x: ScalarLike) -> Fraction:
    """Coerce to an exact rational; floats are refused."""
    if isinstance(x, float):
        raise TypeError("floating point scalars are not allowed")
    return Fraction(x)


class SpaceError(ValueError):
    pass


@dataclass(frozen=True)
class GradedSpace:
    """An m|n dimensional space.

    Basis vectors are indexed globally: the even ones in declaration order
    first, then the odd ones.
    """

    even_basis: tuple[str, ...]
    odd_basis: tuple[str, ...]

    def __post_init__(self) -> None:
        names = self.even_basis + self.odd_basis
        if not names:
            raise SpaceError("a graded space needs at least one basis vector")
        seen = set()
        for name in names:
            if name in seen:
                raise SpaceError(f"duplicate basis name {name!r}")
            seen.add(name)

    @property
    def names(self) -> tuple[str, ...]:
        return self.even_basis + self.odd_basis

    @property
    def dim(self) -> int:
        return len(self.even_basis) + len(self.odd_basis)

    @property
    def dims(self) -> tuple[int, int]:
        return len(self.even_basis), len(self.odd_basis)

    @property
    def parities(self) -> tuple[Parity, ...]:
        return (EVEN,) * len(self.even_basis) + (ODD,) * len(self.odd_basis)

    def parity(self, i: int) -> Parity:
        return EVEN if i < len(self.even_basis) else ODD

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise SpaceError(f"unknown basis vector {name!r}") from None

    @property
    def max_arity(self) -> int | None:
        """Top nonzero degree of S(W), or None when S(W) is infinite."""
        return None if self.even_basis else len(self.odd_basis)

    def __str__(self) -> str:
        m, n = self.dims
        return f"{m}|{n}"


def build_space(even_names: Sequence[str], odd_names: Sequence[str]) -> GradedSpace:
    return GradedSpace(tuple(even_names), tuple(odd_names))
