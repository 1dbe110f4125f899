"""Digit-restricted square carpets and their finite-depth rasterizations.

A carpet is given by a subdivision base ``b`` and a mask of kept sub-cells
``(row, col)``.  At depth ``k`` the attractor is approximated by the
``|mask|**k`` grid cells of side ``b**-k`` whose base-``b`` digit pairs all
lie in the mask.  Cell geometry is kept in integer grid units so every
coordinate is an exact rational with denominator ``b**k``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .exceptions import (
    BudgetExceededError,
    EmptyMaskError,
    InvalidBaseError,
    MaskRangeError,
    SpecError,
)

DEFAULT_CELL_BUDGET = 10**8

Digit = tuple[int, int]


@dataclass(frozen=True)
class FractalSpec:
    base: int
    mask: tuple[Digit, ...]
    name: str = ""

    @property
    def n_maps(self) -> int:
        return len(self.mask)

    def mask_table(self) -> np.ndarray:
        """Boolean ``(b, b)`` table indexed ``[row, col]``."""
        table = np.zeros((self.base, self.base), dtype=bool)
        for row, col in self.mask:
            table[row, col] = True
        return table

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "base": self.base,
            "mask": [[row, col] for row, col in self.mask],
        }


def validate_spec(raw) -> FractalSpec:
    """Build a :class:`FractalSpec` from a mapping or an existing spec.

    Accepts ``{"base": int, "mask": [[row, col], ...], "name": str}``.
    Duplicate mask entries are dropped and the mask is sorted.
    """
    if isinstance(raw, FractalSpec):
        raw = raw.to_dict()
    try:
        base = raw["base"]
        mask = raw["mask"]
    except (KeyError, TypeError) as exc:
        raise SpecError(f"spec needs 'base' and 'mask': {exc}") from None
    name = str(raw.get("name", ""))
    if isinstance(base, bool) or not isinstance(base, (int, np.integer)):
        raise InvalidBaseError(f"base must be an integer, got {base!r}")
    base = int(base)
    if base < 2:
        raise InvalidBaseError(f"base must be >= 2, got {base}")
    cells = set()
    for entry in mask:
        try:
            row, col = entry
            row, col = int(row), int(col)
        except (TypeError, ValueError):
            raise SpecError(f"mask entry {entry!r} is not a (row, col) pair") from None
        if not (0 <= row < base and 0 <= col < base):
            raise MaskRangeError(f"mask entry {(row, col)} outside 0..{base - 1}")
        cells.add((row, col))
    if not cells:
        raise EmptyMaskError("mask must keep at least one cell")
    return FractalSpec(base=base, mask=tuple(sorted(cells)), name=name)


def _full(b):
    return [(r, c) for r in range(b) for c in range(b)]


PRESETS: dict[str, FractalSpec] = {
    "sierpinski-carpet": validate_spec(
        {"name": "sierpinski-carpet", "base": 3,
         "mask": [rc for rc in _full(3) if rc != (1, 1)]}
    ),
    "vicsek": validate_spec(
        {"name": "vicsek", "base": 3,
         "mask": [(0, 1), (1, 0), (1, 1), (1, 2), (2, 1)]}
    ),
    "cantor-dust": validate_spec(
        {"name": "cantor-dust", "base": 3,
         "mask": [(0, 0), (0, 2), (2, 0), (2, 2)]}
    ),
    "full-square": validate_spec(
        {"name": "full-square", "base": 3, "mask": _full(3)}
    ),
}


def load_spec(source: str | Path) -> FractalSpec:
    """Resolve a preset name or a path to a JSON spec file."""
    if str(source) in PRESETS:
        return PRESETS[str(source)]
    path = Path(source)
    if not path.exists():
        raise SpecError(f"unknown preset or missing spec file: {source}")
    with open(path) as fh:
        return validate_spec(json.load(fh))


@dataclass(frozen=True, order=True)
class CellAddress:
    """A depth-``k`` cell named by its digit sequence.

    Ordering compares digit sequences lexicographically, which is the
    canonical total order used everywhere for determinism.
    """

    digits: tuple[Digit, ...]
    base: int = field(compare=False)

    @property
    def depth(self) -> int:
        return len(self.digits)

    @property
    def x(self) -> int:
        x = 0
        for _, col in self.digits:
            x = x * self.base + col
        return x

    @property
    def y(self) -> int:
        y = 0
        for row, _ in self.digits:
            y = y * self.base + row
        return y

    @classmethod
    def from_xy(cls, x: int, y: int, depth: int, base: int) -> "CellAddress":
        if not (0 <= x < base**depth and 0 <= y < base**depth):
            raise ValueError(f"({x}, {y}) outside the depth-{depth} grid")
        digits = []
        for _ in range(depth):
            digits.append((y % base, x % base))
            x //= base
            y //= base
        return cls(tuple(reversed(digits)), base)


def cell_box(addr: CellAddress) -> tuple[tuple[Fraction, Fraction], Fraction]:
    """Lower-left corner and side of the closed square of ``addr``."""
    side = Fraction(1, addr.base**addr.depth)
    return (addr.x * side, addr.y * side), side


@dataclass(frozen=True, eq=False)
class DigitalFractal:
    """The kept cells of a carpet at raster depth ``k``.

    ``xs``/``ys`` hold integer grid coordinates in canonical (lexicographic
    digit) order; cell ``i`` is the square
    ``[xs[i], xs[i]+1] x [ys[i], ys[i]+1]`` scaled by ``cell_side``.
    """

    spec: FractalSpec
    depth: int
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        self.xs.setflags(write=False)
        self.ys.setflags(write=False)

    def __len__(self) -> int:
        return len(self.xs)

    @property
    def cell_side(self) -> Fraction:
        return Fraction(1, self.spec.base**self.depth)

    @property
    def grid_size(self) -> int:
        return self.spec.base**self.depth

    @property
    def cells(self) -> np.ndarray:
        return np.column_stack([self.xs, self.ys])

    def address(self, i: int) -> CellAddress:
        return CellAddress.from_xy(int(self.xs[i]), int(self.ys[i]),
                                   self.depth, self.spec.base)

    def addresses(self) -> Iterator[CellAddress]:
        for i in range(len(self)):
            yield self.address(i)

    def contains(self, x, y) -> np.ndarray:
        """Vectorized membership test for integer grid coordinates."""
        return contains_cells(self.spec, self.depth, x, y)

    def centers(self) -> np.ndarray:
        """Cell centers in unit-square coordinates (float)."""
        side = 1.0 / self.grid_size
        return (self.cells + 0.5) * side


def contains_cells(spec: FractalSpec, depth: int, x, y) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    b = spec.base
    n = b**depth
    ok = (x >= 0) & (x < n) & (y >= 0) & (y < n)
    xc = np.where(ok, x, 0)
    yc = np.where(ok, y, 0)
    table = spec.mask_table()
    for _ in range(depth):
        ok &= table[yc % b, xc % b]
        xc = xc // b
        yc = yc // b
    return ok


def rasterize(spec: FractalSpec, k: int,
              budget: int = DEFAULT_CELL_BUDGET) -> DigitalFractal:
    if k < 0:
        raise ValueError(f"depth must be >= 0, got {k}")
    count = spec.n_maps**k
    if count > budget:
        raise BudgetExceededError(
            f"{spec.n_maps}^{k} = {count} cells exceeds budget {budget}"
        )
    rows = np.array([r for r, _ in spec.mask], dtype=np.int64)
    cols = np.array([c for _, c in spec.mask], dtype=np.int64)
    xs = np.zeros(1, dtype=np.int64)
    ys = np.zeros(1, dtype=np.int64)
    n = spec.n_maps
    for _ in range(k):
        xs = np.repeat(xs, n) * spec.base + np.tile(cols, len(xs))
        ys = np.repeat(ys, n) * spec.base + np.tile(rows, len(ys))
    return DigitalFractal(spec, k, xs, ys)


def similarity_dimension(spec: FractalSpec) -> float:
    return math.log(spec.n_maps) / math.log(spec.base)


def iter_mask_words(spec: FractalSpec, k: int) -> Iterable[tuple[Digit, ...]]:
    """All depth-``k`` digit sequences in lexicographic order (small ``k``)."""
    if k == 0:
        yield ()
        return
    for head in spec.mask:
        for tail in iter_mask_words(spec, k - 1):
            yield (head,) + tail
