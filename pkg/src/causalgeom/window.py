"""Bounded sampling lattices used as the oracle for approximate predicates."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .minkowski import Point


@dataclass(frozen=True)
class GridWindow:
    T: float
    X: float
    h: float
    s: int

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("spacing h must be positive")
        if not (self.T > 0 and self.X > 0):
            raise ValueError("window half-widths must be positive")
        if self.s < 1:
            raise ValueError("space dimension s must be >= 1")
        if self.h > min(self.T, self.X) + 1e-12:
            raise ValueError("spacing exceeds the window half-width")

    @property
    def n0(self) -> int:
        return int(np.floor(self.T / self.h + 1e-9))

    @property
    def n1(self) -> int:
        return int(np.floor(self.X / self.h + 1e-9))

    @property
    def shape(self) -> tuple:
        return (2 * self.n0 + 1,) + (2 * self.n1 + 1,) * self.s

    @property
    def offset(self) -> np.ndarray:
        """Index offset: lattice index i maps to array index i + offset."""
        return np.array([self.n0] + [self.n1] * self.s)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @cached_property
    def coords(self) -> np.ndarray:
        """Array of shape self.shape + (1+s,) holding lattice coordinates."""
        axes = [np.arange(-self.n0, self.n0 + 1) * self.h]
        axes += [np.arange(-self.n1, self.n1 + 1) * self.h] * self.s
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def points(self) -> np.ndarray:
        return self.coords.reshape(-1, self.s + 1)

    def evaluate(self, region) -> np.ndarray:
        """Boolean mask of region membership over the lattice."""
        return np.asarray(region.contains(self.coords), dtype=bool)

    def point(self, array_index) -> np.ndarray:
        return (np.asarray(array_index) - self.offset) * self.h

    def to_index(self, pts) -> tuple[np.ndarray, np.ndarray]:
        """Nearest array indices of points and a mask of those inside the window."""
        pts = np.asarray(pts, dtype=float)
        idx = np.rint(pts / self.h).astype(np.int64) + self.offset
        inside = np.all((idx >= 0) & (idx < np.array(self.shape)), axis=-1)
        return idx, inside

    def on_boundary(self, mask: np.ndarray) -> bool:
        """True when the mask touches the outer layer of the lattice."""
        for ax in range(mask.ndim):
            if np.take(mask, 0, axis=ax).any() or np.take(mask, -1, axis=ax).any():
                return True
        return False

    def to_dict(self) -> dict:
        return {"T": self.T, "X": self.X, "h": self.h, "s": self.s}


def window_points(G: GridWindow) -> list[Point]:
    """Lexicographic enumeration of the lattice as Point values."""
    return [Point(p) for p in G.points()]
