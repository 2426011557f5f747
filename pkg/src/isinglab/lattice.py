"""Finite d-dimensional cubic lattice geometry.

Sites are points of a finite box with per-axis extents, indexed in row-major
(C) order.  Edges join nearest neighbors; under periodic boundaries they wrap.
A boundary condition is attached to the lattice and decides which sites are
frozen (fixed-type boundaries pin every boundary site) and which are free.

Lattice objects are immutable after construction and safe to share between
threads; all derived arrays are computed once in ``__init__``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

FREE = "free"
PERIODIC = "periodic"
FIXED = "fixed"
ALL_PLUS = "all_plus"
ALL_MINUS = "all_minus"
DOBRUSHIN = "dobrushin"

_KINDS = (FREE, PERIODIC, FIXED, ALL_PLUS, ALL_MINUS, DOBRUSHIN)
# Boundaries that pin every boundary site to a prescribed value.
FIXED_KINDS = (FIXED, ALL_PLUS, ALL_MINUS, DOBRUSHIN)

Site = tuple[int, ...]


@dataclass(frozen=True)
class BoundaryCondition:
    """Boundary prescription for a finite box.

    ``fixed`` carries an explicit pattern mapping each boundary site to its
    pinned value.  ``dobrushin`` pins boundary sites below a half-integer
    wall height (measured along the last axis) to +1 and sites above it
    to -1; ``wall=None`` places the wall just above the middle layer.
    """

    kind: str
    pattern: tuple[tuple[Site, int], ...] | None = None
    wall: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown boundary kind {self.kind!r}")
        if self.kind == FIXED and self.pattern is None:
            raise ValueError("fixed boundary requires a pattern")
        if self.kind != FIXED and self.pattern is not None:
            raise ValueError(f"{self.kind} boundary takes no pattern")
        if self.kind != DOBRUSHIN and self.wall is not None:
            raise ValueError(f"{self.kind} boundary takes no wall position")
        if self.wall is not None and (2 * self.wall) % 2 != 1:
            raise ValueError(f"wall must sit at a half-integer height, got {self.wall}")

    @classmethod
    def free(cls) -> "BoundaryCondition":
        return cls(FREE)

    @classmethod
    def periodic(cls) -> "BoundaryCondition":
        return cls(PERIODIC)

    @classmethod
    def all_plus(cls) -> "BoundaryCondition":
        return cls(ALL_PLUS)

    @classmethod
    def all_minus(cls) -> "BoundaryCondition":
        return cls(ALL_MINUS)

    @classmethod
    def dobrushin(cls, wall: float | None = None) -> "BoundaryCondition":
        return cls(DOBRUSHIN, wall=wall)

    @classmethod
    def fixed(cls, pattern: Mapping[Site, int]) -> "BoundaryCondition":
        items = tuple(sorted((tuple(site), int(v)) for site, v in pattern.items()))
        return cls(FIXED, pattern=items)

    @property
    def is_fixed_kind(self) -> bool:
        return self.kind in FIXED_KINDS


class Lattice:
    """Finite cubic box with a boundary condition.

    Site linear indices follow row-major order over the coordinate tuple, so
    index = x0*e1*...*e_{d-1} + x1*e2*... + ... + x_{d-1}.
    """

    def __init__(self, extents: Sequence[int], boundary: BoundaryCondition | None = None):
        extents = tuple(int(e) for e in extents)
        if len(extents) < 1:
            raise ValueError("lattice needs at least one axis")
        if any(e < 1 for e in extents):
            raise ValueError(f"extents must be positive, got {extents}")
        boundary = boundary if boundary is not None else BoundaryCondition.free()
        if boundary.kind == PERIODIC and any(e < 3 for e in extents):
            raise ValueError(
                f"periodic boundaries need every extent >= 3 to avoid duplicate "
                f"edges, got {extents}"
            )
        self.extents = extents
        self.d = len(extents)
        self.boundary = boundary
        self.n_sites = int(np.prod(extents))

        self._coords = self._build_coords()
        self._edges = self._build_edges()
        self._boundary_mask = self._build_boundary_mask()
        self._neighbors, self._degrees = self._build_neighbor_table()
        self._frozen_values = self._build_frozen_values()

    # -- construction helpers ------------------------------------------------

    def _build_coords(self) -> np.ndarray:
        idx = np.arange(self.n_sites)
        coords = np.empty((self.n_sites, self.d), dtype=np.int64)
        for axis, c in enumerate(np.unravel_index(idx, self.extents)):
            coords[:, axis] = c
        return coords

    def _build_edges(self) -> np.ndarray:
        periodic = self.boundary.kind == PERIODIC
        strides = [int(np.prod(self.extents[a + 1:])) for a in range(self.d)]
        pairs = []
        for i in range(self.n_sites):
            for axis in range(self.d):
                x = self._coords[i, axis]
                if x + 1 < self.extents[axis]:
                    j = i + strides[axis]
                elif periodic:
                    j = i - x * strides[axis]
                else:
                    continue
                pairs.append((min(i, j), max(i, j)))
        if not pairs:
            return np.empty((0, 2), dtype=np.int64)
        return np.array(pairs, dtype=np.int64)

    def _build_boundary_mask(self) -> np.ndarray:
        if self.boundary.kind == PERIODIC:
            return np.zeros(self.n_sites, dtype=bool)
        on_face = (self._coords == 0) | (self._coords == np.array(self.extents) - 1)
        return on_face.any(axis=1)

    def _build_neighbor_table(self) -> tuple[np.ndarray, np.ndarray]:
        neigh = np.full((self.n_sites, 2 * self.d), -1, dtype=np.int32)
        deg = np.zeros(self.n_sites, dtype=np.int8)
        for a, b in self._edges:
            neigh[a, deg[a]] = b
            deg[a] += 1
            neigh[b, deg[b]] = a
            deg[b] += 1
        return neigh, deg

    def _build_frozen_values(self) -> np.ndarray | None:
        bc = self.boundary
        if not bc.is_fixed_kind:
            return None
        values = np.zeros(self.n_sites, dtype=np.int8)
        sites = np.flatnonzero(self._boundary_mask)
        if bc.kind == ALL_PLUS:
            values[sites] = 1
        elif bc.kind == ALL_MINUS:
            values[sites] = -1
        elif bc.kind == DOBRUSHIN:
            wall = self.wall_height
            heights = self._coords[sites, -1]
            values[sites] = np.where(heights < wall, 1, -1)
        else:
            pattern = dict(bc.pattern)
            expected = {tuple(self._coords[i]) for i in sites}
            given = set(pattern)
            if given != expected:
                missing = expected - given
                extra = given - expected
                raise ValueError(
                    f"fixed pattern must cover exactly the boundary sites; "
                    f"missing {sorted(missing)[:3]}..., extra {sorted(extra)[:3]}..."
                    if missing or extra else "fixed pattern mismatch"
                )
            for site, v in pattern.items():
                values[self.site_index(site)] = v
        return values

    # -- geometry queries ----------------------------------------------------

    @property
    def wall_height(self) -> float:
        """Dobrushin wall position along the last axis."""
        if self.boundary.kind != DOBRUSHIN:
            raise ValueError("wall height only defined for dobrushin boundaries")
        if self.boundary.wall is not None:
            wall = self.boundary.wall
        else:
            wall = (self.extents[-1] - 1) // 2 + 0.5
        if not 0 < wall < self.extents[-1] - 1:
            raise ValueError(
                f"wall at {wall} does not separate boundary sites of extent "
                f"{self.extents[-1]}"
            )
        return wall

    def sites(self) -> np.ndarray:
        """All site coordinates, row-major; shape (n_sites, d)."""
        return self._coords.copy()

    def edges(self) -> np.ndarray:
        """Nearest-neighbor pairs of linear indices, lower index first."""
        return self._edges.copy()

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    def site_index(self, site) -> int:
        """Linear index of a site given as coordinate tuple or index."""
        if isinstance(site, (int, np.integer)):
            if not 0 <= site < self.n_sites:
                raise ValueError(f"site index {site} out of range")
            return int(site)
        site = tuple(int(x) for x in site)
        if len(site) != self.d:
            raise ValueError(f"site {site} has wrong dimension, expected {self.d}")
        if any(not 0 <= x < e for x, e in zip(site, self.extents)):
            raise ValueError(f"site {site} outside extents {self.extents}")
        return int(np.ravel_multi_index(site, self.extents))

    def site_coords(self, index: int) -> Site:
        return tuple(int(x) for x in self._coords[index])

    def boundary_sites(self) -> np.ndarray:
        """Linear indices of sites with some coordinate at 0 or extent-1."""
        if self.boundary.kind == PERIODIC:
            raise ValueError("periodic lattice has no boundary sites")
        return np.flatnonzero(self._boundary_mask)

    def is_interior(self, site) -> bool:
        if self.boundary.kind == PERIODIC:
            return True
        return not self._boundary_mask[self.site_index(site)]

    @property
    def interior_mask(self) -> np.ndarray:
        return ~self._boundary_mask

    @property
    def free_site_mask(self) -> np.ndarray:
        """Sites whose value may vary: all sites, or the interior when the
        boundary pins its sites."""
        if self.boundary.is_fixed_kind:
            return ~self._boundary_mask
        return np.ones(self.n_sites, dtype=bool)

    @property
    def free_sites(self) -> np.ndarray:
        return np.flatnonzero(self.free_site_mask)

    @property
    def frozen_values(self) -> np.ndarray | None:
        """Pinned boundary values (int8 per site, 0 on free sites), or None."""
        if self._frozen_values is None:
            return None
        return self._frozen_values.copy()

    def neighbor_table(self) -> tuple[np.ndarray, np.ndarray]:
        """(neighbors, degrees) arrays for kernel consumption; -1 padding."""
        return self._neighbors, self._degrees

    # -- JSON description ----------------------------------------------------

    def to_dict(self) -> dict:
        bdict: dict = {"kind": self.boundary.kind}
        if self.boundary.kind == DOBRUSHIN and self.boundary.wall is not None:
            bdict["wall"] = self.boundary.wall
        if self.boundary.kind == FIXED:
            bdict["pattern"] = [[list(site), v] for site, v in self.boundary.pattern]
        return {"d": self.d, "extents": list(self.extents), "boundary": bdict}

    @classmethod
    def from_dict(cls, obj: Mapping) -> "Lattice":
        extents = obj["extents"]
        if obj.get("d") is not None and int(obj["d"]) != len(extents):
            raise ValueError(f"d={obj['d']} inconsistent with extents {extents}")
        b = obj.get("boundary", {"kind": FREE})
        kind = b["kind"]
        if kind == FIXED:
            pattern = {tuple(site): int(v) for site, v in b["pattern"]}
            bc = BoundaryCondition.fixed(pattern)
        elif kind == DOBRUSHIN:
            bc = BoundaryCondition.dobrushin(b.get("wall"))
        else:
            bc = BoundaryCondition(kind)
        return cls(extents, bc)

    def __repr__(self) -> str:
        shape = "x".join(str(e) for e in self.extents)
        return f"Lattice({shape}, {self.boundary.kind})"


def expected_edge_count(lattice: Lattice) -> int:
    """Closed-form edge count used as a self-check."""
    e = lattice.extents
    if lattice.boundary.kind == PERIODIC:
        return lattice.d * lattice.n_sites
    return sum(
        (e[i] - 1) * int(np.prod(e[:i] + e[i + 1:])) for i in range(lattice.d)
    )
