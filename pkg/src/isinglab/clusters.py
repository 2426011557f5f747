"""Equal-state clusters and the disagreement interface.

A cluster is a maximal connected set of neighboring sites holding the same
state.  The interface is the set of lattice edges whose endpoints disagree;
its size ("area", one unit per edge) fixes the energy exactly at h=0:

    Energy = -(number of edges) + 2 * Area.

Interface connectivity uses the dual picture: each disagreeing edge is a
dual (d-1)-cell, and two cells are adjacent when they share a (d-2)-facet.
Facets are identified by integer keys in doubled coordinates, which also
wrap correctly on periodic lattices.
"""

from __future__ import annotations

from dataclasses import dataclass

import math

import numpy as np

from .exact import DEFAULT_CAP, EnumerationTable
from .lattice import DOBRUSHIN, PERIODIC, Lattice
from .model import ModelParams, SpinConfig, energy


class UnionFind:
    """Path-compressing union-find over 0..n-1."""

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


@dataclass(frozen=True)
class ClusterPartition:
    """Per-site labels plus per-cluster size and state value.

    Labels are contiguous from 0, ordered by each cluster's smallest site
    index, so the decomposition is deterministic.
    """

    labels: np.ndarray
    sizes: np.ndarray
    values: np.ndarray

    @property
    def n_clusters(self) -> int:
        return len(self.sizes)

    def same_cluster(self, a: int, b: int) -> bool:
        return self.labels[a] == self.labels[b]


def decompose(config: SpinConfig) -> ClusterPartition:
    """Flood the equal-state neighbor relation into clusters."""
    lat = config.lattice
    uf = UnionFind(lat.n_sites)
    v = config.values
    for a, b in lat.edges():
        if v[a] == v[b]:
            uf.union(a, b)
    labels = np.empty(lat.n_sites, dtype=np.int32)
    order: dict[int, int] = {}
    for i in range(lat.n_sites):
        root = uf.find(i)
        if root not in order:
            order[root] = len(order)
        labels[i] = order[root]
    n = len(order)
    sizes = np.bincount(labels, minlength=n)
    values = np.empty(n, dtype=np.int8)
    for i in range(lat.n_sites - 1, -1, -1):
        values[labels[i]] = v[i]
    return ClusterPartition(labels, sizes.astype(np.int64), values)


@dataclass(frozen=True)
class Interface:
    """Disagreeing-edge set with its dual-cell component structure."""

    edge_indices: np.ndarray      # indices into lattice.edges()
    area: int                     # number of disagreeing edges
    component_labels: np.ndarray  # per disagreeing edge, contiguous from 0
    n_components: int


def _edge_axis(lat: Lattice, a: int, b: int) -> int:
    ca, cb = lat.site_coords(a), lat.site_coords(b)
    for axis in range(lat.d):
        if ca[axis] != cb[axis]:
            return axis
    raise AssertionError("degenerate edge")


def _dual_cell_center(lat: Lattice, a: int, b: int, axis: int) -> tuple[int, ...]:
    """Doubled-coordinate center of the dual cell crossing edge (a, b)."""
    ca, cb = lat.site_coords(a)[axis], lat.site_coords(b)[axis]
    c = [2 * x for x in lat.site_coords(a)]
    if abs(ca - cb) == 1:
        c[axis] = 2 * min(ca, cb) + 1
    else:
        # wrap edge: the cell sits between coordinates extent-1 and 0
        c[axis] = (2 * max(ca, cb) + 1) % (2 * lat.extents[axis])
    return tuple(c)


def interface(config: SpinConfig) -> Interface:
    """Disagreeing edges, their count, and their dual connectivity."""
    lat = config.lattice
    edges = lat.edges()
    v = config.values
    disagree = np.flatnonzero(v[edges[:, 0]] != v[edges[:, 1]])
    n = len(disagree)
    uf = UnionFind(n)
    facet_owner: dict[tuple[int, ...], int] = {}
    periodic = lat.boundary.kind == PERIODIC
    for k, ei in enumerate(disagree):
        a, b = edges[ei]
        axis = _edge_axis(lat, a, b)
        center = _dual_cell_center(lat, a, b, axis)
        for j in range(lat.d):
            if j == axis:
                continue
            wrap = 2 * lat.extents[j]
            for sign in (-1, 1):
                fc = list(center)
                fc[j] = (fc[j] + sign) % wrap if periodic else fc[j] + sign
                # facet identity is fully encoded by its doubled center
                key = tuple(fc)
                if key in facet_owner:
                    uf.union(facet_owner[key], k)
                else:
                    facet_owner[key] = k
    labels = np.empty(n, dtype=np.int32)
    order: dict[int, int] = {}
    for k in range(n):
        root = uf.find(k)
        if root not in order:
            order[root] = len(order)
        labels[k] = order[root]
    return Interface(disagree, int(n), labels, len(order))


def area(config: SpinConfig) -> int:
    lat = config.lattice
    edges = lat.edges()
    v = config.values
    return int(np.count_nonzero(v[edges[:, 0]] != v[edges[:, 1]]))


def peierls_weight_check(base: SpinConfig, perturbed: SpinConfig,
                         temperature: float) -> float:
    """Exact Gibbs weight ratio of perturbed over base, e^(-2*dArea/T).

    Both configurations must share the lattice (hence boundary); at h=0 the
    energy-area identity makes the ratio a pure function of the area change.
    """
    if base.lattice is not perturbed.lattice and \
            base.lattice.to_dict() != perturbed.lattice.to_dict():
        raise ValueError("configurations must share lattice and boundary")
    if temperature <= 0:
        raise ValueError("need T > 0")
    d_area = area(perturbed) - area(base)
    d_energy = energy(perturbed) - energy(base)
    if d_energy != 2 * d_area:
        raise AssertionError("energy-area identity violated")
    return math.exp(-2.0 * d_area / temperature)


@dataclass(frozen=True)
class DobrushinReport:
    """The wall-anchored interface component."""

    spanning: bool | None         # both wall anchors in one component (d=2)
    edge_indices: np.ndarray      # edges of the anchored component
    fluctuation: float            # max |height - wall| over the component
    wall: float


def dobrushin_interface(config: SpinConfig) -> DobrushinReport:
    """Interface component attached to the frozen wall crossings.

    In d=2 the two boundary columns each carry exactly one frozen disagreeing
    edge; the report says whether one component joins them and how far it
    strays from the wall line.  For d>=3 the anchors form the wall perimeter
    and spanning reports whether all of them are connected.
    """
    lat = config.lattice
    if lat.boundary.kind != DOBRUSHIN:
        raise ValueError("needs a dobrushin boundary")
    wall = lat.wall_height
    iface = interface(config)
    edges = lat.edges()
    boundary = set(lat.boundary_sites().tolist())
    anchors = []
    for k, ei in enumerate(iface.edge_indices):
        a, b = edges[ei]
        if a in boundary and b in boundary:
            ha, hb = lat.site_coords(a)[-1], lat.site_coords(b)[-1]
            if min(ha, hb) < wall < max(ha, hb):
                anchors.append(k)
    if not anchors:
        raise AssertionError("frozen wall crossings missing from the interface")
    anchor_labels = {int(iface.component_labels[k]) for k in anchors}
    spanning = len(anchor_labels) == 1
    label = int(iface.component_labels[anchors[0]])
    members = np.flatnonzero(iface.component_labels == label)
    fluct = 0.0
    for k in members:
        a, b = edges[iface.edge_indices[k]]
        ha, hb = lat.site_coords(a)[-1], lat.site_coords(b)[-1]
        mid = (ha + hb) / 2.0 if ha != hb else float(ha)
        fluct = max(fluct, abs(mid - wall))
    return DobrushinReport(spanning, iface.edge_indices[members], fluct, wall)


def interface_census(lattice: Lattice, params: ModelParams | None = None,
                     cap: int = DEFAULT_CAP) -> dict[int, int]:
    """Exact count of interior configurations per interface area.

    Defaults to the Ising model; the boundary should pin every boundary site
    (all-plus in the textbook setting) so area 0 is reached by exactly one
    configuration.
    """
    params = params if params is not None else ModelParams(math.inf)
    table = EnumerationTable(lattice, params, cap=cap)
    edges = lattice.edges()
    counts: dict[int, int] = {}
    for spins, _ in table.iter_blocks():
        a = np.zeros(len(spins), dtype=np.int64)
        for i, j in edges:
            a += spins[:, i] != spins[:, j]
        vals, cnts = np.unique(a, return_counts=True)
        for v, c in zip(vals.tolist(), cnts.tolist()):
            counts[v] = counts.get(v, 0) + c
    return dict(sorted(counts.items()))
