"""Spin configurations and energy functions.

Two models share the same nearest-neighbor energy structure:

* Ising: values +1/-1, pair energy -s*s', optional external field h adding
  -h * sum(s) over the field sites.
* Potts(Q): values 1..Q, pair energy -1 when equal and +1 when different.
  With these constants Q=2 reproduces the Ising energies exactly under the
  relabeling 1 -> +1, 2 -> -1.

At h=0 every energy is an exact integer; keep it that way so identity tests
can compare with ==.  The field applies to every site under free/periodic
boundaries but only to interior sites when the boundary is pinned (the
frozen sites' field energy would be a constant shift).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import Lattice

ISING = "ising"
POTTS = "potts"


@dataclass(frozen=True)
class ModelParams:
    """Temperature, optional external field, and Potts state count.

    temperature may be math.inf (beta = 0).  T = 0 is accepted here but only
    the exact engine's minimizer path consumes it; samplers and Boltzmann
    weights reject it.
    """

    temperature: float
    field: float = 0.0
    q: int | None = None  # None = Ising, otherwise Potts with q states

    def __post_init__(self):
        if self.temperature < 0 or math.isnan(self.temperature):
            raise ValueError(f"temperature must be >= 0 or inf, got {self.temperature}")
        if self.q is not None:
            if self.q < 2:
                raise ValueError(f"Potts needs q >= 2, got {self.q}")
            if self.q > 127:
                raise ValueError("q > 127 does not fit the int8 state storage")
            if self.field != 0.0:
                raise ValueError("external field is only defined for the Ising model")

    @property
    def kind(self) -> str:
        return ISING if self.q is None else POTTS

    @property
    def beta(self) -> float:
        """Inverse temperature; 0 at T = inf."""
        if self.temperature == 0:
            raise ValueError("beta is undefined at T = 0")
        if math.isinf(self.temperature):
            return 0.0
        return 1.0 / self.temperature

    def value_set(self) -> np.ndarray:
        if self.q is None:
            return np.array([1, -1], dtype=np.int8)
        return np.arange(1, self.q + 1, dtype=np.int8)


class SpinConfig:
    """Dense per-site state on a lattice, with boundary values baked in.

    Mutable; one owner at a time.  ``values`` is int8 over all sites in
    row-major site order.
    """

    def __init__(self, lattice: Lattice, values: np.ndarray, q: int | None = None):
        values = np.asarray(values, dtype=np.int8)
        if values.shape != (lattice.n_sites,):
            raise ValueError(
                f"values shape {values.shape} does not match {lattice.n_sites} sites"
            )
        self.lattice = lattice
        self.q = q
        self.values = values.copy()
        self._validate()

    def _validate(self):
        if self.q is None:
            if not np.all(np.abs(self.values) == 1):
                raise ValueError("Ising states must be +1 or -1")
        else:
            if not np.all((self.values >= 1) & (self.values <= self.q)):
                raise ValueError(f"Potts states must lie in 1..{self.q}")
        frozen = self.lattice.frozen_values
        if frozen is not None:
            boundary = self.lattice.boundary_sites()
            if not np.array_equal(self.values[boundary], frozen[boundary]):
                raise ValueError("boundary sites must carry the boundary pattern")

    @classmethod
    def constant(cls, lattice: Lattice, value: int, q: int | None = None) -> "SpinConfig":
        values = np.full(lattice.n_sites, value, dtype=np.int8)
        frozen = lattice.frozen_values
        if frozen is not None:
            b = lattice.boundary_sites()
            values[b] = frozen[b]
        return cls(lattice, values, q)

    @classmethod
    def random(cls, lattice: Lattice, rng: np.random.Generator, q: int | None = None) -> "SpinConfig":
        if q is None:
            values = rng.choice(np.array([1, -1], dtype=np.int8), size=lattice.n_sites)
        else:
            values = rng.integers(1, q + 1, size=lattice.n_sites).astype(np.int8)
        frozen = lattice.frozen_values
        if frozen is not None:
            b = lattice.boundary_sites()
            values[b] = frozen[b]
        return cls(lattice, values, q)

    def copy(self) -> "SpinConfig":
        return SpinConfig(self.lattice, self.values, self.q)

    def __getitem__(self, site) -> int:
        return int(self.values[self.lattice.site_index(site)])

    def set_site(self, site, value: int):
        i = self.lattice.site_index(site)
        if self.lattice.boundary.is_fixed_kind and not self.lattice.is_interior(i):
            raise ValueError(f"site {self.lattice.site_coords(i)} is frozen by the boundary")
        old = self.values[i]
        self.values[i] = value
        try:
            self._validate_site(i)
        except ValueError:
            self.values[i] = old
            raise

    def _validate_site(self, i: int):
        v = self.values[i]
        if self.q is None:
            if v not in (1, -1):
                raise ValueError("Ising states must be +1 or -1")
        elif not 1 <= v <= self.q:
            raise ValueError(f"Potts states must lie in 1..{self.q}")


def pair_energy(a, b, q: int | None = None):
    """Interaction energy of one edge."""
    if q is None:
        return -a * b
    return -1 if a == b else 1


def energy(config: SpinConfig, params: ModelParams | None = None):
    """Total energy: sum over lattice edges plus the field term.

    Returns an exact int when the field vanishes.
    """
    lat = config.lattice
    v = config.values
    edges = lat.edges()
    if config.q is None:
        e_edges = -int(np.sum(v[edges[:, 0]].astype(np.int64) * v[edges[:, 1]]))
    else:
        eq = v[edges[:, 0]] == v[edges[:, 1]]
        e_edges = int(len(edges) - 2 * np.count_nonzero(eq))
    h = params.field if params is not None else 0.0
    if h == 0.0:
        return e_edges
    field_sites = lat.free_site_mask  # all sites unless the boundary pins them
    return e_edges - h * float(v[field_sites].sum())


def energy_delta_flip(config: SpinConfig, site, new_state: int,
                      params: ModelParams | None = None):
    """Energy change of setting one site to new_state, from incident edges only."""
    lat = config.lattice
    i = lat.site_index(site)
    if lat.boundary.is_fixed_kind and not lat.is_interior(i):
        raise ValueError(f"site {lat.site_coords(i)} is frozen by the boundary")
    old = int(config.values[i])
    new = int(new_state)
    neigh, deg = lat.neighbor_table()
    nbrs = neigh[i, : deg[i]]
    if config.q is None:
        if new not in (1, -1):
            raise ValueError("Ising states must be +1 or -1")
        d_edges = (old - new) * int(config.values[nbrs].sum())
    else:
        if not 1 <= new <= config.q:
            raise ValueError(f"Potts states must lie in 1..{config.q}")
        nb = config.values[nbrs]
        # each edge moves by +/-2 when its equality status changes
        d_edges = 2 * (int(np.count_nonzero(nb == old)) - int(np.count_nonzero(nb == new)))
    h = params.field if params is not None else 0.0
    if h == 0.0:
        return d_edges
    return d_edges - h * (new - old)


def boltzmann_log_weight(config: SpinConfig, params: ModelParams) -> float:
    """Log of the unnormalized Gibbs weight, -Energy/T.

    Every configuration has weight 1 at T = inf.  T = 0 is rejected; the
    zero-temperature measure lives in the exact engine's minimizer path.
    """
    if params.temperature == 0:
        raise ValueError("T = 0 has no Boltzmann weight; use the exact engine")
    if math.isinf(params.temperature):
        return 0.0
    return -float(energy(config, params)) / params.temperature
