"""Independent reference implementations used only by tests.

Everything here deliberately avoids the library's enumeration path: energies
come from explicit Python loops over the edge list, configuration iteration
uses itertools, and weights use math.exp.  The Gray-code enumerator walks
configurations one flip at a time so the library's local energy delta is the
inner kernel being exercised.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from isinglab.model import SpinConfig, energy_delta_flip


def edge_energy(lattice, values, q=None) -> int:
    """Plain-Python energy of a full value assignment (no field)."""
    total = 0
    for a, b in lattice.edges():
        if q is None:
            total -= int(values[a]) * int(values[b])
        else:
            total += -1 if values[a] == values[b] else 1
    return total


def full_energy(lattice, values, h=0.0, q=None):
    e = edge_energy(lattice, values, q)
    if h == 0.0:
        return e
    mask = lattice.free_site_mask
    return e - h * sum(int(values[i]) for i in range(lattice.n_sites) if mask[i])


def iter_configs(lattice, q=None):
    """Yield every full configuration (numpy int8) of the free sites."""
    free = list(lattice.free_sites)
    base = np.zeros(lattice.n_sites, dtype=np.int8)
    frozen = lattice.frozen_values
    if frozen is not None:
        b = lattice.boundary_sites()
        base[b] = frozen[b]
    states = (1, -1) if q is None else tuple(range(1, q + 1))
    for combo in itertools.product(states, repeat=len(free)):
        values = base.copy()
        for site, v in zip(free, combo):
            values[site] = v
        yield values


def level_counts(lattice, q=None, h=0.0) -> dict:
    """Exact energy histogram by brute force."""
    levels: dict = {}
    for values in iter_configs(lattice, q):
        e = full_energy(lattice, values, h, q)
        levels[e] = levels.get(e, 0) + 1
    return dict(sorted(levels.items()))


def expectation(lattice, params, fn) -> float:
    """Brute-force Gibbs average of fn(values) at the given parameters."""
    t = params.temperature
    num = 0.0
    den = 0.0
    energies = []
    configs = []
    for values in iter_configs(lattice, params.q):
        configs.append(values)
        energies.append(full_energy(lattice, values, params.field, params.q))
    e_min = min(energies)
    for values, e in zip(configs, energies):
        if t == 0:
            w = 1.0 if e == e_min else 0.0
        elif math.isinf(t):
            w = 1.0
        else:
            w = math.exp(-(e - e_min) / t)
        num += w * fn(values)
        den += w
    return num / den


def log_partition(lattice, params) -> float:
    """Brute-force log Z (finite temperatures)."""
    t = params.temperature
    total = 0.0
    for values in iter_configs(lattice, params.q):
        total += math.exp(-full_energy(lattice, values, params.field, params.q) / t)
    return math.log(total)


def gray_code_levels(lattice, params) -> dict:
    """Energy histogram via reflected Gray code over the free sites (Ising),
    updating the energy one local flip delta at a time."""
    assert params.q is None
    free = list(lattice.free_sites)
    n = len(free)
    config = SpinConfig.constant(lattice, 1)
    e = full_energy(lattice, config.values, params.field)
    levels = {e: 1}
    for k in range(1, 2 ** n):
        j = (k & -k).bit_length() - 1  # index of the flipped bit
        site = free[j]
        new_state = -config[site]
        e += energy_delta_flip(config, site, new_state, params)
        config.set_site(site, new_state)
        levels[e] = levels.get(e, 0) + 1
    return dict(sorted(levels.items()))
