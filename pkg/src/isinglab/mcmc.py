"""Markov-chain Monte Carlo sampling of the finite-volume Gibbs measure.

Chains own a mutable spin array plus an explicit RNG lineage: a chain seeded
with `seed` derives its initial configuration and its kernel stream from
numpy's SeedSequence(seed), so runs are bit-reproducible.  Temperature sweeps
derive one chain seed per temperature from (master_seed, index), making rows
independent of thread count.

Error bars come from batch means (32 batches by default); the effective
sample size is the number of independent samples that would give the same
error bar.  When every retained sample is identical the batch estimate
degenerates to zero, so the standard error falls back to a rule-of-three
style floor of 2/n: an honest bound for a chain that never moved instead of
a false certainty.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .lattice import FREE, PERIODIC, Lattice
from .model import ModelParams, SpinConfig, energy

DEFAULT_BATCHES = 32


@dataclass(frozen=True)
class Estimate:
    """Observable estimate with batch-means uncertainty."""

    observable: str
    mean: float
    stderr: float
    ess: float
    n_samples: int
    seed: int


@dataclass(frozen=True)
class Observable:
    """Named observable; evaluated on recorded spin snapshots, or directly on
    the per-update magnetization series when snapshots are not kept."""

    name: str
    eval_snapshots: Callable[[np.ndarray], np.ndarray] | None
    eval_magnetization: Callable[[np.ndarray], np.ndarray] | None = None


def magnetization() -> Observable:
    return Observable("m", lambda s: s.mean(axis=1), lambda m: m)


def abs_magnetization() -> Observable:
    return Observable("|m|", lambda s: np.abs(s.mean(axis=1)), np.abs)


def spin(lattice: Lattice, site) -> Observable:
    i = lattice.site_index(site)
    name = "sigma" + str(lattice.site_coords(i)).replace(" ", "")
    return Observable(name, lambda s: s[:, i].astype(float))


def spin_product(lattice: Lattice, sites) -> Observable:
    idx = [lattice.site_index(s) for s in sites]
    name = "*".join("sigma" + str(lattice.site_coords(i)).replace(" ", "")
                    for i in idx)

    def fn(s):
        p = s[:, idx[0]].astype(float)
        for i in idx[1:]:
            p *= s[:, i]
        return p

    return Observable(name, fn)


def chain_seed(master_seed: int, index: int) -> int:
    """Per-chain 64-bit seed derived from a master seed and a chain index."""
    return int(np.random.SeedSequence((master_seed, index)).generate_state(1, np.uint64)[0])


class Chain:
    """One Markov chain over one spin configuration."""

    def __init__(self, lattice: Lattice, params: ModelParams, seed: int,
                 start: str | SpinConfig = "random"):
        if params.temperature == 0:
            raise ValueError("samplers need T > 0 (T = 0 lives in the exact engine)")
        self.lattice = lattice
        self.params = params
        self.seed = int(seed)
        ss = np.random.SeedSequence(self.seed)
        init_ss, kernel_ss = ss.spawn(2)
        self._state = kernel_ss.generate_state(4, dtype=np.uint64)
        if not self._state.any():
            self._state[0] = 1
        if isinstance(start, SpinConfig):
            if start.lattice is not lattice or start.q != params.q:
                raise ValueError("start configuration does not match chain setup")
            config = start.copy()
        elif start == "random":
            config = SpinConfig.random(lattice, np.random.Generator(
                np.random.PCG64(init_ss)), params.q)
        elif start == "aligned":
            config = SpinConfig.constant(lattice, 1, params.q)
        else:
            raise ValueError(f"unknown start {start!r}")
        self._spins = config.values
        self._neigh, self._ndeg = lattice.neighbor_table()
        self._free = lattice.free_sites.astype(np.int32)
        self.sweep_count = 0
        self._edge_energy = energy(config)
        self._field_sum = int(self._spins[lattice.free_site_mask].sum()) \
            if params.field != 0.0 else 0

    # -- state access ---------------------------------------------------------

    @property
    def config(self) -> SpinConfig:
        return SpinConfig(self.lattice, self._spins, self.params.q)

    @property
    def energy(self):
        """Incrementally maintained energy; equals full recomputation."""
        if self.params.field == 0.0:
            return self._edge_energy
        return self._edge_energy - self.params.field * self._field_sum

    def recomputed_energy(self):
        return energy(self.config, self.params)

    # -- updates ----------------------------------------------------------------

    def metropolis_sweep(self, n_sweeps: int = 1,
                         record: bool = False) -> np.ndarray | None:
        """Run sweeps (one proposal per free site, fixed row-major scan).

        With record=True returns an (n_sweeps, n_sites) int8 snapshot matrix,
        one row per completed sweep.
        """
        snaps = np.empty((n_sweeps if record else 0, self.lattice.n_sites),
                         dtype=np.int8)
        beta = self.params.beta
        if self.params.q is None:
            d_edge, d_mag = _kernels.metropolis_ising(
                self._spins, self._neigh, self._ndeg, self._free,
                beta, self.params.field, n_sweeps, self._state, snaps)
            self._edge_energy += int(d_edge)
            self._field_sum += int(d_mag)
        else:
            d_edge = _kernels.metropolis_potts(
                self._spins, self._neigh, self._ndeg, self._free,
                self.params.q, beta, n_sweeps, self._state, snaps)
            self._edge_energy += int(d_edge)
        self.sweep_count += n_sweeps
        return snaps if record else None

    def wolff_update(self, n_updates: int = 1, record: bool = False
                     ) -> tuple[np.ndarray, np.ndarray | None]:
        """Run single-cluster updates; returns (per-update magnetization
        series, optional snapshots).

        Restricted to the Ising model at h = 0 with a free or periodic
        boundary: frozen sites or a field break the cluster rule.
        """
        if self.params.q is not None:
            raise ValueError("cluster updates are Ising-only")
        if self.params.field != 0.0:
            raise ValueError("cluster updates need h = 0")
        if self.lattice.boundary.kind not in (FREE, PERIODIC):
            raise ValueError(
                f"cluster updates need a free or periodic boundary, "
                f"got {self.lattice.boundary.kind}")
        p_add = 1.0 - math.exp(-2.0 * self.params.beta)
        mags = np.empty(n_updates, dtype=np.int64)
        snaps = np.empty((n_updates if record else 0, self.lattice.n_sites),
                         dtype=np.int8)
        d_edge = _kernels.wolff_ising(
            self._spins, self._neigh, self._ndeg, p_add, n_updates,
            self._state, mags, snaps)
        self._edge_energy += int(d_edge)
        self.sweep_count += n_updates
        return mags / self.lattice.n_sites, (snaps if record else None)


def integrated_autocorrelation_time(series: np.ndarray) -> float:
    """Initial-positive-sequence estimate of the integrated autocorrelation."""
    series = np.asarray(series, dtype=float)
    n = len(series)
    var = series.var()
    if var == 0 or n < 4:
        return 0.5
    centered = series - series.mean()
    tau = 0.5
    for t in range(1, n // 2):
        c = np.dot(centered[:n - t], centered[t:]) / ((n - t) * var)
        if c <= 0:
            break
        tau += c
    return tau


def batch_stats(series: np.ndarray, n_batches: int = DEFAULT_BATCHES
                ) -> tuple[float, float, float]:
    """(mean, stderr, ess) by batch means over the trailing full batches."""
    n = len(series)
    if n < n_batches:
        raise ValueError(f"need at least {n_batches} samples, got {n}")
    k = n // n_batches
    used = series[n - k * n_batches:]
    mean = float(used.mean())
    batch_means = used.reshape(n_batches, k).mean(axis=1)
    se = float(batch_means.std(ddof=1) / math.sqrt(n_batches))
    if se == 0.0:
        # all samples identical: rule-of-three style floor, not certainty
        return mean, 2.0 / len(used), float(len(used))
    var = float(used.var(ddof=1))
    ess = min(float(len(used)), max(1.0, var / se ** 2))
    return mean, se, ess


def _auto_burn_in(chain: Chain, n_sweeps: int) -> int:
    pilot = min(max(200, n_sweeps // 100), n_sweeps // 4)
    snaps = chain.metropolis_sweep(pilot, record=True)
    tau = integrated_autocorrelation_time(snaps.mean(axis=1))
    return pilot + min(int(math.ceil(10 * tau)), n_sweeps // 2)


def estimate_many(chain: Chain, observables: Sequence[Observable],
                  n_sweeps: int, burn_in: int | None = None,
                  sampler: str = "metropolis",
                  n_batches: int = DEFAULT_BATCHES) -> list[Estimate]:
    """Run one chain and estimate every observable from the same samples.

    n_sweeps counts all updates including burn-in; the default burn-in runs a
    short pilot and discards ten integrated autocorrelation times.
    """
    if sampler not in ("metropolis", "wolff"):
        raise ValueError(f"unknown sampler {sampler!r}")
    if burn_in is None:
        if sampler == "wolff":
            burn_in = max(n_batches, n_sweeps // 10)
            chain.wolff_update(burn_in)
        else:
            burn_in = _auto_burn_in(chain, n_sweeps)
    else:
        if not 0 <= burn_in < n_sweeps:
            raise ValueError(f"need 0 <= burn_in < n_sweeps, got {burn_in}")
        if sampler == "wolff":
            chain.wolff_update(burn_in)
        else:
            chain.metropolis_sweep(burn_in)
    retained = n_sweeps - burn_in
    if retained < n_batches:
        raise ValueError(
            f"{retained} post-burn-in sweeps cannot fill {n_batches} batches")

    need_snaps = any(o.eval_snapshots is not None and o.eval_magnetization is None
                     for o in observables)
    if sampler == "wolff":
        m_series, snaps = chain.wolff_update(retained, record=need_snaps)
    else:
        snaps = chain.metropolis_sweep(retained, record=True)
        m_series = snaps.mean(axis=1)

    results = []
    for obs in observables:
        if obs.eval_magnetization is not None:
            series = obs.eval_magnetization(m_series)
        elif snaps is not None:
            series = obs.eval_snapshots(snaps)
        else:
            raise ValueError(f"observable {obs.name} needs snapshots")
        mean, se, ess = batch_stats(np.asarray(series, dtype=float), n_batches)
        results.append(Estimate(obs.name, mean, se, ess, retained, chain.seed))
    return results


def estimate(chain: Chain, observable: Observable, n_sweeps: int,
             burn_in: int | None = None, sampler: str = "metropolis",
             n_batches: int = DEFAULT_BATCHES) -> Estimate:
    return estimate_many(chain, [observable], n_sweeps, burn_in, sampler,
                         n_batches)[0]


@dataclass(frozen=True)
class SweepRow:
    temperature: float
    observable: str
    estimate: Estimate | None
    error: str | None = None


def temperature_sweep(lattice: Lattice, temperatures: Sequence[float],
                      observables: Sequence[Observable], n_sweeps: int,
                      burn_in: int | None, master_seed: int,
                      sampler: str = "metropolis", q: int | None = None,
                      field: float = 0.0, threads: int = 1) -> list[SweepRow]:
    """One estimate row per (temperature, observable), independently seeded.

    Chains never share state; rows come back in input order whatever the
    thread count, so output bytes do not depend on parallelism.
    """
    def run_one(index: int) -> list[SweepRow]:
        t = temperatures[index]
        rows = []
        try:
            params = ModelParams(float(t), field=field, q=q)
            chain = Chain(lattice, params, chain_seed(master_seed, index))
            for est in estimate_many(chain, observables, n_sweeps, burn_in, sampler):
                rows.append(SweepRow(float(t), est.observable, est))
        except ValueError as exc:
            reason = str(exc)
            for obs in observables:
                rows.append(SweepRow(float(t), obs.name, None, reason))
        return rows

    indices = range(len(temperatures))
    if threads > 1 and len(temperatures) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_t = list(pool.map(run_one, indices))
    else:
        per_t = [run_one(i) for i in indices]
    return [row for rows in per_t for row in rows]
