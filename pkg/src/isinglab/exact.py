"""Brute-force enumeration oracle for small lattices.

Enumerates every configuration of the free sites (boundary sites stay at
their pinned values), in blocks of vectorized numpy work, and answers
partition-function, marginal, correlation, and consistency queries by exact
weighted summation.  Weights are handled relative to the minimum energy so
no exponential ever overflows; log Z comes out of a log-sum-exp over the
energy histogram.

Configuration order: free sites are listed row-major; configuration k assigns
to free site j the value decoded from digit j of k (base 2 for Ising with
digit 0 -> +1, digit 1 -> -1; base Q for Potts with digit d -> state d+1).

T = 0 is served by the same machinery as the uniform measure on the exact
energy minimizers; its reported log Z is the log count of minimizers, i.e.
energies are measured from the minimum (only differences matter anyway).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .lattice import ALL_MINUS, ALL_PLUS, FREE, PERIODIC, BoundaryCondition, Lattice
from .model import ModelParams, SpinConfig

DEFAULT_CAP = 2 ** 30
# Keep spins materialized when the full table stays under this many bytes.
MATERIALIZE_BYTES = 1 << 26
BLOCK = 1 << 16


@dataclass(frozen=True)
class EnergyHistogram:
    """Exact degeneracy count per realized energy level."""

    levels: np.ndarray  # ascending
    counts: np.ndarray  # int64, positive
    volume: int         # number of lattice sites

    def entropy(self) -> np.ndarray:
        """Per-volume entropy ln(count)/V of each level."""
        return np.log(self.counts.astype(float)) / self.volume

    def free_energy_profile(self, temperature: float) -> np.ndarray:
        """Per-volume -E/V + T*S(E) per level; at T = inf entropy alone decides."""
        if math.isinf(temperature):
            return self.entropy()
        return -self.levels.astype(float) / self.volume + temperature * self.entropy()

    def most_probable_level(self, temperature: float) -> float:
        """Energy level of maximum probability; ties go to the lower level."""
        if temperature == 0:
            return float(self.levels[0])
        if math.isinf(temperature):
            score = np.log(self.counts.astype(float))
        else:
            score = np.log(self.counts.astype(float)) - self.levels / temperature
        return float(self.levels[int(np.argmax(score))])

    def best_free_energy_level(self, temperature: float) -> float:
        return float(self.levels[int(np.argmax(self.free_energy_profile(temperature)))])


def free_energy_profile(hist: EnergyHistogram, temperature: float) -> np.ndarray:
    return hist.free_energy_profile(temperature)


@dataclass(frozen=True)
class GibbsCheck:
    """Result of the detailed-consistency verification on a window."""

    max_violation: float
    n_groups: int
    n_patterns: int
    window: tuple[int, ...]


@dataclass(frozen=True)
class FkgCheck:
    lhs: float
    rhs: float
    holds: bool


@dataclass(frozen=True)
class MixtureReport:
    """Free-boundary window marginals vs the plus/minus mixture."""

    max_abs_discrepancy: float
    window: tuple[int, ...]
    temperature: float


class EnumerationTable:
    """Exact finite-volume Gibbs table over an enumerable lattice."""

    def __init__(self, lattice: Lattice, params: ModelParams, cap: int = DEFAULT_CAP):
        self.lattice = lattice
        self.params = params
        self.n_values = 2 if params.q is None else params.q
        self.free_sites = lattice.free_sites
        n_free = len(self.free_sites)
        n_configs = self.n_values ** n_free
        if n_configs > cap:
            raise ValueError(
                f"enumeration needs {n_configs} configurations "
                f"({self.n_values}^{n_free}), above the cap {cap}"
            )
        self.n_configs = int(n_configs)

        self._template = np.zeros(lattice.n_sites, dtype=np.int8)
        frozen = lattice.frozen_values
        if frozen is not None:
            b = lattice.boundary_sites()
            self._template[b] = frozen[b]

        self._edges = lattice.edges()
        self._field_mask = lattice.free_site_mask if params.field != 0.0 else None

        self._spins_cache: np.ndarray | None = None
        self._energy_cache: np.ndarray | None = None
        if self.n_configs * lattice.n_sites <= MATERIALIZE_BYTES:
            self._spins_cache = self._make_block(0, self.n_configs)
            self._energy_cache = self._block_energy(self._spins_cache)

        levels: dict = {}
        for _, e_block in self.iter_blocks():
            vals, counts = np.unique(e_block, return_counts=True)
            for v, c in zip(vals.tolist(), counts.tolist()):
                levels[v] = levels.get(v, 0) + c
        self._levels = dict(sorted(levels.items()))
        self.min_energy = next(iter(self._levels))
        self.log_z = self._compute_log_z()

    # -- configuration generation ---------------------------------------------

    def _make_block(self, lo: int, hi: int) -> np.ndarray:
        idx = np.arange(lo, hi, dtype=np.uint64)
        spins = np.broadcast_to(self._template, (hi - lo, self.lattice.n_sites)).copy()
        if self.params.q is None:
            for j, site in enumerate(self.free_sites):
                bit = (idx >> np.uint64(j)) & np.uint64(1)
                spins[:, site] = (1 - 2 * bit.astype(np.int8)).astype(np.int8)
        else:
            q = np.uint64(self.n_values)
            div = np.uint64(1)
            for site in self.free_sites:
                digit = (idx // div) % q
                spins[:, site] = digit.astype(np.int8) + 1
                div *= q
        return spins

    def _block_energy(self, spins: np.ndarray) -> np.ndarray:
        e = np.zeros(len(spins), dtype=np.int64)
        if self.params.q is None:
            for a, b in self._edges:
                e -= spins[:, a] * spins[:, b]
        else:
            e += len(self._edges)
            for a, b in self._edges:
                e -= 2 * (spins[:, a] == spins[:, b])
        if self._field_mask is not None:
            return e - self.params.field * spins[:, self._field_mask].sum(axis=1)
        return e

    def iter_blocks(self) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        if self._spins_cache is not None:
            yield self._spins_cache, self._energy_cache
            return
        for lo in range(0, self.n_configs, BLOCK):
            hi = min(lo + BLOCK, self.n_configs)
            spins = self._make_block(lo, hi)
            yield spins, self._block_energy(spins)

    def _weights(self, e_block: np.ndarray) -> np.ndarray:
        """Unnormalized weights relative to the minimum energy (never overflow)."""
        t = self.params.temperature
        if t == 0:
            return (e_block == self.min_energy).astype(float)
        if math.isinf(t):
            return np.ones(len(e_block))
        return np.exp(-(e_block - self.min_energy) / t)

    def _compute_log_z(self) -> float:
        t = self.params.temperature
        counts = np.array(list(self._levels.values()), dtype=float)
        levels = np.array(list(self._levels.keys()), dtype=float)
        if t == 0:
            return float(np.log(counts[0]))
        if math.isinf(t):
            return float(np.log(counts.sum()))
        shifted = np.log(counts) - (levels - self.min_energy) / t
        m = shifted.max()
        return float(m + np.log(np.exp(shifted - m).sum()) - self.min_energy / t)

    # -- basic queries ---------------------------------------------------------

    @property
    def energy_levels(self) -> dict:
        """Realized energy level -> exact configuration count."""
        return dict(self._levels)

    def normalization_check(self) -> float:
        """Sum of probabilities; exactly the log-sum-exp consistency check."""
        t = self.params.temperature
        total = 0.0
        for _, e_block in self.iter_blocks():
            total += self._weights(e_block).sum()
        if t == 0 or math.isinf(t):
            return total / math.exp(self.log_z)
        return total / math.exp(self.log_z + self.min_energy / t)

    def expectation(self, fn) -> float:
        """Weighted average of fn(spins_block) -> per-config values."""
        num = 0.0
        den = 0.0
        for spins, e_block in self.iter_blocks():
            w = self._weights(e_block)
            num += float(np.dot(w, fn(spins)))
            den += float(w.sum())
        return num / den

    def correlation(self, *sites) -> float:
        """Exact <s(v1)...s(vn)>; repeated sites are allowed."""
        idx = [self.lattice.site_index(s) for s in sites]
        if len(idx) < 1:
            raise ValueError("need at least one site")

        def prod(spins):
            p = spins[:, idx[0]].astype(np.float64)
            for i in idx[1:]:
                p *= spins[:, i]
            return p

        return self.expectation(prod)

    def window_marginal(self, window: Sequence, pattern: Sequence[int]) -> float:
        """Exact probability that the configuration equals pattern on window."""
        idx = [self.lattice.site_index(s) for s in window]
        pattern = [int(p) for p in pattern]
        if len(idx) != len(pattern):
            raise ValueError(
                f"pattern length {len(pattern)} does not match window size {len(idx)}"
            )

        def match(spins):
            m = np.ones(len(spins), dtype=bool)
            for i, p in zip(idx, pattern):
                m &= spins[:, i] == p
            return m.astype(np.float64)

        return self.expectation(match)

    def config_probability(self, config: SpinConfig) -> float:
        return self.window_marginal(np.arange(self.lattice.n_sites), config.values)

    # -- pattern-level machinery -------------------------------------------------

    def _encode_digits(self, spins: np.ndarray, idx: Sequence[int]) -> np.ndarray:
        """Integer key of the restriction of each config to the given sites."""
        key = np.zeros(len(spins), dtype=np.int64)
        base = 1
        for i in idx:
            col = spins[:, i].astype(np.int64)
            digit = (1 - col) // 2 if self.params.q is None else col - 1
            key += digit * base
            base *= self.n_values
        return key

    def _decode_patterns(self, n_sites_in_window: int) -> np.ndarray:
        """(n_patterns, window) value matrix, pattern k at row k."""
        n_pat = self.n_values ** n_sites_in_window
        keys = np.arange(n_pat, dtype=np.int64)
        out = np.empty((n_pat, n_sites_in_window), dtype=np.int8)
        base = 1
        for j in range(n_sites_in_window):
            digit = (keys // base) % self.n_values
            out[:, j] = 1 - 2 * digit if self.params.q is None else digit + 1
            base *= self.n_values
        return out

    def window_pattern_probs(self, window: Sequence) -> tuple[np.ndarray, np.ndarray]:
        """(patterns, probs): value matrix and exact probability of each pattern."""
        idx = [self.lattice.site_index(s) for s in window]
        n_pat = self.n_values ** len(idx)
        if n_pat > 2 ** 24:
            raise ValueError(f"window of {len(idx)} sites has too many patterns")
        acc = np.zeros(n_pat)
        total = 0.0
        for spins, e_block in self.iter_blocks():
            w = self._weights(e_block)
            keys = self._encode_digits(spins, idx)
            acc += np.bincount(keys, weights=w, minlength=n_pat)
            total += w.sum()
        return self._decode_patterns(len(idx)), acc / total

    def centered_window(self, size) -> list[int]:
        """Linear indices of a centered box window of the given side(s)."""
        sizes = (size,) * self.lattice.d if isinstance(size, int) else tuple(size)
        if len(sizes) != self.lattice.d:
            raise ValueError("window size must give one side per axis")
        if any(s > e for s, e in zip(sizes, self.lattice.extents)):
            raise ValueError(f"window {sizes} does not fit in {self.lattice.extents}")
        starts = [(e - s) // 2 for s, e in zip(sizes, self.lattice.extents)]
        coords = np.stack(
            [c.ravel() for c in np.meshgrid(
                *[np.arange(st, st + s) for st, s in zip(starts, sizes)],
                indexing="ij")],
            axis=1,
        )
        return [self.lattice.site_index(tuple(c)) for c in coords]

    def verify_gibbs_equations(self, window, tolerance: float = 1e-10) -> GibbsCheck:
        """Check that same-frame patterns satisfy the detailed weight identity.

        For patterns agreeing outside the window interior, exp(+E_win/T) * Prob
        must be constant, where E_win counts the edges with at least one
        endpoint in the window interior (plus the interior field term).
        Returns the maximum log-scale violation over all frame groups.
        """
        if self.params.temperature == 0:
            raise ValueError("detailed-consistency check needs T > 0")
        idx = self.centered_window(window) if isinstance(window, (int, tuple)) \
            else [self.lattice.site_index(s) for s in window]
        window_set = set(idx)
        neigh, deg = self.lattice.neighbor_table()
        interior_local = [
            k for k, i in enumerate(idx)
            if all(int(n) in window_set for n in neigh[i, : deg[i]])
        ]
        interior_set = {idx[k] for k in interior_local}
        local = {site: k for k, site in enumerate(idx)}
        window_edges = [
            (local[a], local[b]) for a, b in self._edges
            if a in interior_set or b in interior_set
        ]

        patterns, probs = self.window_pattern_probs(idx)
        e_win = np.zeros(len(patterns))
        if self.params.q is None:
            for la, lb in window_edges:
                e_win -= patterns[:, la] * patterns[:, lb]
            if self.params.field != 0.0:
                e_win -= self.params.field * patterns[:, interior_local].sum(axis=1)
        else:
            for la, lb in window_edges:
                e_win += np.where(patterns[:, la] == patterns[:, lb], -1, 1)

        frame_local = [k for k in range(len(idx)) if k not in set(interior_local)]
        base = 1
        frame_keys = np.zeros(len(patterns), dtype=np.int64)
        for k in frame_local:
            digit = (1 - patterns[:, k].astype(np.int64)) // 2 \
                if self.params.q is None else patterns[:, k].astype(np.int64) - 1
            frame_keys += digit * base
            base *= self.n_values

        realized = probs > 0
        q_vals = np.log(probs[realized]) + self.params.beta * e_win[realized]
        keys = frame_keys[realized]
        order = np.argsort(keys, kind="stable")
        keys, q_vals = keys[order], q_vals[order]
        max_violation = 0.0
        n_groups = 0
        start = 0
        for end in range(1, len(keys) + 1):
            if end == len(keys) or keys[end] != keys[start]:
                group = q_vals[start:end]
                n_groups += 1
                max_violation = max(max_violation, float(group.max() - group.min()))
                start = end
        ok = max_violation <= tolerance
        check = GibbsCheck(max_violation, n_groups, int(realized.sum()), tuple(idx))
        if not ok and n_groups == 0:
            raise AssertionError("no pattern groups found")
        return check

    def verify_fkg(self, v, vp, slack: float = 1e-12) -> FkgCheck:
        """<s(v)><s(v')> <= <s(v)s(v')> for the plus-favoring measures."""
        if self.params.q is not None:
            raise ValueError("the pair inequality check is Ising-only")
        if self.params.field < 0:
            raise ValueError("needs h >= 0")
        if self.lattice.boundary.kind not in (FREE, ALL_PLUS, PERIODIC):
            raise ValueError(
                f"check restricted to free/all_plus/periodic boundaries, "
                f"got {self.lattice.boundary.kind}"
            )
        lhs = self.correlation(v) * self.correlation(vp)
        rhs = self.correlation(v, vp)
        return FkgCheck(lhs, rhs, lhs <= rhs + slack)

    def energy_histogram(self) -> EnergyHistogram:
        levels = np.array(list(self._levels.keys()))
        counts = np.array(list(self._levels.values()), dtype=np.int64)
        return EnergyHistogram(levels, counts, self.lattice.n_sites)


def enumerate_table(lattice: Lattice, params: ModelParams,
                    cap: int = DEFAULT_CAP) -> EnumerationTable:
    """Exhaustively enumerate the free sites of a lattice at the given params."""
    return EnumerationTable(lattice, params, cap=cap)


def odd_correlation_zero(lattice: Lattice, params: ModelParams, sites) -> float:
    """Exact value (0.0) of an odd spin product when global spin flip is a
    symmetry of the measure: Ising, h = 0, free or periodic boundary.

    The flip pairs configurations of equal weight and opposite product, so the
    average vanishes identically; no enumeration is needed.  Cross-checked
    against enumeration wherever that is feasible.
    """
    if params.q is not None or params.field != 0.0:
        raise ValueError("flip symmetry needs the Ising model at h = 0")
    if lattice.boundary.kind not in (FREE, PERIODIC):
        raise ValueError("flip symmetry needs a free or periodic boundary")
    if len(sites) % 2 != 1:
        raise ValueError(f"expected an odd number of sites, got {len(sites)}")
    for s in sites:
        lattice.site_index(s)
    return 0.0


def free_measure_vs_mixture(extents: Sequence[int], temperature: float, window,
                            cap: int = DEFAULT_CAP) -> MixtureReport:
    """Compare free-boundary window marginals against the equal mixture of
    all-plus and all-minus marginals on the same box.

    A finite-volume diagnostic: the discrepancy shrinks as T drops and the
    box grows, but no decay rate is asserted.
    """
    params = ModelParams(temperature)
    tables = {
        kind: enumerate_table(Lattice(extents, BoundaryCondition(kind)), params, cap=cap)
        for kind in (FREE, ALL_PLUS, ALL_MINUS)
    }
    t_free = tables[FREE]
    idx = t_free.centered_window(window) if isinstance(window, (int, tuple)) \
        else [t_free.lattice.site_index(s) for s in window]
    coords = [t_free.lattice.site_coords(i) for i in idx]
    _, p_free = t_free.window_pattern_probs(coords)
    _, p_plus = tables[ALL_PLUS].window_pattern_probs(coords)
    _, p_minus = tables[ALL_MINUS].window_pattern_probs(coords)
    gap = float(np.abs(p_free - 0.5 * (p_plus + p_minus)).max())
    return MixtureReport(gap, tuple(idx), temperature)
