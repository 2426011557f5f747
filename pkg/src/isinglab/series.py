"""Covariance, cumulants, and the first-order high-temperature correction.

Random variables here are finite: a value on every atom of a finite measure,
usually the configurations of an enumeration table.  Joint cumulants follow
the set-partition expansion (the coefficient extraction of the exponential
generating identity ln<exp(sum f_i)> = sum of cumulants), capped at order 4.

The first-order temperature correction of an observable is its mean plus
dbeta times the summed covariance with the edge products; the sign is pinned
by matching the exact derivative d<f>/dbeta, which tests verify by Richardson
extrapolation against enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exact import EnumerationTable

MAX_ORDER = 4


@dataclass(frozen=True)
class FiniteRandomVariable:
    """A real value on each atom of a shared finite probability vector."""

    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        if self.values.shape != self.probs.shape:
            raise ValueError("values and probabilities must align")

    def mean(self) -> float:
        return float(np.dot(self.probs, self.values))

    def _check_measure(self, other: "FiniteRandomVariable"):
        if self.probs is not other.probs and not np.array_equal(self.probs, other.probs):
            raise ValueError("variables live on different measures")

    def __mul__(self, other):
        if isinstance(other, FiniteRandomVariable):
            self._check_measure(other)
            return FiniteRandomVariable(self.values * other.values, self.probs)
        return FiniteRandomVariable(self.values * float(other), self.probs)

    __rmul__ = __mul__

    def __add__(self, other):
        if isinstance(other, FiniteRandomVariable):
            self._check_measure(other)
            return FiniteRandomVariable(self.values + other.values, self.probs)
        return FiniteRandomVariable(self.values + float(other), self.probs)

    __radd__ = __add__

    def __neg__(self):
        return FiniteRandomVariable(-self.values, self.probs)

    def __sub__(self, other):
        return self + (-other)


def _table_probs(table: EnumerationTable) -> np.ndarray:
    blocks = []
    total = 0.0
    for _, e_block in table.iter_blocks():
        w = table._weights(e_block)
        blocks.append(w)
        total += w.sum()
    return np.concatenate(blocks) / total


def variable_from_function(table: EnumerationTable, fn,
                           probs: np.ndarray | None = None) -> FiniteRandomVariable:
    """Evaluate fn(spins_block) -> per-config values against the table measure."""
    probs = _table_probs(table) if probs is None else probs
    vals = np.concatenate([np.asarray(fn(spins), dtype=float)
                           for spins, _ in table.iter_blocks()])
    return FiniteRandomVariable(vals, probs)


def spin_variable(table: EnumerationTable, site,
                  probs: np.ndarray | None = None) -> FiniteRandomVariable:
    i = table.lattice.site_index(site)
    return variable_from_function(table, lambda s: s[:, i], probs)


def spin_product_variable(table: EnumerationTable, sites,
                          probs: np.ndarray | None = None) -> FiniteRandomVariable:
    idx = [table.lattice.site_index(s) for s in sites]

    def fn(spins):
        p = spins[:, idx[0]].astype(float)
        for i in idx[1:]:
            p *= spins[:, i]
        return p

    return variable_from_function(table, fn, probs)


def covariance(f1: FiniteRandomVariable, f2: FiniteRandomVariable) -> float:
    """<f1 f2> - <f1><f2>."""
    f1._check_measure(f2)
    return (f1 * f2).mean() - f1.mean() * f2.mean()


def _set_partitions(items: list[int]) -> Iterable[list[list[int]]]:
    if len(items) == 1:
        yield [items]
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def cumulant(*fs: FiniteRandomVariable) -> float:
    """Joint cumulant of 1 to 4 variables via the set-partition expansion.

    Order 2 is the covariance; order 3 expands to
    <fgh> - <fg><h> - <fh><g> - <gh><f> + 2<f><g><h>.
    """
    n = len(fs)
    if not 1 <= n <= MAX_ORDER:
        raise ValueError(f"cumulants implemented for orders 1..{MAX_ORDER}, got {n}")
    for f in fs[1:]:
        fs[0]._check_measure(f)
    total = 0.0
    for partition in _set_partitions(list(range(n))):
        k = len(partition)
        term = (-1.0) ** (k - 1) * math.factorial(k - 1)
        for block in partition:
            prod = fs[block[0]]
            for i in block[1:]:
                prod = prod * fs[i]
            term *= prod.mean()
        total += term
    return total


def log_moment_generating(fs: Sequence[FiniteRandomVariable], ts) -> float:
    """ln <exp(sum t_i f_i)>, guarded against overflow."""
    ts = np.broadcast_to(np.asarray(ts, dtype=float), (len(fs),))
    expo = sum((float(t) * f for t, f in zip(ts, fs)),
               FiniteRandomVariable(np.zeros_like(fs[0].values), fs[0].probs))
    m = expo.values.max()
    if m > 700:
        raise ValueError("exponent too large; rescale t")
    return float(m + np.log(np.dot(expo.probs, np.exp(expo.values - m))))


def cumulant_series(fs: Sequence[FiniteRandomVariable], ts,
                    order: int = MAX_ORDER) -> float:
    """Truncated cumulant expansion of ln <exp(sum t_i f_i)> through the order."""
    if order > MAX_ORDER:
        raise ValueError(f"series truncation capped at order {MAX_ORDER}")
    ts = np.broadcast_to(np.asarray(ts, dtype=float), (len(fs),))
    m = len(fs)
    cache: dict[tuple[int, ...], float] = {}

    def kappa(indices: tuple[int, ...]) -> float:
        key = tuple(sorted(indices))
        if key not in cache:
            cache[key] = cumulant(*[fs[i] for i in key])
        return cache[key]

    total = 0.0
    indices = [()]
    for n in range(1, order + 1):
        indices = [tup + (i,) for tup in indices for i in range(m)]
        coeff = 1.0 / math.factorial(n)
        for tup in indices:
            t_prod = 1.0
            for i in tup:
                t_prod *= ts[i]
            total += coeff * t_prod * kappa(tup)
    return total


def verify_generating_identity(fs: Sequence[FiniteRandomVariable], ts,
                               order: int = MAX_ORDER) -> float:
    """|ln<exp(sum t f)> - truncated cumulant series|.

    The residual is O(t^(order+1)): halving every t must shrink it by at
    least 2^order, which is how tests pin the truncation order.
    """
    if len(fs) > 3:
        raise ValueError("keep the variable set small (<= 3)")
    return abs(log_moment_generating(fs, ts) - cumulant_series(fs, ts, order))


def first_order_correction(observable: FiniteRandomVariable,
                           edge_sets: Sequence[tuple],
                           table: EnumerationTable,
                           dbeta: float) -> float:
    """First-order move of <observable> from beta0 to beta0 + dbeta.

    Adds dbeta times the covariance of the observable with each edge's spin
    product, all evaluated at the table's own temperature (beta0); with the
    full edge set this is the exact derivative d<f>/dbeta to first order.
    """
    probs = observable.probs
    correction = 0.0
    for a, b in edge_sets:
        correction += covariance(observable, spin_product_variable(table, (a, b), probs))
    return observable.mean() + dbeta * correction
