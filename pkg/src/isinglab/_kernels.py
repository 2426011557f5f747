"""Numba hot loops: Metropolis sweeps and Wolff cluster updates.

All randomness comes from an explicit xoshiro256++ state (4 uint64 words)
threaded through every kernel call, so streams are bit-reproducible given a
seed and never shared between chains.  Kernels release the GIL; parallelism
happens across chains, never inside one.

Spins are int8 over all sites; `neigh`/`ndeg` is the padded neighbor table
from the lattice; `free_sites` lists the mutable sites in row-major order,
which is also the fixed scan order of a sweep.
"""

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _rotl(x, k):
    return np.uint64((x << np.uint64(k)) | (x >> np.uint64(64 - k)))


@njit(cache=True, inline="always")
def _next_double(state):
    """xoshiro256++ step -> float64 uniform in [0, 1)."""
    res = np.uint64(_rotl(state[0] + state[3], 23) + state[0])
    t = np.uint64(state[1] << np.uint64(17))
    state[2] ^= state[0]
    state[3] ^= state[1]
    state[1] ^= state[2]
    state[0] ^= state[3]
    state[2] ^= t
    state[3] = _rotl(state[3], 45)
    return float(res >> np.uint64(11)) * 1.1102230246251565e-16  # 2**-53


@njit(cache=True, nogil=True)
def metropolis_ising(spins, neigh, ndeg, free_sites, beta, h, n_sweeps, state, snaps):
    """Sequential-scan Metropolis sweeps; returns (edge energy, magnetization)
    deltas accumulated over all accepted flips."""
    d_edge = np.int64(0)
    d_mag = np.int64(0)
    record = snaps.shape[0] == n_sweeps
    for sweep in range(n_sweeps):
        for k in range(free_sites.shape[0]):
            v = free_sites[k]
            s = spins[v]
            nb = 0
            for j in range(ndeg[v]):
                nb += spins[neigh[v, j]]
            de_edge = 2 * s * nb
            de = float(de_edge) + 2.0 * h * float(s)
            u = _next_double(state)
            if de <= 0.0 or u < np.exp(-beta * de):
                spins[v] = -s
                d_edge += de_edge
                d_mag += -2 * s
        if record:
            for i in range(spins.shape[0]):
                snaps[sweep, i] = spins[i]
    return d_edge, d_mag


@njit(cache=True, nogil=True)
def metropolis_potts(spins, neigh, ndeg, free_sites, q, beta, n_sweeps, state, snaps):
    """Metropolis for q-state spins; proposals are uniform over the other
    q-1 states.  Returns the accumulated edge-energy delta."""
    d_edge = np.int64(0)
    record = snaps.shape[0] == n_sweeps
    for sweep in range(n_sweeps):
        for k in range(free_sites.shape[0]):
            v = free_sites[k]
            s = spins[v]
            r = int(_next_double(state) * (q - 1))
            if r >= q - 1:
                r = q - 2
            cand = r + 1 if r + 1 < s else r + 2
            same_old = 0
            same_new = 0
            for j in range(ndeg[v]):
                w = spins[neigh[v, j]]
                if w == s:
                    same_old += 1
                elif w == cand:
                    same_new += 1
            de = 2 * (same_old - same_new)
            u = _next_double(state)
            if de <= 0 or u < np.exp(-beta * de):
                spins[v] = cand
                d_edge += de
        if record:
            for i in range(spins.shape[0]):
                snaps[sweep, i] = spins[i]
    return d_edge


@njit(cache=True, nogil=True)
def wolff_ising(spins, neigh, ndeg, p_add, n_updates, state, mags, snaps):
    """Single-cluster updates: grow from a uniform seed site, adding aligned
    neighbors with probability p_add, then flip the cluster.

    mags[k] receives the total spin sum after update k;  returns the
    edge-energy delta (flips are applied one by one so deltas telescope).
    """
    n = spins.shape[0]
    stack = np.empty(n, dtype=np.int32)
    members = np.empty(n, dtype=np.int32)
    in_cluster = np.zeros(n, dtype=np.bool_)
    mag = np.int64(0)
    for i in range(n):
        mag += spins[i]
    d_edge = np.int64(0)
    record = snaps.shape[0] == n_updates
    for upd in range(n_updates):
        seed_site = int(_next_double(state) * n)
        if seed_site >= n:
            seed_site = n - 1
        s0 = spins[seed_site]
        top = 0
        count = 0
        stack[top] = seed_site
        top += 1
        in_cluster[seed_site] = True
        members[count] = seed_site
        count += 1
        while top > 0:
            top -= 1
            v = stack[top]
            for j in range(ndeg[v]):
                w = neigh[v, j]
                if not in_cluster[w] and spins[w] == s0:
                    if _next_double(state) < p_add:
                        in_cluster[w] = True
                        stack[top] = w
                        top += 1
                        members[count] = w
                        count += 1
        for idx in range(count):
            v = members[idx]
            nb = 0
            for j in range(ndeg[v]):
                nb += spins[neigh[v, j]]
            d_edge += 2 * spins[v] * nb
            spins[v] = -spins[v]
            in_cluster[v] = False
        mag += np.int64(-2) * s0 * count
        mags[upd] = mag
        if record:
            for i in range(n):
                snaps[upd, i] = spins[i]
    return d_edge
