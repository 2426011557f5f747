"""Geometry: sites, edges, boundaries, neighbor structure."""

import numpy as np
import pytest

from isinglab.lattice import (BoundaryCondition, Lattice, expected_edge_count)


def test_sites_row_major_1d():
    lat = Lattice((3,))
    assert [tuple(s) for s in lat.sites()] == [(0,), (1,), (2,)]


def test_site_counts():
    assert Lattice((2, 2)).n_sites == 4
    assert Lattice((3, 3, 3)).n_sites == 27
    assert Lattice((2, 3, 4)).n_sites == 24


def test_edge_counts_free():
    assert Lattice((2,)).n_edges == 1
    assert Lattice((2, 2)).n_edges == 4
    # formula: sum_i (e_i - 1) * prod_{j != i} e_j
    for extents in [(5,), (2, 3), (3, 3), (4, 4), (2, 3, 4), (3, 3, 3)]:
        lat = Lattice(extents)
        assert lat.n_edges == expected_edge_count(lat)


def test_edge_counts_periodic():
    lat = Lattice((4, 4), BoundaryCondition.periodic())
    assert lat.n_edges == 32 == expected_edge_count(lat)
    lat3 = Lattice((3, 3, 3), BoundaryCondition.periodic())
    assert lat3.n_edges == 3 * 27


def test_periodic_small_extent_rejected():
    with pytest.raises(ValueError, match="periodic"):
        Lattice((2, 4), BoundaryCondition.periodic())
    with pytest.raises(ValueError, match="periodic"):
        Lattice((2,), BoundaryCondition.periodic())


def test_boundary_sites():
    lat = Lattice((3, 3))
    b = lat.boundary_sites()
    assert len(b) == 8
    assert sum(lat.interior_mask) == 1
    assert lat.is_interior((1, 1))
    assert not lat.is_interior((0, 1))

    assert len(Lattice((5,)).boundary_sites()) == 2
    assert len(Lattice((3, 3, 3)).boundary_sites()) == 26


def test_boundary_interior_partition():
    for extents in [(4,), (3, 4), (3, 3, 3)]:
        lat = Lattice(extents)
        b = set(lat.boundary_sites().tolist())
        i = set(np.flatnonzero(lat.interior_mask).tolist())
        assert b | i == set(range(lat.n_sites))
        assert not b & i


def test_periodic_has_no_boundary():
    lat = Lattice((4, 4), BoundaryCondition.periodic())
    with pytest.raises(ValueError, match="no boundary"):
        lat.boundary_sites()
    assert lat.is_interior((0, 0))


def test_edges_no_duplicates_no_self_pairs():
    for bc in [BoundaryCondition.free(), BoundaryCondition.periodic()]:
        lat = Lattice((3, 4), bc)
        edges = [tuple(e) for e in lat.edges()]
        assert len(edges) == len(set(edges))
        assert all(a < b for a, b in edges)


def test_neighbor_symmetry_and_degree():
    lat = Lattice((4, 4))
    neigh, deg = lat.neighbor_table()
    for i in range(lat.n_sites):
        for j in neigh[i, : deg[i]]:
            assert i in neigh[j, : deg[j]]
    for i in np.flatnonzero(lat.interior_mask):
        assert deg[i] == 2 * lat.d

    per = Lattice((4, 4), BoundaryCondition.periodic())
    _, pdeg = per.neighbor_table()
    assert np.all(pdeg == 2 * per.d)


def test_free_sites_depend_on_boundary():
    assert len(Lattice((3, 3)).free_sites) == 9
    assert len(Lattice((3, 3), BoundaryCondition.all_plus()).free_sites) == 1
    assert len(Lattice((4, 4), BoundaryCondition.periodic()).free_sites) == 16


def test_dobrushin_frozen_pattern():
    lat = Lattice((4, 4), BoundaryCondition.dobrushin())
    assert lat.wall_height == 1.5
    frozen = lat.frozen_values
    for i in lat.boundary_sites():
        x, y = lat.site_coords(i)
        assert frozen[i] == (1 if y < 1.5 else -1)


def test_dobrushin_1d_endpoints():
    lat = Lattice((5,), BoundaryCondition.dobrushin())
    frozen = lat.frozen_values
    assert frozen[0] == 1 and frozen[4] == -1


def test_dobrushin_custom_wall_validation():
    Lattice((4, 4), BoundaryCondition.dobrushin(0.5))
    with pytest.raises(ValueError, match="half-integer"):
        BoundaryCondition.dobrushin(2.0)
    with pytest.raises(ValueError, match="separate"):
        Lattice((4, 4), BoundaryCondition.dobrushin(3.5)).wall_height


def test_fixed_pattern_must_cover_boundary():
    lat_sites = Lattice((3,)).boundary_sites()
    assert list(lat_sites) == [0, 2]
    Lattice((3,), BoundaryCondition.fixed({(0,): 1, (2,): -1}))
    with pytest.raises(ValueError, match="boundary"):
        Lattice((3,), BoundaryCondition.fixed({(0,): 1}))
    with pytest.raises(ValueError, match="boundary"):
        Lattice((3,), BoundaryCondition.fixed({(0,): 1, (1,): 1, (2,): -1}))


def test_json_round_trip():
    for lat in [
        Lattice((3, 4)),
        Lattice((4, 4), BoundaryCondition.periodic()),
        Lattice((4, 4), BoundaryCondition.dobrushin(2.5)),
        Lattice((3,), BoundaryCondition.fixed({(0,): 1, (2,): -1})),
    ]:
        again = Lattice.from_dict(lat.to_dict())
        assert again.to_dict() == lat.to_dict()
        assert np.array_equal(again.edges(), lat.edges())


def test_json_d_consistency():
    with pytest.raises(ValueError, match="inconsistent"):
        Lattice.from_dict({"d": 3, "extents": [4, 4], "boundary": {"kind": "free"}})


def test_higher_dimensions_permitted():
    lat = Lattice((2, 2, 2, 2))
    assert lat.n_sites == 16
    assert lat.n_edges == expected_edge_count(lat)
