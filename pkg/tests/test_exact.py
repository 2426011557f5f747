"""Enumeration oracle: partition function, marginals, correlations, and the
consistency checks (detailed weights, pair inequality, energy/entropy)."""

import math

import numpy as np
import pytest

from isinglab.exact import (EnumerationTable, enumerate_table,
                            free_measure_vs_mixture, odd_correlation_zero)
from isinglab.lattice import BoundaryCondition, Lattice
from isinglab.model import ModelParams, SpinConfig

import oracles


def test_single_free_site():
    lat = Lattice((1,))
    table = enumerate_table(lat, ModelParams(1.0))
    assert table.n_configs == 2
    assert table.log_z == pytest.approx(math.log(2.0), abs=1e-14)
    assert table.window_marginal([(0,)], [1]) == pytest.approx(0.5, abs=1e-14)
    assert table.window_marginal([(0,)], [-1]) == pytest.approx(0.5, abs=1e-14)


def test_two_site_chain_partition_function():
    beta = 0.8
    table = enumerate_table(Lattice((2,)), ModelParams(1.0 / beta))
    expected = 2 * math.exp(beta) + 2 * math.exp(-beta)
    assert table.log_z == pytest.approx(math.log(expected), rel=1e-14)


def test_2x2_free_energy_levels_and_log_z():
    beta = 1.0
    table = enumerate_table(Lattice((2, 2)), ModelParams(1.0 / beta))
    assert table.energy_levels == {-4: 2, 0: 12, 4: 2}
    expected = 2 * math.exp(4 * beta) + 12 + 2 * math.exp(-4 * beta)
    assert table.log_z == pytest.approx(math.log(expected), rel=1e-14)


def test_levels_match_brute_force_and_gray_code():
    cases = [
        (Lattice((3, 3)), ModelParams(2.0)),
        (Lattice((4, 3), BoundaryCondition.periodic()), ModelParams(1.3)),
        (Lattice((4, 4), BoundaryCondition.all_plus()), ModelParams(0.7)),
        (Lattice((4, 4), BoundaryCondition.dobrushin()), ModelParams(1.0)),
        (Lattice((8,), BoundaryCondition.fixed({(0,): -1, (7,): -1})),
         ModelParams(2.5)),
    ]
    for lat, params in cases:
        table = enumerate_table(lat, params)
        assert table.energy_levels == oracles.level_counts(lat)
        assert table.energy_levels == oracles.gray_code_levels(lat, params)
        assert table.log_z == pytest.approx(oracles.log_partition(lat, params),
                                            rel=1e-12)


def test_levels_match_brute_force_potts():
    lat = Lattice((2, 3))
    params = ModelParams(1.5, q=3)
    table = enumerate_table(lat, params)
    assert table.energy_levels == oracles.level_counts(lat, q=3)
    assert sum(table.energy_levels.values()) == 3 ** 6


def test_degeneracies_all_even_ising_free():
    # global flip pairs distinct configurations, so every count is even
    for lat in [Lattice((3, 3)), Lattice((3, 4), BoundaryCondition.periodic())]:
        table = enumerate_table(lat, ModelParams(1.0))
        assert all(c % 2 == 0 for c in table.energy_levels.values())


def test_field_enumeration_matches_brute_force():
    lat = Lattice((3, 3))
    params = ModelParams(1.2, field=0.4)
    table = enumerate_table(lat, params)
    got = table.correlation((1, 1))
    want = oracles.expectation(lat, params, lambda v: v[lat.site_index((1, 1))])
    assert got == pytest.approx(want, rel=1e-12)


def test_cap_rejection_reports_required_count():
    lat = Lattice((6, 6))
    with pytest.raises(ValueError, match=str(2 ** 36)):
        enumerate_table(lat, ModelParams(1.0), cap=2 ** 20)


def test_normalization():
    for t in (0.5, 2.269185, 10.0, math.inf):
        table = enumerate_table(Lattice((3, 3)), ModelParams(t))
        assert abs(table.normalization_check() - 1.0) <= 1e-12


def test_window_marginals_sum_to_one():
    table = enumerate_table(Lattice((3, 3)), ModelParams(1.7))
    window = [(0, 0), (1, 1), (2, 1)]
    patterns, probs = table.window_pattern_probs(window)
    assert len(patterns) == 8
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)
    # single marginals agree with the pattern table
    p = table.window_marginal(window, patterns[3])
    assert p == pytest.approx(probs[3], abs=1e-14)


def test_full_window_marginal_is_config_probability():
    beta = 0.9
    lat = Lattice((2, 2))
    table = enumerate_table(lat, ModelParams(1.0 / beta))
    cfg = SpinConfig(lat, np.array([1, 1, 1, -1], dtype=np.int8))
    z = 2 * math.exp(4 * beta) + 12 + 2 * math.exp(-4 * beta)
    assert table.config_probability(cfg) == pytest.approx(1.0 / z, rel=1e-12)


def test_center_marginal_direct_vs_complement():
    lat = Lattice((3, 3), BoundaryCondition.all_plus())
    table = enumerate_table(lat, ModelParams(1.0))
    p_plus = table.window_marginal([(1, 1)], [1])
    p_minus = table.window_marginal([(1, 1)], [-1])
    assert p_plus + p_minus == pytest.approx(1.0, abs=1e-12)
    want = oracles.expectation(
        lat, ModelParams(1.0),
        lambda v: 1.0 if v[lat.site_index((1, 1))] == 1 else 0.0)
    assert p_plus == pytest.approx(want, rel=1e-12)


def test_odd_correlations_vanish_free_boundary():
    table = enumerate_table(Lattice((3, 3)), ModelParams(1.1))
    assert abs(table.correlation((1, 1))) < 1e-12
    assert abs(table.correlation((0, 0), (1, 1), (2, 2))) < 1e-12


def test_odd_correlation_zero_shortcut_agrees_with_enumeration():
    lat = Lattice((3, 3))
    params = ModelParams(0.5)
    assert odd_correlation_zero(lat, params, [(1, 1)]) == 0.0
    table = enumerate_table(lat, params)
    assert table.correlation((1, 1)) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError, match="odd"):
        odd_correlation_zero(lat, params, [(0, 0), (1, 1)])
    with pytest.raises(ValueError, match="boundary"):
        odd_correlation_zero(Lattice((3, 3), BoundaryCondition.all_plus()),
                             params, [(1, 1)])
    with pytest.raises(ValueError, match="h = 0"):
        odd_correlation_zero(lat, ModelParams(1.0, field=0.1), [(1, 1)])


def test_adjacent_pair_correlation_is_tanh_beta():
    for n in (2, 3, 6, 9):
        for beta in (0.1, 0.3, 1.0):
            table = enumerate_table(Lattice((n,)), ModelParams(1.0 / beta))
            got = table.correlation((0,), (1,))
            assert got == pytest.approx(math.tanh(beta), rel=1e-12)


def test_tanh_series_matches_small_beta():
    beta = 0.05
    table = enumerate_table(Lattice((5,)), ModelParams(1.0 / beta))
    series = beta - beta ** 3 / 3 + 2 * beta ** 5 / 15
    assert table.correlation((0,), (1,)) == pytest.approx(series, abs=1e-9)


def test_repeated_sites_collapse():
    table = enumerate_table(Lattice((3, 3)), ModelParams(0.8))
    assert table.correlation((1, 1), (1, 1)) == pytest.approx(1.0, abs=1e-12)
    pair = table.correlation((0, 0), (0, 1))
    quad = table.correlation((0, 0), (0, 1), (2, 2), (2, 2))
    assert quad == pytest.approx(pair, abs=1e-12)


def test_correlation_matches_brute_force_mixed_boundaries():
    for bc in [BoundaryCondition.free(), BoundaryCondition.all_plus(),
               BoundaryCondition.dobrushin()]:
        lat = Lattice((3, 3), bc)
        params = ModelParams(1.6)
        table = enumerate_table(lat, params)
        a, b = lat.site_index((1, 1)), lat.site_index((0, 1))
        want = oracles.expectation(lat, params,
                                   lambda v: float(v[a]) * float(v[b]))
        assert table.correlation(a, b) == pytest.approx(want, rel=1e-12)


def test_shift_invariance_of_marginals():
    # probabilities computed against energies shifted by a constant agree
    lat = Lattice((3, 3))
    params = ModelParams(1.4)
    table = enumerate_table(lat, params)
    shift = 17.3
    site = lat.site_index((1, 2))

    num = 0.0
    den = 0.0
    for values in oracles.iter_configs(lat):
        w = math.exp(-(oracles.edge_energy(lat, values) + shift) / params.temperature
                     + shift / params.temperature + 30.0 / params.temperature)
        num += w * (values[site] == 1)
        den += w
    assert table.window_marginal([site], [1]) == pytest.approx(num / den, rel=1e-12)


# -- detailed-consistency (Gibbs equation) checks --------------------------------


def test_gibbs_equations_hold_at_t2():
    for bc in [BoundaryCondition.free(), BoundaryCondition.all_plus()]:
        table = enumerate_table(Lattice((3, 3), bc), ModelParams(2.0))
        check = table.verify_gibbs_equations(3)
        assert check.n_groups > 0
        assert check.max_violation < 1e-10


def test_gibbs_equations_hold_with_field():
    table = enumerate_table(Lattice((3, 3)), ModelParams(1.5, field=0.25))
    assert table.verify_gibbs_equations(3).max_violation < 1e-10


def test_gibbs_equations_at_t_inf_equiprobable():
    table = enumerate_table(Lattice((3, 3)), ModelParams(math.inf))
    check = table.verify_gibbs_equations(3)
    assert check.max_violation < 1e-12
    # all 2^9 patterns realized, each with probability 2^-9
    _, probs = table.window_pattern_probs([(i, j) for i in range(3) for j in range(3)])
    assert np.allclose(probs, 1 / 512, atol=1e-15)


def test_center_flip_probability_ratio():
    # the 3x3 pattern pair differing by a +4 center flip: ratio exp(4/T)
    t = 1.3
    lat = Lattice((3, 3))
    table = enumerate_table(lat, ModelParams(t))
    window = [(i, j) for i in range(3) for j in range(3)]
    pi_plus = [1, -1, 1, 1, 1, -1, -1, -1, 1]
    pi_minus = list(pi_plus)
    pi_minus[4] = -1
    p_plus = table.window_marginal(window, pi_plus)
    p_minus = table.window_marginal(window, pi_minus)
    assert p_minus / p_plus == pytest.approx(math.exp(4.0 / t), rel=1e-12)


def test_gibbs_check_rejects_t_zero():
    table = enumerate_table(Lattice((2, 2)), ModelParams(0.0))
    with pytest.raises(ValueError, match="T > 0"):
        table.verify_gibbs_equations(2)


# -- pair inequality --------------------------------------------------------------


def test_fkg_free_boundary_lhs_zero():
    table = enumerate_table(Lattice((3, 3)), ModelParams(1.0))
    res = table.verify_fkg((0, 0), (2, 2))
    assert res.lhs == pytest.approx(0.0, abs=1e-12)
    assert res.holds


def test_fkg_all_plus_adjacent_pair():
    table = enumerate_table(Lattice((3, 3), BoundaryCondition.all_plus()),
                            ModelParams(2.0))
    res = table.verify_fkg((1, 1), (0, 1))
    assert res.holds
    assert res.lhs <= res.rhs + 1e-12


def test_fkg_exhaustive_3x3():
    for bc in [BoundaryCondition.free(), BoundaryCondition.all_plus()]:
        for t in (0.5, 2.27, 10.0):
            lat = Lattice((3, 3), bc)
            table = enumerate_table(lat, ModelParams(t))
            for a in range(lat.n_sites):
                for b in range(a, lat.n_sites):
                    assert table.verify_fkg(a, b).holds


def test_fkg_with_positive_field():
    table = enumerate_table(Lattice((3, 3)), ModelParams(1.5, field=0.3))
    assert table.verify_fkg((0, 0), (1, 1)).holds


def test_fkg_preconditions():
    table = enumerate_table(Lattice((3, 3)), ModelParams(1.0, field=-0.2))
    with pytest.raises(ValueError, match="h >= 0"):
        table.verify_fkg((0, 0), (1, 1))
    dob = enumerate_table(Lattice((4, 4), BoundaryCondition.dobrushin()),
                          ModelParams(1.0))
    with pytest.raises(ValueError, match="boundaries"):
        dob.verify_fkg((1, 1), (2, 2))


# -- histogram / free energy -------------------------------------------------------


def test_histogram_counts_and_entropy():
    table = enumerate_table(Lattice((2, 2)), ModelParams(1.0))
    hist = table.energy_histogram()
    assert hist.levels.tolist() == [-4, 0, 4]
    assert hist.counts.tolist() == [2, 12, 2]
    assert hist.entropy()[0] == pytest.approx(math.log(2) / 4)


def test_low_t_argmax_is_minimum_energy():
    table = enumerate_table(Lattice((3, 3)), ModelParams(0.05))
    hist = table.energy_histogram()
    assert hist.most_probable_level(0.05) == min(table.energy_levels)
    assert hist.best_free_energy_level(1e-9) == min(table.energy_levels)


def test_t_inf_argmax_is_max_degeneracy():
    table = enumerate_table(Lattice((3, 3)), ModelParams(math.inf))
    hist = table.energy_histogram()
    counts = table.energy_levels
    best = max(counts, key=lambda e: (counts[e], -e))
    assert hist.most_probable_level(math.inf) == best
    assert hist.best_free_energy_level(math.inf) == best


def test_probability_argmax_equals_free_energy_argmax():
    table = enumerate_table(Lattice((4, 4)), ModelParams(2.27))
    hist = table.energy_histogram()
    for t in (0.5, 1.0, 2.27, 5.0, 50.0):
        assert hist.most_probable_level(t) == hist.best_free_energy_level(t)


# -- zero temperature ---------------------------------------------------------------


def test_t_zero_uniform_on_minimizers():
    table = enumerate_table(Lattice((2,)), ModelParams(0.0))
    # two aligned ground states, each probability 1/2
    assert table.window_marginal([(0,), (1,)], [1, 1]) == pytest.approx(0.5)
    assert table.window_marginal([(0,), (1,)], [-1, -1]) == pytest.approx(0.5)
    assert table.window_marginal([(0,), (1,)], [1, -1]) == 0.0
    assert table.log_z == pytest.approx(math.log(2))


def test_t_zero_dobrushin_minimizers_have_minimal_area():
    from isinglab.clusters import area
    lat = Lattice((4, 4), BoundaryCondition.dobrushin())
    table = enumerate_table(lat, ModelParams(0.0))
    spins, energies = next(iter(table.iter_blocks()))
    minimal = spins[energies == table.min_energy]
    areas = {area(SpinConfig(lat, row)) for row in minimal}
    assert areas == {4}  # one crossing per column


# -- free measure vs plus/minus mixture ----------------------------------------------


def test_single_site_free_marginal_equals_mixture():
    report = free_measure_vs_mixture((3, 3), 1.0, [(1, 1)])
    assert report.max_abs_discrepancy < 1e-12


def test_even_pair_free_vs_plus_within_tolerance():
    t = 0.5
    free_table = enumerate_table(Lattice((4, 4)), ModelParams(t))
    plus_table = enumerate_table(Lattice((4, 4), BoundaryCondition.all_plus()),
                                 ModelParams(t))
    pairs = [((1, 1), (1, 2)), ((1, 1), (2, 1)), ((2, 2), (1, 2))]
    for a, b in pairs:
        gap = abs(free_table.correlation(a, b) - plus_table.correlation(a, b))
        assert gap < 0.05


def test_mixture_window_discrepancy_small_at_low_t():
    report = free_measure_vs_mixture((4, 4), 0.5, [(1, 1), (2, 2)])
    assert report.max_abs_discrepancy < 0.05


def test_plus_boundary_dominates_free_magnetization():
    # sandwich property: all-plus magnetization >= free (which is 0)
    for t in (0.5, 2.27, 10.0):
        plus = enumerate_table(Lattice((3, 3), BoundaryCondition.all_plus()),
                               ModelParams(t))
        free = enumerate_table(Lattice((3, 3)), ModelParams(t))
        assert plus.correlation((1, 1)) >= free.correlation((1, 1)) - 1e-12
