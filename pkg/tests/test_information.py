"""Entanglement entropy, screen statistics, and the mean information bound."""

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import xlogy

import sgcoarse as sg


def test_entropy_endpoints():
    assert sg.entropy_from_overlap(1.0) == 0.0
    assert sg.entropy_from_overlap(0.0) == pytest.approx(sg.LN2, rel=1e-15)
    with pytest.raises(ValueError):
        sg.entropy_from_overlap(1.0 + 1e-9)
    with pytest.raises(ValueError):
        sg.entropy_from_overlap(-1e-9)


@given(pair=st.tuples(st.floats(min_value=0.0, max_value=1.0),
                      st.floats(min_value=0.0, max_value=1.0)))
def test_entropy_is_bounded_and_monotone(pair):
    lo, hi = sorted(pair)
    s_lo, s_hi = sg.entropy_from_overlap(lo), sg.entropy_from_overlap(hi)
    assert 0.0 <= s_hi <= s_lo <= sg.LN2


def test_overlap_decay_values(scales):
    assert sg.overlap_decay(0.0, scales) == 1.0
    assert sg.overlap_decay(scales.tau3, scales) == pytest.approx(
        0.3678794345613942, rel=1e-12)
    with pytest.raises(ValueError):
        sg.overlap_decay(-1e-9, scales)


def test_entanglement_entropy_anchor(scales):
    overlap, entropy = sg.entanglement_entropy(scales.tau3, scales)
    assert overlap == pytest.approx(0.3678794345613942, rel=1e-12)
    assert entropy == pytest.approx(0.6238640666912163, rel=1e-12)


def test_entanglement_saturates(scales):
    _, entropy = sg.entanglement_entropy(5.0 * scales.tau3, scales)
    assert sg.LN2 - entropy <= 1e-12


def test_entanglement_series_consistency(scales):
    times = np.linspace(0.0, 1e-6, 7)
    series = sg.entanglement_series(scales, times)
    assert series.S_ent[0] == 0.0
    np.testing.assert_array_equal(series.times, times)
    np.testing.assert_allclose(series.S_ent_bits, series.S_ent / sg.LN2,
                               rtol=0, atol=0)
    for t, overlap, entropy in zip(times, series.A_values, series.S_ent):
        a_pt, s_pt = sg.entanglement_entropy(t, scales)
        assert overlap == pytest.approx(a_pt, rel=1e-14, abs=1e-300)
        assert entropy == pytest.approx(s_pt, rel=1e-14, abs=1e-300)
    with pytest.raises(ValueError):
        sg.EntanglementSeries(np.zeros(3), np.zeros(3), np.zeros(4))


def test_reduced_spin_density_structure(state_early, silver):
    rho = sg.reduced_spin_density(state_early)
    assert rho.shape == (2, 2)
    assert np.trace(rho) == pytest.approx(1.0, abs=1e-12)
    assert rho[0, 0] == pytest.approx(abs(silver.c_plus) ** 2, abs=1e-12)
    np.testing.assert_allclose(rho, rho.conj().T, rtol=0, atol=1e-12)


def test_spin_entropy_consistent_with_overlap(silver, scales):
    # the 2x2 eigenvalues are (1 +- |<phi_-|phi_+>|)/2, so the von Neumann
    # entropy must agree with the scalar overlap formula
    for t in (scales.tau3, 1e-5):
        state = sg.evolve_in_field(silver, t)
        vn = sg.von_neumann_entropy(sg.reduced_spin_density(state))
        ref = sg.entropy_from_overlap(abs(state.branch_overlap()))
        assert vn == pytest.approx(ref, abs=1e-9)


def test_von_neumann_entropy_basics():
    assert sg.von_neumann_entropy(np.diag([1.0, 0.0])) == pytest.approx(0.0, abs=1e-15)
    assert sg.von_neumann_entropy(np.eye(2) / 2.0) == pytest.approx(sg.LN2, rel=1e-15)
    with pytest.raises(ValueError):
        sg.von_neumann_entropy(np.diag([2.0, -1.0]))


def test_screen_before_separation(state_t0, silver):
    screen = sg.screen_distribution(state_t0, 0.5 * silver.sigma)
    mid = int(np.argmin(np.abs(screen.X)))
    assert screen.X[mid] == 0.0  # center alignment puts a pixel center at x=0
    assert screen.q_plus[mid] == pytest.approx(0.5, abs=1e-12)
    assert abs(screen.I[mid]) <= 1e-12
    assert screen.total() == pytest.approx(1.0, abs=1e-8)
    assert screen.captured == pytest.approx(1.0, abs=1e-8)


def test_screen_edge_alignment(state_t0, silver):
    screen = sg.screen_distribution(state_t0, 0.5 * silver.sigma, alignment="edge")
    # every pixel center sits half a width off the pixel-edge lattice
    frac = np.abs(screen.X / screen.Delta - 0.5) % 1.0
    assert float(np.max(np.minimum(frac, 1.0 - frac))) <= 1e-9
    with pytest.raises(ValueError):
        sg.screen_distribution(state_t0, 0.5 * silver.sigma, alignment="corner")


def test_screen_row_identities(state_late, silver):
    screen = sg.screen_distribution(state_late, silver.sigma)
    assert float(np.max(np.abs(screen.q_plus + screen.q_minus - 1.0))) <= 1e-12
    binary = -(xlogy(screen.q_plus, screen.q_plus)
               + xlogy(1.0 - screen.q_plus, 1.0 - screen.q_plus))
    assert float(np.max(np.abs(screen.S - binary))) <= 1e-12
    assert float(np.max(np.abs(screen.I - (sg.LN2 - screen.S)))) <= 1e-12
    assert np.all(screen.P_plus >= 0.0) and np.all(screen.P_minus >= 0.0)


def test_screen_tails_identify_the_branch(state_late):
    screen = sg.screen_distribution(state_late, state_late.params.sigma)
    assert abs(screen.I[0] - sg.LN2) <= 1e-9
    assert abs(screen.I[-1] - sg.LN2) <= 1e-9


def test_screen_coverage_guard(state_late, silver):
    with pytest.raises(sg.CoverageError) as info:
        sg.screen_distribution(state_late, silver.sigma, extent=(-1.0e-6, -0.5e-6))
    assert 0.0 <= info.value.captured < 0.5
    assert info.value.required == pytest.approx(1.0 - 1e-8)
    with pytest.raises(ValueError):
        sg.screen_distribution(state_late, silver.sigma, extent=(1e-6, -1e-6))
    with pytest.raises(ValueError):
        sg.screen_distribution(state_late, -1e-6)


def test_mean_information_starts_at_zero(state_t0):
    assert sg.mean_information(state_t0) == 0.0


def test_mean_information_saturates(silver, scales):
    state = sg.evolve_in_field(silver, 5.0 * scales.tau1)
    assert sg.LN2 - sg.mean_information(state) <= 1e-12


def test_mean_information_below_entanglement(silver, scales):
    times = np.linspace(0.0, 10.0 * scales.tau1, 12)
    returned, gained, available = sg.information_series(silver, times)
    np.testing.assert_array_equal(returned, times)
    assert np.all(gained <= available + 1e-9)
    assert np.all(np.diff(gained) >= -1e-12)


def test_information_series_matches_pointwise(silver, scales):
    t = 2.0 * scales.tau1
    _, gained, available = sg.information_series(silver, np.array([t]))
    assert gained[0] == pytest.approx(sg.mean_information(sg.evolve_in_field(silver, t)),
                                      rel=1e-12)
    _, s_pt = sg.entanglement_entropy(t, scales)
    assert available[0] == pytest.approx(s_pt, rel=1e-12)


def test_coarser_pixels_lose_information(silver, scales):
    state = sg.evolve_in_field(silver, scales.tau1)
    for alignment in ("center", "edge"):
        gained = [
            sg.mean_information(state, fine_limit=False, pixels=width,
                                alignment=alignment)
            for width in (silver.sigma / 4, silver.sigma, 4 * silver.sigma)
        ]
        assert gained[0] >= gained[1] >= gained[2] >= 0.0


def test_small_pixels_approach_the_fine_limit(silver, scales):
    state = sg.evolve_in_field(silver, scales.tau1)
    fine = sg.mean_information(state)
    pixelated = sg.mean_information(state, fine_limit=False, pixels=silver.sigma / 64)
    assert pixelated == pytest.approx(fine, rel=1e-3)
