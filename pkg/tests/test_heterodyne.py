import math

import numpy as np
import pytest

from graphsim.comb import ModeGrid
from graphsim.dynamics import EvolutionSpec, GaussianState, QuadratureForm, evolve_vacuum, variance
from graphsim.errors import InvalidArgument, InvalidPlan
from graphsim.graphs import allones_graph, ghz_graph, vlb_graph
from graphsim.heterodyne import (
    DetectionPlan,
    bandwidth_gap_analysis,
    channel_frequency,
    lo_comb_plan,
    measured_observable,
    measured_variance,
    partial_sum_limit_variance,
)
from graphsim.witnesses import phase_sum_form

HALF_PI = math.pi / 2


def test_channel_frequency():
    assert channel_frequency(1) == 1
    assert channel_frequency(2) == 3
    assert channel_frequency(3) == 5
    assert channel_frequency(2, spacing=0.5) == 1.5
    with pytest.raises(InvalidArgument):
        channel_frequency(0)


def test_plan_validation():
    with pytest.raises(InvalidPlan):
        DetectionPlan((0, 3), HALF_PI, 2)  # 1..2 overlaps 1..5
    with pytest.raises(InvalidPlan):
        DetectionPlan((0, 2), HALF_PI, 2)  # tooth 2 is detected by tooth 0
    with pytest.raises(InvalidPlan):
        DetectionPlan((0,), HALF_PI, 0)
    with pytest.raises(InvalidPlan):
        DetectionPlan((0,), HALF_PI, 1, lo_amplitude=0.0)
    with pytest.raises(InvalidPlan):
        DetectionPlan((), HALF_PI, 1)
    assert DetectionPlan((0, 5), HALF_PI, 2).detected_mode_indices == (-2, -1, 1, 2, 3, 4, 6, 7)


def test_lo_on_signal_mode_is_invalid():
    with pytest.raises(InvalidPlan):
        measured_observable(DetectionPlan((0,), HALF_PI, 1), ModeGrid(0, 1, (-1, 0, 1)))


def test_two_mode_phase_sum():
    obs = measured_observable(DetectionPlan((0,), HALF_PI, 1), ModeGrid(0, 1, (-1, 1)))
    assert obs.form == QuadratureForm([0, 0], [1, 1])
    assert obs.vacuum_padded_indices == ()


def test_theta_zero_two_channels():
    obs = measured_observable(DetectionPlan((0,), 0.0, 2), ModeGrid(0, 1, (-2, -1, 1, 2)))
    assert obs.form == QuadratureForm([1, 1, 1, 1], [0, 0, 0, 0])


def test_general_theta_coefficients():
    theta = 0.3
    obs = measured_observable(DetectionPlan((0,), theta, 1), ModeGrid(0, 1, (-1, 1, 4)))
    np.testing.assert_allclose(obs.form.x_coeffs, [math.cos(theta)] * 2 + [0])
    np.testing.assert_allclose(obs.form.p_coeffs, [math.sin(theta)] * 2 + [0])


def test_lo_comb_covering_grid_gives_total_phase():
    plan, covered = lo_comb_plan(2, 3)
    obs = measured_observable(plan, ModeGrid(0, 1, covered))
    assert obs.form == phase_sum_form(len(covered))
    assert plan.lo_indices == (0, 5, 10)


def test_vacuum_single_lo():
    r = measured_variance(GaussianState.vacuum(2), DetectionPlan((0,), HALF_PI, 1, 3.0), ModeGrid(0, 1, (-1, 1)))
    assert r.normalized == 2.0
    assert r.raw == 18.0


def test_padding_for_missing_modes():
    # grid only has +1, the partner at -1 enters as vacuum
    obs = measured_observable(DetectionPlan((0,), HALF_PI, 1), ModeGrid(0, 1, (1, 5)))
    assert obs.vacuum_padded_indices == (-1,)
    assert obs.mode_indices == (1, 5, -1)
    s = evolve_vacuum(allones_graph(2), EvolutionSpec(1.0))
    r = measured_variance(s, DetectionPlan((0,), HALF_PI, 1), ModeGrid(0, 1, (1, 5)))
    assert r.vacuum_part == 1.0
    assert r.normalized == pytest.approx(variance(s, QuadratureForm([0, 0], [1, 0])) + 1.0, rel=1e-14)


def test_padding_independent_of_theta():
    for theta in (0.0, 0.4, HALF_PI, 2.0):
        r = measured_variance(GaussianState.vacuum(1), DetectionPlan((0,), theta, 1), ModeGrid(0, 1, (7,)))
        assert r.state_part == 0.0
        assert r.normalized == pytest.approx(2.0, abs=1e-15)


def test_undetected_squeezed_modes_do_not_change_result():
    plan = DetectionPlan((0,), HALF_PI, 1)
    small = evolve_vacuum(allones_graph(2), EvolutionSpec(0.7))
    r_small = measured_variance(small, plan, ModeGrid(0, 1, (-1, 1)))
    # embed the same two-mode state with an extra independent squeezed mode outside the band
    cov = np.eye(6)
    idx = [0, 1, 3, 4]
    cov[np.ix_(idx, idx)] = small.cov
    cov[2, 2], cov[5, 5] = math.exp(3), math.exp(-3)
    big = GaussianState(cov)
    r_big = measured_variance(big, plan, ModeGrid(0, 1, (-1, 1, 9)))
    assert r_big.normalized == pytest.approx(r_small.normalized, rel=1e-14)


def test_state_mode_mismatch():
    with pytest.raises(InvalidArgument):
        measured_variance(GaussianState.vacuum(3), DetectionPlan((0,), HALF_PI, 1), ModeGrid(0, 1, (-1, 1)))


def test_state_indices_subset_of_grid():
    s = GaussianState.vacuum(2)
    r = measured_variance(s, DetectionPlan((0,), HALF_PI, 1), ModeGrid(0, 1, (-1, 1, 2)), state_indices=(1, 2))
    assert r.vacuum_part == 1.0
    with pytest.raises(InvalidArgument):
        measured_variance(s, DetectionPlan((0,), HALF_PI, 1), ModeGrid(0, 1, (-1, 1)), state_indices=(1, 3))


@pytest.mark.parametrize("builder", [allones_graph, ghz_graph, vlb_graph])
@pytest.mark.parametrize("half", [1, 2, 3, 6])
@pytest.mark.parametrize("tau", [0.0, 1.0, 5.0])
def test_full_detection_equals_phase_sum(builder, half, tau):
    n = 2 * half
    s = evolve_vacuum(builder(n), EvolutionSpec(tau))
    for plan, covered in (lo_comb_plan(half, 1), lo_comb_plan(1, half)):
        r = measured_variance(s, plan, ModeGrid(0, 1, covered))
        assert abs(r.normalized - variance(s, phase_sum_form(n))) <= 1e-12


def test_channel_shares_sum_to_total():
    plan, covered = lo_comb_plan(3, 2, theta=1.1, lo_amplitude=1.7)
    s = evolve_vacuum(vlb_graph(len(covered)), EvolutionSpec(0.4))
    r = measured_variance(s, plan, ModeGrid(0, 1, covered))
    assert sorted(r.channels) == [1, 2, 3]
    assert sum(r.channels.values()) == pytest.approx(r.normalized, rel=1e-12)
    assert r.raw == pytest.approx(1.7**2 * r.normalized, rel=1e-15)


def test_partial_detection_limit_example():
    # N=4, two of four modes detected
    s = evolve_vacuum(allones_graph(4), EvolutionSpec(10.0))
    r = measured_variance(s, DetectionPlan((0,), HALF_PI, 1), ModeGrid(0, 1, (-1, 1, 5, 6)))
    assert r.normalized == pytest.approx(1.0, abs=1e-6)
    sd = evolve_vacuum(allones_graph(4), EvolutionSpec(10.0, "dense"))
    assert measured_variance(sd, DetectionPlan((0,), HALF_PI, 1), ModeGrid(0, 1, (-1, 1, 5, 6))).normalized == \
        pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("n", range(2, 13))
def test_partial_squeezing_bound(n):
    for m in range(2, n, 2):
        half = m // 2
        grid = ModeGrid(0, 1, tuple(range(-half, 0)) + tuple(range(1, half + 1)) + tuple(range(50, 50 + n - m)))
        s = evolve_vacuum(allones_graph(n), EvolutionSpec(12.0, "dense"))
        r = measured_variance(s, DetectionPlan((0,), HALF_PI, half), grid)
        assert r.normalized == pytest.approx(m * (1 - m / n), abs=1e-6)
        assert 0 < r.normalized < m


@pytest.mark.parametrize("n,m", [(3, 1), (4, 1), (4, 2), (7, 3), (12, 11)])
def test_partial_sum_limit_variance(n, m):
    assert partial_sum_limit_variance(n, m) == pytest.approx(m * (1 - m / n), abs=1e-12)


def test_theta_sweep_periodic_with_minimum_at_half_pi():
    plan_at = lambda th: DetectionPlan((0,), th, 2)
    grid = ModeGrid(0, 1, (-2, -1, 1, 2))
    s = evolve_vacuum(allones_graph(4), EvolutionSpec(0.3))
    thetas = np.arange(64) * 2 * math.pi / 64
    values = np.array([measured_variance(s, plan_at(t), grid).normalized for t in thetas])
    shifted = np.array([measured_variance(s, plan_at(t + math.pi), grid).normalized for t in thetas])
    np.testing.assert_allclose(values, shifted, rtol=1e-12)
    assert thetas[np.argmin(values)] == pytest.approx(HALF_PI)


def test_bandwidth_gap_examples():
    full = bandwidth_gap_analysis(3, 1)
    assert full.detected_modes == 3 and full.limit_variance == 0.0 and full.residual_db == -math.inf
    assert partial_sum_limit_variance(10, 1) == pytest.approx(1 - 1 / 10)
    r = bandwidth_gap_analysis(100, 1)
    assert r.detected_modes == 3
    assert r.limit_variance == pytest.approx(2.91, abs=1e-12)
    assert r.vacuum_variance == 3.0
    assert r.residual_db == pytest.approx(10 * math.log10(0.97))
    assert round(r.residual_db, 2) == -0.13
    assert r.lo_teeth_needed == 50
    # dense-oracle spot check at large tau, with three of 100 modes read out
    s = evolve_vacuum(allones_graph(100), EvolutionSpec(3.0, "dense"))
    assert variance(s, QuadratureForm(np.zeros(100), [1.0] * 3 + [0.0] * 97)) == pytest.approx(2.91, abs=1e-9)


def test_bandwidth_gap_rejects_bad_input():
    with pytest.raises(InvalidArgument):
        bandwidth_gap_analysis(3, 0)
    with pytest.raises(InvalidArgument):
        bandwidth_gap_analysis(2, 3)
