import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphsim.comb import ModeGrid, PhaseMatchWindow, coverage_report, pump_comb_graph
from graphsim.errors import InvalidArgument
from graphsim.graphs import allones_graph

OPEN = PhaseMatchWindow.unbounded()


def grid(signals, pumps, matched=True):
    return ModeGrid(100.0, 1.0, tuple(signals), tuple(pumps), matched)


def test_full_pump_comb_is_uniform():
    g = pump_comb_graph(grid([-1, 0, 1], range(-2, 3)), OPEN)
    assert g == allones_graph(3)


def test_single_pump_couples_pair_only():
    g = pump_comb_graph(grid([-1, 1], [0]), OPEN)
    np.testing.assert_array_equal(g.weights, [[0, 1], [1, 0]])


def test_single_degenerate_self_loop():
    assert pump_comb_graph(grid([0], [0]), OPEN).weights.tolist() == [[1.0]]


def test_frequencies():
    gr = grid([-1, 2], [3])
    assert gr.signal_frequency(2) == 102.0
    assert gr.pump_frequency(3) == 203.0
    # energy conservation for the coupled pair
    assert gr.signal_frequency(-1) + gr.signal_frequency(2) + 2 == gr.pump_frequency(3)


def test_grid_validation():
    with pytest.raises(InvalidArgument):
        ModeGrid(0.0, 0.0, (0,), (0,))
    with pytest.raises(InvalidArgument):
        ModeGrid(0.0, 1.0, (), (0,))
    with pytest.raises(InvalidArgument):
        ModeGrid(0.0, 1.0, (1, 1), (0,))
    with pytest.raises(InvalidArgument):
        ModeGrid(0.0, 1.0, (0.5,), (0,))
    with pytest.raises(InvalidArgument):
        PhaseMatchWindow(2, 1)
    assert ModeGrid(0.0, 1.0, (3, -1), (2,)).signal_indices == (-1, 3)


def test_window_drops_signals_with_warning():
    with pytest.warns(UserWarning, match="2 signal"):
        g = pump_comb_graph(grid([-3, -1, 0, 1, 3], range(-6, 7)), PhaseMatchWindow(-1, 1))
    assert g == allones_graph(3)
    rep = coverage_report(grid([-3, -1, 0, 1, 3], range(-6, 7)), PhaseMatchWindow(-1, 1))
    assert rep.dropped_signals == 2 and rep.signal_indices == (-1, 0, 1)


def test_empty_window_is_an_error():
    with pytest.raises(InvalidArgument), warnings.catch_warnings():
        warnings.simplefilter("ignore")
        pump_comb_graph(grid([5], [10]), PhaseMatchWindow(0, 1))


def test_unmatched_fsr_refuses_to_build():
    with pytest.raises(InvalidArgument):
        pump_comb_graph(grid([0, 1], [0, 1, 2], matched=False), OPEN)
    rep = coverage_report(grid([0, 1], [0, 1, 2], matched=False), OPEN)
    assert not rep.matched and not rep.complete


def test_coverage_complete():
    rep = coverage_report(grid([0, 1, 2], range(0, 5)), OPEN)
    assert rep.complete
    assert rep.realized_edges == 3 and rep.degenerate_couplings == 3
    assert rep.missing_pump_sums == ()


def test_coverage_missing_one_sum():
    rep = coverage_report(grid([0, 1, 2], [0, 1, 3, 4]), OPEN)
    assert rep.missing_pump_sums == (2,)
    assert not rep.complete
    A = pump_comb_graph(grid([0, 1, 2], [0, 1, 3, 4]), OPEN).weights
    zeros = {(j, k) for j in range(3) for k in range(3) if A[j, k] == 0}
    assert zeros == {(0, 2), (1, 1), (2, 0)}
    assert rep.degenerate_couplings == 2 and rep.realized_edges == 2


def test_coverage_empty_pumps():
    rep = coverage_report(grid([0, 1], []), OPEN)
    assert not rep.complete and rep.realized_edges == 0
    assert not pump_comb_graph(grid([0, 1], []), OPEN).weights.any()
    assert rep.to_dict()["missing_pump_sums"] == [0, 1, 2]


signal_sets = st.lists(st.integers(-10, 10), min_size=1, max_size=8, unique=True)


@settings(max_examples=80, deadline=None)
@given(signal_sets, st.lists(st.integers(-25, 25), max_size=6))
def test_completeness_property(signals, extra):
    pumps = {j + k for j in signals for k in signals} | set(extra)
    assert pump_comb_graph(grid(signals, sorted(pumps)), OPEN) == allones_graph(len(signals))


@settings(max_examples=80, deadline=None)
@given(signal_sets, st.data())
def test_removing_pump_clears_one_skew_diagonal(signals, data):
    sig = sorted(signals)
    pumps = sorted({j + k for j in sig for k in sig})
    s = data.draw(st.sampled_from(pumps))
    A = pump_comb_graph(grid(sig, [p for p in pumps if p != s]), OPEN).weights
    for a, j in enumerate(sig):
        for b, k in enumerate(sig):
            assert A[a, b] == (0.0 if j + k == s else 1.0)
    np.testing.assert_array_equal(A, A.T)


@settings(max_examples=80, deadline=None)
@given(signal_sets, st.lists(st.integers(-20, 20), max_size=10, unique=True))
def test_adjacency_symmetric_and_rule(signals, pumps):
    sig = sorted(signals)
    A = pump_comb_graph(grid(sig, pumps), OPEN).weights
    np.testing.assert_array_equal(A, A.T)
    for a, j in enumerate(sig):
        for b, k in enumerate(sig):
            assert A[a, b] == float(j + k in pumps)
