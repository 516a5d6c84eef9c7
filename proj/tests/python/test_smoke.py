"""Smoke tests for the python bindings."""

import _vscreen


def test_selection_primitives():
    assert _vscreen.top_m_indices([1.0, 5.0, 3.0, 5.0], 2) == [1, 3]
    good = _vscreen.good_set([3.0, 2.0, 1.5, 1.0], 2, 0.5)
    assert good.members == [0, 1, 2]
    assert good.contains(2)
    assert not good.contains(3)
    assert _vscreen.ibr_relation(1.0, 0.0, 0.5) == "a_dominates"
    assert _vscreen.ibr_relation(0.1, 0.0, 0.5) == "indifferent"


def test_consistent_budget():
    assert _vscreen.consistent_budget(0.1, 1.0, 0.1, 10) == (4239, 41)


def test_enumerate_allocations():
    allocs = _vscreen.enumerate_allocations(13)
    assert len(allocs) == 1716
    assert all(len(x) == 7 and min(x) >= 1 and sum(x) <= 13 for x in allocs)


def test_run_synthetic():
    result = _vscreen.run_synthetic(
        row="rm-normal", k=32, m=4, gap=0.2, algorithm="efg-m",
        total=1600, seed=3,
    )
    assert len(result.selected) == 4
    assert result.consumed_budget == 1600
    again = _vscreen.run_synthetic(
        row="rm-normal", k=32, m=4, gap=0.2, algorithm="efg-m",
        total=1600, seed=3,
    )
    assert result.selected == again.selected


def test_stream_analysis():
    out = _vscreen.analyze_stream([10.0, 0.0, 0.0, 0.0], n0=1,
                                  boundaries=[2.5])
    assert out["min_running_avg"] == 2.5
    assert out["crossing_times"][2.5] == 4


def test_experiment_json():
    config = """
    {
      "problem": {"kind": "synthetic", "row": "rm-normal", "k": 32, "gap": 0.2},
      "algorithm": {"id": "efg-m", "m": 4},
      "budget": {"c": 60.0},
      "replications": 5,
      "seed": 1
    }
    """
    out = _vscreen.run_experiment_json(config)
    assert set(out["metrics"]) == {"PCS", "PGS", "PGSR"}
    for estimate, se, reps in out["metrics"].values():
        assert 0.0 <= estimate <= 1.0
        assert reps == 5
