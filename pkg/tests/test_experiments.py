import json

import pytest
from hypothesis import given, settings, strategies as st
from statsmodels.stats.proportion import proportion_confint

from hgcolor.experiments import (
    CSV_HEADER,
    SweepConfig,
    bad_edge_experiment,
    fixed,
    isolated_vertex_experiment,
    run_sweep,
    wilson_interval,
)
from hgcolor.hypergraph import GuardError, Seed


@given(trials=st.integers(1, 2000), frac=st.floats(0, 1))
@settings(max_examples=100)
def test_wilson_matches_reference(trials, frac):
    k = round(frac * trials)
    lo, hi = wilson_interval(k, trials)
    rlo, rhi = proportion_confint(k, trials, alpha=0.05, method="wilson")
    assert lo == pytest.approx(rlo, abs=1e-9)
    assert hi == pytest.approx(rhi, abs=1e-9)


def test_fixed_notation():
    assert fixed(0.5) == "0.5"
    assert fixed(2.0) == "2"
    assert fixed(1e-7, 6) == "0"
    assert fixed(0.1234567, 6) == "0.123457"


def test_config_validation():
    base = dict(r=3, k=2, n=12, c_grid=(1.0, 2.0), trials=5)
    SweepConfig(**base)
    with pytest.raises(ValueError):
        SweepConfig(**{**base, "trials": 0})
    with pytest.raises(ValueError):
        SweepConfig(**{**base, "c_grid": (2.0, 1.0)})
    with pytest.raises(ValueError):
        SweepConfig(**{**base, "c_grid": (1.0, 1.0)})
    with pytest.raises(ValueError):
        SweepConfig(**{**base, "model": "weird"})
    with pytest.raises(ValueError):
        SweepConfig(**{**base, "model": "bernoulli", "n": 6, "c_grid": (4.0,)})
    with pytest.raises(GuardError):
        SweepConfig(**{**base, "n": 41})
    with pytest.raises(GuardError):
        SweepConfig(**{**base, "k": 3, "n": 25})


def _small(model="uniform", **kw):
    return SweepConfig(r=3, k=2, n=14, c_grid=(0.5, 2.0, 4.0), trials=40, model=model, seed=Seed(3), **kw)


@pytest.mark.parametrize("model", ["uniform", "multi", "bernoulli"])
def test_sweep_runs_for_each_model(model):
    res = run_sweep(_small(model))
    assert [p.trials for p in res.points] == [40, 40, 40]
    assert res.points[0].p_hat >= res.points[-1].p_hat


def test_sweep_is_reproducible_and_thread_independent():
    a = run_sweep(_small())
    b = run_sweep(_small())
    c = run_sweep(_small(), threads=2)
    assert a.to_csv() == b.to_csv() == c.to_csv()
    assert a.to_json() == b.to_json() == c.to_json()


def test_csv_and_json_formats():
    res = run_sweep(_small())
    lines = res.to_csv().splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[1].startswith("3,2,14,uniform,0.5,7,40,")
    meta = json.loads(res.to_json())
    assert meta["config"]["c_grid"] == [0.5, 2.0, 4.0]
    assert meta["config"]["seed"] == {"value": 3, "stream": 0}
    assert "wall_time_s" not in meta
    timed = json.loads(res.to_json(include_timing=True))
    assert "wall_time_s" in timed and "finished_utc" in timed


def test_censoring():
    res = run_sweep(_small(node_limit=1))
    assert any(p.censored for p in res.points)
    p = max(res.points, key=lambda p: p.censored)
    assert p.colorable <= p.decided == p.trials - p.censored


def test_uniform_and_conditioned_multi_agree():
    # rejection conditioning is only practical where P(no bad edge) is not tiny
    grid = (0.5, 1.0, 1.5)
    u = run_sweep(SweepConfig(3, 2, 20, grid, 200, "uniform", Seed(21)))
    m = run_sweep(SweepConfig(3, 2, 20, grid, 200, "multi", Seed(22), condition_simple=True))
    for a, b in zip(u.points, m.points):
        (alo, ahi), (blo, bhi) = a.wilson, b.wilson
        assert alo <= bhi and blo <= ahi


def test_bad_edge_law_small():
    s = bad_edge_experiment(3, 1.0, 2000, 2000, Seed(1))
    assert abs(s.z_score) < 3
    assert s.exceed_fraction < 0.01
    assert s.mean_bad == pytest.approx(3.0, rel=0.1)


def test_isolated_vertices():
    s = isolated_vertex_experiment(2, 1.0, 1000, 300, Seed(2))
    assert s.expected == pytest.approx(1000 * (1 - 1e-3) ** 2000)
    assert s.relative_error < 0.02
    empty = isolated_vertex_experiment(3, 0.0, 50, 3, Seed(2))
    assert empty.counts == (50, 50, 50)
    assert empty.fraction_at_least(50) == 1.0


def test_experiment_argument_checks():
    with pytest.raises(ValueError):
        bad_edge_experiment(3, 1.0, 100, 0, Seed(0))
    with pytest.raises(ValueError):
        isolated_vertex_experiment(3, -1.0, 100, 1, Seed(0))
    assert wilson_interval(0, 0) == (0.0, 1.0)
