import csv
import io
import json
import math

import numpy as np
import pytest

from weighted_mt.constants import WeightParams, build_constants
from weighted_mt.errors import DomainError
from weighted_mt.extremal import (
    Objective,
    SearchConfig,
    ascend,
    compare_with_concentration,
    maximize,
    result_json,
    start_profile,
    trace_csv,
)
from weighted_mt.functionals import dirichlet_energy, i_functional


@pytest.mark.parametrize(
    "kw",
    [{"kappa": 0.0}, {"max_iters": 0}, {"armijo": 1.0}, {"direction": "newton"}, {"starts": ()}, {"h": -1.0}, {"S": 5.0}],
)
def test_search_config_validation(kw):
    with pytest.raises(DomainError):
        SearchConfig(**kw)


def test_unknown_start():
    params = WeightParams(0.0, 0.0)
    with pytest.raises(DomainError):
        start_profile("bogus", SearchConfig().grid(), params, build_constants(params), 1.0)


def test_objective_matches_i_functional():
    params = WeightParams(0.5, 0.0)
    c = build_constants(params)
    grid = SearchConfig().grid()
    obj = Objective(grid, params)
    f = start_profile("phi0", grid, params, c, 1.0)
    from weighted_mt.profiles import HalfLineProfile

    assert obj.value(f) == pytest.approx(i_functional(HalfLineProfile(grid, f), params).I_plus_1, rel=1e-7)
    assert obj.energy(f) == pytest.approx(dirichlet_energy(HalfLineProfile(grid, f), params, c), rel=1e-12)


@pytest.mark.parametrize("alpha", [0.5, 1.0])
def test_gradient_directional_derivative(alpha):
    params = WeightParams(alpha, 0.0)
    grid = SearchConfig().grid()
    obj = Objective(grid, params)
    rng = np.random.default_rng(1)
    f = np.concatenate([[0.0], np.cumsum(rng.uniform(0, 0.05, grid.size - 1))])
    f *= (0.8 / obj.energy(f)) ** (1 / params.p)
    d = rng.normal(size=f.size)
    d[0] = 0.0
    h = 1e-6
    fd = (obj.value(f + h * d) - obj.value(f - h * d)) / (2 * h)
    assert float(np.dot(obj.gradient(f), d)) == pytest.approx(fd, rel=1e-6)


def test_ascent_never_loses_and_respects_the_cap():
    params = WeightParams(0.0, 0.0)
    c = build_constants(params)
    cfg = SearchConfig(max_iters=50)
    grid = cfg.grid()
    obj = Objective(grid, params)
    trace = []
    for name in cfg.starts:
        f, val, out = ascend(start_profile(name, grid, params, c, 1.0), obj, cfg, name, trace)
        assert out.final_value >= out.initial_value
        assert obj.energy(f) <= 1.0 + 1e-12
    values = {}
    for name, _, v, e, _ in trace:
        assert v >= values.get(name, -math.inf)
        values[name] = v
        assert e <= 1.0 + 1e-12


def test_small_energy_stays_below_ceiling():
    params = WeightParams(0.0, 0.0)
    c = build_constants(params)
    res = maximize(params, c, SearchConfig(kappa=0.1))
    cmp = compare_with_concentration(res, params, c)
    assert not cmp.exceeds_ceiling
    assert 1.0 < res.best_I_plus_1 < 1.01


def test_weighted_search_beats_test_profile():
    params = WeightParams(1.0, 0.0)
    c = build_constants(params)
    res = maximize(params, c, SearchConfig(starts=("phi0", "moser(5)")))
    phi0 = next(o for o in res.per_start if o.start == "phi0")
    assert res.best_I_plus_1 >= phi0.initial_value
    assert res.el_relative_residual < 0.05
    assert compare_with_concentration(res, params, c).exceeds_ceiling


def test_outputs_are_serializable():
    params = WeightParams(0.0, 0.0)
    c = build_constants(params)
    res = maximize(params, c, SearchConfig(starts=("moser(5)",), max_iters=20), keep_trace=True)
    data = json.loads(result_json(res, params, c))
    assert {"best_I_plus_1", "exceeds_ceiling", "el_relative_residual", "per_start"} <= set(data)
    rows = list(csv.reader(io.StringIO(trace_csv(res))))
    assert rows[0] == ["start", "iter", "objective", "energy", "step"]
    assert len(rows) == 1 + len(res.trace)
