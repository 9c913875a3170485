import math

import pytest

from disk_evacuation.optimizer import SearchSpec, equalization_report, optimize
from disk_evacuation.solvers import ParameterError, critical_arc
from disk_evacuation.trajectories import REFERENCE_B_CHI, REFERENCE_C, Algo, AlgorithmParams


@pytest.fixture(scope="module")
def b_result():
    trace = []
    params, rep = optimize(SearchSpec.b_family(), trace)
    return params, rep, trace


def test_linear_detour_optimum(b_result):
    params, rep, _ = b_result
    assert params.chi == pytest.approx(REFERENCE_B_CHI, abs=1e-3)
    assert params.phi == 0.0
    assert params.lam == pytest.approx(math.sin(params.chi), abs=1e-12)
    assert rep.sup_cost == pytest.approx(5.644, abs=1e-3)


def test_search_is_deterministic(b_result):
    params, rep, trace = b_result
    again = []
    p2, r2 = optimize(SearchSpec.b_family(), again)
    assert p2 == params and r2.sup_cost == rep.sup_cost
    assert again == trace


def test_trace_records_stages(b_result):
    stages = {row.stage for row in b_result[2]}
    assert {"grid", "refine", "polish"} <= stages


def test_fixed_coordinates_skip_search():
    spec = SearchSpec(chi=critical_arc(), phi=0.0, lam=0.0)
    params, rep = optimize(spec)
    assert params.chi == pytest.approx(critical_arc())
    assert rep.worst_phase == "pre-detour"
    assert rep.sup_cost == pytest.approx(5.739060, abs=1e-6)


@pytest.mark.parametrize(
    "kw",
    [
        dict(chi_bounds=(1.0, 2.0)),
        dict(chi=3.0),
        dict(phi=-0.1),
        dict(lam="half"),
        dict(grid=1),
    ],
)
def test_invalid_specs(kw):
    with pytest.raises(ParameterError):
        SearchSpec(**kw)


def test_infeasible_fixed_angle():
    spec = SearchSpec(phi=1.2)
    with pytest.raises(ParameterError, match=r"f\(chi\)/2"):
        optimize(spec)


def test_equalization_at_reference():
    gaps = equalization_report(REFERENCE_C)
    assert max(gaps.values()) == 0.0
    assert min(gaps.values()) >= -2e-4


def test_equalization_linear_detour_ties():
    gaps = equalization_report(AlgorithmParams.for_b(REFERENCE_B_CHI), Algo.B)
    assert abs(gaps["detour-sub1"] - gaps["post-detour"]) < 1e-5
    assert gaps["pre-detour"] < -0.02


def test_equalization_boundary_only_limit():
    gaps = equalization_report(AlgorithmParams(critical_arc(), 0.0, 0.0))
    assert gaps["pre-detour"] == 0.0


@pytest.mark.slow
def test_full_search_reaches_reference():
    params, rep = optimize(SearchSpec.full())
    assert rep.sup_cost <= 5.6281
    assert abs(params.chi - REFERENCE_C.chi) <= 0.02
    assert abs(params.phi - REFERENCE_C.phi) <= 0.02
    assert abs(params.lam - REFERENCE_C.lam) <= 0.02
