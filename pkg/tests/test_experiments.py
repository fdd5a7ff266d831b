"""Experiment harness: predicted slopes, sharpness/boundedness runs, and the
lattice-sum criteria."""
import json
from fractions import Fraction

import numpy as np
import pytest

from modemb.exponents import Exponent, INF, tau
from modemb.experiments import (
    CatalogueError,
    necessity_exponent,
    necessity_sum_trend,
    predicted_slope,
    run_boundedness,
    run_comb_width_sweep,
    run_discrete_necessity,
    run_sharpness,
    run_weighted_tail,
    tau_piece_suite,
)
from modemb.families import grid_for
from modemb.oracle import SpaceSpec, decide

F = Fraction


def B(p, q, s=0):
    return SpaceSpec.besov(p, q, s)


def M(p, q, s=0):
    return SpaceSpec.modulation(p, q, s)


def test_predicted_slope_examples():
    # annulus: d/q - (s + d(1 - 1/p0)) at p0 = q = 1, s = 0
    assert predicted_slope(B(1, 1, 0), M(1, 1), "annulus") == 1
    # single box at s = -1: slope -s
    assert predicted_slope(B(2, 2, -1), M(2, 2), "single_box") == 1
    # comb at p0 = inf, q = 1, s = 0: d(1/q - 1/p0)
    assert predicted_slope(B(INF, 1, 0), M(INF, 1), "lattice_comb") == 1


def test_predicted_slope_mirror_direction():
    assert predicted_slope(M(1, 1), B(1, 1, 1), "annulus") == 0
    assert predicted_slope(M(2, 2), B(2, 2, F(1, 2)), "single_box") == F(1, 2)
    # slope = s - d(1/q - 1/p1) = 0 - (1/4 - 1) = 3/4
    assert predicted_slope(M(1, 4), B(1, 2, 0), "lattice_comb") == F(3, 4)


def test_predicted_slope_uncatalogued():
    with pytest.raises(CatalogueError):
        predicted_slope(B(1, 1, 0), M(1, 1), "dilated_kernel")
    with pytest.raises(CatalogueError):
        predicted_slope(B(1, 1, 0), M(1, 1, 0).__class__.sobolev(1, 0), "annulus")
    with pytest.raises(CatalogueError, match="p0 >= 2"):
        predicted_slope(B(1, 2, 0), M(1, 2), "lattice_comb")


def test_catalogue_coherence_with_oracle():
    """Positive predicted growth must come with a failing verdict."""
    grid = [F(1, 2), 1, 2, 4, Exponent.of("inf")]
    smooth = [F(-1, 2), 0, F(1, 4), 1]
    for p0 in grid:
        for q in grid:
            for s in smooth:
                source, target = B(p0, q, s), M(p0, q)
                for family in ("single_box", "annulus", "lattice_comb"):
                    try:
                        slope = predicted_slope(source, target, family)
                    except CatalogueError:
                        continue
                    if slope > 0:
                        assert not decide(source, target).holds, (p0, q, s, family)


def test_run_sharpness_annulus_failing_query():
    """B^0_{1,1} -> M_{1,1} fails (tau = 1); the annulus ratio grows at rate 1."""
    report = run_sharpness(B(1, 1, 0), M(1, 1), "annulus", range(4, 9))
    assert report.predicted_slope == 1
    assert abs(report.fitted_slope - 1.0) <= 0.2
    assert report.passed


def test_run_sharpness_holding_query_decays():
    """At s = tau + 1 the annulus ratio decays at rate about -1."""
    report = run_sharpness(B(1, 1, 2), M(1, 1), "annulus", range(4, 9))
    assert report.predicted_slope == -1
    assert report.fitted_slope <= -0.8


def test_run_sharpness_needs_two_levels():
    with pytest.raises(ValueError):
        run_sharpness(B(1, 1, 0), M(1, 1), "annulus", [4])


def test_run_boundedness_box():
    report = run_boundedness(B(2, 2, 0), M(2, 2), "single_box", range(4, 9))
    assert report.passed and report.spread <= 1.0 + 1e-9


def test_run_boundedness_requires_holding_verdict():
    with pytest.raises(ValueError, match="holding"):
        run_boundedness(B(1, 1, 0), M(1, 1), "annulus", range(4, 7))


def test_run_boundedness_kernel_sobolev():
    """W^{0,1} -> M_{1,inf} holds (condition with r = 1, q = inf); the
    dilated-kernel ratio stays bounded as t -> 0."""
    source = SpaceSpec.sobolev(1, 0)
    target = SpaceSpec.modulation(1, INF)
    ts = [F(1, 4), F(1, 16), F(1, 64)]
    report = run_boundedness(source, target, "dilated_kernel", ts)
    assert report.passed


def test_report_serialization(tmp_path):
    report = run_sharpness(B(2, 2, F(-1, 4)), M(2, 2), "single_box", range(4, 7))
    payload = json.loads(report.to_json())
    assert payload["schema"] == "modemb/experiment/v1"
    assert payload["mode"] == "sharpness"
    csv_path = tmp_path / "report.csv"
    report.write_csv(csv_path)
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "level,source_norm,target_norm,ratio,log2_ratio"
    assert len(lines) == 4


def test_slope_reproducibility():
    a = run_sharpness(B(2, 2, F(-1, 4)), M(2, 2), "single_box", range(4, 8))
    b = run_sharpness(B(2, 2, F(-1, 4)), M(2, 2), "single_box", range(4, 8))
    assert a.fitted_slope == b.fitted_slope


def test_weighted_tail_examples():
    report = run_weighted_tail(1, [F(1, 8), F(1, 64), F(1, 512)])
    assert report.diverging and report.growth >= 2.0
    assert report.max_rel_residual < 0.05
    # t = 1 keeps only k = 0, so the value is exactly 1
    single = run_weighted_tail(1, [1, F(1, 8)])
    assert single.values[0] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        run_weighted_tail("inf", [F(1, 8), F(1, 64)])


def test_necessity_exponent_directions():
    exponent, critical = necessity_exponent(2, 4, F(3, 8))
    assert exponent == F(3, 2) and critical == F(1, 4)
    exponent, critical = necessity_exponent(4, 2, F(3, 8))  # Sobolev direction
    assert critical == F(1, 4) and exponent == F(3, 2)
    with pytest.raises(ValueError):
        necessity_exponent(2, 2, 0)


def test_necessity_trend_critical_crossing():
    at = necessity_sum_trend(2, 4, F(1, 4))
    assert at.diverging and not at.converged
    above = necessity_sum_trend(2, 4, F(3, 8), auto_extend=True)
    assert above.converged and above.tail_estimate < 1e-3
    zero = necessity_sum_trend(2, 4, 0)
    assert zero.diverging


def test_run_discrete_necessity_report():
    report = run_discrete_necessity(2, 4)
    assert report["critical_s"] == "1/4"
    assert report["crossing_confirmed"]


def test_discrete_necessity_sobolev_direction():
    """The (q, p0) sequence criterion behind the shared-q Triebel endpoint."""
    report = run_discrete_necessity(4, 2)
    assert report["crossing_confirmed"]


def test_comb_width_sweep_reports_exponents():
    rows = run_comb_width_sweep(2, range(4, 7), widths=(1, F(1, 4)))
    assert len(rows) == 2
    for row in rows:
        assert row["reference_slope"] == 0.5
        assert 0.0 < row["fitted_slope"] < 1.0


def test_tau_piece_suite_layout():
    cases = tau_piece_suite()
    assert len(cases) == 3
    for case in cases:
        fail_source, target = case["fail"]
        hold_source, _ = case["hold"]
        assert fail_source.s == case["critical"] - F(1, 4)
        assert hold_source.s == case["critical"]
        assert not decide(fail_source, target).holds
        assert decide(hold_source, target).holds
        assert predicted_slope(fail_source, target, case["family"]) == F(1, 4)


def test_grid_refinement_stability_small():
    """Doubling N moves a fitted slope by < 0.05 (desk-scale check)."""
    spec = grid_for("annulus", level=7)
    double = type(spec)(spec.d, spec.n * 2, spec.oversampling)
    base = run_sharpness(B(1, 1, 0), M(1, 1), "annulus", range(4, 8), grid=spec)
    fine = run_sharpness(B(1, 1, 0), M(1, 1), "annulus", range(4, 8), grid=double)
    assert abs(base.fitted_slope - fine.fitted_slope) < 0.05
