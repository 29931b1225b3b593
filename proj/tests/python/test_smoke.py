import math

import pytest

import qsmetric as q


@pytest.fixture(scope="module")
def p28():
    return q.Params(2, 8, 8)


def test_version_tags():
    assert q.__version__
    assert q.rng_scheme == "splitmix64-ctr-v1"


def test_params_and_zones(p28):
    assert (p28.n, p28.M, p28.L, p28.capped) == (2, 8, "8", False)
    assert p28.multiplier() == 5
    assert p28.R == "40"
    assert q.zone_counts(p28) == (28, 20, 16)
    assert q.zone_counts(q.Params(2, 16, 16)) == (60, 52, 144)
    assert q.zone_counts(q.Params(3, 8, 8)) == (296, 208, 8)
    with pytest.raises(ValueError):
        q.Params(2, 4, 8)


def test_from_beta():
    p = q.Params.from_beta(2, 16, 3)
    assert p.L == "4096"


def test_weights(p28):
    w = q.weight_exponents(p28, [[2, 2], [1, 1]])
    assert (w.a, w.b, w.frozen) == (1, 1, False)
    assert q.weight_value(p28, w) == "5/8"
    assert q.weight_value_d(p28, w) == pytest.approx(0.625)
    assert q.log_weight_value(p28, w) == pytest.approx(math.log(0.625))

    capped = q.Params(2, 16, 16, capped=True)
    frozen = q.weight_exponents(capped, [[1, 1], [2, 2]])
    assert frozen.frozen and (frozen.a, frozen.b) == (0, 0)
    assert q.weight_value(capped, frozen) == "1"


def test_cube_weight(p28):
    w = q.cube_weight(p28, 2, [17, 17])
    assert (w.a, w.b) == (1, 1)


def test_constants_and_eta(p28):
    c = q.constants(p28)
    assert c["R"] == "40"
    assert c["C1"] == "51200/3"
    assert c["log10_C2"] == pytest.approx(52.8789750981242, rel=1e-12)
    curve = q.eta_curve(p28)
    t = curve["t_star"]
    assert t == pytest.approx(1 / 32)
    # the decay and growth branches agree at t*
    assert q.eta_bound(p28, t * (1 - 1e-9)) == pytest.approx(q.eta_bound(p28, t), rel=1e-6)
    assert q.eta_bound(p28, 1e-4) < q.eta_bound(p28, 1e-2)


def test_stochastic_laws(p28):
    mu = q.geometric_mean(p28)
    assert mu.digits.startswith("0.98323115116599416364")
    assert q.log_multiplier_variance(p28) == pytest.approx(1.8901990462358345, rel=1e-12)
    law = q.multiplier_law(p28)
    assert (law["p1"], law["p2"], law["p3"]) == ("7/16", "5/16", "1/4")
    walk = q.walk_law(q.Params(2, 16, 16))
    assert (walk["p"], walk["q"]) == ("7/16", "9/16")


def test_lln_small(p28):
    stats = q.simulate_lln(p28, 2048, 64, seed=1)
    assert stats.points == 2048
    assert stats.pass_
    assert stats.deviation <= stats.limit


def test_walk_analysis():
    r = q.walk_analysis(q.Params(2, 16, 16), 2000, 500, seed=1)
    assert r.status == "transient"
    assert r.r == "7/9"
    assert r.escape == "2/9"
    assert r.pass_
    rec = q.walk_analysis(q.Params(2, 8, 8), 500, 200, seed=1)
    assert rec.status.startswith("recurrent/critical")
    assert rec.r is None


def test_distance(p28):
    d = q.distance(p28, [0, 0], [64, 64], weight_level=1, resolution_level=2)
    assert d == pytest.approx(2.0)
    assert q.distance(p28, [64, 64], [0, 0], 1, 2) == pytest.approx(d)
    est = q.limit_distance(p28, [0, 0], [8, 8], level=1, level_cap=3)
    assert est.lower_bound <= est.value <= est.upper_bound
    with pytest.raises(RuntimeError):
        q.distance(p28, [0, 0], [512, 512], 1, 3, node_budget=100)


def test_ratio_band(p28):
    r = q.check_ratio_bound(p28, level_cap=2)
    assert r.pass_
    assert r.samples == 16212
    assert r.violations == 0


def test_bounds_sample(p28):
    r = q.bounds_report(p28, "diameter", samples=4, seed=1)
    assert r.pass_
    assert r.check == "diameter"
    assert r.worst_margin >= 1


def test_plan():
    plan = q.make_plan(2, "11/10", beta=3, M=16, m_max=1, km_samples=500)
    assert plan.feasible and plan.mu_lt_one and plan.contraction
    assert plan.rho_star == pytest.approx(0.26828103899211755, rel=1e-12)
    assert "<" in plan.certificate
    assert plan.stages[0].m == 1
    picked = q.choose_parameters(2, "11/10", m_max=0, km_samples=100)
    assert (picked.params.M, picked.beta) == (16, "3")
    rows = q.content_table(plan, samples=200, seed=1)
    assert rows[0].m == 1 and rows[0].k == plan.stages[0].k


def test_heatmap(p28):
    svg = q.heatmap_svg(p28, level=1)
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert svg.count("<rect") == 64 + 3  # cells plus legend swatches
    assert svg == q.heatmap_svg(p28, level=1)
    with pytest.raises(ValueError):
        q.heatmap_svg(p28, level=1, slice=[0])
