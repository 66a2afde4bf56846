"""End-to-end smoke checks of the python surface.

The numeric heavy lifting is validated by the C++ test suites; here we
check that every binding round-trips sensible values on the worked
examples and that errors surface as the right python exceptions.
"""

import math

import pytest

import fairdiv


def test_market_clearing_quantities():
    model = fairdiv.ValueModel.uniform_square()
    sol = fairdiv.solve_ceei(model, [0.1, 0.1], mode="quadrature")
    assert sol["converged"]
    assert sol["q"][0] == pytest.approx(0.2, abs=1e-8)
    assert sol["q"][1] == pytest.approx(0.2, abs=1e-8)
    assert sol["clearing_residual"] < 1e-6
    # prices are the reciprocals of the quantities
    assert sol["p"][0] == pytest.approx(5.0, abs=1e-6)


def test_asymmetric_supplies_shift_the_threshold():
    model = fairdiv.ValueModel.uniform_square()
    sol = fairdiv.solve_ceei(model, [0.1, 0.3], mode="quadrature")
    assert sol["q"][0] == pytest.approx(0.3, abs=1e-8)
    assert sol["q"][1] == pytest.approx(0.45, abs=1e-8)
    assert sol["theta0"][0] == pytest.approx(0.6, abs=1e-8)
    assert sol["region_masses"][1] == pytest.approx(2.0 / 3.0, abs=1e-8)


def test_shadow_costs_of_supply():
    model = fairdiv.ValueModel.uniform_square()
    rep = fairdiv.shadow_costs(model, [0.1, 0.1], mode="quadrature")
    assert rep["c"][0] == pytest.approx(2.0 / 3.0, abs=1e-9)
    assert rep["c"][1] == pytest.approx(2.0 / 3.0, abs=1e-9)
    assert rep["positivity_verified"]
    assert rep["method"] == "geometric"
    # reciprocity of the switching densities: q_i T_ij = q_j T_ji
    q = rep["ceei"]["q"]
    t = rep["T"]
    assert q[0] * t[0][1] == pytest.approx(q[1] * t[1][0], rel=1e-9)


def test_certificate_verdicts():
    uniform = fairdiv.certify(
        fairdiv.ValueModel.uniform_square(), [0.1, 0.1], mode="quadrature"
    )
    assert uniform["verdict"] == "certified_optimal"
    assert uniform["method"] == "two_good_exact"

    corner = fairdiv.certify(
        fairdiv.ValueModel.corner_mass(), [0.1, 0.1], mode="quadrature"
    )
    assert corner["verdict"] == "certificate_fails"
    assert corner["min_tail_mass"] < 0


def test_menu_size_optimization():
    corner = fairdiv.optimize_menu_size(
        fairdiv.ValueModel.corner_mass(), supply=0.1, mode="quadrature"
    )
    assert corner["verdict"] == "three_option_optimal"
    assert corner["z_star"] == pytest.approx(0.6297168174, abs=1e-5)
    assert len(corner["menu"]["bundles"]) == 3

    uniform = fairdiv.optimize_menu_size(
        fairdiv.ValueModel.uniform_square(), supply=0.1, mode="quadrature"
    )
    assert uniform["verdict"] == "two_option_optimal"
    assert uniform["r_half"] == pytest.approx(4.0 / 3.0, abs=1e-9)


def test_menu_simulation():
    model = fairdiv.ValueModel.uniform_square()
    rep = fairdiv.simulate(
        model, [[0.2, 0.0], [0.0, 0.2]], [0.1, 0.1], mc_samples=100_000
    )
    target = 2.0 / 15.0
    assert abs(rep["welfare_v_space"] - target) < 4 * rep["welfare_v_se"]
    assert rep["welfare_theta_space"] == pytest.approx(target, abs=1e-10)
    assert rep["samples"] == 100_000
    assert sum(rep["choice_shares"]) == pytest.approx(1.0)


def test_lottery_game_equilibrium():
    model = fairdiv.ValueModel.uniform_square()
    res = fairdiv.lottery_fixed_point(model, [0.1, 0.3], mode="quadrature")
    assert res["converged"]
    assert res["q"][0] == pytest.approx(0.3, abs=1e-5)
    assert res["q"][1] == pytest.approx(0.45, abs=1e-5)
    assert res["masses"][0] == pytest.approx(1.0 / 3.0, abs=1e-5)


def test_implementability_and_unit_demand():
    model = fairdiv.ValueModel.uniform_square()
    mono = fairdiv.ratio_monotonicity(model, [[0.2, 0.0], [0.0, 0.2]])
    assert mono["holds"]
    assert mono["comparisons"] > 0

    slack = fairdiv.unit_demand_slack([[0.2, 0.0], [0.0, 0.2]])
    assert slack["interpretable"]
    assert slack["max_bundle_mass"] == pytest.approx(0.2)
    assert not fairdiv.unit_demand_slack([[0.7, 0.4]])["interpretable"]


def test_model_factories_and_sampling():
    iid3 = fairdiv.ValueModel.iid(marginal="power", n=3, alpha=2.0)
    assert iid3.n_goods == 3
    assert iid3.exchangeable
    rows = iid3.sample_values(1000, seed=7)
    assert len(rows) == 1000
    assert len(rows[0]) == 3
    assert all(0.0 <= v <= 1.0 for row in rows for v in row)
    mean = sum(v for row in rows for v in row) / 3000.0
    assert abs(mean - 2.0 / 3.0) < 0.02

    custom = fairdiv.ValueModel.custom_piecewise(
        [([0.0, 0.0], [1.0, 1.0], 1.0)]
    )
    assert custom.expected_total_value() == pytest.approx(1.0, abs=1e-12)


def test_errors_surface_as_python_exceptions():
    model = fairdiv.ValueModel.uniform_square()
    with pytest.raises(ValueError, match="strictly positive"):
        fairdiv.solve_ceei(model, [0.1, -0.1])
    with pytest.raises(ValueError, match="integration mode"):
        fairdiv.solve_ceei(model, [0.1, 0.1], mode="exact")
    with pytest.raises(ValueError, match="two goods"):
        fairdiv.optimize_menu_size(fairdiv.ValueModel.iid(n=3), supply=0.1)
    with pytest.raises(RuntimeError, match="did not converge"):
        fairdiv.solve_ceei(
            model, [0.1, 0.1], mode="mc", mc_samples=10_000, seed=1,
            tol_clear=1e-12,
        )
