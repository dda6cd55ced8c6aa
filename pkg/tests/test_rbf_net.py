import numpy as np
import pytest

from dactrl.errors import FitError, ShapeError
from dactrl.plant import builtin_plant
from dactrl.rbf_net import (RbfNetwork, eval_basis, eval_basis_many,
                            fit_ideal_weights, network_output,
                            place_centers_grid)
from dactrl.trajectory import ReferenceSpec, make_reference
from util import nominal_scenario


def _net(centers, widths=None):
    centers = np.atleast_2d(np.asarray(centers, float))
    if widths is None:
        widths = np.ones(centers.shape[0])
    return RbfNetwork(centers=centers, widths=np.asarray(widths, float),
                      weights=np.zeros(centers.shape[0]))


class TestEvalBasis:
    def test_unit_activation_at_center(self):
        net = _net([[0.3, -1.2], [2.0, 2.0]])
        s = eval_basis(net, [0.3, -1.2])
        assert s[0] == 1.0

    def test_unit_normalized_distance(self):
        net = _net([[0.0]], widths=[0.7])
        s = eval_basis(net, [0.7])
        assert s[0] == pytest.approx(np.exp(-1.0), rel=1e-12)

    def test_gaussian_decay_far_away(self):
        net = _net([[0.0, 0.0], [1.0, 1.0]], widths=[0.5, 0.5])
        s = eval_basis(net, [10.0, 10.0])
        assert np.all(s <= np.exp(-100.0))

    def test_values_in_unit_interval(self):
        # stay within a few widths of the centers: further out the exact
        # mathematical value underflows to 0.0 in float64
        rng = np.random.default_rng(3)
        net = _net(rng.normal(size=(20, 3)), widths=rng.uniform(0.5, 2.0, 20))
        for _ in range(50):
            s = eval_basis(net, rng.normal(size=3))
            assert np.all(s > 0.0) and np.all(s <= 1.0)

    def test_dimension_mismatch(self):
        net = _net([[0.0, 0.0]])
        with pytest.raises(ShapeError):
            eval_basis(net, [1.0, 2.0, 3.0])

    def test_many_matches_single(self):
        rng = np.random.default_rng(11)
        net = _net(rng.normal(size=(7, 2)), widths=rng.uniform(0.3, 1.5, 7))
        pts = rng.normal(size=(9, 2))
        table = eval_basis_many(net, pts)
        for i, p in enumerate(pts):
            assert np.array_equal(table[i], eval_basis(net, p))


class TestNetworkOutput:
    def test_zero_weights(self):
        net = _net([[0.0], [1.0]])
        assert network_output(net, [0.4, 0.9]) == 0.0

    def test_selector_weight(self):
        net = RbfNetwork(centers=np.zeros((2, 1)), widths=np.ones(2),
                         weights=np.array([1.0, 0.0]))
        assert network_output(net, [0.5, 0.9]) == 0.5

    def test_weighted_sum(self):
        net = RbfNetwork(centers=np.zeros((2, 1)), widths=np.ones(2),
                         weights=np.array([2.0, 3.0]))
        assert network_output(net, [1.0, 1.0]) == 5.0

    def test_length_mismatch(self):
        net = _net([[0.0], [1.0]])
        with pytest.raises(ShapeError):
            network_output(net, [1.0, 2.0, 3.0])


class TestPlaceCentersGrid:
    def test_square_box_two_per_axis(self):
        centers, widths = place_centers_grid([[0.0, 1.0], [0.0, 1.0]], 2)
        expect = {(-0.05, -0.05), (-0.05, 1.05), (1.05, -0.05), (1.05, 1.05)}
        assert {tuple(np.round(c, 9)) for c in centers} == expect
        assert np.allclose(widths, 1.1)

    def test_spacing_after_inflation(self):
        centers, widths = place_centers_grid([[0.0, 1.0]], 3)
        assert np.allclose(sorted(centers[:, 0]), [-0.05, 0.5, 1.05])
        assert np.allclose(widths, 0.55)

    def test_degenerate_axis_collapses_with_width_floor(self):
        centers, widths = place_centers_grid([[3.0, 3.0], [3.0, 3.0]], 4)
        assert centers.shape == (1, 2)
        assert np.allclose(centers[0], [3.0, 3.0])
        assert np.all(widths > 0.0)

    def test_mixed_degenerate_axis(self):
        centers, widths = place_centers_grid([[0.0, 1.0], [2.0, 2.0]], 3)
        assert centers.shape == (3, 2)
        assert np.all(centers[:, 1] == 2.0)
        assert np.allclose(widths, 0.55)


def _line_traj(horizon=6.0):
    # first-order reference: the desired state sweeps a 1-D interval densely
    return make_reference(ReferenceSpec("sinusoid", n=1, horizon=horizon, h=0.01,
                                        terms=((1.0, 1.0, 0.0),)))


class TestFitIdealWeights:
    def test_zero_target(self):
        traj = _line_traj()
        centers, widths = place_centers_grid(traj.state_box, 5)
        net = RbfNetwork(centers=centers, widths=widths, weights=np.zeros(5))
        fit = fit_ideal_weights(lambda x: 0.0, traj, net, grid_step=0.01)
        assert np.all(fit.w_star == 0.0)
        assert fit.eps_bar == 0.0

    def test_recovers_exactly_representable_target(self):
        # target is the first basis function itself; the normal-equation
        # oracle solved directly must recover the selector weight vector
        traj = _line_traj()
        centers, widths = place_centers_grid(traj.state_box, 5)
        net = RbfNetwork(centers=centers, widths=widths, weights=np.zeros(5))
        target = lambda x: float(eval_basis(net, x)[0])
        fit = fit_ideal_weights(target, traj, net, grid_step=0.01, ridge=1e-13)
        expect = np.zeros(5)
        expect[0] = 1.0
        assert np.max(np.abs(fit.w_star - expect)) < 1e-8
        assert fit.eps_bar < 1e-8

    def test_benchmark_drift_residual(self):
        # fixture: 49-node grid over the nominal reference reaches ~9e-6
        sc = nominal_scenario("B")
        traj = make_reference(ReferenceSpec("sinusoid", n=2, horizon=sc.horizon,
                                            h=sc.h, terms=sc.reference.terms))
        centers, widths = place_centers_grid(traj.state_box, 7)
        net = RbfNetwork(centers=centers, widths=widths, weights=np.zeros(49))
        plant = builtin_plant("P1")
        fit = fit_ideal_weights(plant.f, traj, net, grid_step=0.01)
        assert fit.eps_bar < 1e-2   # required accuracy
        assert fit.eps_bar < 1e-4   # recorded headroom for this fixture

    def test_residuals_never_exceed_eps_bar(self):
        traj = _line_traj()
        centers, widths = place_centers_grid(traj.state_box, 6)
        net = RbfNetwork(centers=centers, widths=widths, weights=np.zeros(6))
        target = lambda x: float(np.sin(3.0 * x[0]))
        fit = fit_ideal_weights(target, traj, net, grid_step=0.02)
        ts = np.arange(0.0, traj.horizon + 0.01, 0.02)
        pts = traj.x_d_table(ts)
        resid = np.array([target(p) for p in pts]) - eval_basis_many(net, pts) @ fit.w_star
        assert np.max(np.abs(resid)) <= fit.eps_bar + 1e-14

    def test_more_nodes_never_fit_worse(self):
        # capacity growth on the benchmark target
        sc = nominal_scenario("B")
        traj = make_reference(ReferenceSpec("sinusoid", n=2, horizon=sc.horizon,
                                            h=sc.h, terms=sc.reference.terms))
        plant = builtin_plant("P1")
        eps = []
        for per_axis in (3, 4, 6):
            centers, widths = place_centers_grid(traj.state_box, per_axis)
            net = RbfNetwork(centers=centers, widths=widths,
                             weights=np.zeros(centers.shape[0]))
            eps.append(fit_ideal_weights(plant.f, traj, net, grid_step=0.01).eps_bar)
        assert eps[1] <= eps[0] + 1e-9
        assert eps[2] <= eps[1] + 1e-9

    def test_too_few_samples(self):
        traj = _line_traj()
        centers, widths = place_centers_grid(traj.state_box, 8)
        net = RbfNetwork(centers=centers, widths=widths, weights=np.zeros(8))
        with pytest.raises(FitError):
            fit_ideal_weights(lambda x: 0.0, traj, net, grid_step=2.0)
