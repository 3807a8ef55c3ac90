"""Geometry layer: numerical differentiation contracts, implicit manifolds,
pairs, tubular maps, pushforwards and the triangularity defect."""

import numpy as np
import pytest

from dnclab import catalog, geometry as geo
from dnclab.errors import NoConvergence, OffManifold


class TestJacobian:
    def test_square_function(self):
        j = geo.numeric_jacobian(lambda x: np.array([x[0] ** 2]), [3.0])
        assert abs(j[0, 0] - 6.0) <= 1e-8

    def test_linear_map_exact(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0], [0.0, 1.0]])
        j = geo.numeric_jacobian(lambda x: a @ x, [0.3, -0.2])
        assert np.max(np.abs(j - a)) <= 1e-10

    def test_analytic_jacobian_accepted(self):
        f = geo.SmoothMap(
            1, 1, lambda x: np.array([np.sin(x[0])]), lambda x: np.array([[np.cos(x[0])]])
        )
        assert geo.verify_analytic_jacobian(f, [0.7])
        assert geo.jacobian_consistency_slope(f, [0.7]) >= 1.9

    def test_injected_bug_detected(self):
        f = geo.SmoothMap(
            1, 1, lambda x: np.array([np.sin(x[0])]), lambda x: np.array([[np.cos(x[0]) + 0.01]])
        )
        assert not geo.verify_analytic_jacobian(f, [0.7])
        with pytest.raises(geo.DomainError):
            f.jacobian([0.7], check=True)

    def test_richardson_improves(self):
        fn = lambda x: np.array([np.exp(x[0])])
        plain = geo.numeric_jacobian(fn, [1.0], h=1e-3)
        rich = geo.numeric_jacobian(fn, [1.0], h=1e-3, richardson=True)
        exact = np.e
        assert abs(rich[0, 0] - exact) < abs(plain[0, 0] - exact)


class TestImplicitManifolds:
    def test_circle_tangent(self):
        t = geo.tangent_space(catalog.circle(), [1.0, 0.0])
        assert np.allclose(np.abs(t.ravel()), [0.0, 1.0])

    def test_sphere_tangent_north_pole(self):
        t = geo.tangent_space(catalog.sphere(2), [0.0, 0.0, 1.0])
        assert np.allclose(t[2, :], 0.0)
        assert np.linalg.matrix_rank(t) == 2

    def test_graph_tangent_kernel_oracle(self):
        # oracle: the kernel of [-2x, 1] at x = 1 is spanned by (1, 2)/sqrt(5)
        g = catalog.graph_manifold(lambda u: np.array([u[0] ** 2]), 1, 1, [np.array([1.0])])
        t = geo.tangent_space(g, [1.0, 1.0]).ravel()
        want = np.array([1.0, 2.0]) / np.sqrt(5.0)
        assert np.allclose(np.abs(t), np.abs(want), atol=1e-10)

    def test_validation_at_samples(self):
        for m in (catalog.circle(), catalog.sphere(3), catalog.torus(), catalog.projective_space(2)):
            assert m.validate()["passed"]

    def test_off_manifold_rejected(self):
        with pytest.raises(OffManifold):
            geo.tangent_space(catalog.circle(), [2.0, 0.0])


class TestNewtonProject:
    def test_circle_radial(self):
        assert np.allclose(geo.newton_project(catalog.circle(), [2.0, 0.0]), [1.0, 0.0])

    def test_sphere_vertical(self):
        assert np.allclose(
            geo.newton_project(catalog.sphere(2), [0.0, 0.0, 0.5]), [0.0, 0.0, 1.0], atol=1e-10
        )

    def test_no_convergence_from_singular_start(self):
        with pytest.raises(NoConvergence):
            geo.newton_project(catalog.circle(), [0.0, 0.0])


class TestPairsAndTubulars:
    def test_axis_normal_frame(self):
        pair = catalog.linear_pair(2, 1)
        nu = geo.normal_frame(pair, [2.0, 0.0])
        assert np.allclose(np.abs(nu.ravel()), [0.0, 1.0])

    def test_equator_vertical_direction(self):
        pair = catalog.sphere_equator_pair(2)
        nu = geo.normal_frame(pair, [1.0, 0.0, 0.0])
        assert np.allclose(np.abs(nu.ravel()), [0.0, 0.0, 1.0], atol=1e-12)

    def test_rank_nullity(self):
        pair = catalog.sphere_equator_pair(3)
        for m in pair.small.samples:
            nu = geo.normal_frame(pair, m)
            assert nu.shape[1] == pair.big.dim - pair.small.dim

    def test_sphere_tubular_contract(self):
        pair = catalog.sphere_equator_pair(2)
        assert catalog.sphere_tubular(pair).verify()["passed"]

    def test_flat_tubular_contract(self):
        pair = catalog.linear_pair(3, 1)
        assert catalog.flat_tubular(pair).verify()["passed"]


class TestPushforward:
    def test_linear_stretch(self):
        pair = catalog.linear_pair(2, 1)
        f = geo.SmoothMap(2, 2, lambda z: np.array([z[0], 2.0 * z[1]]), lambda z: np.diag([1.0, 2.0]))
        fp = geo.PairMap(f, pair, pair)
        q, v = geo.normal_map_pushforward(fp, [1.0, 0.0], [0.0, 1.0])
        assert np.allclose(q, [1.0, 0.0]) and np.allclose(v, [0.0, 2.0])

    def test_identity_on_fibers(self):
        pair = catalog.linear_pair(2, 1)
        fp = geo.PairMap(geo.SmoothMap(2, 2, lambda z: z.copy(), lambda z: np.eye(2)), pair, pair)
        _, v = geo.normal_map_pushforward(fp, [0.3, 0.0], [0.0, 0.7])
        assert np.allclose(v, [0.0, 0.7], atol=1e-12)

    def test_fiber_action_from_jacobian(self):
        # f = (x + y^2, y (1 + x^2)) acts on fibers over (a, 0) by scaling 1 + a^2
        pair = catalog.linear_pair(2, 1)
        f = geo.SmoothMap(2, 2, lambda z: np.array([z[0] + z[1] ** 2, z[1] * (1 + z[0] ** 2)]))
        fp = geo.PairMap(f, pair, pair)
        a = 1.0
        _, v = geo.normal_map_pushforward(fp, [a, 0.0], [0.0, 1.0])
        assert np.allclose(v, [0.0, 1 + a * a], atol=1e-8)

    def test_functorial_on_samples(self):
        pair = catalog.linear_pair(2, 1)
        f = geo.SmoothMap(2, 2, lambda z: np.array([z[0] + z[1] ** 2, z[1] * (1 + z[0] ** 2)]))
        g = geo.SmoothMap(2, 2, lambda z: np.array([2 * z[0] + z[1] ** 2, z[1] * (1 + z[1])]))
        fp = geo.PairMap(f, pair, pair)
        gp = geo.PairMap(g, pair, pair)
        comp = geo.PairMap(geo.compose_maps(g, f), pair, pair)
        rng = np.random.Generator(np.random.Philox(key=3))
        for _ in range(10):
            m = np.array([float(rng.uniform(-1, 1)), 0.0])
            x = np.array([0.0, float(rng.uniform(-1, 1))])
            q1, v1 = geo.normal_map_pushforward(comp, m, x)
            qm, vm = geo.normal_map_pushforward(fp, m, x)
            q2, v2 = geo.normal_map_pushforward(gp, qm, vm)
            assert np.allclose(q1, q2, atol=1e-9)
            assert np.allclose(v1, v2, atol=1e-6)


class TestBlockStructure:
    def test_linear_map_residual_at_rounding(self):
        pair = catalog.linear_pair(2, 1)
        f = geo.SmoothMap(2, 2, lambda z: np.array([z[0], 2.0 * z[1]]))
        fp = geo.PairMap(f, pair, pair)
        assert geo.check_block_structure(fp, [1.0, 0.0]) <= 1e-10

    def test_polynomial_fixture_within_tolerance(self):
        pair = catalog.linear_pair(2, 1)
        f = geo.SmoothMap(2, 2, lambda z: np.array([z[0] + z[1] ** 2, z[1] * (1 + z[0] ** 2)]))
        fp = geo.PairMap(f, pair, pair)
        assert geo.check_block_structure(fp, [1.0, 0.0]) <= 1e-6

    def test_curved_fixture_second_order(self):
        pp = catalog.parabola_pair()

        def curved(z):
            x, y = z
            return np.array([x, x * x + (y - x * x) * (1.0 + x + y)])

        fp = geo.PairMap(geo.SmoothMap(2, 2, curved), pp, pp)
        m = pp.small.samples[0]
        r1 = geo.check_block_structure(fp, m, h=1e-3)
        r2 = geo.check_block_structure(fp, m, h=5e-4)
        assert r1 > 0 and 3.0 <= r1 / r2 <= 5.0  # halving the step quarters the defect

    def test_non_pair_map_rejected(self):
        pair = catalog.linear_pair(2, 1)
        f = geo.SmoothMap(2, 2, lambda z: np.array([z[0], z[1] + 1.0]))  # axis misses axis
        fp = geo.PairMap(f, pair, pair)
        with pytest.raises(OffManifold):
            geo.check_block_structure(fp, [0.0, 0.0])


class TestCatalogLookup:
    def test_addressable_by_name_and_params(self):
        m = catalog.get("sphere", k=2, ambient=5)
        assert m.ambient_dim == 5 and m.dim == 2 and m.validate()["passed"]

    def test_unknown_name(self):
        from dnclab.errors import DomainError

        with pytest.raises(DomainError):
            catalog.get("klein-bottle")


class TestNonlinearTransversality:
    def test_identity_always(self):
        plane = catalog.linear_subspace(2, 2)
        z = catalog.linear_subspace(2, 1)
        f = geo.SmoothMap(2, 2, lambda z_: z_.copy(), lambda z_: np.eye(2))
        assert geo.is_transversal_nonlinear(f, plane, z, [0.5, 0.0])

    def test_collapse_fails(self):
        plane = catalog.linear_subspace(2, 2)
        z = catalog.linear_subspace(2, 1)
        f = geo.SmoothMap(2, 2, lambda p: np.array([p[0], 0.0]))
        assert not geo.is_transversal_nonlinear(f, plane, z, [0.0, 0.0])

    def test_projection_generic(self):
        space = catalog.linear_subspace(3, 3)
        line = catalog.linear_subspace(2, 1)
        f = geo.SmoothMap(3, 2, lambda p: p[:2].copy())
        assert geo.is_transversal_nonlinear(f, space, line, [0.5, 0.0, 0.3])
