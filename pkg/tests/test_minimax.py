import numpy as np
import pytest

from equicheb.curves import (
    Circle,
    Interval,
    Lemniscate,
    capacity_leading_coefficient,
    sample_level_curve,
)
from equicheb.minimax import (
    RankDeficiencyError,
    SolveOptions,
    chebyshev_on_points,
    solve_chebyshev,
    sup_norm_on_curve,
    weighted_ls_monic,
)
from equicheb.series import ComplexPolynomial, monic_faber
from equicheb.curves import phi_series

BERNOULLI = Lemniscate(ComplexPolynomial([-1.0, 0.0, 1.0]), 1.0)


class TestWeightedLsMonic:
    def test_roots_of_unity_orthogonality(self):
        pts = np.exp(2j * np.pi * np.arange(8) / 8)
        w = np.full(8, 1 / 8)
        p = weighted_ls_monic(pts, w, 2, center=0.0, scale=1.0)
        np.testing.assert_allclose(p.coeffs, [0, 0, 1], atol=1e-14)

    def test_three_point_normal_equations(self):
        # minimize |1+a|^2 + |a|^2 + |1+a|^2 over a: a = -2/3 (by hand)
        pts = np.array([-1.0, 0.0, 1.0], dtype=complex)
        w = np.full(3, 1 / 3)
        p = weighted_ls_monic(pts, w, 2, center=0.0, scale=1.0)
        np.testing.assert_allclose(p.coeffs, [-2 / 3, 0, 1], atol=1e-14)

    def test_concentrated_weight_interpolates(self):
        pts = np.array([2.0 + 1.0j, -1.0, 0.5j, 3.0])
        w = np.array([0.0, 1.0, 0.0, 0.0])
        p = weighted_ls_monic(pts, w, 1, center=0.0, scale=1.0)
        np.testing.assert_allclose(p.coeffs, [1.0, 1.0], atol=1e-14)  # z - (-1)

    def test_monic_by_construction(self):
        rng = np.random.default_rng(0)
        pts = rng.standard_normal(20) + 1j * rng.standard_normal(20)
        w = np.full(20, 1 / 20)
        p = weighted_ls_monic(pts, w, 6, center=complex(pts.mean()), scale=2.0)
        assert p.leading() == 1.0

    def test_rank_deficiency(self):
        pts = np.array([1.0, 1.0, 1.0, 1.0])  # one distinct value, two unknowns
        w = np.full(4, 0.25)
        with pytest.raises(RankDeficiencyError):
            weighted_ls_monic(pts, w, 2, center=0.0, scale=1.0)

    def test_too_few_points(self):
        with pytest.raises(RankDeficiencyError):
            weighted_ls_monic(np.array([1.0, 2.0]), np.array([0.5, 0.5]), 2, 0.0, 1.0)


class TestSolveChebyshev:
    def test_circle_monomial(self):
        s = sample_level_curve(Circle(1.0), 2.0, 256)
        sol = solve_chebyshev(s, 3)
        assert sol.converged
        np.testing.assert_allclose(sol.polynomial.coeffs, [0, 0, 0, 1], atol=1e-12)
        assert sol.sup_norm == pytest.approx(8.0, rel=1e-12)

    def test_interval_degree_two(self):
        # oracle for the norm: maximize |(w^2+w^-2)/4| on |w|=2 by dense grid
        w = 2.0 * np.exp(2j * np.pi * np.arange(20001) / 20001)
        norm_oracle = np.abs((w ** 2 + w ** -2) / 4).max()
        assert norm_oracle == pytest.approx(1.0625, abs=1e-6)  # attained at w=2
        s = sample_level_curve(Interval(), 2.0, 256)
        sol = solve_chebyshev(s, 2, SolveOptions(tol_rel=1e-4, max_iter=4000, adapt=False))
        np.testing.assert_allclose(sol.polynomial.coeffs, [-0.5, 0, 1], atol=1e-9)
        assert sol.sup_norm == pytest.approx(1.0625, rel=1e-9)

    def test_bernoulli_even_degree(self):
        for r in (1.5, 3.0):
            s = sample_level_curve(BERNOULLI, r, 256)
            sol = solve_chebyshev(s, 2)
            assert sol.converged
            np.testing.assert_allclose(sol.polynomial.coeffs, [-1, 0, 1], atol=1e-10)
            assert sol.sup_norm == pytest.approx(r ** 2, rel=1e-10)

    def test_unconverged_flagged_not_hidden(self):
        s = sample_level_curve(Interval(), 2.0, 256)
        sol = solve_chebyshev(s, 2, SolveOptions(tol_rel=1e-14, max_iter=5, adapt=False))
        assert not sol.converged
        assert sol.iterations == 5

    def test_weights_sum_to_one(self):
        s = sample_level_curve(Interval(), 2.0, 128)
        sol = solve_chebyshev(s, 3, SolveOptions(tol_rel=1e-4, max_iter=500, adapt=False))
        assert sol.weights.sum() == pytest.approx(1.0, abs=1e-12)

    def test_sup_norm_consistent_with_polynomial(self):
        s = sample_level_curve(BERNOULLI, 2.0, 128)
        sol = solve_chebyshev(s, 3, SolveOptions(tol_rel=1e-4, max_iter=2000, adapt=False))
        recomputed = np.abs(sol.polynomial(s.points)).max()
        assert sol.sup_norm == pytest.approx(recomputed, rel=1e-12)

    def test_optimality_sandwich(self):
        # converged sup norm between the capacity floor and the Faber ceiling
        for fam, r, n in ((Circle(1.0), 2.0, 4), (BERNOULLI, 2.0, 4), (BERNOULLI, 4.0, 3)):
            s = sample_level_curve(fam, r, 512)
            sol = solve_chebyshev(s, n, SolveOptions(tol_rel=3e-4, max_iter=8000, adapt=False))
            assert sol.converged
            fhat = monic_faber(phi_series(fam, n + 1), n)
            faber_sup = np.abs(fhat(s.points)).max()
            assert sol.sup_norm <= faber_sup * (1 + 1e-12)
            c = capacity_leading_coefficient(fam)
            assert sol.sup_norm >= (r / c) ** n * (1 - 1e-6)

    def test_lawson_geometric_mean_monotone(self):
        s = sample_level_curve(BERNOULLI, 2.0, 128)
        sol = solve_chebyshev(
            s, 3, SolveOptions(tol_rel=1e-6, max_iter=400, adapt=False, track_history=True)
        )
        h = sol.geo_mean_history
        assert h is not None and len(h) > 2
        assert np.all(np.diff(h) >= -1e-12 * np.maximum(1.0, np.abs(h[:-1])))

    def test_idempotence(self):
        tol = 3e-4
        s = sample_level_curve(BERNOULLI, 2.0, 256)
        opts = SolveOptions(tol_rel=tol, max_iter=8000, adapt=False)
        sol = solve_chebyshev(s, 3, opts)
        assert sol.converged
        again = chebyshev_on_points(s.points, 3, opts, initial_weights=sol.weights)
        assert abs(again.sup_norm - sol.sup_norm) <= tol * sol.sup_norm

    def test_scale_equivariance(self):
        rng = np.random.default_rng(9)
        pts = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        n, scale = 4, 2.0
        opts = SolveOptions(tol_rel=1e-8, max_iter=3000, adapt=False)
        a = chebyshev_on_points(pts, n, opts)
        b = chebyshev_on_points(scale * pts, n, opts)
        factors = scale ** (n - np.arange(n + 1))
        np.testing.assert_allclose(
            b.polynomial.coeffs, a.polynomial.coeffs * factors, rtol=1e-9, atol=1e-12
        )
        assert b.sup_norm == pytest.approx(a.sup_norm * scale ** n, rel=1e-9)

    def test_adaptive_refinement_stabilizes(self):
        s = sample_level_curve(Circle(1.0), 2.0, 64)
        sol = solve_chebyshev(s, 3, SolveOptions(tol_rel=1e-10, max_iter=50, adapt=True))
        assert sol.converged
        assert sol.sup_norm == pytest.approx(8.0, rel=1e-12)
        assert len(sol.weights) == 128  # one confirming refinement

    def test_cvxpy_cross_check(self):
        cp = pytest.importorskip("cvxpy")
        pts = sample_level_curve(BERNOULLI, 2.0, 128).points
        n = 5
        center = complex(pts.mean())
        scale = float(np.abs(pts - center).max())
        zeta = (pts - center) / scale
        V = np.vander(zeta, n, increasing=True)
        y = scale ** n * zeta ** n
        x = cp.Variable(n, complex=True)
        t = cp.Variable()
        prob = cp.Problem(cp.Minimize(t), [cp.abs(V @ x + y) <= t])
        prob.solve(solver=cp.CLARABEL)
        sol = chebyshev_on_points(pts, n, SolveOptions(tol_rel=1e-12, max_iter=200000, adapt=False))
        # independent solvers agree on the optimal value and the coefficients
        assert sol.sup_norm == pytest.approx(float(t.value), rel=5e-7)
        oracle_sup = float(t.value)
        assert sol.sup_norm <= oracle_sup * (1 + 5e-7)


class TestSupNormOnCurve:
    def test_monomial_on_circle(self):
        p = ComplexPolynomial([0, 0, 0, 1])
        assert sup_norm_on_curve(p, Circle(1.0), 2.0, 256) == pytest.approx(8.0)

    def test_generator_power_on_lemniscate(self):
        p = ComplexPolynomial([-1.0, 0, 1.0])
        for r in (1.5, 2.0, 4.0):
            assert sup_norm_on_curve(p, BERNOULLI, r, 256) == pytest.approx(r ** 2)

    def test_eval_size_contract(self):
        p = ComplexPolynomial([0, 0, 0, 1])
        with pytest.raises(ValueError):
            sup_norm_on_curve(p, Circle(1.0), 2.0, 8)
