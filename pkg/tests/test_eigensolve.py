import math

import numpy as np
import pytest
import scipy.optimize
import scipy.special
from scipy.linalg import eigh_tridiagonal

from segpart.errors import ConstraintViolationError, ConvergenceError, EmptyRegionError
from segpart.eigensolve import (
    bessel_first_zero,
    cap_eigenvalue,
    first_dirichlet_eig,
    poincare_check,
    radial_ground_state,
)
from segpart.grid import GridDomain, Mask, ScalarField, build_domain, dirichlet_energy


def tridiag_unit_interval_eigmin(n: int) -> float:
    """Oracle: smallest eigenvalue of the 1-D Dirichlet Laplacian on (0,1)
    with n cells (n-1 interior nodes)."""
    h = 1.0 / n
    d = np.full(n - 1, 2.0 / h**2)
    e = np.full(n - 2, -1.0 / h**2)
    w = eigh_tridiagonal(d, e, select="i", select_range=(0, 0))[0]
    return float(w[0])


class TestMaskedEig:
    def test_square_matches_tensor_oracle(self):
        n = 64
        dom = build_domain("square", n, 1.0)
        res = first_dirichlet_eig(dom, tol=1e-10)
        expected = 2.0 * tridiag_unit_interval_eigmin(n)
        assert res.lam == pytest.approx(expected, rel=1e-9)
        assert res.residual <= 1e-10

    def test_single_node_exact(self):
        dom = build_domain("square", 4, 1.0)
        nodes = np.zeros(dom.mask.shape, dtype=bool)
        nodes[2, 2] = True
        res = first_dirichlet_eig(dom, Mask(dom, nodes))
        assert res.lam == 4.0 / dom.h**2
        assert res.residual == 0.0

    def test_field_normalized_and_nonnegative(self, square_eig_128):
        dom, res = square_eig_128
        l2 = math.sqrt(float((res.field.values**2).sum())) * dom.h
        assert abs(l2 - 1.0) <= 1e-10
        assert np.all(res.field.values >= 0.0)

    def test_rayleigh_consistency(self, square_eig_128):
        dom, res = square_eig_128
        quad = dirichlet_energy(res.field)  # field is L2-normalized
        assert abs(quad - res.lam) <= 10.0 * max(res.residual, 1e-14)

    def test_domain_monotonicity(self):
        rng = np.random.default_rng(21)
        dom = build_domain("square", 24, 1.0)
        for _ in range(5):
            small = dom.mask & (rng.random(dom.mask.shape) < 0.5)
            if not small.any():
                continue
            lam_small = first_dirichlet_eig(dom, Mask(dom, small), tol=1e-7).lam
            lam_big = first_dirichlet_eig(dom, tol=1e-7).lam
            assert lam_small >= lam_big - 1e-6

    def test_disconnected_returns_global_minimum(self):
        dom = build_domain("rectangle", 16, 2.0, 1.0)
        x, _ = dom.coords()
        left = dom.mask & (x < 0.8)
        right = dom.mask & (x > 1.4)  # narrower piece, higher eigenvalue
        both = left | right
        lam_both = first_dirichlet_eig(dom, Mask(dom, both), tol=1e-8)
        lam_left = first_dirichlet_eig(dom, Mask(dom, left), tol=1e-8)
        lam_right = first_dirichlet_eig(dom, Mask(dom, right), tol=1e-8)
        assert lam_both.lam == pytest.approx(min(lam_left.lam, lam_right.lam), rel=1e-6)
        # the eigenfunction lives on the carrying component only
        assert np.all(lam_both.field.values[right] == 0.0) or np.all(
            lam_both.field.values[left] == 0.0
        )

    def test_scaling_law_richardson(self):
        lams = {}
        for n in (32, 64, 128):
            dom = build_domain("disk", n, 1.0)
            lams[n] = first_dirichlet_eig(dom, tol=1e-9).lam
        rich = 2.0 * lams[64] - lams[32]  # first-order model for the staircase
        err_est = abs(lams[64] - lams[32])
        assert abs(rich - lams[128]) <= err_est

    def test_empty_region_raises(self):
        dom = build_domain("square", 8, 1.0)
        with pytest.raises(EmptyRegionError, match="empty region"):
            first_dirichlet_eig(dom, Mask(dom, np.zeros(dom.mask.shape, dtype=bool)))

    def test_nonconvergence_carries_residual(self):
        dom = build_domain("square", 32, 1.0)
        with pytest.raises(ConvergenceError) as err:
            first_dirichlet_eig(dom, tol=1e-14, max_iter=1)
        assert err.value.residual > 0

    def test_determinism(self):
        dom = build_domain("l_shape", 24, 1.0)
        a = first_dirichlet_eig(dom, tol=1e-9, seed=5)
        b = first_dirichlet_eig(dom, tol=1e-9, seed=5)
        assert a.lam == b.lam
        assert np.array_equal(a.field.values, b.field.values)


class TestBesselZero:
    def test_half_order_is_pi(self):
        assert bessel_first_zero(0.5) == pytest.approx(math.pi, abs=1e-10)

    @pytest.mark.parametrize(
        "nu, expected",
        [(0.0, 2.404825557695773), (1.0, 3.831705970207512)],
    )
    def test_against_scipy_oracle(self, nu, expected):
        # independent oracle: scipy Bessel + brentq bracket refinement
        oracle = scipy.optimize.brentq(
            lambda x: scipy.special.jv(nu, x), expected - 0.5, expected + 0.5,
            xtol=1e-13,
        )
        mine = bessel_first_zero(nu)
        assert mine == pytest.approx(oracle, abs=1e-10)
        assert mine == pytest.approx(expected, abs=1e-9)

    def test_out_of_range(self):
        for nu in (-0.1, 5.5):
            with pytest.raises(ValueError):
                bessel_first_zero(nu)


class TestRadialGroundState:
    def test_three_dimensional_closed_form(self):
        out = radial_ground_state(3, 0.5, 256)
        assert out.lambda_bar == pytest.approx(math.pi**2, rel=1e-8)

    def test_planar_matches_bessel(self):
        out = radial_ground_state(2, 0.5, 256)
        j0 = bessel_first_zero(0.0)
        assert out.lambda_bar == pytest.approx(j0 * j0, rel=1e-8)

    @pytest.mark.parametrize("dim", [2, 3, 4, 5])
    def test_profile_shape(self, dim):
        out = radial_ground_state(dim, 0.7, 200)
        assert out.phi[0] == 1.0
        assert abs(out.phi[-1]) <= 1e-8
        inner = out.phi[: -1]
        assert np.all(np.diff(inner) < 0)
        assert np.all(inner > 0)

    def test_input_validation(self):
        with pytest.raises(ValueError):
            radial_ground_state(1, 1.0)
        with pytest.raises(ValueError):
            radial_ground_state(3, -1.0)
        with pytest.raises(ValueError):
            radial_ground_state(3, 1.0, samples=8)


class TestCapSpectrum:
    @pytest.mark.parametrize("dim", [3, 4, 5])
    def test_hemisphere_value(self, dim):
        cs = cap_eigenvalue(dim, 0.0, 4096)
        assert abs(cs.lambda1 - (dim - 1)) <= 1e-6

    def test_hemisphere_profile_is_cosine(self):
        cs = cap_eigenvalue(3, 0.0, 4096)
        assert np.abs(cs.profile - np.cos(cs.theta)).max() <= 1e-4

    def test_planar_interval_value(self):
        cs = cap_eigenvalue(2, 0.0, 2048)
        assert abs(cs.lambda1 - 1.0) <= 1e-6

    def test_theta_r_formula(self):
        cs = cap_eigenvalue(3, 0.4, 512)
        assert cs.theta_r == pytest.approx(math.acos(-0.2))

    def test_monotone_nonincreasing_in_r(self):
        vals = [cap_eigenvalue(3, r, 2048).lambda1 for r in np.arange(0, 0.51, 0.05)]
        assert all(b <= a + 1e-9 for a, b in zip(vals, vals[1:]))

    def test_slope_at_zero_negative(self):
        lam0 = cap_eigenvalue(3, 0.0, 4096).lambda1
        lam_eps = cap_eigenvalue(3, 0.01, 4096).lambda1
        assert (lam_eps - lam0) / 0.01 < 0

    def test_profile_positive_inside_zero_at_edge(self):
        cs = cap_eigenvalue(4, 0.3, 1024)
        assert cs.profile[-1] == 0.0
        assert np.all(cs.profile[:-1] > 0)
        assert cs.profile[0] == 1.0

    def test_input_validation(self):
        with pytest.raises(ValueError):
            cap_eigenvalue(3, 1.0)
        with pytest.raises(ValueError):
            cap_eigenvalue(3, -0.1)


@pytest.fixture(scope="module")
def lune():
    return build_domain("disk_minus_ball", 64, 2.0, 1.0)


class TestPoincare:
    def test_scaling_invariance(self, lune):
        x, y = lune.coords()
        f = ScalarField.from_values(lune, x + y + 1.0)
        g = ScalarField.from_values(lune, 2.0 * (x + y + 1.0))
        assert poincare_check(f, 0.5) == pytest.approx(poincare_check(g, 0.5))

    def test_far_support_reduces_to_interior_quotient(self, lune):
        x, y = lune.coords()
        bump = np.exp(-60.0 * ((x - 0.6) ** 2 + (y - 0.0) ** 2))
        bump[bump < 1e-6] = 0.0
        f = ScalarField.from_values(lune, bump)
        r = 1.0
        ratio = poincare_check(f, r)
        h = lune.h
        rho = np.hypot(x, y)
        ball = rho <= r
        interior = float((f.values[ball] ** 2).sum()) * h * h
        from segpart.grid import gradient_magnitude

        grad = float((gradient_magnitude(f).values[ball] ** 2).sum()) * h * h
        # the Gaussian tail leaves a sub-1e-3 boundary residue
        assert ratio == pytest.approx(interior / (r * r) / grad, rel=1e-3)

    def test_zero_field_rejected(self, lune):
        with pytest.raises(ValueError):
            poincare_check(ScalarField.zeros(lune), 0.5)

    def test_constraint_violation_detected(self, lune):
        vals = np.ones(lune.mask.shape)
        f = ScalarField(lune, np.where(lune.mask, 1.0, 0.0))
        # force a nonzero value inside the excluded ball region
        bad = np.zeros(lune.mask.shape)
        bad[lune.nearest_node((-0.5, 0.0))] = 1.0
        g = ScalarField(GridDomain.raw(lune.nx, lune.ny, lune.h, lune.bbox), bad)
        with pytest.raises(ConstraintViolationError, match="constraint violated"):
            poincare_check(g, 1.0, excluded=(np.hypot(*np.meshgrid(
                lune.xs() + 1.0, lune.ys(), indexing="ij")) <= 1.0))

    def test_uniformly_bounded_over_seeded_fields(self, lune):
        # a single constant works for all r <= R: freeze an empirical bound
        rng = np.random.default_rng(20240117)
        x, y = lune.coords()
        worst = 0.0
        for _ in range(334):
            c = rng.standard_normal(6)
            vals = (
                c[0] + c[1] * x + c[2] * y
                + c[3] * np.sin(2 * x) + c[4] * np.cos(2 * y) + c[5] * x * y
            )
            f = ScalarField.from_values(lune, vals)
            for r in (0.25, 0.5, 1.0):
                worst = max(worst, poincare_check(f, r))
        assert math.isfinite(worst)
        assert worst <= 1.0e4
