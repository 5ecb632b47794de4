import numpy as np
import pytest

from chaoslab.errors import PreconditionError
from chaoslab.fourier import (CoefficientField, GridField2D,
                              coefficients_to_grid, grid_bracket)
from chaoslab.laxpairs import (VectorField3D, bracket_operator_matrix,
                               compatibility_residual_2d, isospectrality_check,
                               jacobi_defect, lax_3d_scalar, lax_3d_vector,
                               lax_A_2d, lax_L_2d, rossby_L)


def unit_random_grid(rng, box=8, n=64):
    c = CoefficientField.random(box, rng, decay=0.15)
    return coefficients_to_grid(c.scaled(1.0 / np.sqrt(c.enstrophy())), n)


class TestLax2D:
    def test_self_bracket_vanishes(self, rng):
        omega = unit_random_grid(rng)
        assert np.max(np.abs(lax_L_2d(omega, omega).values)) == 0.0

    def test_oblique_pair_hand_value(self):
        # f_x g_y - f_y g_x with f = cos(x+y), g = cos(x-y):
        # (-s+)(+s-) - (-s+)(-s-) = -2 s+ s-
        omega = GridField2D.from_function(64, lambda x, y: np.cos(x + y))
        phi = GridField2D.from_function(64, lambda x, y: np.cos(x - y))
        got = lax_L_2d(omega, phi)
        expected = GridField2D.from_function(
            64, lambda x, y: -2.0 * np.sin(x + y) * np.sin(x - y))
        assert np.max(np.abs(got.values - expected.values)) < 1e-13

    def test_constant_eigenfunction(self, rng):
        omega = unit_random_grid(rng)
        const = GridField2D(np.full((64, 64), 2.2))
        assert np.max(np.abs(lax_L_2d(omega, const).values)) < 1e-13
        assert np.max(np.abs(lax_A_2d(omega, const).values)) < 1e-13

    def test_jacobi_battery(self, rng):
        worst = 0.0
        for _ in range(100):
            worst = max(worst, jacobi_defect(unit_random_grid(rng),
                                             unit_random_grid(rng),
                                             unit_random_grid(rng)))
        assert worst < 1e-10


class TestCompatibility:
    def test_euler_transport_vanishes(self, rng):
        omega = CoefficientField.random(5, rng, decay=0.2)
        omega = omega.scaled(1.0 / np.sqrt(omega.enstrophy()))
        phis = [unit_random_grid(rng, box=6) for _ in range(3)]
        rep = compatibility_residual_2d(omega, phis, 64)
        assert rep.residuals["jacobi_max"] < 1e-10
        assert rep.residuals["transport_max"] < 1e-10

    def test_steady_shear_transport_zero(self, rng):
        omega = CoefficientField.single_pair(5, (1, 1), 0.8)
        phis = [unit_random_grid(rng, box=6)]
        rep = compatibility_residual_2d(omega, phis, 64)
        assert rep.residuals["transport_max"] < 1e-12

    def test_non_euler_rule_detected(self, rng):
        omega = CoefficientField.random(5, rng, decay=0.2)
        omega = omega.scaled(1.0 / np.sqrt(omega.enstrophy()))
        phis = [unit_random_grid(rng, box=6) for _ in range(2)]
        rep = compatibility_residual_2d(omega, phis, 64,
                                        time_derivative=lambda w: w)
        assert rep.residuals["transport_max"] > 1e-3


class TestIsospectrality:
    def test_steady_state_distance_zero(self):
        omega = CoefficientField.single_pair(4, (1, 1), 1.3)
        rep = isospectrality_check(omega, T=2.0, dt=0.01)
        assert rep.residuals["hausdorff"] < 1e-10

    def test_zero_field_spectra_trivial(self):
        omega = CoefficientField(3)
        rep = isospectrality_check(omega, T=0.5, dt=0.01)
        assert rep.residuals["hausdorff"] == 0.0
        assert np.max(np.abs(rep.spectra["initial"])) == 0.0

    def test_small_amplitude_drift_reported(self, rng):
        # the drift under truncated evolution is a measurement, not a
        # contract: compression does not commute with the evolution, and
        # enlarging the operator box adds boundary-sensitive eigenvalues
        # near the essential spectrum (measured to grow from box 4 to 6)
        omega = CoefficientField.random(4, rng, decay=0.3)
        omega = omega.scaled(0.1 / np.sqrt(omega.enstrophy()))
        d4 = isospectrality_check(omega, T=1.0, dt=0.01, box=4)
        d6 = isospectrality_check(omega.embedded(6), T=1.0, dt=0.01, box=6)
        assert np.isfinite(d4.residuals["hausdorff"])
        assert np.isfinite(d6.residuals["hausdorff"])
        assert d4.residuals["hausdorff"] < 0.1  # small-amplitude sanity scale

    def test_operator_matrix_against_bracket(self, rng):
        # a matrix column is the box projection of {Omega, e^{iq.X}}
        omega = CoefficientField.random(3, rng)
        box = 3
        mat = bracket_operator_matrix(omega, box)
        modes = [(k1, k2) for k1 in range(-box, box + 1)
                 for k2 in range(-box, box + 1) if (k1, k2) != (0, 0)]
        q = (1, -2)
        jq = modes.index(q)
        x, y = GridField2D.coordinates(64)
        omega_grid = coefficients_to_grid(omega, 64)
        phi = GridField2D(np.exp(1j * (q[0] * x + q[1] * y)))
        n = 64
        bracket_hat = np.fft.fft2(grid_bracket(omega_grid, phi).values) / (n * n)
        for i, k in enumerate(modes):
            assert abs(bracket_hat[k[0] % n, k[1] % n] - mat[i, jq]) < 1e-11

    def test_box_cap(self):
        with pytest.raises(PreconditionError):
            isospectrality_check(CoefficientField(8), T=0.1, dt=0.01, box=8)


class TestRossby:
    def test_beta_zero_reduces_to_plain_bracket(self, rng):
        omega, phi = unit_random_grid(rng), unit_random_grid(rng)
        a = rossby_L(omega, 0.0, phi)
        b = lax_L_2d(omega, phi)
        assert np.max(np.abs(a.values - b.values)) == 0.0

    def test_zero_vorticity_pure_drift(self):
        omega = GridField2D(np.zeros((64, 64)))
        phi = GridField2D.from_function(64, lambda x, y: np.cos(x))
        got = rossby_L(omega, 1.0, phi)
        expected = GridField2D.from_function(64, lambda x, y: np.sin(x))
        assert np.max(np.abs(got.values - expected.values)) < 1e-13

    def test_constant_phi(self, rng):
        omega = unit_random_grid(rng)
        const = GridField2D(np.full((64, 64), 1.0))
        assert np.max(np.abs(rossby_L(omega, 0.7, const).values)) < 1e-13


class TestLax3D:
    def test_divergence_free_and_curl(self):
        u = VectorField3D.abc_flow(16)
        assert u.divergence_defect() < 1e-12
        curl = u.curl()
        defect = max(np.max(np.abs(curl.components[i] - u.components[i]))
                     for i in range(3))
        assert defect < 1e-12  # ABC is a curl eigenfield

    def test_beltrami_scalar_identity(self):
        u = VectorField3D.abc_flow(16)
        omega = u.curl()
        x, y, z = VectorField3D.coordinates(16)
        phi = np.cos(x) * np.sin(y) + np.cos(z)
        L, A = lax_3d_scalar(omega, u, phi)
        assert np.max(np.abs(L - A)) < 1e-10

    def test_constant_phi_annihilated(self):
        u = VectorField3D.abc_flow(16)
        L, A = lax_3d_scalar(u.curl(), u, np.full((16, 16, 16), 3.0))
        assert np.max(np.abs(L)) < 1e-12 and np.max(np.abs(A)) < 1e-12

    def test_uniform_velocity_scalar(self):
        n = 16
        u = VectorField3D.uniform(n, (1.0, 0.0, 0.0))
        zero = VectorField3D(np.zeros((3, n, n, n)))
        x, y, z = VectorField3D.coordinates(n)
        phi = np.cos(x) * np.sin(y)
        L, A = lax_3d_scalar(zero, u, phi)
        assert np.max(np.abs(L)) == 0.0
        assert np.max(np.abs(A - (-np.sin(x) * np.sin(y)))) < 1e-12

    def test_vector_pair_annihilates_vorticity(self):
        u = VectorField3D.abc_flow(16)
        omega = u.curl()
        L, A = lax_3d_vector(omega, u, omega)
        assert max(np.max(np.abs(L.components[i])) for i in range(3)) < 1e-12
        # Beltrami: u is also annihilated by both
        Lu, Au = lax_3d_vector(omega, u, u)
        assert max(np.max(np.abs(Lu.components[i])) for i in range(3)) < 1e-10
        assert max(np.max(np.abs(Au.components[i])) for i in range(3)) < 1e-10

    def test_uniform_phi_gives_gradient_term(self):
        u = VectorField3D.abc_flow(16)
        omega = u.curl()
        phi = VectorField3D.uniform(16, (1.0, 0.0, 0.0))
        L, _ = lax_3d_vector(omega, u, phi)
        from chaoslab.laxpairs import _deriv3
        for i in range(3):
            expected = -_deriv3(omega.components[i], 0)
            assert np.max(np.abs(L.components[i] - expected)) < 1e-12

    def test_curl_mismatch_rejected(self):
        u = VectorField3D.abc_flow(16)
        wrong = VectorField3D(2.0 * u.curl().components)
        x, y, z = VectorField3D.coordinates(16)
        with pytest.raises(PreconditionError):
            lax_3d_scalar(wrong, u, np.cos(x))

    def test_divergent_velocity_rejected(self):
        n = 16
        x, y, z = VectorField3D.coordinates(n)
        bad = VectorField3D(np.stack([np.sin(x), np.zeros((n, n, n)),
                                      np.zeros((n, n, n))]))
        with pytest.raises(PreconditionError):
            lax_3d_scalar(bad.curl(), bad, np.cos(x))
