import math
import unittest

import numpy as np

from pauliplane.failures import AdmissibilityError, ConvergenceFailure, DomainError
from pauliplane.hamiltonian import apply_h
from pauliplane.models import radial


class CoulombLevelsTestCase(unittest.TestCase):

    def test_ground_state_without_spin_coupling(self):
        levels = radial.coulomb_levels(2.0, 0.5, 0.0, 1, 2)
        self.assertEqual([n for n, _ in levels], [0, 1, 2])
        self.assertAlmostEqual(levels[0][1], -4.0)
        self.assertAlmostEqual(levels[1][1], -4.0 / 9)

    def test_higher_angular_momentum(self):
        levels = radial.coulomb_levels(2.0, 1.5, 0.0, 1, 0)
        self.assertAlmostEqual(radial.radial_nu(1.5, 0.0, 1), 1.0)
        self.assertAlmostEqual(levels[0][1], -4.0 / 9)

    def test_equation_coefficients(self):
        coefficient, alpha = radial.radial_equation_coeff(1.5, -1, 0.6, 2.0)
        self.assertAlmostEqual(coefficient, 2.25 + math.sqrt(2.25 + 0.36))
        self.assertEqual(alpha, 2.0)

    def test_integer_k(self):
        with self.assertRaises(AdmissibilityError) as context:
            radial.coulomb_levels(2.0, 1.0, 0.0, 1, 1)
        self.assertEqual(context.exception.condition, radial.HALF_INTEGER_CONDITION)

    def test_spin_orbit_condition(self):
        with self.assertRaises(AdmissibilityError) as context:
            radial.radial_equation_coeff(0.5, 1, 0.5, 2.0)
        self.assertEqual(context.exception.condition, radial.SPIN_ORBIT_CONDITION)
        radial.radial_equation_coeff(0.5, -1, 0.5, 2.0)

    def test_vanishing_angular_spinor(self):
        self.assertRaises(DomainError, radial.radial_equation_coeff, 0.5, -1, 0.0, 2.0)
        self.assertRaises(DomainError, radial.radial_equation_coeff, 0.5, 2, 0.0, 2.0)

    def test_repulsive_coupling(self):
        self.assertRaises(DomainError, radial.coulomb_levels, -1.0, 0.5, 0.0, 1, 1)


class RadialFiniteDifferenceTestCase(unittest.TestCase):

    def test_agrees_with_closed_form(self):
        log = []
        spectrum = radial.radial_fd_spectrum(2.0, 0.5, 0.0, 1, convergence_log=log)
        expected = [energy for _, energy in radial.coulomb_levels(2.0, 0.5, 0.0, 1, 2)]
        np.testing.assert_allclose(spectrum.levels, expected, rtol=1e-4)
        self.assertEqual(len(log), 9)
        self.assertEqual({entry["N"] for entry in log}, {6000, 12000, 24000})
        self.assertEqual(spectrum.r_max, 60.0)
        self.assertLess(spectrum.box_change, 1e-4)

    def test_spin_coupled_level(self):
        spectrum = radial.radial_fd_spectrum(2.0, 1.5, 0.6, 1, n_levels=2)
        expected = [energy for _, energy in radial.coulomb_levels(2.0, 1.5, 0.6, 1, 1)]
        np.testing.assert_allclose(spectrum.levels, expected, rtol=1e-4)

    def test_box_growth_for_wide_states(self):
        expected = [energy for _, energy in radial.coulomb_levels(2.0, 2.5, 0.0, 1, 2)]
        self.assertRaises(ConvergenceFailure, radial.radial_fd_spectrum, 2.0, 2.5, 0.0, 1)
        log = []
        spectrum = radial.radial_fd_spectrum(2.0, 2.5, 0.0, 1, max_growth=2, convergence_log=log)
        np.testing.assert_allclose(spectrum.levels, expected, rtol=1e-4)
        self.assertGreater(spectrum.r_max, 60.0)
        self.assertTrue(all(entry["r_max"] == spectrum.r_max for entry in log))

    def test_levels_across_angular_momenta(self):
        for k in (0.5, 1.5, 2.5):
            for mu, epsilon in ((0.0, 1), (0.8, -1)):
                expected = [energy for _, energy in radial.coulomb_levels(2.0, k, mu, epsilon, 2)]
                spectrum = radial.radial_fd_spectrum(2.0, k, mu, epsilon, max_growth=3)
                np.testing.assert_allclose(spectrum.levels, expected, rtol=1e-4, err_msg="k = %g, μ = %g" % (k, mu))

    def test_small_box(self):
        self.assertRaises(ConvergenceFailure, radial.radial_fd_spectrum, 2.0, 0.5, 0.0, 1, 5.0, 1000)

    def test_coarse_grid(self):
        self.assertRaises(DomainError, radial.radial_fd_spectrum, 2.0, 0.5, 0.0, 1, 60.0, 100)

    def test_free_disc(self):
        levels = radial.bessel_levels(0.5, 0.0, 1, 10.0, 2)
        self.assertAlmostEqual(levels[0], (2.404825557695773 / 10) ** 2, places=8)
        self.assertLess(levels[0], levels[1])


class WhittakerTestCase(unittest.TestCase):

    def test_ground_state_reading(self):
        profile = radial.whittaker_eigenfunction(2.0, 0.5, 0.0, 1, 0)
        self.assertEqual(profile.reading, "consistent")
        self.assertAlmostEqual(profile.energy, -4.0)

    def test_excited_state(self):
        profile = radial.whittaker_eigenfunction(2.0, 1.5, 0.6, 1, 1)
        coefficient, _ = radial.radial_equation_coeff(1.5, 1, 0.6, 2.0)
        self.assertLess(profile.ode_residual(coefficient, 2.0), 1e-6)
        self.assertAlmostEqual(profile.energy, radial.coulomb_levels(2.0, 1.5, 0.6, 1, 1)[1][1])

    def test_positive_energy(self):
        self.assertRaises(DomainError, radial.whittaker_solution, 2.0, 0.75, 0.5)

    def test_negative_level(self):
        self.assertRaises(DomainError, radial.whittaker_eigenfunction, 2.0, 0.5, 0.0, 1, -1)


class RadialStateTestCase(unittest.TestCase):

    def setUp(self):
        rng = np.random.default_rng(5)
        radius, angle = rng.uniform(0.5, 3.0, 12), rng.uniform(0, 2 * np.pi, 12)
        self.x1, self.x2 = radius * np.cos(angle), radius * np.sin(angle)

    def assert_eigenstate(self, alpha, k, mu, epsilon, n):
        psi = radial.radial_state_2d(alpha, k, mu, epsilon, n)
        energy = radial.coulomb_levels(alpha, k, mu, epsilon, n)[n][1]
        result = apply_h(radial.radial_hamiltonian(mu, alpha), psi, self.x1, self.x2)
        values = psi(self.x1, self.x2)
        np.testing.assert_allclose(result, energy * values, atol=1e-9 * np.max(np.abs(values)))

    def test_plain_coulomb_state(self):
        self.assert_eigenstate(2.0, 0.5, 0.0, 1, 0)

    def test_spin_coupled_state(self):
        self.assert_eigenstate(2.0, 1.5, 0.6, 1, 1)

    def test_lower_branch_state(self):
        self.assert_eigenstate(2.0, 0.5, 0.8, -1, 0)

    def test_origin_excluded(self):
        psi = radial.radial_state_2d(2.0, 0.5, 0.0, 1, 0)
        self.assertRaises(DomainError, psi.check_domain, np.array([0.0]), np.array([0.0]))


if __name__ == '__main__':
    unittest.main()
