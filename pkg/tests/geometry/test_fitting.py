"""Tests for the quadratic least-squares fit."""

from __future__ import annotations

import numpy as np
import pytest

from cone_tools.core.exceptions import InsufficientPoints, SingularSystem, ValidationError
from cone_tools.geometry.fitting import eval_quadratic, fit_quadratic


class TestFitQuadratic:
    """Tests for fit_quadratic."""

    def test_exact_parabola(self) -> None:
        """Verify points on y = x^2 give (1, 0, 0)."""
        coeffs = fit_quadratic([0, 1, 2, 3], [0, 1, 4, 9])
        np.testing.assert_allclose(coeffs, (1.0, 0.0, 0.0), atol=1e-9)

    def test_line_degenerates(self) -> None:
        """Verify collinear data gives a zero quadratic term."""
        coeffs = fit_quadratic([0, 1, 2, 3], [1, 2, 3, 4])
        np.testing.assert_allclose(coeffs, (0.0, 1.0, 1.0), atol=1e-9)

    def test_noisy_samples_within_three_sigma(self) -> None:
        """Verify noisy fits land within three standard errors of the generator."""
        rng = np.random.default_rng(7)
        truth = np.array([0.004, 0.03, 0.1])
        sigma = 0.05
        x = np.linspace(4.0, 16.0, 100)
        y = eval_quadratic(tuple(truth), x) + rng.normal(0.0, sigma, x.size)
        coeffs = np.array(fit_quadratic(x, y))
        design = np.column_stack((x * x, x, np.ones_like(x)))
        stderr = sigma * np.sqrt(np.diag(np.linalg.inv(design.T @ design)))
        assert np.all(np.abs(coeffs - truth) <= 3.0 * stderr)

    def test_error_curve_anchors(self) -> None:
        """Verify a near-linear error curve passes close to its anchors."""
        x = np.arange(4.0, 16.5, 0.5)
        y = 0.5 + (x - 10.0) / 12.0 + 0.002 * (x - 10.0) ** 2
        coeffs = fit_quadratic(x, y)
        assert float(eval_quadratic(coeffs, 10.0)) == pytest.approx(0.5, abs=0.1)
        assert float(eval_quadratic(coeffs, 16.0)) == pytest.approx(1.0, abs=0.1)

    def test_too_few_points(self) -> None:
        """Verify two points raise InsufficientPoints."""
        with pytest.raises(InsufficientPoints):
            fit_quadratic([0, 1], [0, 1])

    def test_repeated_abscissae(self) -> None:
        """Verify fewer than three distinct x values raise SingularSystem."""
        with pytest.raises(SingularSystem):
            fit_quadratic([1, 1, 2, 2], [0, 1, 2, 3])

    def test_length_mismatch(self) -> None:
        """Verify differing lengths are rejected."""
        with pytest.raises(ValidationError):
            fit_quadratic([0, 1, 2], [0, 1])


class TestFitQuadraticRandom:
    """Randomized checks of the least-squares fit."""

    def test_random_triples_recovered(self) -> None:
        """Verify exact samples of 100 random quadratics give back their coefficients."""
        rng = np.random.default_rng(37)
        x = np.arange(4.0, 16.5, 0.5)
        for _ in range(100):
            truth = rng.uniform(-1.0, 1.0, 3)
            coeffs = fit_quadratic(x, eval_quadratic(tuple(truth), x))
            np.testing.assert_allclose(coeffs, truth, atol=1e-8)

    def test_no_triple_beats_the_fit(self) -> None:
        """Verify no random coefficient triple has a smaller squared residual on noisy data."""
        rng = np.random.default_rng(41)
        x = np.linspace(4.0, 16.0, 50)
        y = eval_quadratic((0.004, 0.03, 0.1), x) + rng.normal(0.0, 0.05, x.size)
        best = float(np.sum((eval_quadratic(fit_quadratic(x, y), x) - y) ** 2))
        for _ in range(100):
            triple = (rng.normal(0.004, 0.01), rng.normal(0.03, 0.1), rng.normal(0.1, 0.5))
            assert best <= float(np.sum((eval_quadratic(triple, x) - y) ** 2))
