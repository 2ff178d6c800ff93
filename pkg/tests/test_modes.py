"""Tests for the trigonometric mode basis."""

import numpy as np
import pytest

from src.core.errors import DomainError
from src.core.modes import gram, lift, project, trig_modes
from tests.conftest import make_grid, make_modes


class TestTrigModes:
    def test_orthonormal_on_grid(self):
        modes = make_modes(5)
        assert np.allclose(gram(modes), np.eye(5), atol=1e-12)

    def test_orthonormal_without_grid(self):
        assert np.allclose(gram(trig_modes(4)), np.eye(4), atol=1e-14)

    def test_labels_and_kinetic(self):
        modes = trig_modes(5)
        assert modes.labels[0] == "const"
        assert modes.kinetic[0] == 0.0
        assert np.allclose(modes.kinetic, [0.0, 1.0, 1.0, 4.0, 4.0])

    def test_modes_are_real(self):
        assert make_modes(4).embedding.dtype == np.float64

    def test_three_dimensional_shell(self):
        modes = trig_modes(7, dimension=3)
        assert np.allclose(modes.kinetic[1:], 1.0)

    def test_project_inverts_lift(self):
        modes = make_modes(4)
        c = np.array([0.5, 0.5j, -0.5, 0.5])
        assert np.allclose(project(modes, lift(modes, c)), c, atol=1e-12)

    def test_needs_a_mode(self):
        with pytest.raises(DomainError) as exc_info:
            trig_modes(0)
        assert exc_info.value.parameter == "modes"

    def test_project_needs_embedding(self):
        with pytest.raises(DomainError) as exc_info:
            project(trig_modes(3), np.zeros(64))
        assert exc_info.value.parameter == "modes"

    def test_project_grid_mismatch(self):
        with pytest.raises(DomainError) as exc_info:
            project(trig_modes(3, make_grid(points=32)), np.zeros(64))
        assert exc_info.value.parameter == "grid"
