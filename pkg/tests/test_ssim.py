"""Structural-similarity metric used by the synthesizer loss."""

import numpy as np
import pytest

from melsynth.nn_core import Tensor
from melsynth.student import gaussian_window, ssim_index

from conftest import gradcheck


class TestGaussianWindow:
    def test_normalized(self):
        w = gaussian_window(11)
        assert w.sum() == pytest.approx(1.0, abs=1e-12)

    def test_symmetric_with_center_peak(self):
        w = gaussian_window(11)
        assert np.allclose(w, w[::-1])
        assert np.argmax(w) == 5

    def test_width_controls_spread(self):
        narrow = gaussian_window(11, sigma=0.5)
        wide = gaussian_window(11, sigma=3.0)
        assert narrow[5] > wide[5]


class TestSsimIndex:
    def test_identical_images_score_one(self, rng):
        x = rng.normal(size=(40, 60)).astype(np.float32)
        assert float(ssim_index(x, x).data) == pytest.approx(1.0, abs=1e-6)

    def test_symmetric_in_arguments(self, rng):
        x = rng.normal(size=(20, 30)).astype(np.float32)
        y = rng.normal(size=(20, 30)).astype(np.float32)
        assert float(ssim_index(x, y).data) == float(ssim_index(y, x).data)

    def test_constant_images_match_closed_form(self):
        # zero variance everywhere: only the luminance term survives.
        # values shift by +4 before windowing, so 0.5 -> 4.5 and 0.6 -> 4.6.
        x = np.full((16, 24), 0.5)
        y = np.full((16, 24), 0.6)
        c1 = (0.01 * 8.0) ** 2
        want = (2 * 4.5 * 4.6 + c1) / (4.5**2 + 4.6**2 + c1)
        assert float(ssim_index(x, y).data) == pytest.approx(want, abs=1e-6)
        # float32 inputs run the float32 path and land close but looser
        got32 = float(ssim_index(x.astype(np.float32), y.astype(np.float32)).data)
        assert got32 == pytest.approx(want, abs=1e-4)

    def test_bounded_by_one(self, rng):
        for _ in range(5):
            x = rng.normal(size=(12, 18)).astype(np.float32)
            y = rng.normal(size=(12, 18)).astype(np.float32)
            assert abs(float(ssim_index(x, y).data)) <= 1.0 + 1e-6

    def test_dissimilar_scores_below_similar(self, rng):
        x = rng.normal(size=(20, 40)).astype(np.float32)
        near = x + rng.normal(scale=0.05, size=x.shape).astype(np.float32)
        far = rng.normal(size=x.shape).astype(np.float32)
        assert float(ssim_index(x, near).data) > float(ssim_index(x, far).data)

    def test_window_shrinks_for_small_images(self, rng):
        x = rng.normal(size=(5, 8)).astype(np.float32)
        assert float(ssim_index(x, x).data) == pytest.approx(1.0, abs=1e-6)
        tiny = rng.normal(size=(1, 1)).astype(np.float32)
        assert float(ssim_index(tiny, tiny).data) == pytest.approx(1.0, abs=1e-6)

    def test_shape_mismatch_rejected(self, rng):
        x = rng.normal(size=(4, 5)).astype(np.float32)
        y = rng.normal(size=(4, 6)).astype(np.float32)
        with pytest.raises(ValueError):
            ssim_index(x, y)

    def test_saturated_values_get_zero_gradient(self):
        # post-shift values beyond [0, 8] are clamped, cutting the gradient
        x = Tensor(np.full((6, 9), 30.0), requires_grad=True)
        y = Tensor(np.full((6, 9), 30.0))
        out = ssim_index(x, y)
        assert float(out.data) == pytest.approx(1.0, abs=1e-6)
        out.backward()
        assert np.all(x.grad == 0.0)

    def test_gradients_match_finite_differences(self, rng):
        x = Tensor(rng.normal(size=(4, 6)), requires_grad=True)
        y = Tensor(rng.normal(size=(4, 6)))
        gradcheck(lambda: ssim_index(x, y), [x])
