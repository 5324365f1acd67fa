import numpy as np
import pytest

from saltrack.errors import InvalidInputError
from saltrack.features import (
    HogConfig,
    _block_normalize,
    _cell_histograms,
    apply_window,
    concat,
    hog,
    intensity_feature,
)


def step_edge(h, w):
    img = np.zeros((h, w))
    img[:, w // 2 :] = 1.0
    return img


class TestHog:
    def test_constant_image_is_all_zero(self):
        stack = hog(np.full((16, 16), 0.42))
        np.testing.assert_array_equal(stack.data, 0.0)

    def test_grid_and_channel_shape(self):
        stack = hog(np.random.default_rng(0).random((16, 16)), HogConfig(cell_size=4))
        assert (stack.channels, stack.grid_h, stack.grid_w) == (9, 4, 4)

    def test_step_edge_energy_in_horizontal_bin(self):
        # Central differences on a vertical step put all gradient energy at
        # orientation 0, which votes entirely into bin 0.
        stack = hog(step_edge(8, 8), HogConfig(cell_size=4))
        for r in range(2):
            for c in range(2):
                cell = stack.data[:, r, c]
                assert cell[0] > 0.0
                np.testing.assert_array_equal(cell[1:], 0.0)

    def test_invariant_to_constant_offset(self):
        rng = np.random.default_rng(3)
        img = rng.random((20, 24))
        a = hog(img)
        b = hog(img + 0.37)
        np.testing.assert_allclose(a.data, b.data, atol=1e-12)

    def test_clipped_values_bounded_then_finite(self):
        rng = np.random.default_rng(5)
        cfg = HogConfig()
        img = rng.random((32, 32))
        clipped, out = _block_normalize(_cell_histograms(img, cfg), cfg)
        assert clipped.min() >= 0.0
        assert clipped.max() <= cfg.clip
        assert np.all(np.isfinite(out))
        assert np.all(out >= 0.0)

    def test_too_small_image_raises(self):
        with pytest.raises(InvalidInputError):
            hog(np.zeros((3, 16)), HogConfig(cell_size=4))

    def test_config_validation(self):
        with pytest.raises(InvalidInputError):
            HogConfig(cell_size=0)
        with pytest.raises(InvalidInputError):
            HogConfig(n_bins=1)
        with pytest.raises(InvalidInputError):
            HogConfig(clip=0.0)


class TestIntensityFeature:
    def test_constant_is_zero(self):
        stack = intensity_feature(np.full((8, 8), 0.9), 4)
        np.testing.assert_array_equal(stack.data, 0.0)

    def test_half_and_half(self):
        stack = intensity_feature(step_edge(8, 8), 4)
        np.testing.assert_allclose(
            stack.data[0], [[-0.5, 0.5], [-0.5, 0.5]], atol=1e-15
        )

    def test_grid_matches_hog(self):
        rng = np.random.default_rng(11)
        img = rng.random((21, 17))
        h = hog(img, HogConfig(cell_size=4))
        i = intensity_feature(img, 4)
        assert (h.grid_h, h.grid_w) == (i.grid_h, i.grid_w)

    def test_too_small_raises(self):
        with pytest.raises(InvalidInputError):
            intensity_feature(np.zeros((2, 8)), 4)


class TestApplyWindow:
    def test_ones_window_identity(self):
        stack = hog(np.random.default_rng(0).random((16, 16)))
        out = apply_window(stack, np.ones((4, 4)))
        np.testing.assert_array_equal(out.data, stack.data)

    def test_zero_window(self):
        stack = hog(np.random.default_rng(0).random((16, 16)))
        out = apply_window(stack, np.zeros((4, 4)))
        np.testing.assert_array_equal(out.data, 0.0)

    def test_hann_on_constant_channel_gives_hann(self):
        from saltrack.dcf import hann_window

        from saltrack.features import FeatureStack

        window = hann_window(5, 5)
        stack = FeatureStack(np.ones((1, 5, 5)), 1)
        out = apply_window(stack, window)
        np.testing.assert_array_equal(out.data[0], window)

    def test_dimension_mismatch_raises(self):
        stack = hog(np.random.default_rng(0).random((16, 16)))
        with pytest.raises(InvalidInputError):
            apply_window(stack, np.ones((5, 4)))


class TestConcat:
    def test_shares_grid(self):
        rng = np.random.default_rng(2)
        img = rng.random((16, 16))
        combined = concat([hog(img), intensity_feature(img, 4)])
        assert combined.channels == 10

    def test_mismatched_grids_raise(self):
        with pytest.raises(InvalidInputError):
            concat(
                [
                    intensity_feature(np.zeros((8, 8)), 4),
                    intensity_feature(np.zeros((12, 12)), 4),
                ]
            )
