"""SSIM anchors and invariants."""

import numpy as np
import pytest

from svgforge.core import parse_svg
from svgforge.errors import DimensionMismatchError
from svgforge.raster import SsimParams, rasterize, ssim, ssim_luminance

# C1/(1+C1) with the default k1 = 0.01 and unit dynamic range
CONST_0_VS_1 = 1e-4 / (1 + 1e-4)


def _render(body: str, size: int = 96) -> "object":
    return rasterize(parse_svg(f'<svg viewBox="0 0 128 128">{body}</svg>'), size, 2)


@pytest.fixture(scope="module")
def sample_rasters():
    a = _render('<g><circle cx="64" cy="64" r="40" fill="#336699"/></g>')
    b = _render('<g><rect x="24" y="24" width="80" height="80" fill="#993366"/></g>')
    return a, b


class TestSsimAnchors:
    def test_self_similarity_exactly_one(self, sample_rasters):
        a, _ = sample_rasters
        assert ssim(a, a) == pytest.approx(1.0, abs=1e-9)

    def test_symmetry(self, sample_rasters):
        a, b = sample_rasters
        assert ssim(a, b) == pytest.approx(ssim(b, a), abs=1e-12)

    def test_constant_zero_vs_constant_one(self):
        z = np.zeros((64, 64))
        o = np.ones((64, 64))
        assert ssim_luminance(z, o) == pytest.approx(CONST_0_VS_1, abs=1e-6)

    def test_range(self, sample_rasters):
        a, b = sample_rasters
        v = ssim(a, b)
        assert -1.0 <= v <= 1.0

    def test_dimension_mismatch(self, sample_rasters):
        a, _ = sample_rasters
        small = _render("", size=64)
        with pytest.raises(DimensionMismatchError):
            ssim(a, small)

    def test_window_must_be_odd(self):
        with pytest.raises(ValueError):
            SsimParams(window=10)


class TestSsimInvariants:
    def test_identical_permutation_row_reversal(self, sample_rasters):
        # Windowed SSIM is preserved by permutations that preserve window
        # neighborhoods; simultaneous row reversal is the canonical one.
        a, b = sample_rasters
        la = np.flipud(np.asarray(ssim_to_lum(a)))
        lb = np.flipud(np.asarray(ssim_to_lum(b)))
        assert ssim_luminance(la, lb) == pytest.approx(ssim(a, b), abs=1e-9)

    def test_self_similarity_random_images(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            x = rng.random((32, 32))
            assert ssim_luminance(x, x) == pytest.approx(1.0, abs=1e-9)

    def test_distinct_images_below_one(self, sample_rasters):
        a, b = sample_rasters
        assert ssim(a, b) < 1.0


def ssim_to_lum(img):
    from svgforge.raster import to_luminance

    return to_luminance(img)
