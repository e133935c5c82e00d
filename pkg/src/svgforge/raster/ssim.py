"""Structural similarity over luminance with a Gaussian window.

Classic single-scale formulation (Wang et al. 2004 constants by default):
local means/variances/covariance under an 11-tap sigma-1.5 Gaussian,
stabilizers C1 = (k1*L)^2 and C2 = (k2*L)^2 with L the dynamic range of the
luminance representation (1.0 here).  The mean of the local map over the
valid (fully-windowed) region is returned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from ..errors import DimensionMismatchError
from .render import Raster, to_luminance


@dataclass(frozen=True)
class SsimParams:
    window: int = 11
    sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 1.0

    def __post_init__(self):
        if self.window < 3 or self.window % 2 == 0:
            raise ValueError(f"window must be odd and >= 3, got {self.window}")
        if self.sigma <= 0 or self.k1 <= 0 or self.k2 <= 0:
            raise ValueError("sigma, k1, k2 must be positive")


def _gaussian_kernel(window: int, sigma: float) -> np.ndarray:
    half = (window - 1) / 2.0
    x = np.arange(window, dtype=np.float64) - half
    k = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return k / k.sum()


def _windowed(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    # Separable filtering; borders are cropped afterwards so the mode is moot.
    tmp = correlate1d(img, kernel, axis=0, mode="nearest")
    return correlate1d(tmp, kernel, axis=1, mode="nearest")


def ssim_luminance(a: np.ndarray, b: np.ndarray,
                   params: SsimParams = SsimParams()) -> float:
    """SSIM between two luminance maps of identical shape."""
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch: {a.shape} vs {b.shape}")
    if min(a.shape) < params.window:
        raise DimensionMismatchError(
            f"images smaller than the {params.window}-tap window: {a.shape}")

    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    kernel = _gaussian_kernel(params.window, params.sigma)
    L = params.dynamic_range
    c1 = (params.k1 * L) ** 2
    c2 = (params.k2 * L) ** 2

    mu_x = _windowed(x, kernel)
    mu_y = _windowed(y, kernel)
    xx = _windowed(x * x, kernel)
    yy = _windowed(y * y, kernel)
    xy = _windowed(x * y, kernel)

    var_x = xx - mu_x * mu_x
    var_y = yy - mu_y * mu_y
    cov = xy - mu_x * mu_y

    num = (2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
    ssim_map = num / den

    half = params.window // 2
    valid = ssim_map[half:ssim_map.shape[0] - half, half:ssim_map.shape[1] - half]
    return float(valid.mean())


def ssim(a: Raster, b: Raster, params: SsimParams = SsimParams()) -> float:
    """SSIM between two rasters of identical dimensions, over luminance."""
    if (a.width, a.height) != (b.width, b.height):
        raise DimensionMismatchError(
            f"dimension mismatch: {a.width}x{a.height} vs {b.width}x{b.height}")
    return ssim_luminance(to_luminance(a), to_luminance(b), params)
