"""YIQ decomposition, recombination and linear luminance matching.

The NTSC primaries are used for the forward matrix; its inverse is computed
numerically at import so the roundtrip is exact to machine precision. The
Y plane stays in [0, 1] for valid RGB, I sits in roughly [-0.5957, 0.5957]
and Q in [-0.5226, 0.5226].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLuminanceError, DimensionError, NumericError
from .linalg3 import inv3
from .imgio import FloatImage

YIQ_FROM_RGB = np.array(
    [
        [0.299, 0.587, 0.114],
        [0.595716, -0.274453, -0.321263],
        [0.211456, -0.522591, 0.311135],
    ],
    dtype=np.float64,
)

RGB_FROM_YIQ = inv3(YIQ_FROM_RGB)

# luminance spread below this cannot be matched meaningfully
MIN_LUMINANCE_STD = 1e-8


@dataclass(frozen=True, eq=False)
class YiqImage:
    """Luminance plane plus the two chrominance planes, all (height, width)."""

    y: np.ndarray
    i: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        if not (self.y.shape == self.i.shape == self.q.shape):
            raise DimensionError(
                f"YIQ planes disagree: {self.y.shape}, {self.i.shape}, {self.q.shape}"
            )
        if self.y.ndim != 2 or self.y.shape[0] < 1 or self.y.shape[1] < 1:
            raise DimensionError(f"YIQ planes must be 2-D and non-empty, got {self.y.shape}")
        for plane in (self.y, self.i, self.q):
            if not np.isfinite(plane).all():
                raise NumericError("YIQ plane contains non-finite samples")

    @property
    def width(self) -> int:
        return self.y.shape[1]

    @property
    def height(self) -> int:
        return self.y.shape[0]


def _mix(m: np.ndarray, p0, p1, p2, row: int) -> np.ndarray:
    return m[row, 0] * p0 + m[row, 1] * p1 + m[row, 2] * p2


def rgb_to_yiq(img: FloatImage) -> YiqImage:
    """Per-pixel matrix transform from RGB planes to YIQ planes."""
    r, g, b = img.planes[0], img.planes[1], img.planes[2]
    return YiqImage(
        y=_mix(YIQ_FROM_RGB, r, g, b, 0),
        i=_mix(YIQ_FROM_RGB, r, g, b, 1),
        q=_mix(YIQ_FROM_RGB, r, g, b, 2),
    )


def yiq_to_rgb_planes(img: YiqImage) -> np.ndarray:
    """Inverse transform without gamut clamping, shape (3, height, width).

    Useful for finding which pixels the clamped conversion will touch.
    """
    y, i, q = img.y, img.i, img.q
    out = np.empty((3, img.height, img.width), dtype=np.float64)
    out[0] = _mix(RGB_FROM_YIQ, y, i, q, 0)
    out[1] = _mix(RGB_FROM_YIQ, y, i, q, 1)
    out[2] = _mix(RGB_FROM_YIQ, y, i, q, 2)
    return out


def yiq_to_rgb(img: YiqImage) -> FloatImage:
    """Inverse transform, clamped into the RGB gamut."""
    out = yiq_to_rgb_planes(img)
    np.clip(out, 0.0, 1.0, out=out)
    return FloatImage(out)


def match_luminance(
    style_y: np.ndarray,
    content_stats: tuple[float, float],
    style_stats: tuple[float, float],
    clamp: bool = True,
) -> np.ndarray:
    """Give the style luminance the content's mean and standard deviation.

    Each sample moves through (sigma_c / sigma_s) * (v - mu_s) + mu_c; the
    unclamped result has exactly the content's first two moments. Raises
    DegenerateLuminanceError when the style spread is effectively zero.
    """
    mu_c, sigma_c = content_stats
    mu_s, sigma_s = style_stats
    if sigma_s <= MIN_LUMINANCE_STD:
        raise DegenerateLuminanceError(
            f"style luminance std {sigma_s:.3e} is too small to match"
        )
    out = (sigma_c / sigma_s) * (np.asarray(style_y, dtype=np.float64) - mu_s) + mu_c
    if clamp:
        np.clip(out, 0.0, 1.0, out=out)
    return out


def recombine(y_styled: np.ndarray, content_yiq: YiqImage) -> FloatImage:
    """Marry a styled luminance plane with the content's chrominance."""
    y = np.asarray(y_styled, dtype=np.float64)
    if y.shape != content_yiq.y.shape:
        raise DimensionError(
            f"styled luminance {y.shape} does not match content {content_yiq.y.shape}"
        )
    return yiq_to_rgb(YiqImage(y=y, i=content_yiq.i, q=content_yiq.q))


def gray_image(plane: np.ndarray) -> FloatImage:
    """Replicate a luminance plane into the three RGB channels.

    Stylers expect RGB input, so luminance-only runs feed them this.
    """
    p = np.clip(np.asarray(plane, dtype=np.float64), 0.0, 1.0)
    return FloatImage(np.ascontiguousarray(np.stack([p, p, p])))
