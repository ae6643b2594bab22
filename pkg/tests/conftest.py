import numpy as np
import pytest

from colorkeep.imgio import FloatImage, Uint8Image, encode_image, to_float


def u8_image(seed, height, width, lo=0, hi=256):
    rng = np.random.default_rng(seed)
    return Uint8Image(rng.integers(lo, hi, (height, width, 3), dtype=np.uint8))


def float_image(seed, height, width, lo=0, hi=256):
    """Random image whose samples sit exactly on the 8-bit grid."""
    return to_float(u8_image(seed, height, width, lo, hi))


def synthetic_image(seed, height, width, means, slopes, noise):
    """Smooth gradient plus noise, one recipe per channel, clipped to [0, 1].

    ``means`` are the three channel levels, ``slopes`` three (dx, dy) pairs
    controlling the gradients, ``noise`` the Gaussian sigma.
    """
    rng = np.random.default_rng(seed)
    yy, xx = np.meshgrid(
        np.linspace(-0.5, 0.5, height), np.linspace(-0.5, 0.5, width), indexing="ij"
    )
    planes = np.empty((3, height, width), dtype=np.float64)
    for c in range(3):
        dx, dy = slopes[c]
        planes[c] = means[c] + dx * xx + dy * yy + rng.normal(0.0, noise, (height, width))
    np.clip(planes, 0.0, 1.0, out=planes)
    return FloatImage(planes)


def write_png(path, img):
    if isinstance(img, FloatImage):
        from colorkeep.imgio import to_u8

        img = to_u8(img)
    path.write_bytes(encode_image(img, "png"))
    return path


@pytest.fixture
def image_pair(tmp_path):
    """Small deterministic content/style PNGs on disk plus their float forms."""
    content = float_image(11, 24, 18, lo=30, hi=220)
    style = float_image(22, 24, 18, lo=60, hi=250)
    c_path = write_png(tmp_path / "content.png", content)
    s_path = write_png(tmp_path / "style.png", style)
    return {"content": content, "style": style, "content_path": c_path, "style_path": s_path}
