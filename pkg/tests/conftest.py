import numpy as np
import pytest

from cervipre import BinaryMask, GrayPlane, ImageRGB8


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def solid_image(width: int, height: int, color: tuple[int, int, int]) -> ImageRGB8:
    return ImageRGB8(np.full((height, width, 3), color, dtype=np.uint8))


def mask_from_rows(rows: list[str]) -> BinaryMask:
    """Build a mask from strings of '.' and '#', one string per row."""
    return BinaryMask(np.array([[c == "#" for c in row] for row in rows]))


def random_speckle_mask(
    rng: np.random.Generator, height: int, width: int, blobs: int, max_radius: int = 3
) -> np.ndarray:
    """Glare-like mask: a few small disks, never covering the whole frame."""
    bits = np.zeros((height, width), dtype=bool)
    ys, xs = np.ogrid[0:height, 0:width]
    for _ in range(blobs):
        cy = int(rng.integers(0, height))
        cx = int(rng.integers(0, width))
        r = int(rng.integers(1, max_radius + 1))
        bits |= (ys - cy) ** 2 + (xs - cx) ** 2 <= r * r
    bits[0, 0] = False  # keep at least one Dirichlet pixel
    return bits


def random_plane(rng: np.random.Generator, height: int, width: int) -> GrayPlane:
    return GrayPlane(rng.random((height, width)))
