import numpy as np
import pytest

from cervipre import BinaryMask, ImageRGB8, load_image, load_mask, save_image, save_mask


@pytest.fixture
def image(rng):
    return ImageRGB8(rng.integers(0, 256, size=(20, 30, 3)))


def test_png_round_trip_is_lossless(image, tmp_path):
    path = tmp_path / "img.png"
    save_image(image, path)
    assert load_image(path) == image


def test_jpeg_round_trip_is_close(tmp_path):
    # smooth gradient: representative of tissue, fair to a lossy codec
    ramp = np.linspace(40, 215, 30, dtype=np.uint8)
    pixels = np.stack(np.broadcast_arrays(ramp[None, :], ramp[None, :], ramp[:, None][:20]), axis=-1)
    smooth = ImageRGB8(np.ascontiguousarray(pixels))
    path = tmp_path / "img.jpg"
    save_image(smooth, path)
    back = load_image(path)
    assert (back.width, back.height) == (smooth.width, smooth.height)
    assert np.abs(back.pixels.astype(int) - smooth.pixels.astype(int)).mean() < 8


def test_unsupported_image_suffix_rejected(image, tmp_path):
    with pytest.raises(ValueError):
        save_image(image, tmp_path / "img.tiff")


def test_mask_round_trip(tmp_path, rng):
    mask = BinaryMask(rng.random((16, 16)) < 0.4)
    path = tmp_path / "mask.png"
    save_mask(mask, path)
    assert load_mask(path) == mask


def test_mask_png_uses_0_and_255(tmp_path):
    from PIL import Image

    bits = np.zeros((4, 4), bool)
    bits[1, 2] = True
    save_mask(BinaryMask(bits), tmp_path / "m.png")
    with Image.open(tmp_path / "m.png") as im:
        values = set(np.asarray(im).ravel().tolist())
    assert values == {0, 255}


def test_mask_requires_png_suffix(tmp_path):
    with pytest.raises(ValueError):
        save_mask(BinaryMask(np.zeros((2, 2), bool)), tmp_path / "m.jpg")
