"""PNG/JPEG decode and encode for images, single-channel PNG for masks."""
from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .imagecore import BinaryMask, ImageRGB8

_IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg"}


def load_image(path: str | Path) -> ImageRGB8:
    """Decode an 8-bit color image; anything PIL reads is coerced to RGB."""
    with Image.open(path) as im:
        rgb = im.convert("RGB")
        return ImageRGB8(np.asarray(rgb))


def save_image(img: ImageRGB8, path: str | Path) -> None:
    path = Path(path)
    if path.suffix.lower() not in _IMAGE_SUFFIXES:
        raise ValueError(f"unsupported image format {path.suffix!r}; use .png/.jpg/.jpeg")
    Image.fromarray(img.pixels, mode="RGB").save(path)


def load_mask(path: str | Path) -> BinaryMask:
    """Read a mask stored as a single-channel PNG with 0/255 values."""
    with Image.open(path) as im:
        gray = np.asarray(im.convert("L"))
        return BinaryMask(gray >= 128)


def save_mask(mask: BinaryMask, path: str | Path) -> None:
    path = Path(path)
    if path.suffix.lower() != ".png":
        raise ValueError(f"masks are stored as PNG, got {path.suffix!r}")
    Image.fromarray(mask.bits.astype(np.uint8) * 255, mode="L").save(path)
