"""Glare detection and construction of the dilated inpainting mask.

Glare pixels are saturated in every channel at once, so detection is a
per-plane white threshold combined with a logical AND.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .imagecore import BinaryMask, ImageRGB8, StructuringElement, dilate, label_mask

__all__ = [
    "SpecularConfig",
    "LargeInpaintRegionWarning",
    "detect_specular",
    "build_inpaint_mask",
]

# Fraction of the frame above which a single mask component triggers a warning.
_LARGE_COMPONENT_FRACTION = 0.25


class LargeInpaintRegionWarning(UserWarning):
    """A glare component covers a large share of the frame; the fill degrades gracefully."""


@dataclass(frozen=True)
class SpecularConfig:
    """Detection threshold and dilation radius for the glare mask."""

    white_threshold: float = 0.90
    se_radius: int = 2

    def __post_init__(self):
        if not 0.0 < self.white_threshold <= 1.0:
            raise ValueError("white_threshold must lie in (0, 1]")
        if self.se_radius < 0:
            raise ValueError("se_radius must be >= 0")


def detect_specular(img: ImageRGB8, cfg: SpecularConfig) -> BinaryMask:
    """Mark pixels whose normalized R, G, and B all reach the white threshold."""
    scaled = img.pixels.astype(np.float64) / 255.0
    return BinaryMask((scaled >= cfg.white_threshold).all(axis=2))


def build_inpaint_mask(raw: BinaryMask, cfg: SpecularConfig) -> BinaryMask:
    """Dilate the raw glare mask by a disk so the fill boundary samples clean tissue."""
    grown = dilate(raw, StructuringElement.disk(cfg.se_radius))
    _warn_on_large_components(grown)
    return grown


def _warn_on_large_components(mask: BinaryMask) -> None:
    if mask.count == 0:
        return
    labels, count = label_mask(mask, connectivity=8)
    sizes = np.bincount(labels.ravel())[1:]
    limit = _LARGE_COMPONENT_FRACTION * mask.width * mask.height
    oversized = int((sizes > limit).sum())
    if oversized:
        warnings.warn(
            f"{oversized} glare component(s) exceed {_LARGE_COMPONENT_FRACTION:.0%} "
            "of the frame; inpainting proceeds but the fill will be very smooth",
            LargeInpaintRegionWarning,
            stacklevel=3,
        )
