"""Deterministic synthetic cervigrams with ground-truth glare and ROI masks.

Each generated frame holds a pink ellipse (the cervix analog) on a dark
surround, saturated glare speckles inside the ellipse, and a bright broken
bar near the top edge standing in for equipment text. Both truth masks come
back alongside the image so the pipeline can be scored without clinical data.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imagecore import BinaryMask, ImageRGB8

__all__ = ["SyntheticSpec", "generate_synthetic"]


@dataclass(frozen=True)
class SyntheticSpec:
    """Shape and color parameters of one synthetic cervigram."""

    width: int = 512
    height: int = 512
    ellipse_center: tuple[float, float] = (0.5, 0.5)  # relative to frame
    ellipse_axes: tuple[float, float] = (0.32, 0.27)  # relative semi-axes
    cervix_color: tuple[int, int, int] = (208, 122, 142)
    background_color: tuple[int, int, int] = (38, 42, 46)
    glare_color: tuple[int, int, int] = (247, 247, 247)
    bar_color: tuple[int, int, int] = (200, 200, 200)
    speckle_count: int = 12
    speckle_size: int = 3
    noise_amplitude: int = 4
    # Speckles keep this many pixels clear of the ellipse rim so that the
    # dilated glare mask still has pink tissue on its boundary ring.
    speckle_margin: int = 8

    def __post_init__(self):
        if self.width < 32 or self.height < 32:
            raise ValueError("frame must be at least 32x32")
        ax, ay = self.ellipse_axes
        if ax <= 0.0 or ay <= 0.0:
            raise ValueError("ellipse axes must be > 0")
        cx, cy = self.ellipse_center
        if not (0.0 < cx < 1.0 and 0.0 < cy < 1.0):
            raise ValueError("ellipse center must lie inside the frame")
        if self.speckle_count < 0:
            raise ValueError("speckle_count must be >= 0")
        if self.speckle_size < 1:
            raise ValueError("speckle_size must be >= 1")
        if self.noise_amplitude < 0:
            raise ValueError("noise_amplitude must be >= 0")
        for name in ("cervix_color", "background_color", "glare_color", "bar_color"):
            if any(not 0 <= c <= 255 for c in getattr(self, name)):
                raise ValueError(f"{name} channels must lie in [0, 255]")


def _ellipse_mask(spec: SyntheticSpec, shrink: float = 0.0) -> np.ndarray:
    w, h = spec.width, spec.height
    cx = spec.ellipse_center[0] * (w - 1)
    cy = spec.ellipse_center[1] * (h - 1)
    ax = max(spec.ellipse_axes[0] * w - shrink, 1e-6)
    ay = max(spec.ellipse_axes[1] * h - shrink, 1e-6)
    ys, xs = np.mgrid[0:h, 0:w]
    return ((xs - cx) / ax) ** 2 + ((ys - cy) / ay) ** 2 <= 1.0


def _place_speckles(spec: SyntheticSpec, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Top-left corners of non-overlapping speckle squares, safely inside the ellipse."""
    if spec.speckle_count == 0:
        return []
    size = spec.speckle_size
    inner = _ellipse_mask(spec, shrink=float(spec.speckle_margin + size))
    ys, xs = np.nonzero(inner)
    if ys.size == 0:
        raise ValueError("ellipse too small to hold speckles at the configured margin")
    placed: list[tuple[int, int]] = []
    attempts = 0
    max_attempts = 200 * spec.speckle_count
    while len(placed) < spec.speckle_count:
        if attempts >= max_attempts:
            raise ValueError(
                f"could not place {spec.speckle_count} non-overlapping speckles; "
                "reduce speckle_count or speckle_size"
            )
        attempts += 1
        pick = int(rng.integers(0, ys.size))
        x0, y0 = int(xs[pick]), int(ys[pick])
        # Chebyshev separation > size guarantees disjoint squares.
        if all(max(abs(x0 - px), abs(y0 - py)) > size + 1 for px, py in placed):
            placed.append((x0, y0))
    return placed


def _noisy(
    base: tuple[int, int, int], shape: tuple[int, ...], amp: int, rng: np.random.Generator
) -> np.ndarray:
    colors = np.full(shape + (3,), base, dtype=np.int16)
    if amp > 0:
        colors += rng.integers(-amp, amp + 1, size=colors.shape, dtype=np.int16)
    return np.clip(colors, 0, 255).astype(np.uint8)


def generate_synthetic(
    seed: int, spec: SyntheticSpec = SyntheticSpec()
) -> tuple[ImageRGB8, BinaryMask, BinaryMask]:
    """Build one synthetic cervigram; returns (image, glare truth, ROI truth).

    The same seed and spec always produce bit-identical output. The ROI truth
    is the ellipse mask; the glare truth is the union of the speckle squares.
    """
    rng = np.random.default_rng(seed)
    w, h = spec.width, spec.height

    frame = _noisy(spec.background_color, (h, w), spec.noise_amplitude, rng)

    ellipse = _ellipse_mask(spec)
    pink = _noisy(spec.cervix_color, (h, w), spec.noise_amplitude, rng)
    # Gentle radial darkening toward the rim, as a lens would render it.
    cx = spec.ellipse_center[0] * (w - 1)
    cy = spec.ellipse_center[1] * (h - 1)
    ax = spec.ellipse_axes[0] * w
    ay = spec.ellipse_axes[1] * h
    ys, xs = np.mgrid[0:h, 0:w]
    rho2 = ((xs - cx) / ax) ** 2 + ((ys - cy) / ay) ** 2
    shade = 1.0 - 0.08 * np.clip(rho2, 0.0, 1.0)
    pink = (pink.astype(np.float64) * shade[:, :, None]).astype(np.uint8)
    frame[ellipse] = pink[ellipse]

    glare = np.zeros((h, w), dtype=bool)
    for x0, y0 in _place_speckles(spec, rng):
        glare[y0 : y0 + spec.speckle_size, x0 : x0 + spec.speckle_size] = True
    shine = _noisy(spec.glare_color, (h, w), min(spec.noise_amplitude, 4), rng)
    frame[glare] = np.maximum(shine[glare], 240)

    # Text-like distractor: a broken bright bar near the top edge.
    bar_y0, bar_y1 = h // 24, h // 24 + max(6, h // 40)
    seg_w = max(6, w // 36)
    for x0 in range(w // 8, w - w // 8, 2 * seg_w):
        if rng.random() < 0.8:
            frame[bar_y0:bar_y1, x0 : x0 + seg_w] = spec.bar_color

    return ImageRGB8(frame), BinaryMask(glare), BinaryMask(ellipse)
