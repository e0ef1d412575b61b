"""Raster value types plus the color, morphology, and component ops shared by all stages.

All types are immutable after construction (arrays are copied and marked
read-only), so values can be shared freely across threads.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

__all__ = [
    "ImageRGB8",
    "GrayPlane",
    "BinaryMask",
    "LabImage",
    "StructuringElement",
    "BoundingBox",
    "ConnectedComponent",
    "split_planes",
    "rgb_to_lab",
    "dilate",
    "connected_components",
    "label_mask",
    "mask_boundary",
    "crop",
]


def _frozen(arr: np.ndarray) -> np.ndarray:
    # always copy: freezing a view of the caller's array would be a side effect
    out = np.array(arr, order="C")
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class ImageRGB8:
    """8-bit RGB raster; pixels is an (h, w, 3) uint8 array."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"expected (h, w, 3) pixel array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        if arr.dtype != np.uint8:
            if not np.issubdtype(arr.dtype, np.integer):
                raise ValueError(f"channel values must be integers, got dtype {arr.dtype}")
            if arr.min() < 0 or arr.max() > 255:
                raise ValueError("channel values must lie in [0, 255]")
            arr = arr.astype(np.uint8)
        object.__setattr__(self, "pixels", _frozen(arr))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other) -> bool:
        return isinstance(other, ImageRGB8) and np.array_equal(self.pixels, other.pixels)


@dataclass(frozen=True, eq=False)
class GrayPlane:
    """Scalar field on the pixel grid; values is an (h, w) float64 array in [0, 1]."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"expected (h, w) value array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("plane must be at least 1x1")
        if not np.all(np.isfinite(arr)):
            raise ValueError("plane values must be finite")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("plane values must lie in [0, 1]")
        object.__setattr__(self, "values", _frozen(arr))

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    def __eq__(self, other) -> bool:
        return isinstance(other, GrayPlane) and np.array_equal(self.values, other.values)


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """Per-pixel boolean raster; bits is an (h, w) bool array."""

    bits: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.bits)
        if arr.ndim != 2:
            raise ValueError(f"expected (h, w) bit array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("mask must be at least 1x1")
        object.__setattr__(self, "bits", _frozen(arr.astype(bool)))

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def count(self) -> int:
        """Number of set pixels."""
        return int(self.bits.sum())

    def __eq__(self, other) -> bool:
        return isinstance(other, BinaryMask) and np.array_equal(self.bits, other.bits)


@dataclass(frozen=True, eq=False)
class LabImage:
    """CIELAB raster; values is an (h, w, 3) float64 array of (L, a, b) triples."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"expected (h, w, 3) value array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        if not np.all(np.isfinite(arr)):
            raise ValueError("Lab values must be finite")
        lightness = arr[:, :, 0]
        if lightness.min() < 0.0 or lightness.max() > 100.0:
            raise ValueError("L values must lie in [0, 100]")
        object.__setattr__(self, "values", _frozen(arr))

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class StructuringElement:
    """Discrete disk of (dx, dy) offsets with dx^2 + dy^2 <= radius^2."""

    radius: int

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be >= 0")

    @classmethod
    def disk(cls, radius: int) -> "StructuringElement":
        return cls(radius)

    @property
    def offsets(self) -> tuple[tuple[int, int], ...]:
        r = self.radius
        r2 = r * r
        return tuple(
            (dx, dy)
            for dy in range(-r, r + 1)
            for dx in range(-r, r + 1)
            if dx * dx + dy * dy <= r2
        )


@dataclass(frozen=True)
class BoundingBox:
    """Inclusive pixel-coordinate box; (x0, y0) top-left, (x1, y1) bottom-right."""

    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        if not (0 <= self.x0 <= self.x1 and 0 <= self.y0 <= self.y1):
            raise ValueError(f"invalid box ({self.x0},{self.y0})-({self.x1},{self.y1})")

    @property
    def width(self) -> int:
        return self.x1 - self.x0 + 1

    @property
    def height(self) -> int:
        return self.y1 - self.y0 + 1


@dataclass(frozen=True)
class ConnectedComponent:
    """One maximal connected region of set pixels."""

    label: int
    pixels: frozenset[tuple[int, int]]
    size: int


def split_planes(img: ImageRGB8) -> tuple[GrayPlane, GrayPlane, GrayPlane]:
    """Split an RGB image into normalized red, green, and blue planes (channel / 255)."""
    scaled = img.pixels.astype(np.float64) / 255.0
    return (
        GrayPlane(scaled[:, :, 0]),
        GrayPlane(scaled[:, :, 1]),
        GrayPlane(scaled[:, :, 2]),
    )


# sRGB -> XYZ for the D65 white point. The white point is taken as the row sums
# of the matrix so that pure white maps to exactly L=100, a=0, b=0.
_SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_D65_WHITE = _SRGB_TO_XYZ.sum(axis=1)
_LAB_EPS = 216.0 / 24389.0
_LAB_KAPPA = 24389.0 / 27.0


def _srgb_to_linear(c: np.ndarray) -> np.ndarray:
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def rgb_to_lab(img: ImageRGB8) -> LabImage:
    """Convert an sRGB image to CIELAB.

    Per pixel: undo the sRGB transfer function, map linear RGB to XYZ under
    the D65 white point, then apply the CIELAB nonlinearity.
    """
    srgb = img.pixels.astype(np.float64) / 255.0
    linear = _srgb_to_linear(srgb)
    xyz = linear @ _SRGB_TO_XYZ.T
    t = xyz / _D65_WHITE
    f = np.where(t > _LAB_EPS, np.cbrt(t), (_LAB_KAPPA * t + 16.0) / 116.0)
    fx, fy, fz = f[:, :, 0], f[:, :, 1], f[:, :, 2]
    lab = np.stack(
        [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)], axis=-1
    )
    return LabImage(lab)


def dilate(mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    """Morphological dilation; offsets falling outside the frame are clipped."""
    h, w = mask.height, mask.width
    src = mask.bits
    out = np.zeros((h, w), dtype=bool)
    for dx, dy in se.offsets:
        ys0, ys1 = max(0, -dy), min(h, h - dy)
        xs0, xs1 = max(0, -dx), min(w, w - dx)
        if ys0 >= ys1 or xs0 >= xs1:
            continue
        out[ys0 + dy : ys1 + dy, xs0 + dx : xs1 + dx] |= src[ys0:ys1, xs0:xs1]
    return BinaryMask(out)


_STRUCT_4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
_STRUCT_8 = np.ones((3, 3), dtype=bool)


def label_mask(mask: BinaryMask, connectivity: int = 8) -> tuple[np.ndarray, int]:
    """Label connected regions; returns the (h, w) int label array and region count.

    Labels are 1..count in scan order; 0 marks unset pixels.
    """
    if connectivity not in (4, 8):
        raise ValueError("connectivity must be 4 or 8")
    structure = _STRUCT_8 if connectivity == 8 else _STRUCT_4
    labels, count = ndimage.label(mask.bits, structure=structure)
    return labels, int(count)


def connected_components(mask: BinaryMask, connectivity: int = 8) -> list[ConnectedComponent]:
    """Partition set pixels into maximal connected components.

    Components come back in label (scan) order; pixel coordinates are (x, y).
    """
    labels, count = label_mask(mask, connectivity)
    if count == 0:
        return []
    ys, xs = np.nonzero(labels)
    lab = labels[ys, xs]
    order = np.argsort(lab, kind="stable")
    ys, xs, lab = ys[order], xs[order], lab[order]
    bounds = np.searchsorted(lab, np.arange(1, count + 2))
    components = []
    for i in range(1, count + 1):
        s, e = bounds[i - 1], bounds[i]
        pix = frozenset(zip(xs[s:e].tolist(), ys[s:e].tolist()))
        components.append(ConnectedComponent(label=i, pixels=pix, size=e - s))
    return components


def mask_boundary(mask: BinaryMask) -> frozenset[tuple[int, int]]:
    """Unset pixels with at least one set 4-neighbor: the Dirichlet ring of each region."""
    bits = mask.bits
    near = np.zeros_like(bits)
    near[1:, :] |= bits[:-1, :]
    near[:-1, :] |= bits[1:, :]
    near[:, 1:] |= bits[:, :-1]
    near[:, :-1] |= bits[:, 1:]
    ring = near & ~bits
    ys, xs = np.nonzero(ring)
    return frozenset(zip(xs.tolist(), ys.tolist()))


def crop(img: ImageRGB8, box: BoundingBox) -> ImageRGB8:
    """Copy out the pixels inside an inclusive bounding box."""
    if box.x1 >= img.width or box.y1 >= img.height:
        raise ValueError(
            f"box ({box.x0},{box.y0})-({box.x1},{box.y1}) exceeds "
            f"{img.width}x{img.height} image"
        )
    return ImageRGB8(img.pixels[box.y0 : box.y1 + 1, box.x0 : box.x1 + 1])
