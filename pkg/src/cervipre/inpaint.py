"""Harmonic fill of masked regions and the radial solution utility.

Masked pixels are replaced by the solution of the discrete Laplace equation
with Dirichlet data taken from the ring of surrounding unmasked pixels, so
each filled value ends up being the mean of its in-image 4-neighbors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .imagecore import BinaryMask, GrayPlane, ImageRGB8, label_mask, split_planes

__all__ = [
    "HarmonicSolverConfig",
    "FillResult",
    "NoDirichletDataError",
    "harmonic_fill",
    "fill_image",
    "remove_specular",
    "radial_fundamental_solution",
]


class NoDirichletDataError(ValueError):
    """The mask covers the whole frame, leaving no boundary values to interpolate from."""


@dataclass(frozen=True)
class HarmonicSolverConfig:
    """Stopping rule and relaxation factor for the Gauss-Seidel SOR sweep."""

    tolerance: float = 1e-4
    max_iterations: int = 10_000
    relaxation_factor: float = 1.8

    def __post_init__(self):
        if self.tolerance <= 0.0:
            raise ValueError("tolerance must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not 0.0 < self.relaxation_factor < 2.0:
            raise ValueError("relaxation_factor must lie in (0, 2)")


@dataclass(frozen=True)
class FillResult:
    plane: GrayPlane
    iterations_used: int
    final_residual: float
    converged: bool


class _MaskedSystem:
    """Index bookkeeping for the 5-point stencil restricted to masked pixels.

    Pixels on the frame edge use only their in-image neighbors, i.e. the
    stencil is reduced rather than padded with invented data.
    """

    def __init__(self, mask: np.ndarray):
        h, w = mask.shape
        self.shape = (h, w)
        self.idx = np.flatnonzero(mask.ravel())
        ys, xs = np.unravel_index(self.idx, (h, w))
        nbrs = np.full((self.idx.size, 4), -1, dtype=np.int64)
        ok = ys > 0
        nbrs[ok, 0] = self.idx[ok] - w
        ok = ys < h - 1
        nbrs[ok, 1] = self.idx[ok] + w
        ok = xs > 0
        nbrs[ok, 2] = self.idx[ok] - 1
        ok = xs < w - 1
        nbrs[ok, 3] = self.idx[ok] + 1
        self.valid = nbrs >= 0
        self.nbrs = np.where(self.valid, nbrs, 0)
        self.degree = self.valid.sum(axis=1).astype(np.float64)
        parity = (ys + xs) & 1
        self.sweep_groups = (np.flatnonzero(parity == 0), np.flatnonzero(parity == 1))
        self._all_rows = np.arange(self.idx.size)

    def neighbor_means(self, flat: np.ndarray, rows: np.ndarray) -> np.ndarray:
        total = np.where(self.valid[rows], flat[self.nbrs[rows]], 0.0).sum(axis=1)
        return total / self.degree[rows]

    def residual(self, flat: np.ndarray) -> float:
        return float(np.abs(flat[self.idx] - self.neighbor_means(flat, self._all_rows)).max())


def _component_rows(mask: BinaryMask, idx: np.ndarray) -> list[np.ndarray]:
    """Group masked-pixel row indices by 4-connected component (the stencil's coupling)."""
    labels, count = label_mask(mask, connectivity=4)
    comp_of_row = labels.ravel()[idx]
    return [np.flatnonzero(comp_of_row == c) for c in range(1, count + 1)]


def harmonic_fill(
    plane: GrayPlane, mask: BinaryMask, cfg: HarmonicSolverConfig
) -> FillResult:
    """Solve the discrete Laplace equation over the masked pixels.

    Unmasked pixels act as fixed Dirichlet data and are returned unchanged.
    Masked pixels are initialized to the mean of their component's boundary
    values and swept with red-black Gauss-Seidel SOR until the worst
    mean-value residual drops below tolerance. Every sweep ends by projecting
    each component into the [min, max] range of its own boundary values: the
    exact solution lies in that range (discrete maximum principle), so the
    projection never hurts convergence and makes the returned fill satisfy
    the principle exactly.

    Raises NoDirichletDataError when the mask covers the entire plane.
    """
    if (plane.height, plane.width) != (mask.height, mask.width):
        raise ValueError(
            f"plane {plane.width}x{plane.height} and mask "
            f"{mask.width}x{mask.height} dimensions differ"
        )
    if mask.count == 0:
        return FillResult(plane=plane, iterations_used=0, final_residual=0.0, converged=True)
    if mask.bits.all():
        raise NoDirichletDataError("mask covers the entire plane; no boundary values exist")

    flat = plane.values.ravel().copy()
    system = _MaskedSystem(mask.bits)
    components = _component_rows(mask, system.idx)

    # Dirichlet data per component: values at unmasked neighbors of its pixels.
    masked_flat = np.zeros(flat.size, dtype=bool)
    masked_flat[system.idx] = True
    bounds = []
    for rows in components:
        nbr_idx = system.nbrs[rows][system.valid[rows]]
        ring_values = flat[nbr_idx[~masked_flat[nbr_idx]]]
        lo, hi = float(ring_values.min()), float(ring_values.max())
        bounds.append((lo, hi))
        flat[system.idx[rows]] = ring_values.mean()

    omega = cfg.relaxation_factor
    iterations = 0
    residual = system.residual(flat)
    while residual > cfg.tolerance and iterations < cfg.max_iterations:
        for rows in system.sweep_groups:
            target = system.idx[rows]
            flat[target] = (1.0 - omega) * flat[target] + omega * system.neighbor_means(
                flat, rows
            )
        for rows, (lo, hi) in zip(components, bounds):
            target = system.idx[rows]
            flat[target] = np.clip(flat[target], lo, hi)
        iterations += 1
        residual = system.residual(flat)

    filled = flat.reshape(plane.values.shape)
    return FillResult(
        plane=GrayPlane(filled),
        iterations_used=iterations,
        final_residual=residual,
        converged=residual <= cfg.tolerance,
    )


def fill_image(
    img: ImageRGB8, mask: BinaryMask, cfg: HarmonicSolverConfig
) -> tuple[ImageRGB8, tuple[FillResult, FillResult, FillResult]]:
    """Harmonic-fill each color plane independently; returns the image and per-plane results.

    Masked pixels are re-quantized round-half-up; unmasked pixels keep their
    original bytes exactly.
    """
    if (img.height, img.width) != (mask.height, mask.width):
        raise ValueError(
            f"image {img.width}x{img.height} and mask "
            f"{mask.width}x{mask.height} dimensions differ"
        )
    results = tuple(harmonic_fill(p, mask, cfg) for p in split_planes(img))
    out = img.pixels.copy()
    hole = mask.bits
    for channel, result in enumerate(results):
        quantized = np.floor(result.plane.values * 255.0 + 0.5).astype(np.uint8)
        out[hole, channel] = quantized[hole]
    return ImageRGB8(out), results


def remove_specular(img: ImageRGB8, mask: BinaryMask, cfg: HarmonicSolverConfig) -> ImageRGB8:
    """Replace masked glare pixels with the per-channel harmonic fill."""
    filled, _ = fill_image(img, mask, cfg)
    return filled


def radial_fundamental_solution(r: float, n: int, c1: float, c2: float) -> float:
    """Radially symmetric solution of the Laplace equation away from the origin.

    For n == 2 this is c1 * ln(r) + c2; for n >= 3 it is
    c1 / ((2 - n) * r**(n - 2)) + c2.
    """
    if r <= 0.0:
        raise ValueError("r must be > 0")
    if n < 2:
        raise ValueError("dimension must be >= 2")
    if n == 2:
        return c1 * math.log(r) + c2
    return c1 / ((2.0 - n) * r ** (n - 2)) + c2
