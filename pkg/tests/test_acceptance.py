"""Acceptance suite: one test per release criterion, each printing a verdict line.

Run with `pytest tests/test_acceptance.py -v -s` to see the verdict lines.
"""
import time
from dataclasses import dataclass

import numpy as np
import pytest

from cervipre import (
    BinaryMask,
    CervigramReport,
    DetectionClass,
    FeatureVector,
    GrayPlane,
    HarmonicSolverConfig,
    ImageRGB8,
    PipelineConfig,
    SyntheticSpec,
    build_inpaint_mask,
    detect_specular,
    generate_synthetic,
    harmonic_fill,
    kmeans,
    mask_boundary,
    process_batch,
    process_image,
    radial_fundamental_solution,
    rgb_to_lab,
    save_image,
)
from conftest import random_speckle_mask
from oracles import (
    dense_laplace_solve,
    flood_fill_components,
    lloyd_oracle,
    srgb_to_lab_scalar,
)


def _verdict(name: str, ok: bool, detail: str = "") -> None:
    print(f"[ACCEPTANCE] {name}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else ""))
    assert ok, f"{name}: {detail}"


# ---------------------------------------------------------------------------
# Harmonic fill vs dense direct solve
# ---------------------------------------------------------------------------


def test_harmonic_fill_matches_dense_solve():
    cfg = HarmonicSolverConfig()  # tolerance 1e-4 -> comparison budget 1e-3
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(20):
        values = rng.random((32, 32))
        bits = random_speckle_mask(rng, 32, 32, blobs=int(rng.integers(2, 6)))
        result = harmonic_fill(GrayPlane(values), BinaryMask(bits), cfg)
        assert result.converged
        direct = dense_laplace_solve(values, bits)
        worst = max(worst, float(np.abs(result.plane.values - direct).max()))
    elapsed = time.perf_counter() - start
    _verdict(
        "harmonic-fill oracle equivalence",
        worst <= 10.0 * cfg.tolerance and elapsed < 5.0,
        f"worst |SOR - direct| = {worst:.2e} <= 1e-3, {elapsed:.2f}s < 5s",
    )


def test_affine_field_reproduction():
    # f affine in normalized coordinates, hence discrete-harmonic and in [0, 1]
    size = 64
    axis = np.arange(size) / (size - 1)
    field = (2.0 * axis[None, :] + 3.0 * axis[:, None]) / 100.0
    bits = np.zeros((size, size), bool)
    bits[15:50, 15:50] = True  # 1225 px = 29.9% of the grid
    assert bits.sum() <= 0.30 * size * size
    cfg = HarmonicSolverConfig(tolerance=1e-6)
    start = time.perf_counter()
    result = harmonic_fill(GrayPlane(field), BinaryMask(bits), cfg)
    elapsed = time.perf_counter() - start
    err = float(np.abs(result.plane.values - field).max())
    _verdict(
        "affine reproduction",
        result.converged and err <= 1e-3 and elapsed < 1.0,
        f"max abs error = {err:.2e} <= 1e-3, {elapsed:.3f}s < 1s",
    )


def test_maximum_principle_holds_everywhere():
    cfg = HarmonicSolverConfig()
    rng = np.random.default_rng(202)
    violations = 0
    cases = 0
    for _ in range(1000):
        h, w = int(rng.integers(4, 14)), int(rng.integers(4, 14))
        values = rng.random((h, w))
        bits = random_speckle_mask(rng, h, w, blobs=int(rng.integers(1, 4)), max_radius=2)
        if not bits.any():
            continue
        cases += 1
        filled = harmonic_fill(GrayPlane(values), BinaryMask(bits), cfg).plane.values
        for component in flood_fill_components(bits, connectivity=4):
            ring_values = []
            for x, y in component:
                for nx, ny in ((x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)):
                    if 0 <= nx < w and 0 <= ny < h and not bits[ny, nx]:
                        ring_values.append(values[ny, nx])
            lo, hi = min(ring_values), max(ring_values)
            for x, y in component:
                if not lo <= filled[y, x] <= hi:
                    violations += 1
    _verdict(
        "maximum principle",
        violations == 0 and cases >= 900,
        f"{violations} violations over {cases} randomized cases",
    )


def test_fundamental_solution_laplacian_decays_second_order():
    sample_points = [(1.0, 0.4), (0.9, -0.8), (-1.2, 0.5), (0.7, 0.7), (1.4, 0.1)]

    def worst_discrete_laplacian(h: float) -> float:
        worst = 0.0
        for cx, cy in sample_points:
            total = -4.0 * radial_fundamental_solution(np.hypot(cx, cy), 2, 1.0, 0.0)
            for dx, dy in ((h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)):
                total += radial_fundamental_solution(np.hypot(cx + dx, cy + dy), 2, 1.0, 0.0)
            worst = max(worst, abs(total) / (h * h))
        return worst

    spacings = [0.2, 0.1, 0.05, 0.025]  # three successive halvings
    magnitudes = [worst_discrete_laplacian(h) for h in spacings]
    ratios = [coarse / fine for coarse, fine in zip(magnitudes, magnitudes[1:])]
    ok = all(3.5 <= r <= 4.5 for r in ratios)
    _verdict(
        "fundamental-solution Laplacian decay",
        ok,
        "ratios per halving: " + ", ".join(f"{r:.2f}" for r in ratios),
    )


# ---------------------------------------------------------------------------
# k-means vs scalar Lloyd oracle
# ---------------------------------------------------------------------------


def test_kmeans_bit_identical_to_oracle():
    rng = np.random.default_rng(303)
    mismatches = 0
    for trial in range(100):
        k = int(rng.integers(1, 5))
        n = int(rng.integers(k, 201))
        pts = rng.uniform(-60.0, 60.0, size=(n, 2))
        seed = int(rng.integers(0, 2**31 - 1))
        feats = [FeatureVector(float(a), float(b), (i, 0)) for i, (a, b) in enumerate(pts)]
        model = kmeans(feats, k=k, seed=seed)
        # objective non-increase is asserted inside kmeans; double-check here
        hist = model.objective_history
        assert all(b <= a + 1e-9 for a, b in zip(hist, hist[1:]))
        _, oracle_assign, oracle_iters, _ = lloyd_oracle(
            [(float(a), float(b)) for a, b in pts], k, seed
        )
        if model.assignments.tolist() != oracle_assign or model.iterations != oracle_iters:
            mismatches += 1
    _verdict(
        "k-means oracle equivalence",
        mismatches == 0,
        f"{mismatches} mismatches over 100 instances (assignments bit-identical)",
    )


# ---------------------------------------------------------------------------
# Color conversion vs scalar reference
# ---------------------------------------------------------------------------


def test_color_conversion_matches_reference():
    rng = np.random.default_rng(404)
    triples = rng.integers(0, 256, size=(256, 3))
    img = ImageRGB8(triples.reshape(16, 16, 3))
    lab = rgb_to_lab(img).values.reshape(-1, 3)
    worst = 0.0
    for got, (r, g, b) in zip(lab, triples):
        expected = srgb_to_lab_scalar(int(r), int(g), int(b))
        worst = max(worst, float(np.abs(got - np.array(expected)).max()))
    _verdict(
        "color conversion",
        worst <= 1e-6,
        f"worst |library - scalar reference| = {worst:.2e} <= 1e-6 over 256 triples",
    )


# ---------------------------------------------------------------------------
# Synthetic end-to-end suite (seeds 1..50, default 512x512 spec)
# ---------------------------------------------------------------------------


@dataclass
class SuiteItem:
    seed: int
    image: ImageRGB8
    inpainted: ImageRGB8
    glare_mask: BinaryMask  # dilated inpaint mask actually used
    report: CervigramReport


@pytest.fixture(scope="module")
def synthetic_suite():
    cfg = PipelineConfig()
    spec = SyntheticSpec()
    items = []
    start = time.perf_counter()
    for seed in range(1, 51):
        img, _, roi = generate_synthetic(seed, spec)
        inpainted, _, report = process_image(img, cfg, truth_roi=roi)
        glare_mask = build_inpaint_mask(detect_specular(img, cfg.specular), cfg.specular)
        items.append(SuiteItem(seed, img, inpainted, glare_mask, report))
    elapsed = time.perf_counter() - start
    return items, elapsed, cfg


def test_synthetic_suite_mostly_correct(synthetic_suite):
    items, elapsed, _ = synthetic_suite
    correct = sum(1 for it in items if it.report.detection is DetectionClass.CORRECT)
    rate = correct / len(items)
    _verdict(
        "synthetic end-to-end suite",
        rate >= 0.90 and elapsed < 60.0,
        f"{correct}/{len(items)} Correct ({rate:.0%} >= 90%), {elapsed:.1f}s < 60s",
    )


def test_glare_closure_after_inpainting(synthetic_suite):
    items, _, cfg = synthetic_suite
    threshold = cfg.specular.white_threshold
    residual_glare = 0
    for it in items:
        # precondition: the Dirichlet ring sits below the white threshold
        ring = mask_boundary(it.glare_mask)
        ring_ok = all(
            (it.image.pixels[y, x].astype(float) / 255.0 < threshold).all() for x, y in ring
        )
        assert ring_ok, f"seed {it.seed}: ring touches the threshold; closure not applicable"
        redetected = detect_specular(it.inpainted, cfg.specular)
        residual_glare += int((redetected.bits & it.glare_mask.bits).sum())
    _verdict(
        "glare closure",
        residual_glare == 0,
        f"{residual_glare} re-detected glare pixels inside the filled masks",
    )


def test_full_pipeline_determinism(tmp_path, synthetic_suite):
    _, _, cfg = synthetic_suite
    src = tmp_path / "src"
    src.mkdir()
    paths = []
    for seed in (1, 2, 3):
        img, _, _ = generate_synthetic(seed)
        p = src / f"case_{seed}.png"
        save_image(img, p)
        paths.append(p)
    out1, out2 = tmp_path / "run1", tmp_path / "run2"
    results1 = process_batch(paths, out1, cfg)
    results2 = process_batch(paths, out2, cfg)
    assert all(r.ok for r in results1) and all(r.ok for r in results2)
    names = sorted(p.name for p in out1.iterdir())
    assert names == sorted(p.name for p in out2.iterdir())
    mismatched = [n for n in names if (out1 / n).read_bytes() != (out2 / n).read_bytes()]
    _verdict(
        "determinism",
        not mismatched,
        f"{len(names)} artifacts byte-compared across two runs"
        + (f"; mismatched: {mismatched}" if mismatched else ""),
    )
