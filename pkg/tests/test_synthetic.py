import numpy as np
import pytest

from cervipre import SpecularConfig, SyntheticSpec, detect_specular, generate_synthetic

SMALL = SyntheticSpec(width=96, height=96, speckle_count=4, speckle_size=2)


def test_same_seed_is_bit_identical():
    img1, glare1, roi1 = generate_synthetic(9, SMALL)
    img2, glare2, roi2 = generate_synthetic(9, SMALL)
    assert img1 == img2 and glare1 == glare2 and roi1 == roi2


def test_different_seeds_differ():
    img1, _, _ = generate_synthetic(1, SMALL)
    img2, _, _ = generate_synthetic(2, SMALL)
    assert img1 != img2


def test_zero_speckles_mean_empty_glare_truth():
    _, glare, _ = generate_synthetic(3, SyntheticSpec(width=96, height=96, speckle_count=0))
    assert glare.count == 0


def test_speckle_area_is_exact():
    spec = SyntheticSpec(width=128, height=128, speckle_count=5, speckle_size=3)
    _, glare, _ = generate_synthetic(4, spec)
    assert glare.count == 5 * 3 * 3  # non-overlapping squares


def test_zero_size_ellipse_rejected():
    with pytest.raises(ValueError):
        SyntheticSpec(ellipse_axes=(0.0, 0.3))


def test_spec_validation():
    with pytest.raises(ValueError):
        SyntheticSpec(width=8)
    with pytest.raises(ValueError):
        SyntheticSpec(speckle_count=-1)
    with pytest.raises(ValueError):
        SyntheticSpec(speckle_size=0)
    with pytest.raises(ValueError):
        SyntheticSpec(cervix_color=(300, 0, 0))


def test_too_many_speckles_rejected():
    crowded = SyntheticSpec(width=96, height=96, speckle_count=500, speckle_size=4)
    with pytest.raises(ValueError):
        generate_synthetic(0, crowded)


def test_glare_pixels_saturate_all_channels():
    img, glare, _ = generate_synthetic(5, SMALL)
    assert glare.count > 0
    glare_pixels = img.pixels[glare.bits]
    assert glare_pixels.min() >= 240


def test_only_glare_trips_the_detector():
    img, glare, _ = generate_synthetic(6, SMALL)
    detected = detect_specular(img, SpecularConfig(white_threshold=0.9))
    assert np.array_equal(detected.bits, glare.bits)


def test_roi_truth_is_the_ellipse():
    _, _, roi = generate_synthetic(7, SMALL)
    assert 0 < roi.count < roi.width * roi.height
    # centered blob: the frame corners stay background
    assert not roi.bits[0, 0] and not roi.bits[-1, -1]
    ys, xs = np.nonzero(roi.bits)
    cx, cy = xs.mean(), ys.mean()
    assert abs(cx - (roi.width - 1) / 2) < 1.0
    assert abs(cy - (roi.height - 1) / 2) < 1.0


def test_speckles_stay_inside_the_ellipse():
    img, glare, roi = generate_synthetic(8, SMALL)
    assert not (glare.bits & ~roi.bits).any()
