"""Input validation helpers used by the estimators and pipeline stages."""

import numpy as np

from .errors import DimensionMismatchError, ImageFormatError


def check_rgb8(image):
    """Validate an (H, W, 3) uint8 image and return it as an ndarray."""
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[2] != 3:
        raise ImageFormatError(
            f"expected an (H, W, 3) RGB array, got shape {image.shape}"
        )
    if image.dtype != np.uint8:
        raise ImageFormatError(f"expected uint8 pixels, got {image.dtype}")
    return image


def check_gray_float(image):
    """Validate a single-channel float image; returns a float64 ndarray."""
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 2:
        raise ImageFormatError(
            f"expected an (H, W) grayscale array, got shape {image.shape}"
        )
    if image.size and not np.isfinite(image).all():
        raise ImageFormatError("grayscale image contains non-finite values")
    return image


def check_mask(mask):
    """Validate a binary (H, W) mask; any nonzero value counts as 1."""
    mask = np.asarray(mask)
    if mask.ndim != 2:
        raise ImageFormatError(f"expected an (H, W) mask, got shape {mask.shape}")
    return (mask != 0).astype(np.uint8)


def check_paired_dims(image, mask):
    """Raise if an image and its mask disagree on pixel dimensions."""
    if image.shape[:2] != mask.shape[:2]:
        raise DimensionMismatchError(
            f"image is {image.shape[1]}x{image.shape[0]} but mask is "
            f"{mask.shape[1]}x{mask.shape[0]}"
        )


def check_feature_array(X, n_features=None):
    """Validate a finite 2-D float feature array."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D feature array, got shape {X.shape}")
    if not np.isfinite(X).all():
        raise ValueError("feature array contains NaN or Inf")
    if n_features is not None and X.shape[1] != n_features:
        raise ValueError(f"expected {n_features} feature columns, got {X.shape[1]}")
    return X
