"""Rasters, semantic masks, checkerboard region grids, and decile labels.

Coordinate conventions used everywhere in this package: origin is the
top-left pixel, arrays are row-major, and an (x, y) pair means
(column, row). Grids tile an image with non-overlapping k x k squares
starting at (0, 0); partial strips at the right/bottom edges are dropped.
"""

from dataclasses import dataclass

import numpy as np
from PIL import Image

from .errors import DimensionMismatchError, ImageFormatError, InvalidKsizeError
from .validation import check_mask, check_rgb8

GRAY_WEIGHTS = (0.299, 0.587, 0.114)  # BT.601 luma

KSIZES = (5, 10, 15, 20, 25)

_MODE_DEPTH = {
    "I;16": 16, "I;16B": 16, "I;16L": 16, "I;16N": 16,
    "I": 32, "F": 32,
}


def load_image(path):
    """Load an 8-bit RGB PNG/TIFF as an (H, W, 3) uint8 array.

    Raises OSError for unreadable files and ImageFormatError when the
    decoded depth or channel count is not 8-bit RGB.
    """
    with Image.open(path) as im:
        im.load()
        if im.mode in _MODE_DEPTH:
            raise ImageFormatError(
                f"{path}: depth {_MODE_DEPTH[im.mode]}, expected 8"
            )
        if im.mode != "RGB":
            found = len(im.getbands())
            raise ImageFormatError(f"{path}: channels {found}, expected 3")
        return np.asarray(im, dtype=np.uint8)


def load_mask(path):
    """Load an 8-bit single-channel mask; any nonzero pixel becomes 1."""
    with Image.open(path) as im:
        im.load()
        if im.mode in _MODE_DEPTH:
            raise ImageFormatError(
                f"{path}: depth {_MODE_DEPTH[im.mode]}, expected 8"
            )
        if im.mode != "L":
            found = len(im.getbands())
            raise ImageFormatError(f"{path}: channels {found}, expected 1")
        return check_mask(np.asarray(im))


def to_gray(image):
    """BT.601 luma of an (H, W, 3) uint8 image, as float64 in [0, 1]."""
    image = check_rgb8(image)
    w = np.asarray(GRAY_WEIGHTS)
    return (image.astype(np.float64) @ w) / 255.0


@dataclass(frozen=True)
class RegionGrid:
    """Row-major tiling of an image into non-overlapping k x k squares."""

    ksize: int
    rows: int
    cols: int

    @property
    def n_regions(self):
        return self.rows * self.cols

    def anchor(self, index):
        """Top-left (x0, y0) of the region at a row-major index."""
        r, c = divmod(index, self.cols)
        return c * self.ksize, r * self.ksize

    def anchors(self):
        """All region anchors in row-major order."""
        return [self.anchor(i) for i in range(self.n_regions)]


@dataclass(frozen=True)
class RegionLabel:
    """Ground truth for one region: component coverage and its decile."""

    region_index: int
    decile: int
    fraction: float


def build_region_grid(width, height, ksize):
    """Tile a width x height image with k x k regions, dropping partial strips."""
    if ksize < 1:
        raise InvalidKsizeError(f"ksize must be >= 1, got {ksize}")
    if ksize > width or ksize > height:
        raise InvalidKsizeError(
            f"ksize {ksize} exceeds image dimensions {width}x{height}"
        )
    return RegionGrid(ksize=int(ksize), rows=height // ksize, cols=width // ksize)


def grid_for_image(image, ksize):
    """Region grid matching an (H, W[, C]) array."""
    h, w = image.shape[:2]
    return build_region_grid(w, h, ksize)


def region_blocks(array, grid):
    """Stack a grid's blocks: (n_regions, k, k) or (n_regions, k, k, C).

    Blocks follow the grid's row-major region order. The returned array is
    a reshaped copy-free view where possible; treat it as read-only.
    """
    k = grid.ksize
    h, w = grid.rows * k, grid.cols * k
    if array.shape[0] < h or array.shape[1] < w:
        raise DimensionMismatchError(
            f"array {array.shape[1]}x{array.shape[0]} smaller than grid extent {w}x{h}"
        )
    a = array[:h, :w]
    if a.ndim == 2:
        blocks = a.reshape(grid.rows, k, grid.cols, k).transpose(0, 2, 1, 3)
        return blocks.reshape(grid.n_regions, k, k)
    blocks = a.reshape(grid.rows, k, grid.cols, k, a.shape[2])
    return blocks.transpose(0, 2, 1, 3, 4).reshape(grid.n_regions, k, k, a.shape[2])


def coverage_decile(component_pixels, region_area):
    """Quantize coverage to 0-10, rounding half up, in exact integer math."""
    return (20 * int(component_pixels) + int(region_area)) // (2 * int(region_area))


def label_regions(grid, mask):
    """One RegionLabel per region: coverage fraction and its 0-10 decile."""
    mask = check_mask(mask)
    counts = region_blocks(mask, grid).sum(axis=(1, 2))
    area = grid.ksize * grid.ksize
    return [
        RegionLabel(i, coverage_decile(c, area), c / area)
        for i, c in enumerate(counts)
    ]
