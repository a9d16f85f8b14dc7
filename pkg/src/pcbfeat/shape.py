"""Per-region shape descriptors.

Three detectors, each applied to a region block in isolation so no
detector ever sees neighboring pixels:

* structure-tensor corners (min-eigenvalue score, Harris behind a flag)
  with iterative gradient-orthogonality subpixel refinement,
* scale-normalized determinant-of-Hessian blob detection,
* bilateral filter -> Canny -> external contour statistics.

Gradients are 3x3 Sobel throughout; window sums use a rectangular box.
"""

import math
from dataclasses import dataclass

import cv2
import numpy as np
from scipy import ndimage
from sklearn.base import BaseEstimator

from .imaging import region_blocks, to_gray
from .validation import check_gray_float, check_rgb8

SOBEL_X = np.array([[-1.0, 0.0, 1.0],
                    [-2.0, 0.0, 2.0],
                    [-1.0, 0.0, 1.0]])
SOBEL_Y = SOBEL_X.T

SHAPE_FEATURE_NAMES = (
    "corner_count",
    "corner_mean_response",
    "blob_count",
    "blob_mean_sigma",
    "canny_contour_count",
    "canny_max_contour_area",
    "canny_total_contour_perimeter",
    "canny_edge_pixel_fraction",
)


@dataclass(frozen=True)
class CornerParams:
    """Shi-Tomasi detection and subpixel refinement settings."""

    max_corners: int = 25
    quality_level: float = 0.01
    min_distance: float = 5.0
    block_size: int = 3
    harris_k: float = 0.04
    use_harris: bool = False
    refine_window: int = 3
    refine_zero_zone: int | None = None
    refine_max_iter: int = 40
    refine_epsilon: float = 1e-3

    def __post_init__(self):
        if not 0.0 < self.quality_level < 1.0:
            raise ValueError(f"quality_level must be in (0, 1), got {self.quality_level}")
        if self.min_distance < 1.0:
            raise ValueError(f"min_distance must be >= 1, got {self.min_distance}")
        if self.block_size < 3 or self.block_size % 2 == 0:
            raise ValueError(f"block_size must be odd and >= 3, got {self.block_size}")

    @classmethod
    def for_ksize(cls, ksize):
        """Detection budget scaled to the region size."""
        return cls(
            max_corners=int(ksize),
            quality_level=0.01,
            min_distance=max(1.0, ksize / 5.0),
            block_size=3,
            refine_window=3,
            refine_max_iter=40,
            refine_epsilon=1e-3,
        )


@dataclass(frozen=True)
class BlobParams:
    """Determinant-of-Hessian scale-space settings."""

    min_sigma: float = 1.0
    max_sigma: float = 10.0
    num_sigma: int = 5
    threshold: float = 0.01
    overlap: float = 0.5
    log_scale: bool = False

    def __post_init__(self):
        if not 0.0 < self.min_sigma <= self.max_sigma:
            raise ValueError(
                f"need 0 < min_sigma <= max_sigma, got {self.min_sigma}, {self.max_sigma}"
            )
        if not 0.0 <= self.overlap <= 1.0:
            raise ValueError(f"overlap must be in [0, 1], got {self.overlap}")

    @classmethod
    def for_ksize(cls, ksize):
        """A blob cannot exceed half the region."""
        return cls(min_sigma=1.0, max_sigma=max(1.0, ksize / 2.0), num_sigma=5,
                   threshold=0.01, overlap=0.5)

    def sigmas(self):
        if self.log_scale:
            return np.geomspace(self.min_sigma, self.max_sigma, self.num_sigma)
        return np.linspace(self.min_sigma, self.max_sigma, self.num_sigma)


@dataclass(frozen=True)
class EdgeParams:
    """Bilateral smoothing plus brightness-relative Canny thresholds."""

    bilateral_diameter: int = 7
    bilateral_sigma_color: float = 50.0
    bilateral_sigma_space: float = 50.0
    l2_gradient: bool = False


@dataclass(frozen=True)
class CornerSet:
    """Refined corner positions (x, y) with their detection responses."""

    positions: np.ndarray  # (n, 2) float64, (x, y)
    responses: np.ndarray  # (n,) float64, descending

    def __len__(self):
        return self.positions.shape[0]


def structure_tensor_response(gray, block_size=3, use_harris=False, harris_k=0.04):
    """Corner response map from the Sobel structure tensor.

    Default score is the Shi-Tomasi min-eigenvalue of the block-summed
    tensor; with ``use_harris`` the score is det(M) - k * trace(M)^2.
    """
    gray = check_gray_float(gray)
    ix = ndimage.correlate(gray, SOBEL_X, mode="reflect")
    iy = ndimage.correlate(gray, SOBEL_Y, mode="reflect")
    scale = block_size * block_size
    sxx = ndimage.uniform_filter(ix * ix, block_size, mode="reflect") * scale
    syy = ndimage.uniform_filter(iy * iy, block_size, mode="reflect") * scale
    sxy = ndimage.uniform_filter(ix * iy, block_size, mode="reflect") * scale
    if use_harris:
        return sxx * syy - sxy * sxy - harris_k * (sxx + syy) ** 2
    half_tr = 0.5 * (sxx + syy)
    root = np.sqrt(0.25 * (sxx - syy) ** 2 + sxy * sxy)
    return half_tr - root


def _bilinear(gray, ys, xs):
    h, w = gray.shape
    ys = np.clip(ys, 0.0, h - 1.0)
    xs = np.clip(xs, 0.0, w - 1.0)
    y0 = np.clip(np.floor(ys).astype(int), 0, h - 2)
    x0 = np.clip(np.floor(xs).astype(int), 0, w - 2)
    fy = ys - y0
    fx = xs - x0
    return (gray[y0, x0] * (1 - fy) * (1 - fx)
            + gray[y0 + 1, x0] * fy * (1 - fx)
            + gray[y0, x0 + 1] * (1 - fy) * fx
            + gray[y0 + 1, x0 + 1] * fy * fx)


def refine_corner_subpixel(gray, x, y, window=3, zero_zone=None,
                           max_iter=40, epsilon=1e-3):
    """Iterate the gradient-orthogonality centroid update around (x, y).

    Every gradient inside the window must be orthogonal to the offset
    from the true corner; solving the weighted normal equations for that
    condition and re-centering converges to subpixel accuracy.
    """
    offs = np.arange(-window, window + 1, dtype=np.float64)
    oy, ox = np.meshgrid(offs, offs, indexing="ij")
    w = np.exp(-((ox / window) ** 2)) * np.exp(-((oy / window) ** 2))
    if zero_zone is not None and zero_zone >= 0:
        zz = (np.abs(ox) <= zero_zone) & (np.abs(oy) <= zero_zone)
        w = np.where(zz, 0.0, w)
    cx, cy = float(x), float(y)
    for _ in range(max_iter):
        gx = 0.5 * (_bilinear(gray, cy + oy, cx + ox + 1)
                    - _bilinear(gray, cy + oy, cx + ox - 1))
        gy = 0.5 * (_bilinear(gray, cy + oy + 1, cx + ox)
                    - _bilinear(gray, cy + oy - 1, cx + ox))
        a = np.sum(w * gx * gx)
        b = np.sum(w * gx * gy)
        c = np.sum(w * gy * gy)
        det = a * c - b * b
        if det <= 1e-12:
            break
        bx = np.sum(w * gx * gx * ox) + np.sum(w * gx * gy * oy)
        by = np.sum(w * gx * gy * ox) + np.sum(w * gy * gy * oy)
        dx = (c * bx - b * by) / det
        dy = (a * by - b * bx) / det
        cx += dx
        cy += dy
        if dx * dx + dy * dy < epsilon * epsilon:
            break
    h, w_img = gray.shape
    return min(max(cx, 0.0), w_img - 1.0), min(max(cy, 0.0), h - 1.0)


def shi_tomasi_corners(gray, params):
    """Detect corners: response threshold, greedy NMS, subpixel refinement."""
    gray = check_gray_float(gray)
    r = structure_tensor_response(
        gray, params.block_size, params.use_harris, params.harris_k
    )
    rmax = r.max() if r.size else 0.0
    if rmax <= 1e-12:
        return CornerSet(np.empty((0, 2)), np.empty(0))
    thresh = params.quality_level * rmax
    local_max = r == ndimage.maximum_filter(r, size=3, mode="reflect")
    ys, xs = np.nonzero(local_max & (r >= thresh))
    scores = r[ys, xs]
    order = np.lexsort((xs, ys, -scores))
    kept = []
    kept_scores = []
    min_d2 = params.min_distance * params.min_distance
    for i in order:
        p = (float(xs[i]), float(ys[i]))
        if all((p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2 >= min_d2 for q in kept):
            kept.append(p)
            kept_scores.append(float(scores[i]))
            if len(kept) >= params.max_corners:
                break
    refined = [
        refine_corner_subpixel(
            gray, px, py, params.refine_window, params.refine_zero_zone,
            params.refine_max_iter, params.refine_epsilon,
        )
        for px, py in kept
    ]
    return CornerSet(
        np.asarray(refined, dtype=np.float64).reshape(-1, 2),
        np.asarray(kept_scores, dtype=np.float64),
    )


def doh_blobs(gray, params):
    """Scale-normalized determinant-of-Hessian blobs as (x, y, sigma) rows.

    Responds to bright and dark blobs alike: negating the image leaves
    the determinant unchanged.
    """
    gray = check_gray_float(gray)
    sigmas = params.sigmas()
    cube = np.empty((len(sigmas),) + gray.shape)
    for i, s in enumerate(sigmas):
        hrr = ndimage.gaussian_filter(gray, s, order=(2, 0), mode="reflect")
        hcc = ndimage.gaussian_filter(gray, s, order=(0, 2), mode="reflect")
        hrc = ndimage.gaussian_filter(gray, s, order=(1, 1), mode="reflect")
        cube[i] = (s ** 4) * (hrr * hcc - hrc * hrc)
    peaks = (cube == ndimage.maximum_filter(cube, size=3, mode="nearest"))
    peaks &= cube > params.threshold
    idx = np.argwhere(peaks)
    if idx.size == 0:
        return np.empty((0, 3))
    values = cube[idx[:, 0], idx[:, 1], idx[:, 2]]
    order = np.lexsort((idx[:, 2], idx[:, 1], idx[:, 0], -values))
    blobs = []  # (x, y, sigma), strongest first
    for i in order:
        si, yy, xx = idx[i]
        cand = (float(xx), float(yy), float(sigmas[si]))
        if all(_disk_overlap(cand, kept) <= params.overlap for kept in blobs):
            blobs.append(cand)
    return np.asarray(blobs, dtype=np.float64).reshape(-1, 3)


def _disk_overlap(b1, b2):
    """Overlap fraction of two blob disks (radius sigma * sqrt(2))."""
    r1 = b1[2] * math.sqrt(2.0)
    r2 = b2[2] * math.sqrt(2.0)
    d = math.hypot(b1[0] - b2[0], b1[1] - b2[1])
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        return 1.0
    # circular lens area over the smaller disk's area
    r1sq, r2sq, dsq = r1 * r1, r2 * r2, d * d
    alpha = math.acos(max(-1.0, min(1.0, (dsq + r1sq - r2sq) / (2.0 * d * r1))))
    beta = math.acos(max(-1.0, min(1.0, (dsq + r2sq - r1sq) / (2.0 * d * r2))))
    lens = (r1sq * (alpha - math.sin(2 * alpha) / 2.0)
            + r2sq * (beta - math.sin(2 * beta) / 2.0))
    return lens / (math.pi * min(r1sq, r2sq))


def canny_thresholds(mean_gray):
    """Hysteresis thresholds at mean -/+ 25%, clamped to [0, 255]."""
    low = max(0.0, min(255.0, 0.75 * mean_gray))
    high = max(0.0, min(255.0, 1.25 * mean_gray))
    return low, high


def canny_contour_features(gray_u8, params=None):
    """Edge/contour statistics of one uint8 gray block.

    Pipeline: bilateral filter, Canny with brightness-relative thresholds
    (from the raw block mean, so thresholds scale with brightness),
    external 8-connected contour tracing with full point chains. Returns
    (contour_count, max_contour_area, total_contour_perimeter,
    edge_pixel_fraction).
    """
    params = params or EdgeParams()
    block = np.ascontiguousarray(gray_u8, dtype=np.uint8)
    low, high = canny_thresholds(float(block.mean()))
    smoothed = cv2.bilateralFilter(
        block, params.bilateral_diameter,
        params.bilateral_sigma_color, params.bilateral_sigma_space,
    )
    edges = cv2.Canny(smoothed, low, high, L2gradient=params.l2_gradient)
    contours, _ = cv2.findContours(edges, cv2.RETR_EXTERNAL, cv2.CHAIN_APPROX_NONE)
    if contours:
        areas = [cv2.contourArea(c) for c in contours]
        perims = [cv2.arcLength(c, closed=True) for c in contours]
        max_area, total_perim = max(areas), sum(perims)
    else:
        max_area, total_perim = 0.0, 0.0
    frac = float(np.count_nonzero(edges)) / edges.size
    return np.array([len(contours), max_area, total_perim, frac], dtype=np.float64)


def shape_feature_slice(block_gray, ksize, corner_params=None, blob_params=None,
                        edge_params=None):
    """All eight shape features of one float-gray region block."""
    corner_params = corner_params or CornerParams.for_ksize(ksize)
    blob_params = blob_params or BlobParams.for_ksize(ksize)
    corners = shi_tomasi_corners(block_gray, corner_params)
    blobs = doh_blobs(block_gray, blob_params)
    block_u8 = np.rint(np.clip(block_gray, 0.0, 1.0) * 255.0).astype(np.uint8)
    edge_feats = canny_contour_features(block_u8, edge_params)
    return np.concatenate([
        [len(corners), corners.responses.mean() if len(corners) else 0.0],
        [blobs.shape[0], blobs[:, 2].mean() if blobs.shape[0] else 0.0],
        edge_feats,
    ])


class ShapeFeatureExtractor(BaseEstimator):
    """Region shape features from corners, blobs, and edge contours.

    Detector parameters default to a per-ksize schedule (corner budget and
    blob scale range grow with the region); pass explicit parameter
    objects to override.
    """

    def __init__(self, corner_params=None, blob_params=None, edge_params=None):
        self.corner_params = corner_params
        self.blob_params = blob_params
        self.edge_params = edge_params

    def fit(self, X=None, y=None):
        return self

    def get_feature_names_out(self):
        return list(SHAPE_FEATURE_NAMES)

    def transform(self, image, grid):
        """Feature rows for every grid region; accepts RGB uint8 or float gray."""
        if image.ndim == 3:
            gray = to_gray(check_rgb8(image))
        else:
            gray = check_gray_float(image)
        blocks = region_blocks(gray, grid)
        out = np.empty((grid.n_regions, len(SHAPE_FEATURE_NAMES)))
        for i in range(grid.n_regions):
            out[i] = shape_feature_slice(
                blocks[i], grid.ksize,
                self.corner_params, self.blob_params, self.edge_params,
            )
        return out
