"""Per-region texture descriptors.

* Gabor filter bank: six orientations, full-image convolution first, then
  per-region response-magnitude statistics (the 31-px default kernel
  cannot fit inside the smallest regions).
* Gray-level co-occurrence matrices at four angles with six properties.
* Rotated-uniform local binary patterns over 3x3 neighborhoods, binned
  into nine uniform rotation classes plus one non-uniform bin.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from sklearn.base import BaseEstimator

from .errors import DegenerateRegionError
from .imaging import region_blocks, to_gray
from .validation import check_gray_float, check_rgb8

GLCM_PROPERTIES = ("asm", "contrast", "dissimilarity", "energy", "entropy",
                   "homogeneity")

# Haralick angle -> (row, col) step at unit distance.
GLCM_ANGLE_OFFSETS = {0: (0, 1), 45: (-1, 1), 90: (-1, 0), 135: (-1, -1)}

LBP_BINS = 10  # popcounts 0..8 of uniform codes, plus one non-uniform bin


@dataclass(frozen=True)
class GaborParams:
    """Filter-bank settings; the defaults gave the sharpest texture maps."""

    wavelength: float = 14.0
    orientations: tuple = (0, 30, 60, 90, 120, 150)
    phase: float = 0.0
    sigma: float = 5.0
    aspect: float = 1.0
    kernel_extent: int | None = None  # odd; default 2*ceil(3*sigma)+1

    def extent(self):
        if self.kernel_extent is not None:
            if self.kernel_extent % 2 == 0:
                raise ValueError("kernel_extent must be odd")
            return self.kernel_extent
        return 2 * math.ceil(3.0 * self.sigma) + 1


@dataclass(frozen=True)
class GlcmSpec:
    """Co-occurrence settings: unit step, four angles, 16 gray levels."""

    distances: tuple = (1,)
    angles: tuple = (0, 45, 90, 135)
    levels: int = 16
    symmetric: bool = True
    normalize: bool = True

    def __post_init__(self):
        if self.levels < 2:
            raise ValueError(f"levels must be >= 2, got {self.levels}")
        for a in self.angles:
            if a not in GLCM_ANGLE_OFFSETS:
                raise ValueError(f"unsupported GLCM angle {a}")


@dataclass(frozen=True)
class LbpCode:
    """Raw 8-bit pattern with its rotation-minimal value and uniform bin."""

    value: int
    rotated_value: int
    uniform: bool
    bin: int


def gabor_kernel(params, theta_deg):
    """Real (cosine-phase) Gabor kernel at one orientation, in degrees."""
    extent = params.extent()
    half = extent // 2
    y, x = np.mgrid[-half:half + 1, -half:half + 1].astype(np.float64)
    t = math.radians(theta_deg)
    xr = x * math.cos(t) + y * math.sin(t)
    yr = -x * math.sin(t) + y * math.cos(t)
    envelope = np.exp(-(xr * xr + (params.aspect ** 2) * yr * yr)
                      / (2.0 * params.sigma ** 2))
    carrier = np.cos(2.0 * np.pi * xr / params.wavelength
                     + math.radians(params.phase))
    return envelope * carrier


def gabor_response_stack(gray, params=None):
    """|response| of the full image under each bank orientation."""
    params = params or GaborParams()
    gray = check_gray_float(gray)
    stack = np.empty((len(params.orientations),) + gray.shape)
    for i, theta in enumerate(params.orientations):
        kernel = gabor_kernel(params, theta)
        stack[i] = np.abs(ndimage.correlate(gray, kernel, mode="reflect"))
    return stack


def gabor_region_features(gray, grid, params=None):
    """Per-region mean and variance of each orientation's |response|."""
    params = params or GaborParams()
    stack = gabor_response_stack(gray, params)
    cols = []
    for i in range(stack.shape[0]):
        flat = region_blocks(stack[i], grid).reshape(grid.n_regions, -1)
        cols.append(flat.mean(axis=1))
        cols.append(flat.var(axis=1))
    return np.column_stack(cols)


def gabor_feature_names(params=None):
    params = params or GaborParams()
    return [f"gabor_t{int(t)}_{stat}"
            for t in params.orientations for stat in ("mean", "var")]


def quantize_levels(block_u8, levels):
    """Equal-width quantization of [0, 255] into ``levels`` gray levels."""
    block = np.asarray(block_u8)
    return (block.astype(np.int64) * levels) // 256


def co_occurrence(level_block, levels, distance=1, angle=0, symmetric=True,
                  normalize=True):
    """Co-occurrence matrix of a block already expressed as level indices."""
    block = np.asarray(level_block, dtype=np.int64)
    dr, dc = GLCM_ANGLE_OFFSETS[angle]
    dr, dc = dr * distance, dc * distance
    h, w = block.shape
    r0, r1 = max(0, -dr), h - max(0, dr)
    c0, c1 = max(0, -dc), w - max(0, dc)
    if r1 <= r0 or c1 <= c0:
        raise DegenerateRegionError(
            f"no pixel pairs at distance {distance}, angle {angle}"
        )
    a = block[r0:r1, c0:c1].ravel()
    b = block[r0 + dr:r1 + dr, c0 + dc:c1 + dc].ravel()
    counts = np.bincount(a * levels + b, minlength=levels * levels)
    m = counts.reshape(levels, levels).astype(np.float64)
    if symmetric:
        m = m + m.T
    if normalize:
        m = m / m.sum()
    return m


def glcm_matrices(block_u8, spec=None):
    """Quantize a uint8 block and compute one matrix per (distance, angle)."""
    spec = spec or GlcmSpec()
    q = quantize_levels(block_u8, spec.levels)
    return {
        (d, a): co_occurrence(q, spec.levels, d, a, spec.symmetric, spec.normalize)
        for d in spec.distances
        for a in spec.angles
    }


def glcm_properties(m):
    """Six texture properties of a normalized co-occurrence matrix.

    Returns (asm, contrast, dissimilarity, energy, entropy, homogeneity).
    """
    m = np.asarray(m, dtype=np.float64)
    if abs(m.sum() - 1.0) > 1e-6:
        raise ValueError("glcm_properties expects a normalized matrix")
    levels = m.shape[0]
    i, j = np.meshgrid(np.arange(levels), np.arange(levels), indexing="ij")
    diff = (i - j).astype(np.float64)
    asm = float(np.sum(m * m))
    contrast = float(np.sum(m * diff * diff))
    dissimilarity = float(np.sum(m * np.abs(diff)))
    energy = math.sqrt(asm)
    nz = m[m > 0]
    entropy = float(-np.sum(nz * np.log(nz)))
    homogeneity = float(np.sum(m / (1.0 + diff * diff)))
    return np.array([asm, contrast, dissimilarity, energy, entropy, homogeneity])


def glcm_region_features(block_u8, spec=None):
    """Properties per (distance, angle); zero-filled if a pairing degenerates."""
    spec = spec or GlcmSpec()
    out = []
    for d in spec.distances:
        for a in spec.angles:
            try:
                q = quantize_levels(block_u8, spec.levels)
                m = co_occurrence(q, spec.levels, d, a, spec.symmetric, True)
                out.append(glcm_properties(m))
            except DegenerateRegionError:
                out.append(np.zeros(len(GLCM_PROPERTIES)))
    return np.concatenate(out)


def glcm_feature_names(spec=None):
    spec = spec or GlcmSpec()
    names = []
    for d in spec.distances:
        prefix = "glcm" if len(spec.distances) == 1 else f"glcm_d{d}"
        for a in spec.angles:
            names.extend(f"{prefix}_a{a}_{prop}" for prop in GLCM_PROPERTIES)
    return names


# 3x3 neighbors clockwise from top-left; first offset is the code's MSB.
_LBP_OFFSETS = ((-1, -1), (-1, 0), (-1, 1), (0, 1),
                (1, 1), (1, 0), (1, -1), (0, -1))


def _rotate8(code, r):
    return ((code >> r) | (code << (8 - r))) & 0xFF


def _build_lbp_tables():
    rotated = np.empty(256, dtype=np.int64)
    uniform = np.empty(256, dtype=bool)
    bins = np.empty(256, dtype=np.int64)
    for code in range(256):
        rotated[code] = min(_rotate8(code, r) for r in range(8))
        transitions = bin(code ^ _rotate8(code, 1)).count("1")
        uniform[code] = transitions <= 2
        bins[code] = bin(code).count("1") if uniform[code] else 9
    return rotated, uniform, bins

_LBP_ROTATED, _LBP_UNIFORM, _LBP_BIN = _build_lbp_tables()


def rlbp_ulbp_code(neighborhood):
    """LbpCode of one 3x3 block: strict > against the center pixel."""
    block = np.asarray(neighborhood)
    if block.shape != (3, 3):
        raise ValueError(f"expected a 3x3 neighborhood, got {block.shape}")
    center = block[1, 1]
    raw = 0
    for i, (dr, dc) in enumerate(_LBP_OFFSETS):
        if block[1 + dr, 1 + dc] > center:
            raw |= 1 << (7 - i)
    return LbpCode(
        value=raw,
        rotated_value=int(_LBP_ROTATED[raw]),
        uniform=bool(_LBP_UNIFORM[raw]),
        bin=int(_LBP_BIN[raw]),
    )


def lbp_codes(block):
    """Raw LBP codes at every interior pixel of a 2-D block."""
    block = np.asarray(block)
    if block.ndim != 2 or block.shape[0] < 3 or block.shape[1] < 3:
        raise DegenerateRegionError(
            f"LBP needs at least a 3x3 block, got {block.shape}"
        )
    center = block[1:-1, 1:-1]
    raw = np.zeros(center.shape, dtype=np.int64)
    h, w = block.shape
    for i, (dr, dc) in enumerate(_LBP_OFFSETS):
        neigh = block[1 + dr:h - 1 + dr, 1 + dc:w - 1 + dc]
        raw |= (neigh > center).astype(np.int64) << (7 - i)
    return raw


def lbp_region_features(block):
    """Normalized 10-bin rotated-uniform histogram plus its entropy."""
    bins = _LBP_BIN[lbp_codes(block)]
    hist = np.bincount(bins.ravel(), minlength=LBP_BINS).astype(np.float64)
    hist /= hist.sum()
    nz = hist[hist > 0]
    entropy = float(-np.sum(nz * np.log(nz)))
    return np.concatenate([hist, [entropy]])


def lbp_feature_names():
    return [f"lbp_bin{i}" for i in range(LBP_BINS)] + ["lbp_entropy"]


class TextureFeatureExtractor(BaseEstimator):
    """Region texture features from the Gabor bank, GLCM, and LBP."""

    def __init__(self, gabor_params=None, glcm_spec=None):
        self.gabor_params = gabor_params
        self.glcm_spec = glcm_spec

    def fit(self, X=None, y=None):
        return self

    def get_feature_names_out(self):
        return (gabor_feature_names(self.gabor_params)
                + glcm_feature_names(self.glcm_spec)
                + lbp_feature_names())

    def transform(self, image, grid):
        """Feature rows for every grid region; accepts RGB uint8 or float gray."""
        if image.ndim == 3:
            gray = to_gray(check_rgb8(image))
        else:
            gray = check_gray_float(image)
        gabor = gabor_region_features(gray, grid, self.gabor_params)
        gray_u8 = np.rint(np.clip(gray, 0.0, 1.0) * 255.0).astype(np.uint8)
        blocks = region_blocks(gray_u8, grid)
        spec = self.glcm_spec or GlcmSpec()
        rows = np.empty((grid.n_regions,
                         len(spec.distances) * len(spec.angles) * 6 + LBP_BINS + 1))
        for i in range(grid.n_regions):
            rows[i] = np.concatenate([
                glcm_region_features(blocks[i], spec),
                lbp_region_features(blocks[i]),
            ])
        return np.hstack([gabor, rows])
