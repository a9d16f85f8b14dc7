"""Pinned conversions from 8-bit sRGB into the 13 supported color spaces.

All conversions start from sRGB bytes scaled to [0, 1]. Conventions:

* ``RGB``       identity, channels in [0, 1].
* ``HSV``/``HLS``  hue in degrees [0, 360); S, V, L in [0, 1].
* ``XYZ``       sRGB linearization then the D65 matrix.
* ``LAB``/``LUV``  CIE 1976 from that XYZ; the white point is the matrix's
                own response to linear (1, 1, 1), so white maps to exactly
                (100, 0, 0).
* ``RGB_CIE``   the CIE 1931 RGB primaries matrix applied to the
                nonlinear sRGB values.
* ``YCrCb``     BT.601 luma, full-range chroma with a +0.5 offset
                (channel order Y, Cr, Cb).
* ``YPbPr``/``YDbDr``/``YIQ``/``YUV``  BT.601 luma with each standard's
                chroma matrix, applied to nonlinear RGB.
* ``HED``       Ruifrok-Johnston haematoxylin/eosin/DAB optical-density
                deconvolution.

Channel indices are 0-based: HLS channel 2 is saturation, LAB channel 1
is a*. Feature names built from these conversions read
``<SPACE>_<channel>_<stat>``.
"""

import numpy as np

from .errors import UnsupportedColorSpaceError
from .validation import check_rgb8

COLOR_SPACES = (
    "RGB", "RGB_CIE", "HSV", "HLS", "LAB", "LUV", "YCrCb",
    "YDbDr", "YPbPr", "XYZ", "YIQ", "YUV", "HED",
)

# sRGB (linear) -> XYZ, D65 reference white.
_XYZ_FROM_LINRGB = np.array([
    [0.412453, 0.357580, 0.180423],
    [0.212671, 0.715160, 0.072169],
    [0.019334, 0.119193, 0.950227],
])
_WHITE_XYZ = _XYZ_FROM_LINRGB.sum(axis=1)

# CIE 1931 RGB primaries, E illuminant; inverse taken numerically. The
# matrix is applied to nonlinear sRGB values.
_XYZ_FROM_RGBCIE = np.array([
    [0.49, 0.31, 0.20],
    [0.17697, 0.81240, 0.01063],
    [0.00, 0.01, 0.99],
]) / 0.17697
_RGBCIE_FROM_RGB = np.linalg.inv(_XYZ_FROM_RGBCIE) @ _XYZ_FROM_LINRGB

_YPBPR_FROM_RGB = np.array([
    [0.299, 0.587, 0.114],
    [-0.168736, -0.331264, 0.5],
    [0.5, -0.418688, -0.081312],
])
_YDBDR_FROM_RGB = np.array([
    [0.299, 0.587, 0.114],
    [-0.45, -0.883, 1.333],
    [-1.333, 1.116, 0.217],
])
_YIQ_FROM_RGB = np.array([
    [0.299, 0.587, 0.114],
    [0.59590059, -0.27455667, -0.32134392],
    [0.21153661, -0.52273617, 0.31119955],
])
_YUV_FROM_RGB = np.array([
    [0.299, 0.587, 0.114],
    [-0.14714119, -0.28886916, 0.43601035],
    [0.61497538, -0.51496512, -0.10001026],
])

# Ruifrok-Johnston stain absorption matrix (rows: H, E, DAB in RGB).
_RGB_FROM_HED = np.array([
    [0.65, 0.70, 0.29],
    [0.07, 0.99, 0.11],
    [0.27, 0.57, 0.78],
])
_HED_FROM_RGB = np.linalg.inv(_RGB_FROM_HED)
_HED_LOG_FLOOR = 1e-6

# Documented per-channel output ranges, recorded into run manifests so
# downstream consumers can compare statistics across spaces. LAB/LUV/HED
# bounds are the extremes reachable from the 8-bit sRGB cube (rounded out).
CHANNEL_RANGES = {
    "RGB": ((0.0, 1.0), (0.0, 1.0), (0.0, 1.0)),
    "RGB_CIE": ((-0.022, 0.76), (0.0, 0.9), (-0.005, 1.05)),
    "HSV": ((0.0, 360.0), (0.0, 1.0), (0.0, 1.0)),
    "HLS": ((0.0, 360.0), (0.0, 1.0), (0.0, 1.0)),
    "LAB": ((0.0, 100.0), (-87.0, 99.0), (-108.0, 95.0)),
    "LUV": ((0.0, 100.0), (-84.0, 176.0), (-135.0, 108.0)),
    "YCrCb": ((0.0, 1.0), (0.0, 1.0), (0.0, 1.0)),
    "YDbDr": ((0.0, 1.0), (-1.333, 1.333), (-1.333, 1.333)),
    "YPbPr": ((0.0, 1.0), (-0.5, 0.5), (-0.5, 0.5)),
    "XYZ": ((0.0, 0.951), (0.0, 1.0), (0.0, 1.089)),
    "YIQ": ((0.0, 1.0), (-0.596, 0.596), (-0.523, 0.523)),
    "YUV": ((0.0, 1.0), (-0.437, 0.437), (-0.615, 0.615)),
    "HED": ((0.0, 0.63), (0.0, 0.35), (0.0, 0.67)),
}


def _as_float_rgb(image):
    return check_rgb8(image).astype(np.float64) / 255.0


def _srgb_to_linear(c):
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def _to_xyz(rgb):
    return _srgb_to_linear(rgb) @ _XYZ_FROM_LINRGB.T


def _lab_f(t):
    delta = 6.0 / 29.0
    return np.where(t > delta**3, np.cbrt(t), t / (3 * delta**2) + 4.0 / 29.0)


def _to_lab(rgb):
    xyz = _to_xyz(rgb) / _WHITE_XYZ
    fx, fy, fz = _lab_f(xyz[..., 0]), _lab_f(xyz[..., 1]), _lab_f(xyz[..., 2])
    return np.stack([116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)], axis=-1)


def _uv_prime(xyz):
    x, y, z = xyz[..., 0], xyz[..., 1], xyz[..., 2]
    denom = x + 15.0 * y + 3.0 * z
    safe = np.where(denom == 0.0, 1.0, denom)
    u = np.where(denom == 0.0, 0.0, 4.0 * x / safe)
    v = np.where(denom == 0.0, 0.0, 9.0 * y / safe)
    return u, v

_WHITE_UV = _uv_prime(_WHITE_XYZ[np.newaxis, :])


def _to_luv(rgb):
    xyz = _to_xyz(rgb)
    L = 116.0 * _lab_f(xyz[..., 1] / _WHITE_XYZ[1]) - 16.0
    u, v = _uv_prime(xyz)
    un, vn = _WHITE_UV[0][0], _WHITE_UV[1][0]
    return np.stack([L, 13.0 * L * (u - un), 13.0 * L * (v - vn)], axis=-1)


def _to_hed(rgb):
    od = np.log(np.maximum(rgb, _HED_LOG_FLOOR)) / np.log(_HED_LOG_FLOOR)
    return np.maximum(od @ _HED_FROM_RGB, 0.0)


def _hue_degrees(r, g, b, cmax, chroma):
    safe = np.where(chroma == 0.0, 1.0, chroma)
    h = np.select(
        [chroma == 0.0, cmax == r, cmax == g],
        [0.0,
         np.mod((g - b) / safe, 6.0),
         (b - r) / safe + 2.0],
        default=(r - g) / safe + 4.0,
    )
    return 60.0 * h


def _to_hsv(rgb):
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    cmax = np.max(rgb, axis=-1)
    chroma = cmax - np.min(rgb, axis=-1)
    h = _hue_degrees(r, g, b, cmax, chroma)
    s = np.where(cmax == 0.0, 0.0, chroma / np.where(cmax == 0.0, 1.0, cmax))
    return np.stack([h, s, cmax], axis=-1)


def _to_hls(rgb):
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    cmax = np.max(rgb, axis=-1)
    cmin = np.min(rgb, axis=-1)
    chroma = cmax - cmin
    h = _hue_degrees(r, g, b, cmax, chroma)
    ell = 0.5 * (cmax + cmin)
    denom = 1.0 - np.abs(2.0 * ell - 1.0)
    s = np.where(chroma == 0.0, 0.0, chroma / np.where(denom == 0.0, 1.0, denom))
    return np.stack([h, ell, s], axis=-1)


def hsv_to_rgb(hsv):
    """Inverse of the HSV conversion; returns float RGB in [0, 1]."""
    hsv = np.asarray(hsv, dtype=np.float64)
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    c = v * s
    return _from_hue_chroma(h, c, v - c)


def hls_to_rgb(hls):
    """Inverse of the HLS conversion; returns float RGB in [0, 1]."""
    hls = np.asarray(hls, dtype=np.float64)
    h, ell, s = hls[..., 0], hls[..., 1], hls[..., 2]
    c = (1.0 - np.abs(2.0 * ell - 1.0)) * s
    return _from_hue_chroma(h, c, ell - 0.5 * c)


def _from_hue_chroma(h, c, m):
    hp = np.mod(h, 360.0) / 60.0
    x = c * (1.0 - np.abs(np.mod(hp, 2.0) - 1.0))
    zeros = np.zeros_like(c)
    sector = np.floor(hp).astype(int) % 6
    r = np.choose(sector, [c, x, zeros, zeros, x, c])
    g = np.choose(sector, [x, c, c, x, zeros, zeros])
    b = np.choose(sector, [zeros, zeros, x, c, c, x])
    return np.stack([r + m, g + m, b + m], axis=-1)


def _to_ycrcb(rgb):
    y = rgb @ np.array([0.299, 0.587, 0.114])
    cr = 0.713 * (rgb[..., 0] - y) + 0.5
    cb = 0.564 * (rgb[..., 2] - y) + 0.5
    return np.stack([y, cr, cb], axis=-1)


_CONVERTERS = {
    "RGB": lambda rgb: rgb,
    "RGB_CIE": lambda rgb: rgb @ _RGBCIE_FROM_RGB.T,
    "HSV": _to_hsv,
    "HLS": _to_hls,
    "LAB": _to_lab,
    "LUV": _to_luv,
    "YCrCb": _to_ycrcb,
    "YDbDr": lambda rgb: rgb @ _YDBDR_FROM_RGB.T,
    "YPbPr": lambda rgb: rgb @ _YPBPR_FROM_RGB.T,
    "XYZ": _to_xyz,
    "YIQ": lambda rgb: rgb @ _YIQ_FROM_RGB.T,
    "YUV": lambda rgb: rgb @ _YUV_FROM_RGB.T,
    "HED": _to_hed,
}


def convert_color_space(image, space):
    """Convert an (H, W, 3) uint8 sRGB image into one of the 13 spaces.

    Returns a float32 (H, W, 3) array in the space's documented native
    range (see CHANNEL_RANGES).
    """
    if space not in _CONVERTERS:
        raise UnsupportedColorSpaceError(
            f"unknown color space {space!r}; expected one of {COLOR_SPACES}"
        )
    return _CONVERTERS[space](_as_float_rgb(image)).astype(np.float32)


def channel_ranges(space):
    """Documented (low, high) output range for each of a space's channels."""
    if space not in CHANNEL_RANGES:
        raise UnsupportedColorSpaceError(
            f"unknown color space {space!r}; expected one of {COLOR_SPACES}"
        )
    return CHANNEL_RANGES[space]
