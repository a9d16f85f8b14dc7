"""Exception types shared across the package."""


class ImageFormatError(ValueError):
    """Decoded image does not match the expected depth/channel contract."""


class DimensionMismatchError(ValueError):
    """Paired rasters (image, mask, grid) disagree on pixel dimensions."""


class InvalidKsizeError(ValueError):
    """Region kernel size is non-positive or larger than the image."""


class UnsupportedColorSpaceError(ValueError):
    """Requested color space is not one of the supported identifiers."""


class DegenerateRegionError(ValueError):
    """Region too small to support the requested texture statistic."""


class DegenerateTargetError(ValueError):
    """Training labels collapse to a single class."""


class EmptyMatrixError(ValueError):
    """Feature matrix has no rows or no columns."""


class EmptyGroupError(ValueError):
    """Quartile or aggregation group has no values."""


class PlacementError(RuntimeError):
    """Synthetic board generator exhausted its placement retry budget."""
