"""Per-region color statistics across the supported color spaces."""

import numpy as np
from sklearn.base import BaseEstimator

from .colorspaces import COLOR_SPACES, convert_color_space
from .imaging import region_blocks
from .stats import lower_median
from .validation import check_rgb8

STAT_NAMES = ("mean", "med")
_STAT_ALIASES = {"mean": "mean", "med": "med", "median": "med"}


def _canonical_stats(stats):
    out = []
    for s in stats:
        if s not in _STAT_ALIASES:
            raise ValueError(f"unknown stat {s!r}; expected one of {STAT_NAMES}")
        tok = _STAT_ALIASES[s]
        if tok not in out:
            out.append(tok)
    if not out:
        raise ValueError("at least one stat is required")
    return tuple(out)


class ColorFeatureExtractor(BaseEstimator):
    """Region color features named ``<SPACE>_<channel>_<stat>``.

    Stateless transformer: ``transform(image, grid)`` returns one row per
    region with, for every (space, channel, stat) combination, the mean or
    lower-median of that converted channel over the region's pixels.

    Parameters
    ----------
    spaces : sequence of color-space identifiers, default all 13
    stats : sequence drawn from {"mean", "med"}, in output order
    """

    def __init__(self, spaces=COLOR_SPACES, stats=STAT_NAMES):
        self.spaces = tuple(spaces)
        self.stats = tuple(stats)

    def fit(self, X=None, y=None):
        return self

    def get_feature_names_out(self):
        stats = _canonical_stats(self.stats)
        if not self.spaces:
            raise ValueError("at least one color space is required")
        return [
            f"{space}_{c}_{stat}"
            for space in self.spaces
            for c in range(3)
            for stat in stats
        ]

    def transform(self, image, grid):
        """Feature rows for every grid region of an (H, W, 3) uint8 image."""
        image = check_rgb8(image)
        stats = _canonical_stats(self.stats)
        names = self.get_feature_names_out()
        cols = []
        for space in self.spaces:
            converted = convert_color_space(image, space).astype(np.float64)
            flat = region_blocks(converted, grid).reshape(grid.n_regions, -1, 3)
            for c in range(3):
                vals = flat[:, :, c]
                for stat in stats:
                    if stat == "mean":
                        cols.append(vals.mean(axis=1))
                    else:
                        cols.append(lower_median(vals, axis=1))
        out = np.column_stack(cols)
        assert out.shape == (grid.n_regions, len(names))
        return out
