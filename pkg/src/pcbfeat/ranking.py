"""Importance aggregation: family tagging, grouped Tukey summaries, top-k."""

from collections import defaultdict
from dataclasses import dataclass

from .colorspaces import COLOR_SPACES
from .errors import EmptyGroupError
from .stats import lower_median, tukey_quartiles

FAMILIES = ("color", "shape", "texture")

_SHAPE_PREFIXES = ("corner_", "blob_", "canny_")
_TEXTURE_PREFIXES = ("gabor_", "glcm_", "lbp_")


@dataclass(frozen=True)
class ImportanceRecord:
    """One feature's importance from one fitted (image, ksize) forest."""

    feature: str
    family: str
    ksize: int
    image_id: str
    importance: float


@dataclass(frozen=True)
class RankedFeature:
    """A feature's cross-image median importance, for top-k reports."""

    feature: str
    family: str
    median_importance: float
    n_images: int


def feature_family(name):
    """Classify a feature name as color, shape, or texture."""
    if any(name.startswith(f"{space}_") for space in COLOR_SPACES):
        return "color"
    if name.startswith(_SHAPE_PREFIXES):
        return "shape"
    if name.startswith(_TEXTURE_PREFIXES):
        return "texture"
    raise ValueError(f"cannot classify feature {name!r} into a family")


def records_from_importances(feature_names, importances, ksize, image_id):
    """Wrap one forest's importance vector as ImportanceRecords."""
    return [
        ImportanceRecord(name, feature_family(name), int(ksize), image_id,
                         float(v))
        for name, v in zip(feature_names, importances)
    ]


def aggregate_importances(records, group_by):
    """Pool importances by a record field and summarize each group.

    ``group_by`` is one of "ksize", "family", "feature", or "image_id";
    values within a group are pooled across all other fields. Returns
    QuartileSummary objects sorted by group key.
    """
    if group_by not in ("ksize", "family", "feature", "image_id"):
        raise ValueError(f"cannot group by {group_by!r}")
    groups = defaultdict(list)
    for rec in records:
        groups[getattr(rec, group_by)].append(rec.importance)
    if not groups:
        raise EmptyGroupError("no importance records to aggregate")
    return [
        tukey_quartiles(groups[key], key=key)
        for key in sorted(groups, key=lambda k: (str(type(k)), k))
    ]


def rank_features(records, top_k=5):
    """Features sorted by cross-image median importance, descending.

    Ties are broken by feature name ascending; at most ``top_k`` entries
    are returned.
    """
    per_feature = defaultdict(list)
    families = {}
    for rec in records:
        per_feature[rec.feature].append(rec.importance)
        families[rec.feature] = rec.family
    if not per_feature:
        raise EmptyGroupError("no importance records to rank")
    ranked = [
        RankedFeature(name, families[name], float(lower_median(vals)), len(vals))
        for name, vals in per_feature.items()
    ]
    ranked.sort(key=lambda r: (-r.median_importance, r.feature))
    return ranked[:top_k]
