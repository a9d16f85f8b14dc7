"""Batch orchestration: per-(image, ksize) extraction, ranking, reports.

Stages communicate only through files: ``extract`` writes one feature CSV
per (image, ksize) plus ``run_manifest.json``; ``rank`` reads those CSVs
(never the images), fits one forest per CSV, and writes
``importance.csv`` with grouped Tukey summaries and a top-k report.
Every output byte is a function of (dataset, config, seed), independent
of the worker count.
"""

import hashlib
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from joblib import Parallel, delayed

from .color import ColorFeatureExtractor
from .colorspaces import CHANNEL_RANGES, COLOR_SPACES
from .errors import DegenerateTargetError
from .forest import GiniRandomForest, binarize_deciles
from .imaging import grid_for_image, label_regions, load_image, load_mask
from .matrix import FeatureMatrix
from .ranking import (FAMILIES, ImportanceRecord, aggregate_importances,
                      rank_features, records_from_importances)
from .shape import ShapeFeatureExtractor
from .texture import TextureFeatureExtractor
from .validation import check_paired_dims

log = logging.getLogger("pcbfeat")

DEFAULT_KSIZES = (5, 10, 15, 20, 25)

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_CONFIG = 2

RUN_MANIFEST = "run_manifest.json"
IMPORTANCE_CSV = "importance.csv"
SUMMARY_KSIZE = "summary_ksize.json"
SUMMARY_FAMILY = "summary_family.json"
TOP_FEATURES = "top_features.json"


class ConfigError(ValueError):
    """Invalid configuration or dataset manifest; maps to exit code 2."""


@dataclass
class PipelineConfig:
    """Everything a run needs; round-trips losslessly through JSON."""

    manifest: str = ""
    out_dir: str = "out"
    ksizes: tuple = DEFAULT_KSIZES
    families: tuple = FAMILIES
    seed: int = 0
    jobs: int = 1
    color_spaces: tuple = COLOR_SPACES
    color_stats: tuple = ("mean", "med")
    forest: dict = field(default_factory=dict)
    target_threshold: int = 5
    multiclass: bool = False

    def __post_init__(self):
        self.ksizes = tuple(int(k) for k in self.ksizes)
        self.families = tuple(self.families)
        self.color_spaces = tuple(self.color_spaces)
        self.color_stats = tuple(self.color_stats)
        if not self.ksizes:
            raise ConfigError("ksizes must be non-empty")
        bad = [f for f in self.families if f not in FAMILIES]
        if bad or not self.families:
            raise ConfigError(f"families must be drawn from {FAMILIES}, got {bad}")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

    def to_dict(self):
        return {
            "manifest": self.manifest,
            "out_dir": self.out_dir,
            "ksizes": list(self.ksizes),
            "families": list(self.families),
            "seed": self.seed,
            "jobs": self.jobs,
            "color_spaces": list(self.color_spaces),
            "color_stats": list(self.color_stats),
            "forest": dict(self.forest),
            "target_threshold": self.target_threshold,
            "multiclass": self.multiclass,
        }

    @classmethod
    def from_dict(cls, data):
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def config_hash(self):
        canon = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(canon).hexdigest()


def derive_seed(root_seed, *parts):
    """Stable per-task seed, independent of scheduling order."""
    key = ":".join([str(root_seed), *map(str, parts)]).encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")


def load_dataset_manifest(path):
    """Image/mask entries with paths resolved against the manifest's dir."""
    path = Path(path)
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read dataset manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"dataset manifest {path} is not valid JSON") from exc
    images = data.get("images")
    if not images:
        raise ConfigError(f"no images listed in {path}")
    entries = []
    seen = set()
    for item in images:
        try:
            entry = {
                "id": item["id"],
                "image_path": str((path.parent / item["image_path"]).resolve()),
                "mask_path": str((path.parent / item["mask_path"]).resolve()),
            }
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed manifest entry {item!r}") from exc
        if entry["id"] in seen:
            raise ConfigError(f"duplicate image id {entry['id']!r}")
        seen.add(entry["id"])
        entries.append(entry)
    return entries


def build_extractors(config):
    """(family, extractor) pairs in canonical family order."""
    extractors = []
    if "color" in config.families:
        extractors.append(("color", ColorFeatureExtractor(
            spaces=config.color_spaces, stats=config.color_stats)))
    if "shape" in config.families:
        extractors.append(("shape", ShapeFeatureExtractor()))
    if "texture" in config.families:
        extractors.append(("texture", TextureFeatureExtractor()))
    return extractors


def features_csv_name(image_id, ksize):
    return f"{image_id}_{ksize}.csv"


def extract_one(entry, ksize, config, out_path):
    """Extract one (image, ksize) pair and write its feature CSV."""
    image = load_image(entry["image_path"])
    mask = load_mask(entry["mask_path"])
    check_paired_dims(image, mask)
    grid = grid_for_image(image, ksize)
    labels = np.asarray([lab.decile for lab in label_regions(grid, mask)])
    names, columns = [], []
    for family, extractor in build_extractors(config):
        start = time.perf_counter()
        columns.append(extractor.transform(image, grid))
        names.extend(extractor.get_feature_names_out())
        log.info("%s k=%d %s: %.3fs", entry["id"], ksize, family,
                 time.perf_counter() - start)
    fm = FeatureMatrix(names, np.hstack(columns), labels, entry["id"], ksize)
    fm.to_csv(out_path)
    return fm.n_regions


def _extract_task(entry, ksize, config, out_path):
    try:
        n = extract_one(entry, ksize, config, out_path)
        return {"image_id": entry["id"], "ksize": ksize,
                "path": out_path.name, "n_regions": n}
    except Exception as exc:  # per-image isolation: one bad file != dead batch
        return {"image_id": entry["id"], "ksize": ksize, "error": str(exc)}


@dataclass
class StageResult:
    exit_code: int
    outputs: list
    failures: list


def run_extract(config):
    """Extract all (image, ksize) pairs; returns a StageResult."""
    entries = load_dataset_manifest(config.manifest)
    out_dir = Path(config.out_dir)
    features_dir = out_dir / "features"
    features_dir.mkdir(parents=True, exist_ok=True)
    tasks = [
        (entry, k, features_dir / features_csv_name(entry["id"], k))
        for entry in entries
        for k in config.ksizes
    ]
    if config.jobs == 1:
        results = [_extract_task(e, k, config, p) for e, k, p in tasks]
    else:
        results = Parallel(n_jobs=config.jobs)(
            delayed(_extract_task)(e, k, config, p) for e, k, p in tasks
        )
    outputs = [r for r in results if "error" not in r]
    failures = [r for r in results if "error" in r]
    for f in failures:
        log.warning("extraction failed for %s k=%d: %s",
                    f["image_id"], f["ksize"], f["error"])
    manifest = {
        "package": "pcbfeat",
        "numpy_version": np.__version__,
        "config": config.to_dict(),
        "config_hash": config.config_hash(),
        "seed": config.seed,
        "color_channel_ranges": {
            space: CHANNEL_RANGES[space] for space in config.color_spaces
        } if "color" in config.families else {},
        "extract": {"outputs": outputs, "failures": failures},
    }
    _write_json(out_dir / RUN_MANIFEST, manifest)
    return StageResult(EXIT_PARTIAL if failures else EXIT_OK, outputs, failures)


def _fit_task(csv_path, image_id, ksize, config):
    fm = FeatureMatrix.read_csv(csv_path, image_id, ksize)
    y = fm.labels if config.multiclass else binarize_deciles(
        fm.labels, config.target_threshold)
    forest = GiniRandomForest(
        random_state=derive_seed(config.seed, image_id, ksize, "forest"),
        **config.forest,
    )
    try:
        forest.fit(fm.X, y)
    except DegenerateTargetError as exc:
        return {"image_id": image_id, "ksize": ksize, "degenerate": str(exc)}
    return {"image_id": image_id, "ksize": ksize,
            "feature_names": fm.feature_names,
            "importances": forest.feature_importances_.tolist()}


def run_rank(config):
    """Fit one forest per feature CSV and write importance reports."""
    out_dir = Path(config.out_dir)
    manifest_path = out_dir / RUN_MANIFEST
    if not manifest_path.exists():
        raise ConfigError(f"{manifest_path} not found; run extract first")
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    outputs = manifest.get("extract", {}).get("outputs", [])
    if not outputs:
        raise ConfigError("extraction produced no feature files to rank")
    outputs = sorted(outputs, key=lambda o: (o["ksize"], o["image_id"]))
    tasks = [
        (out_dir / "features" / o["path"], o["image_id"], o["ksize"], config)
        for o in outputs
    ]
    if config.jobs == 1:
        results = [_fit_task(*t) for t in tasks]
    else:
        results = Parallel(n_jobs=config.jobs)(delayed(_fit_task)(*t) for t in tasks)
    records = []
    excluded = []
    for res in results:
        if "degenerate" in res:
            excluded.append(res)
            log.warning("excluded %s k=%d from ranking: %s",
                        res["image_id"], res["ksize"], res["degenerate"])
            continue
        records.extend(records_from_importances(
            res["feature_names"], res["importances"],
            res["ksize"], res["image_id"]))
    if records:
        _write_importance_csv(out_dir / IMPORTANCE_CSV, records)
        write_reports(out_dir, records)
    manifest["rank"] = {
        "forest": dict(config.forest),
        "target_threshold": config.target_threshold,
        "multiclass": config.multiclass,
        "excluded": excluded,
        "n_records": len(records),
    }
    _write_json(manifest_path, manifest)
    code = EXIT_OK if records else EXIT_PARTIAL
    return StageResult(code, records, excluded)


def run_report(config):
    """Regenerate the grouped summaries from importance.csv alone."""
    out_dir = Path(config.out_dir)
    csv_path = out_dir / IMPORTANCE_CSV
    if not csv_path.exists():
        raise ConfigError(f"{csv_path} not found; run rank first")
    records = read_importance_csv(csv_path)
    write_reports(out_dir, records)
    return StageResult(EXIT_OK, records, [])


def write_reports(out_dir, records):
    """summary_ksize.json, summary_family.json, and top_features.json."""
    out_dir = Path(out_dir)
    by_ksize = {
        s.key: s.as_dict() for s in aggregate_importances(records, "ksize")
    }
    _write_json(out_dir / SUMMARY_KSIZE, {str(k): v for k, v in by_ksize.items()})
    families, tops = {}, {}
    for k in sorted(by_ksize):
        subset = [r for r in records if r.ksize == k]
        families[str(k)] = {
            s.key: s.as_dict() for s in aggregate_importances(subset, "family")
        }
        tops[str(k)] = [
            {"feature": r.feature, "family": r.family,
             "median_importance": r.median_importance, "n_images": r.n_images}
            for r in rank_features(subset, top_k=5)
        ]
    _write_json(out_dir / SUMMARY_FAMILY, families)
    _write_json(out_dir / TOP_FEATURES, tops)


def _write_importance_csv(path, records):
    import csv as _csv
    with open(path, "w", newline="") as fh:
        writer = _csv.writer(fh, lineterminator="\n")
        writer.writerow(["feature_name", "family", "ksize", "image_id",
                         "importance"])
        for r in records:
            writer.writerow([r.feature, r.family, r.ksize, r.image_id,
                             repr(r.importance)])


def read_importance_csv(path):
    import csv as _csv
    records = []
    with open(path, newline="") as fh:
        reader = _csv.DictReader(fh)
        for row in reader:
            records.append(ImportanceRecord(
                feature=row["feature_name"],
                family=row["family"],
                ksize=int(row["ksize"]),
                image_id=row["image_id"],
                importance=float(row["importance"]),
            ))
    return records


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
