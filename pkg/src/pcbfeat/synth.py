"""Synthetic PCB-like boards with pixel-exact masks for desk-scale checks.

Boards are a flat substrate with non-overlapping rectangular components.
The default component palette is luma-matched to the substrate: every
color has (nearly) the same BT.601 luma, so grayscale-derived features
cannot stand in for chroma and color-vs-rest comparisons measure what
they claim to.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import PlacementError

SUBSTRATE_GREEN = (40, 120, 60)

# BT.601 luma of each entry is within ~0.3% of the substrate's.
PALETTE_LUMA_MATCHED = (
    (200, 42, 40),   # dark red
    (90, 67, 200),   # blue-violet
    (160, 39, 160),  # magenta
    (120, 91, 0),    # olive brown
    (0, 120, 165),   # teal
)


@dataclass(frozen=True)
class SyntheticBoardSpec:
    """Deterministic recipe for one board image and its mask."""

    width: int = 150
    height: int = 150
    substrate_color: tuple = SUBSTRATE_GREEN
    n_components: int = 10
    size_range: tuple = (12, 40)
    palette: tuple = PALETTE_LUMA_MATCHED
    striped: bool = False
    noise_sigma: float = 0.0
    seed: int = 0
    max_attempts: int = 200


def synth_board(spec):
    """Render a board and its mask; identical bytes for identical specs."""
    rng = np.random.default_rng(spec.seed)
    image = np.empty((spec.height, spec.width, 3), dtype=np.uint8)
    image[:] = np.asarray(spec.substrate_color, dtype=np.uint8)
    mask = np.zeros((spec.height, spec.width), dtype=np.uint8)
    lo, hi = spec.size_range
    for comp in range(spec.n_components):
        for attempt in range(spec.max_attempts):
            w = int(rng.integers(lo, hi + 1))
            h = int(rng.integers(lo, hi + 1))
            if w > spec.width or h > spec.height:
                continue
            x0 = int(rng.integers(0, spec.width - w + 1))
            y0 = int(rng.integers(0, spec.height - h + 1))
            if mask[y0:y0 + h, x0:x0 + w].any():
                continue
            color = np.asarray(spec.palette[comp % len(spec.palette)],
                               dtype=np.float64)
            patch = np.tile(color, (h, w, 1))
            if spec.striped:
                patch[::2] = np.clip(color * 0.6, 0, 255)
            image[y0:y0 + h, x0:x0 + w] = np.rint(patch).astype(np.uint8)
            mask[y0:y0 + h, x0:x0 + w] = 1
            break
        else:
            raise PlacementError(
                f"could not place component {comp} after {spec.max_attempts} tries"
            )
    if spec.noise_sigma > 0:
        noisy = image.astype(np.float64) + rng.normal(0.0, spec.noise_sigma,
                                                      image.shape)
        image = np.clip(np.rint(noisy), 0, 255).astype(np.uint8)
    return image, mask


def write_dataset(out_dir, n_boards, base_spec=None, seed=0):
    """Render a board set plus its dataset manifest; returns the manifest path."""
    out_dir = Path(out_dir)
    (out_dir / "images").mkdir(parents=True, exist_ok=True)
    (out_dir / "masks").mkdir(parents=True, exist_ok=True)
    base = base_spec or SyntheticBoardSpec()
    entries = []
    for i in range(n_boards):
        spec = SyntheticBoardSpec(
            width=base.width, height=base.height,
            substrate_color=base.substrate_color,
            n_components=base.n_components, size_range=base.size_range,
            palette=base.palette, striped=base.striped,
            noise_sigma=base.noise_sigma, seed=seed + i,
            max_attempts=base.max_attempts,
        )
        image, mask = synth_board(spec)
        board_id = f"board{i:02d}"
        image_path = out_dir / "images" / f"{board_id}.png"
        mask_path = out_dir / "masks" / f"{board_id}.png"
        Image.fromarray(image, mode="RGB").save(image_path)
        Image.fromarray(mask * 255, mode="L").save(mask_path)
        entries.append({
            "id": board_id,
            "image_path": f"images/{board_id}.png",
            "mask_path": f"masks/{board_id}.png",
            "board": board_id,
            "side": "front",
        })
    manifest_path = out_dir / "manifest.json"
    with open(manifest_path, "w") as fh:
        json.dump({"images": entries}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest_path
