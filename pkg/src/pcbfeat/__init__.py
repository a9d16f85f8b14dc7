"""Region-windowed PCB image features with random-forest importance ranking.

The package splits an annotated board image into non-overlapping k x k
regions, extracts named color/shape/texture features per region, labels
each region with its component-coverage decile, and ranks features by
Gini importance across a forest fitted per (image, ksize).
"""

from .color import ColorFeatureExtractor
from .colorspaces import (COLOR_SPACES, channel_ranges, convert_color_space,
                          hls_to_rgb, hsv_to_rgb)
from .forest import GiniRandomForest, binarize_deciles, gini_gain, gini_impurity
from .imaging import (RegionGrid, RegionLabel, build_region_grid,
                      coverage_decile, grid_for_image, label_regions,
                      load_image, load_mask, region_blocks, to_gray, KSIZES)
from .matrix import FeatureMatrix
from .pipeline import (PipelineConfig, run_extract, run_rank, run_report,
                       DEFAULT_KSIZES)
from .ranking import (ImportanceRecord, RankedFeature, aggregate_importances,
                      feature_family, rank_features, records_from_importances,
                      FAMILIES)
from .shape import (BlobParams, CornerParams, CornerSet, EdgeParams,
                    ShapeFeatureExtractor, canny_contour_features,
                    canny_thresholds, doh_blobs, shape_feature_slice,
                    shi_tomasi_corners, structure_tensor_response,
                    refine_corner_subpixel, SHAPE_FEATURE_NAMES)
from .stats import QuartileSummary, lower_median, tukey_quartiles
from .synth import (PALETTE_LUMA_MATCHED, SUBSTRATE_GREEN, SyntheticBoardSpec,
                    synth_board, write_dataset)
from .texture import (GaborParams, GlcmSpec, LbpCode, TextureFeatureExtractor,
                      co_occurrence, gabor_kernel, gabor_region_features,
                      gabor_response_stack, glcm_matrices, glcm_properties,
                      glcm_region_features, lbp_codes, lbp_region_features,
                      quantize_levels, rlbp_ulbp_code)

__version__ = "0.1.0"
