"""Scan-path analytics over hierarchical areas of interest.

Convert recorded eye-tracking scan-paths into strings via an AOI hierarchy,
mine AOI-transition patterns with N-grams, compare participants, and lay the
selected patterns out as a constrained force-directed graph on the stimulus.
"""

from .model import (
    AOI_ALPHABET,
    BLANK_CHAR,
    AoiNode,
    AoiTree,
    GazePoint,
    Rect,
    ScanPath,
    Stimulus,
    cut_at_level,
    empty_tree,
    flat_tree,
    locate_point,
    make_group,
    tree_from_json,
    tree_to_json,
    validate_tree,
)
from .detect import DetectionParams, detect_aois
from .encoding import (
    DEFAULT_TAU,
    EncodedSequence,
    RleSequence,
    RleUnit,
    encode_path,
    parse_rle,
    project_to_level,
    rle_encode,
    rle_expand,
    to_transition_string,
)
from .mining import (
    DiffReport,
    PatternTable,
    SimilarityMatrix,
    build_table,
    cosine,
    diff,
    extract_ngrams,
    filter_by_threshold,
    patterns_through_aoi,
    similarity_matrix,
)
from .layout import (
    ColorAssignment,
    LayoutParams,
    PatternSelection,
    TransitionGraph,
    assign_costs,
    assign_hues,
    build_graph,
    run_layout,
    swap_pass,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
