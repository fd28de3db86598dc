"""Cube complexes, cubical maps and completions of subgroups of cubical groups."""
from .completion import (
    BUDGET_EXCEEDED,
    FINISHED,
    AttachmentSite,
    CompletionResult,
    attach_cube,
    bouquet_from_words,
    canonicalize,
    complete,
    complete_words,
    find_cube_attachment,
    find_cube_identification,
    find_fold,
    fold,
    identify_cubes,
)
from .cube_complex import (
    Cube,
    CubeComplex,
    DirectedEdge,
    InvalidComplexError,
    Symmetry,
    check_npc,
    hyperplanes,
    is_flag,
    link,
    make_cube,
    validate_complex,
)
from .cubical_map import CubicalMap, is_covering, is_immersion, is_local_isometry, validate_map
from .geometry import (
    CoverBall,
    HalfspacePoset,
    combinatorial_geodesics,
    convex_hull,
    dual_to_ambient,
    halfspaces_meeting,
    sageev_dual,
    universal_cover_ball,
)
from .group_algorithms import (
    core_graph,
    cubical_presentation,
    finite_index,
    is_normal,
    membership,
    normalized_by,
    power_membership,
    reduced_forms,
    spanning_tree,
    word_to_cubical,
    words_equal,
)
from .standard import grid, rose, salvetti, subdivided_circle, three_squares_corner, torus
from .words import CubicalWord, loop, parse_word, path
