"""Color-preserving companions for artistic style transfer.

Match one image's color statistics to another's with an affine per-pixel
map (three solver variants), or keep styling confined to the luminance
channel of YIQ space. The style-transfer engine itself is pluggable: an
external command, or built-in mocks for testing.
"""

from .affine import (
    AffineColorMap,
    apply_affine_map,
    map_report,
    solve_affine_map,
    transform_planes,
    transport_cost,
    verify_constraint,
)
from .colorstats import ColorStats, compute_color_stats, compute_scalar_stats
from .errors import ColorKeepError
from .imgio import (
    FloatImage,
    Uint8Image,
    decode_image,
    encode_image,
    load_image,
    save_image,
    to_float,
    to_u8,
)
from .luminance import (
    YiqImage,
    match_luminance,
    recombine,
    rgb_to_yiq,
    yiq_to_rgb,
)
from .pipeline import (
    PipelineConfig,
    RunReport,
    run,
    run_color_post,
    run_color_pre,
    run_luminance,
)
from .styler import StylerSpec, run_styler

__version__ = "0.1.0"

__all__ = [
    "AffineColorMap",
    "ColorKeepError",
    "ColorStats",
    "FloatImage",
    "PipelineConfig",
    "RunReport",
    "StylerSpec",
    "Uint8Image",
    "YiqImage",
    "apply_affine_map",
    "compute_color_stats",
    "compute_scalar_stats",
    "decode_image",
    "encode_image",
    "load_image",
    "map_report",
    "match_luminance",
    "recombine",
    "rgb_to_yiq",
    "run",
    "run_color_post",
    "run_color_pre",
    "run_luminance",
    "run_styler",
    "save_image",
    "solve_affine_map",
    "to_float",
    "to_u8",
    "transform_planes",
    "transport_cost",
    "verify_constraint",
    "yiq_to_rgb",
]
