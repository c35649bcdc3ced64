"""Event-driven anisotropic optical-flow frame interpolation, desk scale.

The package simulates event streams from synthetic scenes, derives
per-period flow weights from event counts, synthesizes anisotropic
intermediate flows, warps and fuses the bracketing frames, and evaluates
the result against exact scene oracles.
"""

from .errors import FormatError, ValidationError
from .scenes import (
    COVERAGE_THRESHOLD,
    PRESET_NAMES,
    SceneSpec,
    Segment,
    Sprite,
    Trajectory,
    constant_segment,
    disk_mask,
    ground_truth_flow,
    linear_segment,
    make_preset,
    motion_suite,
    ramp_mask,
    rect_mask,
    render_frame,
    sprite_footprint,
    validate_scene,
)
from .events import (
    DEFAULT_CONTRAST,
    LOG_FLOOR,
    CountMaps,
    EventStream,
    EventTensor,
    count_map,
    integrate_events,
    simulate_events,
    to_event_tensor,
)
from .masks import (
    FlowMask,
    directional_mask,
    event_count_ratio_mask,
    gradient_axis_weights,
    linear_mask,
)
from .flow import (
    FlowField,
    intermediate_flows,
    single_source_intermediate,
    zero_flow,
)
from .warp import VisibilityMap, backward_warp, fuse, time_weighted_visibility
from .metrics import (
    BinarizedEventMap,
    LossWeights,
    baseline_losses,
    binarize_event_count,
    binarize_prediction,
    gaussian_blur,
    interpolation_error,
    motion_consistency_loss,
    psnr,
    ssim,
    total_loss,
)
from .codecs import (
    read_events,
    read_flo,
    read_frame,
    read_mask,
    read_scene,
    write_events,
    write_flo,
    write_frame,
    write_mask,
    write_scene,
)
from .pipeline import (
    DEFAULT_TAUS,
    MODES,
    RunConfig,
    evaluate_dirs,
    interpolate_once,
    load_config,
    load_scene,
    run_interpolate,
    run_toy,
    simulate_scene_events,
    write_report,
)

__version__ = "0.1.0"
