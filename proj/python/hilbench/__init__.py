"""Hardware-in-the-loop harness for model-written firmware.

Thin veneer over the C++ core: serial trace parsing, DTW-aligned comparison,
calibration, response extraction, simulated rigs, static source checks and
campaign reporting.
"""

from ._core import (
    CalibrationProfile,
    HarnessError,
    SerialFormat,
    SourceFile,
    Trace,
    __version__,
    aligned_distance,
    calibrate,
    check_source,
    classify_diagnostics,
    compare,
    dtw,
    euclidean_distance,
    extract_source,
    format_serial,
    parse_serial,
    render_prompt,
    report_records,
    run_campaign_config,
    simulate,
    window,
)

__all__ = [
    "CalibrationProfile",
    "HarnessError",
    "SerialFormat",
    "SourceFile",
    "Trace",
    "__version__",
    "aligned_distance",
    "calibrate",
    "check_source",
    "classify_diagnostics",
    "compare",
    "dtw",
    "euclidean_distance",
    "extract_source",
    "format_serial",
    "parse_serial",
    "render_prompt",
    "report_records",
    "run_campaign_config",
    "simulate",
    "window",
]
