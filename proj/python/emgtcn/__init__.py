"""Temporal convolution pipeline for simultaneous movement classification.

The compiled core exposes the library's main operations: deterministic
synthetic sessions, the sliding-window feature/label pipeline, TCN and
baseline training/evaluation, and the accuracy/stability/ANOVA helpers.
"""

from ._core import (
    Checkpoint,
    Config,
    accuracy,
    anova_oneway,
    calibrate,
    evaluate,
    extract_features,
    f_survival,
    label_stream,
    load_checkpoint,
    pack_class,
    segment_report,
    stability,
    synth_session,
    train,
    unpack_class,
)

__all__ = [
    "Checkpoint",
    "Config",
    "accuracy",
    "anova_oneway",
    "calibrate",
    "evaluate",
    "extract_features",
    "f_survival",
    "label_stream",
    "load_checkpoint",
    "pack_class",
    "segment_report",
    "stability",
    "synth_session",
    "train",
    "unpack_class",
]
