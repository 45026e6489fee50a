"""Order split prediction and fulfillment optimizer shortcutting."""

from ._shortcut import (
    ShortcutError,
    accuracy,
    catalog_version,
    coverage_accuracy_curve,
    default_config,
    extract_rules,
    feature_importance,
    feature_names,
    featurize,
    generate,
    label,
    log_loss,
    nested_cv,
    predict,
    read_features,
    read_labels,
    route,
    run_pipeline,
    solve,
    train,
)

__all__ = [
    "ShortcutError",
    "accuracy",
    "catalog_version",
    "coverage_accuracy_curve",
    "default_config",
    "extract_rules",
    "feature_importance",
    "feature_names",
    "featurize",
    "generate",
    "label",
    "log_loss",
    "nested_cv",
    "predict",
    "read_features",
    "read_labels",
    "route",
    "run_pipeline",
    "solve",
    "train",
]
